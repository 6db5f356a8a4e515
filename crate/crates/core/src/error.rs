use thiserror::Error;

use crate::polyvf::PolyVectorField;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unknown representation `{0}` (known: so2, so3, su2)")]
    UnknownRep(String),

    #[error("invalid representation: {0}")]
    InvalidRep(String),

    /// The commutant dimension is not 1, 2 or 4, so the input is not one of
    /// the supported irreducible representations.
    #[error("centralizer has dimension {dim}; representation is not irreducible of real, complex or quaternionic type")]
    NotIrreducible { dim: usize },

    #[error("centralizer basis cannot be normalized over the rationals: {0}")]
    NotNormalizable(String),

    #[error("wrong Schur type: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },

    #[error("field is not quasilinear over this centralizer basis (residual has {} terms)", residual.len())]
    NotQuasilinear { residual: Box<PolyVectorField> },

    #[error("field is not equivariant: bracket with generator {generator} is nonzero ({} residual terms)", residual.len())]
    NotEquivariant {
        generator: usize,
        residual: Box<PolyVectorField>,
    },

    #[error("operation not applicable to case {case}: {reason}")]
    WrongCase { case: String, reason: String },

    #[error("field is identically zero")]
    ZeroField,

    #[error("renormalization is ineffective: {0}")]
    Ineffective(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
