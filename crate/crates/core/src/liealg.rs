//! Matrix Lie algebra representations, equivariance checks and the
//! centralizer (commutant) of a representation with its Schur type.
//!
//! Built-in representations:
//!
//! * `so2`: the rotation generator `[[0,-1],[1,0]]` on R^2 (complex type);
//! * `so3`: `(H_a)_{ij} = -eps_{aij}` on R^3, so that `[H_1, H_2] = H_3` (real type);
//! * `su2`: the fundamental representation on R^4 = C^2 (quaternionic type).

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{coordinates_in_span, nullspace, Matrix};
use crate::polyvf::PolyVectorField;
use crate::rational::{exact_sqrt, format_rational, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRep {
    dim: usize,
    name: Option<String>,
    generators: Vec<Matrix>,
    /// Built-in representations satisfy the orthogonality and
    /// sphere-transitivity hypotheses behind the quasilinear form; user input
    /// is only checked for antisymmetry and closure.
    certified: bool,
    preferred_centralizer: Option<Vec<Matrix>>,
}

impl MatrixRep {
    /// Validates a user-supplied representation: square `dim x dim`,
    /// antisymmetric generators closed under the commutator.
    pub fn new(dim: usize, name: Option<String>, generators: Vec<Matrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidRep("dimension must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidRep("at least one generator is required".into()));
        }
        for (a, h) in generators.iter().enumerate() {
            if h.rows() != dim || h.cols() != dim {
                return Err(Error::InvalidRep(format!(
                    "generator {} is {}x{}, expected {dim}x{dim}",
                    a + 1,
                    h.rows(),
                    h.cols()
                )));
            }
            if !h.is_antisymmetric() {
                return Err(Error::InvalidRep(format!("generator {} is not antisymmetric", a + 1)));
            }
        }
        for (a, ha) in generators.iter().enumerate() {
            for (b, hb) in generators.iter().enumerate().skip(a + 1) {
                if coordinates_in_span(&generators, &ha.commutator(hb)).is_none() {
                    return Err(Error::InvalidRep(format!(
                        "[H_{}, H_{}] is not in the span of the generators",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            name,
            generators,
            certified: false,
            preferred_centralizer: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Linear vector fields `Y_a = (H_a x)^i d_i`.
    pub fn generator_fields(&self) -> Vec<PolyVectorField> {
        self.generators.iter().map(PolyVectorField::linear).collect()
    }

    pub fn to_json(&self) -> MatrixRepJson {
        MatrixRepJson {
            dim: self.dim,
            name: self.name.clone(),
            generators: self.generators.iter().map(Matrix::to_strings).collect(),
        }
    }

    /// Parses a representation document. A document whose only content is a
    /// built-in name (no generators) resolves to that built-in.
    pub fn from_json(doc: &MatrixRepJson) -> Result<Self> {
        if doc.generators.is_empty() {
            if let Some(name) = &doc.name {
                let rep = builtin_rep(name)?;
                check_dim(rep.dim, doc.dim)?;
                return Ok(rep);
            }
        }
        let gens = doc
            .generators
            .iter()
            .map(|g| Matrix::from_strings(doc.dim, g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.dim, doc.name.clone(), gens)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixRepJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// One entry per generator, row-major rational strings.
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
}

fn levi_civita(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// The su(2) generators on R^4.
pub fn su2_generators() -> [Matrix; 3] {
    [
        Matrix::from_i64(4, &[0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0]),
        Matrix::from_i64(4, &[0, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0]),
        Matrix::from_i64(4, &[0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]),
    ]
}

/// The quaternionic centralizer basis `K_1, K_2, K_3` of the su(2)
/// representation, with `K_1 K_2 = K_3`.
pub fn su2_centralizer_matrices() -> [Matrix; 3] {
    [
        Matrix::from_i64(4, &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]),
        Matrix::from_i64(4, &[0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0]),
        Matrix::from_i64(4, &[0, 0, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0]),
    ]
}

pub fn builtin_rep(name: &str) -> Result<MatrixRep> {
    let (dim, generators, preferred) = match name {
        "so2" => (2, vec![Matrix::from_i64(2, &[0, -1, 1, 0])], None),
        "so3" => {
            let gens = (0..3)
                .map(|a| {
                    let mut m = Matrix::zeros(3, 3);
                    for i in 0..3 {
                        for j in 0..3 {
                            m[(i, j)] = Q::from_integer((-levi_civita(a, i, j)).into());
                        }
                    }
                    m
                })
                .collect();
            (3, gens, None)
        }
        "su2" => {
            let mut pref = vec![Matrix::identity(4)];
            pref.extend(su2_centralizer_matrices());
            (4, su2_generators().to_vec(), Some(pref))
        }
        other => return Err(Error::UnknownRep(other.to_string())),
    };
    let mut rep = MatrixRep::new(dim, Some(name.to_string()), generators)?;
    rep.certified = true;
    rep.preferred_centralizer = preferred;
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchurType {
    Real,
    Complex,
    Quaternionic,
}

impl SchurType {
    /// `c(T) = s + 1`.
    pub fn intertwining_number(self) -> usize {
        match self {
            SchurType::Real => 1,
            SchurType::Complex => 2,
            SchurType::Quaternionic => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchurType::Real => "REAL",
            SchurType::Complex => "COMPLEX",
            SchurType::Quaternionic => "QUATERNIONIC",
        }
    }
}

impl fmt::Display for SchurType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Basis `K_0 = I, K_1, ..., K_s` of the centralizer of a representation.
///
/// Besides the matrices, the basis carries the linear structure table
/// `{K_p x, K_q x} = sum_s C[p][q][s] K_s x`, computed once through the
/// polynomial bracket, and the scalars `sigma_p` with
/// `sym(K_p) = sigma_p I`. Together they give every bracket of the
/// equivariant basis fields, see [`crate::equivariant::structure_bracket`].
#[derive(Clone, PartialEq, Eq)]
pub struct CentralizerBasis {
    dim: usize,
    matrices: Vec<Matrix>,
    schur_type: SchurType,
    rep: MatrixRep,
    symmetric_scalars: Vec<Q>,
    table: Vec<Vec<Vec<Q>>>,
}

impl fmt::Debug for CentralizerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CentralizerBasis")
            .field("dim", &self.dim)
            .field("schur_type", &self.schur_type)
            .field("rep", &self.rep.name)
            .field("matrices", &self.matrices)
            .finish()
    }
}

impl CentralizerBasis {
    /// Assembles a basis from explicit matrices.
    ///
    /// Checks that `K_0 = I`, that every matrix commutes with the
    /// representation, that each symmetric part is a multiple of the
    /// identity and that the basis is closed under commutators. The Schur
    /// type relations themselves are not checked here; see
    /// [`verify_quaternion_relations`].
    pub fn from_parts(rep: &MatrixRep, schur_type: SchurType, matrices: Vec<Matrix>) -> Result<Self> {
        let n = rep.dim;
        if matrices.len() != schur_type.intertwining_number() {
            return Err(Error::InvalidRep(format!(
                "{schur_type} basis needs {} matrices, found {}",
                schur_type.intertwining_number(),
                matrices.len()
            )));
        }
        if matrices[0] != Matrix::identity(n) {
            return Err(Error::InvalidRep("K_0 must be the identity".into()));
        }
        let mut symmetric_scalars = Vec::with_capacity(matrices.len());
        for (p, k) in matrices.iter().enumerate() {
            if k.rows() != n || k.cols() != n {
                return Err(Error::InvalidRep(format!("K_{p} has the wrong shape")));
            }
            for (a, h) in rep.generators.iter().enumerate() {
                if !k.commutator(h).is_zero() {
                    return Err(Error::InvalidRep(format!("K_{p} does not commute with H_{}", a + 1)));
                }
            }
            let sym = (k + &k.transpose()).scale(&Q::new(1.into(), 2.into()));
            let sigma = sym[(0, 0)].clone();
            if sym != Matrix::identity(n).scale(&sigma) {
                return Err(Error::InvalidRep(format!(
                    "symmetric part of K_{p} is not a multiple of the identity"
                )));
            }
            symmetric_scalars.push(sigma);
        }
        let table = linear_structure_table(&matrices)?;
        Ok(Self {
            dim: n,
            matrices,
            schur_type,
            rep: rep.clone(),
            symmetric_scalars,
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, p: usize) -> &Matrix {
        &self.matrices[p]
    }

    /// Number of basis matrices, `s + 1`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn schur_type(&self) -> SchurType {
        self.schur_type
    }

    pub fn rep(&self) -> &MatrixRep {
        &self.rep
    }

    pub fn group_label(&self) -> String {
        self.rep.name.clone().unwrap_or_else(|| "custom".into())
    }

    /// `sigma_p` with `(K_p + K_p^T)/2 = sigma_p I`.
    pub fn symmetric_scalar(&self, p: usize) -> &Q {
        &self.symmetric_scalars[p]
    }

    /// Coefficients of `{K_p x, K_q x}` on the basis `K_s x`.
    pub fn linear_bracket(&self, p: usize, q: usize) -> &[Q] {
        &self.table[p][q]
    }
}

/// `{K_p x, K_q x}` computed with the polynomial bracket and re-expressed on
/// the basis. Closure failures are reported as invalid bases.
fn linear_structure_table(matrices: &[Matrix]) -> Result<Vec<Vec<Vec<Q>>>> {
    let fields: Vec<PolyVectorField> = matrices.iter().map(PolyVectorField::linear).collect();
    let n = matrices[0].rows();
    let mut table = vec![vec![Vec::new(); matrices.len()]; matrices.len()];
    for (p, fp) in fields.iter().enumerate() {
        for (q, fq) in fields.iter().enumerate() {
            let b = fp.bracket(fq)?;
            let m = linear_field_matrix(&b, n)?;
            table[p][q] = coordinates_in_span(matrices, &m).ok_or_else(|| {
                Error::InvalidRep(format!("{{K_{p} x, K_{q} x}} is not in the span of the basis"))
            })?;
        }
    }
    Ok(table)
}

/// Reads back the matrix of a field that is known to be linear.
pub fn linear_field_matrix(f: &PolyVectorField, n: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(n, n);
    for (i, mono, c) in f.terms() {
        if mono.degree() != 1 {
            return Err(Error::Internal("expected a linear field".into()));
        }
        let j = mono.exponents().iter().position(|&e| e == 1).expect("degree one");
        m[(i, j)] = c.clone();
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    pub equivariant: bool,
    /// `(generator index, {f, Y_a})` for every generator with nonzero residual.
    pub violations: Vec<(usize, PolyVectorField)>,
}

/// `{f, Y_a} = 0` for every generator field `Y_a = H_a x`.
pub fn check_equivariance(f: &PolyVectorField, rep: &MatrixRep) -> Result<EquivarianceReport> {
    check_dim(rep.dim, f.dim())?;
    let mut violations = Vec::new();
    for (a, y) in rep.generator_fields().iter().enumerate() {
        let residual = f.bracket(y)?;
        if !residual.is_zero() {
            violations.push((a, residual));
        }
    }
    Ok(EquivarianceReport {
        equivariant: violations.is_empty(),
        violations,
    })
}

/// Commutant of the generators restricted to a parametrised family of
/// matrices; returns a basis of the solution space as matrices.
fn commutant_in_family(rep: &MatrixRep, family: &[Matrix]) -> Vec<Matrix> {
    let n = rep.dim;
    let rows = rep.generators.len() * n * n;
    let mut system = Matrix::zeros(rows, family.len());
    for (j, e) in family.iter().enumerate() {
        for (a, h) in rep.generators.iter().enumerate() {
            let c = e.commutator(h);
            for (idx, v) in c.entries().iter().enumerate() {
                system[(a * n * n + idx, j)] = v.clone();
            }
        }
    }
    nullspace(&system)
        .into_iter()
        .map(|v| {
            family
                .iter()
                .zip(&v)
                .filter(|(_, c)| !c.is_zero())
                .fold(Matrix::zeros(n, n), |acc, (e, c)| &acc + &e.scale(c))
        })
        .collect()
}

fn elementary_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = Matrix::zeros(n, n);
            m[(i, j)] = Q::one();
            out.push(m);
        }
    }
    out
}

fn antisymmetric_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zeros(n, n);
            m[(i, j)] = Q::one();
            m[(j, i)] = -Q::one();
            out.push(m);
        }
    }
    out
}

/// `<A, B> = tr(A^T B) / n`; the identity and every normalized `K_p` have
/// unit norm.
fn inner(a: &Matrix, b: &Matrix) -> Q {
    let n = a.rows();
    (&a.transpose() * b).trace() / Q::from_integer((n as i64).into())
}

fn first_upper_entry(m: &Matrix) -> Q {
    let n = m.rows();
    for i in 0..n {
        for j in i + 1..n {
            if !m[(i, j)].is_zero() {
                return m[(i, j)].clone();
            }
        }
    }
    Q::zero()
}

fn normalize_unit(m: &Matrix) -> Result<Matrix> {
    let norm_sq = inner(m, m);
    let norm = exact_sqrt(&norm_sq).ok_or_else(|| {
        Error::NotNormalizable(format!("squared norm {} is not a rational square", format_rational(&norm_sq)))
    })?;
    Ok(m.scale(&(Q::one() / norm)))
}

/// Computes a normalized basis of the centralizer and its Schur type.
///
/// The commutant is solved exactly over the rationals. The symmetric part of
/// the commutant of an orthogonal irreducible representation is `R I`; the
/// antisymmetric part supplies `K_1..K_s`, rescaled so that `K_a^2 = -I`.
/// Orientation: in the complex case the first nonzero upper-triangular entry
/// of `K_1` is negative (so `so2` gives `J = [[0,-1],[1,0]]`); in the
/// quaternionic case `K_1`, `K_2` are Gram-Schmidt normalized with positive
/// leading upper entries and `K_3 = K_1 K_2`. Built-ins that carry a
/// reference basis use it after checking it spans the same commutant.
pub fn compute_centralizer(rep: &MatrixRep) -> Result<CentralizerBasis> {
    let n = rep.dim;
    let full = commutant_in_family(rep, &elementary_basis(n));
    let d = full.len();
    if !matches!(d, 1 | 2 | 4) {
        return Err(Error::NotIrreducible { dim: d });
    }
    let anti = commutant_in_family(rep, &antisymmetric_basis(n));
    if anti.len() + 1 != d {
        return Err(Error::NotIrreducible { dim: d });
    }
    let schur_type = match d {
        1 => SchurType::Real,
        2 => SchurType::Complex,
        _ => SchurType::Quaternionic,
    };
    let id = Matrix::identity(n);

    if let Some(pref) = &rep.preferred_centralizer {
        let in_span = pref.iter().all(|m| coordinates_in_span(&full, m).is_some());
        if pref.len() == d && in_span {
            let basis = CentralizerBasis::from_parts(rep, schur_type, pref.clone())?;
            if schur_type != SchurType::Quaternionic || verify_quaternion_relations(&basis)? {
                return Ok(basis);
            }
        }
    }

    let mut matrices = vec![id.clone()];
    match schur_type {
        SchurType::Real => {}
        SchurType::Complex => {
            let b = &anti[0];
            let sq = b * b;
            let c = -sq[(0, 0)].clone();
            if !c.is_positive() || sq != id.scale(&-c.clone()) {
                return Err(Error::NotIrreducible { dim: d });
            }
            let mut k1 = normalize_unit(b)?;
            if first_upper_entry(&k1).is_positive() {
                k1 = -&k1;
            }
            matrices.push(k1);
        }
        SchurType::Quaternionic => {
            let mut k1 = normalize_unit(&anti[0])?;
            if first_upper_entry(&k1).is_negative() {
                k1 = -&k1;
            }
            let proj = inner(&anti[1], &k1);
            let mut k2 = normalize_unit(&(&anti[1] - &k1.scale(&proj)))?;
            if first_upper_entry(&k2).is_negative() {
                k2 = -&k2;
            }
            let k3 = &k1 * &k2;
            matrices.extend([k1, k2, k3]);
        }
    }
    let basis = CentralizerBasis::from_parts(rep, schur_type, matrices)?;
    if schur_type == SchurType::Quaternionic && !verify_quaternion_relations(&basis)? {
        return Err(Error::NotNormalizable("normalized basis violates the quaternion relations".into()));
    }
    if schur_type == SchurType::Complex && &(basis.matrix(1) * basis.matrix(1)) != &-&id {
        return Err(Error::NotNormalizable("K_1^2 != -I".into()));
    }
    Ok(basis)
}

/// `K_a K_b = eps_{abc} K_c - delta_{ab} I` for `a, b in {1, 2, 3}`.
pub fn quaternion_relations_hold(k: &[Matrix]) -> bool {
    if k.len() != 4 {
        return false;
    }
    let n = k[0].rows();
    let id = Matrix::identity(n);
    for a in 0..3 {
        for b in 0..3 {
            let mut expected = Matrix::zeros(n, n);
            if a == b {
                expected = &expected - &id;
            }
            for c in 0..3 {
                let e = levi_civita(a, b, c);
                if e != 0 {
                    expected = &expected + &k[c + 1].scale(&Q::from_integer(e.into()));
                }
            }
            if &k[a + 1] * &k[b + 1] != expected {
                return false;
            }
        }
    }
    true
}

pub fn verify_quaternion_relations(basis: &CentralizerBasis) -> Result<bool> {
    if basis.schur_type != SchurType::Quaternionic {
        return Err(Error::TypeMismatch {
            expected: SchurType::Quaternionic.to_string(),
            found: basis.schur_type.to_string(),
        });
    }
    Ok(quaternion_relations_hold(&basis.matrices))
}
