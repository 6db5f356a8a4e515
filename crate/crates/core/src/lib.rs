pub mod cli;
pub mod equivariant;
pub mod error;
pub mod flow;
pub mod homological;
pub mod linalg;
pub mod liealg;
pub mod normalform;
pub mod polyvf;
pub mod rational;
pub mod renorm;

pub use error::{Error, Result};
