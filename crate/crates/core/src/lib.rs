//! Exact dynamics of affine monomial maps `x ↦ γ·x^A` on algebraic tori.

pub mod dynamics;
pub mod exactnum;
pub mod intlinalg;
pub mod numtheory;
pub mod oracle;
pub mod par;
pub mod polyalg;
pub mod torus;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular matrix: determinant is zero")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no admissible modular embedding found")]
    EmbeddingFailure,
    #[error("numeric iteration did not converge")]
    NonConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;

pub use exactnum::KummerNumber;
pub use intlinalg::{IntMatrix, Lattice};
pub use polyalg::IntPoly;
