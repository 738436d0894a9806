//! Finite-scale numerics for completely bounded norms on measure spaces.
//!
//! - [`linalg`]: dense complex matrices, SVD-based norms, Haar unitaries.
//! - [`dilation`]: block unitary dilation of a contraction, four-unitary
//!   decomposition.
//! - [`manifold`]: ascent over unitary tuples, tori and contraction balls.
//! - [`norms`]: level norms of matrix-valued measures and the max/min ℓ₁
//!   comparison.
//! - [`embedding`]: truncated embedding of measures into products of matrix
//!   algebras, its pre-adjoint and trace pairing.
//! - [`experiments`]: seeded experiments producing JSON/CSV reports.

pub mod dilation;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod linalg;
pub mod manifold;
pub mod norms;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Seed, C64};
pub use manifold::OptimizerConfig;
pub use norms::{AtomicMeasure, MatrixMeasure, NormEstimate, UnitaryTuple, Witness};
