//! Exact arithmetic in the max-plus semiring `(R ∪ {eps}, max, +)`.

mod matrix;
mod scalar;
mod vector;

pub use matrix::{
    kleene_plus, kleene_star, mat_add, mat_mul, mat_power, scalar_mat_mul, MaxPlusMatrix,
};
pub use scalar::{
    scalar_oplus, scalar_otimes, Ext, Field, Rational, RawScalar, Real, Scalar, DEFAULT_TOLERANCE,
};
pub use vector::MaxPlusVector;
