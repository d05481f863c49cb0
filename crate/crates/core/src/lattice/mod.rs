//! Exact integer and rational linear algebra: normal forms, saturation,
//! kernels and cokernels.

mod matrix;
mod normal_form;
mod sublattice;

pub use matrix::{IntMatrix, RatMatrix};
pub use normal_form::{
    hnf, hnf_with_transform, integer_kernel, rank, snf, solve_integral, SmithDecomposition,
};
pub use sublattice::{cokernel_group, lattice_intersect, rational_kernel, saturate, Sublattice};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("determinant is zero, cokernel is infinite")]
    InfiniteCokernel,
    #[error("ambient ranks differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("basis columns are linearly dependent")]
    DependentColumns,
}
