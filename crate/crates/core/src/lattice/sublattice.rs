use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::matrix::{IntMatrix, RatMatrix};
use super::normal_form::{hnf, integer_kernel, snf, solve_integral};
use super::LatticeError;
use crate::groups::FiniteAbelianGroup;

/// A sublattice of `Z^ambient_rank`, stored by its canonical HNF basis
/// (columns). Two sublattices are equal iff they have the same span.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: IntMatrix,
    saturated: bool,
}

impl Sublattice {
    /// Sublattice spanned by linearly independent columns.
    pub fn new(basis: &IntMatrix) -> Result<Self, LatticeError> {
        let h = hnf(basis);
        if h.cols() != basis.cols() {
            return Err(LatticeError::DependentColumns);
        }
        Ok(Self::from_hnf(h, basis.rows()))
    }

    /// Sublattice spanned by arbitrary (possibly dependent) columns.
    pub fn span(generators: &IntMatrix) -> Self {
        Self::from_hnf(hnf(generators), generators.rows())
    }

    pub fn from_vectors(ambient_rank: usize, vectors: &[Vec<BigInt>]) -> Self {
        Self::span(&IntMatrix::from_columns(ambient_rank, vectors))
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self::from_hnf(IntMatrix::zeros(ambient_rank, 0), ambient_rank)
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self::from_hnf(IntMatrix::identity(ambient_rank), ambient_rank)
    }

    fn from_hnf(basis: IntMatrix, ambient_rank: usize) -> Self {
        let saturated = saturation_index(&basis).is_one();
        Self {
            ambient_rank,
            basis,
            saturated,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// `[saturate(self) : self]`.
    pub fn saturation_index(&self) -> BigInt {
        saturation_index(&self.basis)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.ambient_rank && solve_integral(&self.basis, v).is_some()
    }

    /// Whether every basis vector of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        other.basis.columns().iter().all(|c| self.contains(c))
    }

    /// Coordinates of `v` in the canonical basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_integral(&self.basis, v)
    }
}

/// Product of the invariant factors of a basis matrix: the index of the
/// span in its saturation.
fn saturation_index(basis: &IntMatrix) -> BigInt {
    snf(basis)
        .invariant_factors
        .iter()
        .fold(BigInt::one(), |acc, f| acc * f)
}

/// Saturation: the rational span intersected with the ambient lattice.
pub fn saturate(s: &Sublattice) -> Sublattice {
    if s.saturated {
        return s.clone();
    }
    let d = snf(s.basis());
    // basis = U^-1 · S · V^-1, so the first k columns of U^-1 span the
    // same rational space and extend to a unimodular basis.
    let u_inv = d
        .u
        .to_rat()
        .inverse()
        .expect("unimodular")
        .to_int()
        .expect("unimodular inverse is integral");
    let cols = u_inv.submatrix(0..s.ambient_rank, 0..s.rank());
    Sublattice::from_hnf(hnf(&cols), s.ambient_rank)
}

/// `Z^n / col-span(M)` for square nonsingular `M`.
pub fn cokernel_group(m: &IntMatrix) -> Result<FiniteAbelianGroup, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare(m.rows(), m.cols()));
    }
    if m.det()?.is_zero() {
        return Err(LatticeError::InfiniteCokernel);
    }
    let d = snf(m);
    Ok(FiniteAbelianGroup::from_factors_unchecked(
        d.invariant_factors
            .into_iter()
            .filter(|f| !f.is_one())
            .collect(),
    ))
}

/// `S ∩ T` inside the common ambient lattice.
pub fn lattice_intersect(s: &Sublattice, t: &Sublattice) -> Result<Sublattice, LatticeError> {
    if s.ambient_rank != t.ambient_rank {
        return Err(LatticeError::DimensionMismatch {
            left: s.ambient_rank,
            right: t.ambient_rank,
        });
    }
    let n = s.ambient_rank;
    if s.rank() == 0 || t.rank() == 0 {
        return Ok(Sublattice::zero(n));
    }
    // S a = T b  <=>  [S | -T] (a, b) = 0
    let stacked = s.basis.hstack(&t.basis.neg())?;
    let ker = integer_kernel(&stacked);
    let a = ker.submatrix(0..s.rank(), 0..ker.cols());
    Ok(Sublattice::span(&(&s.basis * &a)))
}

/// Saturated integer basis of `ker(M) ∩ Z^cols`.
pub fn rational_kernel(m: &RatMatrix) -> Sublattice {
    let (_, scaled) = m.clear_denominators();
    Sublattice::span(&integer_kernel(&scaled))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn saturate_examples() {
        let s = Sublattice::from_vectors(2, &[v(&[2, 0])]);
        assert!(!s.is_saturated());
        assert_eq!(saturate(&s), Sublattice::from_vectors(2, &[v(&[1, 0])]));

        let full = Sublattice::full(2);
        assert_eq!(saturate(&full), full);

        let t = Sublattice::from_vectors(2, &[v(&[2, 2]), v(&[0, 4])]);
        assert_eq!(t.saturation_index(), BigInt::from(8));
        assert_eq!(saturate(&t), Sublattice::full(2));
    }

    #[test]
    fn cokernel_examples() {
        assert!(cokernel_group(&IntMatrix::identity(3)).unwrap().is_trivial());
        assert_eq!(
            cokernel_group(&IntMatrix::diagonal(&[2, 3])).unwrap().factors_u64(),
            vec![6]
        );
        assert_eq!(
            cokernel_group(&IntMatrix::diagonal(&[2, 2])).unwrap().factors_u64(),
            vec![2, 2]
        );
        assert!(matches!(
            cokernel_group(&IntMatrix::from_rows(&[[1, 2], [2, 4]])),
            Err(LatticeError::InfiniteCokernel)
        ));
    }

    #[test]
    fn intersect_examples() {
        let e1 = Sublattice::from_vectors(2, &[v(&[1, 0])]);
        let e2 = Sublattice::from_vectors(2, &[v(&[0, 1])]);
        assert_eq!(lattice_intersect(&e1, &e1).unwrap(), e1);
        assert_eq!(lattice_intersect(&e1, &e2).unwrap().rank(), 0);
        let diag = Sublattice::from_vectors(2, &[v(&[1, 1])]);
        let even = Sublattice::from_vectors(2, &[v(&[2, 0]), v(&[0, 2])]);
        assert_eq!(
            lattice_intersect(&diag, &even).unwrap(),
            Sublattice::from_vectors(2, &[v(&[2, 2])])
        );
        assert!(matches!(
            lattice_intersect(&e1, &Sublattice::zero(3)),
            Err(LatticeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rational_kernel_examples() {
        assert_eq!(rational_kernel(&RatMatrix::zeros(2, 2)), Sublattice::full(2));
        assert_eq!(rational_kernel(&RatMatrix::identity(2)).rank(), 0);
        let k = rational_kernel(&RatMatrix::from_rows(&[[1, 2]]));
        assert_eq!(k, Sublattice::from_vectors(2, &[v(&[2, -1])]));
    }

    #[test]
    fn dependent_columns_rejected() {
        let m = IntMatrix::from_rows(&[[1, 2], [1, 2]]);
        assert!(matches!(Sublattice::new(&m), Err(LatticeError::DependentColumns)));
    }
}
