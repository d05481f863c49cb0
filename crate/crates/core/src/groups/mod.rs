//! Finite abelian groups with alternating `Q/Z`-valued pairings.
//!
//! Elements are coordinate vectors relative to the invariant-factor
//! generators, each coordinate reduced modulo its factor. Pairings take
//! values additively in `Q/Z`; the value `1/m` stands for a primitive
//! `m`-th root of unity.

mod pairing;
mod subgroup;

pub use pairing::{
    frac, heisenberg_pairing, pairing_is_nondegenerate, symplectic_basis, AlternatingPairing,
    SymplecticBasis,
};
pub use subgroup::{subgroup_presentation, SubgroupPresentation};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{snf, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invariant factors must be >= 2 and form a divisibility chain: {0:?}")]
    InvalidFactors(Vec<String>),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("pairing is degenerate")]
    DegeneratePairing,
    #[error("element has {found} coordinates, group has {expected} generators")]
    ElementShape { expected: usize, found: usize },
}

/// `⊕ Z/m_i` with `m_1 | m_2 | … | m_k`, every `m_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<BigInt>) -> Result<Self, GroupError> {
        let two = BigInt::from(2);
        let chain_ok = factors.iter().all(|f| *f >= two)
            && factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !chain_ok {
            return Err(GroupError::InvalidFactors(
                factors.iter().map(ToString::to_string).collect(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn from_u64(factors: &[u64]) -> Result<Self, GroupError> {
        Self::new(factors.iter().map(|&f| BigInt::from(f)).collect())
    }

    pub(crate) fn from_factors_unchecked(factors: Vec<BigInt>) -> Self {
        debug_assert!(Self::new(factors.clone()).is_ok());
        Self { factors }
    }

    /// Normalizes an arbitrary direct sum `⊕ Z/c_i` (any positive `c_i`)
    /// into invariant-factor form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let diag: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut col = vec![BigInt::zero(); orders.len()];
                col[i] = c.clone();
                col
            })
            .collect();
        let m = IntMatrix::from_columns(orders.len(), &diag);
        let factors = snf(&m)
            .invariant_factors
            .into_iter()
            .filter(|f| !f.is_one())
            .collect();
        Self::from_factors_unchecked(factors)
    }

    pub fn trivial() -> Self {
        Self { factors: vec![] }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Factors as machine integers. Panics if a factor exceeds `u64`.
    pub fn factors_u64(&self) -> Vec<u64> {
        self.factors
            .iter()
            .map(|f| f.to_u64().expect("invariant factor fits in u64"))
            .collect()
    }

    /// Number of invariant-factor generators.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter()
            .zip(&self.factors)
            .map(|(a, m)| a.mod_floor(m))
            .collect()
    }

    pub fn check_element(&self, x: &[BigInt]) -> Result<(), GroupError> {
        if x.len() != self.rank() {
            return Err(GroupError::ElementShape {
                expected: self.rank(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, c: &BigInt, x: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().map(|a| a * c).collect();
        self.reduce(&s)
    }

    pub fn element_order(&self, x: &[BigInt]) -> BigInt {
        x.iter().zip(&self.factors).fold(BigInt::one(), |acc, (a, m)| {
            let g = a.gcd(m);
            acc.lcm(&(m / g))
        })
    }

    pub fn generator(&self, i: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.rank()];
        e[i] = BigInt::one();
        e
    }

    /// All elements in lexicographic coordinate order. Only sensible for
    /// small groups.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let sizes = self.factors_u64();
        let total: u64 = sizes.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0u64; sizes.len()];
        for _ in 0..total {
            out.push(cur.iter().map(|&c| BigInt::from(c)).collect());
            for i in (0..sizes.len()).rev() {
                cur[i] += 1;
                if cur[i] < sizes[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
        out
    }
}

/// Whether a group is `⊕(Z/m_i)^2`, with one `m_i` per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareDecomposition {
    pub is_square_type: bool,
    pub m_list: Vec<BigInt>,
}

impl SquareDecomposition {
    pub fn m_list_u64(&self) -> Vec<u64> {
        self.m_list
            .iter()
            .map(|m| m.to_u64().expect("fits in u64"))
            .collect()
    }
}

pub fn square_type_test(g: &FiniteAbelianGroup) -> SquareDecomposition {
    let f = g.factors();
    let pairs_up = f.len().is_multiple_of(2) && f.chunks(2).all(|c| c[0] == c[1]);
    SquareDecomposition {
        is_square_type: pairs_up,
        m_list: if pairs_up {
            f.chunks(2).map(|c| c[0].clone()).collect()
        } else {
            vec![]
        },
    }
}

/// The pair `(H, e)` attached to an irreducible homogeneous projective
/// bundle of rank `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousBundleData {
    pub n: BigInt,
    pub h: FiniteAbelianGroup,
    pub e: AlternatingPairing,
}

/// `|H| = n^2`, `exp(H) | n`, and `e` a nondegenerate alternating pairing
/// on `H`.
pub fn validate_bundle_data(d: &HomogeneousBundleData) -> bool {
    d.e.group() == &d.h
        && d.h.order() == &d.n * &d.n
        && d.n.is_multiple_of(&d.h.exponent())
        && pairing_is_nondegenerate(&d.e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_u64(f).unwrap()
    }

    #[test]
    fn factor_validation() {
        assert!(FiniteAbelianGroup::from_u64(&[2, 4]).is_ok());
        assert!(FiniteAbelianGroup::from_u64(&[2, 3]).is_err());
        assert!(FiniteAbelianGroup::from_u64(&[1, 2]).is_err());
        assert!(FiniteAbelianGroup::from_u64(&[]).unwrap().is_trivial());
    }

    #[test]
    fn normalizes_cyclic_orders() {
        let g = FiniteAbelianGroup::from_cyclic_orders(&[2.into(), 3.into(), 1.into()]);
        assert_eq!(g.factors_u64(), vec![6]);
        let g = FiniteAbelianGroup::from_cyclic_orders(&[4.into(), 2.into()]);
        assert_eq!(g.factors_u64(), vec![2, 4]);
    }

    #[test]
    fn square_type_examples() {
        let d = square_type_test(&grp(&[2, 2, 6, 6]));
        assert!(d.is_square_type);
        assert_eq!(d.m_list_u64(), vec![2, 6]);
        assert!(!square_type_test(&grp(&[2, 4])).is_square_type);
        let t = square_type_test(&grp(&[]));
        assert!(t.is_square_type && t.m_list.is_empty());
        assert_eq!(square_type_test(&grp(&[3, 3, 3, 3])).m_list_u64(), vec![3, 3]);
        assert!(!square_type_test(&grp(&[2, 2, 2])).is_square_type);
    }

    #[test]
    fn element_enumeration_and_order() {
        let g = grp(&[2, 4]);
        let els = g.elements();
        assert_eq!(els.len(), 8);
        assert_eq!(els[1], vec![BigInt::from(0), BigInt::from(1)]);
        assert_eq!(g.element_order(&[1.into(), 2.into()]), BigInt::from(2));
        assert_eq!(g.element_order(&[1.into(), 1.into()]), BigInt::from(4));
    }

    #[test]
    fn bundle_data_examples() {
        let h = grp(&[2, 2]);
        let e = heisenberg_pairing(&grp(&[2]));
        assert!(validate_bundle_data(&HomogeneousBundleData {
            n: 2.into(),
            h: h.clone(),
            e: e.clone(),
        }));
        // Z/4 carries only the zero alternating pairing.
        let z4 = grp(&[4]);
        let zero = AlternatingPairing::zero(z4.clone());
        assert!(!validate_bundle_data(&HomogeneousBundleData {
            n: 2.into(),
            h: z4,
            e: zero,
        }));
        assert!(!validate_bundle_data(&HomogeneousBundleData { n: 3.into(), h, e }));
    }
}
