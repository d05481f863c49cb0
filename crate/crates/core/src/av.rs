//! Lattice models of complex abelian varieties.
//!
//! A variety of dimension `g` is `Z^{2g}` with a rational complex structure
//! `J`. The dual variety lives on the dual lattice in the dual basis, with
//! complex structure `-Jᵀ`. The dual of a homomorphism with matrix `F` has
//! matrix `Fᵀ`. The canonical identification `X → X^^` is `-1` in these
//! coordinates. That sign makes `φ_L` of a polarization (a skew matrix)
//! symmetric, and it makes the symplectic forms of the `symplectic` module
//! symmetric matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::groups::FiniteAbelianGroup;
use crate::lattice::{
    cokernel_group, rational_kernel, solve_integral, IntMatrix, LatticeError, RatMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AvError {
    #[error("invalid complex structure: {0}")]
    InvalidComplexStructure(String),
    #[error("matrix is not complex-linear for the given structures")]
    NotComplexLinear,
    #[error("matrix shape {found:?} does not match {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("target of the inner map differs from the source of the outer map")]
    SourceTargetMismatch,
    #[error("determinant is zero: not an isogeny")]
    NotAnIsogeny,
    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),
    #[error("representatives live on different varieties or have different n")]
    DimensionMismatch,
    #[error("invalid torsion point: {0}")]
    InvalidTorsionPoint(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `Z^{2g}` with complex structure `J`, `J² = -I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianVarietyModel {
    g: usize,
    j: RatMatrix,
}

impl AbelianVarietyModel {
    pub fn new(j: RatMatrix) -> Result<Self, AvError> {
        if !j.is_square() || !j.rows().is_multiple_of(2) || j.rows() == 0 {
            return Err(AvError::InvalidComplexStructure(
                "J must be square of even rank".into(),
            ));
        }
        let n = j.rows();
        if &j * &j != RatMatrix::identity(n).neg() {
            return Err(AvError::InvalidComplexStructure("J^2 != -I".into()));
        }
        Ok(Self { g: n / 2, j })
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn j(&self) -> &RatMatrix {
        &self.j
    }

    /// The dual variety: same rank, structure `-Jᵀ`.
    pub fn dual(&self) -> Self {
        Self {
            g: self.g,
            j: self.j.transpose().neg(),
        }
    }

    /// `X × Y` with block-diagonal structure.
    pub fn product(&self, other: &Self) -> Self {
        let n = self.rank() + other.rank();
        let mut j = RatMatrix::zeros(n, n);
        for r in 0..self.rank() {
            for c in 0..self.rank() {
                j[(r, c)] = self.j[(r, c)].clone();
            }
        }
        for r in 0..other.rank() {
            for c in 0..other.rank() {
                j[(self.rank() + r, self.rank() + c)] = other.j[(r, c)].clone();
            }
        }
        Self { g: self.g + other.g, j }
    }

    /// Transports the structure along a basis change: `P` expresses the new
    /// basis in old coordinates, so the new structure is `P⁻¹ J P`.
    pub fn rebase(&self, p: &IntMatrix) -> Result<Self, AvError> {
        let pr = p.to_rat();
        let inv = pr.inverse()?;
        Self::new(&(&inv * &self.j) * &pr)
    }
}

/// `g`-fold power of the square elliptic curve `C / Z[i]`.
pub fn product_elliptic(g: usize) -> AbelianVarietyModel {
    assert!(g >= 1, "dimension must be positive");
    let mut j = RatMatrix::zeros(2 * g, 2 * g);
    for b in 0..g {
        j[(2 * b, 2 * b + 1)] = BigRational::from_integer((-1).into());
        j[(2 * b + 1, 2 * b)] = BigRational::one();
    }
    AbelianVarietyModel { g, j }
}

pub fn dual_av(x: &AbelianVarietyModel) -> AbelianVarietyModel {
    x.dual()
}

/// A homomorphism of abelian varieties, given by its lattice map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: AbelianVarietyModel,
    target: AbelianVarietyModel,
    f: IntMatrix,
}

impl Homomorphism {
    pub fn new(
        source: AbelianVarietyModel,
        target: AbelianVarietyModel,
        f: IntMatrix,
    ) -> Result<Self, AvError> {
        let expected = (target.rank(), source.rank());
        if f.shape() != expected {
            return Err(AvError::ShapeMismatch {
                expected,
                found: f.shape(),
            });
        }
        let fr = f.to_rat();
        if &target.j * &fr != &fr * &source.j {
            return Err(AvError::NotComplexLinear);
        }
        Ok(Self { source, target, f })
    }

    pub fn identity(x: &AbelianVarietyModel) -> Self {
        Self::scalar(x, 1)
    }

    /// Multiplication by `k`.
    pub fn scalar(x: &AbelianVarietyModel, k: i64) -> Self {
        Self {
            source: x.clone(),
            target: x.clone(),
            f: IntMatrix::scalar(x.rank(), k),
        }
    }

    pub fn source(&self) -> &AbelianVarietyModel {
        &self.source
    }

    pub fn target(&self) -> &AbelianVarietyModel {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.f
    }

    pub fn is_isogeny(&self) -> bool {
        self.f.is_square() && !self.f.det().map(|d| d.is_zero()).unwrap_or(true)
    }

    /// Whether `f^ = f` for a map into the dual of its source. With the
    /// canonical identification carrying a sign, that means `Fᵀ = -F`.
    pub fn is_symmetric(&self) -> bool {
        self.target == self.source.dual() && self.f.is_skew()
    }
}

/// `f^ : Y^ → X^` with matrix `Fᵀ`. Complex-linearity for the dual
/// structures is re-verified.
pub fn dual_hom(f: &Homomorphism) -> Homomorphism {
    Homomorphism::new(f.target.dual(), f.source.dual(), f.f.transpose())
        .expect("the transpose of a complex-linear map is complex-linear for the dual structures")
}

/// `f ∘ h`.
pub fn hom_compose(f: &Homomorphism, h: &Homomorphism) -> Result<Homomorphism, AvError> {
    if h.target != f.source {
        return Err(AvError::SourceTargetMismatch);
    }
    Homomorphism::new(h.source.clone(), f.target.clone(), &f.f * &h.f)
}

/// `ker f ≅ Λ_target / F(Λ_source)`.
pub fn isogeny_kernel(f: &Homomorphism) -> Result<FiniteAbelianGroup, AvError> {
    match cokernel_group(&f.f) {
        Ok(g) => Ok(g),
        Err(LatticeError::InfiniteCokernel) | Err(LatticeError::NotSquare(..)) => {
            Err(AvError::NotAnIsogeny)
        }
        Err(e) => Err(e.into()),
    }
}

/// An integral Riemann form `E` on the lattice of a variety.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    variety: AbelianVarietyModel,
    e: IntMatrix,
}

impl Polarization {
    /// Checks `Eᵀ = -E`, `Jᵀ E J = E` and that `E(Jx, y) = xᵀ Jᵀ E y` is
    /// positive definite (Sylvester's criterion, exact).
    pub fn new(variety: AbelianVarietyModel, e: IntMatrix) -> Result<Self, AvError> {
        let n = variety.rank();
        if e.shape() != (n, n) {
            return Err(AvError::ShapeMismatch {
                expected: (n, n),
                found: e.shape(),
            });
        }
        if !e.is_skew() {
            return Err(AvError::InvalidPolarization("E is not alternating".into()));
        }
        let er = e.to_rat();
        let j = variety.j();
        if &(&j.transpose() * &er) * j != er {
            return Err(AvError::InvalidPolarization("E(Jx, Jy) != E(x, y)".into()));
        }
        let s = &j.transpose() * &er;
        if !leading_minors_positive(&s) {
            return Err(AvError::InvalidPolarization(
                "E(Jx, y) is not positive definite".into(),
            ));
        }
        Ok(Self { variety, e })
    }

    pub fn variety(&self) -> &AbelianVarietyModel {
        &self.variety
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.e
    }

    /// The induced polarization on the dual variety: the smallest positive
    /// integral multiple of `E⁻¹`, with the sign that makes it positive.
    pub fn dual_polarization(&self) -> Polarization {
        let inv = self.e.to_rat().inverse().expect("polarizations are nondegenerate");
        let (_, scaled) = inv.clear_denominators();
        let content = scaled
            .entries()
            .iter()
            .fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let prim = IntMatrix::new(
            scaled.rows(),
            scaled.cols(),
            scaled.entries().iter().map(|v| v / &content).collect(),
        )
        .expect("same shape");
        let dual = self.variety.dual();
        Polarization::new(dual.clone(), prim.clone())
            .or_else(|_| Polarization::new(dual, prim.neg()))
            .expect("inverse of a polarization is a polarization up to sign")
    }
}

fn leading_minors_positive(s: &RatMatrix) -> bool {
    if s != &s.transpose() {
        return false;
    }
    (1..=s.rows()).all(|k| {
        let mut sub = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                sub[(i, j)] = s[(i, j)].clone();
            }
        }
        sub.det().map(|d| d.is_positive()).unwrap_or(false)
    })
}

/// `φ_L : X → X^` with matrix `E`.
pub fn phi_from_polarization(l: &Polarization) -> Homomorphism {
    Homomorphism::new(l.variety.clone(), l.variety.dual(), l.e.clone())
        .expect("E is complex-linear from J to -J^T")
}

/// An alternating pairing on `X[n]` representing a Brauer class.
///
/// In coordinates `X[n] = ((1/n)Z / Z)^{2g}`, `e_α(a/n, b/n) = aᵀ E b / n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerRepresentative {
    variety: AbelianVarietyModel,
    n: BigInt,
    e_alpha: IntMatrix,
}

impl BrauerRepresentative {
    /// Stores `e_alpha` reduced mod `n`. Only shapes are checked here; use
    /// [`validate_brauer_rep`] for the alternating condition.
    pub fn new(variety: AbelianVarietyModel, n: BigInt, e_alpha: IntMatrix) -> Result<Self, AvError> {
        let r = variety.rank();
        if e_alpha.shape() != (r, r) {
            return Err(AvError::ShapeMismatch {
                expected: (r, r),
                found: e_alpha.shape(),
            });
        }
        if !n.is_positive() {
            return Err(AvError::InvalidComplexStructure("n must be positive".into()));
        }
        let e_alpha = e_alpha.reduce_mod(&n);
        Ok(Self { variety, n, e_alpha })
    }

    pub fn trivial(variety: &AbelianVarietyModel) -> Self {
        let r = variety.rank();
        Self {
            variety: variety.clone(),
            n: BigInt::one(),
            e_alpha: IntMatrix::zeros(r, r),
        }
    }

    pub fn variety(&self) -> &AbelianVarietyModel {
        &self.variety
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.e_alpha
    }

    /// Transport along a basis change `P` (new basis in old coordinates).
    pub fn rebase(&self, p: &IntMatrix) -> Result<Self, AvError> {
        Self::new(
            self.variety.rebase(p)?,
            self.n.clone(),
            &(&p.transpose() * &self.e_alpha) * p,
        )
    }
}

/// Diagonal `≡ 0` and `eᵀ ≡ -e (mod n)`.
pub fn validate_brauer_rep(a: &BrauerRepresentative) -> bool {
    let e = &a.e_alpha;
    let n = &a.n;
    let r = e.rows();
    (0..r).all(|i| {
        e[(i, i)].is_multiple_of(n) && (0..r).all(|j| (&e[(i, j)] + &e[(j, i)]).is_multiple_of(n))
    })
}

/// A basis of `NS(X)`: integral alternating `E` with `Jᵀ E J = E`.
pub fn neron_severi_basis(x: &AbelianVarietyModel) -> Vec<IntMatrix> {
    let r = x.rank();
    let pairs: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .collect();
    let elementary = |(i, j): (usize, usize)| {
        let mut m = IntMatrix::zeros(r, r);
        m[(i, j)] = BigInt::one();
        m[(j, i)] = BigInt::from(-1);
        m
    };
    let j = x.j();
    let mut constraint = RatMatrix::zeros(r * r, pairs.len());
    for (c, &p) in pairs.iter().enumerate() {
        let b = elementary(p).to_rat();
        let d = (&(&j.transpose() * &b) * j).add(&b.neg()).expect("same shape");
        for (k, v) in d.entries().iter().enumerate() {
            constraint[(k, c)] = v.clone();
        }
    }
    let ker = rational_kernel(&constraint);
    ker.basis()
        .columns()
        .iter()
        .map(|coeffs| {
            let mut m = IntMatrix::zeros(r, r);
            for (c, &(i, jj)) in pairs.iter().enumerate() {
                m[(i, jj)] = coeffs[c].clone();
                m[(jj, i)] = -&coeffs[c];
            }
            m
        })
        .collect()
}

/// Whether `e_a - e_b (mod n)` is the reduction of a Néron–Severi class,
/// i.e. whether both representatives define the same Brauer class.
pub fn ns_difference_test(a: &BrauerRepresentative, b: &BrauerRepresentative) -> Result<bool, AvError> {
    if a.variety != b.variety || a.n != b.n {
        return Err(AvError::DimensionMismatch);
    }
    let r = a.variety.rank();
    let diff = a.e_alpha.sub(&b.e_alpha)?;
    let pairs: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .collect();
    let target: Vec<BigInt> = pairs.iter().map(|&(i, j)| diff[(i, j)].clone()).collect();
    let mut cols: Vec<Vec<BigInt>> = neron_severi_basis(&a.variety)
        .iter()
        .map(|m| pairs.iter().map(|&(i, j)| m[(i, j)].clone()).collect())
        .collect();
    for k in 0..pairs.len() {
        let mut c = vec![BigInt::zero(); pairs.len()];
        c[k] = a.n.clone();
        cols.push(c);
    }
    if pairs.is_empty() {
        return Ok(true);
    }
    let lattice = IntMatrix::from_columns(pairs.len(), &cols);
    Ok(solve_integral(&lattice, &target).is_some())
}

/// A point of finite order, coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionPoint {
    variety: AbelianVarietyModel,
    coords: Vec<BigRational>,
}

impl TorsionPoint {
    pub fn new(variety: AbelianVarietyModel, coords: Vec<BigRational>) -> Result<Self, AvError> {
        if coords.len() != variety.rank() {
            return Err(AvError::InvalidTorsionPoint(format!(
                "{} coordinates for rank {}",
                coords.len(),
                variety.rank()
            )));
        }
        let one = BigRational::one();
        if coords.iter().any(|c| c.is_negative() || *c >= one) {
            return Err(AvError::InvalidTorsionPoint("coordinates must lie in [0, 1)".into()));
        }
        Ok(Self { variety, coords })
    }

    pub fn variety(&self) -> &AbelianVarietyModel {
        &self.variety
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn order(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_elliptic_structure() {
        let x = product_elliptic(1);
        assert_eq!(x.j(), &RatMatrix::from_rows(&[[0, -1], [1, 0]]));
        let y = product_elliptic(2);
        assert_eq!(y.rank(), 4);
        assert!(AbelianVarietyModel::new(y.j().clone()).is_ok());
    }

    #[test]
    fn dual_conventions() {
        let x = product_elliptic(1);
        assert_eq!(dual_av(&x), x);
        let y = x.rebase(&IntMatrix::from_rows(&[[1, 1], [0, 1]])).unwrap();
        assert_eq!(y.j(), &RatMatrix::from_rows(&[[-1, -2], [1, 1]]));
        assert_eq!(dual_av(&y).j(), &RatMatrix::from_rows(&[[1, -1], [2, -1]]));
        assert_eq!(dual_av(&dual_av(&y)), y);
    }

    #[test]
    fn rejects_bad_structures() {
        assert!(AbelianVarietyModel::new(RatMatrix::zeros(3, 4)).is_err());
        assert!(AbelianVarietyModel::new(RatMatrix::identity(2)).is_err());
    }

    #[test]
    fn homomorphism_basics() {
        let x = product_elliptic(1);
        let id = Homomorphism::identity(&x);
        assert_eq!(dual_hom(&id).matrix(), &IntMatrix::identity(2));
        let two = Homomorphism::scalar(&x, 2);
        let three = Homomorphism::scalar(&x, 3);
        assert_eq!(hom_compose(&two, &three).unwrap().matrix(), &IntMatrix::scalar(2, 6));
        assert_eq!(hom_compose(&two, &id).unwrap(), two);
        assert_eq!(dual_hom(&two).matrix(), &IntMatrix::scalar(2, 2));
        let f = Homomorphism::new(x.clone(), x.clone(), IntMatrix::from_rows(&[[1, 1], [-1, 1]])).unwrap();
        assert_eq!(dual_hom(&dual_hom(&f)), f);
        assert_eq!(
            Homomorphism::new(x.clone(), x.clone(), IntMatrix::diagonal(&[1, 2])),
            Err(AvError::NotComplexLinear)
        );
        let y = x.rebase(&IntMatrix::from_rows(&[[1, 1], [0, 1]])).unwrap();
        let d = Homomorphism::identity(&y);
        assert_eq!(hom_compose(&two, &d), Err(AvError::SourceTargetMismatch));
    }

    #[test]
    fn kernels() {
        let x = product_elliptic(1);
        assert_eq!(isogeny_kernel(&Homomorphism::scalar(&x, 2)).unwrap().factors_u64(), vec![2, 2]);
        assert!(isogeny_kernel(&Homomorphism::identity(&x)).unwrap().is_trivial());
        assert_eq!(isogeny_kernel(&Homomorphism::scalar(&x, 0)), Err(AvError::NotAnIsogeny));
        let y = product_elliptic(2);
        let f = Homomorphism::new(y.clone(), y.clone(), IntMatrix::diagonal(&[1, 1, 2, 2])).unwrap();
        assert_eq!(isogeny_kernel(&f).unwrap().factors_u64(), vec![2, 2]);
    }

    #[test]
    fn principal_polarization() {
        let x = product_elliptic(1);
        let l = Polarization::new(x.clone(), IntMatrix::from_rows(&[[0, -1], [1, 0]])).unwrap();
        let phi = phi_from_polarization(&l);
        assert!(phi.is_symmetric());
        assert!(isogeny_kernel(&phi).unwrap().is_trivial());
        let l2 = Polarization::new(x.clone(), IntMatrix::from_rows(&[[0, -2], [2, 0]])).unwrap();
        assert_eq!(isogeny_kernel(&phi_from_polarization(&l2)).unwrap().factors_u64(), vec![2, 2]);
        assert!(Polarization::new(x, IntMatrix::from_rows(&[[0, 1], [-1, 0]])).is_err());
    }

    #[test]
    fn dual_polarization_of_principal() {
        let x = product_elliptic(2);
        let e = IntMatrix::from_rows(&[[0, -3, 0, 0], [3, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]);
        let l = Polarization::new(x.clone(), e).unwrap();
        let d = l.dual_polarization();
        assert_eq!(d.variety(), &x.dual());
        assert!(d.matrix().det().unwrap() > BigInt::zero());
    }

    #[test]
    fn brauer_validation() {
        let y = product_elliptic(2);
        assert!(validate_brauer_rep(&BrauerRepresentative::trivial(&y)));
        let fixture = IntMatrix::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        let a = BrauerRepresentative::new(y.clone(), 2.into(), fixture).unwrap();
        assert!(validate_brauer_rep(&a));
        let mut bad = IntMatrix::zeros(4, 4);
        bad[(0, 0)] = BigInt::one();
        let b = BrauerRepresentative::new(y, 2.into(), bad).unwrap();
        assert!(!validate_brauer_rep(&b));
    }

    #[test]
    fn ns_difference_on_elliptic_curve() {
        let x = product_elliptic(1);
        let basis = neron_severi_basis(&x);
        assert_eq!(basis.len(), 1);
        let zero = BrauerRepresentative::new(x.clone(), 2.into(), IntMatrix::zeros(2, 2)).unwrap();
        let one = BrauerRepresentative::new(x.clone(), 2.into(), IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert!(ns_difference_test(&zero, &one).unwrap());
        assert!(ns_difference_test(&one, &one).unwrap());
        let other_n = BrauerRepresentative::new(x, 3.into(), IntMatrix::zeros(2, 2)).unwrap();
        assert_eq!(ns_difference_test(&zero, &other_n), Err(AvError::DimensionMismatch));
    }

    #[test]
    fn ns_difference_detects_distinct_classes() {
        // On E×E with E = C/Z[i], NS has rank 4 < 6, so some alternating
        // forms mod 2 are not reductions of NS classes.
        let y = product_elliptic(2);
        assert_eq!(neron_severi_basis(&y).len(), 4);
        let zero = BrauerRepresentative::new(y.clone(), 2.into(), IntMatrix::zeros(4, 4)).unwrap();
        let fixture = IntMatrix::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        let a = BrauerRepresentative::new(y.clone(), 2.into(), fixture.clone()).unwrap();
        let shifted = BrauerRepresentative::new(
            y.clone(),
            2.into(),
            fixture.add(&IntMatrix::scalar(4, 2)).unwrap(),
        )
        .unwrap();
        assert!(ns_difference_test(&a, &shifted).unwrap());
        let verdicts: Vec<bool> = (0..6)
            .map(|k| {
                let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
                let (i, j) = pairs[k];
                let mut m = IntMatrix::zeros(4, 4);
                m[(i, j)] = BigInt::one();
                m[(j, i)] = BigInt::one();
                let b = BrauerRepresentative::new(y.clone(), 2.into(), m).unwrap();
                ns_difference_test(&zero, &b).unwrap()
            })
            .collect();
        assert!(verdicts.iter().any(|v| *v));
        assert!(verdicts.iter().any(|v| !*v));
    }
}
