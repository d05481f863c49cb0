//! Symplectic abelian varieties, Lagrangian sublattices and the twisted
//! model `A_(X,α) = (X × X^) / K_α`.
//!
//! The form `Ψ` on the lattice of a symplectic variety is a symmetric,
//! even, unimodular matrix. Symmetric rather than skew because the dual of
//! `ψ` is `-Ψᵀ` once `X^^` is identified with `X` through `-1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::av::{
    validate_brauer_rep, AbelianVarietyModel, AvError, BrauerRepresentative, Homomorphism,
    Polarization, TorsionPoint,
};
use crate::groups::{
    square_type_test, AlternatingPairing, FiniteAbelianGroup, GroupError, SquareDecomposition,
};
use crate::lattice::{
    cokernel_group, hnf, integer_kernel, lattice_intersect, snf, IntMatrix, LatticeError,
    RatMatrix, Sublattice,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("invalid symplectic structure: {0}")]
    InvalidSymplectic(String),
    #[error("not a Lagrangian sublattice: {0}")]
    NotLagrangian(String),
    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("homomorphism is not symmetric")]
    NotSymmetric,
    #[error("Lagrangians meet in a positive-dimensional subvariety (rank {0})")]
    InfiniteIntersection(usize),
    #[error("sublattice is not stable under the complex structure")]
    NotJStable,
    #[error("{m} is not divisible by n = {n}")]
    NotDivisible { n: BigInt, m: BigInt },
    #[error("no transverse multiplier up to {0}")]
    SearchExhausted(BigInt),
    #[error("not a symplectic morphism: {0}")]
    NotSymplecticMorphism(String),
    #[error("ambient symplectic varieties differ")]
    AmbientMismatch,
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Av(#[from] AvError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Lattice `Z^{2N}` with complex structure `J` and symplectic form `Ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticAV {
    j: RatMatrix,
    psi: IntMatrix,
}

impl SymplecticAV {
    pub fn new(j: RatMatrix, psi: IntMatrix) -> Result<Self, SymplecticError> {
        let bad = |s: &str| Err(SymplecticError::InvalidSymplectic(s.into()));
        if !psi.is_square() || !psi.rows().is_multiple_of(2) || psi.rows() == 0 {
            return bad("form must be square of even rank");
        }
        if j.shape() != psi.shape() {
            return bad("J and form have different shapes");
        }
        if !psi.is_symmetric() {
            return bad("form is not symmetric");
        }
        if (0..psi.rows()).any(|i| psi[(i, i)].is_odd()) {
            return bad("form is not even");
        }
        if psi.det()?.abs() != BigInt::one() {
            return bad("form is not unimodular");
        }
        AbelianVarietyModel::new(j.clone())?;
        let pr = psi.to_rat();
        if &(&j.transpose() * &pr) * &j != pr {
            return bad("form is not J-invariant");
        }
        Ok(Self { j, psi })
    }

    pub fn rank(&self) -> usize {
        self.psi.rows()
    }

    /// Rank of a Lagrangian sublattice.
    pub fn lagrangian_rank(&self) -> usize {
        self.rank() / 2
    }

    pub fn j(&self) -> &RatMatrix {
        &self.j
    }

    pub fn psi(&self) -> &IntMatrix {
        &self.psi
    }

    pub fn variety(&self) -> AbelianVarietyModel {
        AbelianVarietyModel::new(self.j.clone()).expect("validated at construction")
    }

    /// Change of lattice basis by a unimodular `T` preserving `Ψ`: the
    /// sublattice `L` becomes `T·L` and `J` becomes `T J T⁻¹`.
    pub fn transport(&self, t: &IntMatrix) -> Result<Self, SymplecticError> {
        let tr = t.to_rat();
        let inv = tr.inverse()?;
        let psi = &(&t.transpose() * &self.psi) * t;
        if psi != self.psi {
            return Err(SymplecticError::NotSymplecticMorphism(
                "transport matrix does not preserve the form".into(),
            ));
        }
        Self::new(&(&tr * &self.j) * &inv, self.psi.clone())
    }
}

/// `X × X^` with `B((x, ξ), (y, η)) = ξ·y + η·x`.
pub fn standard_symplectic(x: &AbelianVarietyModel) -> SymplecticAV {
    let r = x.rank();
    SymplecticAV {
        j: x.product(&x.dual()).j().clone(),
        psi: standard_form(r),
    }
}

pub(crate) fn standard_form(r: usize) -> IntMatrix {
    let mut psi = IntMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        psi[(i, r + i)] = BigInt::one();
        psi[(r + i, i)] = BigInt::one();
    }
    psi
}

/// A saturated sublattice of rank `N` on which `Ψ` vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianSublattice {
    ambient: SymplecticAV,
    lattice: Sublattice,
}

impl LagrangianSublattice {
    pub fn new(ambient: SymplecticAV, lattice: Sublattice) -> Result<Self, SymplecticError> {
        lagrangian_defect(&lattice, &ambient)
            .map_or(Ok(()), |why| Err(SymplecticError::NotLagrangian(why)))?;
        Ok(Self { ambient, lattice })
    }

    pub fn ambient(&self) -> &SymplecticAV {
        &self.ambient
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn basis(&self) -> &IntMatrix {
        self.lattice.basis()
    }

    /// The structure induced on the sublattice, if it is `J`-stable.
    pub fn variety(&self) -> Result<AbelianVarietyModel, SymplecticError> {
        let s = self.basis().to_rat();
        let st = s.transpose();
        let gram_inv = (&st * &s).inverse()?;
        let jw = &(&gram_inv * &st) * &(&self.ambient.j * &s);
        if &s * &jw != &self.ambient.j * &s {
            return Err(SymplecticError::NotJStable);
        }
        Ok(AbelianVarietyModel::new(jw)?)
    }
}

fn lagrangian_defect(s: &Sublattice, a: &SymplecticAV) -> Option<String> {
    if s.ambient_rank() != a.rank() {
        return Some(format!(
            "ambient rank {} differs from {}",
            s.ambient_rank(),
            a.rank()
        ));
    }
    if s.rank() != a.lagrangian_rank() {
        return Some(format!("rank {} is not {}", s.rank(), a.lagrangian_rank()));
    }
    if !s.is_saturated() {
        return Some("not saturated".into());
    }
    let b = s.basis();
    let st_psi = &b.transpose() * &a.psi;
    if !(&st_psi * b).is_zero() {
        return Some("form does not vanish".into());
    }
    // Λ/S → S^* must be an isomorphism: the map Λ → S^*, v ↦ Sᵀ Ψ v, is
    // onto exactly when its Smith factors are all 1.
    let d = snf(&st_psi);
    if d.rank() != s.rank() || d.invariant_factors.iter().any(|f| !f.is_one()) {
        return Some("induced pairing Λ/S × S → Z is not unimodular".into());
    }
    None
}

pub fn is_lagrangian(s: &Sublattice, a: &SymplecticAV) -> bool {
    lagrangian_defect(s, a).is_none()
}

/// A lattice map `F` with `Fᵀ Ψ_t F = c·Ψ_s` and `J_t F = F J_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMorphism {
    source: SymplecticAV,
    target: SymplecticAV,
    f: IntMatrix,
    multiplier: BigInt,
}

impl SymplecticMorphism {
    pub fn new(
        source: SymplecticAV,
        target: SymplecticAV,
        f: IntMatrix,
        multiplier: BigInt,
    ) -> Result<Self, SymplecticError> {
        let bad = |s: String| Err(SymplecticError::NotSymplecticMorphism(s));
        if f.shape() != (target.rank(), source.rank()) {
            return bad(format!("matrix has shape {:?}", f.shape()));
        }
        if !multiplier.is_positive() {
            return bad("multiplier must be positive".into());
        }
        if &(&f.transpose() * &target.psi) * &f != source.psi.scale(&multiplier) {
            return bad("form is not pulled back to a multiple of the source form".into());
        }
        let fr = f.to_rat();
        if &target.j * &fr != &fr * &source.j {
            return bad("matrix is not complex-linear".into());
        }
        Ok(Self {
            source,
            target,
            f,
            multiplier,
        })
    }

    pub fn source(&self) -> &SymplecticAV {
        &self.source
    }

    pub fn target(&self) -> &SymplecticAV {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.f
    }

    pub fn multiplier(&self) -> &BigInt {
        &self.multiplier
    }

    pub fn is_isomorphism(&self) -> bool {
        self.multiplier.is_one()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, SymplecticError> {
        if other.target != self.source {
            return Err(SymplecticError::AmbientMismatch);
        }
        Self::new(
            other.source.clone(),
            self.target.clone(),
            &self.f * &other.f,
            &self.multiplier * &other.multiplier,
        )
    }

    pub fn inverse(&self) -> Result<Self, SymplecticError> {
        if !self.is_isomorphism() {
            return Err(SymplecticError::NotSymplecticMorphism(
                "only isomorphisms are invertible".into(),
            ));
        }
        let inv = self.f.to_rat().inverse()?.to_int().ok_or_else(|| {
            SymplecticError::NotSymplecticMorphism("inverse is not integral".into())
        })?;
        Self::new(self.target.clone(), self.source.clone(), inv, BigInt::one())
    }
}

/// `A_(X,α)` together with the quotient map from `X × X^`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedSymplecticModel {
    brauer: BrauerRepresentative,
    a: SymplecticAV,
    basis_change: RatMatrix,
    pi: SymplecticMorphism,
}

impl TwistedSymplecticModel {
    pub fn brauer(&self) -> &BrauerRepresentative {
        &self.brauer
    }

    pub fn base(&self) -> &AbelianVarietyModel {
        self.brauer.variety()
    }

    pub fn n(&self) -> &BigInt {
        self.brauer.n()
    }

    pub fn symplectic(&self) -> &SymplecticAV {
        &self.a
    }

    /// Basis of `Λ_A` in the rational coordinates of `Λ_X ⊕ Λ_X^*`.
    pub fn basis_change(&self) -> &RatMatrix {
        &self.basis_change
    }

    /// The quotient map `X × X^ → A`, multiplier `n`.
    pub fn pi(&self) -> &SymplecticMorphism {
        &self.pi
    }
}

/// Generators `(e_i/n, e_α(e_i/n, ·))` of the graph `K_α ⊂ X[n] × X^[n]`.
pub fn build_k_alpha(a: &BrauerRepresentative) -> Vec<TorsionPoint> {
    let x = a.variety();
    let ambient = x.product(&x.dual());
    let n = a.n();
    let r = x.rank();
    (0..r)
        .map(|i| {
            let mut coords = vec![BigRational::zero(); 2 * r];
            coords[i] = BigRational::new(BigInt::one(), n.clone());
            for k in 0..r {
                coords[r + k] = BigRational::new(a.matrix()[(k, i)].mod_floor(n), n.clone());
            }
            // n = 1 gives coordinates equal to 1 in the first slot.
            for c in coords.iter_mut() {
                *c = crate::groups::frac(c);
            }
            TorsionPoint::new(ambient.clone(), coords).expect("coordinates reduced into [0, 1)")
        })
        .collect()
}

/// `(X × X^) / K_α`.
///
/// With `H` the column HNF of `[n·I | (e_i ; E e_i)]`, `Λ_A = H/n`,
/// `Ψ_A = Hᵀ B H / n` and the quotient map is `n H⁻¹`.
pub fn quotient_by_isotropic(
    x: &AbelianVarietyModel,
    a: &BrauerRepresentative,
) -> Result<TwistedSymplecticModel, SymplecticError> {
    if a.variety() != x {
        return Err(AvError::DimensionMismatch.into());
    }
    if !validate_brauer_rep(a) {
        return Err(SymplecticError::NotIsotropic(
            "e_alpha is not alternating mod n".into(),
        ));
    }
    let std = standard_symplectic(x);
    let r = x.rank();
    let n = a.n().clone();
    let mut gens = IntMatrix::scalar(2 * r, 1).scale(&n);
    let graph = IntMatrix::identity(r).vstack(a.matrix())?;
    gens = gens.hstack(&graph)?;
    let h = hnf(&gens);
    let hr = h.to_rat();
    let n_rat = BigRational::from_integer(n.clone());
    let psi_rat = (&(&h.transpose() * &std.psi) * &h)
        .to_rat()
        .scale(&n_rat.recip());
    let psi = psi_rat.to_int().ok_or_else(|| {
        SymplecticError::NotIsotropic("the form does not descend integrally".into())
    })?;
    let h_inv = hr.inverse()?;
    let j = &(&h_inv * &std.j) * &hr;
    let a_sym = SymplecticAV::new(j, psi)?;
    let pi_f = h_inv
        .scale(&n_rat)
        .to_int()
        .ok_or_else(|| SymplecticError::TheoremViolation("Λ is not contained in Λ_A".into()))?;
    let pi = SymplecticMorphism::new(std, a_sym.clone(), pi_f, n.clone())?;
    Ok(TwistedSymplecticModel {
        brauer: a.clone(),
        a: a_sym,
        basis_change: hr.scale(&n_rat.recip()),
        pi,
    })
}

/// The image of `0 × X^` under the quotient map, a Lagrangian of `A`.
pub fn embed_dual_lagrangian(
    m: &TwistedSymplecticModel,
) -> Result<LagrangianSublattice, SymplecticError> {
    let r = m.base().rank();
    let inc = IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r))?;
    let image = m.pi.matrix() * &inc;
    let s = Sublattice::new(&image)?;
    if !s.is_saturated() {
        return Err(SymplecticError::TheoremViolation(
            "0 × X^ meets K_alpha".into(),
        ));
    }
    LagrangianSublattice::new(m.a.clone(), s)
}

/// Basis matrix `[mF ; I]` of the graph of `m·φ` for `φ : X^ → X`.
pub fn graph_basis(phi: &Homomorphism, m: &BigInt) -> IntMatrix {
    let r = phi.matrix().rows();
    phi.matrix()
        .scale(m)
        .vstack(&IntMatrix::identity(r))
        .expect("same column count")
}

/// The graph `{(m φ(ξ), ξ)}` in `X × X^`, for a symmetric `φ : X^ → X`.
pub fn graph_lagrangian(
    phi: &Homomorphism,
    m: &BigInt,
    a: &SymplecticAV,
) -> Result<LagrangianSublattice, SymplecticError> {
    if !phi.is_symmetric() {
        return Err(SymplecticError::NotSymmetric);
    }
    if a != &standard_symplectic(phi.target()) {
        return Err(SymplecticError::AmbientMismatch);
    }
    LagrangianSublattice::new(a.clone(), Sublattice::new(&graph_basis(phi, m))?)
}

/// `f⁻¹(Z)`: the saturation of `F⁻¹(Z_Q) ∩ Λ_source`.
pub fn preimage_lagrangian(
    f: &SymplecticMorphism,
    z: &LagrangianSublattice,
) -> Result<LagrangianSublattice, SymplecticError> {
    if z.ambient != f.target {
        return Err(SymplecticError::AmbientMismatch);
    }
    // Z_Q is cut out by the annihilator of Z.
    let ann = integer_kernel(&z.basis().transpose());
    let cond = &ann.transpose() * &f.f;
    let pre = Sublattice::new(&integer_kernel(&cond))?;
    LagrangianSublattice::new(f.source.clone(), pre).map_err(|e| {
        SymplecticError::TheoremViolation(format!("preimage of a Lagrangian: {e}"))
    })
}

/// `f(Z)`: the saturation of `F(Z)`.
pub fn image_lagrangian(
    f: &SymplecticMorphism,
    z: &LagrangianSublattice,
) -> Result<LagrangianSublattice, SymplecticError> {
    if z.ambient != f.source {
        return Err(SymplecticError::AmbientMismatch);
    }
    let image = crate::lattice::saturate(&Sublattice::span(&(&f.f * z.basis())));
    LagrangianSublattice::new(f.target.clone(), image)
        .map_err(|e| SymplecticError::TheoremViolation(format!("image of a Lagrangian: {e}")))
}

fn same_ambient(z: &LagrangianSublattice, w: &LagrangianSublattice) -> Result<(), SymplecticError> {
    if z.ambient != w.ambient {
        return Err(SymplecticError::AmbientMismatch);
    }
    Ok(())
}

fn check_transverse(z: &LagrangianSublattice, w: &LagrangianSublattice) -> Result<(), SymplecticError> {
    same_ambient(z, w)?;
    let meet = lattice_intersect(&z.lattice, &w.lattice)?;
    if meet.rank() > 0 {
        return Err(SymplecticError::InfiniteIntersection(meet.rank()));
    }
    Ok(())
}

/// The pairing matrix `S_Zᵀ Ψ S_W`, i.e. the lattice map `Λ_W → Λ_Z^*`.
pub fn lagrangian_pairing_matrix(z: &LagrangianSublattice, w: &LagrangianSublattice) -> IntMatrix {
    &(&z.basis().transpose() * &z.ambient.psi) * w.basis()
}

/// `Z ∩ W ≅ Λ / (Λ_Z + Λ_W)`, finite when the Lagrangians are transverse.
pub fn lagrangian_intersection(
    z: &LagrangianSublattice,
    w: &LagrangianSublattice,
) -> Result<FiniteAbelianGroup, SymplecticError> {
    check_transverse(z, w)?;
    Ok(cokernel_group(&lagrangian_pairing_matrix(z, w))?)
}

/// The isogeny `W → Z^` induced by `ψ` and its kernel `Z ∩ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianIsogeny {
    pub homomorphism: Homomorphism,
    pub kernel: FiniteAbelianGroup,
    pub decomposition: SquareDecomposition,
}

/// Builds `W → Z^` for transverse `J`-stable Lagrangians and checks that its
/// kernel has the form `⊕ (Z/m_i)^2`.
pub fn lagrangian_isogeny(
    z: &LagrangianSublattice,
    w: &LagrangianSublattice,
) -> Result<LagrangianIsogeny, SymplecticError> {
    check_transverse(z, w)?;
    let zv = z.variety()?;
    let wv = w.variety()?;
    let homomorphism = Homomorphism::new(wv, zv.dual(), lagrangian_pairing_matrix(z, w))?;
    let kernel = cokernel_group(homomorphism.matrix())?;
    let decomposition = square_type_test(&kernel);
    if !decomposition.is_square_type {
        return Err(SymplecticError::TheoremViolation(format!(
            "kernel {:?} of a Lagrangian isogeny is not of square type",
            kernel.factors_u64()
        )));
    }
    Ok(LagrangianIsogeny {
        homomorphism,
        kernel,
        decomposition,
    })
}

/// The pairing on `Z ∩ W`, with explicit points generating the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPairing {
    pub pairing: AlternatingPairing,
    /// Lattice vectors `δ_i`; generator `i` is the point of `Z ∩ W` cut out
    /// by the decomposition `δ_i = z̃ - w̃` with `z̃ ∈ Z_Q`, `w̃ ∈ W_Q`.
    pub generators: Vec<Vec<BigInt>>,
}

/// Splits `δ ∈ Λ` as `z̃ - w̃` with `z̃ ∈ Z_Q`, `w̃ ∈ W_Q`.
pub fn split_lift(
    z: &LagrangianSublattice,
    w: &LagrangianSublattice,
    delta: &[BigInt],
) -> Result<(Vec<BigRational>, Vec<BigRational>), SymplecticError> {
    let q = z.basis().hstack(&w.basis().neg())?.to_rat();
    let d: Vec<BigRational> = delta.iter().cloned().map(BigRational::from_integer).collect();
    let coeffs = q.inverse()?.mul_vec(&d);
    let n = z.basis().cols();
    let zt = z.basis().to_rat().mul_vec(&coeffs[..n]);
    let wt = w.basis().to_rat().mul_vec(&coeffs[n..]);
    Ok((zt, wt))
}

/// `e(x, y) = ψ(x̃_Z, ỹ_W) mod 1`.
pub fn pair_lifts(psi: &IntMatrix, xz: &[BigRational], yw: &[BigRational]) -> BigRational {
    let p = psi.to_rat().mul_vec(yw);
    let v: BigRational = xz.iter().zip(&p).map(|(a, b)| a * b).sum();
    crate::groups::frac(&v)
}

/// The alternating pairing on `Z ∩ W` for transverse Lagrangians.
pub fn intersection_pairing(
    z: &LagrangianSublattice,
    w: &LagrangianSublattice,
) -> Result<IntersectionPairing, SymplecticError> {
    check_transverse(z, w)?;
    let q = z.basis().hstack(w.basis())?;
    let d = snf(&q);
    let u_inv = d
        .u
        .to_rat()
        .inverse()?
        .to_int()
        .expect("unimodular inverse is integral");
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for (i, f) in d.invariant_factors.iter().enumerate() {
        if !f.is_one() {
            factors.push(f.clone());
            generators.push(u_inv.column(i));
        }
    }
    let lifts: Vec<_> = generators
        .iter()
        .map(|g| split_lift(z, w, g))
        .collect::<Result<_, _>>()?;
    let k = generators.len();
    let mut mat = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            mat[(i, j)] = pair_lifts(&z.ambient.psi, &lifts[i].0, &lifts[j].1);
        }
    }
    let group = FiniteAbelianGroup::new(factors)?;
    let pairing = AlternatingPairing::new(group, mat)
        .map_err(|e| SymplecticError::TheoremViolation(format!("intersection pairing: {e}")))?;
    if !crate::groups::pairing_is_nondegenerate(&pairing) {
        return Err(SymplecticError::TheoremViolation(
            "intersection pairing is degenerate".into(),
        ));
    }
    Ok(IntersectionPairing {
        pairing,
        generators,
    })
}

/// Smallest `m ∈ {n, 2n, …} ∩ [1, m_max]` with `Z' ∩ Γ(m φ_L) = 0`, for a
/// polarization `L` on `X^`.
pub fn find_transverse_multiplier(
    zp: &LagrangianSublattice,
    l: &Polarization,
    n: &BigInt,
    m_max: &BigInt,
) -> Result<BigInt, SymplecticError> {
    if !n.is_positive() {
        return Err(SymplecticError::InvalidSymplectic("n must be positive".into()));
    }
    let phi = crate::av::phi_from_polarization(l);
    let std = standard_symplectic(phi.target());
    if zp.ambient != std {
        return Err(SymplecticError::AmbientMismatch);
    }
    let mut m = n.clone();
    while &m <= m_max {
        let gamma = Sublattice::new(&graph_basis(&phi, &m))?;
        if lattice_intersect(&zp.lattice, &gamma)?.rank() == 0 {
            return Ok(m);
        }
        m += n;
    }
    Err(SymplecticError::SearchExhausted(m_max.clone()))
}

/// The map `X^ → A` through the graph of `m φ_L` and its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualEmbedding {
    pub homomorphism: Homomorphism,
    pub image: LagrangianSublattice,
}

/// `ι = π ∘ (mφ_L, id)`. Requires `n | m`; fails if the graph meets `K_α`.
pub fn iota_embedding(
    model: &TwistedSymplecticModel,
    l: &Polarization,
    m: &BigInt,
) -> Result<DualEmbedding, SymplecticError> {
    if !m.is_multiple_of(model.n()) || !m.is_positive() {
        return Err(SymplecticError::NotDivisible {
            n: model.n().clone(),
            m: m.clone(),
        });
    }
    let phi = crate::av::phi_from_polarization(l);
    if phi.target() != model.base() {
        return Err(SymplecticError::AmbientMismatch);
    }
    let iota = model.pi.matrix() * &graph_basis(&phi, m);
    let image = Sublattice::new(&iota)?;
    if !image.is_saturated() {
        return Err(SymplecticError::TheoremViolation(format!(
            "graph of {m}·φ_L meets K_alpha: ι is not injective"
        )));
    }
    let homomorphism = Homomorphism::new(l.variety().clone(), model.a.variety(), iota)?;
    let image = LagrangianSublattice::new(model.a.clone(), image)?;
    Ok(DualEmbedding {
        homomorphism,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::av::{product_elliptic, Polarization};

    fn principal(g: usize) -> Polarization {
        let x = product_elliptic(g);
        let mut e = IntMatrix::zeros(2 * g, 2 * g);
        for b in 0..g {
            e[(2 * b, 2 * b + 1)] = BigInt::from(-1);
            e[(2 * b + 1, 2 * b)] = BigInt::one();
        }
        Polarization::new(x, e).unwrap()
    }

    fn fixture() -> BrauerRepresentative {
        let e = IntMatrix::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        BrauerRepresentative::new(product_elliptic(2), 2.into(), e).unwrap()
    }

    fn axis(a: &SymplecticAV, first: bool) -> LagrangianSublattice {
        let r = a.lagrangian_rank();
        let (top, bottom) = (IntMatrix::identity(r), IntMatrix::zeros(r, r));
        let b = if first { top.vstack(&bottom) } else { bottom.vstack(&top) }.unwrap();
        LagrangianSublattice::new(a.clone(), Sublattice::new(&b).unwrap()).unwrap()
    }

    #[test]
    fn standard_form_is_valid() {
        let a = standard_symplectic(&product_elliptic(2));
        assert_eq!(a.rank(), 8);
        assert!(SymplecticAV::new(a.j().clone(), a.psi().clone()).is_ok());
        let skew = IntMatrix::from_rows(&[[0, 1], [-1, 0]]);
        assert!(SymplecticAV::new(RatMatrix::from_rows(&[[0, -1], [1, 0]]), skew).is_err());
    }

    #[test]
    fn axes_are_lagrangian() {
        let a = standard_symplectic(&product_elliptic(1));
        let x0 = axis(&a, true);
        let x1 = axis(&a, false);
        assert!(x0.variety().is_ok());
        assert!(lagrangian_intersection(&x0, &x1).unwrap().is_trivial());
        assert_eq!(
            lagrangian_intersection(&x0, &x0),
            Err(SymplecticError::InfiniteIntersection(2))
        );
        let not_iso = Sublattice::new(&IntMatrix::from_rows(&[[1, 0], [0, 0], [1, 0], [0, 1]])).unwrap();
        assert!(!is_lagrangian(&not_iso, &a));
        let unsat = Sublattice::new(&IntMatrix::from_rows(&[[2, 0], [0, 2], [0, 0], [0, 0]])).unwrap();
        assert!(!is_lagrangian(&unsat, &a));
    }

    #[test]
    fn graph_of_principal_polarization() {
        let l = principal(1);
        let phi = crate::av::phi_from_polarization(&l.dual_polarization());
        let a = standard_symplectic(&product_elliptic(1));
        let gamma = graph_lagrangian(&phi, &BigInt::one(), &a).unwrap();
        let expected = Sublattice::new(&IntMatrix::from_rows(&[[0, -1], [1, 0], [1, 0], [0, 1]])).unwrap();
        assert_eq!(gamma.lattice(), &expected);
        let x1 = axis(&a, false);
        assert!(lagrangian_intersection(&gamma, &x1).unwrap().is_trivial());
        let g2 = graph_lagrangian(&phi, &BigInt::from(2), &a).unwrap();
        let meet = lagrangian_intersection(&g2, &axis(&a, false)).unwrap();
        assert_eq!(meet.factors_u64(), vec![2, 2]);
    }

    #[test]
    fn swap_is_symplectic() {
        let x = product_elliptic(1);
        let a = standard_symplectic(&x);
        let swap = IntMatrix::from_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        let f = SymplecticMorphism::new(a.clone(), a.clone(), swap, BigInt::one()).unwrap();
        assert!(f.is_isomorphism());
        assert_eq!(f.compose(&f).unwrap().matrix(), &IntMatrix::identity(4));
        assert_eq!(f.inverse().unwrap(), f);
    }

    #[test]
    fn k_alpha_fixture() {
        let alpha = fixture();
        let k = build_k_alpha(&alpha);
        assert_eq!(k.len(), 4);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(k[0].coords()[0], half);
        assert_eq!(k[0].coords()[6], half);
        assert!(k.iter().all(|p| p.order() == BigInt::from(2)));
    }

    #[test]
    fn quotient_fixture() {
        let alpha = fixture();
        let m = quotient_by_isotropic(alpha.variety(), &alpha).unwrap();
        assert_eq!(m.symplectic().psi().det().unwrap().abs(), BigInt::one());
        assert_eq!(m.pi().multiplier(), &BigInt::from(2));
        let f = m.pi().matrix();
        assert_eq!(f.det().unwrap().abs(), BigInt::from(16));
        let kernel = cokernel_group(f).unwrap();
        assert_eq!(kernel.factors_u64(), vec![2, 2, 2, 2]);
        let dual = embed_dual_lagrangian(&m).unwrap();
        assert!(dual.variety().is_ok());
    }

    #[test]
    fn trivial_class_gives_standard_model() {
        let x = product_elliptic(1);
        let m = quotient_by_isotropic(&x, &BrauerRepresentative::trivial(&x)).unwrap();
        assert_eq!(m.symplectic(), &standard_symplectic(&x));
        assert_eq!(m.pi().matrix(), &IntMatrix::identity(4));
    }

    #[test]
    fn non_alternating_class_is_rejected() {
        let x = product_elliptic(1);
        let bad = BrauerRepresentative::new(x.clone(), 3.into(), IntMatrix::from_rows(&[[1, 0], [0, 0]])).unwrap();
        assert!(matches!(
            quotient_by_isotropic(&x, &bad),
            Err(SymplecticError::NotIsotropic(_))
        ));
    }

    #[test]
    fn n3_isotropy() {
        let x = product_elliptic(1);
        let a = BrauerRepresentative::new(x.clone(), 3.into(), IntMatrix::from_rows(&[[0, 1], [-1, 0]])).unwrap();
        let m = quotient_by_isotropic(&x, &a).unwrap();
        assert_eq!(cokernel_group(m.pi().matrix()).unwrap().factors_u64(), vec![3, 3]);
    }

    #[test]
    fn multiplier_search_examples() {
        let l = principal(1).dual_polarization();
        let phi = crate::av::phi_from_polarization(&l);
        let a = standard_symplectic(&product_elliptic(1));
        let one = BigInt::one();
        let cap = BigInt::from(10);
        assert_eq!(find_transverse_multiplier(&axis(&a, true), &l, &one, &cap).unwrap(), one);
        assert_eq!(find_transverse_multiplier(&axis(&a, false), &l, &one, &cap).unwrap(), one);
        let g1 = graph_lagrangian(&phi, &one, &a).unwrap();
        assert_eq!(find_transverse_multiplier(&g1, &l, &one, &cap).unwrap(), BigInt::from(2));
        assert_eq!(
            find_transverse_multiplier(&g1, &l, &one, &one),
            Err(SymplecticError::SearchExhausted(one.clone()))
        );
    }

    #[test]
    fn intersection_pairing_of_shear() {
        let a = standard_symplectic(&product_elliptic(1));
        let l = principal(1).dual_polarization();
        let phi = crate::av::phi_from_polarization(&l);
        let g3 = graph_lagrangian(&phi, &BigInt::from(3), &a).unwrap();
        let x1 = axis(&a, false);
        let p = intersection_pairing(&g3, &x1).unwrap();
        assert_eq!(p.pairing.group().factors_u64(), vec![3, 3]);
        let iso = lagrangian_isogeny(&g3, &x1).unwrap();
        assert_eq!(iso.decomposition.m_list_u64(), vec![3]);
    }

    #[test]
    fn iota_needs_divisibility() {
        let alpha = fixture();
        let m = quotient_by_isotropic(alpha.variety(), &alpha).unwrap();
        let l = {
            let x = product_elliptic(2);
            let mut e = IntMatrix::zeros(4, 4);
            e[(0, 1)] = BigInt::from(-1);
            e[(1, 0)] = BigInt::one();
            e[(2, 3)] = BigInt::from(-1);
            e[(3, 2)] = BigInt::one();
            Polarization::new(x, e).unwrap().dual_polarization()
        };
        assert!(matches!(
            iota_embedding(&m, &l, &BigInt::from(3)),
            Err(SymplecticError::NotDivisible { .. })
        ));
        let emb = iota_embedding(&m, &l, &BigInt::from(2)).unwrap();
        assert_eq!(emb.image.basis().cols(), 4);
    }
}
