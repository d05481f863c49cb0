//! Seeded instance generators. Every generator is a pure function of its
//! [`InstanceSeed`].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::av::{
    neron_severi_basis, product_elliptic, AbelianVarietyModel, BrauerRepresentative, Polarization,
};
use crate::lattice::{IntMatrix, Sublattice};
use crate::symplectic::{
    quotient_by_isotropic, standard_symplectic, LagrangianSublattice, SymplecticAV,
    SymplecticMorphism,
};

/// Seed and size parameters of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InstanceSeed {
    pub seed: u64,
    pub g: usize,
    pub n: u64,
    /// Bound on the coefficients of elementary generators.
    pub bound: i64,
}

impl InstanceSeed {
    pub fn new(seed: u64, g: usize, n: u64) -> Self {
        Self {
            seed,
            g,
            n,
            bound: 2,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Seed of the `g = 2`, `n = 2` fixture used in the documentation.
pub const FIXTURE_SEED: u64 = 20_240_601;

pub fn fixture_seed() -> InstanceSeed {
    InstanceSeed::new(FIXTURE_SEED, 2, 2)
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

/// Product of random elementary row operations, swaps and sign changes.
pub fn random_unimodular(rng: &mut ChaCha8Rng, r: usize, bound: i64) -> IntMatrix {
    let mut u = IntMatrix::identity(r);
    if r < 2 {
        if rng.gen_bool(0.5) {
            u.negate_row(0);
        }
        return u;
    }
    for _ in 0..2 * r {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..6) {
            0 => u.swap_rows(i, j),
            1 => u.negate_row(i),
            _ => u.add_row_multiple(i, j, &BigInt::from(nonzero(rng, bound))),
        }
    }
    u
}

/// Real `2×2` matrix of multiplication by `a + bi`.
fn gaussian_block(a: i64, b: i64) -> [[i64; 2]; 2] {
    [[a, -b], [b, a]]
}

fn set_block(m: &mut IntMatrix, bi: usize, bj: usize, blk: [[i64; 2]; 2]) {
    for r in 0..2 {
        for c in 0..2 {
            m[(2 * bi + r, 2 * bj + c)] = BigInt::from(blk[r][c]);
        }
    }
}

/// A unimodular matrix commuting with the structure of `product_elliptic(g)`,
/// i.e. an element of `GL_g(Z[i])`.
pub fn random_gaussian_unimodular(rng: &mut ChaCha8Rng, g: usize, bound: i64) -> IntMatrix {
    let mut u = IntMatrix::identity(2 * g);
    for _ in 0..2 * g {
        let mut e = IntMatrix::identity(2 * g);
        let i = rng.gen_range(0..g);
        if g > 1 && rng.gen_bool(0.7) {
            let mut j = rng.gen_range(0..g - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            set_block(&mut e, i, j, gaussian_block(a, b));
        } else {
            // Multiply one coordinate by a unit of Z[i].
            let units = [(1, 0), (0, 1), (-1, 0), (0, -1)];
            let (a, b) = units[rng.gen_range(0..4)];
            set_block(&mut e, i, i, gaussian_block(a, b));
        }
        u = &e * &u;
    }
    u
}

/// An alternating matrix commuting with the structure of
/// `product_elliptic(g)`: the real form of an anti-Hermitian `g×g` matrix
/// over `Z[i]`.
pub fn random_anti_hermitian(rng: &mut ChaCha8Rng, g: usize, bound: i64) -> IntMatrix {
    let mut s = IntMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        let b = rng.gen_range(-bound..=bound);
        set_block(&mut s, i, i, gaussian_block(0, b));
        for j in i + 1..g {
            let (a, b) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            set_block(&mut s, i, j, gaussian_block(a, b));
            set_block(&mut s, j, i, gaussian_block(-a, b));
        }
    }
    s
}

/// A random integral alternating matrix.
pub fn random_skew(rng: &mut ChaCha8Rng, r: usize, bound: i64) -> IntMatrix {
    let mut s = IntMatrix::zeros(r, r);
    for i in 0..r {
        for j in i + 1..r {
            let v = BigInt::from(rng.gen_range(-bound..=bound));
            s[(j, i)] = -&v;
            s[(i, j)] = v;
        }
    }
    s
}

fn upper_shear(s: &IntMatrix) -> IntMatrix {
    let r = s.rows();
    IntMatrix::identity(r)
        .hstack(s)
        .unwrap()
        .vstack(&IntMatrix::zeros(r, r).hstack(&IntMatrix::identity(r)).unwrap())
        .unwrap()
}

fn lower_shear(s: &IntMatrix) -> IntMatrix {
    upper_shear(&s.transpose()).transpose()
}

fn inverse_transpose(u: &IntMatrix) -> IntMatrix {
    u.to_rat()
        .inverse()
        .expect("unimodular")
        .to_int()
        .expect("unimodular inverse is integral")
        .transpose()
}

/// An element of `O(B)(Z)` for the standard form on `Z^r ⊕ Z^r`, built
/// from `diag(U, U^{-T})` and shears by alternating matrices. With
/// `compatible_with = Some(g)` every generator also commutes with the
/// structure of `X × X^` for `X = product_elliptic(g)`.
pub fn random_orthogonal(
    rng: &mut ChaCha8Rng,
    r: usize,
    bound: i64,
    compatible_with: Option<usize>,
) -> IntMatrix {
    let mut t = IntMatrix::identity(2 * r);
    for _ in 0..3 {
        let step = match rng.gen_range(0..3) {
            0 => {
                let u = match compatible_with {
                    Some(g) => random_gaussian_unimodular(rng, g, bound),
                    None => random_unimodular(rng, r, bound),
                };
                u.block_diag(&inverse_transpose(&u))
            }
            k => {
                let s = match compatible_with {
                    Some(g) => random_anti_hermitian(rng, g, 1),
                    None => random_skew(rng, r, 1),
                };
                if k == 1 {
                    upper_shear(&s)
                } else {
                    lower_shear(&s)
                }
            }
        };
        t = &step * &t;
    }
    t
}

/// How the second Lagrangian of a random instance is sheared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shear {
    /// Coordinate Lagrangians, trivial intersection.
    None,
    /// Graph of `k` times the principal form, intersection `(Z/k)^N`.
    Scalar(i64),
    /// Graph of `k` times a random nonsingular anti-Hermitian matrix.
    Random { k: i64, matrix: IntMatrix },
}

/// A symplectic lattice with two transverse Lagrangians.
#[derive(Clone, Debug)]
pub struct SymplecticInstance {
    pub ambient: SymplecticAV,
    pub z: LagrangianSublattice,
    pub w: LagrangianSublattice,
    pub shear: Shear,
}

pub(crate) fn principal_blocks(g: usize) -> IntMatrix {
    let mut e = IntMatrix::zeros(2 * g, 2 * g);
    for b in 0..g {
        set_block(&mut e, b, b, gaussian_block(0, 1));
    }
    e
}

/// Two transverse `J`-stable Lagrangians in a symplectic lattice of rank
/// `4g`. Starts from `0 × X^` and the graph of a shear over `X^`, moves
/// both by a structure-preserving automorphism, then changes the lattice
/// basis by a random element of `O(B)(Z)`.
pub fn random_symplectic_instance(s: &InstanceSeed) -> SymplecticInstance {
    let mut rng = s.rng();
    let g = s.g;
    let r = 2 * g;
    let x = product_elliptic(g);
    let std = standard_symplectic(&x);
    let shear = match rng.gen_range(0..4) {
        0 => Shear::None,
        1 => Shear::Scalar(rng.gen_range(1..=4)),
        _ => loop {
            let m = random_anti_hermitian(&mut rng, g, s.bound);
            if !m.det().unwrap().is_zero() {
                break Shear::Random {
                    k: rng.gen_range(1..=3),
                    matrix: m,
                };
            }
        },
    };
    let (z0, w0) = match &shear {
        Shear::None => (
            IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r)).unwrap(),
            IntMatrix::identity(r).vstack(&IntMatrix::zeros(r, r)).unwrap(),
        ),
        Shear::Scalar(k) => (
            IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r)).unwrap(),
            principal_blocks(g)
                .scale(&BigInt::from(*k))
                .vstack(&IntMatrix::identity(r))
                .unwrap(),
        ),
        Shear::Random { k, matrix } => (
            IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r)).unwrap(),
            matrix
                .scale(&BigInt::from(*k))
                .vstack(&IntMatrix::identity(r))
                .unwrap(),
        ),
    };
    let g1 = random_orthogonal(&mut rng, r, s.bound, Some(g));
    let t = random_orthogonal(&mut rng, r, s.bound, None);
    let ambient = std.transport(&t).expect("O(B) element");
    let moved = |b: &IntMatrix| {
        let lat = Sublattice::new(&(&t * &(&g1 * b))).expect("injective");
        LagrangianSublattice::new(ambient.clone(), lat).expect("automorphisms preserve Lagrangians")
    };
    SymplecticInstance {
        z: moved(&z0),
        w: moved(&w0),
        ambient: ambient.clone(),
        shear,
    }
}

/// A variety with a Brauer representative and a polarization.
///
/// The variety is `product_elliptic(g)` in a random lattice basis `P`; the
/// polarization is a positive combination of the principal ones, moved to
/// the new basis.
pub fn random_av_with_brauer(
    s: &InstanceSeed,
) -> (AbelianVarietyModel, BrauerRepresentative, Polarization) {
    let mut rng = s.rng();
    let g = s.g;
    let r = 2 * g;
    let p = random_unimodular(&mut rng, r, s.bound);
    let x = product_elliptic(g).rebase(&p).expect("unimodular");
    let mut e0 = IntMatrix::zeros(r, r);
    for b in 0..g {
        let c = rng.gen_range(1..=3);
        set_block(&mut e0, b, b, gaussian_block(0, c));
    }
    let e = &(&p.transpose() * &e0) * &p;
    let l = Polarization::new(x.clone(), e).expect("congruent to a polarization");
    let n = BigInt::from(s.n);
    let mut u = IntMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            u[(i, j)] = BigInt::from(rng.gen_range(0..s.n.max(1)));
        }
    }
    let alpha = if s.n == 1 {
        BrauerRepresentative::trivial(&x)
    } else {
        BrauerRepresentative::new(x.clone(), n, u.sub(&u.transpose()).unwrap()).unwrap()
    };
    (x, alpha, l)
}

/// Input to the equivalence pipeline: two twisted varieties, a symplectic
/// isomorphism between their models and a polarization on `Y^`.
#[derive(Clone, Debug)]
pub struct PipelineInstance {
    pub x: AbelianVarietyModel,
    pub alpha: BrauerRepresentative,
    pub y: AbelianVarietyModel,
    pub beta: BrauerRepresentative,
    pub g_iso: SymplecticMorphism,
    pub l_hat: Polarization,
}

/// Builds `(Y, β)` from `(X, α)` by a basis change `P` and a Néron–Severi
/// shift `S`, together with the induced isomorphism of symplectic models.
pub fn random_pipeline_instance(s: &InstanceSeed) -> PipelineInstance {
    let (x, alpha, l) = random_av_with_brauer(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x005e_ed0f_7a11);
    let r = x.rank();
    let p = random_unimodular(&mut rng, r, s.bound);
    let y = x.rebase(&p).expect("unimodular");
    let mut ns = IntMatrix::zeros(r, r);
    for b in neron_severi_basis(&x) {
        let c = BigInt::from(rng.gen_range(-1..=1));
        ns = ns.add(&b.scale(&c)).unwrap();
    }
    let beta = BrauerRepresentative::new(
        y.clone(),
        alpha.n().clone(),
        &(&p.transpose() * &alpha.matrix().add(&ns).unwrap()) * &p,
    )
    .unwrap();
    let l_y = Polarization::new(y.clone(), &(&p.transpose() * l.matrix()) * &p)
        .expect("transported polarization");
    // Shears congruent to the identity mod n fix K_α pointwise.
    let n = alpha.n().clone();
    let mut combo = |basis: Vec<IntMatrix>| {
        basis.iter().fold(IntMatrix::zeros(r, r), |acc, b| {
            acc.add(&b.scale(&BigInt::from(rng.gen_range(-1..=1)))).unwrap()
        })
    };
    let up = combo(neron_severi_basis(&x.dual())).scale(&n);
    let low = combo(neron_severi_basis(&x)).scale(&n);
    let t = &upper_shear(&up) * &lower_shear(&low);
    let g_iso = induced_isomorphism(&x, &alpha, &y, &beta, &p, &ns, &t);
    PipelineInstance {
        x,
        alpha,
        y,
        beta,
        g_iso,
        l_hat: l_y.dual_polarization(),
    }
}

/// The isomorphism `A_(X,α) → A_(Y,β)` descending from `Φ ∘ T`, where
/// `Φ(x, ξ) = (P⁻¹x, Pᵀ(ξ + S x))` and `T` is an automorphism of `X × X^`
/// preserving `K_α`.
pub fn induced_isomorphism(
    x: &AbelianVarietyModel,
    alpha: &BrauerRepresentative,
    y: &AbelianVarietyModel,
    beta: &BrauerRepresentative,
    p: &IntMatrix,
    ns: &IntMatrix,
    t: &IntMatrix,
) -> SymplecticMorphism {
    let mx = quotient_by_isotropic(x, alpha).expect("valid class");
    let my = quotient_by_isotropic(y, beta).expect("valid class");
    let p_inv = p.to_rat().inverse().unwrap().to_int().unwrap();
    let phi = &(&p_inv.block_diag(&p.transpose()) * &lower_shear(ns)) * t;
    let fx_inv = mx.pi().matrix().to_rat().inverse().unwrap();
    let g = (&(&my.pi().matrix().to_rat() * &phi.to_rat()) * &fx_inv)
        .to_int()
        .expect("Φ maps Λ_A(X) onto Λ_A(Y)");
    SymplecticMorphism::new(
        mx.symplectic().clone(),
        my.symplectic().clone(),
        g,
        BigInt::one(),
    )
    .expect("Φ is in O(B), complex-linear and carries K_α to K_β")
}

/// The swap `(x, ξ) ↦ (ξ, x)` from `X × X^` to `X^ × X`, trivial classes.
pub fn swap_instance(x: &AbelianVarietyModel, l_hat: Polarization) -> PipelineInstance {
    let r = x.rank();
    let y = x.dual();
    let swap = IntMatrix::zeros(r, r)
        .hstack(&IntMatrix::identity(r))
        .unwrap()
        .vstack(&IntMatrix::identity(r).hstack(&IntMatrix::zeros(r, r)).unwrap())
        .unwrap();
    let g_iso = SymplecticMorphism::new(
        standard_symplectic(x),
        standard_symplectic(&y),
        swap,
        BigInt::one(),
    )
    .expect("swap preserves the standard form");
    PipelineInstance {
        alpha: BrauerRepresentative::trivial(x),
        beta: BrauerRepresentative::trivial(&y),
        x: x.clone(),
        y,
        g_iso,
        l_hat,
    }
}
