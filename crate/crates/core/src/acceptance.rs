//! Library-level acceptance checks with independent oracles.
//!
//! Each check returns a [`CriterionResult`]. All comparisons are exact;
//! the only tolerance is the wall-clock budget.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::av::{product_elliptic, BrauerRepresentative, Homomorphism, AbelianVarietyModel};
use crate::engine::{
    kernel_square_test, random_orthogonal, random_pipeline_instance, random_symplectic_instance,
    run_pipeline, swap_instance, transported_dual_lagrangian, InstanceSeed, Shear,
};
use crate::groups::{
    heisenberg_pairing, pairing_is_nondegenerate, square_type_test, symplectic_basis,
    AlternatingPairing, FiniteAbelianGroup,
};
use crate::lattice::{snf, IntMatrix, RatMatrix, Sublattice};
use crate::symplectic::{
    build_k_alpha, find_transverse_multiplier, graph_lagrangian, image_lagrangian, intersection_pairing,
    iota_embedding, is_lagrangian, lagrangian_intersection, lagrangian_isogeny,
    preimage_lagrangian, quotient_by_isotropic, standard_symplectic, LagrangianSublattice,
    SymplecticError, SymplecticMorphism,
};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    /// One summary line, `PASS`/`FAIL` first.
    pub fn line(&self) -> String {
        format!(
            "{} {:<28} {} [{:.2}s / {}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed(
    id: &'static str,
    budget_secs: u64,
    body: impl FnOnce() -> Result<String, String>,
) -> CriterionResult {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > budget {
        passed = false;
        detail = format!("{detail}; over time budget");
    }
    CriterionResult {
        id,
        passed,
        detail,
        elapsed,
        budget,
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

/// Runs every library-level criterion.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        normal_forms(),
        pairing_roundtrip(),
        lagrangian_isogenies(),
        twisted_models(),
        preimages_and_intersections(),
        multiplier_search(),
        witness_pipeline(),
        square_type_decisions(),
    ]
}

// ---------------------------------------------------------------------------
// Smith normal form against determinantal divisors.

/// Determinant by cofactor expansion, independent of the library's
/// elimination code.
fn laplace_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            sign * m[0][c] * laplace_det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors `D_k / D_{k-1}`, `D_k` the gcd of the `k×k` minors.
pub fn determinantal_invariant_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut d: i128 = 0;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                    .collect();
                d = d.gcd(&laplace_det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

pub fn normal_forms() -> CriterionResult {
    timed("normal-forms", 5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut oracle_checked = 0;
        for t in 0..1000 {
            let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-20..=20)).collect())
                .collect();
            let m = IntMatrix::from_rows(&rows);
            let d = snf(&m);
            ensure!(&(&d.u * &m) * &d.v == d.s, "matrix {t}: U M V != S");
            ensure!(d.u.det().unwrap().abs().is_one(), "matrix {t}: U not unimodular");
            ensure!(d.v.det().unwrap().abs().is_one(), "matrix {t}: V not unimodular");
            for i in 0..r {
                for j in 0..c {
                    let expected = if i == j && i < d.invariant_factors.len() {
                        d.invariant_factors[i].clone()
                    } else {
                        BigInt::zero()
                    };
                    ensure!(d.s[(i, j)] == expected, "matrix {t}: S is not diagonal in invariant factors");
                }
            }
            ensure!(
                d.invariant_factors.iter().all(|f| f.is_positive())
                    && d.invariant_factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])),
                "matrix {t}: divisibility chain broken"
            );
            if r <= 4 && c <= 4 {
                let oracle = determinantal_invariant_factors(&rows);
                let got: Vec<i128> = d.invariant_factors.iter().map(|f| f.to_i128().unwrap()).collect();
                ensure!(oracle == got, "matrix {t}: {got:?} vs minors oracle {oracle:?}");
                oracle_checked += 1;
            }
        }
        Ok(format!("1000 matrices, {oracle_checked} against the minors oracle"))
    })
}

// ---------------------------------------------------------------------------
// Heisenberg pairings and symplectic bases.

/// All invariant-factor chains with product at most `bound`.
pub fn groups_up_to(bound: u64) -> Vec<Vec<u64>> {
    fn extend(chain: &mut Vec<u64>, product: u64, bound: u64, out: &mut Vec<Vec<u64>>) {
        out.push(chain.clone());
        let start = chain.last().copied().unwrap_or(2);
        let mut f = start;
        while product * f <= bound {
            if chain.last().is_none_or(|l| f % l == 0) {
                chain.push(f);
                extend(chain, product * f, bound, out);
                chain.pop();
            }
            f += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut vec![], 1, bound, &mut out);
    out
}

/// Nondegeneracy by enumeration: no nonzero element pairs trivially with
/// every generator.
pub fn brute_force_nondegenerate(e: &AlternatingPairing) -> bool {
    let g = e.group();
    let gens: Vec<Vec<BigInt>> = (0..g.rank()).map(|i| g.generator(i)).collect();
    g.elements()
        .iter()
        .filter(|x| x.iter().any(|c| !c.is_zero()))
        .all(|x| gens.iter().any(|y| !e.eval(x, y).is_zero()))
}

fn random_alternating(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> AlternatingPairing {
    let k = g.rank();
    let mut m = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let mi = g.factors()[i].to_i64().unwrap();
            let a = rng.gen_range(0..mi);
            let v = BigRational::new(a.into(), mi.into());
            m[(j, i)] = -v.clone();
            m[(i, j)] = v;
        }
    }
    AlternatingPairing::new(g.clone(), m).expect("valid by construction")
}

pub fn pairing_roundtrip() -> CriterionResult {
    timed("pairing-roundtrip", 10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let len = rng.gen_range(1..=3);
            let mut chain: Vec<u64> = Vec::new();
            for _ in 0..len {
                let base = chain.last().copied().unwrap_or(1);
                let options: Vec<u64> = (2..=12).filter(|f| f % base == 0).collect();
                if options.is_empty() {
                    break;
                }
                chain.push(options[rng.gen_range(0..options.len())]);
            }
            let k = FiniteAbelianGroup::from_u64(&chain).unwrap();
            let e = heisenberg_pairing(&k);
            ensure!(pairing_is_nondegenerate(&e), "K = {chain:?}: Heisenberg pairing degenerate");
            let h = e.group();
            for i in 0..h.rank() {
                ensure!(e.eval(&h.generator(i), &h.generator(i)).is_zero(), "K = {chain:?}: not alternating");
            }
            let b = symplectic_basis(&e).map_err(|err| format!("K = {chain:?}: {err}"))?;
            ensure!(
                b.decomposition.m_list_u64() == chain,
                "K = {chain:?}: recovered {:?}",
                b.decomposition.m_list_u64()
            );
        }
        let groups = groups_up_to(256);
        let mut nondeg = 0;
        for (t, f) in groups.iter().enumerate() {
            let g = FiniteAbelianGroup::from_u64(f).unwrap();
            let mut candidates = vec![AlternatingPairing::zero(g.clone())];
            for _ in 0..3 {
                candidates.push(random_alternating(&mut rng, &g));
            }
            let sq = square_type_test(&g);
            if sq.is_square_type && !g.is_trivial() {
                let half = FiniteAbelianGroup::new(sq.m_list.clone()).unwrap();
                let heis = heisenberg_pairing(&half);
                if heis.group() == &g {
                    candidates.push(heis);
                }
            }
            for e in candidates {
                let lib = pairing_is_nondegenerate(&e);
                let brute = brute_force_nondegenerate(&e);
                ensure!(lib == brute, "group #{t} {f:?}: library {lib}, enumeration {brute}");
                if lib {
                    nondeg += 1;
                    let b = symplectic_basis(&e).map_err(|err| format!("{f:?}: {err}"))?;
                    let mut doubled: Vec<BigInt> = b
                        .decomposition
                        .m_list
                        .iter()
                        .flat_map(|m| [m.clone(), m.clone()])
                        .collect();
                    doubled.sort();
                    ensure!(
                        FiniteAbelianGroup::from_cyclic_orders(&doubled) == g,
                        "{f:?}: symplectic basis type disagrees with the group"
                    );
                }
            }
        }
        Ok(format!(
            "200 Heisenberg roundtrips; {} groups of order <= 256 ({nondeg} nondegenerate pairings)",
            groups.len()
        ))
    })
}

// ---------------------------------------------------------------------------
// Lagrangian pairs.

/// Lifts through the adjugate of `[S_Z | -S_W]`: for `δ ∈ Λ`, `D·z̃` and
/// `D·w̃` are integral with `D = det`, so pairing values are integers
/// modulo `D²`.
struct LiftOracle {
    adj: IntMatrix,
    det: BigInt,
    sz: IntMatrix,
    sw: IntMatrix,
    psi: IntMatrix,
    n: usize,
}

impl LiftOracle {
    fn new(z: &LagrangianSublattice, w: &LagrangianSublattice) -> Self {
        let q = z.basis().hstack(&w.basis().neg()).unwrap();
        let det = q.det().unwrap();
        let adj = q
            .to_rat()
            .inverse()
            .unwrap()
            .scale(&BigRational::from_integer(det.clone()))
            .to_int()
            .unwrap();
        Self {
            adj,
            det,
            sz: z.basis().clone(),
            sw: w.basis().clone(),
            psi: z.ambient().psi().clone(),
            n: z.basis().cols(),
        }
    }

    /// `(D·z̃, D·w̃)`.
    fn lifts(&self, delta: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        let c = self.adj.mul_vec(delta);
        (self.sz.mul_vec(&c[..self.n]), self.sw.mul_vec(&c[self.n..]))
    }

    /// `ψ(z̃_x, w̃_y)` as an integer modulo `D²`.
    fn pair_scaled(&self, xz: &[BigInt], yw: &[BigInt]) -> BigInt {
        let p = self.psi.mul_vec(yw);
        let v: BigInt = xz.iter().zip(&p).map(|(a, b)| a * b).sum();
        v.mod_floor(&(&self.det * &self.det))
    }

    fn to_q_mod_1(&self, v: &BigInt) -> BigRational {
        BigRational::new(v.clone(), &self.det * &self.det)
    }
}

pub fn lagrangian_isogenies() -> CriterionResult {
    timed("lagrangian-isogeny", 30, || {
        let mut exhaustive = 0;
        let mut sheared = 0;
        for seed in 0..300u64 {
            let g = 1 + (seed % 2) as usize;
            let inst = random_symplectic_instance(&InstanceSeed::new(seed, g, 1));
            let iso = match lagrangian_isogeny(&inst.z, &inst.w) {
                Ok(i) => i,
                Err(e) => return Err(format!("seed {seed}: {e}")),
            };
            let f = iso.kernel.factors();
            ensure!(
                f.len() % 2 == 0 && f.chunks(2).all(|c| c[0] == c[1]),
                "seed {seed}: kernel {f:?} does not pair up"
            );
            let meet = lagrangian_intersection(&inst.z, &inst.w).map_err(|e| e.to_string())?;
            let det = iso.homomorphism.matrix().det().unwrap().abs();
            ensure!(
                iso.kernel.order() == meet.order() && det == meet.order(),
                "seed {seed}: |ker| = {}, |Z ∩ W| = {}, |det| = {det}",
                iso.kernel.order(),
                meet.order()
            );
            if let Shear::Scalar(k) = inst.shear {
                let expected = if k == 1 { vec![] } else { vec![k as u64; 2 * g] };
                ensure!(meet.factors_u64() == expected, "seed {seed}: shear {k} gave {:?}", meet.factors_u64());
            }
            if !meet.is_trivial() {
                sheared += 1;
            }
            let ip = intersection_pairing(&inst.z, &inst.w).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure!(ip.pairing.group() == &meet, "seed {seed}: pairing group differs");
            let basis = symplectic_basis(&ip.pairing).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure!(
                basis.decomposition.m_list == iso.decomposition.m_list,
                "seed {seed}: symplectic basis m_list differs"
            );
            if meet.order() <= BigInt::from(10_000) && !meet.is_trivial() {
                exhaustive_intersection_check(&inst.z, &inst.w, &ip.generators, &ip.pairing)
                    .map_err(|e| format!("seed {seed}: {e}"))?;
                exhaustive += 1;
            }
        }
        Ok(format!(
            "300 pairs, {sheared} with nontrivial intersection, {exhaustive} verified exhaustively"
        ))
    })
}

/// Checks the pairing on `Z ∩ W` against independently computed lifts.
///
/// Generator values come from the adjugate lifts and must match the
/// library's matrix; shifting a lift by basis vectors of `Λ_Z` or `Λ_W`
/// must not change them. Then every element is enumerated: `e(x, x) = 0`
/// and no nonzero `x` pairs trivially with all generators. For groups of
/// order at most 256 antisymmetry is checked on all pairs.
fn exhaustive_intersection_check(
    z: &LagrangianSublattice,
    w: &LagrangianSublattice,
    gens: &[Vec<BigInt>],
    e: &AlternatingPairing,
) -> Result<(), String> {
    let oracle = LiftOracle::new(z, w);
    let g = e.group();
    let k = g.rank();
    let d = oracle.det.clone();
    let lifts: Vec<_> = gens.iter().map(|v| oracle.lifts(v)).collect();
    let exp = g.exponent();
    let mut table = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..k {
            let v = oracle.pair_scaled(&lifts[i].0, &lifts[j].1);
            let q = oracle.to_q_mod_1(&v);
            if q != e.matrix()[(i, j)] {
                return Err(format!("e(g{i}, g{j}) = {q} by lifts, {} in the matrix", e.matrix()[(i, j)]));
            }
            for c in 0..z.basis().cols() {
                let lz: Vec<BigInt> = lifts[i].0.iter().zip(z.basis().column(c)).map(|(a, b)| a + &d * b).collect();
                let lw: Vec<BigInt> = lifts[j].1.iter().zip(w.basis().column(c)).map(|(a, b)| a + &d * b).collect();
                if oracle.pair_scaled(&lz, &lw) != v {
                    return Err("pairing depends on the lift".into());
                }
            }
            let scaled = &q * BigRational::from_integer(exp.clone());
            if !scaled.is_integer() {
                return Err(format!("e(g{i}, g{j}) is not killed by the exponent"));
            }
            table[i][j] = scaled.to_integer().to_u64().unwrap();
        }
    }
    let exp = exp.to_u64().unwrap() as u128;
    let elements = g.elements();
    let small = elements.len() <= 256;
    let mut rows = Vec::with_capacity(if small { elements.len() } else { 0 });
    for x in &elements {
        let xs: Vec<u128> = x.iter().map(|c| c.to_u64().unwrap() as u128).collect();
        let row: Vec<u128> = (0..k)
            .map(|j| (0..k).map(|i| xs[i] * table[i][j] as u128).sum::<u128>() % exp)
            .collect();
        let self_pair = xs.iter().zip(&row).map(|(a, b)| a * b).sum::<u128>() % exp;
        if self_pair != 0 {
            return Err(format!("e(x, x) != 0 for x = {x:?}"));
        }
        if xs.iter().any(|c| *c != 0) && row.iter().all(|v| *v == 0) {
            return Err(format!("x = {x:?} is in the radical"));
        }
        if small {
            rows.push((xs, row));
        }
    }
    for (x, rx) in &rows {
        for (y, ry) in &rows {
            let xy = y.iter().zip(rx).map(|(a, b)| a * b).sum::<u128>() % exp;
            let yx = x.iter().zip(ry).map(|(a, b)| a * b).sum::<u128>() % exp;
            if !(xy + yx).is_multiple_of(exp) {
                return Err("pairing is not antisymmetric".into());
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Twisted models.

fn random_brauer(rng: &mut ChaCha8Rng, x: &AbelianVarietyModel, n: u64) -> BrauerRepresentative {
    let r = x.rank();
    let mut u = IntMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            u[(i, j)] = BigInt::from(rng.gen_range(0..n));
        }
    }
    BrauerRepresentative::new(x.clone(), n.into(), u.sub(&u.transpose()).unwrap()).unwrap()
}

pub fn twisted_models() -> CriterionResult {
    timed("twisted-model", 10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in 0..100u64 {
            let g = 1 + (t % 3) as usize;
            let n = 1 + (t / 3) % 4;
            let x = product_elliptic(g).rebase(&crate::engine::random_unimodular(&mut rng, 2 * g, 2)).unwrap();
            let alpha = random_brauer(&mut rng, &x, n);
            let m = quotient_by_isotropic(&x, &alpha).map_err(|e| format!("instance {t}: {e}"))?;
            let psi = m.symplectic().psi();
            let j = m.symplectic().j();
            ensure!(psi.det().unwrap().abs().is_one(), "instance {t}: form not unimodular");
            ensure!(psi.is_symmetric(), "instance {t}: form not symmetric");
            ensure!(
                &(&j.transpose() * &psi.to_rat()) * j == psi.to_rat(),
                "instance {t}: form not J-invariant"
            );
            let f = m.pi().matrix();
            let std = standard_symplectic(&x);
            ensure!(
                &(&f.transpose() * psi) * f == std.psi().scale(&BigInt::from(n)),
                "instance {t}: pullback is not n times the standard form"
            );
            // The kernel of π is K_α ≅ X[n].
            let expected = if n == 1 { vec![] } else { vec![n; x.rank()] };
            let kernel = crate::lattice::cokernel_group(f).unwrap();
            ensure!(
                kernel.factors_u64() == expected,
                "instance {t}: ker π = {:?}, expected {expected:?}",
                kernel.factors_u64()
            );
            // Independent isotropy check on the K_α generators.
            let k = build_k_alpha(&alpha);
            let b = std.psi().to_rat();
            for p in &k {
                for q in &k {
                    let v: BigRational = p
                        .coords()
                        .iter()
                        .zip(b.mul_vec(q.coords()))
                        .map(|(a, c)| a * c)
                        .sum();
                    let nv = v * BigRational::from_integer(n.into());
                    ensure!(nv.is_integer(), "instance {t}: K_alpha is not isotropic");
                }
            }
            let trivial = quotient_by_isotropic(&x, &BrauerRepresentative::trivial(&x)).unwrap();
            ensure!(
                trivial.symplectic() == &std && trivial.pi().matrix() == &IntMatrix::identity(2 * x.rank()),
                "instance {t}: trivial class does not give X × X^"
            );
        }
        Ok("100 instances, g <= 3, n <= 4".into())
    })
}

// ---------------------------------------------------------------------------
// Preimages, images and finiteness through isogenies.

pub fn preimages_and_intersections() -> CriterionResult {
    timed("preimage-and-intersection", 20, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..200u64 {
            let g = 1 + (t % 2) as usize;
            let n = 1 + (t / 2) % 4;
            let x = product_elliptic(g);
            let alpha = random_brauer(&mut rng, &x, n);
            let model = quotient_by_isotropic(&x, &alpha).map_err(|e| e.to_string())?;
            let std = standard_symplectic(&x);
            let r = 2 * g;
            let aut = random_orthogonal(&mut rng, r, 2, Some(g));
            let aut = SymplecticMorphism::new(std.clone(), std.clone(), aut, BigInt::one())
                .map_err(|e| format!("instance {t}: {e}"))?;
            let k = rng.gen_range(1..=2i64);
            let scale = SymplecticMorphism::new(
                std.clone(),
                std.clone(),
                IntMatrix::scalar(2 * r, k),
                BigInt::from(k * k),
            )
            .unwrap();
            let f = model
                .pi()
                .compose(&aut)
                .and_then(|h| h.compose(&scale))
                .map_err(|e| format!("instance {t}: {e}"))?;

            // Two transverse Lagrangians of the source.
            let shear = crate::engine::random_anti_hermitian(&mut rng, g, 2);
            let moved = random_orthogonal(&mut rng, r, 2, Some(g));
            let lag = |b: IntMatrix| {
                LagrangianSublattice::new(std.clone(), Sublattice::new(&(&moved * &b)).unwrap())
                    .expect("moved graph")
            };
            let zs = lag(IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r)).unwrap());
            let ws = lag(shear.vstack(&IntMatrix::identity(r)).unwrap());

            // Source to target and back.
            for src in [&zs, &ws] {
                let img = image_lagrangian(&f, src).map_err(|e| format!("instance {t}: {e}"))?;
                ensure!(is_lagrangian(img.lattice(), f.target()), "instance {t}: image not Lagrangian");
                let back = preimage_lagrangian(&f, &img).map_err(|e| format!("instance {t}: {e}"))?;
                ensure!(back.lattice() == src.lattice(), "instance {t}: preimage of image differs");
                let again = image_lagrangian(&f, &back).map_err(|e| e.to_string())?;
                ensure!(again == img, "instance {t}: image of preimage differs");
            }

            // Finiteness is preserved.
            let meet_src = crate::lattice::lattice_intersect(zs.lattice(), ws.lattice()).unwrap();
            let zi = image_lagrangian(&f, &zs).unwrap();
            let wi = image_lagrangian(&f, &ws).unwrap();
            let finite = lagrangian_intersection(&zi, &wi);
            if meet_src.rank() == 0 {
                ensure!(finite.is_ok(), "instance {t}: images meet infinitely: {:?}", finite.err());
            } else {
                ensure!(
                    matches!(finite, Err(SymplecticError::InfiniteIntersection(_))),
                    "instance {t}: infinite source intersection became finite"
                );
            }
        }
        Ok("200 isogenies, both directions and intersections".into())
    })
}

// ---------------------------------------------------------------------------
// Multiplier search and the graph embedding on the pinned corpus.

/// The pinned corpus: 100 seeds cycling through `g ∈ {1,2,3}`,
/// `n ∈ {1,2,3,4}`.
pub fn corpus_seeds() -> Vec<InstanceSeed> {
    (0..100u64)
        .map(|s| InstanceSeed::new(1000 + s, 1 + (s % 3) as usize, 1 + (s / 3) % 4))
        .collect()
}

pub fn multiplier_search() -> CriterionResult {
    timed("multiplier-search", 30, || {
        let mut largest_ratio = 0u64;
        for s in corpus_seeds() {
            let inst = random_pipeline_instance(&s);
            let mx = quotient_by_isotropic(&inst.x, &inst.alpha).map_err(|e| e.to_string())?;
            let my = quotient_by_isotropic(&inst.y, &inst.beta).map_err(|e| e.to_string())?;
            let (_, z) = transported_dual_lagrangian(&mx, &inst.g_iso).map_err(|e| e.to_string())?;
            let zp = preimage_lagrangian(my.pi(), &z).map_err(|e| e.to_string())?;
            let n = inst.beta.n().clone();
            let m = find_transverse_multiplier(&zp, &inst.l_hat, &n, &(&n * 20))
                .map_err(|e| format!("seed {}: {e}", s.seed))?;
            largest_ratio = largest_ratio.max((&m / &n).to_u64().unwrap());
            let emb = iota_embedding(&my, &inst.l_hat, &m).map_err(|e| format!("seed {}: {e}", s.seed))?;
            ensure!(
                emb.image.lattice().is_saturated() && is_lagrangian(emb.image.lattice(), my.symplectic()),
                "seed {}: image is not a Lagrangian",
                s.seed
            );
        }
        Ok(format!("100 instances, no exhaustion, largest m/n = {largest_ratio}"))
    })
}

// ---------------------------------------------------------------------------
// End-to-end witnesses.

pub fn witness_pipeline() -> CriterionResult {
    timed("witness-pipeline", 60, || {
        let x = product_elliptic(1);
        let l = crate::av::Polarization::new(x.clone(), IntMatrix::from_rows(&[[0, -1], [1, 0]]))
            .unwrap()
            .dual_polarization();
        let swap = run_pipeline(&swap_instance(&x, l), None).map_err(|e| format!("swap: {e}"))?;
        ensure!(
            swap.kernel.is_trivial() && swap.isogeny.matrix() == &IntMatrix::identity(2),
            "swap case: expected the identity witness"
        );
        let mut sizes = std::collections::BTreeMap::new();
        for s in corpus_seeds() {
            let inst = random_pipeline_instance(&s);
            let w = run_pipeline(&inst, None).map_err(|e| format!("seed {}: {e}", s.seed))?;
            let v = kernel_square_test(&w.isogeny).map_err(|e| e.to_string())?;
            ensure!(
                v.is_square_type && v.decomposition == w.decomposition && v.kernel == w.kernel,
                "seed {}: witness inconsistent with kernel_square_test",
                s.seed
            );
            // Z ∩ W pulls back to Γ ∩ π⁻¹(Z), an extension of a subgroup of
            // K_β by Γ ∩ Z', so |ker| divides n_Y^{2g}·|Γ ∩ Z'|.
            let std_y = standard_symplectic(&inst.y);
            let phi = crate::av::phi_from_polarization(&inst.l_hat);
            let gamma = graph_lagrangian(&phi, &w.provenance.m, &std_y).map_err(|e| e.to_string())?;
            let zp = LagrangianSublattice::new(std_y, w.provenance.z_prime.clone()).map_err(|e| e.to_string())?;
            let upstairs = lagrangian_intersection(&zp, &gamma).map_err(|e| e.to_string())?;
            let ceiling = inst.beta.n().pow(inst.y.rank() as u32) * upstairs.order();
            ensure!(
                ceiling.is_multiple_of(&w.kernel.order()),
                "seed {}: |ker| = {} does not divide n^2g·|Γ ∩ Z'| = {ceiling}",
                s.seed,
                w.kernel.order()
            );
            if s.seed % 10 == 0 {
                let again = run_pipeline(&inst, None).unwrap();
                ensure!(again == w, "seed {}: pipeline is not deterministic", s.seed);
            }
            *sizes.entry(w.kernel.order()).or_insert(0) += 1;
        }
        Ok(format!(
            "swap case trivial; 100 runs square-type, {} distinct kernel orders",
            sizes.len()
        ))
    })
}

// ---------------------------------------------------------------------------
// Square-type decisions.

pub fn square_type_decisions() -> CriterionResult {
    timed("square-type-decision", 5, || {
        let accept = square_type_test(&FiniteAbelianGroup::from_u64(&[2, 2, 6, 6]).unwrap());
        ensure!(
            accept.is_square_type && accept.m_list_u64() == vec![2, 6],
            "(2,2,6,6) not accepted with m_list (2,6)"
        );
        let reject = square_type_test(&FiniteAbelianGroup::from_u64(&[2, 4]).unwrap());
        ensure!(!reject.is_square_type, "(2,4) accepted");

        // The same verdicts through isogenies with these kernels.
        let y = product_elliptic(2);
        let f = Homomorphism::new(y.clone(), y.clone(), IntMatrix::diagonal(&[2, 2, 6, 6])).unwrap();
        let v = kernel_square_test(&f).map_err(|e| e.to_string())?;
        ensure!(v.is_square_type && v.decomposition.m_list_u64() == vec![2, 6], "diag(2,2,6,6) rejected");
        let d = IntMatrix::diagonal(&[1, 1, 2, 4]);
        let jt = &(&d.to_rat() * y.j()) * &d.to_rat().inverse().unwrap();
        let target = AbelianVarietyModel::new(jt).unwrap();
        let v = kernel_square_test(&Homomorphism::new(y, target, d).unwrap()).map_err(|e| e.to_string())?;
        ensure!(!v.is_square_type && v.kernel.factors_u64() == vec![2, 4], "diag(1,1,2,4) accepted");
        Ok("(2,2,6,6) accepted with (2,6); (2,4) rejected".into())
    })
}
