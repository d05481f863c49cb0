//! Deciding the kernel shape of an isogeny `X^ → Y`, and producing such an
//! isogeny from a symplectic isomorphism of twisted models.

mod random;

pub use random::{
    fixture_seed, induced_isomorphism, random_anti_hermitian, random_av_with_brauer,
    random_gaussian_unimodular, random_orthogonal, random_pipeline_instance, random_skew,
    random_symplectic_instance, random_unimodular, swap_instance, InstanceSeed, PipelineInstance,
    Shear, SymplecticInstance, FIXTURE_SEED,
};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::av::{
    isogeny_kernel, AbelianVarietyModel, AvError, BrauerRepresentative, Homomorphism, Polarization,
};
use crate::groups::{square_type_test, FiniteAbelianGroup, SquareDecomposition};
use crate::lattice::{IntMatrix, Sublattice};
use crate::symplectic::{
    embed_dual_lagrangian, find_transverse_multiplier, iota_embedding, lagrangian_isogeny,
    preimage_lagrangian, quotient_by_isotropic, LagrangianSublattice, SymplecticError,
    SymplecticMorphism, TwistedSymplecticModel,
};

/// Kernel of an isogeny and whether it is `⊕ (Z/m_i)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVerdict {
    pub is_square_type: bool,
    pub decomposition: SquareDecomposition,
    pub kernel: FiniteAbelianGroup,
}

pub fn kernel_square_test(f: &Homomorphism) -> Result<KernelVerdict, AvError> {
    let kernel = isogeny_kernel(f)?;
    let decomposition = square_type_test(&kernel);
    Ok(KernelVerdict {
        is_square_type: decomposition.is_square_type,
        decomposition,
        kernel,
    })
}

/// Intermediate objects of a pipeline run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub m: BigInt,
    /// `g(0 × X^)` in `A_(Y,β)`, parametrized by `Λ_X^*`.
    pub z: IntMatrix,
    /// Preimage of `z` in `Y × Y^`.
    pub z_prime: Sublattice,
    /// `ι(Y^)` in `A_(Y,β)`, parametrized by `Λ_Y^*`.
    pub w: IntMatrix,
    pub intersection: FiniteAbelianGroup,
}

/// An isogeny `X^ → Y` whose kernel is `⊕ (Z/m_i)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub isogeny: Homomorphism,
    pub kernel: FiniteAbelianGroup,
    pub decomposition: SquareDecomposition,
    pub provenance: Provenance,
}

/// Default search bound `50·n`.
pub fn default_m_max(n: &BigInt) -> BigInt {
    n * 50
}

/// Runs the construction on a [`PipelineInstance`].
pub fn run_pipeline(
    inst: &PipelineInstance,
    m_max: Option<BigInt>,
) -> Result<EquivalenceWitness, SymplecticError> {
    let m_max = m_max.unwrap_or_else(|| default_m_max(inst.beta.n()));
    equivalence_witness(
        &inst.x,
        &inst.alpha,
        &inst.y,
        &inst.beta,
        &inst.g_iso,
        &inst.l_hat,
        &m_max,
    )
}

/// The Lagrangian `g(0 × X^)` of the target of `g`, with its
/// parametrization by `Λ_X^*`.
pub fn transported_dual_lagrangian(
    mx: &TwistedSymplecticModel,
    g_iso: &SymplecticMorphism,
) -> Result<(IntMatrix, LagrangianSublattice), SymplecticError> {
    if g_iso.source() != mx.symplectic() {
        return Err(SymplecticError::AmbientMismatch);
    }
    embed_dual_lagrangian(mx)?;
    let r = mx.base().rank();
    let dual_inc = IntMatrix::zeros(r, r).vstack(&IntMatrix::identity(r))?;
    let s_z = g_iso.matrix() * &(mx.pi().matrix() * &dual_inc);
    let z = LagrangianSublattice::new(g_iso.target().clone(), Sublattice::new(&s_z)?)
        .map_err(|e| SymplecticError::TheoremViolation(format!("g(0 × X^): {e}")))?;
    Ok((s_z, z))
}

/// From `g : A_(X,α) ≅ A_(Y,β)` and a polarization `L` on `Y^`, builds an
/// isogeny `X^ → Y` with kernel `⊕ (Z/m_i)^2`.
///
/// `Z = g(0 × X^)` and `W = ι(Y^)` are transverse Lagrangians of
/// `A_(Y,β)`, where `ι` goes through the graph of `m φ_L` and `m` is the
/// first multiple of `n_Y` making the graph transverse to the preimage of
/// `Z`. The witness is the pairing `S_Wᵀ Ψ S_Z : Λ_X^* → Λ_Y`.
pub fn equivalence_witness(
    x: &AbelianVarietyModel,
    alpha: &BrauerRepresentative,
    y: &AbelianVarietyModel,
    beta: &BrauerRepresentative,
    g_iso: &SymplecticMorphism,
    l: &Polarization,
    m_max: &BigInt,
) -> Result<EquivalenceWitness, SymplecticError> {
    let mx = quotient_by_isotropic(x, alpha)?;
    let my = quotient_by_isotropic(y, beta)?;
    if !g_iso.is_isomorphism() {
        return Err(SymplecticError::NotSymplecticMorphism(
            "multiplier is not 1".into(),
        ));
    }
    if g_iso.source() != mx.symplectic() || g_iso.target() != my.symplectic() {
        return Err(SymplecticError::NotSymplecticMorphism(
            "source or target differs from the twisted models".into(),
        ));
    }
    if !g_iso.matrix().det()?.abs().is_one() {
        return Err(SymplecticError::NotSymplecticMorphism(
            "matrix is not unimodular".into(),
        ));
    }
    if l.variety() != &y.dual() {
        return Err(AvError::DimensionMismatch.into());
    }

    let (s_z, z) = transported_dual_lagrangian(&mx, g_iso)?;

    let z_prime = preimage_lagrangian(my.pi(), &z)?;
    let m = find_transverse_multiplier(&z_prime, l, beta.n(), m_max)?;
    let emb = iota_embedding(&my, l, &m)?;
    let iso = lagrangian_isogeny(&z, &emb.image)?;

    let s_w = emb.homomorphism.matrix();
    let pairing = &(&s_w.transpose() * my.symplectic().psi()) * &s_z;
    let isogeny = Homomorphism::new(x.dual(), y.clone(), pairing)
        .map_err(|e| SymplecticError::TheoremViolation(format!("witness map: {e}")))?;
    let verdict = kernel_square_test(&isogeny)?;
    if !verdict.is_square_type {
        return Err(SymplecticError::TheoremViolation(format!(
            "witness kernel {:?} is not of square type",
            verdict.kernel.factors_u64()
        )));
    }
    if verdict.kernel != iso.kernel {
        return Err(SymplecticError::TheoremViolation(
            "witness kernel differs from Z ∩ W".into(),
        ));
    }
    Ok(EquivalenceWitness {
        isogeny,
        kernel: verdict.kernel,
        decomposition: verdict.decomposition,
        provenance: Provenance {
            m,
            z: s_z,
            z_prime: z_prime.lattice().clone(),
            w: s_w.clone(),
            intersection: iso.kernel,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::av::product_elliptic;

    fn principal_hat(g: usize) -> Polarization {
        let x = product_elliptic(g);
        Polarization::new(x, random::principal_blocks(g))
            .unwrap()
            .dual_polarization()
    }

    #[test]
    fn kernel_test_examples() {
        let x = product_elliptic(1);
        let v = kernel_square_test(&Homomorphism::scalar(&x, 2)).unwrap();
        assert!(v.is_square_type);
        assert_eq!(v.decomposition.m_list_u64(), vec![2]);
        let y = product_elliptic(2);
        let f = Homomorphism::new(y.clone(), y.clone(), IntMatrix::diagonal(&[1, 1, 2, 2])).unwrap();
        assert!(kernel_square_test(&f).unwrap().is_square_type);
        assert!(kernel_square_test(&Homomorphism::identity(&y)).unwrap().kernel.is_trivial());
        // diag(1,1,1,2) is complex-linear into the structure it induces.
        let f = IntMatrix::diagonal(&[1, 1, 1, 2]);
        let fr = f.to_rat();
        let jt = &(&fr * y.j()) * &fr.inverse().unwrap();
        let t = AbelianVarietyModel::new(jt).unwrap();
        let v = kernel_square_test(&Homomorphism::new(y.clone(), t, f).unwrap()).unwrap();
        assert!(!v.is_square_type);
        assert_eq!(v.kernel.factors_u64(), vec![2]);
        assert_eq!(
            kernel_square_test(&Homomorphism::scalar(&x, 0)),
            Err(AvError::NotAnIsogeny)
        );
    }

    #[test]
    fn swap_case_by_hand() {
        let x = product_elliptic(1);
        let inst = swap_instance(&x, principal_hat(1));
        let w = run_pipeline(&inst, None).unwrap();
        assert_eq!(w.provenance.m, BigInt::one());
        assert!(w.kernel.is_trivial());
        assert_eq!(w.isogeny.matrix(), &IntMatrix::identity(2));
        assert_eq!(
            w.provenance.z,
            IntMatrix::identity(2).vstack(&IntMatrix::zeros(2, 2)).unwrap()
        );
    }

    #[test]
    fn fixture_identity_pipeline() {
        let (x, alpha, l) = random_av_with_brauer(&fixture_seed());
        let mx = quotient_by_isotropic(&x, &alpha).unwrap();
        let id = SymplecticMorphism::new(
            mx.symplectic().clone(),
            mx.symplectic().clone(),
            IntMatrix::identity(8),
            BigInt::one(),
        )
        .unwrap();
        let w = equivalence_witness(&x, &alpha, &x, &alpha, &id, &l.dual_polarization(), &BigInt::from(100))
            .unwrap();
        assert!(w.decomposition.is_square_type);
        let order = w.kernel.order();
        let mut k = order.clone();
        while &k % 4 == BigInt::from(0) {
            k /= 4;
        }
        assert!(k.is_one(), "kernel order {order} is not a power of 4");
    }

    #[test]
    fn rejects_non_unimodular_iso() {
        let x = product_elliptic(1);
        let inst = swap_instance(&x, principal_hat(1));
        let a = inst.g_iso.source().clone();
        let doubled = SymplecticMorphism::new(a.clone(), a, IntMatrix::scalar(4, 2), BigInt::from(4)).unwrap();
        let err = equivalence_witness(&x, &inst.alpha, &x, &inst.alpha, &doubled, &inst.l_hat, &BigInt::from(10));
        assert!(matches!(err, Err(SymplecticError::NotSymplecticMorphism(_))));
    }

    #[test]
    fn random_pipeline_runs() {
        for seed in 0..12u64 {
            let s = InstanceSeed::new(seed, 1 + (seed as usize % 2), 1 + seed % 4);
            let inst = random_pipeline_instance(&s);
            let w = run_pipeline(&inst, None).unwrap();
            assert!(w.decomposition.is_square_type);
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let s = InstanceSeed::new(7, 2, 3);
        let a = random_symplectic_instance(&s);
        let b = random_symplectic_instance(&s);
        assert_eq!(a.z, b.z);
        assert_eq!(a.w, b.w);
        assert_eq!(random_av_with_brauer(&s), random_av_with_brauer(&s));
    }
}
