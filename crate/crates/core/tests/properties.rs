use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use avsym_core::av::{
    ns_difference_test, neron_severi_basis, validate_brauer_rep, BrauerRepresentative,
};
use avsym_core::engine::{
    fixture_seed, kernel_square_test, random_av_with_brauer, random_pipeline_instance,
    random_symplectic_instance, run_pipeline, InstanceSeed,
};
use avsym_core::groups::{
    heisenberg_pairing, pairing_is_nondegenerate, symplectic_basis, FiniteAbelianGroup,
};
use avsym_core::lattice::{
    cokernel_group, hnf, saturate, snf, IntMatrix, RatMatrix, Sublattice,
};
use avsym_core::symplectic::{
    embed_dual_lagrangian, intersection_pairing, is_lagrangian, lagrangian_intersection,
    lagrangian_isogeny, quotient_by_isotropic, standard_symplectic,
};

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
            .prop_map(|rows| IntMatrix::from_rows(&rows))
    })
}

fn chain() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=4, 1..=3).prop_map(|steps| {
        let mut out: Vec<u64> = Vec::new();
        for s in steps {
            let prev = out.last().copied().unwrap_or(1);
            out.push(prev * (s + 1));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_valid_decomposition(m in matrix(5, 15)) {
        let d = snf(&m);
        prop_assert_eq!(&(&d.u * &m) * &d.v, d.s.clone());
        prop_assert!(d.u.det().unwrap().abs().is_one());
        prop_assert!(d.v.det().unwrap().abs().is_one());
        prop_assert!(d.invariant_factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    }

    #[test]
    fn hermite_form_spans_the_same_lattice(m in matrix(4, 9)) {
        let h = hnf(&m);
        prop_assert_eq!(hnf(&h), h.clone());
        let span = Sublattice::span(&m);
        prop_assert_eq!(span.basis(), &h);
        for c in m.columns() {
            prop_assert!(span.contains(&c));
        }
    }

    #[test]
    fn saturation_is_saturated_and_contains(m in matrix(4, 9)) {
        let s = Sublattice::span(&m);
        let sat = saturate(&s);
        prop_assert!(sat.is_saturated());
        prop_assert_eq!(sat.rank(), s.rank());
        prop_assert!(sat.contains_lattice(&s));
        prop_assert_eq!(saturate(&sat), sat);
    }

    #[test]
    fn cokernel_order_is_the_determinant(m in matrix(4, 9)) {
        if m.is_square() {
            let det = m.det().unwrap();
            match cokernel_group(&m) {
                Ok(g) => prop_assert_eq!(g.order(), det.abs()),
                Err(_) => prop_assert!(det.is_zero()),
            }
        }
    }

    #[test]
    fn heisenberg_roundtrip(c in chain()) {
        let k = FiniteAbelianGroup::from_u64(&c).unwrap();
        let e = heisenberg_pairing(&k);
        prop_assert!(pairing_is_nondegenerate(&e));
        let b = symplectic_basis(&e).unwrap();
        prop_assert_eq!(b.decomposition.m_list_u64(), c);
    }

    #[test]
    fn random_lagrangian_pairs_have_square_kernels(seed in any::<u64>(), g in 1usize..=2) {
        let inst = random_symplectic_instance(&InstanceSeed::new(seed, g, 1));
        prop_assert!(is_lagrangian(inst.z.lattice(), &inst.ambient));
        prop_assert!(is_lagrangian(inst.w.lattice(), &inst.ambient));
        let iso = lagrangian_isogeny(&inst.z, &inst.w).unwrap();
        prop_assert!(iso.decomposition.is_square_type);
        let meet = lagrangian_intersection(&inst.z, &inst.w).unwrap();
        prop_assert_eq!(&meet, &iso.kernel);
        let p = intersection_pairing(&inst.z, &inst.w).unwrap();
        prop_assert_eq!(symplectic_basis(&p.pairing).unwrap().decomposition, iso.decomposition);
    }

    #[test]
    fn twisted_models_pull_back_to_n_times_standard(seed in any::<u64>(), g in 1usize..=3, n in 1u64..=4) {
        let (x, alpha, _) = random_av_with_brauer(&InstanceSeed::new(seed, g, n));
        prop_assert!(validate_brauer_rep(&alpha));
        let m = quotient_by_isotropic(&x, &alpha).unwrap();
        let f = m.pi().matrix();
        let std = standard_symplectic(&x);
        prop_assert_eq!(
            &(&f.transpose() * m.symplectic().psi()) * f,
            std.psi().scale(&BigInt::from(n))
        );
        prop_assert!(embed_dual_lagrangian(&m).unwrap().variety().is_ok());
    }

    #[test]
    fn ns_difference_is_an_equivalence(seed in any::<u64>(), n in 2u64..=4) {
        let (x, alpha, _) = random_av_with_brauer(&InstanceSeed::new(seed, 2, n));
        prop_assert!(ns_difference_test(&alpha, &alpha).unwrap());
        let shift = neron_severi_basis(&x)
            .iter()
            .fold(alpha.matrix().clone(), |acc, b| acc.add(b).unwrap());
        let beta = BrauerRepresentative::new(x, BigInt::from(n), shift).unwrap();
        prop_assert!(ns_difference_test(&alpha, &beta).unwrap());
        prop_assert!(ns_difference_test(&beta, &alpha).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_witnesses_have_square_kernels(seed in any::<u64>(), g in 1usize..=2, n in 1u64..=3) {
        let inst = random_pipeline_instance(&InstanceSeed::new(seed, g, n));
        let w = run_pipeline(&inst, None).unwrap();
        let v = kernel_square_test(&w.isogeny).unwrap();
        prop_assert!(v.is_square_type);
        prop_assert_eq!(v.kernel, w.kernel);
        prop_assert!(w.provenance.m.is_multiple_of(inst.beta.n()));
    }
}

#[test]
fn fixture_is_pinned() {
    let (x, alpha, l) = random_av_with_brauer(&fixture_seed());
    assert_eq!(
        x.j(),
        &RatMatrix::from_rows(&[[0, 4, -5, -2], [0, 2, -3, -1], [-1, 2, 0, 0], [3, -1, -6, -2]])
    );
    assert_eq!(
        alpha.matrix(),
        &IntMatrix::from_rows(&[[0, 1, 1, 0], [1, 0, 0, 0], [1, 0, 0, 1], [0, 0, 1, 0]])
    );
    assert_eq!(alpha.n(), &BigInt::from(2));
    assert_eq!(
        l.matrix(),
        &IntMatrix::from_rows(&[[0, 0, 2, 0], [0, 0, -7, -1], [-2, 7, 0, 0], [0, 1, 0, 0]])
    );
}

#[test]
fn trivial_class_on_the_fixture_variety() {
    let (x, _, _) = random_av_with_brauer(&fixture_seed());
    let m = quotient_by_isotropic(&x, &BrauerRepresentative::trivial(&x)).unwrap();
    assert_eq!(m.pi().matrix(), &IntMatrix::identity(8));
    assert_eq!(m.symplectic(), &standard_symplectic(&x));
}
