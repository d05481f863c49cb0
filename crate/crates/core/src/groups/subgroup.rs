use num_bigint::BigInt;
use num_traits::One;

use super::FiniteAbelianGroup;
use crate::lattice::{integer_kernel, snf, IntMatrix};

/// Invariant-factor presentation of a subgroup of a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupPresentation {
    /// The subgroup as an abstract group.
    pub group: FiniteAbelianGroup,
    /// Generators in ambient coordinates; generator `i` has order
    /// `group.factors()[i]`.
    pub generators: Vec<Vec<BigInt>>,
}

/// Presents the subgroup of `ambient` generated by `gens`.
pub fn subgroup_presentation(
    ambient: &FiniteAbelianGroup,
    gens: &[Vec<BigInt>],
) -> SubgroupPresentation {
    let k = ambient.rank();
    let r = gens.len();
    if r == 0 || k == 0 {
        return SubgroupPresentation {
            group: FiniteAbelianGroup::trivial(),
            generators: vec![],
        };
    }
    let v = IntMatrix::from_columns(k, gens);
    let d = IntMatrix::from_columns(
        k,
        &(0..k)
            .map(|i| {
                let mut c = vec![BigInt::from(0); k];
                c[i] = ambient.factors()[i].clone();
                c
            })
            .collect::<Vec<_>>(),
    );
    // Relations among the generators: u with V·u ∈ D·Z^k.
    let ker = integer_kernel(&v.hstack(&d).expect("same row count"));
    let relations = ker.submatrix(0..r, 0..ker.cols());
    let s = snf(&relations);
    let u_inv = s
        .u
        .to_rat()
        .inverse()
        .expect("unimodular")
        .to_int()
        .expect("integral");
    let mut factors = Vec::new();
    let mut out = Vec::new();
    for (i, f) in s.invariant_factors.iter().enumerate() {
        if f.is_one() {
            continue;
        }
        factors.push(f.clone());
        out.push(ambient.reduce(&v.mul_vec(&u_inv.column(i))));
    }
    debug_assert_eq!(s.rank(), r, "subgroup of a finite group has full-rank relations");
    SubgroupPresentation {
        group: FiniteAbelianGroup::from_factors_unchecked(factors),
        generators: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn presents_cyclic_subgroup() {
        let g = FiniteAbelianGroup::from_u64(&[2, 4]).unwrap();
        let p = subgroup_presentation(&g, &[v(&[0, 2])]);
        assert_eq!(p.group.factors_u64(), vec![2]);
        assert_eq!(p.generators, vec![v(&[0, 2])]);
    }

    #[test]
    fn presents_whole_group_from_redundant_generators() {
        let g = FiniteAbelianGroup::from_u64(&[2, 4]).unwrap();
        let p = subgroup_presentation(&g, &[v(&[1, 1]), v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(p.group, g);
        for (gen, f) in p.generators.iter().zip(p.group.factors()) {
            assert_eq!(&g.element_order(gen), f);
        }
    }

    #[test]
    fn trivial_subgroup() {
        let g = FiniteAbelianGroup::from_u64(&[3]).unwrap();
        assert!(subgroup_presentation(&g, &[v(&[0])]).group.is_trivial());
    }
}
