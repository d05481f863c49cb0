use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::subgroup::subgroup_presentation;
use super::{FiniteAbelianGroup, GroupError, SquareDecomposition};
use crate::lattice::{snf, solve_integral, IntMatrix, RatMatrix};

/// Fractional part in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - BigRational::from_integer(q.floor().to_integer())
}

/// An alternating `Q/Z`-valued pairing, given by its values on the
/// invariant-factor generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingPairing {
    group: FiniteAbelianGroup,
    matrix: RatMatrix,
}

impl AlternatingPairing {
    /// Validates and stores `matrix` (entries reduced into `[0, 1)`).
    pub fn new(group: FiniteAbelianGroup, matrix: RatMatrix) -> Result<Self, GroupError> {
        let k = group.rank();
        if matrix.shape() != (k, k) {
            return Err(GroupError::InvalidPairing(format!(
                "matrix is {:?}, group has {k} generators",
                matrix.shape()
            )));
        }
        let mut reduced = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                reduced[(i, j)] = frac(&matrix[(i, j)]);
            }
        }
        for i in 0..k {
            if !reduced[(i, i)].is_zero() {
                return Err(GroupError::InvalidPairing(format!(
                    "e(g{i}, g{i}) = {} is not zero",
                    reduced[(i, i)]
                )));
            }
            for j in 0..k {
                let v = &reduced[(i, j)];
                for m in [&group.factors()[i], &group.factors()[j]] {
                    if !(v * BigRational::from_integer(m.clone())).is_integer() {
                        return Err(GroupError::InvalidPairing(format!(
                            "e(g{i}, g{j}) = {v} is not killed by {m}"
                        )));
                    }
                }
                if !(v + &reduced[(j, i)]).is_integer() {
                    return Err(GroupError::InvalidPairing(format!(
                        "e(g{i}, g{j}) and e(g{j}, g{i}) are not opposite"
                    )));
                }
            }
        }
        Ok(Self {
            group,
            matrix: reduced,
        })
    }

    pub fn zero(group: FiniteAbelianGroup) -> Self {
        let k = group.rank();
        Self {
            group,
            matrix: RatMatrix::zeros(k, k),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// `e(x, y)` in `[0, 1)`.
    pub fn eval(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let k = self.group.rank();
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate().take(k) {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate().take(k) {
                if yj.is_zero() || self.matrix[(i, j)].is_zero() {
                    continue;
                }
                acc += &self.matrix[(i, j)] * BigRational::from_integer(xi * yj);
            }
        }
        frac(&acc)
    }
}

/// Commutator pairing on `K ⊕ K^`:
/// `e((k, χ), (k', χ')) = χ'(k) − χ(k')`.
///
/// Generators are ordered `(g_1, ĝ_1, g_2, ĝ_2, …)` where `ĝ_i` is the
/// character dual to `g_i`, so the group has factors `(k_1, k_1, k_2, k_2, …)`.
pub fn heisenberg_pairing(k: &FiniteAbelianGroup) -> AlternatingPairing {
    let r = k.rank();
    let factors: Vec<BigInt> = k
        .factors()
        .iter()
        .flat_map(|f| [f.clone(), f.clone()])
        .collect();
    let mut m = RatMatrix::zeros(2 * r, 2 * r);
    for (i, f) in k.factors().iter().enumerate() {
        let v = BigRational::new(BigInt::one(), f.clone());
        m[(2 * i, 2 * i + 1)] = v.clone();
        m[(2 * i + 1, 2 * i)] = -v;
    }
    AlternatingPairing::new(FiniteAbelianGroup::from_factors_unchecked(factors), m)
        .expect("Heisenberg pairing is alternating")
}

/// Injectivity of the adjoint `G → Hom(G, Q/Z)`.
///
/// Scales the pairing matrix by the exponent `N` to an integer matrix `A`;
/// the adjoint image is the subgroup of `(Z/N)^k` spanned by the rows of
/// `A`, whose order is `N^k / [Z^k : rowspan(A) + N·Z^k]`. The adjoint is
/// injective iff that order equals `|G|`.
pub fn pairing_is_nondegenerate(e: &AlternatingPairing) -> bool {
    let g = e.group();
    let k = g.rank();
    if k == 0 {
        return true;
    }
    let n = g.exponent();
    let nr = BigRational::from_integer(n.clone());
    let mut cols: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (&e.matrix()[(i, j)] * &nr).to_integer())
                .collect()
        })
        .collect();
    for j in 0..k {
        let mut c = vec![BigInt::zero(); k];
        c[j] = n.clone();
        cols.push(c);
    }
    let lattice = IntMatrix::from_columns(k, &cols);
    let index: BigInt = snf(&lattice).invariant_factors.iter().product();
    let image_order = num_traits::pow(n, k) / index;
    image_order == g.order()
}

/// A symplectic basis `(a_1, b_1, …, a_r, b_r)` with `e(a_i, b_i) = 1/m_i`
/// and all other generator pairings zero, `m_1 | m_2 | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticBasis {
    pub decomposition: SquareDecomposition,
    /// Columns are the generators `a_1, b_1, …` in the original coordinates.
    pub generators: IntMatrix,
}

/// Splits off hyperbolic planes: take the maximal-order element of the
/// current subgroup (the last invariant-factor generator, which is the
/// lexicographically first element of that order in the subgroup's own
/// coordinates), find a partner with pairing value `1/m` by solving a
/// linear congruence, then recurse on the orthogonal complement.
pub fn symplectic_basis(e: &AlternatingPairing) -> Result<SymplecticBasis, GroupError> {
    if !pairing_is_nondegenerate(e) {
        return Err(GroupError::DegeneratePairing);
    }
    let g = e.group();
    let mut current: Vec<Vec<BigInt>> = (0..g.rank()).map(|i| g.generator(i)).collect();
    let mut planes: Vec<(BigInt, Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    loop {
        let pres = subgroup_presentation(g, &current);
        let Some(m) = pres.group.factors().last().cloned() else {
            break;
        };
        let a = pres.generators.last().expect("nonempty").clone();
        let mr = BigRational::from_integer(m.clone());
        // e(a, h_j) = t_j / m; solve Σ y_j t_j ≡ 1 (mod m).
        let mut row: Vec<BigInt> = pres
            .generators
            .iter()
            .map(|h| (e.eval(&a, h) * &mr).to_integer())
            .collect();
        row.push(m.clone());
        let coeffs = IntMatrix::from_columns(1, &row.iter().map(|t| vec![t.clone()]).collect::<Vec<_>>());
        let y = solve_integral(&coeffs, &[BigInt::one()]).ok_or(GroupError::DegeneratePairing)?;
        let mut b = vec![BigInt::zero(); g.rank()];
        for (yj, h) in y.iter().zip(&pres.generators) {
            b = g.add(&b, &g.scale(yj, h));
        }
        debug_assert_eq!(e.eval(&a, &b), BigRational::new(BigInt::one(), m.clone()));
        current = pres
            .generators
            .iter()
            .map(|h| {
                let xb = (e.eval(h, &b) * &mr).to_integer();
                let xa = (e.eval(h, &a) * &mr).to_integer();
                let t = g.add(h, &g.scale(&-xb, &a));
                g.add(&t, &g.scale(&xa, &b))
            })
            .collect();
        planes.push((m, a, b));
    }
    planes.reverse();
    let mut cols = Vec::with_capacity(2 * planes.len());
    let mut m_list = Vec::with_capacity(planes.len());
    for (m, a, b) in planes {
        m_list.push(m);
        cols.push(a);
        cols.push(b);
    }
    debug_assert!(m_list.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    Ok(SymplecticBasis {
        decomposition: SquareDecomposition {
            is_square_type: true,
            m_list,
        },
        generators: IntMatrix::from_columns(g.rank(), &cols),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_u64(f).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Adjoint injectivity by enumeration.
    fn brute_nondegenerate(e: &AlternatingPairing) -> bool {
        let g = e.group();
        let gens: Vec<_> = (0..g.rank()).map(|i| g.generator(i)).collect();
        g.elements()
            .iter()
            .filter(|x| x.iter().any(|c| !c.is_zero()))
            .all(|x| gens.iter().any(|h| !e.eval(x, h).is_zero()))
    }

    #[test]
    fn heisenberg_z2() {
        let e = heisenberg_pairing(&grp(&[2]));
        assert_eq!(e.group().factors_u64(), vec![2, 2]);
        assert_eq!(e.matrix()[(0, 1)], q(1, 2));
        assert_eq!(e.matrix()[(1, 0)], q(1, 2));
        assert!(pairing_is_nondegenerate(&e));
        assert!(brute_nondegenerate(&e));
    }

    #[test]
    fn heisenberg_trivial() {
        let e = heisenberg_pairing(&FiniteAbelianGroup::trivial());
        assert!(e.group().is_trivial());
        assert_eq!(e.matrix().shape(), (0, 0));
        assert!(pairing_is_nondegenerate(&e));
    }

    #[test]
    fn heisenberg_z2_z4() {
        let e = heisenberg_pairing(&grp(&[2, 4]));
        assert_eq!(e.group().factors_u64(), vec![2, 2, 4, 4]);
        assert_eq!(e.matrix()[(0, 1)], q(1, 2));
        assert_eq!(e.matrix()[(2, 3)], q(1, 4));
        assert_eq!(e.matrix()[(3, 2)], q(3, 4));
        assert!(brute_nondegenerate(&e));
        assert!(pairing_is_nondegenerate(&e));
    }

    #[test]
    fn degenerate_examples() {
        assert!(!pairing_is_nondegenerate(&AlternatingPairing::zero(grp(&[2, 2]))));
        assert!(!pairing_is_nondegenerate(&AlternatingPairing::zero(grp(&[2]))));
        let partial = AlternatingPairing::new(
            grp(&[2, 4]),
            RatMatrix::new(2, 2, vec![q(0, 1), q(1, 2), q(1, 2), q(0, 1)]).unwrap(),
        )
        .unwrap();
        assert!(!pairing_is_nondegenerate(&partial));
        assert!(!brute_nondegenerate(&partial));
    }

    #[test]
    fn invalid_pairings_rejected() {
        let bad_diag = RatMatrix::new(1, 1, vec![q(1, 2)]).unwrap();
        assert!(AlternatingPairing::new(grp(&[2]), bad_diag).is_err());
        let not_killed = RatMatrix::new(2, 2, vec![q(0, 1), q(1, 3), q(2, 3), q(0, 1)]).unwrap();
        assert!(AlternatingPairing::new(grp(&[2, 2]), not_killed).is_err());
        let not_anti = RatMatrix::new(2, 2, vec![q(0, 1), q(1, 4), q(1, 4), q(0, 1)]).unwrap();
        assert!(AlternatingPairing::new(grp(&[4, 4]), not_anti).is_err());
    }

    fn check_basis(e: &AlternatingPairing, expect: &[u64]) {
        let sb = symplectic_basis(e).unwrap();
        assert_eq!(sb.decomposition.m_list_u64(), expect);
        let g = e.group();
        let cols = sb.generators.columns();
        for (i, m) in sb.decomposition.m_list.iter().enumerate() {
            for (j, n) in sb.decomposition.m_list.iter().enumerate() {
                let (ai, bi, aj, bj) = (&cols[2 * i], &cols[2 * i + 1], &cols[2 * j], &cols[2 * j + 1]);
                assert!(e.eval(ai, aj).is_zero());
                assert!(e.eval(bi, bj).is_zero());
                if i == j {
                    assert_eq!(e.eval(ai, bi), BigRational::new(BigInt::one(), m.clone()));
                } else {
                    assert!(e.eval(ai, bj).is_zero(), "{m} {n}");
                }
            }
        }
        let pres = subgroup_presentation(g, &cols);
        assert_eq!(&pres.group, g);
    }

    #[test]
    fn symplectic_basis_examples() {
        check_basis(&heisenberg_pairing(&grp(&[3])), &[3]);
        check_basis(&heisenberg_pairing(&grp(&[2, 2])), &[2, 2]);
        check_basis(&heisenberg_pairing(&grp(&[2, 6, 12])), &[2, 6, 12]);
        let t = symplectic_basis(&heisenberg_pairing(&FiniteAbelianGroup::trivial())).unwrap();
        assert!(t.decomposition.m_list.is_empty());
        assert_eq!(t.generators.cols(), 0);
    }

    #[test]
    fn symplectic_basis_rejects_degenerate() {
        assert_eq!(
            symplectic_basis(&AlternatingPairing::zero(grp(&[2, 2]))),
            Err(GroupError::DegeneratePairing)
        );
    }
}
