//! Smith and Hermite normal forms, integer kernels and integral solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `U · M · V = S` with `U`, `V` unimodular and `S` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

/// Position of the nonzero entry of least absolute value in the trailing
/// block starting at `(t, t)`, scanning row-major.
fn smallest_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            let av = v.abs();
            if best.as_ref().is_none_or(|(_, b)| av < *b) {
                best = Some(((i, j), av));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut factors = Vec::new();

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&a, t) else {
                return SmithDecomposition {
                    u,
                    s: a,
                    v,
                    invariant_factors: factors,
                };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row.
            let pivot = a[(t, t)].clone();
            let offending = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot))
            });
            if let Some(i) = offending {
                let one = BigInt::one();
                a.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                continue;
            }
            if a[(t, t)].is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            factors.push(a[(t, t)].clone());
            break;
        }
    }
    SmithDecomposition {
        u,
        s: a,
        v,
        invariant_factors: factors,
    }
}

/// Column-style Hermite normal form of the column span of `m`.
///
/// Column echelon form: pivot rows strictly increase, pivots are positive,
/// and in each pivot row the entries left of the pivot lie in `[0, pivot)`.
/// Zero columns are dropped, so the result has `rank(m)` columns.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    hnf_with_transform(m).0
}

/// Returns `(H, T)` with `m · T = [H | 0]` and `T` unimodular.
pub fn hnf_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut t = IntMatrix::identity(cols);
    let mut k = 0;
    for i in 0..rows {
        if k == cols {
            break;
        }
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for j in k..cols {
                let v = &a[(i, j)];
                if !v.is_zero() {
                    let av = v.abs();
                    if best.as_ref().is_none_or(|(_, b)| av < *b) {
                        best = Some((j, av));
                    }
                }
            }
            let Some((j0, _)) = best else { break };
            a.swap_cols(k, j0);
            t.swap_cols(k, j0);
            let mut done = true;
            for j in k + 1..cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let q = -a[(i, j)].div_floor(&a[(i, k)]);
                a.add_col_multiple(j, k, &q);
                t.add_col_multiple(j, k, &q);
                if !a[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[(i, k)].is_zero() {
            continue;
        }
        if a[(i, k)].is_negative() {
            a.negate_col(k);
            t.negate_col(k);
        }
        let pivot = a[(i, k)].clone();
        for j in 0..k {
            let q = -a[(i, j)].div_floor(&pivot);
            a.add_col_multiple(j, k, &q);
            t.add_col_multiple(j, k, &q);
        }
        k += 1;
    }
    let h = a.submatrix(0..rows, 0..k);
    (h, t)
}

/// Saturated basis (as columns) of `{x ∈ Z^cols : m·x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let d = snf(m);
    let r = d.rank();
    d.v.submatrix(0..m.cols(), r..m.cols())
}

/// Solves `m · x = b` over the integers, if possible.
pub fn solve_integral(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let d = snf(m);
    let ub = d.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, val) in ub.iter().enumerate() {
        if i < d.rank() {
            let s = &d.invariant_factors[i];
            if !val.is_multiple_of(s) {
                return None;
            }
            y[i] = val / s;
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(d.v.mul_vec(&y))
}

/// Rank over Q.
pub fn rank(m: &IntMatrix) -> usize {
    hnf(m).cols()
}
