use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ExactMatrix;
use crate::error::LatticeError;

/// `U·A·V = D` with `U`, `V` unimodular and `D` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
}

impl SmithDecomposition {
    /// The `min(rows, cols)` diagonal entries `d_1 | d_2 | …`, all `≥ 0`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
///
/// Ties between pivot candidates go to the first one in row-major order, so
/// the transforms are reproducible. `D` itself is unique.
pub fn smith_normal_form(a: &ExactMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = ExactMatrix::identity(m);
    let mut v = ExactMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_pivot(&d, t) else {
                return finish(u, d, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            if !clear_column(&mut d, &mut u, t) {
                continue;
            }
            if !clear_row(&mut d, &mut v, t) {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let p = d.get(t, t).clone();
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn finish(u: ExactMatrix, d: ExactMatrix, v: ExactMatrix) -> SmithDecomposition {
    SmithDecomposition { u, d, v }
}

fn min_pivot(d: &ExactMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Reduces the entries below the pivot; returns false if a nonzero remainder is left.
fn clear_column(d: &mut ExactMatrix, u: &mut ExactMatrix, t: usize) -> bool {
    let p = d.get(t, t).clone();
    let mut clean = true;
    for i in t + 1..d.rows() {
        let q = -d.get(i, t).div_floor(&p);
        d.add_row_multiple(i, t, &q);
        u.add_row_multiple(i, t, &q);
        if !d.get(i, t).is_zero() {
            clean = false;
        }
    }
    clean
}

fn clear_row(d: &mut ExactMatrix, v: &mut ExactMatrix, t: usize) -> bool {
    let p = d.get(t, t).clone();
    let mut clean = true;
    for j in t + 1..d.cols() {
        let q = -d.get(t, j).div_floor(&p);
        d.add_col_multiple(j, t, &q);
        v.add_col_multiple(j, t, &q);
        if !d.get(t, j).is_zero() {
            clean = false;
        }
    }
    clean
}

/// `[ℤⁿ : Aℤⁿ] = |det A|` for a square nonsingular `A`.
pub fn lattice_index(a: &ExactMatrix) -> Result<BigInt, LatticeError> {
    let det = a.determinant()?;
    if det.is_zero() {
        return Err(LatticeError::SingularLattice);
    }
    Ok(det.abs())
}

/// Invariant factors of `ℤⁿ/Aℤⁿ` exceeding one; their product is `|det A|`.
pub fn quotient_invariants(a: &ExactMatrix) -> Result<Vec<BigInt>, LatticeError> {
    if !a.is_square() {
        return Err(LatticeError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Err(LatticeError::SingularLattice);
    }
    Ok(diag.into_iter().filter(|x| !x.is_one()).collect())
}

/// Some integer `x` with `A·x = b`, or `None` if no integer solution exists.
pub fn solve_integer(a: &ExactMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
    if b.len() != a.rows() {
        return Err(LatticeError::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let snf = smith_normal_form(a);
    // D·y = U·b with x = V·y
    let c = snf.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < a.cols() { snf.d.get(i, i).clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ci.is_zero() {
                return Ok(None);
            }
        } else {
            let (q, r) = ci.div_rem(&di);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        }
    }
    Ok(Some(snf.v.mul_vec(&y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(a: &ExactMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.u.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(s.v.determinant().unwrap().abs(), BigInt::one());
        s
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&ExactMatrix::identity(2));
        assert_eq!(s.d, ExactMatrix::identity(2));
    }

    #[test]
    fn coprime_diagonal_merges() {
        let s = check(&ExactMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), ints(&[1, 6]));
    }

    #[test]
    fn dense_two_by_two() {
        let s = check(&ExactMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.diagonal(), ints(&[2, 4]));
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let s = check(&ExactMatrix::from_i64(&[&[1, 1], &[1, 1], &[2, 2]]));
        assert_eq!(s.diagonal(), ints(&[1, 0]));
        assert_eq!(s.rank(), 1);
        let z = check(&ExactMatrix::zeros(2, 3));
        assert_eq!(z.rank(), 0);
        let wide = check(&ExactMatrix::from_i64(&[&[4, 6, 10]]));
        assert_eq!(wide.diagonal(), ints(&[2]));
    }

    #[test]
    fn index_and_invariants() {
        assert_eq!(lattice_index(&ExactMatrix::identity(3)).unwrap(), BigInt::one());
        assert_eq!(
            lattice_index(&ExactMatrix::from_i64(&[&[2, 0], &[0, 3]])).unwrap(),
            BigInt::from(6)
        );
        assert_eq!(
            lattice_index(&ExactMatrix::from_i64(&[&[1, 1], &[1, 1]])),
            Err(LatticeError::SingularLattice)
        );
        assert!(quotient_invariants(&ExactMatrix::identity(2)).unwrap().is_empty());
        assert_eq!(
            quotient_invariants(&ExactMatrix::from_i64(&[&[2, 0], &[0, 3]])).unwrap(),
            ints(&[6])
        );
        assert_eq!(
            quotient_invariants(&ExactMatrix::from_i64(&[&[2, 0], &[0, 2]])).unwrap(),
            ints(&[2, 2])
        );
        assert_eq!(
            quotient_invariants(&ExactMatrix::from_i64(&[&[1, 2], &[2, 4]])),
            Err(LatticeError::SingularLattice)
        );
    }

    #[test]
    fn integer_solving() {
        let id = ExactMatrix::identity(2);
        assert_eq!(solve_integer(&id, &ints(&[3, 5])).unwrap(), Some(ints(&[3, 5])));
        let d = ExactMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve_integer(&d, &ints(&[4, 9])).unwrap(), Some(ints(&[2, 3])));
        assert_eq!(solve_integer(&d, &ints(&[1, 0])).unwrap(), None);
        assert_eq!(
            solve_integer(&d, &ints(&[1])),
            Err(LatticeError::DimensionMismatch { expected: 2, found: 1 })
        );
        // overdetermined, consistent and inconsistent
        let tall = ExactMatrix::from_i64(&[&[1], &[2]]);
        assert_eq!(solve_integer(&tall, &ints(&[3, 6])).unwrap(), Some(ints(&[3])));
        assert_eq!(solve_integer(&tall, &ints(&[3, 5])).unwrap(), None);
    }
}
