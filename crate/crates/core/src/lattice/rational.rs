//! Small dense linear algebra over ℚ. Rank and span computations here back
//! the cone tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let k = rows[i][c].clone();
            let (head, tail) = if i < r {
                let (a, b) = rows.split_at_mut(r);
                (&mut a[i], &b[0])
            } else {
                let (a, b) = rows.split_at_mut(i);
                (&mut b[0], &a[r])
            };
            for (x, y) in head.iter_mut().zip(tail.iter()) {
                *x -= &k * y;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work).len()
}

/// Coefficients `c` with `Σ c_i·basis_i = v`, if `v` is in the span.
///
/// `basis` must be linearly independent for the answer to be unique.
pub fn solve_left(basis: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = v.len();
    // columns are basis vectors, augmented with v: n × (k+1)
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[j].clone()).collect();
            row.push(v[j].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![BigRational::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = aug[r][k].clone();
    }
    Some(c)
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
