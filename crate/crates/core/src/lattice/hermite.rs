use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ExactMatrix;

/// Row-style Hermite normal form of the lattice spanned by the rows of a matrix.
///
/// `basis` holds the nonzero echelon rows: pivots strictly increase, pivot
/// entries are positive and every entry above a pivot lies in `[0, pivot)`.
/// The form depends only on the row lattice, not on the generating rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub cols: usize,
    pub basis: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    /// `transform · input = [basis; 0]`, unimodular.
    pub transform: ExactMatrix,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Integer coordinates of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    /// Reduces `v` modulo the lattice so that each pivot coordinate lies in `[0, pivot)`.
    ///
    /// For a full-rank lattice this is a canonical coset representative.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut rest = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let q = rest[p].div_floor(&row[p]);
            if q.is_zero() {
                continue;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        rest
    }

    /// Rows of the transform that map the input rows to zero: a basis of the
    /// integer left kernel of the input.
    pub fn left_kernel(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.transform.rows())
            .map(|i| self.transform.row(i).to_vec())
            .collect()
    }
}

pub fn hermite_normal_form(a: &ExactMatrix) -> HermiteForm {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut t = ExactMatrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // gcd-combine every row below r into row r at column c
        for i in r + 1..m {
            if h.get(i, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_zero() {
                h.swap_rows(r, i);
                t.swap_rows(r, i);
                continue;
            }
            let a_rc = h.get(r, c).clone();
            let a_ic = h.get(i, c).clone();
            let eg = a_rc.extended_gcd(&a_ic);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = &a_rc / &g;
            let q = &a_ic / &g;
            // [x y; -q p] has determinant 1
            combine_rows(&mut h, r, i, &x, &y, &q, &p);
            combine_rows(&mut t, r, i, &x, &y, &q, &p);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            t.negate_row(r);
        }
        let piv = h.get(r, c).clone();
        for i in 0..r {
            let k = -h.get(i, c).div_floor(&piv);
            h.add_row_multiple(i, r, &k);
            t.add_row_multiple(i, r, &k);
        }
        pivots.push(c);
        r += 1;
    }
    let basis = (0..r).map(|i| h.row(i).to_vec()).collect();
    HermiteForm {
        cols: n,
        basis,
        pivots,
        transform: t,
    }
}

/// (row_r, row_i) ← (x·row_r + y·row_i, −q·row_r + p·row_i)
fn combine_rows(
    m: &mut ExactMatrix,
    r: usize,
    i: usize,
    x: &BigInt,
    y: &BigInt,
    q: &BigInt,
    p: &BigInt,
) {
    for j in 0..m.cols() {
        let a = m.get(r, j).clone();
        let b = m.get(i, j).clone();
        m.set(r, j, x * &a + y * &b);
        m.set(i, j, p * &b - q * &a);
    }
}

/// Whether two row lattices coincide.
pub fn same_row_lattice(a: &ExactMatrix, b: &ExactMatrix) -> bool {
    a.cols() == b.cols() && hermite_normal_form(a).basis == hermite_normal_form(b).basis
}

pub fn is_unimodular(m: &ExactMatrix) -> bool {
    m.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn echelon_and_transform() {
        let a = ExactMatrix::from_i64(&[&[2, 4], &[6, 8], &[4, 4]]);
        let h = hermite_normal_form(&a);
        assert_eq!(h.basis, vec![ints(&[2, 0]), ints(&[0, 4])]);
        assert!(is_unimodular(&h.transform));
        let ta = h.transform.mul(&a).unwrap();
        for i in 0..2 {
            assert_eq!(ta.row(i), h.basis[i].as_slice());
        }
        assert!(ta.row(2).iter().all(Zero::is_zero));
        for k in h.left_kernel() {
            assert!(a.vec_mul(&k).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn generator_order_does_not_matter() {
        let a = ExactMatrix::from_i64(&[&[3, 1], &[1, 2]]);
        let b = ExactMatrix::from_i64(&[&[1, 2], &[3, 1], &[4, 3]]);
        assert!(same_row_lattice(&a, &b));
        assert!(!same_row_lattice(&a, &ExactMatrix::identity(2)));
    }

    #[test]
    fn coordinates_and_reduction() {
        let h = hermite_normal_form(&ExactMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(h.coordinates(&ints(&[4, 9])), Some(ints(&[2, 3])));
        assert_eq!(h.coordinates(&ints(&[1, 0])), None);
        assert_eq!(h.reduce(&ints(&[3, 4])), ints(&[1, 1]));
        assert_eq!(h.reduce(&ints(&[-1, -1])), ints(&[1, 2]));
    }
}
