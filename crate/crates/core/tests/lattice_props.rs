mod common;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::{cofactor_adjugate, cofactor_det, ints, matrix};
use gradval::lattice::{is_unimodular, lattice_index, smith_normal_form, solve_integer};

fn square(max_n: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(-bound..=bound, n), n))
}

fn rect(max_n: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n, 1..=max_n)
        .prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_certificate(rows in rect(6, 20)) {
        let a = matrix(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(is_unimodular(&s.u));
        prop_assert!(is_unimodular(&s.v));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|d| !d.is_negative()));
        for w in diag.windows(2) {
            // d_i | d_{i+1}, with 0 dividing only 0
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn smith_product_is_cofactor_determinant(rows in square(6, 20)) {
        let s = smith_normal_form(&matrix(&rows));
        let prod: BigInt = s.diagonal().iter().product();
        prop_assert_eq!(prod, BigInt::from(cofactor_det(&rows).abs()));
    }

    #[test]
    fn solve_integer_recovers_images(rows in rect(5, 9), seed in prop::collection::vec(-9i64..=9, 5)) {
        let a = matrix(&rows);
        let x = ints(&seed[..a.cols()]);
        let b = a.mul_vec(&x).unwrap();
        let y = solve_integer(&a, &b).unwrap();
        prop_assert!(y.is_some());
        prop_assert_eq!(a.mul_vec(&y.unwrap()).unwrap(), b);
    }
}

/// Number of classes of ℤⁿ modulo the row lattice of `m`, counted over the
/// box `[0, |det|)ⁿ`. `v` and `w` are equivalent iff `(v − w)·adj ≡ 0 mod det`.
fn brute_force_index(m: &[Vec<i64>]) -> usize {
    let n = m.len();
    let det = cofactor_det(m);
    let adj = cofactor_adjugate(m);
    let d = det.abs();
    let mut seen = HashSet::new();
    let mut v = vec![0i128; n];
    loop {
        let key: Vec<i128> = (0..n)
            .map(|j| (0..n).map(|i| v[i] * adj[i][j]).sum::<i128>().rem_euclid(d))
            .collect();
        seen.insert(key);
        let mut i = 0;
        loop {
            if i == n {
                return seen.len();
            }
            v[i] += 1;
            if v[i] < d {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_index_counts_residues(rows in square(3, 5)) {
        let det = cofactor_det(&rows).abs();
        prop_assume!(det != 0 && det <= 60);
        let idx = lattice_index(&matrix(&rows)).unwrap();
        prop_assert_eq!(idx, BigInt::from(brute_force_index(&rows)));
    }
}

#[test]
fn singular_matrices_have_no_index() {
    assert!(lattice_index(&matrix(&[vec![1, 2], vec![2, 4]])).is_err());
}
