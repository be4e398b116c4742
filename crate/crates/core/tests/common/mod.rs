//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

use gradval::engine::{strong_monomialize, CosetSystem, EngineConfig};
use gradval::extension::MonomialExtension;
use gradval::graded::{GradedAlgebra, GradedModule};
use gradval::lattice::ExactMatrix;
use gradval::semigroup::ValueSemigroup;

pub fn matrix(rows: &[Vec<i64>]) -> ExactMatrix {
    ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    let mut acc = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * m[0][j] as i128 * cofactor_det(&minor);
    }
    acc
}

/// Adjugate with `v·adj(m) = det·v·m⁻¹`, from cofactors.
#[allow(clippy::needless_range_loop)]
pub fn cofactor_adjugate(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = m.len();
    let mut adj = vec![vec![0i128; n]; n];
    if n == 1 {
        adj[0][0] = 1;
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * cofactor_det(&minor);
        }
    }
    adj
}

/// Row vectors of `rows`, as an `i64` matrix.
pub fn to_i64(m: &ExactMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect()
}

/// Graded module of the monomialized extension, over the semigroup of its x-values.
pub fn module_of(me: &MonomialExtension, f: u64) -> GradedModule {
    let trace = strong_monomialize(me, &EngineConfig::default()).unwrap();
    let cs = CosetSystem::build(&trace.final_form, None).unwrap();
    let fin = trace.final_form.extension();
    let sg = ValueSemigroup::new(fin.layout().clone(), fin.induced_x_values().unwrap()).unwrap();
    GradedModule::new(GradedAlgebra::new(sg, 1).unwrap(), cs, f).unwrap()
}
