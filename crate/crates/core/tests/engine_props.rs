mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use gradval::corpus::{random_monomial_input, random_ssm_extension, rng, ExtensionShape};
use gradval::engine::{apply_step, strong_monomialize, CosetSystem, EngineConfig};
use gradval::extension::MonomialExtension;
use gradval::lattice::rational::rank;
use gradval::lattice::ExactMatrix;
use gradval::ordered::{isolated_level, Inclusion, IsolatedChain};

fn ssm(seed: u64) -> MonomialExtension {
    random_ssm_extension(&mut rng(seed), &ExtensionShape::default())
}

fn monomial_input(seed: u64) -> MonomialExtension {
    random_monomial_input(&mut rng(seed), &ExtensionShape::default(), 3)
}

fn abs_det(m: &ExactMatrix) -> BigInt {
    m.determinant().unwrap().abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn y_values_sit_at_their_block_level(seed in any::<u64>()) {
        let me = ssm(seed);
        prop_assert!(me.validate().is_empty());
        let chain = IsolatedChain::from_layout(me.layout());
        for (j, y) in me.y_values().iter().enumerate() {
            prop_assert_eq!(isolated_level(y, &chain), me.blocks().block_of(j));
        }
    }

    #[test]
    fn adjoint_relations_invert_the_t_block(seed in any::<u64>()) {
        let me = ssm(seed);
        let rel = me.adjoint_relations().unwrap();
        let a_t = me.t_submatrix();
        let k = a_t.rows();
        let scaled = ExactMatrix::diagonal(&vec![rel.e.clone(); k]);
        prop_assert_eq!(a_t.mul(&rel.b).unwrap(), scaled.clone());
        prop_assert_eq!(rel.b.mul(&a_t).unwrap(), scaled);
        prop_assert_eq!(rel.e, abs_det(&a_t));
    }

    #[test]
    fn t_values_stay_independent(seed in any::<u64>()) {
        let me = ssm(seed);
        let t = me.blocks().t_set();
        let ys: Vec<_> = t.iter().map(|&i| me.y_values()[i].coords()).collect();
        prop_assume!(rank(&ys) == t.len());
        let xs = me.induced_x_values().unwrap();
        let xt: Vec<_> = t.iter().map(|&i| xs[i].coords()).collect();
        prop_assert_eq!(rank(&xt), t.len());
    }

    #[test]
    fn replay_is_bit_exact(seed in any::<u64>()) {
        let me = monomial_input(seed);
        let trace = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        prop_assert_eq!(trace.replay().unwrap(), trace.final_form.extension().clone());
        let again = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        prop_assert_eq!(again, trace);
    }

    #[test]
    fn every_step_keeps_values_positive_and_groups_fixed(seed in any::<u64>()) {
        let me = monomial_input(seed);
        let trace = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        let (star, base) = (me.star_group(), me.base_group());
        let det = abs_det(&me.t_submatrix());
        let mut cur = me.clone();
        for step in &trace.steps {
            cur = apply_step(&cur, step).unwrap();
            prop_assert!(cur.y_values().iter().all(|y| y.is_positive()));
            prop_assert!(cur.induced_x_values().unwrap().iter().all(|x| x.is_positive()));
            prop_assert!(cur.star_group().same_group(&star));
            prop_assert!(cur.base_group().same_group(&base));
            prop_assert_eq!(abs_det(&cur.t_submatrix()), det.clone());
        }
    }

    #[test]
    fn representatives_hit_each_coset_once(seed in any::<u64>()) {
        let me = monomial_input(seed);
        let trace = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        let cs = CosetSystem::build(&trace.final_form, None).unwrap();
        let values: BTreeSet<_> = cs.values().iter().cloned().collect();
        prop_assert_eq!(values.len(), cs.len());
        let inc = Inclusion::new(cs.star_group(), cs.base_group()).unwrap();
        let labels: BTreeSet<_> = cs.values().iter().map(|v| inc.label(v).unwrap()).collect();
        prop_assert_eq!(BigInt::from(labels.len()), inc.index());
        prop_assert_eq!(BigInt::from(cs.len()), cs.e().clone());
        let lambda: BTreeSet<Vec<i64>> = cs
            .lambda()
            .iter()
            .map(|s| s.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect();
        prop_assert_eq!(lambda.len(), cs.len());
        // each representative value is the value of the monomial y^σ
        prop_assert!(cs.values().iter().zip(cs.lambda()).all(|(v, s)| *v == trace.final_form.extension().monomial_value(s)));
    }
}
