//! Totally ordered abelian groups of finite rank presented as lex-ordered
//! block groups.
//!
//! Elements compare exactly, including across `√d` weights. Subgroups come
//! with their isolated-subgroup chain, and an inclusion of finite index
//! yields the index together with canonical coset labels.

mod element;
mod group;

pub use element::{
    lex_compare, quadratic_sign, ElementRepr, GroupLayout, OrderedGroupElement, RationalList,
    Weights,
};
pub use group::{
    coset_label, isolated_level, subgroup_index, CosetLabel, Inclusion, IsolatedChain, ValueGroup,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GroupError;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::cmp::Ordering;
    use std::sync::Arc;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn elem(layout: &Arc<GroupLayout>, vals: &[(i64, i64)]) -> OrderedGroupElement {
        OrderedGroupElement::from_rationals(layout.clone(), vals.iter().map(|&(p, d)| q(p, d)).collect())
            .unwrap()
    }

    fn group(layout: &Arc<GroupLayout>, gens: &[&[(i64, i64)]]) -> ValueGroup {
        ValueGroup::new(layout.clone(), gens.iter().map(|g| elem(layout, g)).collect()).unwrap()
    }

    #[test]
    fn lex_examples() {
        let l2 = GroupLayout::rational(2);
        let zero = OrderedGroupElement::zero(l2.clone());
        assert_eq!(lex_compare(&zero, &zero).unwrap(), Ordering::Equal);
        let l1 = GroupLayout::rational(1);
        assert_eq!(
            lex_compare(&elem(&l1, &[(5, 2)]), &elem(&l1, &[(3, 2)])).unwrap(),
            Ordering::Greater
        );
        let a = elem(&l2, &[(0, 1), (1, 1)]);
        let b = elem(&l2, &[(1, 1), (-100, 1)]);
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&a, &elem(&l1, &[(1, 1)])), Err(GroupError::AmbientMismatch));
    }

    #[test]
    fn quadratic_block_signs() {
        let d = BigInt::from(2);
        // 3 − 2√2 ≈ 0.17 > 0, 1 − √2 < 0, −3 + 2√2 < 0
        assert_eq!(quadratic_sign(&q(3, 1), &q(-2, 1), &d), Ordering::Greater);
        assert_eq!(quadratic_sign(&q(1, 1), &q(-1, 1), &d), Ordering::Less);
        assert_eq!(quadratic_sign(&q(-3, 1), &q(2, 1), &d), Ordering::Less);
        assert_eq!(quadratic_sign(&q(0, 1), &q(0, 1), &d), Ordering::Equal);
        let layout = GroupLayout::new(vec![Weights::quadratic(2).unwrap()]).unwrap();
        let x = OrderedGroupElement::new(layout.clone(), vec![vec![q(7, 5), q(0, 1)]]).unwrap();
        let y = OrderedGroupElement::new(layout, vec![vec![q(0, 1), q(1, 1)]]).unwrap();
        // 1.4 < √2
        assert_eq!(lex_compare(&x, &y).unwrap(), Ordering::Less);
        assert!(Weights::quadratic(4).is_err());
        assert!(Weights::quadratic(1).is_err());
    }

    #[test]
    fn levels() {
        let l2 = GroupLayout::rational(2);
        let chain = IsolatedChain::from_layout(&l2);
        assert_eq!(isolated_level(&OrderedGroupElement::zero(l2.clone()), &chain), 2);
        assert_eq!(isolated_level(&elem(&l2, &[(0, 1), (5, 1)]), &chain), 1);
        assert_eq!(isolated_level(&elem(&l2, &[(3, 1), (0, 1)]), &chain), 0);
    }

    #[test]
    fn chain_requires_every_block() {
        let l2 = GroupLayout::rational(2);
        let g = group(&l2, &[&[(1, 1), (0, 1)]]);
        assert!(IsolatedChain::of(&g).is_err());
        let g = group(&l2, &[&[(1, 1), (3, 1)], &[(0, 1), (1, 2)]]);
        assert_eq!(g.rational_ranks(), vec![1, 1]);
        assert_eq!(IsolatedChain::of(&g).unwrap().rank(), 2);
    }

    #[test]
    fn index_examples() {
        let l1 = GroupLayout::rational(1);
        let z = group(&l1, &[&[(1, 1)]]);
        let two_z = group(&l1, &[&[(2, 1)]]);
        assert_eq!(subgroup_index(&z, &two_z).unwrap(), BigInt::from(2));
        let half_z = group(&l1, &[&[(1, 2)]]);
        assert_eq!(subgroup_index(&half_z, &z).unwrap(), BigInt::from(2));
        let l2 = GroupLayout::rational(2);
        let big = group(&l2, &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let small = group(&l2, &[&[(2, 1), (0, 1)], &[(0, 1), (3, 1)]]);
        assert_eq!(subgroup_index(&big, &small).unwrap(), BigInt::from(6));
        assert_eq!(subgroup_index(&z, &half_z), Err(GroupError::NotASubgroup { index: 0 }));
        let line = group(&l2, &[&[(1, 1), (0, 1)]]);
        assert_eq!(subgroup_index(&big, &line), Err(GroupError::InfiniteIndex));
    }

    #[test]
    fn label_examples() {
        let l1 = GroupLayout::rational(1);
        let z = group(&l1, &[&[(1, 1)]]);
        let half_z = group(&l1, &[&[(1, 2)]]);
        let lab = coset_label(&elem(&l1, &[(3, 2)]), &half_z, &z).unwrap();
        assert_eq!(lab.representative, elem(&l1, &[(1, 2)]));
        let lab0 = coset_label(&elem(&l1, &[(7, 1)]), &half_z, &z).unwrap();
        assert!(lab0.representative.is_zero());

        let l2 = GroupLayout::rational(2);
        let big = group(&l2, &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let small = group(&l2, &[&[(2, 1), (0, 1)], &[(0, 1), (3, 1)]]);
        let inc = Inclusion::new(&big, &small).unwrap();
        let lab = inc.label(&elem(&l2, &[(3, 1), (4, 1)])).unwrap();
        assert_eq!(lab.representative, elem(&l2, &[(1, 1), (1, 1)]));
        assert_eq!(inc.invariants(), vec![BigInt::from(6)]);
        assert_eq!(
            inc.label(&elem(&l2, &[(1, 2), (0, 1)])),
            Err(GroupError::NotInGroup)
        );
    }

    #[test]
    fn json_shape() {
        let v: serde_json::Value = serde_json::from_str(
            r#"{"rank":2,"blocks":[{"weights":["1"]},{"weights":["1","sqrt(3)"]}],
                "generators":[[["1/2"],["0","1"]],[["0"],["1","0"]],[["0"],["0","1"]]]}"#,
        )
        .unwrap();
        let g = ValueGroup::from_json_value(&v).unwrap();
        assert_eq!(g.rational_ranks(), vec![1, 2]);
        assert_eq!(g.free_rank(), 3);
        let back = serde_json::to_value(&g).unwrap();
        assert_eq!(back, v);
        let bad: serde_json::Value =
            serde_json::from_str(r#"{"rank":1,"blocks":[{"weights":["1","sqrt(9)"]}],"generators":[]}"#)
                .unwrap();
        assert!(ValueGroup::from_json_value(&bad).is_err());
    }
}
