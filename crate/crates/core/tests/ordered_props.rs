mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::{cofactor_det, q};
use gradval::ordered::{
    isolated_level, lex_compare, quadratic_sign, GroupLayout, Inclusion, IsolatedChain, OrderedGroupElement,
    ValueGroup, Weights,
};

const NON_SQUARES: [i64; 6] = [2, 3, 5, 6, 7, 10];

fn layout_strategy() -> impl Strategy<Value = Arc<GroupLayout>> {
    prop::collection::vec(prop::option::of(prop::sample::select(&NON_SQUARES[..])), 1..=3).prop_map(|ws| {
        GroupLayout::new(
            ws.into_iter()
                .map(|w| w.map_or(Weights::Rational, |d| Weights::quadratic(d).unwrap()))
                .collect(),
        )
        .unwrap()
    })
}

fn element(layout: &Arc<GroupLayout>, nums: &[(i64, i64)]) -> OrderedGroupElement {
    let coords: Vec<BigRational> = nums[..layout.dim()].iter().map(|&(p, d)| q(p, d)).collect();
    OrderedGroupElement::from_coords(layout.clone(), &coords).unwrap()
}

fn triple() -> impl Strategy<Value = (OrderedGroupElement, OrderedGroupElement, OrderedGroupElement)> {
    let nums = || prop::collection::vec((-6i64..=6, 1i64..=4), 6);
    (layout_strategy(), nums(), nums(), nums())
        .prop_map(|(l, a, b, c)| (element(&l, &a), element(&l, &b), element(&l, &c)))
}

/// `⌊√(d·10^{2k})⌋`, so `√d ∈ [s, s+1]·10^{−k}`.
fn sqrt_bracket(d: i64, digits: u32) -> BigInt {
    (BigInt::from(d) * BigInt::from(10).pow(2 * digits)).sqrt()
}

/// Sign of `p + q√d` from a 50-digit enclosure of `√d`.
fn interval_sign(p: &BigRational, qq: &BigRational, d: i64) -> Option<Ordering> {
    let scale = BigRational::from_integer(BigInt::from(10).pow(50));
    let s = BigRational::from_integer(sqrt_bracket(d, 50)) / &scale;
    let s_hi = &s + BigRational::from_integer(1.into()) / &scale;
    let (a, b) = (p + qq * &s, p + qq * &s_hi);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo.is_positive() {
        Some(Ordering::Greater)
    } else if hi.is_negative() {
        Some(Ordering::Less)
    } else if lo.is_zero() && hi.is_zero() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn order_is_total_and_translation_invariant((a, b, c) in triple()) {
        let ab = lex_compare(&a, &b).unwrap();
        prop_assert_eq!(lex_compare(&b, &a).unwrap(), ab.reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        let (ac, bc) = (a.try_add(&c).unwrap(), b.try_add(&c).unwrap());
        prop_assert_eq!(lex_compare(&ac, &bc).unwrap(), ab);
        // transitivity on the sampled triple
        if ab != Ordering::Greater && lex_compare(&b, &c).unwrap() != Ordering::Greater {
            prop_assert_ne!(lex_compare(&a, &c).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn isolated_subgroups_are_convex((a, b, _c) in triple()) {
        let chain = IsolatedChain::from_layout(a.layout());
        let zero = OrderedGroupElement::zero(a.layout().clone());
        let abs = |x: OrderedGroupElement| if x < zero { x.neg() } else { x };
        let (a, b) = (abs(a), abs(b));
        let (small, big) = if a <= b { (a, b) } else { (b, a) };
        // 0 ≤ |small| ≤ |big| and |big| ∈ Φ_i force |small| ∈ Φ_i
        let lvl_big = isolated_level(&big, &chain);
        for i in 0..=chain.rank() {
            if chain.contains(i, &big) {
                prop_assert!(chain.contains(i, &small), "level {} vs {}", lvl_big, isolated_level(&small, &chain));
            }
        }
        prop_assert_eq!(isolated_level(&zero, &chain), chain.rank());
    }

    #[test]
    fn quadratic_sign_matches_interval_oracle(
        d in prop::sample::select(&NON_SQUARES[..]),
        (pn, pd, qn, qd) in (-10_000i64..=10_000, 1i64..=500, -10_000i64..=10_000, 1i64..=500),
    ) {
        let (p, qq) = (q(pn, pd), q(qn, qd));
        let oracle = interval_sign(&p, &qq, d);
        prop_assert!(oracle.is_some(), "enclosure too wide");
        prop_assert_eq!(Some(quadratic_sign(&p, &qq, &BigInt::from(d))), oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn quadratic_sign_near_cancellation(d in prop::sample::select(&NON_SQUARES[..]), qn in -2_000i64..=2_000, nudge in -2i64..=2) {
        // p ≈ −q√d, the hardest case for floating point
        let qq = q(qn, 1);
        let approx = sqrt_bracket(d, 0) * BigInt::from(qn);
        let p = BigRational::from_integer(-approx + BigInt::from(nudge));
        let oracle = interval_sign(&p, &qq, d);
        prop_assert!(oracle.is_some());
        prop_assert_eq!(Some(quadratic_sign(&p, &qq, &BigInt::from(d))), oracle);
    }
}

fn sublattice() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(-4i64..=4, n), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_labels_match_index((n, rows) in sublattice(), scale in 1i64..=3) {
        let det = cofactor_det(&rows).abs();
        // the sampling box has det^n points
        prop_assume!(det != 0 && det.pow(n as u32) <= 2_000);
        let layout = GroupLayout::rational(n);
        let unit = |i: usize| {
            let mut c = vec![BigRational::zero(); n];
            c[i] = q(1, scale);
            OrderedGroupElement::from_coords(layout.clone(), &c).unwrap()
        };
        let big = ValueGroup::new(layout.clone(), (0..n).map(unit).collect()).unwrap();
        let small_gens = rows
            .iter()
            .map(|r| big.element_from_coordinates(&r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
            .collect();
        let small = ValueGroup::new(layout.clone(), small_gens).unwrap();
        let inc = Inclusion::new(&big, &small).unwrap();
        prop_assert_eq!(inc.index(), BigInt::from(det));

        // coefficients in [0, det)ⁿ reach every coset of the small lattice
        let mut labels = BTreeSet::new();
        let mut c = vec![0i64; n];
        loop {
            let g = big.element_from_coordinates(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
            labels.insert(inc.label(&g).unwrap());
            let mut i = 0;
            while i < n {
                c[i] += 1;
                if (c[i] as i128) < det {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        prop_assert_eq!(labels.len() as i128, det);
    }
}
