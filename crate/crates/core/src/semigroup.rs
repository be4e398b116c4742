//! Finitely generated subsemigroups of lex-ordered groups.
//!
//! Membership is decided by an exact search that runs block by block: a
//! target whose leading block is `L` can only use generators whose leading
//! block is at least `L`, and the generators leading at `L` must match the
//! `L`-component of the target exactly before the search moves on.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{ParseError, SemigroupError};
use crate::ordered::{GroupLayout, OrderedGroupElement, ValueGroup};

/// Default cap on the number of generators summed by [`semigroup_difference`].
pub const DEFAULT_MAX_TERMS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSemigroup {
    layout: Arc<GroupLayout>,
    generators: Vec<OrderedGroupElement>,
}

impl ValueSemigroup {
    /// Duplicate generators are dropped; the remaining ones are kept sorted.
    pub fn new(
        layout: Arc<GroupLayout>,
        generators: Vec<OrderedGroupElement>,
    ) -> Result<Self, SemigroupError> {
        for (index, g) in generators.iter().enumerate() {
            if *g.layout() != layout {
                return Err(crate::error::GroupError::AmbientMismatch.into());
            }
            if !g.is_positive() {
                return Err(SemigroupError::NonPositiveGenerator { index });
            }
        }
        let generators: Vec<_> = generators.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(ValueSemigroup { layout, generators })
    }

    pub fn layout(&self) -> &Arc<GroupLayout> {
        &self.layout
    }

    pub fn generators(&self) -> &[OrderedGroupElement] {
        &self.generators
    }

    /// The group generated by the semigroup.
    pub fn group(&self) -> ValueGroup {
        ValueGroup::new(self.layout.clone(), self.generators.clone()).expect("same layout")
    }

    pub fn contains(&self, g: &OrderedGroupElement) -> Result<bool, SemigroupError> {
        semigroup_membership(g, self)
    }

    /// Every element `≤ bound` that is a sum of at most `max_terms` generators.
    pub fn elements_up_to(&self, bound: &OrderedGroupElement, max_terms: usize) -> BTreeSet<OrderedGroupElement> {
        let mut out = BTreeSet::new();
        let zero = OrderedGroupElement::zero(self.layout.clone());
        if zero <= *bound {
            enumerate_sums(&self.generators, 0, zero, max_terms, bound, &mut out);
        }
        out
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, ParseError> {
        let g = ValueGroup::from_json_value(v)?;
        ValueSemigroup::new(g.layout().clone(), g.generators().to_vec())
            .map_err(|e| ParseError::Shape(e.to_string()))
    }
}

impl Serialize for ValueSemigroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.group().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueSemigroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        ValueSemigroup::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

fn enumerate_sums(
    gens: &[OrderedGroupElement],
    start: usize,
    acc: OrderedGroupElement,
    terms_left: usize,
    bound: &OrderedGroupElement,
    out: &mut BTreeSet<OrderedGroupElement>,
) {
    out.insert(acc.clone());
    if terms_left == 0 {
        return;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        let next = acc.try_add(g).expect("same layout");
        if next <= *bound {
            enumerate_sums(gens, i, next, terms_left - 1, bound, out);
        }
    }
}

/// Whether `g` is a nonnegative integer combination of the generators of `s`.
pub fn semigroup_membership(g: &OrderedGroupElement, s: &ValueSemigroup) -> Result<bool, SemigroupError> {
    if *g.layout() != s.layout {
        return Err(crate::error::GroupError::AmbientMismatch.into());
    }
    if g.signum() == std::cmp::Ordering::Less {
        return Err(SemigroupError::NegativeQuery);
    }
    Ok(member(g, &s.generators))
}

fn member(rest: &OrderedGroupElement, gens: &[OrderedGroupElement]) -> bool {
    if rest.is_zero() {
        return true;
    }
    if rest.signum() == std::cmp::Ordering::Less {
        return false;
    }
    let level = rest.leading_block();
    let leading: Vec<&OrderedGroupElement> = gens.iter().filter(|g| g.leading_block() == level).collect();
    if leading.is_empty() {
        return false;
    }
    let later: Vec<OrderedGroupElement> = gens.iter().filter(|g| g.leading_block() > level).cloned().collect();
    let weights = &rest.layout().blocks()[level];
    let target = rest.blocks()[level].clone();
    let mut found = false;
    match_block(&leading, 0, &target, weights, &mut |coeffs: &[u64]| {
        let mut r = rest.clone();
        for (g, &c) in leading.iter().zip(coeffs) {
            if c > 0 {
                r = r.try_sub(&g.scale_int(&c.into())).expect("same layout");
            }
        }
        if member(&r, &later) {
            found = true;
        }
        found
    }, &mut Vec::new());
    found
}

/// Enumerates coefficient vectors `c ≥ 0` with `Σ c_k·g_k[L] = target`;
/// `visit` returns `true` to stop the search.
fn match_block(
    gens: &[&OrderedGroupElement],
    k: usize,
    remaining: &[BigRational],
    weights: &crate::ordered::Weights,
    visit: &mut dyn FnMut(&[u64]) -> bool,
    coeffs: &mut Vec<u64>,
) -> bool {
    let level = gens[0].leading_block();
    if k + 1 == gens.len() {
        // the last coefficient is forced
        let g = &gens[k].blocks()[level];
        let pivot = g.iter().position(|x| !x.is_zero()).expect("generator leads here");
        let c = &remaining[pivot] / &g[pivot];
        if !c.is_integer() || c.is_negative() {
            return false;
        }
        if remaining.iter().zip(g).any(|(r, x)| *r != &c * x) {
            return false;
        }
        let Ok(c) = u64::try_from(c.to_integer()) else {
            return false;
        };
        coeffs.push(c);
        let stop = visit(coeffs);
        coeffs.pop();
        return stop;
    }
    let g = &gens[k].blocks()[level];
    let mut rem = remaining.to_vec();
    let mut c = 0u64;
    loop {
        coeffs.push(c);
        let stop = match_block(gens, k + 1, &rem, weights, visit, coeffs);
        coeffs.pop();
        if stop {
            return true;
        }
        for (r, x) in rem.iter_mut().zip(g) {
            *r -= x;
        }
        if weights.sign(&rem) == std::cmp::Ordering::Less {
            return false;
        }
        c += 1;
    }
}

/// Elements of `big` up to `bound` that are missing from `small`.
pub fn semigroup_difference(
    small: &ValueSemigroup,
    big: &ValueSemigroup,
    bound: &OrderedGroupElement,
) -> Result<Vec<OrderedGroupElement>, SemigroupError> {
    semigroup_difference_with(small, big, bound, DEFAULT_MAX_TERMS)
}

pub fn semigroup_difference_with(
    small: &ValueSemigroup,
    big: &ValueSemigroup,
    bound: &OrderedGroupElement,
    max_terms: usize,
) -> Result<Vec<OrderedGroupElement>, SemigroupError> {
    if small.layout != big.layout {
        return Err(crate::error::GroupError::AmbientMismatch.into());
    }
    for (index, g) in small.generators.iter().enumerate() {
        if !semigroup_membership(g, big)? {
            return Err(SemigroupError::NotASubsemigroup { index });
        }
    }
    let mut out = Vec::new();
    for x in big.elements_up_to(bound, max_terms) {
        if !semigroup_membership(&x, small)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Semigroup generated by the values of a generating sequence
/// `P_0, P_1, P_2, …`: all values positive, `ν(P_2) ≥ ν(P_1)` and
/// `ν(P_{i+1}) > ν(P_i)` for `i ≥ 2`.
pub fn generating_sequence_semigroup(values: &[OrderedGroupElement]) -> Result<ValueSemigroup, SemigroupError> {
    let Some(first) = values.first() else {
        return Err(SemigroupError::NonPositiveGenerator { index: 0 });
    };
    for (index, v) in values.iter().enumerate() {
        if !v.is_positive() {
            return Err(SemigroupError::NonPositiveGenerator { index });
        }
    }
    for i in 2..values.len() {
        let ok = if i == 2 {
            values[i] >= values[i - 1]
        } else {
            values[i] > values[i - 1]
        };
        if !ok {
            return Err(SemigroupError::NonIncreasingTail { index: i });
        }
    }
    ValueSemigroup::new(first.layout().clone(), values.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> OrderedGroupElement {
        OrderedGroupElement::from_rationals(GroupLayout::rational(1), vec![BigRational::new(p.into(), d.into())]).unwrap()
    }

    fn sg(gens: &[(i64, i64)]) -> ValueSemigroup {
        ValueSemigroup::new(GroupLayout::rational(1), gens.iter().map(|&(p, d)| q(p, d)).collect()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = sg(&[(1, 1), (5, 2)]);
        assert!(s.contains(&q(0, 1)).unwrap());
        assert!(!s.contains(&q(3, 2)).unwrap());
        assert!(s.contains(&q(7, 2)).unwrap());
        assert_eq!(s.contains(&q(-1, 1)), Err(SemigroupError::NegativeQuery));
    }

    #[test]
    fn difference_examples() {
        let s = sg(&[(1, 1), (5, 2)]);
        assert!(semigroup_difference(&s, &s, &q(10, 1)).unwrap().is_empty());
        let big = sg(&[(1, 1), (3, 2)]);
        let w = semigroup_difference(&s, &big, &q(4, 1)).unwrap();
        assert!(w.contains(&q(3, 2)));
        let w = semigroup_difference(&sg(&[(2, 1)]), &sg(&[(1, 1)]), &q(5, 1)).unwrap();
        assert_eq!(w, vec![q(1, 1), q(3, 1), q(5, 1)]);
        assert_eq!(
            semigroup_difference(&big, &s, &q(4, 1)),
            Err(SemigroupError::NotASubsemigroup { index: 1 })
        );
    }

    #[test]
    fn generating_sequences() {
        let s = generating_sequence_semigroup(&[q(1, 1)]).unwrap();
        assert!(s.contains(&q(17, 1)).unwrap());
        let s = generating_sequence_semigroup(&[q(1, 1), q(1, 1), q(5, 2)]).unwrap();
        assert_eq!(s, sg(&[(1, 1), (5, 2)]));
        let s = generating_sequence_semigroup(&[q(1, 1), q(1, 1), q(5, 2), q(11, 2)]).unwrap();
        assert!(s.contains(&q(9, 2)).unwrap());
        assert_eq!(
            generating_sequence_semigroup(&[q(1, 1), q(1, 1), q(5, 2), q(2, 1)]),
            Err(SemigroupError::NonIncreasingTail { index: 3 })
        );
        assert_eq!(
            generating_sequence_semigroup(&[q(1, 1), q(0, 1)]),
            Err(SemigroupError::NonPositiveGenerator { index: 1 })
        );
    }

    #[test]
    fn composite_rank_two() {
        let l = GroupLayout::rational(2);
        let e = |a: i64, b: i64| {
            OrderedGroupElement::from_rationals(l.clone(), vec![BigRational::from_integer(a.into()), BigRational::from_integer(b.into())])
                .unwrap()
        };
        let s = ValueSemigroup::new(l.clone(), vec![e(1, -3), e(0, 2)]).unwrap();
        assert!(s.contains(&e(2, -2)).unwrap());
        assert!(!s.contains(&e(2, -3)).unwrap());
        assert!(!s.contains(&e(0, 1)).unwrap());
        assert!(s.contains(&e(0, 4)).unwrap());
    }
}
