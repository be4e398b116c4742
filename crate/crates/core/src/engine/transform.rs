use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::encoding;
use crate::error::EngineError;
use crate::extension::{MonomialExtension, SsmForm, UnitMarker};
use crate::lattice::ExactMatrix;

/// `x_row = x'_row · ∏ x_index^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub index: usize,
    #[serde(with = "encoding::int")]
    pub exponent: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformStep {
    /// Monoidal transform on the target side: `y_(sb,sp) = y'_(sb,sp) · y_(tb,tp)`.
    STransform {
        source_block: usize,
        source_pos: usize,
        target_block: usize,
        target_pos: usize,
    },
    /// Substitution on the base side, dividing `x_row` by a monomial in the other `x`.
    RSide { row: usize, factors: Vec<Factor> },
    /// Absorbs the formal unit `unit` into `x_row`.
    Rescale { row: usize, unit: UnitMarker },
}

pub fn apply_s_transform(
    me: &MonomialExtension,
    source_block: usize,
    source_pos: usize,
    target_block: usize,
    target_pos: usize,
) -> Result<MonomialExtension, EngineError> {
    let b = me.blocks();
    if source_block >= b.r() || target_block >= b.r() {
        return Err(EngineError::IndexError(format!(
            "block index out of range (r = {})",
            b.r()
        )));
    }
    if source_pos >= b.t()[source_block] {
        return Err(EngineError::IndexError(format!(
            "position {source_pos} outside block {source_block}"
        )));
    }
    if target_pos >= b.s()[target_block] {
        return Err(EngineError::IndexError(format!(
            "target position {target_pos} is not a T-index of block {target_block}"
        )));
    }
    let src = b.global(source_block, source_pos);
    let tgt = b.global(target_block, target_pos);
    if source_block >= target_block {
        return Err(EngineError::NotAlongValuation { index: src });
    }
    let new_value = me.y_values()[src].try_sub(&me.y_values()[tgt])?;
    if !new_value.is_positive() {
        return Err(EngineError::NotAlongValuation { index: src });
    }
    let mut out = me.clone();
    let (a, _, ys) = out.parts_mut();
    for i in 0..a.rows() {
        let add = a.get(i, src).clone();
        if !add.is_zero() {
            *a.get_mut(i, tgt) += add;
        }
    }
    ys[src] = new_value;
    Ok(out)
}

pub fn apply_r_side(
    me: &MonomialExtension,
    row: usize,
    factors: &[Factor],
) -> Result<MonomialExtension, EngineError> {
    let n = me.n();
    if row >= n || factors.iter().any(|f| f.index >= n || f.index == row) {
        return Err(EngineError::IndexError(format!("invalid substitution for row {row}")));
    }
    let mut out = me.clone();
    let (a, units, _) = out.parts_mut();
    let mut unit = units[row].clone();
    for f in factors {
        for j in 0..n {
            let sub = me.exponents().get(f.index, j) * &f.exponent;
            *a.get_mut(row, j) -= sub;
        }
        unit = unit.mul(&me.units()[f.index].pow(&f.exponent).inverse());
    }
    if let Some(j) = (0..n).find(|&j| a.get(row, j).is_negative()) {
        return Err(EngineError::IndexError(format!(
            "substitution leaves a negative exponent at ({row}, {j})"
        )));
    }
    units[row] = unit;
    if !out.monomial_value(out.exponents().row(row)).is_positive() {
        return Err(EngineError::NotAlongValuation { index: row });
    }
    Ok(out)
}

pub fn apply_rescale(
    me: &MonomialExtension,
    row: usize,
    unit: &UnitMarker,
) -> Result<MonomialExtension, EngineError> {
    if row >= me.n() {
        return Err(EngineError::IndexError(format!("row {row} out of range")));
    }
    let mut out = me.clone();
    let (_, units, _) = out.parts_mut();
    units[row] = units[row].mul(&unit.inverse());
    Ok(out)
}

pub fn apply_step(me: &MonomialExtension, step: &TransformStep) -> Result<MonomialExtension, EngineError> {
    match step {
        TransformStep::STransform {
            source_block,
            source_pos,
            target_block,
            target_pos,
        } => apply_s_transform(me, *source_block, *source_pos, *target_block, *target_pos),
        TransformStep::RSide { row, factors } => apply_r_side(me, *row, factors),
        TransformStep::Rescale { row, unit } => apply_rescale(me, *row, unit),
    }
}

/// Limits for [`strong_monomialize`].
#[derive(Clone, Debug, Default)]
pub struct EngineConfig {
    /// Largest entry tried for each coordinate of `b`; defaults to `8·max|a_ij|`.
    pub exponent_bound: Option<BigInt>,
    /// Defaults to `Σ_rows (k·C + 2)` over offending rows, where `k` is the
    /// number of later T-indices and `C` the exponent bound.
    pub step_limit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomializationTrace {
    pub initial: MonomialExtension,
    pub steps: Vec<TransformStep>,
    pub final_form: SsmForm,
}

#[derive(Serialize, Deserialize)]
struct TraceRepr {
    initial: MonomialExtension,
    steps: Vec<TransformStep>,
    #[serde(rename = "final")]
    final_form: MonomialExtension,
}

impl MonomializationTrace {
    /// Applies the steps to `initial`, checking positivity after each one.
    pub fn replay(&self) -> Result<MonomialExtension, EngineError> {
        replay_steps(&self.initial, &self.steps)
    }

    pub fn verify_replay(&self) -> Result<(), EngineError> {
        let out = self.replay()?;
        if out != *self.final_form.extension() {
            return Err(EngineError::ReplayMismatch {
                step: self.steps.len(),
            });
        }
        Ok(())
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, crate::Error> {
        let repr: TraceRepr = serde_json::from_value(v.clone())
            .map_err(|e| crate::error::ParseError::Shape(e.to_string()))?;
        let final_form = SsmForm::certify(repr.final_form).map_err(EngineError::from)?;
        Ok(MonomializationTrace {
            initial: repr.initial,
            steps: repr.steps,
            final_form,
        })
    }
}

impl Serialize for MonomializationTrace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TraceRepr {
            initial: self.initial.clone(),
            steps: self.steps.clone(),
            final_form: self.final_form.extension().clone(),
        }
        .serialize(s)
    }
}

pub fn replay_steps(
    initial: &MonomialExtension,
    steps: &[TransformStep],
) -> Result<MonomialExtension, EngineError> {
    let mut cur = initial.clone();
    for step in steps {
        cur = apply_step(&cur, step)?;
        if let Err(e) = cur.induced_x_values() {
            return Err(e.into());
        }
    }
    Ok(cur)
}

/// Rewrites an extension whose rows outside `T` read `x_m = y_m·(monomial in
/// later T-variables)` into strong monomial form, recording every step.
pub fn strong_monomialize(
    me: &MonomialExtension,
    config: &EngineConfig,
) -> Result<MonomializationTrace, EngineError> {
    let violations = me.validate();
    if !violations.is_empty() {
        return Err(EngineError::NotMonomialForm(
            serde_json::to_string(&violations).expect("serializable"),
        ));
    }
    let blocks = me.blocks().clone();
    let n = me.n();
    let bound = config
        .exponent_bound
        .clone()
        .unwrap_or_else(|| me.exponents().max_abs_entry() * 8u32);

    let offending: Vec<usize> = (0..n)
        .filter(|&m| !blocks.is_t(m))
        .filter(|&m| {
            (0..n).any(|j| j != m && !me.exponents().get(m, j).is_zero()) || !me.units()[m].is_trivial()
        })
        .collect();
    let step_limit = config.step_limit.unwrap_or_else(|| {
        let c: usize = bound.clone().try_into().unwrap_or(usize::MAX / 4);
        offending
            .iter()
            .map(|&m| later_t_indices(&blocks, m).len().saturating_mul(c).saturating_add(2))
            .fold(0usize, usize::saturating_add)
    });

    let mut cur = me.clone();
    let mut steps = Vec::new();
    let mut push = |cur: &mut MonomialExtension, step: TransformStep| -> Result<(), EngineError> {
        if steps.len() >= step_limit {
            return Err(EngineError::StepBoundExceeded { limit: step_limit });
        }
        *cur = apply_step(cur, &step)?;
        cur.induced_x_values()?;
        steps.push(step);
        Ok(())
    };

    for &m in &offending {
        let later = later_t_indices(&blocks, m);
        let h: Vec<BigInt> = later.iter().map(|&q| cur.exponents().get(m, q).clone()).collect();
        if h.iter().any(|x| !x.is_zero()) {
            let a_later = cur.exponents().select(&later, &later);
            let (b, c) = find_lift(&h, &a_later, &bound)
                .ok_or_else(|| EngineError::NoNonnegativeLift {
                    row: m,
                    bound: bound.to_string(),
                })?;
            let (mb, mp) = blocks.locate(m);
            for (&q, bq) in later.iter().zip(&b) {
                let (qb, qp) = blocks.locate(q);
                let mut k = BigInt::zero();
                while &k < bq {
                    push(
                        &mut cur,
                        TransformStep::STransform {
                            source_block: mb,
                            source_pos: mp,
                            target_block: qb,
                            target_pos: qp,
                        },
                    )?;
                    k += 1;
                }
            }
            let factors = later
                .iter()
                .zip(c)
                .filter(|(_, cw)| !cw.is_zero())
                .map(|(&index, exponent)| Factor { index, exponent })
                .collect();
            push(&mut cur, TransformStep::RSide { row: m, factors })?;
        }
        if !cur.units()[m].is_trivial() {
            let unit = cur.units()[m].clone();
            push(&mut cur, TransformStep::Rescale { row: m, unit })?;
        }
    }

    let final_form = SsmForm::certify(cur)?;
    Ok(MonomializationTrace {
        initial: me.clone(),
        steps,
        final_form,
    })
}

/// T-indices of blocks strictly after the block of `m`.
fn later_t_indices(blocks: &crate::extension::BlockStructure, m: usize) -> Vec<usize> {
    let bm = blocks.block_of(m);
    (bm + 1..blocks.r())
        .flat_map(|k| blocks.t_indices_of_block(k))
        .collect()
}

/// Lexicographically smallest `b ∈ [0, bound]^k` with `(h + b)·A⁻¹` a
/// nonnegative integer vector, together with that vector.
fn find_lift(h: &[BigInt], a: &ExactMatrix, bound: &BigInt) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let k = h.len();
    let det = a.determinant().ok()?;
    if det.is_zero() {
        return None;
    }
    let adj = a.adjugate().ok()?;
    // (h + b)·adj = det·c, updated incrementally as b advances
    let mut acc = adj.vec_mul(h).ok()?;
    let mut b = vec![BigInt::zero(); k];
    loop {
        if acc.iter().all(|x| x.is_multiple_of(&det) && (x / &det).sign() != num_bigint::Sign::Minus) {
            let c = acc.iter().map(|x| x / &det).collect();
            return Some((b, c));
        }
        // odometer with the last coordinate running fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if &b[pos] < bound {
                b[pos] += 1;
                for (x, y) in acc.iter_mut().zip(adj.row(pos)) {
                    *x += y;
                }
                break;
            }
            for (x, y) in acc.iter_mut().zip(adj.row(pos)) {
                *x -= y * &b[pos];
            }
            b[pos] = BigInt::zero();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::BlockStructure;
    use crate::ordered::{GroupLayout, OrderedGroupElement};
    use num_rational::BigRational;

    fn ext(a: &[&[i64]], units: Vec<UnitMarker>) -> MonomialExtension {
        let layout = GroupLayout::rational(2);
        let q = |p: i64| BigRational::from_integer(p.into());
        let ys = [(1, 0), (1, 5), (0, 1)]
            .iter()
            .map(|&(a, b)| OrderedGroupElement::from_rationals(layout.clone(), vec![q(a), q(b)]).unwrap())
            .collect();
        MonomialExtension::new(
            layout,
            BlockStructure::new(vec![2, 1], vec![1, 1]).unwrap(),
            ExactMatrix::from_i64(a),
            units,
            ys,
        )
        .unwrap()
    }

    fn trivial() -> Vec<UnitMarker> {
        vec![UnitMarker::trivial(); 3]
    }

    #[test]
    fn s_transform_adds_columns() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]], trivial());
        let out = apply_s_transform(&me, 0, 1, 1, 0).unwrap();
        assert_eq!(*out.exponents(), ExactMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 2], &[0, 0, 1]]));
        assert_eq!(out.y_values()[1].coords()[1], BigRational::from_integer(4.into()));
        // rows with zero exponent on the source column are untouched
        assert_eq!(out.exponents().row(0), me.exponents().row(0));
        assert!(matches!(
            apply_s_transform(&me, 1, 0, 0, 0),
            Err(EngineError::NotAlongValuation { .. })
        ));
        assert!(matches!(apply_s_transform(&me, 0, 1, 1, 1), Err(EngineError::IndexError(_))));
    }

    #[test]
    fn already_strong() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], trivial());
        let tr = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        assert!(tr.steps.is_empty());
    }

    #[test]
    fn single_substitution() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]], trivial());
        let tr = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        assert_eq!(
            tr.steps,
            vec![TransformStep::RSide {
                row: 1,
                factors: vec![Factor { index: 2, exponent: 1.into() }]
            }]
        );
        assert_eq!(tr.final_form.extension().exponents(), &ExactMatrix::identity(3));
        tr.verify_replay().unwrap();
    }

    #[test]
    fn one_blowup_then_substitution() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 2]], trivial());
        let tr = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        assert_eq!(tr.steps.len(), 2);
        assert!(matches!(tr.steps[0], TransformStep::STransform { source_block: 0, source_pos: 1, target_block: 1, target_pos: 0 }));
        let fin = tr.final_form.extension();
        assert_eq!(*fin.exponents(), ExactMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]));
        assert_eq!(fin.y_values()[1].coords()[1], BigRational::from_integer(4.into()));
        tr.verify_replay().unwrap();
    }

    #[test]
    fn units_are_absorbed() {
        let mut units = trivial();
        units[1] = UnitMarker::delta(1);
        units[2] = UnitMarker::delta(2);
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]], units);
        let tr = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        assert_eq!(tr.steps.len(), 2);
        match &tr.steps[1] {
            TransformStep::Rescale { row: 1, unit } => {
                assert_eq!(*unit, UnitMarker::delta(1).mul(&UnitMarker::delta(2).inverse()))
            }
            s => panic!("unexpected {s:?}"),
        }
        let json = serde_json::to_value(&tr).unwrap();
        let back = MonomializationTrace::from_json_value(&json).unwrap();
        assert_eq!(back, tr);
        back.verify_replay().unwrap();
    }

    #[test]
    fn tampered_trace_is_detected() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 2]], trivial());
        let mut tr = strong_monomialize(&me, &EngineConfig::default()).unwrap();
        tr.steps.remove(0);
        assert!(tr.verify_replay().is_err());
    }

    #[test]
    fn tight_bound_fails() {
        let me = ext(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 2]], trivial());
        let cfg = EngineConfig {
            exponent_bound: Some(BigInt::zero()),
            step_limit: None,
        };
        assert!(matches!(
            strong_monomialize(&me, &cfg),
            Err(EngineError::NoNonnegativeLift { row: 1, .. })
        ));
    }
}
