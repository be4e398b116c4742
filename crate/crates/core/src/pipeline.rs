//! End-to-end run over a scenario.
//!
//! Each stage adds named checks and a JSON section to one report. The report
//! is serialized with sorted keys and embeds the SHA-256 of the input bytes,
//! so equal inputs give byte-identical reports.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::engine::{strong_monomialize, CosetSystem, EngineConfig, MonomializationTrace, TransformStep};
use crate::error::{Error, ParseError};
use crate::extension::MonomialExtension;
use crate::graded::{GradedAlgebra, GradedModule};
use crate::ledger::{compose_tower, unramified_criterion, ExtensionRecord};
use crate::monoid::{default_box_bound, verify_disjoint_decomposition, AffineMonoid, LatticeBox, ParallelepipedBasis};
use crate::ordered::{ElementRepr, OrderedGroupElement, ValueGroup};
use crate::semigroup::{semigroup_difference, semigroup_membership, ValueSemigroup};

/// Upper limit on lattice points visited by the saturation check.
pub const MAX_BOX_POINTS: u128 = 40_000;

/// Largest `e` for which the fixed set is checked by brute force.
pub const MAX_BRUTE_FORCE_E: usize = 256;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DeclaredGroups {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<ValueGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<ValueGroup>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// The bigger semigroup has elements up to the bound that the smaller lacks.
    Growth,
    Equal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemigroupScenario {
    pub small: ValueSemigroup,
    pub big: ValueSemigroup,
    pub bound: ElementRepr,
    pub expect: Expectation,
    /// Elements that must appear among the difference witnesses.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<ElementRepr>,
    /// Elements that must not belong to the smaller semigroup.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub non_members: Vec<ElementRepr>,
    /// Whether both semigroups generate the same group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub same_group: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_groups: Option<DeclaredGroups>,
    pub monomial_extension: MonomialExtension,
    pub residue_degree: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroups: Option<SemigroupScenario>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extension_records: Vec<ExtensionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_bound: Option<u64>,
}

impl Scenario {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self, ParseError> {
        let s: Scenario = serde_json::from_slice(bytes).map_err(|e| ParseError::Shape(e.to_string()))?;
        if s.residue_degree == 0 {
            return Err(ParseError::Shape("residue_degree must be at least 1".into()));
        }
        Ok(s)
    }

    /// Canonical encoding, used as the input of generated scenarios.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    /// Overrides the scenario's box bound for the saturation check.
    pub box_bound: Option<u64>,
    pub engine: EngineConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub json: Value,
}

impl PipelineReport {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses and runs a scenario given as raw JSON bytes.
pub fn run_pipeline(input: &[u8], opts: &PipelineOptions) -> Result<PipelineReport, Error> {
    let scenario = Scenario::from_json_slice(input)?;
    Ok(run_scenario(&scenario, &sha256_hex(input), opts))
}

struct Run {
    checks: Vec<Check>,
    sections: serde_json::Map<String, Value>,
}

impl Run {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn fail_with(&mut self, stage: &str, err: Error) {
        self.check(stage, false, format!("{}: {err}", err.code()));
        self.sections.insert(
            "error".into(),
            json!({"stage": stage, "code": err.code(), "message": err.to_string()}),
        );
    }
}

pub fn run_scenario(s: &Scenario, input_hash: &str, opts: &PipelineOptions) -> PipelineReport {
    let mut run = Run {
        checks: Vec::new(),
        sections: serde_json::Map::new(),
    };
    run.sections.insert("scenario".into(), json!(s.name));
    run.sections.insert("input_sha256".into(), json!(input_hash));
    run_stages(s, opts, &mut run);
    if let Some(sg) = &s.semigroups {
        semigroup_stage(sg, &mut run);
    }
    if !s.extension_records.is_empty() {
        ledger_stage(&s.extension_records, &mut run);
    }
    let passed = run.checks.iter().all(|c| c.passed);
    run.sections.insert("checks".into(), serde_json::to_value(&run.checks).expect("serializable"));
    run.sections.insert("passed".into(), json!(passed));
    PipelineReport {
        passed,
        checks: run.checks,
        json: Value::Object(run.sections),
    }
}

fn run_stages(s: &Scenario, opts: &PipelineOptions, run: &mut Run) {
    let me = &s.monomial_extension;
    let violations = me.validate();
    run.sections.insert("validation".into(), serde_json::to_value(&violations).expect("serializable"));
    run.check(
        "validation",
        violations.is_empty(),
        format!("{} violation(s)", violations.len()),
    );
    if !violations.is_empty() {
        return;
    }

    let trace = match strong_monomialize(me, &opts.engine) {
        Ok(t) => t,
        Err(e) => return run.fail_with("monomialization", e.into()),
    };
    let replay_ok = trace.verify_replay().is_ok();
    let det_before = me.t_submatrix().determinant().expect("square").abs();
    let fin = trace.final_form.extension();
    let det_after = fin.t_submatrix().determinant().expect("square").abs();
    run.sections.insert("monomialization".into(), trace_summary(&trace, replay_ok));
    run.check(
        "monomialization",
        replay_ok && det_before == det_after,
        format!(
            "{} step(s), replay {}, |det A_T| {} -> {}",
            trace.steps.len(),
            if replay_ok { "verified" } else { "diverged" },
            det_before,
            det_after
        ),
    );

    let declared = s.value_groups.clone().unwrap_or_default();
    let cs = match CosetSystem::build(&trace.final_form, declared.star.as_ref()) {
        Ok(cs) => cs,
        Err(e) => return run.fail_with("coset_system", e.into()),
    };
    if let Some(base) = &declared.base {
        let ok = base.same_group(cs.base_group());
        run.check("declared_base_group", ok, if ok { "matches the x-values" } else { "differs from the group of the x-values" });
    }
    let e = cs.len();
    run.check(
        "coset_system",
        BigInt::from(e) == *cs.e(),
        format!("e = {}, |Λ| = {e}", cs.e()),
    );
    run.sections.insert("cosets".into(), cs.to_json_value());

    let f = s.residue_degree;
    let graded = fin
        .induced_x_values()
        .map_err(crate::error::EngineError::from)
        .map_err(Error::from)
        .and_then(|xs| ValueSemigroup::new(fin.layout().clone(), xs).map_err(Error::from))
        .and_then(|sg| GradedAlgebra::new(sg, 1).map_err(Error::from))
        .and_then(|alg| GradedModule::new(alg, cs.clone(), f).map_err(Error::from));
    let module = match graded {
        Ok(m) => m,
        Err(err) => return run.fail_with("graded_module", err),
    };
    graded_stage(&module, run);
    decomposition_stage(fin, &cs, s.box_bound.or(opts.box_bound), run);
}

fn trace_summary(trace: &MonomializationTrace, replay_ok: bool) -> Value {
    let count = |pred: fn(&TransformStep) -> bool| trace.steps.iter().filter(|s| pred(s)).count();
    json!({
        "steps": trace.steps.len(),
        "s_transforms": count(|s| matches!(s, TransformStep::STransform { .. })),
        "r_side": count(|s| matches!(s, TransformStep::RSide { .. })),
        "rescale": count(|s| matches!(s, TransformStep::Rescale { .. })),
        "replay_verified": replay_ok,
        "trace": trace,
    })
}

fn graded_stage(module: &GradedModule, run: &mut Run) {
    let cs = module.cosets();
    let f = module.residue_degree();
    let e = cs.len() as u64;
    let rank = module.free_rank();
    let mult = module.coset_multiplicities();
    let rank_ok = rank == e * f && module.basis_labels().len() as u64 == rank && mult.iter().all(|&m| m == f);
    run.check(
        "free_rank",
        rank_ok,
        format!("e·f = {e}·{f} = {}, {rank} basis label(s)", e * f),
    );
    let inv = module.invariant_part();
    let mut section = json!({
        "e": e,
        "f": f,
        "free_rank": rank,
        "coset_multiplicities": mult,
        "invariant_labels": inv.labels,
    });
    if cs.len() <= MAX_BRUTE_FORCE_E {
        let fixed = module.fixed_labels_brute_force();
        let ok = fixed == inv.labels;
        section["invariant_brute_force"] = json!(ok);
        run.check(
            "invariant_part",
            ok,
            format!("{} fixed label(s) over {} group element(s)", fixed.len(), cs.len()),
        );
    } else {
        section["invariant_brute_force"] = json!("skipped");
    }
    run.sections.insert("graded".into(), section);
}

/// Largest `B` with `B^dim ≤ MAX_BOX_POINTS`, at least 1.
fn clamp_bound(bound: u64, dim: usize) -> u64 {
    let mut b = bound.max(1);
    while b > 1 && (b as u128).checked_pow(dim as u32).is_none_or(|c| c > MAX_BOX_POINTS) {
        b -= 1;
    }
    b
}

fn decomposition_stage(fin: &MonomialExtension, cs: &CosetSystem, bound: Option<u64>, run: &mut Run) {
    let rows = fin.exponents().to_rows();
    let n = rows.len();
    let result = (|| -> Result<Value, Error> {
        let requested = match bound {
            Some(b) => b,
            None => default_box_bound(&rows)?,
        };
        let b = clamp_bound(requested, n);
        let monoid = AffineMonoid::simplicial(&rows)?;
        let basis = ParallelepipedBasis {
            points: cs.lambda().to_vec(),
            index: cs.e().clone(),
        };
        let region = LatticeBox::origin(n, b as i64);
        let rep = verify_disjoint_decomposition(&basis, &monoid, &region)?;
        let clean = rep.is_clean();
        run.check(
            "saturation_decomposition",
            clean,
            format!(
                "{} saturation point(s) in [0,{b})^{n}, {} violation(s)",
                rep.saturation_points,
                rep.violations.len()
            ),
        );
        Ok(json!({
            "requested_bound": requested,
            "bound": b,
            "points_checked": rep.points_checked,
            "saturation_points": rep.saturation_points,
            "per_coset": rep.per_coset,
            "violations": rep.violations,
        }))
    })();
    match result {
        Ok(v) => {
            run.sections.insert("decomposition".into(), v);
        }
        Err(e) => run.fail_with("saturation_decomposition", e),
    }
}

fn semigroup_stage(sg: &SemigroupScenario, run: &mut Run) {
    let result = (|| -> Result<Value, Error> {
        let layout = sg.small.layout().clone();
        let elem = |r: &ElementRepr| {
            OrderedGroupElement::from_repr(layout.clone(), r).map_err(|e| Error::from(ParseError::Shape(e.to_string())))
        };
        let bound = elem(&sg.bound)?;
        let diff = semigroup_difference(&sg.small, &sg.big, &bound)?;
        let mut ok = match sg.expect {
            Expectation::Growth => !diff.is_empty(),
            Expectation::Equal => diff.is_empty(),
        };
        let mut missing = Vec::new();
        for w in &sg.witnesses {
            let w = elem(w)?;
            if !diff.contains(&w) {
                missing.push(w.to_string());
            }
        }
        for x in &sg.non_members {
            let x = elem(x)?;
            if semigroup_membership(&x, &sg.small)? {
                missing.push(format!("{x} (member)"));
            }
        }
        ok &= missing.is_empty();
        let same = sg.small.group().same_group(&sg.big.group());
        if let Some(expected) = sg.same_group {
            ok &= same == expected;
        }
        run.check(
            "semigroups",
            ok,
            format!(
                "{} witness(es) up to {bound}, groups {}",
                diff.len(),
                if same { "equal" } else { "differ" }
            ),
        );
        Ok(json!({
            "expect": sg.expect,
            "witnesses": diff,
            "unmet": missing,
            "same_group": same,
        }))
    })();
    match result {
        Ok(v) => {
            run.sections.insert("semigroups".into(), v);
        }
        Err(e) => run.fail_with("semigroups", e),
    }
}

fn ledger_stage(records: &[ExtensionRecord], run: &mut Run) {
    let mut entries = Vec::new();
    for r in records {
        entries.push(json!({
            "record": r,
            "unramified": unramified_criterion(r).ok(),
        }));
    }
    let tower = records[1..]
        .iter()
        .try_fold(records[0].clone(), |acc, r| compose_tower(&acc, r));
    match tower {
        Ok(t) => {
            run.check("ledger", true, format!("{} record(s), composite N = {}", records.len(), t.degree));
            run.sections.insert(
                "ledger".into(),
                json!({"records": entries, "tower": t, "tower_unramified": unramified_criterion(&t).ok()}),
            );
        }
        Err(e) => run.fail_with("ledger", e.into()),
    }
}
