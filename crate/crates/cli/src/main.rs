//! `gradval` command line front end.
//!
//! Every subcommand reads one JSON document (from `--in`, or standard input),
//! writes JSON to standard output (or `--out`) and a short summary to standard
//! error. The exit status is 1 when a check fails or the data violates a
//! hypothesis, and 2 on usage and parse errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gradval::corpus;
use gradval::engine::{strong_monomialize, CosetSystem, EngineConfig, MonomializationTrace};
use gradval::error::ParseError;
use gradval::extension::{MonomialExtension, SsmForm};
use gradval::graded::{GradedAlgebra, GradedModule, TermRecord};
use gradval::lattice::{lattice_index, quotient_invariants, smith_normal_form, ExactMatrix};
use gradval::ledger::{compose_tower, unramified_criterion, ExtensionRecord};
use gradval::ordered::{ElementRepr, OrderedGroupElement, ValueGroup};
use gradval::pipeline::{run_pipeline, sha256_hex, PipelineOptions};
use gradval::semigroup::{semigroup_difference, semigroup_membership, ValueSemigroup};
use gradval::Error;

#[derive(Parser)]
#[command(name = "gradval", version, about = "Exact value-group, monoid and graded-module computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Input JSON file; standard input when omitted.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write compact single-line JSON instead of pretty-printed JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Smith normal form of an integer matrix.
    Snf(Io),
    /// Coset representatives of the base value group in the extended one.
    Cosets(Io),
    /// Strong monomialization of monomial extension data, as a replayable trace.
    Monomialize(Io),
    /// Free graded-module decomposition and its invariant part.
    Graded(Io),
    /// Membership, differences and generated groups of value semigroups.
    Semigroup(Io),
    /// Ostrowski defects, tower composition and the unramified criterion.
    Ledger(Io),
    /// Full run over a scenario, or re-verification of a trace.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Scenario file or the name of a bundled scenario or random generator.
    #[arg(long, value_name = "PATH|NAME", conflicts_with_all = ["replay", "input"])]
    scenario: Option<String>,
    /// Re-verify a monomialization trace instead of running a scenario.
    #[arg(long, value_name = "TRACE")]
    replay: Option<PathBuf>,
    /// Seed for the random generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Box bound for the saturation check.
    #[arg(long)]
    box_bound: Option<u64>,
    #[command(flatten)]
    io: Io,
}

enum Failure {
    Usage(String),
    Parse(String),
    Module(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::Parse(p.to_string()),
            other => Failure::Module(other),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

struct Outcome {
    passed: bool,
    body: Value,
    summary: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let io = match &cli.command {
        Command::Snf(io)
        | Command::Cosets(io)
        | Command::Monomialize(io)
        | Command::Graded(io)
        | Command::Semigroup(io)
        | Command::Ledger(io) => io.clone(),
        Command::Pipeline(p) => p.io.clone(),
    };
    let result = match &cli.command {
        Command::Snf(io) => read_json(io).and_then(|v| snf(&v)),
        Command::Cosets(io) => read_json(io).and_then(|v| cosets(&v)),
        Command::Monomialize(io) => read_json(io).and_then(|v| monomialize(&v)),
        Command::Graded(io) => read_json(io).and_then(|v| graded(&v)),
        Command::Semigroup(io) => read_json(io).and_then(|v| semigroup(&v)),
        Command::Ledger(io) => read_json(io).and_then(|v| ledger(&v)),
        Command::Pipeline(p) => pipeline(p),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&io, &out.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            eprintln!("{}", out.summary);
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Module(e)) => {
            let body = json!({"error": {"code": e.code(), "message": e.to_string()}});
            let _ = emit(&io, &body);
            eprintln!("{}: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

fn render(io: &Io, v: &Value) -> String {
    let mut s = if io.json {
        serde_json::to_string(v)
    } else {
        serde_json::to_string_pretty(v)
    }
    .expect("serializable");
    s.push('\n');
    s
}

fn emit(io: &Io, v: &Value) -> io::Result<()> {
    let text = render(io, v);
    match &io.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn read_bytes(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) => fs::read(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn parse_json(bytes: &[u8], origin: &str) -> Result<Value, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::Parse(format!("{origin}: {e}")))
}

fn read_json(io: &Io) -> Result<Value, Failure> {
    let origin = io.input.as_ref().map_or("<stdin>".to_string(), |p| p.display().to_string());
    parse_json(&read_bytes(io.input.as_deref())?, &origin)
}

fn shape<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v.clone()).map_err(|e| Failure::Parse(format!("{what}: {e}")))
}

/// The extension is either the whole document or its `monomial_extension` field.
fn extension_of(v: &Value) -> Result<MonomialExtension, Failure> {
    let inner = v.get("monomial_extension").unwrap_or(v);
    Ok(MonomialExtension::from_json_value(inner)?)
}

fn declared_star(v: &Value) -> Result<Option<ValueGroup>, Failure> {
    match v.get("value_groups").and_then(|g| g.get("star")) {
        Some(s) => Ok(Some(ValueGroup::from_json_value(s)?)),
        None => Ok(None),
    }
}

fn snf(v: &Value) -> Result<Outcome, Failure> {
    let m: ExactMatrix = shape(v.get("matrix").unwrap_or(v), "matrix")?;
    let dec = smith_normal_form(&m);
    let diag = dec.diagonal();
    let mut body = json!({
        "U": dec.u,
        "D": dec.d,
        "V": dec.v,
        "diagonal": diag.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "rank": dec.rank(),
    });
    let mut summary = format!("{}x{} matrix of rank {}", m.rows(), m.cols(), dec.rank());
    if m.is_square() && dec.rank() == m.rows() {
        let inv = quotient_invariants(&m).map_err(Error::from)?;
        let index = lattice_index(&m).map_err(Error::from)?;
        body["quotient_invariants"] = json!(inv.iter().map(ToString::to_string).collect::<Vec<_>>());
        body["index"] = json!(index.to_string());
        summary.push_str(&format!(", index {index}"));
    }
    Ok(Outcome {
        passed: true,
        body,
        summary,
    })
}

fn cosets(v: &Value) -> Result<Outcome, Failure> {
    let me = extension_of(v)?;
    let star = declared_star(v)?;
    let ssm = SsmForm::certify(me).map_err(|e| Error::from(gradval::error::EngineError::from(e)))?;
    let cs = CosetSystem::build(&ssm, star.as_ref()).map_err(Error::from)?;
    let summary = format!(
        "e = {}, invariants [{}], {} representative(s)",
        cs.e(),
        cs.invariants().iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
        cs.len()
    );
    Ok(Outcome {
        passed: true,
        body: cs.to_json_value(),
        summary,
    })
}

fn monomialize(v: &Value) -> Result<Outcome, Failure> {
    let me = extension_of(v)?;
    let trace = strong_monomialize(&me, &EngineConfig::default()).map_err(Error::from)?;
    let summary = format!("{} step(s) to strong monomial form", trace.steps.len());
    Ok(Outcome {
        passed: true,
        body: serde_json::to_value(&trace).expect("serializable"),
        summary,
    })
}

fn graded(v: &Value) -> Result<Outcome, Failure> {
    let me = extension_of(v)?;
    let f = v.get("residue_degree").map_or(Ok(1), |x| shape::<u64>(x, "residue_degree"))?;
    if f == 0 {
        return Err(Failure::Parse("residue_degree must be at least 1".into()));
    }
    let star = declared_star(v)?;
    let module = (|| -> Result<GradedModule, Error> {
        let trace = strong_monomialize(&me, &EngineConfig::default())?;
        let cs = CosetSystem::build(&trace.final_form, star.as_ref())?;
        let fin = trace.final_form.extension();
        let xs = fin.induced_x_values().map_err(gradval::error::EngineError::from)?;
        let sg = ValueSemigroup::new(fin.layout().clone(), xs)?;
        Ok(GradedModule::new(GradedAlgebra::new(sg, 1)?, cs, f)?)
    })()?;
    let inv = module.invariant_part();
    let fixed = module.fixed_labels_brute_force();
    let labels: Vec<Value> = module
        .basis_labels()
        .into_iter()
        .map(|l| json!({"label": l, "value": module.label_value(l)}))
        .collect();
    let passed = fixed == inv.labels;
    let mut body = json!({
        "e": module.cosets().len(),
        "f": f,
        "free_rank": module.free_rank(),
        "basis": labels,
        "coset_multiplicities": module.coset_multiplicities(),
        "invariant_labels": inv.labels,
        "invariant_rank": inv.rank,
        "invariant_brute_force": passed,
    });
    if let Some(el) = v.get("element") {
        let records: Vec<TermRecord> = shape(el, "element")?;
        let x = module.element_from_records(&records).map_err(Error::from)?;
        let value = module.element_value(&x).map_err(Error::from)?;
        let parts: Vec<Value> = module
            .expand(&x)
            .into_iter()
            .map(|(sigma, part)| json!({"sigma": sigma, "terms": module.element_to_records(&part)}))
            .collect();
        let projected = module.project_invariant(&x);
        body["element"] = json!({
            "value": value,
            "components": parts,
            "invariant_projection": module.element_to_records(&projected),
        });
    }
    let summary = format!(
        "rank e·f = {}·{f} = {}, invariant rank {}{}",
        module.cosets().len(),
        module.free_rank(),
        inv.rank,
        if passed { "" } else { " (brute-force fixed set differs)" }
    );
    Ok(Outcome { passed, body, summary })
}

fn semigroup(v: &Value) -> Result<Outcome, Failure> {
    let field = |k: &str| v.get(k).ok_or_else(|| Failure::Parse(format!("missing field `{k}`")));
    let small: ValueSemigroup = shape(field("small")?, "small")?;
    let layout = small.layout().clone();
    let elem = |x: &Value, what: &str| -> Result<OrderedGroupElement, Failure> {
        let repr: ElementRepr = shape(x, what)?;
        OrderedGroupElement::from_repr(layout.clone(), &repr).map_err(|e| Failure::Parse(format!("{what}: {e}")))
    };
    let mut body = json!({"small": small});
    let mut summary = format!("{} generator(s)", small.generators().len());
    if let Some(qs) = v.get("members") {
        let qs: Vec<Value> = shape(qs, "members")?;
        let mut out = Vec::new();
        for q in &qs {
            let g = elem(q, "members")?;
            let m = semigroup_membership(&g, &small).map_err(Error::from)?;
            out.push(json!({"element": g, "member": m}));
        }
        summary.push_str(&format!(", {} membership result(s)", out.len()));
        body["members"] = json!(out);
    }
    if let Some(big) = v.get("big") {
        let big: ValueSemigroup = shape(big, "big")?;
        let same = small.group().same_group(&big.group());
        body["big"] = json!(big);
        body["same_group"] = json!(same);
        if let Some(b) = v.get("bound") {
            let bound = elem(b, "bound")?;
            let diff = semigroup_difference(&small, &big, &bound).map_err(Error::from)?;
            summary.push_str(&format!(", {} element(s) of the difference up to {bound}", diff.len()));
            body["difference"] = json!(diff);
        }
        summary.push_str(if same { ", same group" } else { ", different groups" });
    }
    Ok(Outcome {
        passed: true,
        body,
        summary,
    })
}

fn ledger(v: &Value) -> Result<Outcome, Failure> {
    let records: Vec<ExtensionRecord> = shape(v.get("records").unwrap_or(v), "records")?;
    if records.is_empty() {
        return Err(Failure::Parse("records: expected at least one record".into()));
    }
    let entries: Vec<Value> = records
        .iter()
        .map(|r| json!({"record": r, "unramified": unramified_criterion(r).ok()}))
        .collect();
    let tower = records[1..]
        .iter()
        .try_fold(records[0].clone(), |acc, r| compose_tower(&acc, r))
        .map_err(Error::from)?;
    let summary = format!(
        "{} record(s), composite N = {} = {}·{}·{}^{}",
        records.len(),
        tower.degree,
        tower.e,
        tower.f,
        tower.p,
        tower.delta
    );
    Ok(Outcome {
        passed: true,
        body: json!({
            "records": entries,
            "tower": tower,
            "tower_unramified": unramified_criterion(&tower).ok(),
        }),
        summary,
    })
}

fn scenario_bytes(arg: &str, seed: u64) -> Result<(Vec<u8>, String), Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok((read_bytes(Some(path))?, arg.to_string()));
    }
    let name = arg.strip_suffix(".json").unwrap_or(arg);
    let name = name.rsplit('/').next().unwrap_or(name);
    if let Some(text) = corpus::bundled_scenario(name) {
        return Ok((text.as_bytes().to_vec(), format!("bundled:{name}")));
    }
    if let Some(s) = corpus::random_scenario(name, seed) {
        return Ok((s.to_canonical_json().into_bytes(), format!("{name}:{seed}")));
    }
    let known: Vec<&str> = corpus::bundled()
        .iter()
        .map(|(n, _)| *n)
        .chain(corpus::RANDOM_KINDS.iter().copied())
        .collect();
    Err(Failure::Usage(format!(
        "no scenario file `{arg}` and no bundled or random scenario of that name (known: {})",
        known.join(", ")
    )))
}

fn pipeline(args: &PipelineArgs) -> Result<Outcome, Failure> {
    if let Some(trace_path) = &args.replay {
        return replay(trace_path);
    }
    let (bytes, origin) = match &args.scenario {
        Some(s) => scenario_bytes(s, args.seed)?,
        None => {
            let origin = args.io.input.as_ref().map_or("<stdin>".into(), |p| p.display().to_string());
            (read_bytes(args.io.input.as_deref())?, origin)
        }
    };
    parse_json(&bytes, &origin)?;
    let opts = PipelineOptions {
        box_bound: args.box_bound,
        engine: EngineConfig::default(),
    };
    let report = run_pipeline(&bytes, &opts).map_err(|e| match e {
        Error::Parse(p) => Failure::Parse(format!("{origin}: {p}")),
        other => Failure::Module(other),
    })?;
    let mut summary = String::new();
    for c in &report.checks {
        summary.push_str(&format!("[{}] {}: {}\n", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail));
    }
    summary.push_str(&format!("{origin}: {}", if report.passed { "all checks passed" } else { "checks failed" }));
    Ok(Outcome {
        passed: report.passed,
        body: report.json,
        summary,
    })
}

fn replay(path: &Path) -> Result<Outcome, Failure> {
    let bytes = read_bytes(Some(path))?;
    let v = parse_json(&bytes, &path.display().to_string())?;
    let trace = MonomializationTrace::from_json_value(&v)?;
    let result = trace.verify_replay();
    let passed = result.is_ok();
    let mut body = json!({
        "input_sha256": sha256_hex(&bytes),
        "steps": trace.steps.len(),
        "replay_verified": passed,
    });
    if let Err(e) = &result {
        let e = Error::from(e.clone());
        body["error"] = json!({"code": e.code(), "message": e.to_string()});
    }
    let summary = format!(
        "{}: {} step(s), replay {}",
        path.display(),
        trace.steps.len(),
        if passed { "verified" } else { "diverged" }
    );
    Ok(Outcome { passed, body, summary })
}
