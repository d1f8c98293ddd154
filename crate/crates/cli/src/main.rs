//! Command-line front end: every subcommand is a thin adapter around one
//! library call, with a human-readable report on stdout and an optional
//! machine-readable JSON result file.
//!
//! Exit codes: 0 success, 2 invalid input, 3 negative mathematical verdict
//! (incompatible states, undefined pooling, obstructed joint, failed check
//! suite), 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use condstates::compat::{bfm_compatible, objective_witness, subjective_witness};
use condstates::conditional::{conditional_from_joint, JointState};
use condstates::entropy::{conditional_mutual_information, is_conditionally_independent};
use condstates::hybrid::HybridState;
use condstates::improve::improve_shared_prior;
use condstates::io::{
    build_scenario, load_operator, load_scenario, matrix_to_data, OperatorFile, OPERATOR_SCHEMA,
    SCENARIO_SCHEMA,
};
use condstates::pool::{pool_linear, pool_multiplicative, pool_supra, PoolWeights};
use condstates::scenario::joint_state_obstruction;
use condstates::suffstat::minimal_sufficient_statistic;
use condstates::suites::{run_suite, SuiteConfig, SUITE_NAMES};
use condstates::{Error, Tolerance};

const EXIT_INVALID: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "condstates", version, about = "Operator-valued conditional probability toolkit")]
struct Cli {
    /// Write a machine-readable JSON result here.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Condition a joint state: on classical outcomes (--on X=0) or on
    /// regions (--given A), producing a conditional state.
    Condition {
        /// Operator or scenario file holding the joint state.
        input: PathBuf,
        /// Classical assignments like X=0; may repeat.
        #[arg(long = "on")]
        on: Vec<String>,
        /// Region ids to condition on, comma-separated.
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Decide whether two states could describe the same system, optionally
    /// constructing a witness.
    Compat {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        witness: Option<WitnessKind>,
    },
    /// Von Neumann entropy of a state, in bits.
    Entropy { input: PathBuf },
    /// Conditional mutual information I(A;B|C) in bits.
    Cmi {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<String>,
    },
    /// Minimal sufficient statistic of a classical-quantum scenario.
    Suffstat { input: PathBuf },
    /// Improve an announced state using a scenario the announcer observed.
    Improve {
        scenario: PathBuf,
        #[arg(long)]
        announced: PathBuf,
    },
    /// Pool several agents' states into one.
    Pool {
        #[arg(long, value_enum)]
        rule: PoolRule,
        /// Operator files (linear/multiplicative) or one scenario file (supra).
        inputs: Vec<PathBuf>,
        /// Weights for --rule linear, comma-separated.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        /// Shared prior operator file for --rule multiplicative.
        #[arg(long)]
        prior: Option<PathBuf>,
        /// First observed assignment for --rule supra, like X1=0.
        #[arg(long)]
        first: Option<String>,
        /// Second observed assignment for --rule supra, like X2=1.
        #[arg(long)]
        second: Option<String>,
    },
    /// Scenario operations.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Run a named randomized self-check suite (or `all`).
    Check {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest quantum dimension the generators draw.
        #[arg(long, default_value_t = 3)]
        dims: usize,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Build a scenario spec file into a joint state.
    Build { spec: PathBuf },
    /// Certify whether two single-variable scenarios admit a common joint.
    Obstruct {
        spec1: PathBuf,
        spec2: PathBuf,
        /// Classical variable of the first scenario to keep (marginalizing
        /// the rest); required when it has several.
        #[arg(long)]
        keep1: Option<String>,
        #[arg(long)]
        keep2: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Objective,
    Subjective,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolRule {
    Linear,
    Multiplicative,
    Supra,
}

struct Failure {
    code: u8,
    message: String,
    /// Machine-readable detail to write even though the command failed
    /// (e.g. an obstruction certificate).
    result: Option<Value>,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into(), result: None }
    }

    fn negative(message: impl Into<String>) -> Self {
        Self { code: EXIT_NEGATIVE, message: message.into(), result: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Incompatible | Error::NoMatchingBranch | Error::PoolingUndefined(_) => {
                EXIT_NEGATIVE
            }
            _ => EXIT_INVALID,
        };
        Self { code, message: e.to_string(), result: None }
    }
}

fn env_f64(var: &str) -> Result<Option<f64>, Failure> {
    match std::env::var(var) {
        Err(_) => Ok(None),
        Ok(text) => {
            let v: f64 = text
                .parse()
                .map_err(|_| Failure::invalid(format!("{var} is not a number: `{text}`")))?;
            if !(v > 0.0 && v < 1.0) {
                return Err(Failure::invalid(format!("{var} must lie in (0, 1), got {v}")));
            }
            Ok(Some(v))
        }
    }
}

/// Tolerances, overridable through `CONDSTATES_EIG_CUT` and
/// `CONDSTATES_EQ_TOL`.
fn tolerance() -> Result<Tolerance, Failure> {
    let mut tol = Tolerance::default();
    if let Some(v) = env_f64("CONDSTATES_EIG_CUT")? {
        tol.eig_cut = v;
    }
    if let Some(v) = env_f64("CONDSTATES_EQ_TOL")? {
        tol.eq_tol = v;
    }
    Ok(tol)
}

/// Load a state from either file kind; scenario joints are assembled.
fn load_state(path: &Path, tol: &Tolerance) -> Result<JointState, Failure> {
    Ok(load_hybrid_or_state(path, tol)?.1)
}

fn load_hybrid(path: &Path, tol: &Tolerance) -> Result<HybridState, Failure> {
    match load_hybrid_or_state(path, tol)?.0 {
        Some(h) => Ok(h),
        None => Err(Failure::invalid(format!(
            "{} holds no classical variables to treat as observations",
            path.display()
        ))),
    }
}

fn load_hybrid_or_state(
    path: &Path,
    tol: &Tolerance,
) -> Result<(Option<HybridState>, JointState), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("reading {}: {e}", path.display())))?;
    let probe: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("parsing {}: {e}", path.display())))?;
    let schema = probe.get("schema").and_then(Value::as_str).unwrap_or("");
    match schema {
        OPERATOR_SCHEMA => {
            let state = load_operator(path)?.to_state(tol)?;
            let hybrid = HybridState::from_joint(&state, tol).ok().filter(|h| !h.classical_regions().is_empty());
            Ok((hybrid, state))
        }
        SCENARIO_SCHEMA => {
            let base = path.parent().unwrap_or(Path::new("."));
            let scenario = build_scenario(&load_scenario(path)?, base, tol)?;
            let state = scenario.joint.assemble(tol)?;
            Ok((Some(scenario.joint), state))
        }
        other => Err(Failure::invalid(format!(
            "{}: unknown schema `{other}` (expected {OPERATOR_SCHEMA} or {SCENARIO_SCHEMA})",
            path.display()
        ))),
    }
}

fn parse_assignment(text: &str) -> Result<(String, usize), Failure> {
    let (id, value) = text
        .split_once('=')
        .ok_or_else(|| Failure::invalid(format!("expected ID=VALUE, got `{text}`")))?;
    let v = value
        .parse()
        .map_err(|_| Failure::invalid(format!("value in `{text}` is not a nonnegative integer")))?;
    Ok((id.to_string(), v))
}

fn operator_json(file: &OperatorFile) -> Value {
    serde_json::to_value(file).expect("operator files serialize")
}

fn write_result(path: Option<&Path>, result: &Value) -> Result<(), Failure> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(result).expect("results serialize");
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::invalid(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok(result) => {
            if let Err(f) = write_result(output.as_deref(), &result) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            // negative verdicts still produce a result file when possible
            if f.code == EXIT_NEGATIVE {
                let result = f
                    .result
                    .unwrap_or_else(|| json!({ "verdict": "negative", "reason": f.message }));
                let _ = write_result(output.as_deref(), &result);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<Value, Failure> {
    let tol = tolerance()?;
    match cli.cmd {
        Cmd::Condition { input, on, given } => condition_cmd(&input, &on, &given, &tol),
        Cmd::Compat { a, b, witness } => compat_cmd(&a, &b, witness, &tol),
        Cmd::Entropy { input } => {
            let s = load_state(&input, &tol)?;
            // clamp the tiny negative values floating point can produce
            let bits = s.op().von_neumann_entropy(&tol)?.max(0.0);
            println!("entropy: {bits:.12} bits");
            Ok(json!({ "entropy_bits": bits }))
        }
        Cmd::Cmi { input, a, b, c } => cmi_cmd(&input, &a, &b, &c, &tol),
        Cmd::Suffstat { input } => suffstat_cmd(&input, &tol),
        Cmd::Improve { scenario, announced } => improve_cmd(&scenario, &announced, &tol),
        Cmd::Pool { rule, inputs, weights, prior, first, second } => {
            pool_cmd(rule, &inputs, &weights, prior.as_deref(), first.as_deref(), second.as_deref(), &tol)
        }
        Cmd::Scenario(sub) => match sub {
            ScenarioCmd::Build { spec } => scenario_build_cmd(&spec, &tol),
            ScenarioCmd::Obstruct { spec1, spec2, keep1, keep2 } => {
                scenario_obstruct_cmd(&spec1, &spec2, keep1.as_deref(), keep2.as_deref(), &tol)
            }
        },
        Cmd::Check { suite, seed, trials, dims } => check_cmd(&suite, seed, trials, dims, &tol),
    }
}

fn condition_cmd(
    input: &Path,
    on: &[String],
    given: &[String],
    tol: &Tolerance,
) -> Result<Value, Failure> {
    match (on.is_empty(), given.is_empty()) {
        (false, true) => {
            let hybrid = load_hybrid(input, tol)?;
            let assignments: Vec<(String, usize)> = on
                .iter()
                .map(|t| parse_assignment(t))
                .collect::<Result<_, _>>()?;
            let refs: Vec<(&str, usize)> =
                assignments.iter().map(|(id, v)| (id.as_str(), *v)).collect();
            let posterior = hybrid.condition(&refs, tol)?;
            let file = OperatorFile::from_state(&posterior);
            println!("conditioned on {}", on.join(", "));
            println!("posterior regions: {}", region_summary(&posterior));
            Ok(json!({ "operator": operator_json(&file) }))
        }
        (true, false) => {
            let state = load_state(input, tol)?;
            let ids: Vec<&str> = given.iter().map(String::as_str).collect();
            let cond = conditional_from_joint(&state, &ids, tol)?;
            let file = OperatorFile::from_operator(cond.op(), Some(cond.class().clone()));
            println!("conditional of {} given {}", input.display(), given.join(", "));
            Ok(json!({ "operator": operator_json(&file) }))
        }
        _ => Err(Failure::invalid("pass either --on X=0 assignments or --given region ids")),
    }
}

fn region_summary(s: &JointState) -> String {
    s.op()
        .factors()
        .iter()
        .map(|f| format!("{}({})", f.id, f.dim))
        .collect::<Vec<_>>()
        .join(" ")
}

fn compat_cmd(
    a: &Path,
    b: &Path,
    witness: Option<WitnessKind>,
    tol: &Tolerance,
) -> Result<Value, Failure> {
    let s1 = load_state(a, tol)?;
    let s2 = load_state(b, tol)?;
    let verdict = bfm_compatible(&s1, &s2, tol)?;
    println!(
        "support intersection rank: {} -> {}",
        verdict.intersection.rank,
        if verdict.compatible { "compatible" } else { "incompatible" }
    );
    if !verdict.compatible {
        return Err(Failure::negative("states are incompatible (disjoint supports)"));
    }
    let mut result = json!({
        "verdict": "compatible",
        "intersection_rank": verdict.intersection.rank,
    });
    match witness {
        None => {}
        Some(WitnessKind::Objective) => {
            let w = objective_witness(&s1, &s2, tol)?;
            println!(
                "objective witness: variables announce outcomes ({}, {}) with probabilities ({:.6}, {:.6})",
                w.outcomes.0, w.outcomes.1, w.p1, w.p2
            );
            result["witness"] = json!({
                "kind": "objective",
                "outcomes": [w.outcomes.0, w.outcomes.1],
                "probabilities": [w.p1, w.p2],
                "common_state": matrix_to_data(&w.mu),
            });
        }
        Some(WitnessKind::Subjective) => {
            let w = subjective_witness(&s1, &s2, tol)?;
            println!(
                "subjective witness: outcome {} of a {}-outcome measurement makes both posteriors agree",
                w.outcome,
                w.likelihood.effects().len()
            );
            result["witness"] = json!({
                "kind": "subjective",
                "outcome": w.outcome,
                "effect": matrix_to_data(&w.likelihood.effects()[w.outcome]),
                "posterior": operator_json(&OperatorFile::from_state(&w.posterior)),
            });
        }
    }
    Ok(result)
}

fn cmi_cmd(
    input: &Path,
    a: &[String],
    b: &[String],
    c: &[String],
    tol: &Tolerance,
) -> Result<Value, Failure> {
    let s = load_state(input, tol)?;
    fn refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    let cmi = conditional_mutual_information(&s, &refs(&a), &refs(&b), &refs(&c), tol)?;
    let independent = is_conditionally_independent(&s, &refs(&a), &refs(&b), &refs(&c), tol)?;
    println!("I({};{}|{}) = {cmi:.12} bits", a.join(","), b.join(","), c.join(","));
    println!(
        "conditionally independent: {}",
        if independent { "yes" } else { "no" }
    );
    Ok(json!({ "cmi_bits": cmi, "conditionally_independent": independent }))
}

fn suffstat_cmd(input: &Path, tol: &Tolerance) -> Result<Value, Failure> {
    let hybrid = load_hybrid(input, tol)?;
    let map = minimal_sufficient_statistic(&hybrid, tol)?;
    println!("{} equivalence cells:", map.cells.len());
    let mut cells = Vec::new();
    for (i, cell) in map.cells.iter().enumerate() {
        println!(
            "  cell {i}: probability {:.6}, values {:?}",
            cell.probability, cell.values
        );
        cells.push(json!({
            "probability": cell.probability,
            "values": cell.values,
            "representative": matrix_to_data(cell.representative.matrix()),
        }));
    }
    if !map.undefined.is_empty() {
        println!("  zero-probability values: {:?}", map.undefined);
    }
    Ok(json!({ "cells": cells, "undefined": map.undefined }))
}

fn improve_cmd(scenario: &Path, announced: &Path, tol: &Tolerance) -> Result<Value, Failure> {
    let hybrid = load_hybrid(scenario, tol)?;
    let state = load_state(announced, tol)?;
    let improved = improve_shared_prior(&hybrid, &state, tol)?;
    let moved = improved.op().distance(state.op())?;
    println!("improved state differs from announcement by {moved:.3e}");
    Ok(json!({
        "operator": operator_json(&OperatorFile::from_state(&improved)),
        "distance_from_announced": moved,
    }))
}

fn pool_cmd(
    rule: PoolRule,
    inputs: &[PathBuf],
    weights: &[f64],
    prior: Option<&Path>,
    first: Option<&str>,
    second: Option<&str>,
    tol: &Tolerance,
) -> Result<Value, Failure> {
    let pooled = match rule {
        PoolRule::Linear => {
            if inputs.len() < 2 {
                return Err(Failure::invalid("linear pooling needs at least two operator files"));
            }
            let states: Vec<JointState> = inputs
                .iter()
                .map(|p| load_state(p, tol))
                .collect::<Result<_, _>>()?;
            let w = if weights.is_empty() {
                vec![1.0 / states.len() as f64; states.len()]
            } else {
                weights.to_vec()
            };
            pool_linear(&states, &PoolWeights::new(w)?, tol)?
        }
        PoolRule::Multiplicative => {
            if inputs.len() != 2 {
                return Err(Failure::invalid("multiplicative pooling needs exactly two operator files"));
            }
            let prior = prior.ok_or_else(|| Failure::invalid("multiplicative pooling needs --prior"))?;
            let s1 = load_state(&inputs[0], tol)?;
            let s2 = load_state(&inputs[1], tol)?;
            let p = load_state(prior, tol)?;
            pool_multiplicative(&s1, &s2, &p, tol)?
        }
        PoolRule::Supra => {
            if inputs.len() != 1 {
                return Err(Failure::invalid("supra pooling needs one scenario file"));
            }
            let (id1, v1) = parse_assignment(
                first.ok_or_else(|| Failure::invalid("supra pooling needs --first X1=v"))?,
            )?;
            let (id2, v2) = parse_assignment(
                second.ok_or_else(|| Failure::invalid("supra pooling needs --second X2=v"))?,
            )?;
            let hybrid = load_hybrid(&inputs[0], tol)?;
            pool_supra(&hybrid, &id1, v1, &id2, v2, tol)?
        }
    };
    println!("pooled state on {}", region_summary(&pooled));
    Ok(json!({ "operator": operator_json(&OperatorFile::from_state(&pooled)) }))
}

fn scenario_build_cmd(spec: &Path, tol: &Tolerance) -> Result<Value, Failure> {
    let base = spec.parent().unwrap_or(Path::new("."));
    let scenario = build_scenario(&load_scenario(spec)?, base, tol)?;
    let joint = scenario.joint.assemble(tol)?;
    println!("builder: {}", scenario.provenance.builder);
    println!("digest:  {}", scenario.provenance.digest);
    println!("joint:   {}", region_summary(&joint));
    Ok(json!({
        "builder": scenario.provenance.builder,
        "digest": scenario.provenance.digest,
        "joint": operator_json(&OperatorFile::from_state(&joint)),
    }))
}

fn single_variable(
    h: &HybridState,
    keep: Option<&str>,
    which: &str,
    tol: &Tolerance,
) -> Result<HybridState, Failure> {
    match keep {
        Some(id) => Ok(h.marginal_hybrid(&[id], tol)?),
        None if h.classical_regions().len() == 1 => Ok(h.clone()),
        None => Err(Failure::invalid(format!(
            "{which} has several classical variables; pick one with --{which}",
        ))),
    }
}

fn scenario_obstruct_cmd(
    spec1: &Path,
    spec2: &Path,
    keep1: Option<&str>,
    keep2: Option<&str>,
    tol: &Tolerance,
) -> Result<Value, Failure> {
    let h1 = single_variable(&load_hybrid(spec1, tol)?, keep1, "keep1", tol)?;
    let h2 = single_variable(&load_hybrid(spec2, tol)?, keep2, "keep2", tol)?;
    let ob = joint_state_obstruction(&h1, &h2, tol)?;
    if ob.is_empty() {
        println!("no obstruction: a common joint state may exist");
        return Ok(json!({ "verdict": "unobstructed", "pairs": [] }));
    }
    println!("obstructed: {} outcome pairs force zero joint probability", ob.pairs.len());
    let mut pairs = Vec::new();
    for p in &ob.pairs {
        println!(
            "  outcomes ({}, {}) with probabilities ({:.6}, {:.6}) have disjoint supports",
            p.x1, p.x2, p.p1, p.p2
        );
        pairs.push(json!({ "x1": p.x1, "x2": p.x2, "p1": p.p1, "p2": p.p2 }));
    }
    Err(Failure {
        code: EXIT_NEGATIVE,
        message: format!("no common joint state exists ({} obstructed pairs)", pairs.len()),
        result: Some(json!({ "verdict": "obstructed", "pairs": pairs })),
    })
}

fn check_cmd(
    suite: &str,
    seed: u64,
    trials: usize,
    dims: usize,
    tol: &Tolerance,
) -> Result<Value, Failure> {
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    let cfg = SuiteConfig { seed, trials, max_dim: dims };
    let mut reports = Vec::new();
    let mut all_passed = true;
    for name in names {
        let report = run_suite(name, &cfg, tol)?;
        println!(
            "[{}] {}: {} trials, max deviation {:.3e} (threshold {:.0e})",
            if report.passed { "PASS" } else { "FAIL" },
            report.name,
            report.trials,
            report.max_deviation,
            report.threshold
        );
        for f in &report.failures {
            println!("       {f}");
        }
        all_passed &= report.passed;
        reports.push(json!({
            "suite": report.name,
            "trials": report.trials,
            "passed": report.passed,
            "max_deviation": report.max_deviation,
            "threshold": report.threshold,
            "failures": report.failures,
        }));
    }
    if !all_passed {
        return Err(Failure::negative("one or more check suites failed"));
    }
    Ok(json!({ "seed": seed, "suites": reports }))
}
