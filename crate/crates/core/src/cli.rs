//! The `ctc-sim` command line.
//!
//! Exit codes: 0 success, 1 invalid input or other error, 2 dynamical-consistency paradox,
//! 3 failed verification.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acceptance::{run_all, Profile};
use crate::circuit::{catalog, parse_circuit, StandardFormCircuit};
use crate::dctc::{
    consistency_channel, dctc_evolve, fixed_point_set, iterate_channel, max_entropy_fixed_point,
    noisy_fixed_point, weighted_dctc_evolve_with_grid, DctcRule, IterationVerdict, Weighting,
    DEFAULT_GRID,
};
use crate::encoding::{matrix_from_raw, matrix_to_raw, vector_from_raw, RawMatrix};
use crate::error::{Error, Result};
use crate::outcome::TheoryOutcome;
use crate::pctc::pctc_evolve;
use crate::qstate::{von_neumann_entropy, CMatrix, DensityOperator, PureState};
use crate::tctc::{
    moment_integrals, ptrace_variant_evolve, sampler_moments, tctc_evolve, tctc_evolve_mc,
    tctc_evolve_mixed, MCEstimate, Sampler,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARADOX: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ctc-sim", version, about = "Evolve states through time-travel circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve an input state under one theory and print a JSON run report.
    Evolve(EvolveArgs),
    /// Describe the D-CTC fixed-point family for an input.
    FixedPoints(FixedPointArgs),
    /// Iterate the D-CTC consistency channel from a starting state.
    Iterate(IterateArgs),
    /// Monte-Carlo estimates of the Haar moment integrals.
    Moments(MomentArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CircuitSource {
    /// JSON circuit file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Built-in circuit name.
    #[arg(long)]
    pub catalog: Option<String>,
}

impl CircuitSource {
    fn load(&self) -> Result<StandardFormCircuit> {
        match (&self.circuit, &self.catalog) {
            (Some(path), _) => parse_circuit(&std::fs::read_to_string(path)?),
            (None, Some(name)) => catalog(name),
            (None, None) => unreachable!("clap enforces one circuit source"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryArg {
    Dctc,
    Pctc,
    Tctc,
    TctcMc,
    WeightedDctc,
    PtraceTctc,
}

impl TheoryArg {
    fn name(self) -> &'static str {
        match self {
            TheoryArg::Dctc => "dctc",
            TheoryArg::Pctc => "pctc",
            TheoryArg::Tctc => "tctc",
            TheoryArg::TctcMc => "tctc-mc",
            TheoryArg::WeightedDctc => "weighted-dctc",
            TheoryArg::PtraceTctc => "ptrace-tctc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Uniform,
    Transition,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub theory: TheoryArg,
    #[command(flatten)]
    pub source: CircuitSource,
    /// Ket such as "|0+⟩", a JSON amplitude vector or density matrix of [re, im] pairs, or "mixed".
    #[arg(long)]
    pub input: String,
    /// D-CTC selection rule: max-entropy, representative or noise=P.
    #[arg(long, default_value = "max-entropy", value_parser = parse_rule)]
    pub rule: DctcRule,
    /// Weighting for weighted-dctc.
    #[arg(long, value_enum, default_value = "uniform")]
    pub weighting: WeightingArg,
    /// Quadrature points per direction for weighted-dctc.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Monte-Carlo sample count for tctc-mc and ptrace-tctc.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixedPointArgs {
    #[command(flatten)]
    pub source: CircuitSource,
    #[arg(long)]
    pub input: Option<String>,
    /// Also solve the depolarized consistency condition with this probability.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub source: CircuitSource,
    /// Input state of the CR register (default: all zeros).
    #[arg(long)]
    pub input: Option<String>,
    /// Starting CV state.
    #[arg(long, default_value = "mixed")]
    pub sigma0: String,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced Monte-Carlo sample counts.
    #[arg(long)]
    pub quick: bool,
}

pub fn parse_rule(text: &str) -> std::result::Result<DctcRule, String> {
    match text {
        "max-entropy" => Ok(DctcRule::MaxEntropy),
        "representative" => Ok(DctcRule::Representative),
        other => other
            .strip_prefix("noise=")
            .and_then(|p| p.parse::<f64>().ok())
            .map(DctcRule::Noise)
            .ok_or_else(|| format!("expected max-entropy, representative or noise=P, got '{other}'")),
    }
}

/// A state given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Pure(PureState),
    Density(DensityOperator),
    /// The maximally mixed state of whatever dimension is required.
    Mixed,
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("mixed") {
            return Ok(StateSpec::Mixed);
        }
        if t.starts_with('|') {
            return Ok(StateSpec::Pure(PureState::from_ket(t)?));
        }
        let value: Value = serde_json::from_str(t)
            .map_err(|e| Error::parse("state", format!("not a ket, JSON array or 'mixed': {e}")))?;
        let is_matrix = value
            .as_array()
            .and_then(|rows| rows.first())
            .and_then(|row| row.as_array())
            .and_then(|row| row.first())
            .is_some_and(|entry| entry.is_array());
        if is_matrix {
            let raw: RawMatrix = serde_json::from_value(value)
                .map_err(|e| Error::parse("state", format!("density matrix: {e}")))?;
            Ok(StateSpec::Density(DensityOperator::new(matrix_from_raw(&raw)?)?))
        } else {
            let raw: Vec<[f64; 2]> = serde_json::from_value(value)
                .map_err(|e| Error::parse("state", format!("amplitude vector: {e}")))?;
            Ok(StateSpec::Pure(PureState::new(vector_from_raw(&raw)?)?))
        }
    }

    pub fn density(&self, dim: usize) -> Result<DensityOperator> {
        let rho = match self {
            StateSpec::Pure(p) => p.projector(),
            StateSpec::Density(d) => d.clone(),
            StateSpec::Mixed => DensityOperator::maximally_mixed(dim),
        };
        if rho.dim() != dim {
            return Err(Error::dim(format!("state has dim {}, expected {dim}", rho.dim())));
        }
        Ok(rho)
    }

    /// The state as a ket, if it is pure (a rank-one density matrix counts).
    pub fn pure(&self, dim: usize) -> Result<PureState> {
        let rho = self.density(dim)?;
        if let StateSpec::Pure(p) = self {
            return Ok(p.clone());
        }
        let (values, vecs) = crate::qstate::hermitian_eigen(rho.matrix());
        if rho.purity() < 1.0 - 1e-9 {
            return Err(Error::InvalidParameter("this theory needs a pure input state".into()));
        }
        PureState::normalized(vecs.column(values.len() - 1).into_owned())
    }
}

/// JSON report of one `evolve` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub theory: String,
    pub circuit: Value,
    pub input: String,
    pub rho_f: RawMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<RawMatrix>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl RunReport {
    /// Re-validates `rho_f` as a density operator.
    pub fn state(&self) -> Result<DensityOperator> {
        DensityOperator::new(matrix_from_raw(&self.rho_f)?)
    }
}

fn outcome_report(theory: &str, circ: &StandardFormCircuit, input: &str, out: TheoryOutcome) -> RunReport {
    let mut diagnostics = out.diagnostics;
    diagnostics.entry("paradox".into()).or_insert(Value::Bool(false));
    diagnostics.insert("entropy_rho_f".into(), json!(von_neumann_entropy(&out.rho_f)));
    if let Some(e) = out.entropy_tau {
        diagnostics.insert("entropy".into(), json!(e));
    }
    if let Some(z) = out.normalizer {
        diagnostics.insert("normalizer".into(), json!(z));
    }
    RunReport {
        theory: theory.into(),
        circuit: circ.to_json(),
        input: input.into(),
        rho_f: matrix_to_raw(out.rho_f.matrix()),
        tau: out.tau.map(|t| matrix_to_raw(t.matrix())),
        diagnostics,
    }
}

fn estimate_report(theory: &str, circ: &StandardFormCircuit, input: &str, est: MCEstimate) -> Result<RunReport> {
    let rho_f = est.state()?;
    let mut out = TheoryOutcome::new(rho_f)
        .note("std_error", est.std_error)
        .note("samples", est.samples)
        .note("seed", est.seed);
    out.normalizer = None;
    Ok(outcome_report(theory, circ, input, out))
}

fn evolve(args: &EvolveArgs, circ: &StandardFormCircuit) -> Result<RunReport> {
    let spec = StateSpec::parse(&args.input)?;
    let dim = circ.cr_dim();
    let name = args.theory.name();
    match args.theory {
        TheoryArg::Dctc => {
            let out = dctc_evolve(circ, &spec.density(dim)?, args.rule)?;
            Ok(outcome_report(name, circ, &args.input, out))
        }
        TheoryArg::WeightedDctc => {
            let w = match args.weighting {
                WeightingArg::Uniform => Weighting::Uniform,
                WeightingArg::Transition => Weighting::Transition,
            };
            let out = weighted_dctc_evolve_with_grid(circ, &spec.density(dim)?, w, args.grid)?;
            Ok(outcome_report(name, circ, &args.input, out))
        }
        TheoryArg::Pctc => Ok(outcome_report(name, circ, &args.input, pctc_evolve(circ, &spec.density(dim)?)?)),
        TheoryArg::Tctc => {
            let out = match &spec {
                StateSpec::Pure(p) => tctc_evolve(circ, p)?,
                _ => tctc_evolve_mixed(circ, &spec.density(dim)?)?,
            };
            Ok(outcome_report(name, circ, &args.input, out))
        }
        TheoryArg::TctcMc => {
            let est = tctc_evolve_mc(circ, &spec.pure(dim)?, args.samples, args.seed)?;
            estimate_report(name, circ, &args.input, est)
        }
        TheoryArg::PtraceTctc => {
            let est = ptrace_variant_evolve(circ, &spec.pure(dim)?, args.samples, args.seed)?;
            estimate_report(name, circ, &args.input, est)
        }
    }
}

fn default_input(circ: &StandardFormCircuit, input: &Option<String>) -> Result<DensityOperator> {
    match input {
        Some(text) => StateSpec::parse(text)?.density(circ.cr_dim()),
        None => Ok(PureState::basis(circ.cr_dim(), 0).projector()),
    }
}

fn raw(m: &CMatrix) -> Value {
    json!(matrix_to_raw(m))
}

fn fixed_points(args: &FixedPointArgs) -> Result<Value> {
    let circ = args.source.load()?;
    let rho = default_input(&circ, &args.input)?;
    let s = consistency_channel(&circ, &rho)?;
    let fps = fixed_point_set(&s)?;
    let best = max_entropy_fixed_point(&fps)?;
    let mut report = json!({
        "subspace_dim": fps.subspace_dim(),
        "representative": raw(fps.representative().matrix()),
        "entropy_representative": von_neumann_entropy(fps.representative()),
        "directions": fps.directions().iter().map(raw).collect::<Vec<_>>(),
        "max_entropy": raw(best.matrix()),
        "entropy_max": von_neumann_entropy(&best),
    });
    if let Some(p) = args.noise {
        let tau = noisy_fixed_point(&s, p)?;
        report["noisy"] = json!({
            "p": p,
            "tau": raw(tau.matrix()),
            "entropy": von_neumann_entropy(&tau),
        });
    }
    Ok(report)
}

fn iterate(args: &IterateArgs) -> Result<Value> {
    let circ = args.source.load()?;
    let rho = default_input(&circ, &args.input)?;
    let s = consistency_channel(&circ, &rho)?;
    let sigma0 = StateSpec::parse(&args.sigma0)?.density(circ.cv_dim())?;
    let traj = iterate_channel(&s, &sigma0, args.max_iter, args.tol)?;
    let steps: Vec<f64> = traj
        .states
        .windows(2)
        .map(|w| crate::qstate::frobenius_distance(w[0].matrix(), w[1].matrix()))
        .collect();
    let verdict = match &traj.verdict {
        IterationVerdict::Converged { state, at } => {
            json!({"kind": "converged", "at": at, "state": raw(state.matrix())})
        }
        IterationVerdict::Cycle { period, at } => json!({"kind": "cycle", "period": period, "at": at}),
        IterationVerdict::NoVerdict => json!({"kind": "none"}),
    };
    Ok(json!({
        "iterations": traj.states.len() - 1,
        "verdict": verdict,
        "step_distances": steps,
        "final_state": raw(traj.states.last().expect("σ_0 is always present").matrix()),
    }))
}

fn moments(args: &MomentArgs) -> Result<Value> {
    let m = moment_integrals(args.dim, args.samples, args.seed)?;
    let (g2, g4) = sampler_moments(args.dim, args.samples, args.seed, Sampler::Gaussian)?;
    let (h2, h4) = sampler_moments(args.dim, args.samples, args.seed.wrapping_add(1), Sampler::Hurwitz)?;
    let norm = (args.dim * (args.dim + 1)) as f64;
    Ok(json!({
        "integrals": m,
        "ratio_consistent_with_2": m.ratio.agrees_with(2.0, 5.0),
        "exact": {"i_ab_ab": 1.0 / norm, "i_aa_aa": 2.0 / norm, "second": 1.0 / args.dim as f64},
        "samplers": {
            "gaussian": {"second": g2, "fourth": g4},
            "hurwitz": {"second": h2, "fourth": h4},
            "agree": g2.agrees_with_estimate(&h2, 5.0) && g4.agrees_with_estimate(&h4, 5.0),
        },
    }))
}

fn emit(value: &impl Serialize, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn paradox_report(theory: &str, circ: &StandardFormCircuit, input: &str, err: &Error) -> Value {
    let trace = match err {
        Error::Paradox { trace } | Error::StillParadoxical { trace } => *trace,
        _ => f64::NAN,
    };
    json!({
        "theory": theory,
        "circuit": circ.to_json(),
        "input": input,
        "paradox": true,
        "postselection_trace": trace,
        "error": err.to_string(),
    })
}

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    EXIT_INVALID
}

fn run_evolve(args: &EvolveArgs) -> i32 {
    let circ = match args.source.load() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match evolve(args, &circ) {
        Ok(report) => match emit(&report, &args.out) {
            Ok(()) => EXIT_OK,
            Err(e) => fail(&e),
        },
        Err(e @ (Error::Paradox { .. } | Error::StillParadoxical { .. })) => {
            let report = paradox_report(args.theory.name(), &circ, &args.input, &e);
            if let Err(io) = emit(&report, &args.out) {
                return fail(&io);
            }
            eprintln!("paradox: {e}");
            EXIT_PARADOX
        }
        Err(e) => fail(&e),
    }
}

fn run_verify(args: &VerifyArgs) -> i32 {
    let profile = if args.quick { Profile::Quick } else { Profile::Full };
    let results = run_all(profile);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let json_result = |r: Result<Value>, out: &Option<PathBuf>| match r.and_then(|v| emit(&v, out)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(&e),
    };
    match &cli.command {
        Command::Evolve(a) => run_evolve(a),
        Command::FixedPoints(a) => json_result(fixed_points(a), &a.out),
        Command::Iterate(a) => json_result(iterate(a), &a.out),
        Command::Moments(a) => json_result(moments(a), &a.out),
        Command::Verify(a) => run_verify(a),
    }
}
