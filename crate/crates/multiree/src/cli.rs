//! `multiree` command-line frontend.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use multiree_core::energy::{
    cb_energy, cb_energy_iid, cb_finite_dim, cb_oscillator, fa_check, optimize_t, BoundReport,
    FaReport, Oscillator, SpectrumModel, Verdict, WeightModel,
};
use multiree_core::{
    audit_state, energy_constrained_ree, estimate_ree, g_func, gibbs_state, lemma_omega_state,
    mutual_information, partial_trace, relative_entropy, trace_distance, truncation_experiment,
    von_neumann_entropy, AuditOptions, FFunction, Functional, HamiltonianSpec, SolveOptions,
    SubsystemLayout,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{
    self, real, AuditFile, BoundPoint, BoundsFile, EnsembleFile, FormatError, GibbsFile,
    HamiltonianFile, Header, LoadedState, SolveResultFile, TruncationFile,
};

#[derive(Debug, Parser)]
#[command(
    name = "multiree",
    version,
    about = "Relative entropy of entanglement, truncation bounds and continuity bounds for multipartite states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Target duality gap of the E_R solver.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long = "max-iter", global = true, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Exit with status 3 when a solve does not reach `--tol`.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Result file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionalArg {
    Entropy,
    Qmi,
    Cond,
    Ree,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, mutual information, conditional or relative entropy.
    Entropy {
        state: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        layout: Option<Dims>,
        /// Multipartite mutual information.
        #[arg(long, conflicts_with_all = ["cond", "rel"])]
        qmi: bool,
        /// Conditional entropy `A|B`, e.g. `1,2|3`.
        #[arg(long, conflicts_with = "rel")]
        cond: Option<String>,
        /// Relative entropy against a second state file.
        #[arg(long)]
        rel: Option<PathBuf>,
    },
    /// Relative entropy of entanglement with a duality-gap certificate.
    Ree {
        state: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        layout: Option<Dims>,
        /// Energy budget for separable states.
        #[arg(long, requires = "ham")]
        energy: Option<f64>,
        /// Party Hamiltonian (one per party, or one for all).
        #[arg(long, num_args = 1..)]
        ham: Vec<String>,
    },
    /// Spectral truncation table.
    Truncate {
        state: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        layout: Option<Dims>,
        /// 1-based parties to truncate, e.g. `1,2`.
        #[arg(long)]
        subset: String,
        #[arg(long = "f", value_enum)]
        functional: FunctionalArg,
        #[arg(long, default_value_t = 1)]
        rmin: usize,
        /// Defaults to the largest local dimension.
        #[arg(long)]
        rmax: Option<usize>,
    },
    /// Continuity bounds.
    Bounds {
        #[command(subcommand)]
        kind: BoundsKind,
    },
    /// Finite-approximation property of a spectrum and weight sequence.
    FaCheck {
        /// `geometric:q`, `power:alpha`, `logcorr:alpha,q` or a JSON file.
        #[arg(long)]
        spectrum: String,
        /// `logpow:q[,scale]`, `power:p[,scale]` or a JSON file.
        #[arg(long)]
        weights: String,
    },
    /// Entropic inequalities of E_R checked against certified brackets.
    Audit {
        state: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        layout: Option<Dims>,
    },
    /// Separable state sharing the marginals of a pure state.
    LemmaOmega {
        state: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        layout: Option<Dims>,
        /// 1-based splitting order, e.g. `2,1,3`.
        #[arg(long)]
        order: Option<String>,
        /// Also write the ensemble to this file.
        #[arg(long)]
        ensemble_out: Option<PathBuf>,
    },
    /// Gibbs state of a Hamiltonian at mean energy E.
    Gibbs {
        #[arg(long)]
        ham: String,
        #[arg(long)]
        energy: f64,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// `name=start:stop:points` over `epsilon`, `E` or `t`.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub n: usize,
    /// Defaults to `n - 1`.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TArgs {
    #[arg(long, conflicts_with = "optimize_t")]
    pub t: Option<f64>,
    #[arg(long = "optimize-t")]
    pub optimize_t: bool,
}

#[derive(Debug, Subcommand)]
pub enum BoundsKind {
    /// `eps ln dim(A_1..A_{n-1}) + g(eps)`.
    Finite {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Local dimensions of the first n-1 parties.
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
    },
    /// Energy-constrained bound with numeric Gibbs F.
    Energy {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        /// Party Hamiltonian (one per party of the first m, or one for all).
        #[arg(long, num_args = 1.., required = true)]
        ham: Vec<String>,
    },
    /// Bound for states with iid-like energy constraint and free parameter t.
    Iid {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        t: TArgs,
        /// Single-party Hamiltonian; oscillators use the closed-form F.
        #[arg(long)]
        ham: String,
    },
    /// Closed-form bound for multimode oscillators.
    Oscillator {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        t: TArgs,
        #[arg(long, value_parser = parse_reals)]
        omegas: Reals,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Output(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Output(_) => 1,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<multiree_core::Error> for Failure {
    fn from(e: multiree_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

/// Comma-separated list parsed as one argument.
pub type Dims = Vec<usize>;
pub type Reals = Vec<f64>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

/// 1-based party list to 0-based indices.
fn parse_parties(s: &str, layout: &SubsystemLayout) -> Outcome<Vec<usize>> {
    let raw = parse_dims(s).map_err(invalid)?;
    if let Some(&bad) = raw.iter().find(|&&p| p == 0 || p > layout.parties()) {
        return Err(invalid(format!(
            "party {bad} out of range 1..={}",
            layout.parties()
        )));
    }
    Ok(raw.into_iter().map(|p| p - 1).collect())
}

fn load_state(path: &Path, layout: &Option<Dims>) -> Outcome<LoadedState> {
    let mut s = format::read_state(path)?;
    if let Some(dims) = layout {
        let l = SubsystemLayout::new(dims.clone())?;
        l.check_dim(s.density.dim())?;
        s.layout = l;
    }
    Ok(s)
}

/// `diag:e0,e1,...`, `oscillator:omegas:levels` or a Hamiltonian file.
pub fn parse_hamiltonian(s: &str) -> Outcome<HamiltonianSpec> {
    if let Some(rest) = s.strip_prefix("diag:") {
        return Ok(HamiltonianSpec::new(parse_reals(rest).map_err(invalid)?)?);
    }
    if let Some(rest) = s.strip_prefix("oscillator:") {
        let (omegas, levels) = rest
            .split_once(':')
            .ok_or_else(|| invalid("expected oscillator:OMEGAS:LEVELS"))?;
        let omegas = parse_reals(omegas).map_err(invalid)?;
        let levels = levels
            .parse::<usize>()
            .map_err(|e| invalid(e.to_string()))?;
        return Ok(HamiltonianSpec::oscillator(
            Oscillator::new(omegas, 1.0)?,
            levels,
        )?);
    }
    Ok(format::read_json::<HamiltonianFile>(Path::new(s))?.to_spec()?)
}

fn hamiltonians(specs: &[String], count: usize) -> Outcome<Vec<HamiltonianSpec>> {
    let parsed = specs
        .iter()
        .map(|s| parse_hamiltonian(s))
        .collect::<Outcome<Vec<_>>>()?;
    match parsed.len() {
        1 => Ok(vec![parsed[0].clone(); count]),
        k if k == count => Ok(parsed),
        k => Err(invalid(format!(
            "expected 1 or {count} Hamiltonians, got {k}"
        ))),
    }
}

fn parse_spectrum(s: &str) -> Outcome<SpectrumModel> {
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = || parse_reals(args).map_err(invalid);
    Ok(match kind {
        "geometric" => SpectrumModel::Geometric {
            q: single(&nums()?)?,
        },
        "power" => SpectrumModel::PowerLaw {
            alpha: single(&nums()?)?,
        },
        "logcorr" => match nums()?.as_slice() {
            &[alpha, q] => SpectrumModel::LogCorrected { alpha, q },
            _ => return Err(invalid("expected logcorr:alpha,q")),
        },
        _ => SpectrumModel::Explicit(read_sequence(s)?),
    })
}

fn parse_weights(s: &str) -> Outcome<WeightModel> {
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = || parse_reals(args).map_err(invalid);
    let scaled = |v: Vec<f64>| match v.as_slice() {
        &[x] => Ok((x, 1.0)),
        &[x, scale] => Ok((x, scale)),
        _ => Err(invalid("expected one exponent and an optional scale")),
    };
    Ok(match kind {
        "logpow" => {
            let (q, scale) = scaled(nums()?)?;
            WeightModel::LogPower { scale, q }
        }
        "power" => {
            let (p, scale) = scaled(nums()?)?;
            WeightModel::Power { scale, p }
        }
        _ => WeightModel::Explicit(read_sequence(s)?),
    })
}

fn single(v: &[f64]) -> Outcome<f64> {
    match v {
        &[x] => Ok(x),
        _ => Err(invalid("expected a single number")),
    }
}

/// JSON array of numbers, or a Hamiltonian file's eigenvalues.
fn read_sequence(path: &str) -> Outcome<Vec<f64>> {
    let p = Path::new(path);
    if let Ok(v) = format::read_json::<Vec<f64>>(p) {
        return Ok(v);
    }
    match format::read_json::<HamiltonianFile>(p)? {
        HamiltonianFile::Spectrum { eigenvalues } => Ok(eigenvalues),
        HamiltonianFile::Oscillator { .. } => {
            Ok(format::read_hamiltonian(p)?.eigenvalues().to_vec())
        }
    }
}

/// `name=start:stop:points`, evenly spaced and inclusive.
fn parse_sweep(s: &str) -> Outcome<(String, Vec<f64>)> {
    let bad = || {
        invalid(format!(
            "malformed sweep {s:?}, expected name=start:stop:points"
        ))
    };
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if !matches!(name, "epsilon" | "E" | "t") {
        return Err(invalid(format!(
            "cannot sweep {name:?}; use epsilon, E or t"
        )));
    }
    let points = (0..n)
        .map(|k| {
            if n == 1 {
                a
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    Ok((name.to_string(), points))
}

#[derive(Debug, Clone, Copy)]
struct BoundParams {
    epsilon: Option<f64>,
    energy: Option<f64>,
    t: Option<f64>,
}

impl BoundParams {
    fn need(v: Option<f64>, name: &str) -> Outcome<f64> {
        v.ok_or_else(|| invalid(format!("--{name} is required")))
    }
}

fn solve_options(g: &Global) -> SolveOptions {
    SolveOptions {
        tol: g.tol,
        max_iter: g.max_iter,
        restarts: g.restarts,
        seed: g.seed,
    }
}

struct Output {
    text: String,
    /// Message when the result did not reach the requested accuracy.
    shortfall: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            shortfall: None,
        }
    }
}

fn emit(global: &Global, out: Output) -> Outcome<()> {
    match &global.out {
        Some(path) => fs::write(path, &out.text)
            .map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?,
        None => print!("{}", out.text),
    }
    match out.shortfall {
        Some(msg) if global.strict => Err(Failure::Numerical(msg)),
        Some(msg) => {
            warn!("{msg}");
            Ok(())
        }
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct EntropyFile {
    header: Header,
    quantity: &'static str,
    #[serde(with = "real")]
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginals: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct HcondSampleData {
    beta: f64,
    y_lo: f64,
    y_hi: f64,
}

#[derive(Debug, Serialize)]
struct FaFile {
    header: Header,
    #[serde(with = "real")]
    energy: f64,
    #[serde(with = "real")]
    energy_remainder: f64,
    hcond_plus: &'static str,
    #[serde(with = "real")]
    slope: f64,
    verdict: &'static str,
    samples: Vec<HcondSampleData>,
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

impl FaFile {
    fn new(header: Header, r: &FaReport) -> Self {
        FaFile {
            header,
            energy: r.energy,
            energy_remainder: r.energy_remainder,
            hcond_plus: verdict(r.hcond_plus),
            slope: r.slope,
            verdict: verdict(r.verdict),
            samples: r
                .samples
                .iter()
                .map(|s| HcondSampleData {
                    beta: s.beta,
                    y_lo: s.y_lo,
                    y_hi: s.y_hi,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct LemmaOmegaFile {
    header: Header,
    /// Trace distance between the marginals of omega and sigma, per party.
    marginal_distances: Vec<f64>,
    #[serde(with = "real")]
    relative_entropy: f64,
    /// Sum of the marginal entropies of the first n-1 parties.
    bound: f64,
    bound_holds: bool,
    ensemble: EnsembleFile,
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let g = &cli.global;
    if g.jobs == 0 {
        return Err(invalid("--jobs must be positive"));
    }
    let start = Instant::now();
    let out = match &cli.command {
        Command::Entropy {
            state,
            layout,
            qmi,
            cond,
            rel,
        } => entropy(g, state, layout, *qmi, cond.as_deref(), rel.as_deref())?,
        Command::Ree {
            state,
            layout,
            energy,
            ham,
        } => ree(g, state, layout, *energy, ham)?,
        Command::Truncate {
            state,
            layout,
            subset,
            functional,
            rmin,
            rmax,
        } => truncate(g, state, layout, subset, *functional, *rmin, *rmax)?,
        Command::Bounds { kind } => bounds(g, kind)?,
        Command::FaCheck { spectrum, weights } => {
            let r = fa_check(&parse_spectrum(spectrum)?, &parse_weights(weights)?)?;
            Output::ok(format::to_json(&FaFile::new(
                Header::new("fa-check", g.seed),
                &r,
            )))
        }
        Command::Audit { state, layout } => {
            let s = load_state(state, layout)?;
            let opts = AuditOptions {
                solver: solve_options(g),
                ..AuditOptions::default()
            };
            let r = audit_state(&s.density, &s.layout, &opts)?;
            let shortfall =
                (r.gap > g.tol).then(|| format!("E_R gap {} exceeds tolerance {}", r.gap, g.tol));
            Output {
                text: format::to_json(&AuditFile::new(Header::new("audit", g.seed), &r)),
                shortfall,
            }
        }
        Command::LemmaOmega {
            state,
            layout,
            order,
            ensemble_out,
        } => lemma_omega(g, state, layout, order.as_deref(), ensemble_out.as_deref())?,
        Command::Gibbs { ham, energy } => {
            let h = parse_hamiltonian(ham)?;
            let gs = gibbs_state(&h, *energy)?;
            if gs.clamped {
                warn!(
                    "energy {energy} exceeds the uniform mean; returning the maximally mixed state"
                );
            }
            Output::ok(format::to_json(&GibbsFile::new(
                Header::new("gibbs", g.seed),
                &h,
                *energy,
                &gs,
            )))
        }
    };
    info!("finished in {:.3} s", start.elapsed().as_secs_f64());
    emit(g, out)
}

fn entropy(
    g: &Global,
    path: &Path,
    layout: &Option<Dims>,
    qmi: bool,
    cond: Option<&str>,
    rel: Option<&Path>,
) -> Outcome<Output> {
    let s = load_state(path, layout)?;
    let (quantity, value, marginals) = if qmi {
        ("qmi", mutual_information(&s.density, &s.layout)?, None)
    } else if let Some(spec) = cond {
        ("cond", conditional(&s, spec)?, None)
    } else if let Some(other) = rel {
        let sigma = load_state(other, layout)?;
        if sigma.density.dim() != s.density.dim() {
            return Err(invalid("states have different dimensions"));
        }
        (
            "rel",
            relative_entropy(&s.density, &sigma.density)?.to_f64(),
            None,
        )
    } else {
        let m = (0..s.layout.parties())
            .map(|k| von_neumann_entropy(&partial_trace(&s.density, &s.layout, &[k])?))
            .collect::<Result<Vec<_>, _>>()?;
        ("entropy", von_neumann_entropy(&s.density)?, Some(m))
    };
    Ok(Output::ok(format::to_json(&EntropyFile {
        header: Header::new("entropy", g.seed),
        quantity,
        value,
        marginals,
    })))
}

/// `H(A|B) = H(A) - I(A:B)` on the reduced state of `A ∪ B`.
fn conditional(s: &LoadedState, spec: &str) -> Outcome<f64> {
    let (a, b) = spec
        .split_once('|')
        .ok_or_else(|| invalid("expected --cond A|B, e.g. 1,2|3"))?;
    let a = s.layout.normalize_subset(&parse_parties(a, &s.layout)?)?;
    let b = s.layout.normalize_subset(&parse_parties(b, &s.layout)?)?;
    if a.iter().any(|x| b.contains(x)) {
        return Err(invalid("A and B overlap"));
    }
    let mut keep: Vec<usize> = a.iter().chain(&b).copied().collect();
    keep.sort_unstable();
    let contiguous =
        a.iter().all(|x| b.iter().all(|y| x < y)) || a.iter().all(|x| b.iter().all(|y| x > y));
    if !contiguous {
        return Err(invalid("A and B must not interleave in the party order"));
    }
    let reduced = partial_trace(&s.density, &s.layout, &keep)?;
    let cut = if a[0] < b[0] { a.len() } else { b.len() };
    let bipartite = s.layout.restrict(&keep).bipartition(cut)?;
    let ha = von_neumann_entropy(&partial_trace(&s.density, &s.layout, &a)?)?;
    Ok(ha - mutual_information(&reduced, &bipartite)?)
}

fn ree(
    g: &Global,
    path: &Path,
    layout: &Option<Dims>,
    energy: Option<f64>,
    ham: &[String],
) -> Outcome<Output> {
    let s = load_state(path, layout)?;
    let opts = solve_options(g);
    let header = Header::new("ree", g.seed);
    let (r, energy) = match energy {
        Some(e) => {
            let hs = hamiltonians(ham, s.layout.parties())?;
            (
                energy_constrained_ree(&s.density, &s.layout, &hs, e, &opts)?,
                Some(e),
            )
        }
        None if !ham.is_empty() => return Err(invalid("--ham requires --energy")),
        None => (estimate_ree(&s.density, &s.layout, &opts)?, None),
    };
    info!(
        "E_R = {} (gap {}, {} iterations)",
        r.value, r.gap, r.iterations
    );
    let shortfall = (!r.converged).then(|| {
        format!(
            "solver stopped after {} iterations with gap {} above tolerance {}",
            r.iterations, r.gap, g.tol
        )
    });
    let mut file = SolveResultFile::new(header, &r, &opts);
    file.energy = energy;
    Ok(Output {
        text: format::to_json(&file),
        shortfall,
    })
}

fn functional_name(f: FunctionalArg) -> &'static str {
    match f {
        FunctionalArg::Entropy => "entropy",
        FunctionalArg::Qmi => "qmi",
        FunctionalArg::Cond => "cond",
        FunctionalArg::Ree => "ree",
    }
}

fn truncate(
    g: &Global,
    path: &Path,
    layout: &Option<Dims>,
    subset: &str,
    f: FunctionalArg,
    rmin: usize,
    rmax: Option<usize>,
) -> Outcome<Output> {
    let s = load_state(path, layout)?;
    let subset = parse_parties(subset, &s.layout)?;
    let rmax = rmax.unwrap_or(s.layout.max_local_dim());
    if rmin == 0 || rmin > rmax {
        return Err(invalid(format!("empty rank range {rmin}..={rmax}")));
    }
    let functional = match f {
        FunctionalArg::Entropy => Functional::Entropy,
        FunctionalArg::Qmi => Functional::Qmi,
        FunctionalArg::Cond => Functional::CondEntropy,
        FunctionalArg::Ree => Functional::Ree(solve_options(g)),
    };
    let rs: Vec<usize> = (rmin..=rmax).collect();
    let t = truncation_experiment(&s.density, &s.layout, &subset, &functional, &rs)?;
    let file = TruncationFile::new(Header::new("truncate", g.seed), functional_name(f), &t);
    let slack = g.tol * (1.0 + 1e-9);
    let shortfall = file
        .rows
        .iter()
        .find(|r| r.gap.is_some_and(|gap| gap > slack))
        .map(|r| {
            format!(
                "E_R gap {} at r = {} exceeds tolerance {}",
                r.gap.unwrap(),
                r.r,
                g.tol
            )
        });
    let text = match g.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => file.to_csv(),
        OutputFormat::Json => format::to_json(&file),
    };
    Ok(Output { text, shortfall })
}

fn point(epsilon: f64, t: Option<f64>, energy: Option<f64>, r: BoundReport) -> BoundPoint {
    BoundPoint {
        epsilon,
        t,
        energy,
        value: r.value,
        terms: r.terms.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        uncertainty: r.uncertainty,
    }
}

fn bounds(g: &Global, kind: &BoundsKind) -> Outcome<Output> {
    let (name, sweep_args) = match kind {
        BoundsKind::Finite { sweep, .. } => ("finite", sweep),
        BoundsKind::Energy { sweep, .. } => ("energy", sweep),
        BoundsKind::Iid { sweep, .. } => ("iid", sweep),
        BoundsKind::Oscillator { sweep, .. } => ("oscillator", sweep),
    };
    let (energy_args, t_args) = match kind {
        BoundsKind::Finite { .. } => (None, None),
        BoundsKind::Energy { energy, .. } => (Some(energy), None),
        BoundsKind::Iid { energy, t, .. } | BoundsKind::Oscillator { energy, t, .. } => {
            (Some(energy), Some(t))
        }
    };
    let base = BoundParams {
        epsilon: sweep_args.epsilon,
        energy: energy_args.and_then(|e| e.energy),
        t: t_args.and_then(|t| t.t),
    };
    let optimize = t_args.is_some_and(|t| t.optimize_t);
    let sweep = sweep_args.sweep.as_deref().map(parse_sweep).transpose()?;
    let params: Vec<BoundParams> = match &sweep {
        None => vec![base],
        Some((key, values)) => values
            .iter()
            .map(|&v| {
                let mut p = base;
                match key.as_str() {
                    "epsilon" => p.epsilon = Some(v),
                    "E" => p.energy = Some(v),
                    _ => p.t = Some(v),
                }
                p
            })
            .collect(),
    };
    if sweep.as_ref().is_some_and(|(k, _)| k == "t") && optimize {
        return Err(invalid(
            "--optimize-t cannot be combined with a sweep over t",
        ));
    }
    if sweep.as_ref().is_some_and(|(k, _)| k == "E") && energy_args.is_none() {
        return Err(invalid("this bound has no energy parameter"));
    }
    if sweep.as_ref().is_some_and(|(k, _)| k == "t") && t_args.is_none() {
        return Err(invalid("this bound has no t parameter"));
    }

    let family = BoundFamily::new(kind)?;
    let evaluate = |p: &BoundParams| -> Outcome<BoundPoint> {
        let eps = BoundParams::need(p.epsilon, "epsilon")?;
        family.eval(eps, p.energy, p.t, optimize)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.jobs)
        .build()
        .map_err(|e| Failure::Output(e.to_string()))?;
    let points = pool.install(|| params.par_iter().map(evaluate).collect::<Vec<_>>());
    let points = points.into_iter().collect::<Outcome<Vec<_>>>()?;

    let file = BoundsFile {
        header: Header::new(&format!("bounds {name}"), g.seed),
        kind: name.into(),
        points,
    };
    let default = if sweep.is_some() {
        OutputFormat::Csv
    } else {
        OutputFormat::Json
    };
    let text = match g.format.unwrap_or(default) {
        OutputFormat::Csv => file.to_csv(),
        OutputFormat::Json => format::to_json(&file),
    };
    Ok(Output::ok(text))
}

/// Parsed, parameter-independent part of a `bounds` invocation.
enum BoundFamily {
    Finite(Vec<usize>),
    Energy {
        m: usize,
        n: usize,
        hams: Vec<HamiltonianSpec>,
    },
    Iid {
        m: usize,
        n: usize,
        f_hat: FFunction,
    },
    Oscillator {
        m: usize,
        n: usize,
        osc: Oscillator,
    },
}

fn parties(e: &EnergyArgs) -> (usize, usize) {
    (e.m.unwrap_or(e.n.saturating_sub(1)), e.n)
}

impl BoundFamily {
    fn new(kind: &BoundsKind) -> Outcome<Self> {
        Ok(match kind {
            BoundsKind::Finite { dims, .. } => BoundFamily::Finite(dims.clone()),
            BoundsKind::Energy { energy, ham, .. } => {
                let (m, n) = parties(energy);
                BoundFamily::Energy {
                    m,
                    n,
                    hams: hamiltonians(ham, m)?,
                }
            }
            BoundsKind::Iid { energy, ham, .. } => {
                let (m, n) = parties(energy);
                let h = parse_hamiltonian(ham)?;
                let f_hat = match h.oscillator_descriptor() {
                    Some(o) => FFunction::OscillatorClosedForm(o.clone()),
                    None => FFunction::NumericGibbs(h),
                };
                BoundFamily::Iid { m, n, f_hat }
            }
            BoundsKind::Oscillator {
                energy,
                omegas,
                hbar,
                ..
            } => {
                let (m, n) = parties(energy);
                BoundFamily::Oscillator {
                    m,
                    n,
                    osc: Oscillator::new(omegas.clone(), *hbar)?,
                }
            }
        })
    }

    fn eval(
        &self,
        eps: f64,
        energy: Option<f64>,
        t: Option<f64>,
        optimize: bool,
    ) -> Outcome<BoundPoint> {
        let need_e = || BoundParams::need(energy, "energy");
        match self {
            BoundFamily::Finite(dims) => {
                let value = cb_finite_dim(eps, dims)?;
                let g = g_func(eps)?;
                let r = BoundReport {
                    value,
                    terms: vec![("entropy", value - g), ("g", g)],
                    uncertainty: 0.0,
                };
                Ok(point(eps, None, None, r))
            }
            BoundFamily::Energy { m, n, hams } => {
                let e = need_e()?;
                Ok(point(eps, None, Some(e), cb_energy(eps, e, *m, *n, hams)?))
            }
            BoundFamily::Iid { m, n, f_hat } => {
                let e = need_e()?;
                let t = pick_t(eps, t, optimize, |t| {
                    Ok(cb_energy_iid(eps, e, *m, *n, t, f_hat)?.value)
                })?;
                Ok(point(
                    eps,
                    Some(t),
                    Some(e),
                    cb_energy_iid(eps, e, *m, *n, t, f_hat)?,
                ))
            }
            BoundFamily::Oscillator { m, n, osc } => {
                let e = need_e()?;
                let t = pick_t(eps, t, optimize, |t| {
                    Ok(cb_oscillator(eps, e, t, osc, *m, *n)?.value)
                })?;
                Ok(point(
                    eps,
                    Some(t),
                    Some(e),
                    cb_oscillator(eps, e, t, osc, *m, *n)?,
                ))
            }
        }
    }
}

fn pick_t(
    eps: f64,
    t: Option<f64>,
    optimize: bool,
    f: impl FnMut(f64) -> multiree_core::Result<f64>,
) -> Outcome<f64> {
    if optimize {
        Ok(optimize_t(eps, f)?.0)
    } else {
        BoundParams::need(t, "t")
    }
}

fn lemma_omega(
    g: &Global,
    path: &Path,
    layout: &Option<Dims>,
    order: Option<&str>,
    ensemble_out: Option<&Path>,
) -> Outcome<Output> {
    let s = load_state(path, layout)?;
    let psi = match &s.pure {
        Some(p) => p.clone(),
        None => multiree_core::PureState::from_density(&s.density)?,
    };
    let order = order.map(|o| parse_parties(o, &s.layout)).transpose()?;
    let e = lemma_omega_state(&psi, &s.layout, order.as_deref())?;
    let sigma = e.assemble();
    let n = s.layout.parties();
    let mut distances = Vec::with_capacity(n);
    let mut bound = 0.0;
    for k in 0..n {
        let a = partial_trace(&s.density, &s.layout, &[k])?;
        let b = partial_trace(&sigma, &s.layout, &[k])?;
        distances.push(trace_distance(&a, &b)?);
        if k + 1 < n {
            bound += von_neumann_entropy(&a)?;
        }
    }
    let h = relative_entropy(&s.density, &sigma)?.to_f64();
    let ensemble = EnsembleFile::from_ensemble(&e);
    if let Some(p) = ensemble_out {
        fs::write(p, format::to_json(&ensemble))
            .map_err(|err| Failure::Output(format!("{}: {err}", p.display())))?;
    }
    let file = LemmaOmegaFile {
        header: Header::new("lemma-omega", g.seed),
        marginal_distances: distances,
        relative_entropy: h,
        bound,
        bound_holds: h <= bound + 1e-8,
        ensemble,
    };
    Ok(Output::ok(format::to_json(&file)))
}

/// Initializes logging from `MULTIREE_LOG` (default `warn`).
pub fn init_logging() {
    let env = env_logger::Env::new()
        .filter_or("MULTIREE_LOG", "warn")
        .write_style("MULTIREE_LOG_STYLE");
    let _ = env_logger::Builder::from_env(env).try_init();
}
