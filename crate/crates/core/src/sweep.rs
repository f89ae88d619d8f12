//! Parameter sweeps over `gamma` or chain length, with CSV/JSON output.

use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::noise::{default_substeps, NoJumpForm};
use crate::oracle::{run_protocol_density, ORACLE_MAX_QUBITS};
use crate::protocol::{run_experiment, ExperimentConfig, OutcomeMode, DEFAULT_SEED, DEFAULT_TRAJECTORIES};
use crate::state::{QubitState, MAX_QUBITS};

pub const CSV_HEADER: &str = "n,gamma,n_traj,fidelity_mean,fidelity_sem,fidelity_oracle,wall_seconds,master_seed";

/// Which parameter a sweep varies, with its values in run order.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    Gamma(Vec<f64>),
    Qubits(Vec<usize>),
}

impl SweepSpec {
    pub fn len(&self) -> usize {
        match self {
            SweepSpec::Gamma(v) => v.len(),
            SweepSpec::Qubits(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|item| item.trim().parse::<T>().map_err(|_| format!("cannot parse '{item}'")))
        .collect()
}

impl FromStr for SweepSpec {
    type Err = String;

    /// `gamma=START:STOP:COUNT`, `gamma=A,B,...`, `n=A,B,...` or
    /// `n=START:STOP` (inclusive).
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (name, values) =
            text.split_once('=').ok_or_else(|| format!("expected VAR=VALUES, got '{text}'"))?;
        let spec = match name.trim() {
            "gamma" => {
                let fields: Vec<&str> = values.split(':').collect();
                let gammas = match fields.as_slice() {
                    [start, stop, count] => {
                        let start: f64 = start.parse().map_err(|_| format!("bad start '{start}'"))?;
                        let stop: f64 = stop.parse().map_err(|_| format!("bad stop '{stop}'"))?;
                        let count: usize = count.parse().map_err(|_| format!("bad count '{count}'"))?;
                        match count {
                            0 => Vec::new(),
                            1 => vec![start],
                            _ => (0..count)
                                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                                .collect(),
                        }
                    }
                    [list] => parse_list(list)?,
                    _ => return Err(format!("gamma sweep wants START:STOP:COUNT or a list, got '{values}'")),
                };
                if let Some(bad) = gammas.iter().find(|g| !g.is_finite() || **g < 0.0) {
                    return Err(format!("gamma must be finite and >= 0, got {bad}"));
                }
                SweepSpec::Gamma(gammas)
            }
            "n" => {
                let qubits = match values.split_once(':') {
                    Some((start, stop)) => {
                        let start: usize = start.parse().map_err(|_| format!("bad start '{start}'"))?;
                        let stop: usize = stop.parse().map_err(|_| format!("bad stop '{stop}'"))?;
                        (start..=stop).collect()
                    }
                    None => parse_list(values)?,
                };
                if let Some(bad) = qubits.iter().find(|&&n| n < 3) {
                    return Err(format!("chain length must be >= 3, got {bad}"));
                }
                SweepSpec::Qubits(qubits)
            }
            other => return Err(format!("unknown sweep variable '{other}' (use gamma or n)")),
        };
        if spec.is_empty() {
            return Err("sweep has no values".into());
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "teleport-sweep",
    about = "Teleportation fidelity through a damped swap chain, by quantum trajectories"
)]
struct Args {
    /// Chain length n.
    #[arg(long, default_value_t = 9)]
    qubits: usize,
    /// Dimensionless damping rate per swap interval.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Trajectories per sweep point.
    #[arg(long, default_value_t = DEFAULT_TRAJECTORIES)]
    trajectories: usize,
    /// Monte Carlo steps per swap interval [default: max(100*ceil(gamma), 100)].
    #[arg(long)]
    substeps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Teleported state as ALPHA_RE,ALPHA_IM,BETA_RE,BETA_IM.
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    /// gamma=START:STOP:COUNT, gamma=LIST, n=LIST or n=START:STOP.
    #[arg(long)]
    sweep: Option<SweepSpec>,
    /// Also integrate the master equation (n <= 8).
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Score one sampled Bell outcome per trajectory instead of averaging.
    #[arg(long)]
    sample_outcomes: bool,
    /// Use the first-order no-jump propagator instead of the exact one.
    #[arg(long)]
    paper_no_jump: bool,
    /// Worker threads for the trajectory ensemble.
    #[arg(long)]
    workers: Option<usize>,
}

/// Everything one command line asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    /// Fixed parameters; the swept one is overridden per point.
    pub base: ExperimentConfig,
    pub sweep: SweepSpec,
    /// Explicit sub-step count, or `None` to derive it from each point's gamma.
    pub substeps: Option<usize>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Invocation {
    /// Experiment configurations in sweep order.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let at = |num_qubits: usize, gamma: f64| {
            let mut config = ExperimentConfig { num_qubits, gamma, ..self.base.clone() };
            config.substeps = self.substeps.unwrap_or_else(|| default_substeps(gamma));
            config
        };
        match &self.sweep {
            SweepSpec::Gamma(gammas) => gammas.iter().map(|&g| at(self.base.num_qubits, g)).collect(),
            SweepSpec::Qubits(ns) => ns.iter().map(|&n| at(n, self.base.gamma)).collect(),
        }
    }
}

fn parse_state(text: &str) -> Result<QubitState, String> {
    let parts: Vec<f64> = parse_list(text)?;
    let [ar, ai, br, bi] = parts[..] else {
        return Err(format!("--state wants 4 comma-separated numbers, got {}", parts.len()));
    };
    QubitState::new(Complex64::new(ar, ai), Complex64::new(br, bi)).map_err(|e| e.to_string())
}

/// Parses a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let invalid = |msg: String| Args::command().error(ErrorKind::ValueValidation, msg);

    let psi = match &args.state {
        Some(text) => parse_state(text).map_err(invalid)?,
        None => QubitState::plus(),
    };
    let sweep = args.sweep.clone().unwrap_or_else(|| SweepSpec::Gamma(vec![args.gamma]));
    let mut base = ExperimentConfig::new(args.qubits, args.gamma)
        .with_trajectories(args.trajectories)
        .with_seed(args.seed)
        .with_psi(psi);
    base.use_oracle = args.oracle;
    base.workers = args.workers;
    if args.sample_outcomes {
        base.outcomes = OutcomeMode::Sampled;
    }
    if args.paper_no_jump {
        base.no_jump = NoJumpForm::FirstOrder;
    }
    let invocation =
        Invocation { base, sweep, substeps: args.substeps, format: args.format, out: args.out };

    if args.trajectories == 0 {
        return Err(invalid("--trajectories must be >= 1".into()));
    }
    if args.workers == Some(0) {
        return Err(invalid("--workers must be >= 1".into()));
    }
    if !args.gamma.is_finite() || args.gamma < 0.0 {
        return Err(invalid(format!("--gamma must be finite and >= 0, got {}", args.gamma)));
    }
    for point in invocation.points() {
        if point.num_qubits < 3 {
            return Err(invalid(format!("chain length must be >= 3, got {}", point.num_qubits)));
        }
        if let Err(e) = point.noise_model() {
            return Err(invalid(e.to_string()));
        }
    }
    Ok(invocation)
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub gamma: f64,
    pub n_traj: usize,
    pub fidelity_mean: f64,
    pub fidelity_sem: f64,
    pub fidelity_oracle: Option<f64>,
    pub wall_seconds: f64,
    pub master_seed: u64,
}

/// A sweep that stopped early; `completed` holds the rows finished before
/// the failing point.
#[derive(Debug, thiserror::Error)]
#[error("sweep aborted after {} point(s): {source}", completed.len())]
pub struct SweepAborted {
    pub completed: Vec<ResultRow>,
    #[source]
    pub source: Error,
}

fn run_point(config: &ExperimentConfig) -> Result<ResultRow, Error> {
    if config.num_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(config.num_qubits));
    }
    let started = Instant::now();
    let stats = run_experiment(config)?;
    let fidelity_oracle = if !config.use_oracle {
        None
    } else if config.num_qubits > ORACLE_MAX_QUBITS {
        log::warn!(
            "oracle skipped at n = {} (limit {ORACLE_MAX_QUBITS}); column left empty",
            config.num_qubits
        );
        None
    } else {
        Some(run_protocol_density(config)?)
    };
    Ok(ResultRow {
        n: config.num_qubits,
        gamma: config.gamma,
        n_traj: stats.n_traj,
        fidelity_mean: stats.mean_fidelity,
        fidelity_sem: stats.sem,
        fidelity_oracle,
        wall_seconds: started.elapsed().as_secs_f64(),
        master_seed: config.master_seed,
    })
}

/// Runs every sweep point in order.
pub fn execute(invocation: &Invocation) -> Result<Vec<ResultRow>, SweepAborted> {
    let mut rows = Vec::with_capacity(invocation.sweep.len());
    for config in invocation.points() {
        match run_point(&config) {
            Ok(row) => {
                log::info!("n = {} gamma = {}: F = {:.6} +- {:.6}", row.n, row.gamma, row.fidelity_mean, row.fidelity_sem);
                rows.push(row);
            }
            Err(source) => return Err(SweepAborted { completed: rows, source }),
        }
    }
    Ok(rows)
}

/// Decimal (never exponent) notation with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn rounded(x: f64) -> f64 {
    format_sig12(x).parse().expect("formatted float parses")
}

/// Writes rows as CSV (with header) or as a JSON array of objects.
pub fn emit<W: Write>(rows: &[ResultRow], format: OutputFormat, out: &mut W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.n,
                    format_sig12(row.gamma),
                    row.n_traj,
                    format_sig12(row.fidelity_mean),
                    format_sig12(row.fidelity_sem),
                    row.fidelity_oracle.map(format_sig12).unwrap_or_default(),
                    format_sig12(row.wall_seconds),
                    row.master_seed,
                )?;
            }
        }
        OutputFormat::Json => {
            let rounded_rows: Vec<ResultRow> = rows
                .iter()
                .map(|row| ResultRow {
                    gamma: rounded(row.gamma),
                    fidelity_mean: rounded(row.fidelity_mean),
                    fidelity_sem: rounded(row.fidelity_sem),
                    fidelity_oracle: row.fidelity_oracle.map(rounded),
                    wall_seconds: rounded(row.wall_seconds),
                    ..row.clone()
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rounded_rows)?;
            writeln!(out)?;
        }
    }
    out.flush()
}
