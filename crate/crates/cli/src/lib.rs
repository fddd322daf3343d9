//! Command implementations behind the `chansplit` binary. Each subcommand
//! writes CSV (or JSON) files into the output directory and returns the
//! paths it wrote.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chansplit::csv::fmt_sig;
use chansplit::exponents::{self, curves_to_csv, ExponentCurve};
use chansplit::gf2::{basic_kernel, BitMatrix, GOLAY_DUAL_P};
use chansplit::split::{chain_rates, spectral_chain, ChainModel, RateAllocation};
use chansplit::{Channel, InputDist, LabelMap};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<chansplit::Error> for CliError {
    fn from(e: chansplit::Error) -> Self {
        match e {
            chansplit::Error::Io(io) => CliError::Io(io),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "chansplit", version, about = "Cutoff rates of combined and split channels")]
pub struct Cli {
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; 0 picks automatically.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponent and cutoff-rate curves for the QEC versus two BECs.
    Massey(MasseyArgs),
    /// Split cutoff rates of two combined BECs against the erasure probability.
    BecSplit(SplitArgs),
    /// Split cutoff rates of two combined BSCs against the crossover probability.
    BscSplit(SplitArgs),
    /// Rate allocations for Kronecker powers of the 2x2 kernel on a BSC.
    Kron(KronArgs),
    /// Rate allocation for a label map built from a systematic block code.
    Code(CodeArgs),
    /// Cutoff rate, capacity and exponents of a channel read from JSON.
    Channel(ChannelArgs),
}

#[derive(Debug, Args)]
pub struct MasseyArgs {
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Rate grid `start:step:end`; defaults to `0:0.01:C(QEC)`.
    #[arg(long)]
    pub rates: Option<String>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Grid `start:step:end`; defaults to `0:0.01:1` (BEC) or `0:0.01:0.5` (BSC).
    #[arg(long)]
    pub eps_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct KronArgs {
    /// Largest Kronecker power; every power from 1 to K is evaluated.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Use the identity kernel instead of [[1,0],[1,1]].
    #[arg(long)]
    pub identity: bool,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Generator parity file (`k n-k` header, then k rows of 0/1); the
    /// bundled dual-Golay matrix when omitted.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// Rates at which to evaluate the random-coding exponent.
    #[arg(long)]
    pub rates: Option<String>,
}

/// Parses `start:step:end` into an increasing grid. Points are rounded to
/// 12 significant digits so that `0:0.01:1` yields exactly `0.07`, etc.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Validation(format!("grid {text:?} must be start:step:end"));
    let parts: Vec<f64> =
        text.split(':').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<CliResult<_>>()?;
    let [start, step, end] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(CliError::Validation(format!("grid {text:?} must have step > 0 and end >= start")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(CliError::Validation(format!("grid {text:?} has too many points")));
    }
    Ok((0..count)
        .map(|j| {
            let x = start + j as f64 * step;
            fmt_sig(x).parse::<f64>().expect("formatted float parses")
        })
        .collect())
}

fn default_grid(start: f64, step: f64, end: f64) -> Vec<f64> {
    parse_grid(&format!("{start}:{step}:{end}")).expect("static grid")
}

fn write(out: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    match &cli.command {
        Command::Massey(a) => run_massey(&cli.out, a),
        Command::BecSplit(a) => run_split_family(&cli.out, SplitKind::Bec, a),
        Command::BscSplit(a) => run_split_family(&cli.out, SplitKind::Bsc, a),
        Command::Kron(a) => run_kron(&cli.out, a),
        Command::Code(a) => run_code(&cli.out, a),
        Command::Channel(a) => run_channel(&cli.out, a),
    }
}

/// Writes `fig1_exponents.csv` and `fig2_rates.csv`.
pub fn run_massey(out: &Path, a: &MasseyArgs) -> CliResult<Vec<PathBuf>> {
    let cap = exponents::mec_capacity(4, a.eps)?;
    let rates = match &a.rates {
        Some(g) => parse_grid(g)?,
        None => default_grid(0.0, 0.01, cap),
    };
    let (qec, split) = exponents::massey_curves(a.eps, &rates)?;
    let fig1 = write(out, "fig1_exponents.csv", &curves_to_csv(&[qec, split])?)?;
    let curves = exponents::massey_rate_curves(&default_grid(0.0, 0.01, 1.0))?;
    let fig2 = write(out, "fig2_rates.csv", &curves_to_csv(&curves)?)?;
    Ok(vec![fig1, fig2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Bec,
    Bsc,
}

impl SplitKind {
    fn channel(self, eps: f64) -> chansplit::Result<Channel> {
        match self {
            SplitKind::Bec => Channel::bec(eps),
            SplitKind::Bsc => Channel::bsc(eps),
        }
    }

    fn file_name(self) -> &'static str {
        match self {
            SplitKind::Bec => "fig4_bec_split.csv",
            SplitKind::Bsc => "fig5_bsc_split.csv",
        }
    }

    fn max_eps(self) -> f64 {
        match self {
            SplitKind::Bec => 1.0,
            SplitKind::Bsc => 0.5,
        }
    }
}

/// One row of a split family: baseline `E0(1, uniform, V)`, both stage
/// rates under the 2x2 kernel, and the normalized sum.
pub fn split_row(kind: SplitKind, eps: f64) -> chansplit::Result<[f64; 4]> {
    let v = kind.channel(eps)?;
    let base = v.e0(1.0, &InputDist::uniform(2))?;
    let chain = ChainModel::uniform(v, LabelMap::linear(basic_kernel())?)?;
    let r = chain_rates(&chain)?;
    Ok([base, r.per_subchannel[0], r.per_subchannel[1], r.normalized])
}

pub fn run_split_family(out: &Path, kind: SplitKind, a: &SplitArgs) -> CliResult<Vec<PathBuf>> {
    let grid = match &a.eps_grid {
        Some(g) => parse_grid(g)?,
        None => default_grid(0.0, 0.01, kind.max_eps()),
    };
    let rows = grid.iter().map(|&e| split_row(kind, e)).collect::<chansplit::Result<Vec<_>>>()?;
    let labels = ["r0_base", "r0_stage1", "r0_stage2", "normalized"];
    let curves = labels
        .iter()
        .enumerate()
        .map(|(j, l)| ExponentCurve::new(*l, grid.clone(), rows.iter().map(|r| r[j]).collect()))
        .collect::<chansplit::Result<Vec<_>>>()?;
    Ok(vec![write(out, kind.file_name(), &curves_to_csv(&curves)?)?])
}

/// Largest `n` handled by explicit enumeration in `kron`; larger maps use
/// the spectral path.
pub const KRON_BRUTE_MAX_N: usize = 8;

pub fn kron_allocation(k: usize, eps: f64, identity: bool) -> chansplit::Result<RateAllocation> {
    let kernel = if identity { BitMatrix::identity(2) } else { basic_kernel() };
    let f = kernel.kron_power(k)?;
    if f.rows() <= KRON_BRUTE_MAX_N {
        chain_rates(&ChainModel::uniform(Channel::bsc(eps)?, LabelMap::linear(f)?)?)
    } else {
        spectral_chain(eps, &f)
    }
}

pub fn run_kron(out: &Path, a: &KronArgs) -> CliResult<Vec<PathBuf>> {
    if a.k == 0 || a.k > 5 {
        return Err(CliError::Validation(format!("k = {} outside 1..=5", a.k)));
    }
    let mut written = Vec::new();
    let mut summary = String::from("k,n,sum,normalized\n");
    for k in 1..=a.k {
        let r = kron_allocation(k, a.eps, a.identity)?;
        written.push(write(out, &format!("kron_k{k}.csv"), &r.to_csv())?);
        summary.push_str(&format!("{k},{},{},{}\n", r.len(), fmt_sig(r.sum), fmt_sig(r.normalized)));
    }
    written.push(write(out, "kron_summary.csv", &summary)?);
    Ok(written)
}

pub fn load_generator(path: Option<&Path>) -> CliResult<BitMatrix> {
    let text = match path {
        Some(p) => fs::read_to_string(p)?,
        None => GOLAY_DUAL_P.to_string(),
    };
    Ok(text.parse::<BitMatrix>()?)
}

pub fn code_allocation(p: &BitMatrix, eps: f64) -> chansplit::Result<RateAllocation> {
    spectral_chain(eps, &BitMatrix::from_generator(p))
}

/// Writes `fig6_allocation.csv`.
pub fn run_code(out: &Path, a: &CodeArgs) -> CliResult<Vec<PathBuf>> {
    let p = load_generator(a.generator.as_deref())?;
    let r = code_allocation(&p, a.eps)?;
    Ok(vec![write(out, "fig6_allocation.csv", &r.to_csv())?])
}

pub fn channel_report(w: &Channel, rates: &[f64]) -> chansplit::Result<serde_json::Value> {
    let e0 = w.e0(1.0, &InputDist::uniform(w.num_inputs()))?;
    let er = rates
        .iter()
        .map(|&r| Ok(json!({ "rate": r, "exponent": exponents::er(r, w)? })))
        .collect::<chansplit::Result<Vec<_>>>()?;
    Ok(json!({
        "inputs": w.num_inputs(),
        "outputs": w.num_outputs(),
        "e0_uniform": e0,
        "cutoff_rate": w.cutoff_rate(),
        "capacity": w.capacity(),
        "er": er,
    }))
}

/// Writes `channel_report.json` and returns it.
pub fn run_channel(out: &Path, a: &ChannelArgs) -> CliResult<Vec<PathBuf>> {
    let text = fs::read_to_string(&a.file)?;
    let w = Channel::from_json(&text)?;
    let rates = match &a.rates {
        Some(g) => parse_grid(g)?,
        None => Vec::new(),
    };
    let report = channel_report(&w, &rates)?;
    let body = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{body}");
    Ok(vec![write(out, "channel_report.json", &(body + "\n"))?])
}
