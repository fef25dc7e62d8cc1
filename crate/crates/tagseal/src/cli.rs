//! Command-line interface.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use tagseal_core::group::{
    check_transcript, gen_group_params, run_protocol, MemoryBus, ProtocolSetup,
};
use tagseal_core::lab::gaussian::{gaussian_threshold_demo, GaussianDemoParams};
use tagseal_core::lab::{CurveConfig, PadMode};
use tagseal_core::{open_tag, seal_tag, HiddenTag};
use thiserror::Error;

use crate::driver::run_protocol_threaded;
use crate::formats;
use crate::harness::run_curve_parallel;
use crate::rng::run_rng;

#[derive(Debug, Parser)]
#[command(
    name = "tagseal",
    version,
    about = "Correlation-resistant tag sealing and attack experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a safe-prime group and write it as JSON.
    GroupGen(GroupGenArgs),
    /// Run the key distribution protocol and write the agreed key.
    Exchange(ExchangeArgs),
    /// Scramble and encrypt a tag into one JSON record line.
    Seal(SealArgs),
    /// Decrypt and decode every record in a file.
    Open(OpenArgs),
    /// Sweep correlation against the bit ratio B/b and write CSV.
    AttackCurve(AttackCurveArgs),
    /// Monte Carlo study of a correlated side measurement.
    GaussianDemo(GaussianArgs),
}

#[derive(Debug, Args)]
pub struct GroupGenArgs {
    /// Bit length of the prime p.
    #[arg(long, default_value_t = 512)]
    pub bits: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExchangeArgs {
    /// Number of members besides the distributor.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Key file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the transcript as JSON lines.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Run every party on its own thread.
    #[arg(long)]
    pub threaded: bool,
}

#[derive(Debug, Args)]
pub struct SealArgs {
    /// Tag value, decimal.
    #[arg(long)]
    pub tag: String,
    /// Declared tag width b.
    #[arg(long, default_value_t = 32)]
    pub tag_bits: u32,
    /// Code width B, at least 2b (default 2b).
    #[arg(long)]
    pub budget: Option<u32>,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long, default_value = "")]
    pub manifest_id: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OpenArgs {
    #[arg(long)]
    pub record: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncryptedMode {
    No,
    Yes,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PadModeArg {
    Fixed,
    Fresh,
}

#[derive(Debug, Args)]
pub struct AttackCurveArgs {
    /// Tag widths, comma separated (default 10,30,100; quick 10,30).
    #[arg(long, value_delimiter = ',')]
    pub b_list: Option<Vec<u32>>,
    /// Ratios B/b, comma separated (default 2..10).
    #[arg(long, value_delimiter = ',')]
    pub ratio_list: Option<Vec<f64>>,
    /// Samples T per cell (default 10000; quick 2000).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Smaller sweep for a fast look.
    #[arg(long)]
    pub quick: bool,
    /// Run on ciphers instead of (or alongside) plain codes.
    #[arg(long, value_enum, num_args = 0..=1, default_value = "no", default_missing_value = "yes")]
    pub encrypted: EncryptedMode,
    #[arg(long, value_enum, default_value = "fresh")]
    pub pad_mode: PadModeArg,
    /// First seed of the sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds per point.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_m: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(input(&path.display().to_string()))
}

/// Write to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, bytes).map_err(input(&path.display().to_string())),
        None => io::stdout().write_all(bytes).map_err(input("stdout")),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GroupGen(args) => group_gen(args),
        Command::Exchange(args) => exchange(args),
        Command::Seal(args) => seal(args),
        Command::Open(args) => open(args),
        Command::AttackCurve(args) => attack_curve(args),
        Command::GaussianDemo(args) => gaussian_demo(args),
    }
}

fn group_gen(args: GroupGenArgs) -> Result<(), CliError> {
    let mut rng = run_rng(args.seed);
    let params = gen_group_params(args.bits, &mut rng).map_err(input("group generation"))?;
    let mut out = Vec::new();
    formats::write_params(&mut out, &params).map_err(input("params"))?;
    emit(args.out.as_deref(), &out)?;
    eprintln!(
        "p: {} bits, q: {} bits, alpha: {} bits",
        params.p().bits(),
        params.q().bits(),
        params.alpha().bits()
    );
    Ok(())
}

fn load_params(path: &Path) -> Result<tagseal_core::GroupParams, CliError> {
    let params =
        formats::read_params(&read_text(path)?).map_err(input(&path.display().to_string()))?;
    // Fixed generator: checking primality is not secret work and must not
    // disturb the run's random stream.
    params
        .verify_primes(&mut run_rng(Some(0)))
        .map_err(input(&path.display().to_string()))?;
    Ok(params)
}

fn exchange(args: ExchangeArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let params = load_params(&args.params)?;
    let mut rng = run_rng(args.seed);
    let setup = ProtocolSetup::random(args.n, &params, &mut rng);
    let outcome = if args.threaded {
        run_protocol_threaded(&params, &setup)
    } else {
        run_protocol(&params, &setup, &mut MemoryBus::new())
    }
    .map_err(|e| CliError::Invariant(e.to_string()))?;

    let key = outcome
        .agreed_key()
        .ok_or_else(|| CliError::Invariant("parties derived different keys".into()))?;
    if *key != setup.reference_key(&params) {
        return Err(CliError::Invariant(
            "agreed key differs from the exponent product".into(),
        ));
    }
    check_transcript(&params, &outcome.transcript, args.n, key)
        .map_err(|e| CliError::Invariant(e.to_string()))?;

    if let Some(path) = &args.transcript {
        let mut out = Vec::new();
        formats::write_transcript(&mut out, &outcome.transcript).map_err(input("transcript"))?;
        emit(Some(path), &out)?;
    }
    let mut out = Vec::new();
    formats::write_key(&mut out, key).map_err(input("key"))?;
    emit(args.out.as_deref(), &out)?;
    eprintln!(
        "{} parties agreed; {} messages",
        args.n + 1,
        outcome.transcript.len()
    );
    Ok(())
}

fn load_key(path: &Path) -> Result<tagseal_core::SharedKey, CliError> {
    formats::read_key(&read_text(path)?).map_err(input(&path.display().to_string()))
}

fn seal(args: SealArgs) -> Result<(), CliError> {
    let value = BigUint::parse_bytes(args.tag.trim().as_bytes(), 10)
        .ok_or_else(|| CliError::Input(format!("--tag is not a decimal integer: {}", args.tag)))?;
    let tag = HiddenTag::new(value, args.tag_bits).map_err(input("--tag"))?;
    let budget = args.budget.unwrap_or(args.tag_bits.saturating_mul(2));
    let key = load_key(&args.key)?;
    let mut rng = run_rng(args.seed);
    let record =
        seal_tag(&tag, budget, &key, &args.manifest_id, &mut rng).map_err(input("seal"))?;
    let mut line = formats::record_to_line(&record).map_err(input("record"))?;
    line.push('\n');
    emit(args.out.as_deref(), line.as_bytes())
}

fn open(args: OpenArgs) -> Result<(), CliError> {
    let key = load_key(&args.key)?;
    let file = fs::File::open(&args.record).map_err(input(&args.record.display().to_string()))?;
    let records = formats::read_records(BufReader::new(file))
        .map_err(input(&args.record.display().to_string()))?;
    let mut out = String::new();
    for record in &records {
        out.push_str(&open_tag(record, &key).to_string());
        out.push('\n');
    }
    emit(args.out.as_deref(), out.as_bytes())
}

fn curve_config(args: &AttackCurveArgs) -> CurveConfig {
    let mut config = if args.quick {
        CurveConfig::quick()
    } else {
        CurveConfig::default()
    };
    if let Some(b_list) = &args.b_list {
        config.b_list = b_list.clone();
    }
    if let Some(ratio_list) = &args.ratio_list {
        config.ratio_list = ratio_list.clone();
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    config.encrypted_modes = match args.encrypted {
        EncryptedMode::No => vec![false],
        EncryptedMode::Yes => vec![true],
        EncryptedMode::Both => vec![false, true],
    };
    config.pad_mode = match args.pad_mode {
        PadModeArg::Fixed => PadMode::Fixed,
        PadModeArg::Fresh => PadMode::Fresh,
    };
    config.seeds = (0..args.seeds).map(|i| args.seed.wrapping_add(i)).collect();
    config
}

fn attack_curve(args: AttackCurveArgs) -> Result<(), CliError> {
    let config = curve_config(&args);
    let report = run_curve_parallel(&config).map_err(input("attack-curve"))?;
    if let Some(row) = report
        .rows
        .iter()
        .find(|r| !(0.0..=1.0 + 1e-9).contains(&r.rho))
    {
        return Err(CliError::Invariant(format!(
            "correlation {} outside [0, 1]",
            row.rho
        )));
    }
    let mut out = Vec::new();
    formats::write_report(&mut out, &report).map_err(input("report"))?;
    emit(args.out.as_deref(), &out)?;
    eprintln!("{} cells", report.rows.len());
    Ok(())
}

fn gaussian_demo(args: GaussianArgs) -> Result<(), CliError> {
    let params = GaussianDemoParams {
        rho: args.rho,
        sigma_m: args.sigma_m,
        sigma_h: args.sigma_h,
        beta: args.beta,
        trials: args.trials,
    };
    let mut rng = run_rng(args.seed);
    let result = gaussian_threshold_demo(&params, &mut rng).map_err(input("gaussian-demo"))?;
    if !(result.var_ratio.is_finite() && result.var_ratio >= 0.0) {
        return Err(CliError::Invariant(format!(
            "variance ratio {}",
            result.var_ratio
        )));
    }
    let mut out = Vec::new();
    formats::write_gaussian(&mut out, &result).map_err(input("result"))?;
    emit(args.out.as_deref(), &out)
}
