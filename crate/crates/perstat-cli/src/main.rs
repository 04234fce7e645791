//! `perstat`: command-line front end for the persistence toolkit.
//!
//! Subcommands cover state-based short-term persistence (`states`,
//! `metrics`, `markov`, `master`, `efold`), scaling estimators (`dfa`,
//! `mfdfa`, `rs`, `wavelet`, `acf`, `semivar`, `psd`, `crossover`),
//! synthetic series (`synth`), block rescaling (`rescale`), and the
//! clear-sky persistence forecast baselines (`forecast`).
//!
//! Conventions shared by every subcommand:
//! * CSV inputs carry one header row; columns are selected by header
//!   name or 0-based index.
//! * A JSON summary goes to stdout; `--out` writes the primary artifact
//!   plus a `<out>.manifest.json` recording how it was produced.
//! * `replay --manifest <path>` re-runs a manifest and verifies the
//!   outputs are byte-identical.
//! * Exit codes: 0 success, 2 usage error, 1 data error.
//! * Randomized subcommands require an explicit seed; nothing reads the
//!   wall clock.

mod args;
mod cmd;
mod io;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use args::{EstimatorKind, QSpec, RatesSpec, ScaleSpec};
use manifest::RunManifest;
use perstat::forecast::Variant;
use perstat::models::ArmaSpec;
use perstat::synth::GeneratorSpec;

#[derive(Parser, Debug)]
#[command(
    name = "perstat",
    version,
    about = "State-based and scaling persistence analysis for time series"
)]
struct Cli {
    /// Cap worker threads for internally parallel estimators (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Input file plus column selector, shared by most subcommands.
#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct InputOpt {
    /// Input CSV with one header row.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Column to analyze: header name or 0-based index.
    #[arg(long, default_value = "0", value_name = "NAME|IDX")]
    col: String,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct StatesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Strictly increasing thresholds, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true,
        value_name = "T1,T2,..."
    )]
    thresholds: Vec<f64>,
    /// State labels, one more than thresholds (default 0,1,...).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        value_name = "L0,L1,..."
    )]
    labels: Option<Vec<i64>>,
    /// Write the (index, state) table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct MetricsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Also write the JSON summary here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct MarkovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Markov order (history length).
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Write the transition-model JSON here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct DfaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Detrending polynomial order.
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Scale grid: "auto" or "min:max:count:log".
    #[arg(long, default_value = "auto")]
    scales: ScaleSpec,
    /// Write the (s, F) fluctuation table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct MfdfaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Detrending polynomial order.
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Scale grid: "auto" or "min:max:count:log".
    #[arg(long, default_value = "auto")]
    scales: ScaleSpec,
    /// Moment orders: "min:max:count" or "q1,q2,...".
    #[arg(long, default_value = "-4:4:9", allow_hyphen_values = true)]
    qs: QSpec,
    /// Write the (s, F, q) fluctuation table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct RsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Scale grid: "auto" or "min:max:count:log".
    #[arg(long, default_value = "auto")]
    scales: ScaleSpec,
    /// Write the (s, F) rescaled-range table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct WaveletArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Write the (level, variance) table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct AcfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Largest lag (default min(100, n/4)).
    #[arg(long, value_name = "K")]
    kmax: Option<usize>,
    /// Write the (lag, r) table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct SemivarArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Largest lag (default min(100, n/4); must be at most n/4).
    #[arg(long, value_name = "K")]
    kmax: Option<usize>,
    /// Write the (lag, gamma) table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct PsdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Fraction of the lowest frequencies used for the slope fit.
    #[arg(long, default_value_t = 0.25, value_name = "FRAC")]
    fit_fraction: f64,
    /// Write the (f, S) periodogram here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct EfoldArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Sample period of the series.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Also write the JSON summary here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct MasterArgs {
    /// Rate matrix, for example "n=2; 0->1=0.5; 1->0=0.5".
    #[arg(long)]
    rates: RatesSpec,
    /// Initial probability vector, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true,
        value_name = "P0,P1,..."
    )]
    p0: Vec<f64>,
    /// Integration horizon.
    #[arg(long)]
    t_end: f64,
    /// RK4 time step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Write the (t, p0, p1, ...) trajectory here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
#[command(group = ArgGroup::new("source").required(true).args(["spec", "arma"]))]
struct SynthArgs {
    /// Generator spec, for example "kind=ffm; beta=0.6; n=65536; seed=7".
    #[arg(long)]
    spec: Option<GeneratorSpec>,
    /// ARMA spec, for example "ar=0.9; ma=0.5; sigma=1; variant=standard".
    #[arg(long)]
    arma: Option<ArmaSpec>,
    /// Sample count (with --arma).
    #[arg(long, requires = "arma")]
    n: Option<usize>,
    /// Master seed (with --arma; --spec carries its own).
    #[arg(long, requires = "arma")]
    seed: Option<u64>,
    /// Write the (index, value) series here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct RescaleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Block length in samples.
    #[arg(long, value_name = "B")]
    block: usize,
    /// Sample period of the input series.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Write the block-averaged (index, value) series here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct ForecastArgs {
    /// Input CSV with timestamp, irradiance, and clear-sky columns.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Baseline variant: nv, cs-nv1, cs-nv2, cs-nv3, or cs-nv4.
    #[arg(long)]
    variant: Variant,
    /// Persistence window length in samples.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Clear-sky weight (cs-nv2, cs-nv4).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Persistence weight (cs-nv2, cs-nv4).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    /// Timestamp column (echoed verbatim).
    #[arg(long, default_value = "timestamp", value_name = "NAME|IDX")]
    timestamp_col: String,
    /// Observed irradiance column.
    #[arg(long, default_value = "irradiance", value_name = "NAME|IDX")]
    irradiance_col: String,
    /// Clear-sky model column.
    #[arg(long, default_value = "clearsky", value_name = "NAME|IDX")]
    clearsky_col: String,
    /// Write the (timestamp, prediction, valid) table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct CrossoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpt,
    /// Fluctuation estimator to fit two regimes on.
    #[arg(long, value_enum, default_value_t = EstimatorKind::Dfa)]
    estimator: EstimatorKind,
    /// Detrending polynomial order (dfa only).
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Scale grid: "auto" or "min:max:count:log".
    #[arg(long, default_value = "auto")]
    scales: ScaleSpec,
    /// Write the (s, F) fluctuation table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone, Debug, Serialize, Deserialize)]
struct ReplayArgs {
    /// Manifest written by a previous run.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "kebab-case")]
enum Command {
    /// Discretize a series into threshold states
    States(StatesArgs),
    /// Short-term persistence metrics of a state sequence
    Metrics(MetricsArgs),
    /// Fit an order-k Markov transition model
    Markov(MarkovArgs),
    /// Detrended fluctuation analysis
    Dfa(DfaArgs),
    /// Multifractal DFA
    Mfdfa(MfdfaArgs),
    /// Rescaled-range (R/S) Hurst estimate
    Rs(RsArgs),
    /// Haar wavelet variance scaling
    Wavelet(WaveletArgs),
    /// Autocorrelation function
    Acf(AcfArgs),
    /// Semivariogram and Hausdorff exponent
    Semivar(SemivarArgs),
    /// Periodogram and spectral persistence strength
    Psd(PsdArgs),
    /// AR(1) fit and e-folding decay time
    Efold(EfoldArgs),
    /// Integrate a master equation
    Master(MasterArgs),
    /// Generate a synthetic series
    Synth(SynthArgs),
    /// Block-average a series
    Rescale(RescaleArgs),
    /// Clear-sky persistence forecast baselines
    Forecast(ForecastArgs),
    /// Two-regime scaling fit
    Crossover(CrossoverArgs),
    /// Re-run a manifest and verify outputs byte-for-byte
    Replay(ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::States(_) => "states",
            Self::Metrics(_) => "metrics",
            Self::Markov(_) => "markov",
            Self::Dfa(_) => "dfa",
            Self::Mfdfa(_) => "mfdfa",
            Self::Rs(_) => "rs",
            Self::Wavelet(_) => "wavelet",
            Self::Acf(_) => "acf",
            Self::Semivar(_) => "semivar",
            Self::Psd(_) => "psd",
            Self::Efold(_) => "efold",
            Self::Master(_) => "master",
            Self::Synth(_) => "synth",
            Self::Rescale(_) => "rescale",
            Self::Forecast(_) => "forecast",
            Self::Crossover(_) => "crossover",
            Self::Replay(_) => "replay",
        }
    }
}

/// Invocation-level problem detected after clap parsing (bad flag
/// combination or value); exits 2 like a parse error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // A second invocation (impossible here) would fail; ignore it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(err) = run(cli.command) {
        if let Some(usage) = err.downcast_ref::<UsageError>() {
            eprintln!("usage error: {usage}");
            std::process::exit(2);
        }
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    if let Command::Replay(replay_args) = &command {
        return replay(replay_args);
    }
    let outcome = cmd::execute(&command)?;
    write_run_manifest(&command, &outcome)?;
    print_summary(&outcome.summary)
}

/// Prints the stdout JSON summary. A closed pipe (e.g. `| head`) is not
/// an error: artifacts are already on disk, so exit successfully.
fn print_summary(summary: &serde_json::Value) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(summary)?;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => Ok(other?),
    }
}

/// Writes `<out>.manifest.json` next to the primary output, if any.
fn write_run_manifest(command: &Command, outcome: &cmd::Outcome) -> Result<()> {
    let Some(primary) = outcome.outputs.first() else {
        return Ok(());
    };
    let run_manifest = RunManifest {
        tool: "perstat".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        rng_scheme: perstat::rng::RNG_SCHEME.into(),
        subcommand: command.name().into(),
        params: serde_json::to_value(command)?,
        resolved: outcome.resolved.clone(),
        inputs: outcome.inputs.clone(),
        seed: outcome.seed,
        outputs: outcome
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
    };
    manifest::write(&run_manifest, primary)?;
    Ok(())
}

/// Re-runs a manifest: verifies input digests, re-executes the recorded
/// command, and checks every recorded output is byte-identical.
fn replay(replay_args: &ReplayArgs) -> Result<()> {
    let man = manifest::load(&replay_args.manifest)?;
    let command: Command = serde_json::from_value(man.params.clone()).with_context(|| {
        format!(
            "{}: params do not parse as subcommand {:?}",
            replay_args.manifest.display(),
            man.subcommand
        )
    })?;
    if matches!(command, Command::Replay(_)) {
        bail!("cannot replay a replay manifest");
    }
    for (path, want) in &man.inputs {
        let bytes = fs::read(path)
            .with_context(|| format!("replay: input {path} from the manifest is missing"))?;
        let got = io::sha256_hex(&bytes);
        if got != *want {
            bail!(
                "replay: input {path} changed since the original run \
                 (digest {got}, manifest records {want})"
            );
        }
    }
    // Snapshot prior outputs so the rerun can be compared byte-for-byte.
    let mut previous: BTreeMap<&String, Option<Vec<u8>>> = BTreeMap::new();
    for out in &man.outputs {
        previous.insert(out, fs::read(out).ok());
    }
    let outcome = cmd::execute(&command)?;
    write_run_manifest(&command, &outcome)?;
    let mut verified = Vec::new();
    let mut regenerated = Vec::new();
    for out in &man.outputs {
        let new = fs::read(out)
            .with_context(|| format!("replay: rerun did not produce expected output {out}"))?;
        match &previous[out] {
            Some(old) if *old == new => verified.push(out.clone()),
            Some(_) => bail!("replay: output {out} is not byte-identical to the previous run"),
            None => regenerated.push(out.clone()),
        }
    }
    let report = serde_json::json!({
        "replayed": man.subcommand,
        "manifest": replay_args.manifest.display().to_string(),
        "verified": verified,
        "regenerated": regenerated,
        "summary": outcome.summary,
    });
    print_summary(&report)
}
