//! The `hopcall` command-line tool.
//!
//! Six subcommands cover the whole monitoring workflow:
//!
//! ```text
//! hopcall store --exemplar grumble=g.wav --exemplar alarm=a.wav --output model.json
//! hopcall classify --model model.json pen4.wav pen5.wav --output segments.csv
//! hopcall bouts --input segments.csv --output bouts.csv
//! hopcall evaluate --predicted bouts.csv --truth annotations.csv
//! hopcall spectrogram pen4.wav --output pen4.png
//! hopcall bench --model model.json pen4.wav
//! ```
//!
//! Tunable parameters resolve in three layers: an explicit flag wins, then a
//! value from the optional `--config` file (plain `key = value` lines, `#`
//! comments), then the built-in default. Exit codes are `0` on success, `1`
//! for anything wrong with the invocation or its input files, and `2` for
//! internal failures that indicate a bug in this tool.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::audio::{load_wav, AudioError};
use crate::bench::run_bench;
use crate::bout_io::{
    bouts_from_csv, bouts_to_csv, classifications_from_csv, classifications_to_csv, CsvError,
};
use crate::classify::{classify_file, store_from_audio, ClassifyParams, PipelineError};
use crate::model_file::{load_model, save_model, ModelFileError};
use crate::report_fmt::{format_report_text, report_to_json};
use crate::spectral::{SpectralError, SpectralParams, WindowKind};
use crate::spectrogram::{write_spectrogram_png, SpectrogramError};
use hopcall_core::bout::BoutError;
use hopcall_core::encoder::EncoderError;
use hopcall_core::hopfield::HopfieldError;
use hopcall_core::metrics::MetricsError;
use hopcall_core::peaks::PeakSetError;
use hopcall_core::{
    extract_bouts, match_bouts, report, Bout, BoutRules, CallRule, CapacityPolicy,
    ConfusionCounts, EncoderConfig, FrequencyBand, HopfieldModel, SegmentClassification,
};

/// Successful run.
pub const EXIT_OK: i32 = 0;
/// Anything wrong with the invocation or its inputs.
pub const EXIT_USER: i32 = 1;
/// A bug in this tool.
pub const EXIT_INTERNAL: i32 = 2;

const DEFAULT_NEURONS: usize = 14;
const DEFAULT_BAND_LOW_HZ: f64 = 0.0;
const DEFAULT_BAND_HIGH_HZ: f64 = 1300.0;
const DEFAULT_THRESHOLD: f64 = 0.1;
const DEFAULT_FFT_SIZE: usize = 1024;
const DEFAULT_SEGMENT_LEN_S: f64 = 1.0;
const DEFAULT_MAX_PASSES: usize = 100;
const DEFAULT_NONCALL_MIN_S: f64 = 1.0;
const DEFAULT_NONCALL_MAX_S: f64 = 60.0;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "hopcall",
    version,
    about = "Hopfield-network call detection for long bioacoustic recordings"
)]
pub struct Cli {
    /// Config file supplying defaults for tunable flags (key = value lines).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// One workflow step.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Store labelled exemplar calls in a new model file
    Store(StoreArgs),
    /// Classify recordings second by second against a stored model
    Classify(ClassifyArgs),
    /// Aggregate per-segment labels into call bouts
    Bouts(BoutsArgs),
    /// Score predicted bouts against ground-truth annotations
    Evaluate(EvaluateArgs),
    /// Render a recording as a PNG spectrogram
    Spectrogram(SpectrogramArgs),
    /// Measure storage and classification throughput
    Bench(BenchArgs),
}

/// Arguments of `hopcall store`.
#[derive(Debug, Args)]
pub struct StoreArgs {
    /// Labelled exemplar as LABEL=CALL.wav (repeat per exemplar)
    #[arg(long = "exemplar", value_name = "LABEL=WAV", required = true)]
    pub exemplars: Vec<String>,
    /// Where to write the model JSON
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Neurons, i.e. frequency bins of the encoding [default: 14]
    #[arg(long)]
    pub neurons: Option<usize>,
    /// Lower band edge in Hz [default: 0]
    #[arg(long)]
    pub band_low: Option<f64>,
    /// Upper band edge in Hz [default: 1300]
    #[arg(long)]
    pub band_high: Option<f64>,
    /// Peak threshold relative to the spectrum maximum [default: 0.1]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// FFT frame length [default: 1024]
    #[arg(long)]
    pub fft_size: Option<usize>,
    /// Analysis window: hamming, hann or rectangular [default: hamming]
    #[arg(long)]
    pub window: Option<String>,
    /// Build the model even when the exemplar count exceeds the capacity
    /// estimate
    #[arg(long)]
    pub force_capacity: bool,
}

/// Arguments of `hopcall classify`.
#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Model file written by `hopcall store`
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Recordings to classify
    #[arg(value_name = "WAV", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output CSV (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Segment length in seconds [default: 1.0]
    #[arg(long)]
    pub segment_len: Option<f64>,
    /// Convergence budget per segment [default: 100]
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// Worker threads when classifying several files [default: all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// FFT frame length [default: 1024]
    #[arg(long)]
    pub fft_size: Option<usize>,
    /// Analysis window: hamming, hann or rectangular [default: hamming]
    #[arg(long)]
    pub window: Option<String>,
}

/// Arguments of `hopcall bouts`.
#[derive(Debug, Args)]
pub struct BoutsArgs {
    /// Per-segment CSV written by `hopcall classify`
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Output CSV (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Call rule as CLASS=MIN_RECORDS,SEPARATION_S (repeat per class)
    /// [default: grumble=2,1 alarm=3,5]
    #[arg(long = "rule", value_name = "CLASS=MIN,SEP")]
    pub rules: Vec<String>,
    /// Shortest non-call bout in seconds [default: 1]
    #[arg(long)]
    pub noncall_min: Option<f64>,
    /// Longest non-call bout in seconds [default: 60]
    #[arg(long)]
    pub noncall_max: Option<f64>,
}

/// Arguments of `hopcall evaluate`.
#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predicted bout CSV
    #[arg(long, value_name = "FILE")]
    pub predicted: PathBuf,
    /// Ground-truth bout CSV
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    /// Report format: text or json [default: text]
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Call rule used to validate loaded bouts (repeat per class)
    /// [default: grumble=2,1 alarm=3,5]
    #[arg(long = "rule", value_name = "CLASS=MIN,SEP")]
    pub rules: Vec<String>,
    /// Shortest non-call bout in seconds [default: 1]
    #[arg(long)]
    pub noncall_min: Option<f64>,
    /// Longest non-call bout in seconds [default: 60]
    #[arg(long)]
    pub noncall_max: Option<f64>,
}

/// Arguments of `hopcall spectrogram`.
#[derive(Debug, Args)]
pub struct SpectrogramArgs {
    /// Recording to render
    #[arg(value_name = "WAV")]
    pub input: PathBuf,
    /// Output PNG
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// FFT frame length [default: 1024]
    #[arg(long)]
    pub fft_size: Option<usize>,
    /// Analysis window: hamming, hann or rectangular [default: hamming]
    #[arg(long)]
    pub window: Option<String>,
}

/// Arguments of `hopcall bench`.
#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Model file written by `hopcall store`
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Recording to classify for the throughput figure
    #[arg(value_name = "WAV")]
    pub input: PathBuf,
}

/// Entry point used by `main`: parses `std::env::args`, runs the
/// subcommand and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USER,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Store(args) => cmd_store(args, &config),
        Command::Classify(args) => cmd_classify(args, &config),
        Command::Bouts(args) => cmd_bouts(args, &config),
        Command::Evaluate(args) => cmd_evaluate(args, &config),
        Command::Spectrogram(args) => cmd_spectrogram(args, &config),
        Command::Bench(args) => cmd_bench(args, &config),
    }
}

fn cmd_store(args: StoreArgs, config: &ConfigFile) -> Result<(), CliError> {
    let neurons = args.neurons.or(config.neurons).unwrap_or(DEFAULT_NEURONS);
    let band_low = args
        .band_low
        .or(config.band_low_hz)
        .unwrap_or(DEFAULT_BAND_LOW_HZ);
    let band_high = args
        .band_high
        .or(config.band_high_hz)
        .unwrap_or(DEFAULT_BAND_HIGH_HZ);
    let threshold = args
        .threshold
        .or(config.threshold)
        .unwrap_or(DEFAULT_THRESHOLD);
    let spectral = spectral_params(args.fft_size, args.window.as_deref(), config)?;
    let band = FrequencyBand::new(band_low, band_high)?;
    let encoder = EncoderConfig::new(neurons, band, threshold)?;

    let mut exemplars = Vec::with_capacity(args.exemplars.len());
    for spec in &args.exemplars {
        let (label, path) = spec
            .split_once('=')
            .ok_or_else(|| user(format!("--exemplar '{spec}' must look like LABEL=CALL.wav")))?;
        let buffer = load_wav(Path::new(path))?;
        exemplars.push((label.to_string(), buffer));
    }

    let policy = if args.force_capacity {
        CapacityPolicy::Override
    } else {
        CapacityPolicy::Enforce
    };
    let model = store_from_audio(exemplars, encoder, &spectral, policy)?;
    save_model(&args.output, &model)?;
    eprintln!(
        "stored {} exemplar(s) in {} ({} neurons)",
        model.stored().len(),
        args.output.display(),
        model.n_neurons()
    );
    Ok(())
}

fn cmd_classify(args: ClassifyArgs, config: &ConfigFile) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let params = ClassifyParams {
        segment_len_s: args
            .segment_len
            .or(config.segment_len_s)
            .unwrap_or(DEFAULT_SEGMENT_LEN_S),
        spectral: spectral_params(args.fft_size, args.window.as_deref(), config)?,
        max_passes: args
            .max_passes
            .or(config.max_passes)
            .unwrap_or(DEFAULT_MAX_PASSES),
    };
    let workers = args.workers.or(config.workers);
    if workers == Some(0) {
        return Err(user("--workers must be at least 1"));
    }

    let rows = classify_inputs(&model, &args.inputs, &params, workers)?;
    let csv = classifications_to_csv(&rows)?;
    write_output(args.output.as_deref(), &csv)
}

/// Classifies every input, in parallel when there are several files, and
/// returns the rows in input order regardless of which file finished
/// first.
fn classify_inputs(
    model: &HopfieldModel,
    inputs: &[PathBuf],
    params: &ClassifyParams,
    workers: Option<usize>,
) -> Result<Vec<SegmentClassification>, CliError> {
    let classify_one = |path: &PathBuf| -> Result<Vec<SegmentClassification>, CliError> {
        let buffer = load_wav(path)?;
        let source_id = source_id_of(path)?;
        Ok(classify_file(model, &buffer, &source_id, params)?)
    };

    let per_file: Vec<Result<Vec<SegmentClassification>, CliError>> = if inputs.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Internal(format!("could not build the worker pool: {e}")))?;
        pool.install(|| inputs.par_iter().map(classify_one).collect())
    } else {
        inputs.iter().map(classify_one).collect()
    };

    let mut rows = Vec::new();
    for result in per_file {
        rows.extend(result?);
    }
    Ok(rows)
}

fn cmd_bouts(args: BoutsArgs, config: &ConfigFile) -> Result<(), CliError> {
    let rules = bout_rules(&args.rules, args.noncall_min, args.noncall_max, config)?;
    let text = read_text(&args.input)?;
    let rows = classifications_from_csv(&text)?;

    // One extraction per recording; rows for a file must be contiguous,
    // exactly as `classify` writes them.
    let mut groups: Vec<(String, Vec<SegmentClassification>)> = Vec::new();
    for row in rows {
        match groups.last_mut() {
            Some((source, group)) if *source == row.source_id => group.push(row),
            _ => {
                if groups.iter().any(|(s, _)| *s == row.source_id) {
                    return Err(user(format!(
                        "rows for '{}' are not contiguous in {}",
                        row.source_id,
                        args.input.display()
                    )));
                }
                groups.push((row.source_id.clone(), vec![row]));
            }
        }
    }

    let mut bouts = Vec::new();
    for (_, group) in &groups {
        bouts.extend(extract_bouts(group, &rules)?);
    }
    let csv = bouts_to_csv(&bouts)?;
    write_output(args.output.as_deref(), &csv)
}

fn cmd_evaluate(args: EvaluateArgs, config: &ConfigFile) -> Result<(), CliError> {
    let rules = bout_rules(&args.rules, args.noncall_min, args.noncall_max, config)?;
    let predicted = bouts_from_csv(&read_text(&args.predicted)?, &rules)?;
    let truth = bouts_from_csv(&read_text(&args.truth)?, &rules)?;

    // Score each recording separately, then pool the counts.
    let sources: BTreeSet<&str> = predicted
        .iter()
        .chain(&truth)
        .map(|b| b.source_id.as_str())
        .collect();
    let mut counts = ConfusionCounts::new();
    for source in sources {
        let p: Vec<Bout> = predicted
            .iter()
            .filter(|b| b.source_id == source)
            .cloned()
            .collect();
        let t: Vec<Bout> = truth
            .iter()
            .filter(|b| b.source_id == source)
            .cloned()
            .collect();
        counts.absorb(&match_bouts(&p, &t)?);
    }

    let rendered = match args.format.as_deref().unwrap_or("text") {
        "text" => format_report_text(&report(&counts)),
        "json" => report_to_json(&report(&counts))
            .map_err(|e| CliError::Internal(format!("could not serialise the report: {e}")))?,
        other => {
            return Err(user(format!(
                "unknown report format '{other}' (expected text or json)"
            )))
        }
    };
    write_output(args.output.as_deref(), &rendered)
}

fn cmd_spectrogram(args: SpectrogramArgs, config: &ConfigFile) -> Result<(), CliError> {
    let spectral = spectral_params(args.fft_size, args.window.as_deref(), config)?;
    let buffer = load_wav(&args.input)?;
    write_spectrogram_png(&buffer, &spectral, &args.output)?;
    eprintln!("wrote {}", args.output.display());
    Ok(())
}

fn cmd_bench(args: BenchArgs, config: &ConfigFile) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let buffer = load_wav(&args.input)?;
    let params = ClassifyParams {
        segment_len_s: config.segment_len_s.unwrap_or(DEFAULT_SEGMENT_LEN_S),
        spectral: spectral_params(None, None, config)?,
        max_passes: config.max_passes.unwrap_or(DEFAULT_MAX_PASSES),
    };
    let bench = run_bench(&model, &buffer, &params)?;
    let mut json = serde_json::to_string_pretty(&bench)
        .map_err(|e| CliError::Internal(format!("could not serialise the bench report: {e}")))?;
    json.push('\n');
    print!("{json}");
    Ok(())
}

/// Resolves FFT size and window through the flag → config → default layers.
fn spectral_params(
    fft_flag: Option<usize>,
    window_flag: Option<&str>,
    config: &ConfigFile,
) -> Result<SpectralParams, CliError> {
    let fft_size = fft_flag.or(config.fft_size).unwrap_or(DEFAULT_FFT_SIZE);
    let window = match window_flag {
        Some(text) => parse_window(text)?,
        None => config.window.unwrap_or_default(),
    };
    Ok(SpectralParams::new(fft_size, window)?)
}

/// Resolves bout rules: explicit `--rule` flags replace the default
/// two-class rule set wholesale, the non-call bounds resolve per layer.
fn bout_rules(
    rule_specs: &[String],
    noncall_min: Option<f64>,
    noncall_max: Option<f64>,
    config: &ConfigFile,
) -> Result<BoutRules, CliError> {
    let noncall_min = noncall_min
        .or(config.noncall_min_s)
        .unwrap_or(DEFAULT_NONCALL_MIN_S);
    let noncall_max = noncall_max
        .or(config.noncall_max_s)
        .unwrap_or(DEFAULT_NONCALL_MAX_S);
    let call_rules = if rule_specs.is_empty() {
        BoutRules::default().call_rules().to_vec()
    } else {
        rule_specs
            .iter()
            .map(|spec| parse_rule(spec))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(BoutRules::new(call_rules, noncall_min, noncall_max)?)
}

fn parse_rule(spec: &str) -> Result<(String, CallRule), CliError> {
    let bad = || {
        user(format!(
            "--rule '{spec}' must look like CLASS=MIN_RECORDS,SEPARATION_S (e.g. grumble=2,1)"
        ))
    };
    let (class, rest) = spec.split_once('=').ok_or_else(bad)?;
    let (min, sep) = rest.split_once(',').ok_or_else(bad)?;
    let min_consecutive: usize = min.trim().parse().map_err(|_| bad())?;
    let separation_s: f64 = sep.trim().parse().map_err(|_| bad())?;
    Ok((
        class.trim().to_string(),
        CallRule {
            min_consecutive,
            separation_s,
        },
    ))
}

fn parse_window(value: &str) -> Result<WindowKind, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "hamming" => Ok(WindowKind::Hamming),
        "hann" => Ok(WindowKind::Hann),
        "rectangular" => Ok(WindowKind::Rectangular),
        other => Err(user(format!(
            "unknown window '{other}' (expected hamming, hann or rectangular)"
        ))),
    }
}

/// The recording identifier used in CSV rows: the file name, without any
/// directory components.
fn source_id_of(path: &Path) -> Result<String, CliError> {
    path.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_string)
        .ok_or_else(|| user(format!("cannot derive a source name from '{}'", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| user(format!("could not read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| user(format!("could not write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Values read from a `--config` file. Every field is optional; missing
/// keys fall through to the built-in defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    /// Encoder size.
    pub neurons: Option<usize>,
    /// Lower band edge in Hz.
    pub band_low_hz: Option<f64>,
    /// Upper band edge in Hz.
    pub band_high_hz: Option<f64>,
    /// Relative peak threshold.
    pub threshold: Option<f64>,
    /// FFT frame length.
    pub fft_size: Option<usize>,
    /// Analysis window.
    pub window: Option<WindowKind>,
    /// Segment length in seconds.
    pub segment_len_s: Option<f64>,
    /// Convergence budget per segment.
    pub max_passes: Option<usize>,
    /// Worker threads for multi-file classification.
    pub workers: Option<usize>,
    /// Shortest non-call bout in seconds.
    pub noncall_min_s: Option<f64>,
    /// Longest non-call bout in seconds.
    pub noncall_max_s: Option<f64>,
}

impl ConfigFile {
    /// Parses `key = value` lines; `#` starts a comment line and blank
    /// lines are ignored. Unknown keys and unparseable values are errors
    /// that name their line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = ConfigFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                user(format!(
                    "config line {line_no}: expected key = value, got '{raw}'"
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "neurons" => config.neurons = Some(parse_value(value, key, line_no)?),
                "band_low_hz" => config.band_low_hz = Some(parse_value(value, key, line_no)?),
                "band_high_hz" => config.band_high_hz = Some(parse_value(value, key, line_no)?),
                "threshold" => config.threshold = Some(parse_value(value, key, line_no)?),
                "fft_size" => config.fft_size = Some(parse_value(value, key, line_no)?),
                "window" => {
                    config.window = Some(parse_window(value).map_err(|e| {
                        user(format!("config line {line_no}: {}", e.message()))
                    })?)
                }
                "segment_len_s" => config.segment_len_s = Some(parse_value(value, key, line_no)?),
                "max_passes" => config.max_passes = Some(parse_value(value, key, line_no)?),
                "workers" => config.workers = Some(parse_value(value, key, line_no)?),
                "noncall_min_s" => config.noncall_min_s = Some(parse_value(value, key, line_no)?),
                "noncall_max_s" => config.noncall_max_s = Some(parse_value(value, key, line_no)?),
                _ => {
                    return Err(user(format!(
                        "config line {line_no}: unknown key '{key}'"
                    )))
                }
            }
        }
        Ok(config)
    }

    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(path) => Self::parse(&read_text(path)?),
        }
    }
}

fn parse_value<T: std::str::FromStr>(
    value: &str,
    key: &str,
    line_no: usize,
) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        user(format!(
            "config line {line_no}: cannot parse {key} from '{value}'"
        ))
    })
}

/// A failure with its exit code: `User` errors are anything wrong with the
/// invocation or its inputs (exit 1), `Internal` errors indicate a bug in
/// this tool (exit 2).
#[derive(Debug, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, files or file contents.
    User(String),
    /// Violated internal assumption.
    Internal(String),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::User(m) | CliError::Internal(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn user(message: impl Into<String>) -> CliError {
    CliError::User(message.into())
}

macro_rules! user_error {
    ($($ty:ty),+ $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::User(err.to_string())
            }
        }
    )+};
}

user_error!(
    AudioError,
    CsvError,
    PipelineError,
    ModelFileError,
    SpectralError,
    SpectrogramError,
    BoutError,
    MetricsError,
    EncoderError,
    PeakSetError,
    HopfieldError,
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_every_key_and_ignores_comments() {
        let text = "\
# detection defaults
neurons = 34
band_low_hz = 0
band_high_hz = 1300
threshold = 0.1

fft_size = 512
window = hann
segment_len_s = 0.5
max_passes = 50
workers = 2
noncall_min_s = 2
noncall_max_s = 30
";
        let config = ConfigFile::parse(text).unwrap();
        assert_eq!(config.neurons, Some(34));
        assert_eq!(config.fft_size, Some(512));
        assert_eq!(config.window, Some(WindowKind::Hann));
        assert_eq!(config.segment_len_s, Some(0.5));
        assert_eq!(config.noncall_max_s, Some(30.0));
    }

    #[test]
    fn config_errors_name_their_line() {
        let err = ConfigFile::parse("neurons = 14\nnonsense\n").unwrap_err();
        assert!(err.message().contains("line 2"), "{err}");
        let err = ConfigFile::parse("\n\nneurons = many\n").unwrap_err();
        assert!(err.message().contains("line 3"), "{err}");
        let err = ConfigFile::parse("fft = 1024\n").unwrap_err();
        assert!(err.message().contains("unknown key 'fft'"), "{err}");
        let err = ConfigFile::parse("window = kaiser\n").unwrap_err();
        assert!(err.message().contains("kaiser"), "{err}");
    }

    #[test]
    fn flags_beat_config_beats_default() {
        let config = ConfigFile::parse("fft_size = 512\nwindow = hann\n").unwrap();
        // Flag wins.
        let params = spectral_params(Some(256), Some("rectangular"), &config).unwrap();
        assert_eq!(params.fft_size(), 256);
        assert_eq!(params.window(), WindowKind::Rectangular);
        // Config wins over the default.
        let params = spectral_params(None, None, &config).unwrap();
        assert_eq!(params.fft_size(), 512);
        assert_eq!(params.window(), WindowKind::Hann);
        // Defaults apply last.
        let params = spectral_params(None, None, &ConfigFile::default()).unwrap();
        assert_eq!(params.fft_size(), 1024);
        assert_eq!(params.window(), WindowKind::Hamming);
    }

    #[test]
    fn rule_specs_parse_and_reject() {
        let (class, rule) = parse_rule("grumble=2,1").unwrap();
        assert_eq!(class, "grumble");
        assert_eq!(rule.min_consecutive, 2);
        assert_eq!(rule.separation_s, 1.0);
        assert!(parse_rule("grumble").is_err());
        assert!(parse_rule("grumble=2").is_err());
        assert!(parse_rule("grumble=two,1").is_err());
    }

    #[test]
    fn default_rules_apply_when_no_rule_flags_given() {
        let rules = bout_rules(&[], None, None, &ConfigFile::default()).unwrap();
        assert_eq!(rules.call_rule("grumble").unwrap().min_consecutive, 2);
        assert_eq!(rules.call_rule("alarm").unwrap().min_consecutive, 3);
        let custom = bout_rules(
            &["hoot=4,2.5".to_string()],
            Some(0.5),
            None,
            &ConfigFile::default(),
        )
        .unwrap();
        assert_eq!(custom.call_rule("hoot").unwrap().min_consecutive, 4);
        assert!(custom.call_rule("grumble").is_none());
    }

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(user("nope").exit_code(), EXIT_USER);
        assert_eq!(CliError::Internal("bug".into()).exit_code(), EXIT_INTERNAL);
    }

    #[test]
    fn missing_required_arguments_are_parse_errors() {
        assert!(Cli::try_parse_from(["hopcall", "classify", "--model", "m.json"]).is_err());
        assert!(Cli::try_parse_from(["hopcall", "store", "--output", "m.json"]).is_err());
        let ok = Cli::try_parse_from([
            "hopcall", "classify", "--model", "m.json", "a.wav", "b.wav", "--workers", "2",
        ])
        .unwrap();
        match ok.command {
            Command::Classify(args) => {
                assert_eq!(args.inputs.len(), 2);
                assert_eq!(args.workers, Some(2));
            }
            other => panic!("parsed the wrong command: {other:?}"),
        }
    }

    #[test]
    fn source_ids_are_bare_file_names() {
        let id = source_id_of(Path::new("/data/pens/pen4_morning.wav")).unwrap();
        assert_eq!(id, "pen4_morning.wav");
    }
}
