//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an input could not be read or processed,
//! 2 for configuration problems.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{detnum_curve, write_detnum_csv};
use crate::detector::{
    default_windows, detect_events_in, divergence_series, preprocess, DetectionConfig, EventResult,
    SearchWindow, DEFAULT_LADDER,
};
use crate::divergence::LipState;
use crate::error::Error;
use crate::io::{
    list_sequences, list_truths, read_sequence, read_truth, sequence_name, truth_path,
    write_sequence, write_truth, SequenceFormat, MANIFEST_NAME,
};
use crate::metrics::{
    evaluate, recall_curve, write_recall_csv, SequenceEvaluation, DEFAULT_TOLERANCE,
};
use crate::synth::{benchmark_suite_with, SynthConfig};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const RESULT_SUFFIX: &str = ".result.json";
pub const SUMMARY_NAME: &str = "summary.csv";
pub const REPORT_NAME: &str = "report.json";
pub const RECALL_NAME: &str = "recall.csv";

#[derive(Debug, Parser)]
#[command(
    name = "lipevent",
    version,
    about = "Lip opening/closing event detection on 3D landmark sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// Flat `key = value` file with detection settings.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Resolution ladder such as `30-15-7-3-1`.
    #[arg(long, global = true, value_name = "a-b-c")]
    pub ladder: Option<String>,
    /// Moving-average window; 1 disables smoothing.
    #[arg(long, global = true, value_name = "W")]
    pub smooth: Option<usize>,
    #[arg(long, global = true, value_name = "X")]
    pub eps_silence: Option<f64>,
    #[arg(long, global = true, value_name = "Y")]
    pub eps_symmetry: Option<f64>,
    #[arg(long, global = true, value_name = "R")]
    pub fps: Option<f64>,
    /// Event recall tolerance in frames.
    #[arg(long, global = true, value_name = "F")]
    pub tolerance: Option<usize>,
    #[arg(long, global = true)]
    pub no_fallback: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect opening and closing events in sequence files or directories.
    Detect {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Opening search range `start-end`, inclusive.
        #[arg(long, value_name = "a-b")]
        open_window: Option<String>,
        /// Closing search range `start-end`, inclusive.
        #[arg(long, value_name = "a-b")]
        close_window: Option<String>,
    },
    /// Score detection results against ground-truth sidecars.
    Evaluate {
        /// Directory of `*.result.json` files.
        #[arg(long)]
        results: PathBuf,
        /// Directory of `*.truth.json` files.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Write a synthetic benchmark dataset.
    Synth {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Event duration range in frames, `lo-hi`.
        #[arg(long, default_value = "2-40")]
        durations: String,
        /// Comma-separated noise levels in mm, cycled over sequences.
        #[arg(long, default_value = "0")]
        noise: String,
        #[arg(long, default_value_t = 5.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
        format: FileFormat,
    },
    /// Finest-resolution divergence trace of one sequence.
    States { input: PathBuf },
    /// Closed-form detection counts over event positions and ladders.
    Detnum {
        /// Event offsets `lo-hi`.
        #[arg(long, default_value = "1-300")]
        range: String,
        /// Ladders to compare; defaults to successive truncations of the default ladder.
        #[arg(long = "compare", value_name = "a-b-c")]
        ladders: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

impl From<FileFormat> for SequenceFormat {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Csv => SequenceFormat::Csv,
            FileFormat::Json => SequenceFormat::Json,
        }
    }
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidWindow(_) => Self::config(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Provenance written next to every command's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: Vec<String>,
    pub config_path: Option<String>,
    pub output_dir: String,
    pub seed: Option<u64>,
    pub detection: DetectionConfig,
    pub outputs: Vec<String>,
}

/// Per-sequence detector output as written by `detect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceResult {
    pub sequence: String,
    pub frame_count: usize,
    pub frame_rate: f64,
    pub opening_frame: Option<usize>,
    pub closing_frame: Option<usize>,
    pub opening_resolution: Option<usize>,
    pub closing_resolution: Option<usize>,
    pub states: Vec<LipState>,
}

impl SequenceResult {
    pub fn from_events(sequence: String, frame_rate: f64, events: &EventResult) -> Self {
        Self {
            sequence,
            frame_count: events.framewise_states.len(),
            frame_rate,
            opening_frame: events.opening_frame,
            closing_frame: events.closing_frame,
            opening_resolution: events.opening_resolution,
            closing_resolution: events.closing_resolution,
            states: events.framewise_states.iter().map(|c| c.state()).collect(),
        }
    }
}

pub fn parse_ladder(text: &str) -> CliResult<Vec<usize>> {
    text.split(['-', ','])
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::config(format!("invalid ladder `{text}`")))
        })
        .collect()
}

fn parse_range(text: &str, what: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::config(format!("invalid {what} `{text}`, expected `lo-hi`"));
    let (a, b) = text.split_once('-').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_bool(text: &str) -> Option<bool> {
    match text {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

/// Parses the flat `key = value` format. Keys are `DetectionConfig` field
/// names; `#` starts a comment.
pub fn parse_config(text: &str, mut config: DetectionConfig) -> CliResult<DetectionConfig> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: &str| CliError::config(format!("config line {}: {msg}", lineno + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| at(&format!("`{value}` is not a number")))
        };
        let integer = || {
            value
                .parse::<usize>()
                .map_err(|_| at(&format!("`{value}` is not a non-negative integer")))
        };
        match key {
            "resolution_ladder" => config.resolution_ladder = parse_ladder(value)?,
            "eps_silence" => config.eps_silence = number()?,
            "eps_symmetry" => config.eps_symmetry = number()?,
            "update_factor_k" => config.update_factor_k = integer()?,
            "frame_rate" => config.frame_rate = number()?,
            "smoothing_window" => config.smoothing_window = integer()?,
            "coarse_fallback" => {
                config.coarse_fallback =
                    parse_bool(value).ok_or_else(|| at(&format!("`{value}` is not a boolean")))?
            }
            other => return Err(at(&format!("unknown key `{other}`"))),
        }
    }
    Ok(config)
}

/// File settings first, then flag overrides.
pub fn resolve_config(shared: &SharedArgs) -> CliResult<DetectionConfig> {
    let mut config = DetectionConfig::default();
    if let Some(path) = &shared.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        config = parse_config(&text, config)?;
    }
    if let Some(ladder) = &shared.ladder {
        config.resolution_ladder = parse_ladder(ladder)?;
    }
    if let Some(w) = shared.smooth {
        config.smoothing_window = w;
    }
    if let Some(x) = shared.eps_silence {
        config.eps_silence = x;
    }
    if let Some(y) = shared.eps_symmetry {
        config.eps_symmetry = y;
    }
    if let Some(r) = shared.fps {
        config.frame_rate = r;
    }
    if shared.no_fallback {
        config.coarse_fallback = false;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(shared: &SharedArgs) -> CliResult<&Path> {
    let dir = shared
        .out
        .as_deref()
        .ok_or_else(|| CliError::config("--out DIR is required for this command"))?;
    fs::create_dir_all(dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::input(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn write_manifest(
    shared: &SharedArgs,
    command: &str,
    inputs: &[PathBuf],
    dir: &Path,
    config: &DetectionConfig,
    outputs: Vec<String>,
) -> CliResult<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: inputs.iter().map(|p| display(p)).collect(),
        config_path: shared.config.as_deref().map(display),
        output_dir: display(dir),
        seed: shared.seed,
        detection: config.clone(),
        outputs,
    };
    write_json(&dir.join(MANIFEST_NAME), &manifest)
}

/// Runs a parsed command line. Diagnostics for individual bad inputs go to
/// stderr; the returned error carries the exit code.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config = resolve_config(&cli.shared)?;
    match &cli.command {
        Command::Detect {
            inputs,
            open_window,
            close_window,
        } => cmd_detect(
            &cli.shared,
            &config,
            inputs,
            open_window.as_deref(),
            close_window.as_deref(),
        ),
        Command::Evaluate { results, truth } => cmd_evaluate(&cli.shared, &config, results, truth),
        Command::Synth {
            count,
            durations,
            noise,
            amplitude,
            drift,
            format,
        } => {
            let (lo, hi) = parse_range(durations, "duration range")?;
            let noise_levels = noise
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::config(format!("invalid noise level `{s}`")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let base = SynthConfig {
                amplitude: *amplitude,
                rigid_drift: *drift,
                frame_rate: config.frame_rate,
                ..SynthConfig::default()
            };
            cmd_synth(
                &cli.shared,
                &config,
                &base,
                *count,
                (lo, hi),
                &noise_levels,
                (*format).into(),
            )
        }
        Command::States { input } => cmd_states(&cli.shared, &config, input),
        Command::Detnum { range, ladders } => {
            let (lo, hi) = parse_range(range, "range")?;
            if lo == 0 {
                return Err(CliError::config("event offsets start at 1"));
            }
            let ladders = if ladders.is_empty() {
                (0..DEFAULT_LADDER.len())
                    .map(|i| DEFAULT_LADDER[i..].to_vec())
                    .collect()
            } else {
                ladders
                    .iter()
                    .map(|l| parse_ladder(l))
                    .collect::<CliResult<Vec<_>>>()?
            };
            for l in &ladders {
                crate::detector::validate_ladder(l)?;
            }
            cmd_detnum(&cli.shared, &config, lo..=hi, &ladders)
        }
    }
}

fn collect_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            files.extend(
                list_sequences(input)
                    .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?,
            );
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn parse_window(text: Option<&str>, what: &str) -> CliResult<Option<SearchWindow>> {
    text.map(|t| parse_range(t, what).map(|(a, b)| SearchWindow::new(a, b)))
        .transpose()
}

pub fn cmd_detect(
    shared: &SharedArgs,
    config: &DetectionConfig,
    inputs: &[PathBuf],
    open_window: Option<&str>,
    close_window: Option<&str>,
) -> CliResult<()> {
    let dir = out_dir(shared)?;
    let open_window = parse_window(open_window, "opening window")?;
    let close_window = parse_window(close_window, "closing window")?;
    let files = collect_inputs(inputs)?;
    if files.is_empty() {
        return Err(CliError::input("no sequence files found"));
    }

    let outcomes: Vec<(PathBuf, Result<SequenceResult, Error>)> = files
        .par_iter()
        .map(|path| {
            let result = read_sequence(path, config.frame_rate).and_then(|seq| {
                let (default_open, default_close) = default_windows(seq.len());
                let events = detect_events_in(
                    &seq,
                    config,
                    open_window.unwrap_or(default_open),
                    close_window.unwrap_or(default_close),
                )?;
                Ok(SequenceResult::from_events(
                    sequence_name(path),
                    seq.frame_rate(),
                    &events,
                ))
            });
            (path.clone(), result)
        })
        .collect();

    let mut summary = csv::Writer::from_path(dir.join(SUMMARY_NAME))
        .map_err(|e| CliError::input(e.to_string()))?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    summary
        .write_record(["sequence", "opening", "closing", "open_res", "close_res"])
        .map_err(|e| CliError::input(e.to_string()))?;
    let mut failures = 0;
    let mut outputs = vec![SUMMARY_NAME.to_string()];
    for (path, outcome) in &outcomes {
        match outcome {
            Ok(result) => {
                let name = format!("{}{RESULT_SUFFIX}", result.sequence);
                write_json(&dir.join(&name), result)?;
                outputs.push(name);
                summary
                    .write_record([
                        result.sequence.clone(),
                        opt(result.opening_frame),
                        opt(result.closing_frame),
                        opt(result.opening_resolution),
                        opt(result.closing_resolution),
                    ])
                    .map_err(|e| CliError::input(e.to_string()))?;
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e}", path.display());
            }
        }
    }
    summary.flush()?;
    write_manifest(shared, "detect", inputs, dir, config, outputs)?;
    if failures > 0 {
        return Err(CliError::input(format!(
            "{failures} of {} inputs failed",
            outcomes.len()
        )));
    }
    Ok(())
}

fn read_result(path: &Path) -> CliResult<SequenceResult> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn cmd_evaluate(
    shared: &SharedArgs,
    config: &DetectionConfig,
    results_dir: &Path,
    truth_dir: &Path,
) -> CliResult<()> {
    let dir = out_dir(shared)?;
    let tolerance = shared.tolerance.unwrap_or(DEFAULT_TOLERANCE);

    let mut results = BTreeMap::new();
    for entry in fs::read_dir(results_dir)? {
        let path = entry?.path();
        let is_result = path
            .file_name()
            .and_then(|s| s.to_str())
            .is_some_and(|s| s.ends_with(RESULT_SUFFIX));
        if is_result {
            let r = read_result(&path)?;
            results.insert(r.sequence.clone(), r);
        }
    }
    let mut truths = BTreeMap::new();
    for path in list_truths(truth_dir)? {
        let truth =
            read_truth(&path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        truths.insert(sequence_name(&path), truth);
    }
    if let Some(name) = results.keys().find(|k| !truths.contains_key(*k)) {
        return Err(Error::UnmatchedSequence(format!("{name} has no ground truth")).into());
    }
    if let Some(name) = truths.keys().find(|k| !results.contains_key(*k)) {
        return Err(Error::UnmatchedSequence(format!("{name} has no detection result")).into());
    }

    let frame_rate = results
        .values()
        .next()
        .map_or(config.frame_rate, |r| r.frame_rate);
    let sequences: Vec<SequenceEvaluation> = results
        .into_values()
        .map(|r| SequenceEvaluation {
            truth: truths.remove(&r.sequence).expect("matched above"),
            sequence: r.sequence,
            opening: r.opening_frame,
            closing: r.closing_frame,
            states: Some(r.states),
        })
        .collect();
    let report = evaluate(&sequences, tolerance, frame_rate)?;
    let tolerances: Vec<usize> = (0..=100).step_by(5).collect();
    let curve = recall_curve(&report.outcomes(), &tolerances)?;

    write_json(&dir.join(REPORT_NAME), &report)?;
    write_recall_csv(&curve, BufWriter::new(File::create(dir.join(RECALL_NAME))?))?;
    write_manifest(
        shared,
        "evaluate",
        &[results_dir.to_path_buf(), truth_dir.to_path_buf()],
        dir,
        config,
        vec![REPORT_NAME.into(), RECALL_NAME.into()],
    )
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_synth(
    shared: &SharedArgs,
    config: &DetectionConfig,
    base: &SynthConfig,
    count: usize,
    durations: (usize, usize),
    noise_levels: &[f64],
    format: SequenceFormat,
) -> CliResult<()> {
    let dir = out_dir(shared)?;
    let seed = shared.seed.unwrap_or(0);
    let suite = benchmark_suite_with(base, count, durations.0..=durations.1, noise_levels, seed)
        .map_err(|e| CliError::config(e.to_string()))?;
    let width = count.saturating_sub(1).to_string().len().max(3);
    let mut outputs = Vec::with_capacity(2 * suite.len());
    for (i, item) in suite.iter().enumerate() {
        let file = dir.join(format!("seq_{i:0width$}.{}", format.extension()));
        write_sequence(&file, &item.sequence)?;
        let truth_file = truth_path(&file);
        write_truth(&truth_file, &item.truth)?;
        for p in [&file, &truth_file] {
            outputs.push(
                p.file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
        }
    }
    write_manifest(shared, "synth", &[], dir, config, outputs)
}

pub fn cmd_states(shared: &SharedArgs, config: &DetectionConfig, input: &Path) -> CliResult<()> {
    let seq = read_sequence(input, config.frame_rate)
        .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    let pre = preprocess(&seq, config)?;
    let series = divergence_series(&pre, config)?;
    let write = |out: &mut dyn Write| -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::input(e.to_string());
        w.write_record(["frame", "div_total", "div_left", "div_right", "state"])
            .map_err(err)?;
        for (i, (sig, cls)) in series.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                sig.div_total.to_string(),
                sig.div_left.to_string(),
                sig.div_right.to_string(),
                cls.state().to_string(),
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    };
    match &shared.out {
        Some(_) => {
            let dir = out_dir(shared)?;
            let name = format!("{}.states.csv", sequence_name(input));
            write(&mut BufWriter::new(File::create(dir.join(&name))?))?;
            write_manifest(
                shared,
                "states",
                &[input.to_path_buf()],
                dir,
                config,
                vec![name],
            )
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

pub fn cmd_detnum(
    shared: &SharedArgs,
    config: &DetectionConfig,
    range: std::ops::RangeInclusive<usize>,
    ladders: &[Vec<usize>],
) -> CliResult<()> {
    let rows = detnum_curve(range, ladders);
    match &shared.out {
        Some(_) => {
            let dir = out_dir(shared)?;
            let name = "detnum.csv".to_string();
            write_detnum_csv(&rows, BufWriter::new(File::create(dir.join(&name))?))?;
            write_manifest(shared, "detnum", &[], dir, config, vec![name])
        }
        None => Ok(write_detnum_csv(&rows, std::io::stdout().lock())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_and_overrides() {
        let text = "# ablation\nresolution_ladder = 15-7-3-1\nsmoothing_window = 1\ncoarse_fallback = false\neps_silence = 0.8 # mm\n";
        let c = parse_config(text, DetectionConfig::default()).unwrap();
        assert_eq!(c.resolution_ladder, vec![15, 7, 3, 1]);
        assert_eq!(c.smoothing_window, 1);
        assert!(!c.coarse_fallback);
        assert_eq!(c.eps_silence, 0.8);
        assert_eq!(c.eps_symmetry, 0.4);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, text).unwrap();
        let shared = SharedArgs {
            config: Some(path),
            smooth: Some(5),
            ladder: Some("30-15-7-3-1".into()),
            ..Default::default()
        };
        let c = resolve_config(&shared).unwrap();
        assert_eq!(c.smoothing_window, 5);
        assert_eq!(c.resolution_ladder, DEFAULT_LADDER.to_vec());
        assert!(!c.coarse_fallback);
    }

    #[test]
    fn config_errors_exit_two() {
        for text in [
            "nonsense",
            "foo = 1",
            "eps_silence = big",
            "coarse_fallback = maybe",
        ] {
            let e = parse_config(text, DetectionConfig::default()).unwrap_err();
            assert_eq!(e.code, EXIT_CONFIG, "{text}");
        }
        let shared = SharedArgs {
            ladder: Some("30-15-7".into()),
            ..Default::default()
        };
        assert_eq!(resolve_config(&shared).unwrap_err().code, EXIT_CONFIG);
        let shared = SharedArgs {
            smooth: Some(4),
            ..Default::default()
        };
        assert_eq!(resolve_config(&shared).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn ranges_and_ladders() {
        assert_eq!(parse_ladder("30-15-7-3-1").unwrap(), vec![30, 15, 7, 3, 1]);
        assert_eq!(parse_ladder("3,1").unwrap(), vec![3, 1]);
        assert!(parse_ladder("3-x").is_err());
        assert_eq!(parse_range("2-40", "r").unwrap(), (2, 40));
        assert!(parse_range("40-2", "r").is_err());
        assert!(parse_range("7", "r").is_err());
    }
}
