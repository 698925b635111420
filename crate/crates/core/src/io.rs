//! Landmark sequence files and ground-truth sidecars.
//!
//! CSV files carry one landmark per row under the header
//! `frame,landmark,x,y,z`, both indices 0-based and rows ordered by frame then
//! landmark. JSON files hold `{"frame_rate": f, "frames": [[[x, y, z], ...], ...]}`.
//! Ground truth for `name.csv` lives next to it in `name.truth.json`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LandmarkSequence;
use crate::metrics::GroundTruth;

pub const CSV_HEADER: [&str; 5] = ["frame", "landmark", "x", "y", "z"];
pub const TRUTH_SUFFIX: &str = ".truth.json";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFormat {
    Csv,
    Json,
}

impl SequenceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonSequence {
    frame_rate: f64,
    frames: Vec<Vec<[f64; 3]>>,
}

/// Reads a sequence, choosing the format from the extension. `frame_rate`
/// applies to CSV input, which does not store one.
pub fn read_sequence(path: &Path, frame_rate: f64) -> Result<LandmarkSequence> {
    match SequenceFormat::from_path(path) {
        Some(SequenceFormat::Csv) => read_csv(path, frame_rate),
        Some(SequenceFormat::Json) => read_json(path),
        None => Err(Error::Format {
            path: path.to_path_buf(),
            message: "expected a .csv or .json extension".into(),
        }),
    }
}

pub fn write_sequence(path: &Path, seq: &LandmarkSequence) -> Result<()> {
    match SequenceFormat::from_path(path) {
        Some(SequenceFormat::Csv) => write_csv(path, seq),
        Some(SequenceFormat::Json) => write_json(path, seq),
        None => Err(Error::Format {
            path: path.to_path_buf(),
            message: "expected a .csv or .json extension".into(),
        }),
    }
}

fn parse_error(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

pub fn read_csv(path: &Path, frame_rate: f64) -> Result<LandmarkSequence> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(File::open(path)?));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected header {}, found {}",
                CSV_HEADER.join(","),
                header.join(",")
            ),
        ));
    }

    let mut frames: Vec<Vec<Point3<f64>>> = Vec::new();
    let mut expected: Option<usize> = None;
    let mut last_line = 1;
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map_or(last_line + 1, |p| p.line() as usize);
        last_line = line;
        if record.len() != 5 {
            return Err(parse_error(
                path,
                line,
                format!("expected 5 fields, found {}", record.len()),
            ));
        }
        let index = |i: usize| {
            record[i]
                .parse::<usize>()
                .map_err(|e| parse_error(path, line, format!("{}: {e}", CSV_HEADER[i])))
        };
        let coord = |i: usize| {
            record[i]
                .parse::<f64>()
                .map_err(|e| parse_error(path, line, format!("{}: {e}", CSV_HEADER[i])))
        };
        let (frame, landmark) = (index(0)?, index(1)?);
        let point = Point3::new(coord(2)?, coord(3)?, coord(4)?);

        if frame == frames.len() {
            if let Some(prev) = frames.last() {
                let n = *expected.get_or_insert(prev.len());
                if prev.len() != n {
                    return Err(parse_error(
                        path,
                        line,
                        format!(
                            "frame {} has {} landmarks, expected {n}",
                            frame - 1,
                            prev.len()
                        ),
                    ));
                }
            }
            frames.push(Vec::new());
        } else if frames.is_empty() || frame != frames.len() - 1 {
            return Err(parse_error(
                path,
                line,
                format!(
                    "frame {frame} out of order, expected {}",
                    frames.len().saturating_sub(1)
                ),
            ));
        }
        let current = frames.last_mut().expect("frame pushed above");
        if landmark != current.len() {
            return Err(parse_error(
                path,
                line,
                format!(
                    "landmark {landmark} out of order, expected {}",
                    current.len()
                ),
            ));
        }
        if expected.is_some_and(|n| landmark >= n) {
            return Err(parse_error(
                path,
                line,
                format!(
                    "frame {frame} has more than {} landmarks",
                    expected.unwrap_or(0)
                ),
            ));
        }
        current.push(point);
    }
    if let (Some(n), Some(last)) = (expected, frames.last()) {
        if last.len() != n {
            return Err(parse_error(
                path,
                last_line,
                format!(
                    "frame {} has {} landmarks, expected {n}",
                    frames.len() - 1,
                    last.len()
                ),
            ));
        }
    }
    LandmarkSequence::from_points(frames, frame_rate).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_csv(path: &Path, seq: &LandmarkSequence) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(CSV_HEADER)?;
    for frame in seq.frames() {
        for (i, p) in frame.landmarks().iter().enumerate() {
            w.write_record([
                frame.index().to_string(),
                i.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.z.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<LandmarkSequence> {
    let data: JsonSequence = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if let Some(first) = data.frames.first() {
        if let Some((t, f)) = data
            .frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.len() != first.len())
        {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!(
                    "frame {t} has {} landmarks, expected {}",
                    f.len(),
                    first.len()
                ),
            });
        }
    }
    let points = data
        .frames
        .into_iter()
        .map(|f| f.into_iter().map(Point3::from).collect())
        .collect();
    LandmarkSequence::from_points(points, data.frame_rate).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_json(path: &Path, seq: &LandmarkSequence) -> Result<()> {
    let data = JsonSequence {
        frame_rate: seq.frame_rate(),
        frames: seq
            .frames()
            .iter()
            .map(|f| f.landmarks().iter().map(|p| [p.x, p.y, p.z]).collect())
            .collect(),
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &data)?;
    out.flush()?;
    Ok(())
}

/// Sidecar path holding the ground truth of `sequence_path`.
pub fn truth_path(sequence_path: &Path) -> PathBuf {
    let stem = sequence_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    sequence_path.with_file_name(format!("{stem}{TRUTH_SUFFIX}"))
}

/// Sequence name used to match detections with ground truth.
pub fn sequence_name(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if let Some(stripped) = name.strip_suffix(TRUTH_SUFFIX) {
        return stripped.to_string();
    }
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn read_truth(path: &Path) -> Result<GroundTruth> {
    let truth: GroundTruth = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if truth.opening_frame >= truth.closing_frame {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!(
                "opening frame {} must precede closing frame {}",
                truth.opening_frame, truth.closing_frame
            ),
        });
    }
    Ok(truth)
}

pub fn write_truth(path: &Path, truth: &GroundTruth) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, truth)?;
    out.flush()?;
    Ok(())
}

/// Sequence files directly inside `dir`, sorted by file name. Truth sidecars
/// and the dataset manifest are skipped.
pub fn list_sequences(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if !path.is_file() || SequenceFormat::from_path(&path).is_none() {
            continue;
        }
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
        if name.ends_with(TRUTH_SUFFIX) || name == MANIFEST_NAME {
            continue;
        }
        paths.push(path);
    }
    paths.sort();
    Ok(paths)
}

/// Truth sidecars directly inside `dir`, sorted by file name.
pub fn list_truths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|s| s.to_str())
                    .is_some_and(|s| s.ends_with(TRUTH_SUFFIX))
        })
        .collect();
    paths.sort();
    Ok(paths)
}
