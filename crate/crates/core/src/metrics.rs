//! Framewise accuracy, event deviation, event recall and time deviation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::divergence::LipState;
use crate::error::{Error, Result};

/// Default deviation tolerance for event recall, in frames.
pub const DEFAULT_TOLERANCE: usize = 40;

/// Manually labelled (or synthesised) events of one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub opening_frame: usize,
    pub closing_frame: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<LipState>>,
}

impl GroundTruth {
    pub fn new(
        opening_frame: usize,
        closing_frame: usize,
        labels: Option<Vec<LipState>>,
    ) -> Result<Self> {
        if opening_frame >= closing_frame {
            return Err(Error::InvalidLandmarks(format!(
                "opening frame {opening_frame} must precede closing frame {closing_frame}"
            )));
        }
        Ok(Self {
            opening_frame,
            closing_frame,
            labels,
        })
    }
}

/// Deviation of one event, or a miss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventOutcome {
    Detected(usize),
    Missed,
}

impl EventOutcome {
    pub fn from_detection(detected: Option<usize>, truth: usize) -> Self {
        match event_frame_deviation(detected, truth) {
            Ok(d) => EventOutcome::Detected(d),
            Err(_) => EventOutcome::Missed,
        }
    }

    pub fn deviation(&self) -> Option<usize> {
        match self {
            EventOutcome::Detected(d) => Some(*d),
            EventOutcome::Missed => None,
        }
    }
}

/// Fraction of frames whose predicted state equals the truth.
pub fn framewise_accuracy(predicted: &[LipState], truth: &[LipState]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// `|detected - truth|` in frames.
pub fn event_frame_deviation(detected: Option<usize>, truth: usize) -> Result<usize> {
    detected
        .map(|d| d.abs_diff(truth))
        .ok_or(Error::MissingEvent)
}

/// Fraction of events detected within `tolerance` frames; misses count as
/// failures.
pub fn event_recall_rate(outcomes: &[EventOutcome], tolerance: usize) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = outcomes
        .iter()
        .filter(|o| matches!(o, EventOutcome::Detected(d) if *d <= tolerance))
        .count();
    Ok(hits as f64 / outcomes.len() as f64)
}

/// Mean deviation in frames converted to milliseconds.
pub fn time_deviation(mean_dev_frames: f64, frame_rate: f64) -> f64 {
    mean_dev_frames * 1000.0 / frame_rate
}

/// Mean over detected events; `None` when every event was missed.
pub fn mean_deviation(outcomes: &[EventOutcome]) -> Option<f64> {
    let devs: Vec<usize> = outcomes
        .iter()
        .filter_map(EventOutcome::deviation)
        .collect();
    if devs.is_empty() {
        None
    } else {
        Some(devs.iter().sum::<usize>() as f64 / devs.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecallPoint {
    pub tolerance: usize,
    pub e_rr: f64,
}

pub fn recall_curve(outcomes: &[EventOutcome], tolerances: &[usize]) -> Result<Vec<RecallPoint>> {
    tolerances
        .iter()
        .map(|&tolerance| {
            Ok(RecallPoint {
                tolerance,
                e_rr: event_recall_rate(outcomes, tolerance)?,
            })
        })
        .collect()
}

/// Writes `tolerance,e_rr` CSV.
pub fn write_recall_csv<W: Write>(curve: &[RecallPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tolerance", "e_rr"])?;
    for p in curve {
        w.write_record([p.tolerance.to_string(), p.e_rr.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluation input for one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEvaluation {
    pub sequence: String,
    pub opening: Option<usize>,
    pub closing: Option<usize>,
    pub states: Option<Vec<LipState>>,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub sequence: String,
    pub opening_deviation: Option<usize>,
    pub closing_deviation: Option<usize>,
    pub f_acc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    /// Mean per-sequence framewise accuracy; absent without labels.
    pub f_acc: Option<f64>,
    pub f_dev_opening: Option<f64>,
    pub f_dev_closing: Option<f64>,
    pub e_rr: f64,
    pub t_dev_ms: Option<f64>,
    pub tolerance: usize,
    pub missed_opening: usize,
    pub missed_closing: usize,
    pub per_sequence: Vec<SequenceReport>,
}

impl EvaluationReport {
    /// Opening and closing outcomes pooled, in sequence order.
    pub fn outcomes(&self) -> Vec<EventOutcome> {
        self.per_sequence
            .iter()
            .flat_map(|s| [s.opening_deviation, s.closing_deviation])
            .map(|d| d.map_or(EventOutcome::Missed, EventOutcome::Detected))
            .collect()
    }
}

/// Aggregates per-sequence results into the metric suite.
///
/// T-Dev is the mean of the opening and closing F-Dev, converted to ms.
pub fn evaluate(
    sequences: &[SequenceEvaluation],
    tolerance: usize,
    frame_rate: f64,
) -> Result<EvaluationReport> {
    if sequences.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut per_sequence = Vec::with_capacity(sequences.len());
    let mut openings = Vec::new();
    let mut closings = Vec::new();
    let mut accuracies = Vec::new();
    for s in sequences {
        let open = EventOutcome::from_detection(s.opening, s.truth.opening_frame);
        let close = EventOutcome::from_detection(s.closing, s.truth.closing_frame);
        let f_acc = match (&s.states, &s.truth.labels) {
            (Some(p), Some(t)) => Some(framewise_accuracy(p, t)?),
            _ => None,
        };
        if let Some(a) = f_acc {
            accuracies.push(a);
        }
        openings.push(open);
        closings.push(close);
        per_sequence.push(SequenceReport {
            sequence: s.sequence.clone(),
            opening_deviation: open.deviation(),
            closing_deviation: close.deviation(),
            f_acc,
        });
    }
    let f_dev_opening = mean_deviation(&openings);
    let f_dev_closing = mean_deviation(&closings);
    let pooled: Vec<EventOutcome> = openings.iter().chain(&closings).copied().collect();
    let t_dev_ms = match (f_dev_opening, f_dev_closing) {
        (Some(o), Some(c)) => Some((o + c) / 2.0),
        (Some(d), None) | (None, Some(d)) => Some(d),
        (None, None) => None,
    }
    .map(|d| time_deviation(d, frame_rate));
    Ok(EvaluationReport {
        f_acc: if accuracies.is_empty() {
            None
        } else {
            Some(accuracies.iter().sum::<f64>() / accuracies.len() as f64)
        },
        f_dev_opening,
        f_dev_closing,
        e_rr: event_recall_rate(&pooled, tolerance)?,
        t_dev_ms,
        tolerance,
        missed_opening: openings.iter().filter(|o| o.deviation().is_none()).count(),
        missed_closing: closings.iter().filter(|o| o.deviation().is_none()).count(),
        per_sequence,
    })
}
