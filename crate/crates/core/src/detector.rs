//! Coarse-to-fine lip event detection.
//!
//! The search starts at the coarsest temporal resolution of the ladder and
//! walks forward comparing frames `ts` apart. The first interframe classified
//! as opening becomes the region proposal `[f - ts, f]`; its first frame
//! becomes the new reference frame and the region is rescanned at the next
//! finer resolution. At resolution 1 the first opening interframe's later
//! frame is the event.
//!
//! Closing events are found by running the same search on the time-reversed
//! sequence, where a closing lip looks like an opening one.

use serde::{Deserialize, Serialize};

use crate::divergence::{
    build_reference_sphere, classify_state, pair_signature, split_left_right, Classification,
    LipState, MotionSignature, DEFAULT_EPS_SILENCE, DEFAULT_EPS_SYMMETRY,
};
use crate::error::{Error, Result};
use crate::geometry::{pose_correct, smooth_sequence, LandmarkSequence, DEFAULT_FRAME_RATE};

pub const DEFAULT_LADDER: [usize; 5] = [30, 15, 7, 3, 1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Strictly decreasing temporal resolutions ending in 1.
    pub resolution_ladder: Vec<usize>,
    pub eps_silence: f64,
    pub eps_symmetry: f64,
    /// Divisor for [`ladder_from`] when a ladder is generated from its
    /// coarsest step.
    pub update_factor_k: usize,
    pub frame_rate: f64,
    /// Accept the last coarse detection when a finer level finds nothing.
    pub coarse_fallback: bool,
    /// Moving-average window applied during preprocessing; 1 disables it.
    pub smoothing_window: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            resolution_ladder: DEFAULT_LADDER.to_vec(),
            eps_silence: DEFAULT_EPS_SILENCE,
            eps_symmetry: DEFAULT_EPS_SYMMETRY,
            update_factor_k: 2,
            frame_rate: DEFAULT_FRAME_RATE,
            coarse_fallback: true,
            smoothing_window: 5,
        }
    }
}

impl DetectionConfig {
    pub fn with_ladder(mut self, ladder: Vec<usize>) -> Self {
        self.resolution_ladder = ladder;
        self
    }

    pub fn with_smoothing(mut self, window: usize) -> Self {
        self.smoothing_window = window;
        self
    }

    pub fn with_fallback(mut self, fallback: bool) -> Self {
        self.coarse_fallback = fallback;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_ladder(&self.resolution_ladder)?;
        for (name, v) in [
            ("eps_silence", self.eps_silence),
            ("eps_symmetry", self.eps_symmetry),
            ("frame_rate", self.frame_rate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.update_factor_k < 2 {
            return Err(Error::InvalidConfig(format!(
                "update_factor_k must be at least 2, got {}",
                self.update_factor_k
            )));
        }
        if self.smoothing_window == 0 || self.smoothing_window.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "smoothing_window must be odd and positive, got {}",
                self.smoothing_window
            )));
        }
        Ok(())
    }
}

pub fn validate_ladder(ladder: &[usize]) -> Result<()> {
    match ladder.last() {
        None => return Err(Error::InvalidConfig("resolution ladder is empty".into())),
        Some(&last) if last != 1 => {
            return Err(Error::InvalidConfig(format!(
                "resolution ladder must end in 1, got {ladder:?}"
            )))
        }
        _ => {}
    }
    if ladder.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "resolution ladder must be strictly decreasing, got {ladder:?}"
        )));
    }
    Ok(())
}

/// `ceil(ts / k)`, never below 1.
pub fn next_resolution(ts: usize, k: usize) -> usize {
    ts.div_ceil(k.max(1)).max(1)
}

/// Ladder generated from `ts0` by repeated [`next_resolution`].
pub fn ladder_from(ts0: usize, k: usize) -> Vec<usize> {
    let mut ladder = vec![ts0.max(1)];
    while let Some(&ts) = ladder.last() {
        if ts == 1 {
            break;
        }
        ladder.push(next_resolution(ts, k));
    }
    ladder
}

/// Inclusive frame range searched for one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub start: usize,
    pub end: usize,
}

impl SearchWindow {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn whole(seq: &LandmarkSequence) -> Self {
        Self::new(0, seq.len() - 1)
    }

    pub fn frames(&self) -> usize {
        self.end + 1 - self.start
    }

    fn mirrored(&self, len: usize) -> Self {
        Self::new(len - 1 - self.end, len - 1 - self.start)
    }
}

/// One interframe classification performed during a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub resolution: usize,
    /// (earlier, later) in scan order.
    pub pair: (usize, usize),
    pub signature: MotionSignature,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Detection {
    pub frame: Option<usize>,
    /// Ladder value of the level that produced `frame`.
    pub resolution: Option<usize>,
    pub trace: Vec<TraceEntry>,
}

impl Detection {
    /// Number of interframe classifications the search performed.
    pub fn classifications(&self) -> usize {
        self.trace.len()
    }
}

/// Opening search over the whole sequence.
pub fn detect_opening(seq: &LandmarkSequence, config: &DetectionConfig) -> Result<Detection> {
    detect_opening_in(seq, config, SearchWindow::whole(seq))
}

/// Closing search over the whole sequence.
pub fn detect_closing(seq: &LandmarkSequence, config: &DetectionConfig) -> Result<Detection> {
    detect_closing_in(seq, config, SearchWindow::whole(seq))
}

pub fn detect_opening_in(
    seq: &LandmarkSequence,
    config: &DetectionConfig,
    window: SearchWindow,
) -> Result<Detection> {
    config.validate()?;
    if window.start > window.end || window.end >= seq.len() {
        return Err(Error::InvalidConfig(format!(
            "search window {}..={} outside sequence of {} frames",
            window.start,
            window.end,
            seq.len()
        )));
    }
    let coarsest = config.resolution_ladder[0];
    if window.frames() < coarsest + 1 {
        return Err(Error::SequenceTooShort {
            frames: window.frames(),
            required: coarsest + 1,
        });
    }

    let limit = window.end;
    let mut lo = window.start;
    let mut hi = window.end;
    let mut trace = Vec::new();
    let mut last_hit: Option<(usize, usize)> = None;

    for &ts in &config.resolution_ladder {
        let reference = seq.frame(lo);
        let sphere = build_reference_sphere(reference);
        let partition = split_left_right(reference, &sphere)?;

        // The last pair may run past `hi` so that every frame of the region
        // is the later frame of some sampled pair.
        let mut prev = lo;
        let mut hit = None;
        while prev < hi && prev < limit {
            let next = (prev + ts).min(limit);
            let signature = pair_signature(seq.frame(prev), seq.frame(next), &sphere, &partition)?;
            let classification =
                classify_state(&signature, config.eps_silence, config.eps_symmetry);
            trace.push(TraceEntry {
                resolution: ts,
                pair: (prev, next),
                signature,
                classification,
            });
            if classification.state() == LipState::Opening {
                hit = Some((prev, next));
                break;
            }
            prev = next;
        }

        match hit {
            Some((start, f)) => {
                last_hit = Some((f, ts));
                lo = start;
                hi = f;
            }
            None => break,
        }
    }

    let (frame, resolution) = match last_hit {
        Some((f, 1)) => (Some(f), Some(1)),
        Some((f, ts)) if config.coarse_fallback => (Some(f), Some(ts)),
        _ => (None, None),
    };
    Ok(Detection {
        frame,
        resolution,
        trace,
    })
}

/// Runs the opening search on the reversed sequence and maps the result back
/// to forward frame indices.
pub fn detect_closing_in(
    seq: &LandmarkSequence,
    config: &DetectionConfig,
    window: SearchWindow,
) -> Result<Detection> {
    if window.start > window.end || window.end >= seq.len() {
        return Err(Error::InvalidConfig(format!(
            "search window {}..={} outside sequence of {} frames",
            window.start,
            window.end,
            seq.len()
        )));
    }
    let len = seq.len();
    let mirror = |i: usize| len - 1 - i;
    let reversed = seq.reversed();
    let mut detection = detect_opening_in(&reversed, config, window.mirrored(len))?;
    detection.frame = detection.frame.map(mirror);
    for entry in &mut detection.trace {
        entry.pair = (mirror(entry.pair.0), mirror(entry.pair.1));
        entry.signature.source_pair = entry.pair;
    }
    Ok(detection)
}

/// Pose correction to frame 0 followed by temporal smoothing.
pub fn preprocess(seq: &LandmarkSequence, config: &DetectionConfig) -> Result<LandmarkSequence> {
    config.validate()?;
    let corrected = pose_correct(seq, 0)?;
    smooth_sequence(&corrected, config.smoothing_window)
}

/// Finest-resolution divergence of every consecutive frame pair, measured
/// against the reference sphere of frame 0. Entry `t - 1` describes the pair
/// `(t - 1, t)`.
pub fn divergence_series(
    seq: &LandmarkSequence,
    config: &DetectionConfig,
) -> Result<Vec<(MotionSignature, Classification)>> {
    let reference = seq.frame(0);
    let sphere = build_reference_sphere(reference);
    let partition = split_left_right(reference, &sphere)?;
    seq.frames()
        .windows(2)
        .map(|w| {
            let sig = pair_signature(&w[0], &w[1], &sphere, &partition)?;
            let cls = classify_state(&sig, config.eps_silence, config.eps_symmetry);
            Ok((sig, cls))
        })
        .collect()
}

/// Per-frame labels: frame 0 is static, frame `t` takes the class of the
/// interframe `(t - 1, t)`.
pub fn framewise_states(
    seq: &LandmarkSequence,
    config: &DetectionConfig,
) -> Result<Vec<Classification>> {
    let mut states = Vec::with_capacity(seq.len());
    states.push(Classification::STATIC);
    states.extend(divergence_series(seq, config)?.into_iter().map(|(_, c)| c));
    Ok(states)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventResult {
    pub opening_frame: Option<usize>,
    pub closing_frame: Option<usize>,
    pub opening_resolution: Option<usize>,
    pub closing_resolution: Option<usize>,
    pub framewise_states: Vec<Classification>,
    pub opening_trace: Vec<TraceEntry>,
    pub closing_trace: Vec<TraceEntry>,
}

/// Default split: opening in `[0, m/2]`, closing in `[m/2 + 1, m - 1]`.
pub fn default_windows(len: usize) -> (SearchWindow, SearchWindow) {
    let mid = len / 2;
    (
        SearchWindow::new(0, mid),
        SearchWindow::new((mid + 1).min(len - 1), len - 1),
    )
}

/// Full pipeline on a raw sequence: preprocessing, opening search in the
/// first half, closing search in the second half and framewise labels.
pub fn detect_events(seq: &LandmarkSequence, config: &DetectionConfig) -> Result<EventResult> {
    let (open_window, close_window) = default_windows(seq.len());
    detect_events_in(seq, config, open_window, close_window)
}

pub fn detect_events_in(
    seq: &LandmarkSequence,
    config: &DetectionConfig,
    open_window: SearchWindow,
    close_window: SearchWindow,
) -> Result<EventResult> {
    let pre = preprocess(seq, config)?;
    let opening = detect_opening_in(&pre, config, open_window)?;
    let closing = detect_closing_in(&pre, config, close_window)?;
    let framewise_states = framewise_states(&pre, config)?;
    Ok(EventResult {
        opening_frame: opening.frame,
        closing_frame: closing.frame,
        opening_resolution: opening.resolution,
        closing_resolution: closing.resolution,
        framewise_states,
        opening_trace: opening.trace,
        closing_trace: closing.trace,
    })
}
