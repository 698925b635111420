//! Synthetic speaking-lip sequences with exact ground truth.
//!
//! Landmarks sit on an ellipse in the xy-plane, mirror-symmetric about the
//! yz-plane. Each landmark moves along its own radial direction by a common
//! displacement `r(t)`: a raised-cosine rise to `amplitude`, a hold, and a
//! raised-cosine fall back to rest. Because the motion is purely radial about
//! the rest-pose centre, the interframe divergence of a clean symmetric
//! sequence is exactly `r(t) - r(t - 1)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::RangeInclusive;

use nalgebra::{Point3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::LipState;
use crate::error::{Error, Result};
use crate::geometry::{LandmarkFrame, LandmarkSequence, RigidTransform, DEFAULT_FRAME_RATE};
use crate::metrics::GroundTruth;

/// Length of the optional pre-opening wiggle, in frames.
pub const WIGGLE_FRAMES: usize = 30;

const DRIFT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub landmark_count: usize,
    pub frame_count: usize,
    pub frame_rate: f64,
    /// Ellipse semi-axes (x, y) in mm.
    pub lip_radii: (f64, f64),
    /// Last rest frame before the lips start to open.
    pub open_start: usize,
    pub open_duration: usize,
    /// First rest frame after the lips finish closing.
    pub close_end: usize,
    pub close_duration: usize,
    /// Peak radial displacement, mm.
    pub amplitude: f64,
    pub noise_sigma: f64,
    /// Left-side amplitude over right-side amplitude.
    pub asymmetry: f64,
    /// Per-frame rigid jitter bound: translation in mm and rotation in degrees.
    pub rigid_drift: f64,
    /// Out-of-plane bulge `z = z_amplitude * cos 2θ`, mm.
    pub z_amplitude: f64,
    /// Peak of a radial bump in the frames before `open_start`, mm.
    pub wiggle: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            landmark_count: 20,
            frame_count: 500,
            frame_rate: DEFAULT_FRAME_RATE,
            lip_radii: (25.0, 10.0),
            open_start: 100,
            open_duration: 20,
            close_end: 400,
            close_duration: 20,
            amplitude: 5.0,
            noise_sigma: 0.0,
            asymmetry: 1.0,
            rigid_drift: 0.0,
            z_amplitude: 0.0,
            wiggle: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.landmark_count < 4 {
            return bad(format!(
                "landmark_count must be at least 4, got {}",
                self.landmark_count
            ));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return bad(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            ));
        }
        if self.open_duration == 0 || self.close_duration == 0 {
            return bad("event durations must be at least one frame".into());
        }
        if self.open_start + self.open_duration + self.close_duration > self.close_end {
            return bad(format!(
                "opening {}+{} overlaps closing {}-{}",
                self.open_start, self.open_duration, self.close_end, self.close_duration
            ));
        }
        if self.close_end >= self.frame_count {
            return bad(format!(
                "close_end {} must lie inside {} frames",
                self.close_end, self.frame_count
            ));
        }
        let (a, b) = self.lip_radii;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return bad(format!("lip radii must be positive, got ({a}, {b})"));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return bad(format!(
                "frame_rate must be positive, got {}",
                self.frame_rate
            ));
        }
        for (name, v) in [
            ("noise_sigma", self.noise_sigma),
            ("rigid_drift", self.rigid_drift),
            ("wiggle", self.wiggle),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.asymmetry.is_finite() && self.asymmetry > 0.0) {
            return bad(format!(
                "asymmetry must be positive, got {}",
                self.asymmetry
            ));
        }
        if !self.z_amplitude.is_finite() {
            return bad("z_amplitude must be finite".into());
        }
        Ok(())
    }

    /// Noise-free radial displacement at frame `t`, before asymmetry.
    pub fn displacement(&self, t: usize) -> f64 {
        let a = self.amplitude;
        let s = self.open_start;
        let rise_end = s + self.open_duration;
        let fall_start = self.close_end - self.close_duration;
        let ramp = |x: f64| 0.5 * (1.0 - (PI * x).cos());
        let profile = if t <= s {
            0.0
        } else if t < rise_end {
            a * ramp((t - s) as f64 / self.open_duration as f64)
        } else if t <= fall_start {
            a
        } else if t < self.close_end {
            a * (1.0 - ramp((t - fall_start) as f64 / self.close_duration as f64))
        } else {
            0.0
        };
        profile + self.wiggle_at(t)
    }

    fn wiggle_at(&self, t: usize) -> f64 {
        if self.wiggle == 0.0 || t >= self.open_start {
            return 0.0;
        }
        let start = self.open_start.saturating_sub(WIGGLE_FRAMES);
        if t < start {
            return 0.0;
        }
        let span = (self.open_start - start) as f64;
        self.wiggle * (PI * (t - start) as f64 / span).sin().powi(2)
    }

    /// Rest-pose landmarks.
    pub fn rest_landmarks(&self) -> Vec<Point3<f64>> {
        let (a, b) = self.lip_radii;
        let n = self.landmark_count;
        (0..n)
            .map(|i| {
                let th = FRAC_PI_2 + TAU * i as f64 / n as f64;
                let x = a * th.cos();
                let x = if x.abs() < 1e-12 { 0.0 } else { x };
                Point3::new(x, b * th.sin(), self.z_amplitude * (2.0 * th).cos())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub config: SynthConfig,
    pub sequence: LandmarkSequence,
    pub truth: GroundTruth,
}

fn random_rigid(rng: &mut ChaCha8Rng, bound: f64) -> RigidTransform {
    let axis = loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break Unit::new_normalize(v);
        }
    };
    let angle = rng.random_range(-bound..=bound).to_radians();
    let direction = loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() <= 1.0 {
            break v;
        }
    };
    RigidTransform::from_parts(Rotation3::from_axis_angle(&axis, angle), direction * bound)
}

/// Generates one sequence with its ground truth. Deterministic in `config`.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let rest = config.rest_landmarks();
    let directions: Vec<Vector3<f64>> = rest.iter().map(|p| p.coords.normalize()).collect();
    let gains: Vec<f64> = rest
        .iter()
        .map(|p| if p.x < 0.0 { config.asymmetry } else { 1.0 })
        .collect();

    let mut drift_rng = ChaCha8Rng::seed_from_u64(config.seed);
    drift_rng.set_stream(DRIFT_STREAM);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
    noise_rng.set_stream(NOISE_STREAM);
    let noise =
        Normal::new(0.0, config.noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut frames = Vec::with_capacity(config.frame_count);
    for t in 0..config.frame_count {
        let r = config.displacement(t);
        let mut pts: Vec<Point3<f64>> = rest
            .iter()
            .zip(&directions)
            .zip(&gains)
            .map(|((p, d), g)| p + d * (r * g))
            .collect();
        if config.rigid_drift > 0.0 {
            let motion = random_rigid(&mut drift_rng, config.rigid_drift);
            for p in &mut pts {
                *p = motion.apply(p);
            }
        }
        if config.noise_sigma > 0.0 {
            for p in &mut pts {
                *p += Vector3::new(
                    noise.sample(&mut noise_rng),
                    noise.sample(&mut noise_rng),
                    noise.sample(&mut noise_rng),
                );
            }
        }
        frames.push(LandmarkFrame::new(t, pts)?);
    }
    let sequence = LandmarkSequence::new(frames, config.frame_rate)?;

    let labels = (0..config.frame_count)
        .map(|t| {
            if t == 0 {
                return LipState::Static;
            }
            let dr = config.displacement(t) - config.displacement(t - 1);
            if dr > 0.0 {
                LipState::Opening
            } else if dr < 0.0 {
                LipState::Closing
            } else {
                LipState::Static
            }
        })
        .collect();
    let truth = GroundTruth::new(config.open_start, config.close_end, Some(labels))?;
    Ok(SynthOutput {
        config: config.clone(),
        sequence,
        truth,
    })
}

/// A family of `count` sequences built on `base`. Opening durations sweep
/// `speed_range` from fast to slow, closing durations sweep it the other way,
/// event times are drawn from `seed`, and noise levels cycle through
/// `noise_levels`.
pub fn benchmark_suite_with(
    base: &SynthConfig,
    count: usize,
    speed_range: RangeInclusive<usize>,
    noise_levels: &[f64],
    seed: u64,
) -> Result<Vec<SynthOutput>> {
    if count == 0 {
        return Err(Error::InvalidConfig(
            "suite count must be at least 1".into(),
        ));
    }
    let (lo, hi) = (*speed_range.start(), *speed_range.end());
    if lo == 0 || lo > hi {
        return Err(Error::InvalidConfig(format!(
            "invalid duration range {lo}..={hi}"
        )));
    }
    let noise_levels = if noise_levels.is_empty() {
        &[0.0][..]
    } else {
        noise_levels
    };
    let m = base.frame_count;
    let mid = m / 2;
    if mid < hi + 60 {
        return Err(Error::InvalidConfig(format!(
            "{m} frames is too short for durations up to {hi}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs: Vec<SynthConfig> = (0..count)
        .map(|i| {
            let frac = if count == 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            };
            let open_duration = lo + ((hi - lo) as f64 * frac).round() as usize;
            let close_duration = hi + lo - open_duration;
            // keep each event well inside its half of the sequence
            let open_start = rng.random_range(30..=mid - 30 - open_duration);
            let close_end = rng.random_range(mid + 30 + close_duration..=m - 30);
            SynthConfig {
                open_start,
                open_duration,
                close_end,
                close_duration,
                noise_sigma: noise_levels[i % noise_levels.len()],
                seed: seed.wrapping_mul(1_000_003).wrapping_add(i as u64),
                ..base.clone()
            }
        })
        .collect();
    configs.par_iter().map(generate).collect()
}

pub fn benchmark_suite(
    count: usize,
    speed_range: RangeInclusive<usize>,
    noise_levels: &[f64],
    seed: u64,
) -> Result<Vec<SynthOutput>> {
    benchmark_suite_with(
        &SynthConfig::default(),
        count,
        speed_range,
        noise_levels,
        seed,
    )
}
