//! Test-only oracles. Nothing here calls into the divergence or detector
//! modules; coordinates are read out of sequences as plain arrays.

#![allow(dead_code)]

use lipevent::geometry::LandmarkSequence;

pub type Xyz = [f64; 3];

pub fn points(seq: &LandmarkSequence, t: usize) -> Vec<Xyz> {
    seq.frame(t)
        .landmarks()
        .iter()
        .map(|p| [p.x, p.y, p.z])
        .collect()
}

/// (total, left, right) divergence by explicit scalar loops.
pub fn scalar_divergence(reference: &[Xyz], earlier: &[Xyz], later: &[Xyz]) -> (f64, f64, f64) {
    let n = reference.len();
    let mut c = [0.0; 3];
    for p in reference {
        for k in 0..3 {
            c[k] += p[k];
        }
    }
    for v in &mut c {
        *v /= n as f64;
    }
    let (mut total, mut left, mut right) = (0.0, 0.0, 0.0);
    let (mut nl, mut nr) = (0usize, 0usize);
    for i in 0..n {
        let mut dot = 0.0;
        let mut r2 = 0.0;
        for k in 0..3 {
            let m = later[i][k] - earlier[i][k];
            let r = later[i][k] - c[k];
            dot += m * r;
            r2 += r * r;
        }
        let d = dot / r2.sqrt();
        total += d;
        let dx = reference[i][0] - c[0];
        if dx < 1e-9 {
            left += d;
            nl += 1;
        }
        if dx > -1e-9 {
            right += d;
            nr += 1;
        }
    }
    (total / n as f64, left / nl as f64, right / nr as f64)
}

pub fn fires_opening(div: (f64, f64, f64), eps_silence: f64, eps_symmetry: f64) -> bool {
    let (total, left, right) = div;
    total.abs() >= eps_silence && (left - right).abs() < eps_symmetry && total > 0.0
}

/// First `t` in `(start, end]` whose pair `(t - 1, t)` is an opening, using
/// frame `start` as the reference.
pub fn exhaustive_opening(seq: &LandmarkSequence, start: usize, end: usize) -> Option<usize> {
    let reference = points(seq, start);
    let mut earlier = points(seq, start);
    for t in start + 1..=end {
        let later = points(seq, t);
        if fires_opening(scalar_divergence(&reference, &earlier, &later), 1.0, 0.4) {
            return Some(t);
        }
        earlier = later;
    }
    None
}

/// Last `t` in `[start, end)` whose pair `(t, t + 1)` is a closing, using
/// frame `end` as the reference.
pub fn exhaustive_closing(seq: &LandmarkSequence, start: usize, end: usize) -> Option<usize> {
    let reference = points(seq, end);
    let mut later = points(seq, end);
    for t in (start..end).rev() {
        let earlier = points(seq, t);
        // a closing pair seen backwards in time is an opening one
        if fires_opening(scalar_divergence(&reference, &later, &earlier), 1.0, 0.4) {
            return Some(t);
        }
        later = earlier;
    }
    None
}

/// 20 landmarks on a 25 x 10 mm ellipse with radial offset `r[t]` at frame t.
pub fn radial_ramp(r: &[f64]) -> LandmarkSequence {
    let base: Vec<Xyz> = (0..20)
        .map(|i| {
            let th = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / 20.0;
            [25.0 * th.cos(), 10.0 * th.sin(), 0.0]
        })
        .collect();
    let frames = r
        .iter()
        .map(|&d| {
            base.iter()
                .map(|p| {
                    let n = (p[0] * p[0] + p[1] * p[1]).sqrt();
                    nalgebra::Point3::new(p[0] + d * p[0] / n, p[1] + d * p[1] / n, 0.0)
                })
                .collect()
        })
        .collect();
    LandmarkSequence::from_points(frames, 250.0).unwrap()
}

/// Rest until `start`, then a linear opening of `slope` mm per frame for
/// `frames` frames, then hold.
pub fn linear_opening(len: usize, start: usize, slope: f64, frames: usize) -> Vec<f64> {
    (0..len)
        .map(|t| slope * t.saturating_sub(start).min(frames) as f64)
        .collect()
}
