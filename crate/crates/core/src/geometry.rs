//! Landmark sequence model, rigid pose correction and temporal smoothing.
//!
//! All coordinates are millimetres. A [`LandmarkSequence`] is a validated,
//! immutable list of frames that share one landmark topology: landmark `i`
//! in one frame corresponds to landmark `i` in every other frame.

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Frame rate of the capture rig the detector constants were tuned on.
pub const DEFAULT_FRAME_RATE: f64 = 250.0;

/// Minimum number of landmarks needed to fix a rigid pose.
pub const MIN_LANDMARKS: usize = 3;

const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

/// One time sample of `n` lip landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    index: usize,
    landmarks: Vec<Point3<f64>>,
}

impl LandmarkFrame {
    pub fn new(index: usize, landmarks: Vec<Point3<f64>>) -> Result<Self> {
        if landmarks.len() < MIN_LANDMARKS {
            return Err(Error::InvalidLandmarks(format!(
                "frame {index} has {} landmarks, at least {MIN_LANDMARKS} required",
                landmarks.len()
            )));
        }
        if let Some(i) = landmarks
            .iter()
            .position(|p| !p.coords.iter().all(|c| c.is_finite()))
        {
            return Err(Error::InvalidLandmarks(format!(
                "frame {index} landmark {i} has a non-finite coordinate"
            )));
        }
        Ok(Self { index, landmarks })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn landmarks(&self) -> &[Point3<f64>] {
        &self.landmarks
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    /// Same landmarks, relabelled with a new frame ordinal.
    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn transformed(&self, transform: &RigidTransform) -> Self {
        Self {
            index: self.index,
            landmarks: self.landmarks.iter().map(|p| transform.apply(p)).collect(),
        }
    }
}

/// Time-ordered landmark frames at a fixed frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSequence {
    frames: Vec<LandmarkFrame>,
    frame_rate: f64,
}

impl LandmarkSequence {
    pub fn new(frames: Vec<LandmarkFrame>, frame_rate: f64) -> Result<Self> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::InvalidLandmarks(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        if frames.len() < 2 {
            return Err(Error::InvalidLandmarks(format!(
                "a sequence needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        let n = frames[0].len();
        for (ordinal, frame) in frames.iter().enumerate() {
            if frame.index != ordinal {
                return Err(Error::InvalidLandmarks(format!(
                    "frame indices must be contiguous from 0: position {ordinal} holds frame {}",
                    frame.index
                )));
            }
            if frame.len() != n {
                return Err(Error::CountMismatch {
                    expected: n,
                    found: frame.len(),
                });
            }
        }
        Ok(Self { frames, frame_rate })
    }

    /// Builds a sequence from raw per-frame point lists, numbering frames from 0.
    pub fn from_points(points: Vec<Vec<Point3<f64>>>, frame_rate: f64) -> Result<Self> {
        let frames = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| LandmarkFrame::new(i, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, frame_rate)
    }

    pub fn frames(&self) -> &[LandmarkFrame] {
        &self.frames
    }

    pub fn frame(&self, index: usize) -> &LandmarkFrame {
        &self.frames[index]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn landmark_count(&self) -> usize {
        self.frames[0].len()
    }

    /// The sequence played backwards; frame `i` of the result is frame
    /// `len - 1 - i` of `self`.
    pub fn reversed(&self) -> Self {
        let frames = self
            .frames
            .iter()
            .rev()
            .enumerate()
            .map(|(i, f)| f.clone().with_index(i))
            .collect();
        Self {
            frames,
            frame_rate: self.frame_rate,
        }
    }

    /// Applies a per-frame map while keeping indices and frame rate.
    fn map_frames<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&LandmarkFrame) -> Result<LandmarkFrame> + Sync,
    {
        let frames = self.frames.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frames,
            frame_rate: self.frame_rate,
        })
    }
}

/// Proper rigid motion `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Rotation3<f64>,
    translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Validates that `rotation` is orthonormal with determinant +1.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let gram_error = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        let det = rotation.determinant();
        if gram_error > ORTHONORMAL_TOLERANCE || (det - 1.0).abs() > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidLandmarks(format!(
                "rotation is not proper orthonormal (|RᵀR - I| = {gram_error:e}, det = {det})"
            )));
        }
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidLandmarks("non-finite translation".into()));
        }
        Ok(Self {
            rotation: Rotation3::from_matrix_unchecked(rotation),
            translation,
        })
    }

    pub fn from_parts(rotation: Rotation3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        self.rotation * p + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rotation = self.rotation.inverse();
        Self {
            rotation,
            translation: -(rotation * self.translation),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// Arithmetic mean of the frame's landmarks.
pub fn center_of_mass(frame: &LandmarkFrame) -> Point3<f64> {
    centroid(frame.landmarks())
}

fn centroid(points: &[Point3<f64>]) -> Point3<f64> {
    let sum = points
        .iter()
        .fold(Vector3::zeros(), |acc: Vector3<f64>, p| acc + p.coords);
    Point3::from(sum / points.len() as f64)
}

/// Second-largest over largest eigenvalue of the point scatter; zero for
/// collinear or coincident points.
fn planarity_ratio(points: &[Point3<f64>], center: &Point3<f64>) -> f64 {
    let scatter = points.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - center;
        acc + d * d.transpose()
    });
    let mut eig: Vec<f64> = scatter.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    if eig[0] <= f64::MIN_POSITIVE {
        0.0
    } else {
        eig[1].max(0.0) / eig[0]
    }
}

/// Least-squares rigid fit (no scaling) carrying `frame` onto `reference`.
///
/// Returns the aligned frame and the transform that produced it. The
/// rotation comes from the SVD of the cross-covariance with a reflection
/// correction, so it is always proper.
pub fn rigid_align(
    frame: &LandmarkFrame,
    reference: &LandmarkFrame,
) -> Result<(LandmarkFrame, RigidTransform)> {
    if frame.len() != reference.len() {
        return Err(Error::CountMismatch {
            expected: reference.len(),
            found: frame.len(),
        });
    }
    let src_center = center_of_mass(frame);
    let dst_center = center_of_mass(reference);
    for (name, pts, c) in [
        ("frame", frame.landmarks(), &src_center),
        ("reference", reference.landmarks(), &dst_center),
    ] {
        if planarity_ratio(pts, c) < 1e-12 {
            return Err(Error::DegenerateConfiguration(format!(
                "{name} {} landmarks are collinear or coincident",
                if name == "frame" {
                    frame.index()
                } else {
                    reference.index()
                }
            )));
        }
    }

    let cross = frame
        .landmarks()
        .iter()
        .zip(reference.landmarks())
        .fold(Matrix3::zeros(), |acc, (p, q)| {
            acc + (p - src_center) * (q - dst_center).transpose()
        });
    let svd = cross.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::DegenerateConfiguration(
                "cross-covariance SVD did not converge".into(),
            ))
        }
    };
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let rotation = Rotation3::from_matrix_unchecked(rotation);
    let translation = dst_center.coords - rotation * src_center.coords;
    let transform = RigidTransform::from_parts(rotation, translation);
    Ok((frame.transformed(&transform), transform))
}

/// Centered moving average of every landmark coordinate. The window shrinks
/// near the sequence ends instead of padding.
pub fn smooth_sequence(seq: &LandmarkSequence, window: usize) -> Result<LandmarkSequence> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidWindow(window));
    }
    if window == 1 {
        return Ok(seq.clone());
    }
    let half = window / 2;
    let m = seq.len();
    let n = seq.landmark_count();
    let frames = (0..m)
        .map(|t| {
            let lo = t.saturating_sub(half);
            let hi = (t + half).min(m - 1);
            let count = (hi - lo + 1) as f64;
            let landmarks = (0..n)
                .map(|i| {
                    let sum = seq.frames[lo..=hi]
                        .iter()
                        .fold(Vector3::zeros(), |acc: Vector3<f64>, f| {
                            acc + f.landmarks[i].coords
                        });
                    Point3::from(sum / count)
                })
                .collect();
            LandmarkFrame {
                index: t,
                landmarks,
            }
        })
        .collect();
    Ok(LandmarkSequence {
        frames,
        frame_rate: seq.frame_rate,
    })
}

/// Rigidly aligns every frame to frame `reference_index`, which is returned
/// unchanged.
pub fn pose_correct(seq: &LandmarkSequence, reference_index: usize) -> Result<LandmarkSequence> {
    let reference = seq.frames.get(reference_index).ok_or_else(|| {
        Error::InvalidLandmarks(format!(
            "reference frame {reference_index} outside sequence of {} frames",
            seq.len()
        ))
    })?;
    seq.map_frames(|frame| {
        if frame.index == reference_index {
            Ok(frame.clone())
        } else {
            rigid_align(frame, reference).map(|(aligned, _)| aligned)
        }
    })
}
