//! Interframe motion divergence and lip state classification.
//!
//! The divergence of an interframe motion is the flux of the landmark motion
//! vectors through a reference sphere centred on the lip. With every landmark
//! owning an equal patch of the sphere surface, the patch area cancels against
//! the total surface and the flux reduces to the mean radial projection
//!
//! ```text
//! div = (1/n) Σ m_i · (L_i - O) / |L_i - O|
//! ```
//!
//! where `m_i` is the motion of landmark `i`, `L_i` its position in the later
//! frame and `O` the sphere centre. Positive divergence means the lip is
//! expanding (opening), negative means it is contracting (closing).

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{center_of_mass, LandmarkFrame};

/// Silence threshold on |divergence| in millimetres.
pub const DEFAULT_EPS_SILENCE: f64 = 1.0;
/// Maximum |left - right| divergence difference for a symmetric motion, mm.
pub const DEFAULT_EPS_SYMMETRY: f64 = 0.4;

const CENTER_TOLERANCE: f64 = 1e-9;
const MIDLINE_TOLERANCE: f64 = 1e-9;

/// Divergence reference: the centre of mass of the lip at the reference frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSphere {
    center: Point3<f64>,
    landmark_count: usize,
}

impl ReferenceSphere {
    pub fn new(center: Point3<f64>, landmark_count: usize) -> Result<Self> {
        if !center.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidLandmarks("non-finite sphere center".into()));
        }
        if landmark_count < crate::geometry::MIN_LANDMARKS {
            return Err(Error::InvalidLandmarks(format!(
                "sphere needs at least {} landmarks, got {landmark_count}",
                crate::geometry::MIN_LANDMARKS
            )));
        }
        Ok(Self {
            center,
            landmark_count,
        })
    }

    pub fn center(&self) -> &Point3<f64> {
        &self.center
    }

    pub fn landmark_count(&self) -> usize {
        self.landmark_count
    }
}

pub fn build_reference_sphere(reference: &LandmarkFrame) -> ReferenceSphere {
    ReferenceSphere {
        center: center_of_mass(reference),
        landmark_count: reference.len(),
    }
}

/// Landmark indices on each side of the lip's vertical midplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Splits landmarks by the sign of their x offset from the sphere centre.
/// Landmarks on the midplane belong to both halves.
pub fn split_left_right(landmarks: &LandmarkFrame, sphere: &ReferenceSphere) -> Result<Partition> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, p) in landmarks.landmarks().iter().enumerate() {
        let dx = p.x - sphere.center.x;
        if dx.abs() < MIDLINE_TOLERANCE {
            left.push(i);
            right.push(i);
        } else if dx < 0.0 {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    if left.is_empty() {
        return Err(Error::EmptySide("left"));
    }
    if right.is_empty() {
        return Err(Error::EmptySide("right"));
    }
    Ok(Partition { left, right })
}

/// `current - previous`, landmark by landmark.
pub fn motion_vectors(
    current: &LandmarkFrame,
    previous: &LandmarkFrame,
) -> Result<Vec<Vector3<f64>>> {
    if current.len() != previous.len() {
        return Err(Error::CountMismatch {
            expected: previous.len(),
            found: current.len(),
        });
    }
    Ok(current
        .landmarks()
        .iter()
        .zip(previous.landmarks())
        .map(|(c, p)| c - p)
        .collect())
}

/// Divergence of one interframe motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionSignature {
    pub div_total: f64,
    pub div_left: f64,
    pub div_right: f64,
    pub per_landmark: Vec<f64>,
    /// (earlier frame, later frame)
    pub source_pair: (usize, usize),
}

fn mean_over(values: &[f64], indices: &[usize]) -> f64 {
    indices.iter().map(|&i| values[i]).sum::<f64>() / indices.len() as f64
}

/// Divergence of `vectors` measured at `landmarks` (the later frame of the
/// pair) against `sphere`.
pub fn interframe_divergence(
    vectors: &[Vector3<f64>],
    landmarks: &LandmarkFrame,
    sphere: &ReferenceSphere,
    partition: &Partition,
    source_pair: (usize, usize),
) -> Result<MotionSignature> {
    let n = sphere.landmark_count;
    if vectors.len() != n {
        return Err(Error::CountMismatch {
            expected: n,
            found: vectors.len(),
        });
    }
    if landmarks.len() != n {
        return Err(Error::CountMismatch {
            expected: n,
            found: landmarks.len(),
        });
    }
    if let Some(&bad) = partition
        .left
        .iter()
        .chain(&partition.right)
        .find(|&&i| i >= n)
    {
        return Err(Error::InvalidLandmarks(format!(
            "partition index {bad} out of range for {n} landmarks"
        )));
    }
    if partition.left.is_empty() {
        return Err(Error::EmptySide("left"));
    }
    if partition.right.is_empty() {
        return Err(Error::EmptySide("right"));
    }

    let per_landmark = vectors
        .iter()
        .zip(landmarks.landmarks())
        .enumerate()
        .map(|(index, (m, l))| {
            let radial = l - sphere.center;
            let norm = radial.norm();
            if norm < CENTER_TOLERANCE {
                Err(Error::LandmarkAtCenter { index })
            } else {
                Ok(m.dot(&radial) / norm)
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(MotionSignature {
        div_total: per_landmark.iter().sum::<f64>() / n as f64,
        div_left: mean_over(&per_landmark, &partition.left),
        div_right: mean_over(&per_landmark, &partition.right),
        per_landmark,
        source_pair,
    })
}

/// Motion vectors and divergence for the pair `(earlier, later)`.
pub fn pair_signature(
    earlier: &LandmarkFrame,
    later: &LandmarkFrame,
    sphere: &ReferenceSphere,
    partition: &Partition,
) -> Result<MotionSignature> {
    let vectors = motion_vectors(later, earlier)?;
    interframe_divergence(
        &vectors,
        later,
        sphere,
        partition,
        (earlier.index(), later.index()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LipState {
    Static,
    Opening,
    Closing,
}

impl LipState {
    pub fn as_str(&self) -> &'static str {
        match self {
            LipState::Static => "static",
            LipState::Opening => "opening",
            LipState::Closing => "closing",
        }
    }
}

impl std::fmt::Display for LipState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LipState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "static" => Ok(LipState::Static),
            "opening" => Ok(LipState::Opening),
            "closing" => Ok(LipState::Closing),
            other => Err(format!("unknown lip state `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rejection {
    /// Left and right halves disagree by at least the symmetry tolerance.
    Asymmetric,
}

/// Result of classifying one interframe motion.
///
/// A rejected motion always reports [`LipState::Static`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    state: LipState,
    rejection: Option<Rejection>,
}

impl Classification {
    pub const STATIC: Self = Self {
        state: LipState::Static,
        rejection: None,
    };

    pub fn of(state: LipState) -> Self {
        Self {
            state,
            rejection: None,
        }
    }

    pub fn rejected(reason: Rejection) -> Self {
        Self {
            state: LipState::Static,
            rejection: Some(reason),
        }
    }

    pub fn state(&self) -> LipState {
        self.state
    }

    pub fn rejection(&self) -> Option<Rejection> {
        self.rejection
    }

    pub fn is_rejected(&self) -> bool {
        self.rejection.is_some()
    }
}

/// Silence test first, then the left/right symmetry constraint, then the
/// sign of the total divergence.
pub fn classify_state(
    sig: &MotionSignature,
    eps_silence: f64,
    eps_symmetry: f64,
) -> Classification {
    if sig.div_total.abs() < eps_silence {
        Classification::STATIC
    } else if (sig.div_left - sig.div_right).abs() >= eps_symmetry {
        Classification::rejected(Rejection::Asymmetric)
    } else if sig.div_total > 0.0 {
        Classification::of(LipState::Opening)
    } else {
        Classification::of(LipState::Closing)
    }
}
