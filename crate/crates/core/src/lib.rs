//! Detection of lip opening and closing events in 3D landmark sequences.
//!
//! Motion between two frames is summarised by its divergence about the centre
//! of mass of a reference frame: outward landmark motion is positive, inward
//! motion negative. Events are located by a coarse-to-fine search that
//! classifies widely spaced frame pairs first and refines only the pair that
//! fires.

pub mod analysis;
pub mod cli;
pub mod detector;
pub mod divergence;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};
