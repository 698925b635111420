//! Closed-form cost of the sequential coarse-to-fine search.
//!
//! When the event lies at offset `gt` from the current reference frame, a
//! level with step `ts` classifies `ceil(gt / ts)` interframes before the
//! pair containing the event fires. The next level then sees the event at
//! offset `gt mod ts` from its new reference frame, or `ts` when the event
//! sits exactly on a sampled frame.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleStep {
    pub level: usize,
    pub resolution: usize,
    /// Event offset from the level's reference frame.
    pub relative_gt: usize,
    /// 1 when `relative_gt` is not a multiple of `resolution`.
    pub w: u8,
}

/// Relative ground truth for the next level, plus the remainder indicator.
pub fn gt_update(gt: usize, ts: usize) -> (usize, u8) {
    let rem = gt % ts;
    if rem != 0 {
        (rem, 1)
    } else {
        (ts, 0)
    }
}

/// Level-by-level trace of the relative ground truth through `ladder`.
pub fn schedule(gt0: usize, ladder: &[usize]) -> Vec<ScheduleStep> {
    let mut gt = gt0;
    ladder
        .iter()
        .enumerate()
        .map(|(level, &ts)| {
            let (next, w) = gt_update(gt, ts);
            let step = ScheduleStep {
                level,
                resolution: ts,
                relative_gt: gt,
                w,
            };
            gt = next;
            step
        })
        .collect()
}

/// Interframe classifications performed by the sequential search before the
/// event at `gt0` is locked.
pub fn detection_count(gt0: usize, ladder: &[usize]) -> usize {
    schedule(gt0, ladder)
        .iter()
        .map(|s| {
            let q = s.relative_gt / s.resolution;
            if s.w == 1 {
                q + 1
            } else {
                q
            }
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetNumRow {
    pub gt0: usize,
    pub ladder: Vec<usize>,
    pub detnum: usize,
}

/// One row per `(gt0, ladder)`, ladders varying fastest.
pub fn detnum_curve(
    gt_range: std::ops::RangeInclusive<usize>,
    ladders: &[Vec<usize>],
) -> Vec<DetNumRow> {
    gt_range
        .flat_map(|gt0| {
            ladders.iter().map(move |ladder| DetNumRow {
                gt0,
                ladder: ladder.clone(),
                detnum: detection_count(gt0, ladder),
            })
        })
        .collect()
}

pub fn ladder_label(ladder: &[usize]) -> String {
    ladder
        .iter()
        .map(|ts| ts.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// Writes `gt0,ladder,detnum` CSV.
pub fn write_detnum_csv<W: Write>(rows: &[DetNumRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gt0", "ladder", "detnum"])?;
    for row in rows {
        w.write_record([
            row.gt0.to_string(),
            ladder_label(&row.ladder),
            row.detnum.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
