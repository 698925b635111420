//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.

mod common;

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    exhaustive_closing, exhaustive_opening, linear_opening, radial_ramp, scalar_divergence, Xyz,
};
use lipevent::analysis::{detection_count, detnum_curve};
use lipevent::detector::{
    default_windows, detect_closing_in, detect_events, detect_opening, detect_opening_in,
    divergence_series, preprocess, DetectionConfig, SearchWindow, DEFAULT_LADDER,
};
use lipevent::divergence::{
    build_reference_sphere, classify_state, pair_signature, split_left_right, LipState,
};
use lipevent::geometry::{LandmarkFrame, LandmarkSequence};
use lipevent::metrics::{
    evaluate, recall_curve, time_deviation, EventOutcome, SequenceEvaluation, DEFAULT_TOLERANCE,
};
use lipevent::synth::{benchmark_suite, benchmark_suite_with, SynthConfig, SynthOutput};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SUITE_SEED: u64 = 20_240;
const SUITE_SIZE: usize = 100;

/// Noise-free suite of fast openings and closings, 11 mm peak. No smoothed
/// interframe of this suite comes within 0.09 mm of the silence threshold.
fn clean_suite() -> Vec<SynthOutput> {
    let base = SynthConfig {
        amplitude: 11.0,
        ..SynthConfig::default()
    };
    benchmark_suite_with(&base, SUITE_SIZE, 2..=6, &[0.0], SUITE_SEED).unwrap()
}

/// Default-amplitude suite spanning fast to slow events with 0.3 mm noise.
fn noisy_suite() -> Vec<SynthOutput> {
    benchmark_suite(SUITE_SIZE, 2..=40, &[0.3], SUITE_SEED).unwrap()
}

fn outcomes(suite: &[SynthOutput], config: &DetectionConfig) -> Vec<EventOutcome> {
    suite
        .iter()
        .flat_map(|s| {
            let r = detect_events(&s.sequence, config).unwrap();
            [
                EventOutcome::from_detection(r.opening_frame, s.truth.opening_frame),
                EventOutcome::from_detection(r.closing_frame, s.truth.closing_frame),
            ]
        })
        .collect()
}

fn recall(outcomes: &[EventOutcome], tolerance: usize) -> f64 {
    let hits = outcomes
        .iter()
        .filter(|o| o.deviation().is_some_and(|d| d <= tolerance))
        .count();
    hits as f64 / outcomes.len() as f64
}

fn csv_text(seq: &LandmarkSequence) -> String {
    let mut s = String::from("frame,landmark,x,y,z\n");
    for f in seq.frames() {
        for (i, p) in f.landmarks().iter().enumerate() {
            writeln!(s, "{},{},{:.6},{:.6},{:.6}", f.index(), i, p.x, p.y, p.z).unwrap();
        }
    }
    s
}

fn json_text(seq: &LandmarkSequence) -> String {
    let frames: Vec<Vec<[f64; 3]>> = seq
        .frames()
        .iter()
        .map(|f| f.landmarks().iter().map(|p| [p.x, p.y, p.z]).collect())
        .collect();
    serde_json::json!({ "frame_rate": seq.frame_rate(), "frames": frames }).to_string()
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lipevent"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "`lipevent {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

/// Landmark files written by hand in the documented formats go through
/// `detect` and `evaluate` unchanged.
fn end_to_end_pipeline() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    let base = SynthConfig {
        rigid_drift: 1.0,
        ..SynthConfig::default()
    };
    let suite = benchmark_suite_with(&base, 6, 2..=30, &[0.0, 0.2], 5).unwrap();
    for (i, s) in suite.iter().enumerate() {
        let (name, text) = if i % 2 == 0 {
            (format!("speaker{i}.csv"), csv_text(&s.sequence))
        } else {
            (format!("speaker{i}.json"), json_text(&s.sequence))
        };
        std::fs::write(data.join(name), text).unwrap();
        let truth = format!(
            "{{\"opening_frame\": {}, \"closing_frame\": {}}}",
            s.truth.opening_frame, s.truth.closing_frame
        );
        std::fs::write(data.join(format!("speaker{i}.truth.json")), truth).unwrap();
    }
    run_cli(&["detect", "data", "--out", "results"], dir.path())?;
    run_cli(
        &[
            "evaluate",
            "--results",
            "results",
            "--truth",
            "data",
            "--out",
            "eval",
        ],
        dir.path(),
    )?;

    let summary = std::fs::read_to_string(dir.path().join("results/summary.csv")).unwrap();
    let rows = summary.lines().count() - 1;
    if rows != suite.len() {
        return Err(format!("summary has {rows} rows, expected {}", suite.len()));
    }
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("eval/report.json")).unwrap(),
    )
    .unwrap();
    for key in [
        "f_acc",
        "f_dev_opening",
        "f_dev_closing",
        "e_rr",
        "t_dev_ms",
        "tolerance",
        "per_sequence",
    ] {
        if report.get(key).is_none() {
            return Err(format!("report lacks `{key}`"));
        }
    }
    let curve = std::fs::read_to_string(dir.path().join("eval/recall.csv")).unwrap();
    if curve.lines().count() != 22 {
        return Err(format!("recall curve has {} lines", curve.lines().count()));
    }
    Ok(format!(
        "{rows} sequences (csv+json), e_rr {}, t_dev {} ms",
        report["e_rr"], report["t_dev_ms"]
    ))
}

fn divergence_matches_scalar_loop() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(3..=40);
        let mut cloud = |scale: f64| -> Vec<Xyz> {
            (0..n)
                .map(|_| {
                    [
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                    ]
                })
                .collect()
        };
        let reference = cloud(30.0);
        let jitter = |base: &[Xyz], noise: Vec<Xyz>| -> Vec<Xyz> {
            base.iter()
                .zip(noise)
                .map(|(p, d)| [p[0] + d[0], p[1] + d[1], p[2] + d[2]])
                .collect()
        };
        let earlier = jitter(&reference, cloud(3.0));
        let later = jitter(&earlier, cloud(2.0));
        let to_frame = |i: usize, pts: &[Xyz]| {
            LandmarkFrame::new(
                i,
                pts.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect(),
            )
            .unwrap()
        };
        let (rf, ef, lf) = (
            to_frame(0, &reference),
            to_frame(1, &earlier),
            to_frame(2, &later),
        );
        let sphere = build_reference_sphere(&rf);
        let Ok(partition) = split_left_right(&rf, &sphere) else {
            continue;
        };
        let sig = pair_signature(&ef, &lf, &sphere, &partition).map_err(|e| e.to_string())?;
        let (total, left, right) = scalar_divergence(&reference, &earlier, &later);
        worst = worst
            .max((sig.div_total - total).abs())
            .max((sig.div_left - left).abs())
            .max((sig.div_right - right).abs());
        checked += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    if worst >= 1e-12 {
        return Err(format!("max error {worst:e} mm"));
    }
    if elapsed >= 5.0 {
        return Err(format!("took {elapsed:.2} s"));
    }
    Ok(format!(
        "1000 configurations, max error {worst:e} mm, {elapsed:.2} s"
    ))
}

fn analytic_radial_divergence() -> Outcome {
    let rest: Vec<Point3<f64>> = (0..16)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / 16.0;
            Point3::new(25.0 * th.cos(), 10.0 * th.sin(), 2.0 * (2.0 * th).cos())
        })
        .collect();
    let reference = LandmarkFrame::new(0, rest.clone()).unwrap();
    let sphere = build_reference_sphere(&reference);
    let partition = split_left_right(&reference, &sphere).unwrap();
    let mut notes = Vec::new();
    let cases = [
        (0.5, Some(LipState::Static)),
        (1.0, None),
        (2.0, Some(LipState::Opening)),
    ];
    for (d, expected) in cases {
        let moved = rest.iter().map(|p| p + p.coords.normalize() * d).collect();
        let moved = LandmarkFrame::new(1, moved).unwrap();
        let sig = pair_signature(&reference, &moved, &sphere, &partition).unwrap();
        if (sig.div_total - d).abs() >= 1e-9 {
            return Err(format!("d = {d}: div_total {}", sig.div_total));
        }
        let state = classify_state(&sig, 1.0, 0.4).state();
        if expected.is_some_and(|e| e != state) {
            return Err(format!("d = {d} classified {state}"));
        }
        notes.push(format!("{d}->{state}"));
    }
    Ok(notes.join(", "))
}

fn rigid_drift_invariance() -> Outcome {
    let config = DetectionConfig::default();
    let mut cases = clean_suite();
    cases.push(lipevent::synth::generate(&SynthConfig::default()).unwrap());
    for s in &cases {
        let drifted = lipevent::synth::generate(&SynthConfig {
            rigid_drift: 5.0,
            ..s.config.clone()
        })
        .unwrap();
        let a = detect_events(&s.sequence, &config).unwrap();
        let b = detect_events(&drifted.sequence, &config).unwrap();
        let same = a.opening_frame == b.opening_frame
            && a.closing_frame == b.closing_frame
            && a.opening_resolution == b.opening_resolution
            && a.closing_resolution == b.closing_resolution
            && a.framewise_states == b.framewise_states;
        if !same {
            return Err(format!(
                "open_start {}: ({:?}, {:?}) vs ({:?}, {:?})",
                s.config.open_start,
                a.opening_frame,
                a.closing_frame,
                b.opening_frame,
                b.closing_frame
            ));
        }
    }
    // labels of interframes sitting exactly on a threshold can flip under round-off
    let mut margin = f64::INFINITY;
    for s in &cases {
        let pre = preprocess(&s.sequence, &config).unwrap();
        for (sig, _) in divergence_series(&pre, &config).unwrap() {
            margin = margin.min((sig.div_total.abs() - config.eps_silence).abs());
        }
    }
    Ok(format!(
        "{} sequences identical under 5 mm / 5 deg drift, threshold margin {margin:.3} mm",
        cases.len()
    ))
}

fn multiresolution_equals_exhaustive() -> Outcome {
    let start = Instant::now();
    let config = DetectionConfig::default();
    let suite = clean_suite();
    let mut mismatches = Vec::new();
    for (i, s) in suite.iter().enumerate() {
        let pre = preprocess(&s.sequence, &config).unwrap();
        let (ow, cw) = default_windows(pre.len());
        let open = detect_opening_in(&pre, &config, ow).unwrap().frame;
        let close = detect_closing_in(&pre, &config, cw).unwrap().frame;
        let open_ref = exhaustive_opening(&pre, ow.start, ow.end);
        let close_ref = exhaustive_closing(&pre, cw.start, cw.end);
        if open != open_ref || open.is_none() {
            mismatches.push(format!("seq {i} opening {open:?} vs {open_ref:?}"));
        }
        if close != close_ref || close.is_none() {
            mismatches.push(format!("seq {i} closing {close:?} vs {close_ref:?}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if !mismatches.is_empty() {
        return Err(format!(
            "{} of 200 differ: {}",
            mismatches.len(),
            mismatches.join("; ")
        ));
    }
    if elapsed >= 60.0 {
        return Err(format!("took {elapsed:.1} s"));
    }
    Ok(format!("200/200 events identical, {elapsed:.1} s"))
}

fn noisy_ordering() -> Outcome {
    let suite = noisy_suite();
    let multi = DetectionConfig::default();
    let single = multi.clone().with_ladder(vec![1]);
    let raw = multi.clone().with_smoothing(1);
    let tol = DEFAULT_TOLERANCE;
    let e_multi = recall(&outcomes(&suite, &multi), tol);
    let e_single = recall(&outcomes(&suite, &single), tol);
    let e_raw = recall(&outcomes(&suite, &raw), tol);
    let detail = format!(
        "E-RR@{tol}: multi {e_multi:.3}, single {e_single:.3}, multi unsmoothed {e_raw:.3}"
    );
    if e_multi >= e_single && e_multi >= e_raw {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn slow_ramp(slope: f64) -> Outcome {
    let start = 120;
    let seq = radial_ramp(&linear_opening(500, start, slope, 150));
    let single = detect_events(&seq, &DetectionConfig::default().with_ladder(vec![1])).unwrap();
    let multi = detect_events(&seq, &DetectionConfig::default()).unwrap();
    let detail = format!(
        "{slope} mm/frame from frame {start}: ladder [1] -> {:?}, default -> {:?} at resolution {:?}",
        single.opening_frame, multi.opening_frame, multi.opening_resolution
    );
    match (single.opening_frame, multi.opening_frame) {
        (None, Some(f)) if f.abs_diff(start) <= 30 => Ok(detail),
        _ => Err(detail),
    }
}

fn slow_speaker_fallback() -> Outcome {
    slow_ramp(0.03)
}

fn slow_speaker_fallback_calibrated() -> Outcome {
    slow_ramp(0.04)
}

fn detection_count_exact() -> Outcome {
    let config = DetectionConfig::default().with_smoothing(1);
    let mut mismatches = Vec::new();
    for gt0 in 1..=300 {
        let r: Vec<f64> = (0..gt0 + 61)
            .map(|t| if t >= gt0 { 5.0 } else { 0.0 })
            .collect();
        let d = detect_opening(&radial_ramp(&r), &config).unwrap();
        let expected = detection_count(gt0, &DEFAULT_LADDER);
        if d.classifications() != expected || d.frame != Some(gt0) {
            mismatches.push(format!("{gt0}: {} vs {expected}", d.classifications()));
        }
    }
    if !mismatches.is_empty() {
        return Err(format!(
            "{} mismatches: {}",
            mismatches.len(),
            mismatches.join(", ")
        ));
    }
    let ladders: Vec<Vec<usize>> = (0..DEFAULT_LADDER.len())
        .map(|i| DEFAULT_LADDER[i..].to_vec())
        .collect();
    let rows = detnum_curve(61..=300, &ladders);
    for group in rows.chunks(ladders.len()) {
        if group.windows(2).any(|w| w[0].detnum >= w[1].detnum) {
            return Err(format!("gt0 {}: larger ts0 not cheaper", group[0].gt0));
        }
    }
    Ok("300/300 counts exact; coarser start cheaper for every gt0 in 61..=300".into())
}

fn metric_arithmetic() -> Outcome {
    let t = time_deviation(13.175, 250.0);
    if t != 52.7 {
        return Err(format!("time_deviation(13.175, 250) = {t}"));
    }
    let tolerances: Vec<usize> = (0..=100).collect();
    let mut fixtures = vec![
        vec![EventOutcome::Detected(0)],
        vec![EventOutcome::Missed, EventOutcome::Missed],
        vec![
            EventOutcome::Detected(3),
            EventOutcome::Missed,
            EventOutcome::Detected(41),
            EventOutcome::Detected(100),
        ],
    ];
    fixtures.push(outcomes(&clean_suite(), &DetectionConfig::default()));
    fixtures.push(outcomes(
        &noisy_suite(),
        &DetectionConfig::default().with_ladder(vec![1]),
    ));
    for (i, f) in fixtures.iter().enumerate() {
        let curve = recall_curve(f, &tolerances).unwrap();
        if curve.windows(2).any(|w| w[1].e_rr < w[0].e_rr) {
            return Err(format!("fixture {i} curve decreases"));
        }
    }
    let seqs = vec![SequenceEvaluation {
        sequence: "a".into(),
        opening: Some(110),
        closing: Some(390),
        states: None,
        truth: lipevent::metrics::GroundTruth::new(100, 400, None).unwrap(),
    }];
    let report = evaluate(&seqs, 40, 250.0).unwrap();
    if report.t_dev_ms != Some(40.0) {
        return Err(format!("t_dev {:?}", report.t_dev_ms));
    }
    Ok(format!(
        "52.7 ms exact; {} recall curves monotone",
        fixtures.len()
    ))
}

fn reverse_symmetry() -> Outcome {
    let config = DetectionConfig::default();
    let mut checked = 0;
    for (i, s) in clean_suite().iter().enumerate() {
        let pre = preprocess(&s.sequence, &config).unwrap();
        let m = pre.len();
        let rev = pre.reversed();
        let mirror = |w: SearchWindow| SearchWindow::new(m - 1 - w.end, m - 1 - w.start);
        let (ow, cw) = default_windows(m);

        let close = detect_closing_in(&pre, &config, cw).unwrap().frame;
        let close_rev = detect_opening_in(&rev, &config, mirror(cw))
            .unwrap()
            .frame
            .map(|r| m - 1 - r);
        let open = detect_opening_in(&pre, &config, ow).unwrap().frame;
        let open_rev = detect_closing_in(&rev, &config, mirror(ow))
            .unwrap()
            .frame
            .map(|r| m - 1 - r);
        if close != close_rev || close.is_none() {
            return Err(format!(
                "seq {i}: closing {close:?} vs mirrored {close_rev:?}"
            ));
        }
        if open != open_rev || open.is_none() {
            return Err(format!(
                "seq {i}: opening {open:?} vs mirrored {open_rev:?}"
            ));
        }
        checked += 2;
    }
    Ok(format!("{checked}/200 events symmetric"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 detect+evaluate end to end", end_to_end_pipeline),
        (
            "2 divergence vs scalar oracle",
            divergence_matches_scalar_loop,
        ),
        ("3 analytic radial divergence", analytic_radial_divergence),
        ("4 rigid drift invariance", rigid_drift_invariance),
        (
            "5 multi-resolution vs exhaustive",
            multiresolution_equals_exhaustive,
        ),
        ("6 noisy robustness ordering", noisy_ordering),
        (
            "7 slow speaker fallback (0.03 mm/frame)",
            slow_speaker_fallback,
        ),
        (
            "7b slow speaker fallback (0.04 mm/frame)",
            slow_speaker_fallback_calibrated,
        ),
        ("8 detection count exactness", detection_count_exact),
        ("9 metric arithmetic", metric_arithmetic),
        ("10 reverse symmetry", reverse_symmetry),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
