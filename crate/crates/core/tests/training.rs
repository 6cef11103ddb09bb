mod common;

use sketchmotion::geometry::{Point2, QuadratureSpec};
use sketchmotion::io::load_sketch;
use sketchmotion::losses::*;
use sketchmotion::motion::MotionConfig;
use sketchmotion::optim::{train, TrainConfig, Wiring};
use sketchmotion::sketch::SketchFrame;

fn fish() -> SketchFrame {
    load_sketch(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/fish.svg"))
        .unwrap()
}

/// Moving average over a `w`-iteration window.
fn smoothed(values: &[f64], w: usize) -> Vec<f64> {
    values
        .windows(w)
        .map(|s| s.iter().sum::<f64>() / w as f64)
        .collect()
}

#[test]
fn rigid_oracle_loss_drops_below_a_tenth() {
    let oracle = make_rigid_motion_oracle(0.1, Point2::ZERO, 1.0);
    let cfg = TrainConfig {
        seed: 7,
        log_every: 0,
        ..TrainConfig::default()
    };
    let r = train(
        &fish(),
        &oracle,
        &LaConfig::default(),
        &ArapConfig::default(),
        &cfg,
    )
    .unwrap();
    assert_eq!(r.history.len(), 1000);
    let first = r.history[0].total;
    println!("iteration 0: {first}, final: {}", r.final_breakdown.total);
    assert!(r.final_breakdown.total < 0.1 * first);
}

#[test]
fn convex_oracle_history_is_eventually_monotone() {
    let sketch = fish();
    let frames = 8;
    let targets = make_rigid_motion_oracle(0.05, Point2::new(0.5, 0.0), 1.0)
        .targets(&sketch, frames)
        .unwrap();
    let oracle = make_target_oracle(&targets, 1.0);
    let cfg = TrainConfig {
        iterations: 400,
        frames,
        seed: 1,
        log_every: 0,
        ..TrainConfig::default()
    };
    let arap = ArapConfig {
        lambda_arap: 0.0,
        ..ArapConfig::default()
    };
    let r = train(&sketch, &oracle, &LaConfig::disabled(), &arap, &cfg).unwrap();
    let totals: Vec<f64> = r.history.iter().map(|b| b.total).collect();
    let s = smoothed(&totals[50..], 10);
    for (i, w) in s.windows(2).enumerate() {
        assert!(
            w[1] <= w[0],
            "smoothed loss rose at iteration {}: {} -> {}",
            50 + i + 1,
            w[0],
            w[1]
        );
    }
}

#[test]
fn posthoc_wiring_trains_and_is_deterministic() {
    let oracle = make_rigid_motion_oracle(0.1, Point2::ZERO, 1.0);
    let cfg = TrainConfig {
        iterations: 200,
        frames: 8,
        wiring: Wiring::PostHocRefine,
        seed: 3,
        log_every: 0,
        motion: MotionConfig::default(),
        quadrature: QuadratureSpec::default(),
        ..TrainConfig::default()
    };
    let run = || {
        train(
            &fish(),
            &oracle,
            &LaConfig::default(),
            &ArapConfig::default(),
            &cfg,
        )
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.history, b.history);
    assert_eq!(a.video, b.video);
    assert!(a.final_breakdown.guidance_term < 0.5 * a.history[0].guidance_term);
}
