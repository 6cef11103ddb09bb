//! Geometric quality metrics of a finished animation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::export::read_frame_dir;
use crate::error::Result;
use crate::geometry::{curve_length, delaunay_triangulate, QuadratureSpec};
use crate::losses::{arap_loss, la_loss, ArapConfig, FitMode, LaConfig, LossBreakdown, SweepPath};
use crate::sketch::SketchVideo;

pub const METRICS_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema: u32,
    pub frames: usize,
    pub strokes: usize,
    pub fit_mode: FitMode,
    /// `stroke_lengths[i][s]` is the length of stroke `s` in frame `i`.
    pub stroke_lengths: Vec<Vec<f64>>,
    /// Largest `|L_i - L_0|` over frames and strokes.
    pub max_length_deviation: f64,
    /// Mean of `|L_i - L_0|` over frames `1..n` and strokes.
    pub mean_length_deviation: f64,
    /// Area swept by all strokes with control points moving in straight
    /// lines between consecutive frames.
    pub total_swept_area: f64,
    /// ARAP energy of each frame against frame 0.
    pub arap_energy: Vec<f64>,
    pub total_arap_energy: f64,
    /// Mean control-point displacement per frame.
    pub mean_speed: f64,
    /// Mean norm of the second difference of control-point positions.
    pub mean_acceleration: f64,
    /// Final training loss, when produced by a training run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<LossBreakdown>,
}

pub fn compute_metrics(
    video: &SketchVideo,
    fit_mode: FitMode,
    q: &QuadratureSpec,
) -> Result<MetricsReport> {
    q.validate()?;
    let n = video.frame_count();
    let k = video.stroke_count();
    let stroke_lengths: Vec<Vec<f64>> = video
        .frames()
        .iter()
        .map(|f| f.strokes().iter().map(|s| curve_length(s, q)).collect())
        .collect();
    let mut max_dev = 0.0f64;
    let mut sum_dev = 0.0;
    for row in &stroke_lengths[1..] {
        for (l, l0) in row.iter().zip(&stroke_lengths[0]) {
            let d = (l - l0).abs();
            max_dev = max_dev.max(d);
            sum_dev += d;
        }
    }

    let area_only = LaConfig {
        lambda_l: 0.0,
        lambda_a: 0.0,
        ..LaConfig::default()
    };
    let total_swept_area = la_loss(video, SweepPath::Linear, &area_only, q)?.area_term;

    let rest = video.frames()[0].points();
    let mesh = delaunay_triangulate(&rest)?;
    let arap = arap_loss(
        &mesh,
        &rest,
        video,
        &ArapConfig {
            lambda_arap: 0.0,
            fit_mode,
        },
    )?;

    let pts = video.point_frames();
    let m = video.point_count() as f64;
    let mut speed = 0.0;
    for w in pts.windows(2) {
        speed += w[0]
            .iter()
            .zip(&w[1])
            .map(|(a, b)| a.distance(*b))
            .sum::<f64>();
    }
    let mut accel = 0.0;
    for w in pts.windows(3) {
        accel += (0..w[0].len())
            .map(|j| (w[2][j] - w[1][j] * 2.0 + w[0][j]).norm())
            .sum::<f64>();
    }

    Ok(MetricsReport {
        schema: METRICS_SCHEMA,
        frames: n,
        strokes: k,
        fit_mode,
        stroke_lengths,
        max_length_deviation: max_dev,
        mean_length_deviation: sum_dev / ((n - 1) * k) as f64,
        total_swept_area,
        arap_energy: arap.per_frame,
        total_arap_energy: arap.energy,
        mean_speed: speed / ((n - 1) as f64 * m),
        mean_acceleration: if n > 2 {
            accel / ((n - 2) as f64 * m)
        } else {
            0.0
        },
        training: None,
    })
}

/// Recomputes the metrics of the frame sequence stored in `dir`.
pub fn run_metrics(dir: &Path, fit_mode: FitMode) -> Result<MetricsReport> {
    let video = SketchVideo::new(read_frame_dir(dir)?)?;
    compute_metrics(&video, fit_mode, &QuadratureSpec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CubicBezier, Point2};
    use crate::sketch::SketchFrame;

    fn frame(dx: f64, stretch: f64) -> SketchFrame {
        SketchFrame::new(vec![
            CubicBezier::line(Point2::new(dx, 0.0), Point2::new(dx + 3.0 * stretch, 0.0)),
            CubicBezier::line(Point2::new(dx, 5.0), Point2::new(dx + 1.0, 7.0)),
        ])
        .unwrap()
    }

    #[test]
    fn static_sequence_is_all_zero() {
        let v = SketchVideo::repeat(&frame(0.0, 1.0), 24).unwrap();
        let r =
            compute_metrics(&v, FitMode::RotationThenScale, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.frames, 24);
        assert_eq!(r.max_length_deviation, 0.0);
        assert_eq!(r.mean_length_deviation, 0.0);
        assert_eq!(r.total_swept_area, 0.0);
        assert!(r.arap_energy.iter().all(|e| *e == 0.0));
        assert_eq!(r.mean_speed, 0.0);
        assert_eq!(r.mean_acceleration, 0.0);
    }

    #[test]
    fn translation_moves_without_deforming() {
        let v = SketchVideo::new((0..4).map(|i| frame(i as f64 * 2.0, 1.0)).collect()).unwrap();
        let r = compute_metrics(&v, FitMode::RotationOnly, &QuadratureSpec::default()).unwrap();
        assert!(r.max_length_deviation < 1e-12);
        assert!(r.total_swept_area > 0.0);
        assert!((r.mean_speed - 2.0).abs() < 1e-12);
        assert!(r.mean_acceleration < 1e-12);
    }

    #[test]
    fn stretched_stroke() {
        let v = SketchVideo::new(vec![frame(0.0, 1.0), frame(0.0, 4.0 / 3.0)]).unwrap();
        let r =
            compute_metrics(&v, FitMode::RotationThenScale, &QuadratureSpec::default()).unwrap();
        assert!((r.max_length_deviation - 1.0).abs() < 1e-9);
        assert!((r.mean_length_deviation - 0.5).abs() < 1e-9);
        assert_eq!(r.arap_energy.len(), 2);
    }
}
