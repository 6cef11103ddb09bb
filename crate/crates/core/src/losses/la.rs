use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    curve_length_grad, sweep, GlobalTransform, MomentTable, Point2, QuadratureSpec,
};
use crate::par;
use crate::sketch::{centroid, LocalOffsets, SketchVideo, VideoGradient};

/// Reference frame for the stroke-length penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthAnchor {
    /// `|L_i - L_0|` for every frame `i >= 1`.
    #[default]
    InitialFrame,
    /// `|L_i - L_{i-1}|` between consecutive frames.
    PreviousFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaConfig {
    pub lambda_l: f64,
    pub lambda_a: f64,
    pub length_anchor: LengthAnchor,
}

impl Default for LaConfig {
    fn default() -> Self {
        LaConfig {
            lambda_l: 0.1,
            lambda_a: 1e-5,
            length_anchor: LengthAnchor::InitialFrame,
        }
    }
}

impl LaConfig {
    pub fn disabled() -> Self {
        LaConfig {
            lambda_l: 0.0,
            lambda_a: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_l", self.lambda_l), ("lambda_a", self.lambda_a)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Describes how each stroke moves between frame `i` and `i + 1`, which
/// determines the swept surface.
#[derive(Debug, Clone, Copy)]
pub enum SweepPath<'a> {
    /// Recurrent composition: frame `i` moved by `transforms[i]` about its
    /// centroid plus `offsets[i]`, both ramped linearly over the interval.
    Affine {
        transforms: &'a [GlobalTransform],
        offsets: &'a LocalOffsets,
    },
    /// Control points interpolate linearly between consecutive frames.
    Linear,
}

/// Length-area regularizer value and gradient.
#[derive(Debug, Clone)]
pub struct LaOutput {
    /// `sum |L_i - L_anchor|` over frames and strokes (unweighted).
    pub length_term: f64,
    /// `sum A_i` over intervals and strokes (unweighted).
    pub area_term: f64,
    /// `lambda_l * length_term + lambda_a * area_term`.
    pub value: f64,
    /// Gradient of `value` with respect to every control point of every frame.
    pub video: VideoGradient,
    /// Gradient of `value` with respect to each transform (Affine paths only).
    pub transforms: Vec<[f64; 6]>,
    /// Gradient of `value` with respect to the offsets (Affine paths only).
    pub offsets: LocalOffsets,
}

struct StrokeSweep {
    area: f64,
    grad: Option<crate::geometry::SweepGradient>,
}

/// Length deviation plus swept area, weighted by `cfg`.
pub fn la_loss(
    video: &SketchVideo,
    path: SweepPath<'_>,
    cfg: &LaConfig,
    q: &QuadratureSpec,
) -> Result<LaOutput> {
    let n = video.frame_count();
    let k = video.stroke_count();
    let m = video.point_count();
    if let SweepPath::Affine {
        transforms,
        offsets,
    } = path
    {
        if transforms.len() != n - 1 || offsets.len() != n - 1 {
            return Err(Error::shape(format!(
                "{n} frames need {} transforms/offset rows, got {}/{}",
                n - 1,
                transforms.len(),
                offsets.len()
            )));
        }
        if offsets.intervals.iter().any(|r| r.len() != m) {
            return Err(Error::shape("offset rows do not match the point count"));
        }
    }
    let frames = video.point_frames();
    let mut video_grad = VideoGradient::zeros(n, m);

    // Stroke lengths, frame-major.
    let lengths = par::map_indexed(n * k, |idx| {
        curve_length_grad(&video.frames()[idx / k].strokes()[idx % k], q)
    });
    let mut length_term = 0.0;
    for i in 1..n {
        let reference = match cfg.length_anchor {
            LengthAnchor::InitialFrame => 0,
            LengthAnchor::PreviousFrame => i - 1,
        };
        for s in 0..k {
            let (li, gi) = &lengths[i * k + s];
            let (lr, gr) = &lengths[reference * k + s];
            let diff = li - lr;
            length_term += diff.abs();
            let sign = if diff > 0.0 {
                cfg.lambda_l
            } else if diff < 0.0 {
                -cfg.lambda_l
            } else {
                0.0
            };
            if sign != 0.0 {
                for j in 0..4 {
                    video_grad.frames[i][4 * s + j] += gi[j] * sign;
                    video_grad.frames[reference][4 * s + j] -= gr[j] * sign;
                }
            }
        }
    }

    // Swept areas, interval-major.
    let table = MomentTable::new(q.samples_u);
    let want_grad = cfg.lambda_a != 0.0;
    let anchors: Vec<Point2> = frames.iter().map(|f| centroid(f)).collect();
    let sweeps = par::map_indexed((n - 1) * k, |idx| {
        let (i, s) = (idx / k, idx % k);
        let stroke = &video.frames()[i].strokes()[s];
        let (area, grad) = match path {
            SweepPath::Affine {
                transforms,
                offsets,
            } => {
                let off: [Point2; 4] = std::array::from_fn(|j| offsets.intervals[i][4 * s + j]);
                sweep(
                    stroke,
                    &transforms[i],
                    anchors[i],
                    &off,
                    q.samples_t,
                    &table,
                    want_grad,
                )
            }
            SweepPath::Linear => {
                let off: [Point2; 4] =
                    std::array::from_fn(|j| frames[i + 1][4 * s + j] - frames[i][4 * s + j]);
                sweep(
                    stroke,
                    &GlobalTransform::IDENTITY,
                    anchors[i],
                    &off,
                    q.samples_t,
                    &table,
                    want_grad,
                )
            }
        };
        StrokeSweep {
            area,
            grad: want_grad.then_some(grad),
        }
    });

    let (mut g_tr, mut g_off) = match path {
        SweepPath::Affine { .. } => (vec![[0.0; 6]; n - 1], LocalOffsets::zeros(n - 1, m)),
        SweepPath::Linear => (Vec::new(), LocalOffsets::zeros(0, m)),
    };
    let mut area_term = 0.0;
    let la = cfg.lambda_a;
    let inv_m = 1.0 / m as f64;
    for (idx, sw) in sweeps.iter().enumerate() {
        let (i, s) = (idx / k, idx % k);
        area_term += sw.area;
        let Some(g) = &sw.grad else { continue };
        for j in 0..4 {
            video_grad.frames[i][4 * s + j] += g.control[j] * la;
        }
        match path {
            SweepPath::Affine { .. } => {
                let spread = g.anchor * (la * inv_m);
                for p in video_grad.frames[i].iter_mut() {
                    *p += spread;
                }
                for j in 0..4 {
                    g_off.intervals[i][4 * s + j] += g.offsets[j] * la;
                }
                for (acc, v) in g_tr[i].iter_mut().zip(g.transform) {
                    *acc += v * la;
                }
            }
            SweepPath::Linear => {
                for j in 0..4 {
                    video_grad.frames[i + 1][4 * s + j] += g.offsets[j] * la;
                    video_grad.frames[i][4 * s + j] -= g.offsets[j] * la;
                }
            }
        }
    }

    Ok(LaOutput {
        length_term,
        area_term,
        value: cfg.lambda_l * length_term + cfg.lambda_a * area_term,
        video: video_grad,
        transforms: g_tr,
        offsets: g_off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CubicBezier;
    use crate::sketch::SketchFrame;

    fn segment(len: f64, y: f64) -> SketchFrame {
        SketchFrame::new(vec![CubicBezier::line(
            Point2::new(0.0, y),
            Point2::new(len, y),
        )])
        .unwrap()
    }

    #[test]
    fn static_video_costs_nothing() {
        let v = SketchVideo::repeat(&segment(3.0, 0.0), 4).unwrap();
        let tr = vec![GlobalTransform::IDENTITY; 3];
        let off = LocalOffsets::zeros(3, 4);
        let out = la_loss(
            &v,
            SweepPath::Affine {
                transforms: &tr,
                offsets: &off,
            },
            &LaConfig::default(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(out.value, 0.0);
        assert!(out.video.is_zero());
    }

    #[test]
    fn stretched_stroke_length_term() {
        let v = SketchVideo::new(vec![segment(3.0, 0.0), segment(4.0, 0.0)]).unwrap();
        let cfg = LaConfig {
            lambda_l: 0.1,
            lambda_a: 0.0,
            ..LaConfig::default()
        };
        let out = la_loss(&v, SweepPath::Linear, &cfg, &QuadratureSpec::default()).unwrap();
        assert!((out.value - 0.1).abs() < 1e-12, "{}", out.value);
    }

    #[test]
    fn translated_segment_area_term() {
        let v = SketchVideo::new(vec![segment(2.0, 0.0), segment(2.0, 1.0)]).unwrap();
        let tr = [GlobalTransform::IDENTITY];
        let off = LocalOffsets::uniform(1, 4, Point2::new(0.0, 1.0));
        let out = la_loss(
            &v,
            SweepPath::Affine {
                transforms: &tr,
                offsets: &off,
            },
            &LaConfig::default(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(out.length_term, 0.0);
        assert!((out.value - 2e-5).abs() < 1e-11, "{}", out.value);
    }

    #[test]
    fn shape_mismatch() {
        let v = SketchVideo::repeat(&segment(3.0, 0.0), 3).unwrap();
        let tr = vec![GlobalTransform::IDENTITY; 1];
        let off = LocalOffsets::zeros(1, 4);
        let r = la_loss(
            &v,
            SweepPath::Affine {
                transforms: &tr,
                offsets: &off,
            },
            &LaConfig::default(),
            &QuadratureSpec::default(),
        );
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }
}
