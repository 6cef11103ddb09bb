//! Guidance oracles: anything that scores a whole video and returns the exact
//! gradient of that score with respect to every control point.
//!
//! A diffusion-backed implementation would sample a noise level, run the
//! denoiser on the rendered frames and return its residual as the gradient;
//! the engine only consumes `(loss, gradient)`.

use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point2};
use crate::sketch::{centroid, SketchFrame, SketchVideo, VideoGradient};

pub trait GuidanceOracle: Send + Sync {
    fn name(&self) -> &str;

    /// Loss and its gradient with respect to every control point of every frame.
    fn evaluate(&self, video: &SketchVideo) -> Result<(f64, VideoGradient)>;

    /// Noise level used for the current evaluation, when the oracle has one.
    fn noise_level(&self) -> Option<f64> {
        None
    }

    /// Weight of the noise schedule at [`Self::noise_level`].
    fn schedule_weight(&self) -> Option<f64> {
        None
    }

    /// Text conditioning, when the oracle has one.
    fn prompt(&self) -> Option<&str> {
        None
    }
}

/// `weight * mean((x - target)^2)` over every point coordinate of every frame.
#[derive(Debug, Clone)]
pub struct TargetOracle {
    targets: Vec<Vec<Point2>>,
    weight: f64,
}

pub fn make_target_oracle(targets: &SketchVideo, weight: f64) -> TargetOracle {
    TargetOracle {
        targets: targets.point_frames(),
        weight,
    }
}

fn mse(video: &[Vec<Point2>], targets: &[Vec<Point2>], weight: f64) -> (f64, VideoGradient) {
    let count = (video.len() * video[0].len() * 2) as f64;
    let mut sum = 0.0;
    let mut grad = VideoGradient::zeros(video.len(), video[0].len());
    let scale = 2.0 * weight / count;
    for ((f, t), g) in video.iter().zip(targets).zip(grad.frames.iter_mut()) {
        for ((x, y), gj) in f.iter().zip(t).zip(g.iter_mut()) {
            let r = *x - *y;
            sum += r.norm_squared();
            *gj = r * scale;
        }
    }
    (weight * sum / count, grad)
}

impl GuidanceOracle for TargetOracle {
    fn name(&self) -> &str {
        "target"
    }

    fn evaluate(&self, video: &SketchVideo) -> Result<(f64, VideoGradient)> {
        if video.frame_count() != self.targets.len() || video.point_count() != self.targets[0].len()
        {
            return Err(Error::shape(format!(
                "target oracle holds {} frames x {} points, video is {} x {}",
                self.targets.len(),
                self.targets[0].len(),
                video.frame_count(),
                video.point_count()
            )));
        }
        Ok(mse(&video.point_frames(), &self.targets, self.weight))
    }
}

/// Target oracle whose targets are the video's own frame 0 moved rigidly:
/// frame `i` is rotated by `i * angular_velocity` about the frame-0 centroid
/// and translated by `i * translation_velocity`.
///
/// Targets are synthesized from the evaluated video, so the gradient also
/// accounts for their dependence on frame 0.
#[derive(Debug, Clone)]
pub struct RigidMotionOracle {
    pub angular_velocity: f64,
    pub translation_velocity: Point2,
    pub weight: f64,
    name: &'static str,
}

pub fn make_rigid_motion_oracle(
    angular_velocity: f64,
    translation_velocity: Point2,
    weight: f64,
) -> RigidMotionOracle {
    RigidMotionOracle {
        angular_velocity,
        translation_velocity,
        weight,
        name: "rigid",
    }
}

/// Oracle pulling every frame back to frame 0.
pub fn make_static_oracle(weight: f64) -> RigidMotionOracle {
    RigidMotionOracle {
        name: "static",
        ..make_rigid_motion_oracle(0.0, Point2::ZERO, weight)
    }
}

impl RigidMotionOracle {
    fn frame_motion(&self, i: usize) -> (Mat2, Point2) {
        let i = i as f64;
        (
            Mat2::rotation(i * self.angular_velocity),
            self.translation_velocity * i,
        )
    }

    fn target_points(&self, rest: &[Point2], n: usize) -> Vec<Vec<Point2>> {
        let c = centroid(rest);
        (0..n)
            .map(|i| {
                let (r, shift) = self.frame_motion(i);
                if r == Mat2::IDENTITY {
                    // Keeps pure translations (and the static oracle) exact.
                    return rest.iter().map(|p| *p + shift).collect();
                }
                rest.iter().map(|p| r.apply(*p - c) + c + shift).collect()
            })
            .collect()
    }

    /// The synthesized target video for `rest` over `n` frames.
    pub fn targets(&self, rest: &SketchFrame, n: usize) -> Result<SketchVideo> {
        SketchVideo::from_point_frames(&self.target_points(&rest.points(), n))
    }
}

impl GuidanceOracle for RigidMotionOracle {
    fn name(&self) -> &str {
        self.name
    }

    fn evaluate(&self, video: &SketchVideo) -> Result<(f64, VideoGradient)> {
        let frames = video.point_frames();
        let n = frames.len();
        let m = frames[0].len();
        let targets = self.target_points(&frames[0], n);
        let (loss, mut grad) = mse(&frames, &targets, self.weight);

        // Targets depend on frame 0: t_ij = R_i (p_0j - c) + c + shift_i.
        let mut g_rest = vec![Point2::ZERO; m];
        let mut g_anchor = Point2::ZERO;
        for i in 1..n {
            let (r, _) = self.frame_motion(i);
            let rt = r.transpose();
            for j in 0..m {
                let g_target = -grad.frames[i][j];
                let through = rt.apply(g_target);
                g_rest[j] += through;
                g_anchor += g_target - through;
            }
        }
        let spread = g_anchor * (1.0 / m as f64);
        for (g, extra) in grad.frames[0].iter_mut().zip(g_rest) {
            *g += extra + spread;
        }
        Ok((loss, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn frame() -> SketchFrame {
        SketchFrame::from_points(&[
            Point2::new(10.0, 20.0),
            Point2::new(30.0, 25.0),
            Point2::new(35.0, 60.0),
            Point2::new(70.0, 40.0),
        ])
        .unwrap()
    }

    #[test]
    fn exact_match_is_zero() {
        let v = SketchVideo::repeat(&frame(), 3).unwrap();
        let o = make_target_oracle(&v, 1.0);
        let (l, g) = o.evaluate(&v).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.is_zero());
    }

    #[test]
    fn single_offset_point() {
        let targets = SketchVideo::repeat(&frame(), 3).unwrap();
        let mut pts = targets.point_frames();
        pts[1][2].x += 1.0;
        let v = SketchVideo::from_point_frames(&pts).unwrap();
        let count = 3.0 * 4.0 * 2.0;
        let (l, g) = make_target_oracle(&targets, 1.0).evaluate(&v).unwrap();
        assert!((l - 1.0 / count).abs() < 1e-15);
        assert!((g.frames[1][2].x - 2.0 / count).abs() < 1e-15 && g.frames[1][2].y == 0.0);
        let (l2, g2) = make_target_oracle(&targets, 2.0).evaluate(&v).unwrap();
        assert_eq!(l2, 2.0 * l);
        assert_eq!(g2, g.scaled(2.0));
    }

    #[test]
    fn shape_mismatch_at_call_time() {
        let targets = SketchVideo::repeat(&frame(), 3).unwrap();
        let v = SketchVideo::repeat(&frame(), 4).unwrap();
        assert!(make_target_oracle(&targets, 1.0).evaluate(&v).is_err());
    }

    #[test]
    fn static_video_under_zero_velocity() {
        let v = SketchVideo::repeat(&frame(), 5).unwrap();
        let (l, g) = make_rigid_motion_oracle(0.0, Point2::ZERO, 1.0)
            .evaluate(&v)
            .unwrap();
        assert_eq!(l, 0.0);
        assert!(g.is_zero());
        assert_eq!(make_static_oracle(1.0).name(), "static");
    }

    #[test]
    fn cumulative_rotation() {
        let o = make_rigid_motion_oracle(PI / 12.0, Point2::ZERO, 1.0);
        let rest = frame();
        let t = o.targets(&rest, 24).unwrap();
        let c = rest.centroid();
        let r = Mat2::rotation(23.0 * PI / 12.0);
        for (a, b) in t.frames()[23].points().iter().zip(rest.points()) {
            assert!((*a - (r.apply(b - c) + c)).norm() < 1e-9);
        }
    }
}
