use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CubicBezier, Point2};

/// All strokes of one frame; `4k` control points for `k` strokes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchFrame {
    strokes: Vec<CubicBezier>,
}

impl SketchFrame {
    pub fn new(strokes: Vec<CubicBezier>) -> Result<Self> {
        if strokes.is_empty() {
            return Err(Error::EmptySketch);
        }
        if let Some(i) = strokes.iter().position(|s| !s.is_finite()) {
            return Err(Error::shape(format!(
                "stroke {i} has a non-finite control point"
            )));
        }
        Ok(SketchFrame { strokes })
    }

    /// Rebuilds a frame from a flat control-point list (4 per stroke).
    pub fn from_points(points: &[Point2]) -> Result<Self> {
        if points.is_empty() || !points.len().is_multiple_of(4) {
            return Err(Error::shape(format!(
                "control point count {} is not a positive multiple of 4",
                points.len()
            )));
        }
        Self::new(
            points
                .chunks_exact(4)
                .map(|c| CubicBezier::new(c[0], c[1], c[2], c[3]))
                .collect(),
        )
    }

    pub fn strokes(&self) -> &[CubicBezier] {
        &self.strokes
    }

    pub fn stroke_count(&self) -> usize {
        self.strokes.len()
    }

    pub fn point_count(&self) -> usize {
        4 * self.strokes.len()
    }

    /// Control points in stroke-major order.
    pub fn points(&self) -> Vec<Point2> {
        self.strokes.iter().flat_map(|s| s.control).collect()
    }

    pub fn centroid(&self) -> Point2 {
        centroid(&self.points())
    }

    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> SketchFrame {
        SketchFrame {
            strokes: self.strokes.iter().map(|s| s.map(&f)).collect(),
        }
    }
}

/// Arithmetic mean of all control points of `frame`.
pub fn frame_centroid(frame: &SketchFrame) -> Point2 {
    frame.centroid()
}

pub(crate) fn centroid(points: &[Point2]) -> Point2 {
    let mut acc = Point2::ZERO;
    for p in points {
        acc += *p;
    }
    acc * (1.0 / points.len() as f64)
}

/// `n >= 2` frames sharing one stroke topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchVideo {
    frames: Vec<SketchFrame>,
}

impl SketchVideo {
    pub fn new(frames: Vec<SketchFrame>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::shape(format!(
                "a video needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        let k = frames[0].stroke_count();
        if let Some(i) = frames.iter().position(|f| f.stroke_count() != k) {
            return Err(Error::shape(format!(
                "frame {i} has {} strokes, frame 0 has {k}",
                frames[i].stroke_count()
            )));
        }
        Ok(SketchVideo { frames })
    }

    /// A video holding `frame` `n` times.
    pub fn repeat(frame: &SketchFrame, n: usize) -> Result<Self> {
        Self::new(vec![frame.clone(); n])
    }

    pub fn from_point_frames(frames: &[Vec<Point2>]) -> Result<Self> {
        Self::new(
            frames
                .iter()
                .map(|f| SketchFrame::from_points(f))
                .collect::<Result<_>>()?,
        )
    }

    pub fn frames(&self) -> &[SketchFrame] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn stroke_count(&self) -> usize {
        self.frames[0].stroke_count()
    }

    pub fn point_count(&self) -> usize {
        self.frames[0].point_count()
    }

    pub fn point_frames(&self) -> Vec<Vec<Point2>> {
        self.frames.iter().map(SketchFrame::points).collect()
    }

    pub fn same_shape(&self, other: &SketchVideo) -> bool {
        self.frame_count() == other.frame_count() && self.stroke_count() == other.stroke_count()
    }
}

/// Per-frame, per-control-point gradient (or displacement) field.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoGradient {
    pub frames: Vec<Vec<Point2>>,
}

impl VideoGradient {
    pub fn zeros(frames: usize, points: usize) -> Self {
        VideoGradient {
            frames: vec![vec![Point2::ZERO; points]; frames],
        }
    }

    pub fn zeros_like(video: &SketchVideo) -> Self {
        Self::zeros(video.frame_count(), video.point_count())
    }

    pub fn add_assign(&mut self, other: &VideoGradient) {
        for (a, b) in self.frames.iter_mut().zip(&other.frames) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> VideoGradient {
        VideoGradient {
            frames: self
                .frames
                .iter()
                .map(|f| f.iter().map(|p| *p * s).collect())
                .collect(),
        }
    }

    /// Coordinates in frame-major, point-minor, x-then-y order.
    pub fn flatten(&self) -> Vec<f64> {
        self.frames
            .iter()
            .flat_map(|f| f.iter().flat_map(|p| [p.x, p.y]))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.frames
            .iter()
            .flatten()
            .all(|p| p.x == 0.0 && p.y == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn centroids() {
        let f = SketchFrame::from_points(&[Point2::ZERO; 4]).unwrap();
        assert_eq!(f.centroid(), Point2::ZERO);
        let f = SketchFrame::from_points(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0)])
            .unwrap();
        assert_eq!(f.centroid(), p(1.5, 0.0));
        let left = [p(1.0, 2.0), p(2.0, 5.0), p(3.0, 1.0), p(4.0, 7.0)];
        let right: Vec<Point2> = left.iter().map(|q| p(10.0 - q.x, q.y)).collect();
        let all: Vec<Point2> = left.iter().copied().chain(right).collect();
        let c = SketchFrame::from_points(&all).unwrap().centroid();
        assert!((c.x - 5.0).abs() < 1e-12);
    }

    #[test]
    fn video_requires_fixed_topology() {
        let a = SketchFrame::from_points(&[Point2::ZERO; 4]).unwrap();
        let b = SketchFrame::from_points(&[Point2::ZERO; 8]).unwrap();
        assert!(SketchVideo::new(vec![a.clone()]).is_err());
        assert!(SketchVideo::new(vec![a.clone(), b]).is_err());
        assert!(SketchVideo::new(vec![a.clone(), a]).is_ok());
        assert!(matches!(SketchFrame::new(vec![]), Err(Error::EmptySketch)));
    }
}
