//! As-rigid-as-possible energy over a fixed triangulation of the rest pose.
//!
//! For every frame `i >= 1` and triangle, the best similarity (or rotation)
//! mapping the rest edges onto the deformed edges is fitted in closed form:
//! the optimal angle is `atan2(sum a e x e', sum a e . e')` and the optimal
//! isotropic scale follows from it. Because both are exact minimizers of the
//! per-triangle residual, the derivative of the energy with respect to the
//! fitted parameters vanishes and the gradient reduces to `2 a (e' - D e)`
//! on each edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point2, TriangleMesh};
use crate::par;
use crate::sketch::{SketchVideo, VideoGradient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    RotationOnly,
    #[default]
    RotationThenScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArapConfig {
    pub lambda_arap: f64,
    pub fit_mode: FitMode,
}

impl Default for ArapConfig {
    fn default() -> Self {
        ArapConfig {
            lambda_arap: 0.1,
            fit_mode: FitMode::RotationThenScale,
        }
    }
}

impl ArapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_arap.is_finite() && self.lambda_arap >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_arap must be finite and >= 0, got {}",
                self.lambda_arap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ArapOutput {
    /// Unweighted energy summed over frames.
    pub energy: f64,
    /// Unweighted energy of each frame (frame 0 included, normally zero).
    pub per_frame: Vec<f64>,
    /// `lambda_arap * energy`.
    pub value: f64,
    /// Gradient of `value`.
    pub video: VideoGradient,
}

/// Best-fit transform of one triangle: rotation angle and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleFit {
    pub angle: f64,
    pub scale: f64,
}

impl TriangleFit {
    pub fn matrix(&self) -> Mat2 {
        Mat2::rotation(self.angle).scale(self.scale)
    }
}

/// Fits the per-triangle transform mapping weighted rest edges onto deformed edges.
pub fn fit_triangle(
    rest: &[Point2; 3],
    deformed: &[Point2; 3],
    weights: &[f64; 3],
    mode: FitMode,
) -> TriangleFit {
    let mut dot = 0.0;
    let mut cross = 0.0;
    let mut rest_sq = 0.0;
    for k in 0..3 {
        dot += weights[k] * rest[k].dot(deformed[k]);
        cross += weights[k] * rest[k].cross(deformed[k]);
        rest_sq += weights[k] * rest[k].norm_squared();
    }
    let angle = cross.atan2(dot);
    let scale = match mode {
        FitMode::RotationOnly => 1.0,
        FitMode::RotationThenScale => {
            let r = Mat2::rotation(angle);
            let mut num = 0.0;
            for k in 0..3 {
                num += weights[k] * deformed[k].dot(r.apply(rest[k]));
            }
            if rest_sq > 0.0 {
                num / rest_sq
            } else {
                1.0
            }
        }
    };
    TriangleFit { angle, scale }
}

fn triangle_edges(points: &[Point2], t: &[usize; 3]) -> [Point2; 3] {
    [
        points[t[1]] - points[t[0]],
        points[t[2]] - points[t[1]],
        points[t[0]] - points[t[2]],
    ]
}

/// ARAP energy of one deformed frame against the rest pose, with its gradient.
pub fn frame_energy(
    mesh: &TriangleMesh,
    rest: &[Point2],
    deformed: &[Point2],
    mode: FitMode,
) -> (f64, Vec<Point2>) {
    let mut energy = 0.0;
    let mut grad = vec![Point2::ZERO; deformed.len()];
    for (t, te) in mesh.triangles.iter().zip(&mesh.triangle_edges) {
        let e = triangle_edges(rest, t);
        let e_def = triangle_edges(deformed, t);
        let w = te.map(|id| mesh.edges[id].weight);
        let d = fit_triangle(&e, &e_def, &w, mode).matrix();
        for k in 0..3 {
            let r = e_def[k] - d.apply(e[k]);
            energy += w[k] * r.norm_squared();
            let g = r * (2.0 * w[k]);
            grad[t[(k + 1) % 3]] += g;
            grad[t[k]] -= g;
        }
    }
    (energy, grad)
}

/// Weighted ARAP loss over frames `1..n` with frame-0-derived `rest` pose.
pub fn arap_loss(
    mesh: &TriangleMesh,
    rest: &[Point2],
    video: &SketchVideo,
    cfg: &ArapConfig,
) -> Result<ArapOutput> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let m = video.point_count();
    if mesh.vertex_count != m || rest.len() != m {
        return Err(Error::shape(format!(
            "mesh has {} vertices and rest pose {} points, video frames have {m}",
            mesh.vertex_count,
            rest.len()
        )));
    }
    let n = video.frame_count();
    let frames = video.point_frames();
    let per = par::map_indexed(n - 1, |i| {
        frame_energy(mesh, rest, &frames[i + 1], cfg.fit_mode)
    });

    let mut video_grad = VideoGradient::zeros(n, m);
    let mut per_frame = vec![0.0; n];
    let mut energy = 0.0;
    for (i, (e, g)) in per.into_iter().enumerate() {
        energy += e;
        per_frame[i + 1] = e;
        for (acc, v) in video_grad.frames[i + 1].iter_mut().zip(g) {
            *acc = v * cfg.lambda_arap;
        }
    }
    Ok(ArapOutput {
        energy,
        per_frame,
        value: cfg.lambda_arap * energy,
        video: video_grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::delaunay_triangulate;
    use crate::sketch::SketchFrame;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn scaled_triangle_hand_values() {
        let rest = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        let mesh = delaunay_triangulate(&rest).unwrap();
        let def: Vec<Point2> = rest.iter().map(|q| *q * 2.0).collect();
        let (e, _) = frame_energy(&mesh, &rest, &def, FitMode::RotationOnly);
        assert!((e - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-9, "{e}");
        let (e, _) = frame_energy(&mesh, &rest, &def, FitMode::RotationThenScale);
        assert!(e.abs() < 1e-9, "{e}");
    }

    #[test]
    fn fit_recovers_similarity() {
        let rest = [p(1.0, 0.5), p(-0.3, 2.0), p(-0.7, -2.5)];
        let r = Mat2::rotation(0.8).scale(1.7);
        let def = rest.map(|e| r.apply(e));
        let fit = fit_triangle(&rest, &def, &[1.0, 2.0, 0.5], FitMode::RotationThenScale);
        assert!((fit.angle - 0.8).abs() < 1e-12 && (fit.scale - 1.7).abs() < 1e-12);
    }

    #[test]
    fn empty_mesh_and_shape_errors() {
        let rest = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)];
        let frame = SketchFrame::from_points(&rest).unwrap();
        let video = SketchVideo::repeat(&frame, 2).unwrap();
        let empty = TriangleMesh::from_triangles(&rest, vec![]).unwrap();
        assert!(matches!(
            arap_loss(&empty, &rest, &video, &ArapConfig::default()),
            Err(Error::EmptyMesh)
        ));
        let small = delaunay_triangulate(&rest[..3]).unwrap();
        assert!(matches!(
            arap_loss(&small, &rest[..3], &video, &ArapConfig::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
