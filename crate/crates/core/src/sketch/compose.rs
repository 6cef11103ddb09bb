use serde::{Deserialize, Serialize};

use super::frame::{centroid, SketchFrame, SketchVideo, VideoGradient};
use crate::error::{Error, Result};
use crate::geometry::{GlobalTransform, Mat2, Point2};

/// How frame `i + 1` is built from the transform and offsets of interval `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    /// `p[i+1] = M_i p[i] + d_i`, anchored at the centroid of frame `i`.
    #[default]
    Recurrent,
    /// `p[i+1] = M_i p[0] + d_i`, anchored at the centroid of frame 0.
    Anchored,
}

/// Per-interval, per-control-point displacements: `n - 1` rows of `4k` vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalOffsets {
    pub intervals: Vec<Vec<Point2>>,
}

impl LocalOffsets {
    pub fn zeros(intervals: usize, points: usize) -> Self {
        LocalOffsets {
            intervals: vec![vec![Point2::ZERO; points]; intervals],
        }
    }

    pub fn uniform(intervals: usize, points: usize, d: Point2) -> Self {
        LocalOffsets {
            intervals: vec![vec![d; points]; intervals],
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Gradients of a video-level objective with respect to the composition inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposeGradient {
    pub transforms: Vec<[f64; 6]>,
    pub offsets: LocalOffsets,
    pub initial: Vec<Point2>,
}

fn check_shapes(
    initial: &SketchFrame,
    transforms: &[GlobalTransform],
    offsets: &LocalOffsets,
) -> Result<()> {
    if transforms.is_empty() {
        return Err(Error::shape("need at least one transform (two frames)"));
    }
    if offsets.len() != transforms.len() {
        return Err(Error::shape(format!(
            "{} transforms but {} offset rows",
            transforms.len(),
            offsets.len()
        )));
    }
    let m = initial.point_count();
    if let Some(i) = offsets.intervals.iter().position(|r| r.len() != m) {
        return Err(Error::shape(format!(
            "offset row {i} has {} entries, expected {m}",
            offsets.intervals[i].len()
        )));
    }
    Ok(())
}

/// Builds `transforms.len() + 1` frames starting from `initial`.
pub fn compose_video(
    initial: &SketchFrame,
    transforms: &[GlobalTransform],
    offsets: &LocalOffsets,
    mode: CompositionMode,
) -> Result<SketchVideo> {
    check_shapes(initial, transforms, offsets)?;
    let base = initial.points();
    let base_anchor = centroid(&base);
    let mut frames = Vec::with_capacity(transforms.len() + 1);
    frames.push(base.clone());
    for (tr, off) in transforms.iter().zip(&offsets.intervals) {
        let src = match mode {
            CompositionMode::Recurrent => frames.last().expect("non-empty"),
            CompositionMode::Anchored => &base,
        };
        let anchor = match mode {
            CompositionMode::Recurrent => centroid(src),
            CompositionMode::Anchored => base_anchor,
        };
        let next = apply_step(src, anchor, tr, off);
        frames.push(next);
    }
    SketchVideo::from_point_frames(&frames)
}

fn apply_step(src: &[Point2], anchor: Point2, tr: &GlobalTransform, off: &[Point2]) -> Vec<Point2> {
    if tr.is_identity() {
        return src.iter().zip(off).map(|(p, d)| *p + *d).collect();
    }
    let lin = tr.linear();
    src.iter()
        .zip(off)
        .map(|(p, d)| lin.apply(*p - anchor) + anchor + tr.translate + *d)
        .collect()
}

/// Reverse pass of [`compose_video`]: maps a gradient on every frame of the
/// composed `video` back to the transforms, offsets, and initial points.
pub fn compose_backward(
    video: &SketchVideo,
    transforms: &[GlobalTransform],
    mode: CompositionMode,
    upstream: &VideoGradient,
) -> Result<ComposeGradient> {
    let n = video.frame_count();
    if transforms.len() + 1 != n || upstream.frames.len() != n {
        return Err(Error::shape("compose_backward: frame counts disagree"));
    }
    let m = video.point_count();
    let points = video.point_frames();
    let mut g = upstream.frames.clone();
    let mut g_tr = vec![[0.0; 6]; n - 1];
    let mut g_off = LocalOffsets::zeros(n - 1, m);
    let inv_m = 1.0 / m as f64;

    for i in (0..n - 1).rev() {
        let src_idx = match mode {
            CompositionMode::Recurrent => i,
            CompositionMode::Anchored => 0,
        };
        let src = &points[src_idx];
        let anchor = centroid(src);
        let tr = &transforms[i];
        let lin_t = tr.linear().transpose();
        let next = std::mem::take(&mut g[i + 1]);

        let mut g_lin = Mat2::ZERO;
        let mut g_anchor = Point2::ZERO;
        let mut g_src = vec![Point2::ZERO; m];
        for j in 0..m {
            let gj = next[j];
            g_off.intervals[i][j] = gj;
            g_tr[i][4] += gj.x;
            g_tr[i][5] += gj.y;
            g_lin = g_lin.add(&Mat2::outer(gj, src[j] - anchor));
            let through = lin_t.apply(gj);
            g_src[j] = through;
            g_anchor += gj - through;
        }
        let lin_params = tr.backprop_linear(1.0, &g_lin, &Mat2::ZERO);
        g_tr[i][..4].copy_from_slice(&lin_params);
        let spread = g_anchor * inv_m;
        for (acc, gs) in g[src_idx].iter_mut().zip(&g_src) {
            *acc += *gs + spread;
        }
        g[i + 1] = next;
    }

    Ok(ComposeGradient {
        transforms: g_tr,
        offsets: g_off,
        initial: g.swap_remove(0),
    })
}
