use serde::{Deserialize, Serialize};

use super::arap::{arap_loss, ArapConfig};
use super::la::{la_loss, LaConfig, SweepPath};
use super::oracle::GuidanceOracle;
use crate::error::{Error, Result};
use crate::geometry::{Point2, QuadratureSpec, TriangleMesh};
use crate::sketch::{LocalOffsets, SketchVideo, VideoGradient};

/// Unweighted loss terms and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub length_term: f64,
    pub area_term: f64,
    pub arap_term: f64,
    pub guidance_term: f64,
    /// `guidance + lambda_l * length + lambda_a * area + lambda_arap * arap`.
    pub total: f64,
}

impl LossBreakdown {
    pub fn is_finite(&self) -> bool {
        [
            self.length_term,
            self.area_term,
            self.arap_term,
            self.guidance_term,
            self.total,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Gradient of the total loss.
#[derive(Debug, Clone)]
pub struct LossGradients {
    pub video: VideoGradient,
    /// Direct dependence on transforms and offsets through the swept area
    /// (empty for [`SweepPath::Linear`]).
    pub transforms: Vec<[f64; 6]>,
    pub offsets: LocalOffsets,
}

/// Everything the objective needs besides the video and its motion.
#[derive(Clone, Copy)]
pub struct Objective<'a> {
    pub la: &'a LaConfig,
    pub arap: &'a ArapConfig,
    pub oracle: &'a dyn GuidanceOracle,
    pub mesh: &'a TriangleMesh,
    pub rest: &'a [Point2],
    pub quadrature: &'a QuadratureSpec,
}

/// Guidance plus weighted length-area and ARAP terms, with summed gradients.
pub fn total_loss(
    video: &SketchVideo,
    path: SweepPath<'_>,
    obj: &Objective<'_>,
) -> Result<(LossBreakdown, LossGradients)> {
    let (guidance, mut grad) = obj.oracle.evaluate(video)?;
    if grad.frames.len() != video.frame_count()
        || grad.frames.iter().any(|f| f.len() != video.point_count())
    {
        return Err(Error::shape(format!(
            "oracle '{}' returned a gradient of the wrong shape",
            obj.oracle.name()
        )));
    }
    let la = la_loss(video, path, obj.la, obj.quadrature)?;
    let arap = arap_loss(obj.mesh, obj.rest, video, obj.arap)?;
    grad.add_assign(&la.video);
    grad.add_assign(&arap.video);

    let breakdown = LossBreakdown {
        length_term: la.length_term,
        area_term: la.area_term,
        arap_term: arap.energy,
        guidance_term: guidance,
        total: guidance + la.value + arap.value,
    };
    Ok((
        breakdown,
        LossGradients {
            video: grad,
            transforms: la.transforms,
            offsets: la.offsets,
        },
    ))
}
