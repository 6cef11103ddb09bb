//! The training loop.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamHyper, AdamState};
use crate::error::{Error, Result};
use crate::geometry::{delaunay_triangulate, QuadratureSpec, TriangleMesh};
use crate::losses::{
    arap_loss, la_loss, total_loss, ArapConfig, GuidanceOracle, LaConfig, LossBreakdown, Objective,
    SweepPath,
};
use crate::motion::{MotionConfig, MotionForward, MotionGradients, MotionParams};
use crate::sketch::{
    compose_backward, compose_video, CompositionMode, LocalOffsets, SketchFrame, SketchVideo,
};

/// Which networks the regularizers train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wiring {
    /// Guidance and regularizers update the shared, local and global networks
    /// together.
    #[default]
    Joint,
    /// Guidance updates the motion branches; regularizers only update the
    /// refine head applied to the composed frames.
    PostHocRefine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub iterations: usize,
    pub frames: usize,
    pub wiring: Wiring,
    pub composition: CompositionMode,
    pub seed: u64,
    /// Log every this many iterations; 0 disables logging.
    pub log_every: usize,
    pub adam: AdamHyper,
    pub motion: MotionConfig,
    pub quadrature: QuadratureSpec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 1000,
            frames: 24,
            wiring: Wiring::Joint,
            composition: CompositionMode::Recurrent,
            seed: 0,
            log_every: 100,
            adam: AdamHyper::default(),
            motion: MotionConfig::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.frames < 2 {
            return Err(Error::InvalidConfig(format!(
                "frames must be >= 2, got {}",
                self.frames
            )));
        }
        self.adam.validate()?;
        self.motion.validate()?;
        self.quadrature.validate()
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Loss of the video produced at the start of each iteration.
    pub history: Vec<LossBreakdown>,
    /// Loss of `video`, evaluated after the last update.
    pub final_breakdown: LossBreakdown,
    pub video: SketchVideo,
    pub params: MotionParams,
    pub mesh: TriangleMesh,
    pub wall_clock: Duration,
    pub seed: u64,
}

/// Everything fixed for the duration of a run.
pub struct Problem<'a> {
    pub sketch: &'a SketchFrame,
    pub mesh: TriangleMesh,
    pub rest: Vec<crate::geometry::Point2>,
    pub oracle: &'a dyn GuidanceOracle,
    pub la: LaConfig,
    pub arap: ArapConfig,
    pub composition: CompositionMode,
    pub quadrature: QuadratureSpec,
}

impl<'a> Problem<'a> {
    pub fn new(
        sketch: &'a SketchFrame,
        oracle: &'a dyn GuidanceOracle,
        la: LaConfig,
        arap: ArapConfig,
        composition: CompositionMode,
        quadrature: QuadratureSpec,
    ) -> Result<Self> {
        la.validate()?;
        arap.validate()?;
        quadrature.validate()?;
        let rest = sketch.points();
        let mesh = delaunay_triangulate(&rest)?;
        Ok(Problem {
            sketch,
            mesh,
            rest,
            oracle,
            la,
            arap,
            composition,
            quadrature,
        })
    }

    fn objective(&self) -> Objective<'_> {
        Objective {
            la: &self.la,
            arap: &self.arap,
            oracle: self.oracle,
            mesh: &self.mesh,
            rest: &self.rest,
            quadrature: &self.quadrature,
        }
    }

    fn compose(&self, fwd: &MotionForward) -> Result<SketchVideo> {
        compose_video(self.sketch, &fwd.transforms, &fwd.offsets, self.composition)
    }

    fn sweep_path<'b>(&self, fwd: &'b MotionForward) -> SweepPath<'b> {
        match self.composition {
            CompositionMode::Recurrent => SweepPath::Affine {
                transforms: &fwd.transforms,
                offsets: &fwd.offsets,
            },
            // Anchored frames do not follow one affine ramp from their
            // predecessor, so their sweep is the straight-line interpolation.
            CompositionMode::Anchored => SweepPath::Linear,
        }
    }

    /// Full objective of the joint wiring and its gradient with respect to
    /// every motion parameter.
    pub fn joint_objective(
        &self,
        params: &MotionParams,
    ) -> Result<(LossBreakdown, MotionGradients, SketchVideo)> {
        let fwd = params.forward(self.sketch)?;
        let video = self.compose(&fwd)?;
        let (breakdown, grads) = total_loss(&video, self.sweep_path(&fwd), &self.objective())?;
        let cg = compose_backward(&video, &fwd.transforms, self.composition, &grads.video)?;
        let mut g_tr = cg.transforms;
        for (acc, direct) in g_tr.iter_mut().zip(&grads.transforms) {
            for (a, d) in acc.iter_mut().zip(direct) {
                *a += d;
            }
        }
        let mut g_off = cg.offsets;
        add_offsets(&mut g_off, &grads.offsets);
        let mg = params.backward(&fwd, &g_tr, &g_off)?;
        Ok((breakdown, mg, video))
    }

    /// Video exported by the post-hoc wiring: composed frames with the refine
    /// head applied to every frame after the first.
    fn refined(
        &self,
        params: &MotionParams,
        video: &SketchVideo,
    ) -> Result<(SketchVideo, Vec<crate::motion::Trace>)> {
        let (tail, traces) = params.refine_frames(&video.frames()[1..])?;
        let mut frames = Vec::with_capacity(video.frame_count());
        frames.push(video.frames()[0].clone());
        frames.extend(tail);
        Ok((SketchVideo::new(frames)?, traces))
    }

    /// Loss of the exported video under the post-hoc wiring, with the
    /// regularizers measured along straight-line sweeps.
    fn posthoc_breakdown(&self, video: &SketchVideo) -> Result<LossBreakdown> {
        let (breakdown, _) = total_loss(video, SweepPath::Linear, &self.objective())?;
        Ok(breakdown)
    }
}

fn add_offsets(acc: &mut LocalOffsets, other: &LocalOffsets) {
    for (ra, rb) in acc.intervals.iter_mut().zip(&other.intervals) {
        for (a, b) in ra.iter_mut().zip(rb) {
            *a += *b;
        }
    }
}

struct Optimizers {
    states: [AdamState; 4],
}

impl Optimizers {
    fn new(params: &MotionParams, hyper: AdamHyper) -> Self {
        let n = params.networks().map(|m| m.param_count());
        Optimizers {
            states: n.map(|len| AdamState::new(len, hyper)),
        }
    }

    /// Steps the networks selected by `mask` (shared, local, global, refine).
    fn step(
        &mut self,
        params: &mut MotionParams,
        grads: &MotionGradients,
        mask: [bool; 4],
    ) -> Result<()> {
        let g = [
            &grads.shared_map,
            &grads.local_branch,
            &grads.global_branch,
            &grads.refine_mlp,
        ];
        for (((net, state), g), on) in params
            .networks_mut()
            .into_iter()
            .zip(&mut self.states)
            .zip(g)
            .zip(mask)
        {
            if on {
                adam_step(state, net.params_mut(), g)?;
            }
        }
        Ok(())
    }
}

fn check_finite(b: &LossBreakdown, grads: &MotionGradients, iteration: usize) -> Result<()> {
    let grads_ok = grads.flatten().iter().all(|v| v.is_finite());
    if b.is_finite() && grads_ok {
        Ok(())
    } else {
        Err(Error::NonFiniteLoss { iteration })
    }
}

pub fn train(
    sketch: &SketchFrame,
    oracle: &dyn GuidanceOracle,
    la: &LaConfig,
    arap: &ArapConfig,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    let start = Instant::now();
    let problem = Problem::new(sketch, oracle, *la, *arap, cfg.composition, cfg.quadrature)?;
    let mut params = MotionParams::new(
        cfg.motion.clone(),
        cfg.frames,
        sketch.point_count(),
        cfg.seed,
    )?;
    let mut opt = Optimizers::new(&params, cfg.adam);
    let mut history = Vec::with_capacity(cfg.iterations);

    for it in 0..cfg.iterations {
        let breakdown = match cfg.wiring {
            Wiring::Joint => {
                let (b, g, _) = problem.joint_objective(&params)?;
                check_finite(&b, &g, it)?;
                opt.step(&mut params, &g, [true, true, true, false])?;
                b
            }
            Wiring::PostHocRefine => posthoc_iteration(&problem, &mut params, &mut opt, it)?,
        };
        if cfg.log_every > 0 && (it % cfg.log_every == 0 || it + 1 == cfg.iterations) {
            log::info!(
                "iter {it}: total {:.6e} (guidance {:.4e}, length {:.4e}, area {:.4e}, arap {:.4e})",
                breakdown.total,
                breakdown.guidance_term,
                breakdown.length_term,
                breakdown.area_term,
                breakdown.arap_term
            );
        }
        history.push(breakdown);
    }

    let (final_breakdown, video) = match cfg.wiring {
        Wiring::Joint => {
            let (b, _, video) = problem.joint_objective(&params)?;
            (b, video)
        }
        Wiring::PostHocRefine => {
            let fwd = params.forward(sketch)?;
            let (video, _) = problem.refined(&params, &problem.compose(&fwd)?)?;
            (problem.posthoc_breakdown(&video)?, video)
        }
    };
    if !final_breakdown.is_finite() {
        return Err(Error::NonFiniteLoss {
            iteration: cfg.iterations,
        });
    }
    Ok(TrainReport {
        history,
        final_breakdown,
        video,
        params,
        mesh: problem.mesh,
        wall_clock: start.elapsed(),
        seed: cfg.seed,
    })
}

fn posthoc_iteration(
    problem: &Problem<'_>,
    params: &mut MotionParams,
    opt: &mut Optimizers,
    it: usize,
) -> Result<LossBreakdown> {
    // Guidance-only step on the motion branches.
    let fwd = params.forward(problem.sketch)?;
    let video = problem.compose(&fwd)?;
    let (_, g_video) = problem.oracle.evaluate(&video)?;
    let cg = compose_backward(&video, &fwd.transforms, problem.composition, &g_video)?;
    let g_branches = params.backward(&fwd, &cg.transforms, &cg.offsets)?;

    // Regularizer-only step on the refine head, on the same composed frames.
    let (refined, traces) = problem.refined(params, &video)?;
    let la = la_loss(
        &refined,
        SweepPath::Linear,
        &problem.la,
        &problem.quadrature,
    )?;
    let arap = arap_loss(&problem.mesh, &problem.rest, &refined, &problem.arap)?;
    let mut g_reg = la.video;
    g_reg.add_assign(&arap.video);
    let g_refine = params.refine_backward(&traces, &g_reg.frames[1..])?;

    let (guidance, _) = problem.oracle.evaluate(&refined)?;
    let breakdown = LossBreakdown {
        length_term: la.length_term,
        area_term: la.area_term,
        arap_term: arap.energy,
        guidance_term: guidance,
        total: guidance + la.value + arap.value,
    };
    let grads = MotionGradients {
        refine_mlp: g_refine,
        ..g_branches
    };
    check_finite(&breakdown, &grads, it)?;
    opt.step(params, &grads, [true; 4])?;
    Ok(breakdown)
}
