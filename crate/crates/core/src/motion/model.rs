//! The two-branch motion model.
//!
//! Every control point of the input sketch is positionally encoded and lifted
//! by a shared map to a feature vector. The local branch reads a point's
//! feature together with an encoding of the target frame index and emits a
//! displacement in canvas units; the global branch reads the mean feature and
//! emits `(log sx, log sy, shear, rotation, tx, ty)` for every frame
//! interval. A separate refine head maps control points to corrected
//! positions for the post-hoc wiring.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{encode_scalar, positional_encode, EncodingSpec};
use super::mlp::{Mlp, Trace};
use crate::error::{Error, Result};
use crate::geometry::{GlobalTransform, Point2};
use crate::sketch::{LocalOffsets, SketchFrame};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionConfig {
    pub encoding: EncodingSpec,
    /// Width of the shared feature map output.
    pub feature_dim: usize,
    /// Hidden layer widths used by every network.
    pub hidden: Vec<usize>,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            encoding: EncodingSpec::default(),
            feature_dim: 128,
            hidden: vec![64, 64],
        }
    }
}

impl MotionConfig {
    /// Small configuration for gradient checks.
    pub fn tiny() -> Self {
        MotionConfig {
            encoding: EncodingSpec {
                num_frequencies: 2,
                include_input: true,
            },
            feature_dim: 4,
            hidden: vec![4, 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoding.validate()?;
        if self.feature_dim == 0 || self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("network widths must be >= 1".into()));
        }
        Ok(())
    }
}

/// Trainable parameters bound to a sketch with `points` control points and
/// a video of `frames` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionParams {
    pub config: MotionConfig,
    pub frames: usize,
    pub points: usize,
    pub shared_map: Mlp,
    pub local_branch: Mlp,
    pub global_branch: Mlp,
    pub refine_mlp: Mlp,
}

/// Parameter gradients, one vector per network.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionGradients {
    pub shared_map: Vec<f64>,
    pub local_branch: Vec<f64>,
    pub global_branch: Vec<f64>,
    pub refine_mlp: Vec<f64>,
}

impl MotionGradients {
    pub fn flatten(&self) -> Vec<f64> {
        [
            &self.shared_map[..],
            &self.local_branch,
            &self.global_branch,
            &self.refine_mlp,
        ]
        .concat()
    }
}

/// Forward results plus what the backward pass needs.
#[derive(Debug, Clone)]
pub struct MotionForward {
    pub transforms: Vec<GlobalTransform>,
    pub offsets: LocalOffsets,
    shared: Vec<Trace>,
    local: Vec<Trace>,
    global: Trace,
}

fn layer_sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut s = vec![input];
    s.extend_from_slice(hidden);
    s.push(output);
    s
}

impl MotionParams {
    /// Seeded initialization with zeroed final layers on the local, global,
    /// and refine networks, so the initial animation is the identity.
    pub fn new(config: MotionConfig, frames: usize, points: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        if frames < 2 || points == 0 {
            return Err(Error::shape(format!(
                "motion model needs >= 2 frames and >= 1 point, got {frames} and {points}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let enc = &config.encoding;
        let shared_map = Mlp::new(
            &layer_sizes(enc.point_dim(), &config.hidden, config.feature_dim),
            &mut rng,
            false,
        );
        let local_branch = Mlp::new(
            &layer_sizes(config.feature_dim + enc.per_coordinate(), &config.hidden, 2),
            &mut rng,
            true,
        );
        let global_branch = Mlp::new(
            &layer_sizes(config.feature_dim, &config.hidden, 6 * (frames - 1)),
            &mut rng,
            true,
        );
        let refine_mlp = Mlp::new(
            &layer_sizes(enc.point_dim(), &config.hidden, 2),
            &mut rng,
            true,
        );
        Ok(MotionParams {
            config,
            frames,
            points,
            shared_map,
            local_branch,
            global_branch,
            refine_mlp,
        })
    }

    pub fn networks(&self) -> [&Mlp; 4] {
        [
            &self.shared_map,
            &self.local_branch,
            &self.global_branch,
            &self.refine_mlp,
        ]
    }

    pub fn networks_mut(&mut self) -> [&mut Mlp; 4] {
        [
            &mut self.shared_map,
            &mut self.local_branch,
            &mut self.global_branch,
            &mut self.refine_mlp,
        ]
    }

    pub fn param_count(&self) -> usize {
        self.networks().iter().map(|n| n.param_count()).sum()
    }

    /// All parameters in declaration order: shared, local, global, refine.
    pub fn flatten(&self) -> Vec<f64> {
        self.networks()
            .iter()
            .flat_map(|n| n.params().iter().copied())
            .collect()
    }

    pub fn load_flat(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                values.len()
            )));
        }
        let mut rest = values;
        for net in self.networks_mut() {
            let (head, tail) = rest.split_at(net.param_count());
            net.params_mut().copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    fn check_sketch(&self, initial: &SketchFrame) -> Result<()> {
        if initial.point_count() != self.points {
            return Err(Error::shape(format!(
                "motion model bound to {} points, sketch has {}",
                self.points,
                initial.point_count()
            )));
        }
        Ok(())
    }

    fn local_inputs(&self, features: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let intervals = self.frames - 1;
        let enc = &self.config.encoding;
        let frame_codes: Vec<Vec<f64>> = (0..intervals)
            .map(|i| {
                // Target frame index i + 1, normalized to [0, 1] then [-1, 1].
                let tau = (i + 1) as f64 / (self.frames - 1) as f64;
                encode_scalar(2.0 * tau - 1.0, enc)
            })
            .collect();
        let mut inputs = Vec::with_capacity(intervals * self.points);
        for code in &frame_codes {
            for f in features {
                let mut x = Vec::with_capacity(f.len() + code.len());
                x.extend_from_slice(f);
                x.extend_from_slice(code);
                inputs.push(x);
            }
        }
        inputs
    }

    /// Predicts transforms and offsets for every frame interval.
    pub fn forward(&self, initial: &SketchFrame) -> Result<MotionForward> {
        self.check_sketch(initial)?;
        let enc = &self.config.encoding;
        let encoded: Vec<Vec<f64>> = initial
            .points()
            .iter()
            .map(|p| positional_encode(*p, enc))
            .collect();
        let shared = self.shared_map.forward_batch(&encoded);
        let features: Vec<Vec<f64>> = shared.iter().map(|t| t.output.clone()).collect();

        let local = self
            .local_branch
            .forward_batch(&self.local_inputs(&features));
        let offsets = LocalOffsets {
            intervals: local
                .chunks(self.points)
                .map(|row| {
                    row.iter()
                        .map(|t| Point2::new(t.output[0], t.output[1]))
                        .collect()
                })
                .collect(),
        };

        let mut pooled = vec![0.0; self.config.feature_dim];
        for f in &features {
            for (p, v) in pooled.iter_mut().zip(f) {
                *p += v;
            }
        }
        let inv = 1.0 / self.points as f64;
        pooled.iter_mut().for_each(|p| *p *= inv);
        let global = self.global_branch.forward_trace(&pooled);
        let transforms = global
            .output
            .chunks_exact(6)
            .map(|r| GlobalTransform {
                scale_x: r[0].exp(),
                scale_y: r[1].exp(),
                shear: r[2],
                rotation: r[3],
                translate: Point2::new(r[4], r[5]),
            })
            .collect();

        Ok(MotionForward {
            transforms,
            offsets,
            shared,
            local,
            global,
        })
    }

    /// Reverse pass of [`MotionParams::forward`] given gradients with respect
    /// to the transform fields and offsets. The refine head receives zeros.
    pub fn backward(
        &self,
        fwd: &MotionForward,
        g_transforms: &[[f64; 6]],
        g_offsets: &LocalOffsets,
    ) -> Result<MotionGradients> {
        let intervals = self.frames - 1;
        if g_transforms.len() != intervals
            || g_offsets.len() != intervals
            || g_offsets.intervals.iter().any(|r| r.len() != self.points)
        {
            return Err(Error::shape(
                "motion backward: upstream shapes do not match forward",
            ));
        }

        let mut g_raw = Vec::with_capacity(6 * intervals);
        for (g, tr) in g_transforms.iter().zip(&fwd.transforms) {
            g_raw.extend_from_slice(&[
                g[0] * tr.scale_x,
                g[1] * tr.scale_y,
                g[2],
                g[3],
                g[4],
                g[5],
            ]);
        }
        let mut g_global = vec![0.0; self.global_branch.param_count()];
        let g_pooled = self
            .global_branch
            .backward(&fwd.global, &g_raw, &mut g_global);

        let g_local_out: Vec<Vec<f64>> = g_offsets
            .intervals
            .iter()
            .flat_map(|row| row.iter().map(|d| vec![d.x, d.y]))
            .collect();
        let (g_local, g_local_in) = self.local_branch.backward_batch(&fwd.local, &g_local_out);

        let dim = self.config.feature_dim;
        let inv = 1.0 / self.points as f64;
        let mut g_features: Vec<Vec<f64>> =
            vec![g_pooled.iter().map(|g| g * inv).collect(); self.points];
        for (idx, g_in) in g_local_in.iter().enumerate() {
            let j = idx % self.points;
            for (acc, v) in g_features[j].iter_mut().zip(&g_in[..dim]) {
                *acc += v;
            }
        }
        let (g_shared, _) = self.shared_map.backward_batch(&fwd.shared, &g_features);

        Ok(MotionGradients {
            shared_map: g_shared,
            local_branch: g_local,
            global_branch: g_global,
            refine_mlp: vec![0.0; self.refine_mlp.param_count()],
        })
    }

    /// Residual correction of every control point: `p + refine(encode(p))`.
    pub fn refine(&self, frame: &SketchFrame) -> Result<SketchFrame> {
        Ok(self.refine_trace(frame)?.0)
    }

    fn refine_trace(&self, frame: &SketchFrame) -> Result<(SketchFrame, Vec<Trace>)> {
        self.check_sketch(frame)?;
        let pts = frame.points();
        let inputs: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| positional_encode(*p, &self.config.encoding))
            .collect();
        let traces = self.refine_mlp.forward_batch(&inputs);
        let out: Vec<Point2> = pts
            .iter()
            .zip(&traces)
            .map(|(p, t)| *p + Point2::new(t.output[0], t.output[1]))
            .collect();
        Ok((SketchFrame::from_points(&out)?, traces))
    }

    /// Refines several frames, returning the traces needed by
    /// [`MotionParams::refine_backward`].
    pub fn refine_frames(&self, frames: &[SketchFrame]) -> Result<(Vec<SketchFrame>, Vec<Trace>)> {
        let mut out = Vec::with_capacity(frames.len());
        let mut traces = Vec::with_capacity(frames.len() * self.points);
        for f in frames {
            let (r, t) = self.refine_trace(f)?;
            out.push(r);
            traces.extend(t);
        }
        Ok((out, traces))
    }

    /// Gradient of the refine head's parameters given gradients on the
    /// refined points of the frames passed to [`MotionParams::refine_frames`].
    pub fn refine_backward(&self, traces: &[Trace], g_points: &[Vec<Point2>]) -> Result<Vec<f64>> {
        let g_out: Vec<Vec<f64>> = g_points
            .iter()
            .flat_map(|f| f.iter().map(|g| vec![g.x, g.y]))
            .collect();
        if g_out.len() != traces.len() {
            return Err(Error::shape(
                "refine backward: gradient count does not match traces",
            ));
        }
        Ok(self.refine_mlp.backward_batch(traces, &g_out).0)
    }
}

/// Convenience wrapper returning just the predicted motion.
pub fn forward(
    params: &MotionParams,
    initial: &SketchFrame,
) -> Result<(Vec<GlobalTransform>, LocalOffsets)> {
    let f = params.forward(initial)?;
    Ok((f.transforms, f.offsets))
}
