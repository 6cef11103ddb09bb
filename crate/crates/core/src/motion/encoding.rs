use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::sketch::CANVAS_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingSpec {
    pub num_frequencies: usize,
    pub include_input: bool,
}

impl Default for EncodingSpec {
    fn default() -> Self {
        EncodingSpec {
            num_frequencies: 6,
            include_input: true,
        }
    }
}

impl EncodingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_frequencies == 0 {
            return Err(Error::InvalidConfig("num_frequencies must be >= 1".into()));
        }
        Ok(())
    }

    /// Features produced per encoded scalar.
    pub fn per_coordinate(&self) -> usize {
        usize::from(self.include_input) + 2 * self.num_frequencies
    }

    /// Length of [`positional_encode`] output.
    pub fn point_dim(&self) -> usize {
        2 * self.per_coordinate()
    }
}

/// Maps a canvas coordinate in [0, 256] to [-1, 1].
#[inline]
pub fn canvas_to_unit(v: f64) -> f64 {
    v / (CANVAS_SIZE / 2.0) - 1.0
}

/// `[x, y, sin(2^j pi x), cos(2^j pi x), sin(2^j pi y), cos(2^j pi y), ...]`
/// on canvas coordinates rescaled to [-1, 1].
pub fn positional_encode(p: Point2, spec: &EncodingSpec) -> Vec<f64> {
    let (x, y) = (canvas_to_unit(p.x), canvas_to_unit(p.y));
    let mut out = Vec::with_capacity(spec.point_dim());
    if spec.include_input {
        out.push(x);
        out.push(y);
    }
    for j in 0..spec.num_frequencies {
        let f = (1u64 << j) as f64 * PI;
        let (sx, cx) = (f * x).sin_cos();
        let (sy, cy) = (f * y).sin_cos();
        out.extend_from_slice(&[sx, cx, sy, cy]);
    }
    out
}

/// Encoding of a single scalar already in [-1, 1].
pub fn encode_scalar(v: f64, spec: &EncodingSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.per_coordinate());
    if spec.include_input {
        out.push(v);
    }
    for j in 0..spec.num_frequencies {
        let (s, c) = ((1u64 << j) as f64 * PI * v).sin_cos();
        out.extend_from_slice(&[s, c]);
    }
    out
}
