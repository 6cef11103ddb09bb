use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample counts for the composite midpoint rule in the curve parameter `u`
/// and the frame-interval time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub samples_u: usize,
    pub samples_t: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            samples_u: 1000,
            samples_t: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn new(samples_u: usize, samples_t: usize) -> Result<Self> {
        let q = QuadratureSpec {
            samples_u,
            samples_t,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_u < 2 || self.samples_t < 2 {
            return Err(Error::InvalidConfig(format!(
                "quadrature sample counts must be >= 2 (got u={}, t={})",
                self.samples_u, self.samples_t
            )));
        }
        Ok(())
    }
}

/// Node `k` of an `n`-point midpoint rule on [0, 1].
#[inline]
pub fn midpoint_node(k: usize, n: usize) -> f64 {
    (k as f64 + 0.5) / n as f64
}

/// Midpoint nodes in `u` together with prefix sums of the monomials
/// `u^0..u^5`, so that `sum_{k in a..b} u_k^m` is one subtraction.
#[derive(Debug, Clone)]
pub(crate) struct MomentTable {
    pub nodes: Vec<f64>,
    /// `prefix[k][m] = sum_{k' < k} u_{k'}^m`
    pub prefix: Vec<[f64; 6]>,
}

impl MomentTable {
    pub fn new(n: usize) -> Self {
        let nodes: Vec<f64> = (0..n).map(|k| midpoint_node(k, n)).collect();
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = [0.0; 6];
        prefix.push(acc);
        for &u in &nodes {
            let mut p = 1.0;
            for a in acc.iter_mut() {
                *a += p;
                p *= u;
            }
            prefix.push(acc);
        }
        MomentTable { nodes, prefix }
    }

    #[inline]
    pub fn range(&self, start: usize, end: usize) -> [f64; 6] {
        let (hi, lo) = (&self.prefix[end], &self.prefix[start]);
        std::array::from_fn(|m| hi[m] - lo[m])
    }
}
