//! Bias-corrected Adam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// When set, the learning rate follows a half cosine from `lr` down to
    /// zero over this many steps.
    pub cosine_steps: Option<u64>,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            cosine_steps: None,
        }
    }
}

impl AdamHyper {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr.is_finite()
            && self.lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps.is_finite()
            && self.eps > 0.0
            && self.cosine_steps != Some(0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid Adam settings: {self:?}"
            )))
        }
    }

    /// Learning rate used for step `t` (1-based).
    pub fn lr_at(&self, t: u64) -> f64 {
        match self.cosine_steps {
            None => self.lr,
            Some(total) => {
                let frac = ((t - 1) as f64 / total as f64).min(1.0);
                0.5 * self.lr * (1.0 + (std::f64::consts::PI * frac).cos())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(len: usize, hyper: AdamHyper) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            hyper,
        }
    }
}

pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64]) -> Result<()> {
    if params.len() != grads.len() || state.m.len() != params.len() {
        return Err(Error::shape(format!(
            "adam: {} params, {} grads, state for {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    state.t += 1;
    let AdamHyper {
        beta1, beta2, eps, ..
    } = state.hyper;
    let lr = state.hyper.lr_at(state.t);
    let c1 = 1.0 - beta1.powi(state.t as i32);
    let c2 = 1.0 - beta2.powi(state.t as i32);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
