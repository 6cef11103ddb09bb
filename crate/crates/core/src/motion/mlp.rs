//! Fully connected network with tanh hidden activations and a linear output,
//! plus its reverse-mode gradient.
//!
//! Parameters live in one flat vector: for each layer, the `out x in`
//! row-major weight matrix followed by the `out` biases.

use rand::Rng;

use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Layer inputs recorded by [`Mlp::forward_trace`]; `inputs[l]` feeds layer `l`.
#[derive(Debug, Clone)]
pub struct Trace {
    inputs: Vec<Vec<f64>>,
    pub output: Vec<f64>,
}

impl Mlp {
    /// Xavier-uniform weights and zero biases. With `zero_output` the last
    /// layer starts at exactly zero.
    pub fn new(sizes: &[usize], rng: &mut impl Rng, zero_output: bool) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let mut params = Vec::with_capacity(Self::count(sizes));
        let layers = sizes.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                let w = if zero_output && l == layers - 1 {
                    0.0
                } else {
                    rng.gen_range(-bound..bound)
                };
                params.push(w);
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp {
            sizes: sizes.to_vec(),
            params,
        }
    }

    fn count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Offsets of each layer's weights within the flat parameter vector.
    fn layer_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.sizes.len());
        let mut acc = 0;
        for w in self.sizes.windows(2) {
            offs.push(acc);
            acc += w[0] * w[1] + w[1];
        }
        offs
    }

    fn layer(&self, input: &[f64], l: usize, offset: usize, activate: bool) -> Vec<f64> {
        let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
        let w = &self.params[offset..offset + fan_in * fan_out];
        let b = &self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
        (0..fan_out)
            .map(|o| {
                let row = &w[o * fan_in..(o + 1) * fan_in];
                let mut z = b[o];
                for (wi, xi) in row.iter().zip(input) {
                    z += wi * xi;
                }
                if activate {
                    z.tanh()
                } else {
                    z
                }
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_trace(x).output
    }

    pub fn forward_trace(&self, x: &[f64]) -> Trace {
        debug_assert_eq!(x.len(), self.input_dim());
        let layers = self.sizes.len() - 1;
        let offs = self.layer_offsets();
        let mut inputs = Vec::with_capacity(layers);
        let mut cur = x.to_vec();
        for l in 0..layers {
            let next = self.layer(&cur, l, offs[l], l + 1 < layers);
            inputs.push(cur);
            cur = next;
        }
        Trace {
            inputs,
            output: cur,
        }
    }

    /// Accumulates parameter gradients into `grads` and returns the gradient
    /// with respect to the network input.
    pub fn backward(&self, trace: &Trace, g_out: &[f64], grads: &mut [f64]) -> Vec<f64> {
        debug_assert_eq!(grads.len(), self.params.len());
        let layers = self.sizes.len() - 1;
        let offs = self.layer_offsets();
        let mut g = g_out.to_vec();
        for l in (0..layers).rev() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offs[l];
            let input = &trace.inputs[l];
            let w = &self.params[off..off + fan_in * fan_out];
            let mut g_in = vec![0.0; fan_in];
            for o in 0..fan_out {
                let go = g[o];
                if go == 0.0 {
                    continue;
                }
                let gw = &mut grads[off + o * fan_in..off + (o + 1) * fan_in];
                for (gwi, xi) in gw.iter_mut().zip(input) {
                    *gwi += go * xi;
                }
                grads[off + fan_in * fan_out + o] += go;
                let row = &w[o * fan_in..(o + 1) * fan_in];
                for (gi, wi) in g_in.iter_mut().zip(row) {
                    *gi += go * wi;
                }
            }
            if l > 0 {
                // Input of layer l is tanh of the previous pre-activation.
                for (gi, a) in g_in.iter_mut().zip(input) {
                    *gi *= 1.0 - a * a;
                }
            }
            g = g_in;
        }
        g
    }

    pub fn forward_batch(&self, xs: &[Vec<f64>]) -> Vec<Trace> {
        par::map_slice(xs, |x| self.forward_trace(x))
    }

    /// Batched [`Mlp::backward`]: returns summed parameter gradients and the
    /// per-sample input gradients. Partial sums are reduced in a fixed order.
    pub fn backward_batch(
        &self,
        traces: &[Trace],
        g_outs: &[Vec<f64>],
    ) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = traces.len();
        let chunks = n.div_ceil(par::CHUNK);
        let partials = par::map_indexed(chunks, |c| {
            let mut grads = vec![0.0; self.params.len()];
            let range = c * par::CHUNK..((c + 1) * par::CHUNK).min(n);
            let g_in: Vec<Vec<f64>> = range
                .map(|i| self.backward(&traces[i], &g_outs[i], &mut grads))
                .collect();
            (grads, g_in)
        });
        let mut total = vec![0.0; self.params.len()];
        let mut inputs = Vec::with_capacity(n);
        for (grads, g_in) in partials {
            for (t, g) in total.iter_mut().zip(&grads) {
                *t += g;
            }
            inputs.extend(g_in);
        }
        (total, inputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_output_layer_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Mlp::new(&[3, 5, 2], &mut rng, true);
        assert_eq!(net.forward(&[0.3, -1.0, 2.0]), vec![0.0, 0.0]);
        assert_eq!(net.param_count(), 3 * 5 + 5 + 5 * 2 + 2);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Mlp::new(&[3, 4, 4, 2], &mut rng, false);
        let x = [0.3, -0.7, 0.9];
        let g_out = [0.8, -1.3];
        let obj = |net: &Mlp, x: &[f64]| {
            let y = net.forward(x);
            y[0] * g_out[0] + y[1] * g_out[1]
        };
        let trace = net.forward_trace(&x);
        let mut grads = vec![0.0; net.param_count()];
        let g_in = net.backward(&trace, &g_out, &mut grads);
        let h = 1e-6;
        for k in 0..net.param_count() {
            let mut up = net.clone();
            up.params_mut()[k] += h;
            let mut dn = net.clone();
            dn.params_mut()[k] -= h;
            let fd = (obj(&up, &x) - obj(&dn, &x)) / (2.0 * h);
            assert!(
                (fd - grads[k]).abs() < 1e-8,
                "param {k}: {fd} vs {}",
                grads[k]
            );
        }
        for k in 0..3 {
            let mut up = x;
            up[k] += h;
            let mut dn = x;
            dn[k] -= h;
            let fd = (obj(&net, &up) - obj(&net, &dn)) / (2.0 * h);
            assert!((fd - g_in[k]).abs() < 1e-8);
        }
    }
}
