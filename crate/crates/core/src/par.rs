//! Data-parallel helpers.
//!
//! With the `parallel` feature the maps below run on the rayon pool; without
//! it they run sequentially. Work is split into fixed-size chunks and partial
//! results are always reduced in index order, so both builds (and any thread
//! count) produce bit-identical floating point results.

/// Items per work unit when accumulating partial sums.
pub const CHUNK: usize = 16;

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_indexed<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps `f` over a slice, returning results in order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sums `f(i)` for `i in 0..len` into a gradient-like buffer of length `width`.
///
/// Each chunk of [`CHUNK`] indices is accumulated sequentially into its own
/// buffer; the chunk buffers are then added left to right.
pub fn sum_buffers<F>(len: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    let partials = map_indexed(chunks, |c| {
        let mut buf = vec![0.0; width];
        for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
            f(i, &mut buf);
        }
        buf
    });
    let mut out = vec![0.0; width];
    for p in &partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}
