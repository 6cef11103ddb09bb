//! Area of the space-time surface traced by one stroke over a frame interval.
//!
//! Control points move as `p_j(t) = M(t) (p_j - c) + c + t (T + d_j)` for
//! `t` in [0, 1], where `M(t)` comes from interpolating the transform
//! parameters and `d_j` are the local offsets. The integrand
//! `|df/du x df/dt|` is a degree-5 polynomial in `u` for fixed `t`; it is
//! evaluated in power form, and its gradient only needs the sign-weighted
//! moments of `u`, which are read from prefix sums over sign runs.

use super::bezier::{
    position_coefficients, velocity_coefficients, POSITION_MATRIX, VELOCITY_MATRIX,
};
use super::point::{Mat2, Point2};
use super::quadrature::{midpoint_node, MomentTable, QuadratureSpec};
use super::transform::GlobalTransform;
use super::CubicBezier;

/// Gradient of the swept area with respect to every input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGradient {
    pub control: [Point2; 4],
    /// Gradient with respect to the transform anchor (the frame centroid).
    pub anchor: Point2,
    pub offsets: [Point2; 4],
    /// Same layout as [`GlobalTransform::to_array`].
    pub transform: [f64; 6],
}

impl Default for SweepGradient {
    fn default() -> Self {
        SweepGradient {
            control: [Point2::ZERO; 4],
            anchor: Point2::ZERO,
            offsets: [Point2::ZERO; 4],
            transform: [0.0; 6],
        }
    }
}

/// Area swept by `stroke` over one frame interval.
pub fn swept_area(
    stroke: &CubicBezier,
    transform: &GlobalTransform,
    anchor: Point2,
    offsets: &[Point2; 4],
    q: &QuadratureSpec,
) -> f64 {
    let table = MomentTable::new(q.samples_u);
    sweep(
        stroke,
        transform,
        anchor,
        offsets,
        q.samples_t,
        &table,
        false,
    )
    .0
}

/// Swept area together with its gradient.
pub fn swept_area_grad(
    stroke: &CubicBezier,
    transform: &GlobalTransform,
    anchor: Point2,
    offsets: &[Point2; 4],
    q: &QuadratureSpec,
) -> (f64, SweepGradient) {
    let table = MomentTable::new(q.samples_u);
    sweep(
        stroke,
        transform,
        anchor,
        offsets,
        q.samples_t,
        &table,
        true,
    )
}

pub(crate) fn sweep(
    stroke: &CubicBezier,
    transform: &GlobalTransform,
    anchor: Point2,
    offsets: &[Point2; 4],
    samples_t: usize,
    table: &MomentTable,
    want_grad: bool,
) -> (f64, SweepGradient) {
    let nu = table.nodes.len();
    let weight = 1.0 / (nu as f64 * samples_t as f64);
    let rel: [Point2; 4] = std::array::from_fn(|j| stroke.control[j] - anchor);

    let mut area = 0.0;
    let mut grad = SweepGradient::default();
    let mut g_lin_total = [0.0; 4];

    for ti in 0..samples_t {
        let t = midpoint_node(ti, samples_t);
        let aff = transform.at(t);
        let pos: [Point2; 4] = std::array::from_fn(|j| {
            aff.linear.apply(rel[j]) + anchor + aff.translate + offsets[j] * t
        });
        let vel: [Point2; 4] =
            std::array::from_fn(|j| aff.linear_dt.apply(rel[j]) + aff.translate_dt + offsets[j]);
        let a = velocity_coefficients(&pos);
        let b = position_coefficients(&vel);

        let mut poly = [0.0; 6];
        for (i, ai) in a.iter().enumerate() {
            for (l, bl) in b.iter().enumerate() {
                poly[i + l] += ai.cross(*bl);
            }
        }
        if poly.iter().all(|&c| c == 0.0) {
            continue;
        }

        let mut sum = 0.0;
        let mut moments = [0.0; 6];
        let mut run_start = 0;
        let mut run_sign = 0.0;
        for (k, &u) in table.nodes.iter().enumerate() {
            let v = ((((poly[5] * u + poly[4]) * u + poly[3]) * u + poly[2]) * u + poly[1]) * u
                + poly[0];
            sum += v.abs();
            if want_grad {
                let s = sign(v);
                if s != run_sign {
                    accumulate_run(&mut moments, table, run_sign, run_start, k);
                    run_start = k;
                    run_sign = s;
                }
            }
        }
        area += sum;
        if !want_grad {
            continue;
        }
        accumulate_run(&mut moments, table, run_sign, run_start, nu);

        // d area / d poly[m]
        let g_poly = moments.map(|m| m * weight);
        let mut g_a = [Point2::ZERO; 3];
        let mut g_b = [Point2::ZERO; 4];
        for (i, ai) in a.iter().enumerate() {
            for (l, bl) in b.iter().enumerate() {
                let g = g_poly[i + l];
                g_a[i] += Point2::new(bl.y, -bl.x) * g;
                g_b[l] += Point2::new(-ai.y, ai.x) * g;
            }
        }
        let mut g_pos = [Point2::ZERO; 4];
        let mut g_vel = [Point2::ZERO; 4];
        for j in 0..4 {
            for (i, ga) in g_a.iter().enumerate() {
                g_pos[j] += *ga * VELOCITY_MATRIX[i][j];
            }
            for (l, gb) in g_b.iter().enumerate() {
                g_vel[j] += *gb * POSITION_MATRIX[l][j];
            }
        }

        let lin_t = aff.linear.transpose();
        let lin_dt_t = aff.linear_dt.transpose();
        let mut g_lin = Mat2::ZERO;
        let mut g_lin_dt = Mat2::ZERO;
        for j in 0..4 {
            let through = lin_t.apply(g_pos[j]) + lin_dt_t.apply(g_vel[j]);
            grad.control[j] += through;
            grad.anchor += g_pos[j] - through;
            let g_off = g_pos[j] * t + g_vel[j];
            grad.offsets[j] += g_off;
            grad.transform[4] += g_off.x;
            grad.transform[5] += g_off.y;
            g_lin = g_lin.add(&Mat2::outer(g_pos[j], rel[j]));
            g_lin_dt = g_lin_dt.add(&Mat2::outer(g_vel[j], rel[j]));
        }
        let g_params = transform.backprop_linear(t, &g_lin, &g_lin_dt);
        for (acc, g) in g_lin_total.iter_mut().zip(g_params) {
            *acc += g;
        }
    }
    grad.transform[..4].copy_from_slice(&g_lin_total);
    (area * weight, grad)
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
fn accumulate_run(moments: &mut [f64; 6], table: &MomentTable, s: f64, start: usize, end: usize) {
    if s == 0.0 || start == end {
        return;
    }
    let r = table.range(start, end);
    for (m, v) in moments.iter_mut().zip(r) {
        *m += s * v;
    }
}
