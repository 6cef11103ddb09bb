use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::quadrature::{midpoint_node, QuadratureSpec};

/// One stroke: a cubic Bézier curve given by four control points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicBezier {
    pub control: [Point2; 4],
}

/// Cubic Bernstein basis at `u`.
#[inline]
pub fn bernstein(u: f64) -> [f64; 4] {
    let v = 1.0 - u;
    [v * v * v, 3.0 * u * v * v, 3.0 * u * u * v, u * u * u]
}

/// Derivatives of the cubic Bernstein basis at `u`.
#[inline]
pub fn bernstein_derivative(u: f64) -> [f64; 4] {
    let v = 1.0 - u;
    [
        -3.0 * v * v,
        3.0 * v * v - 6.0 * u * v,
        6.0 * u * v - 3.0 * u * u,
        3.0 * u * u,
    ]
}

/// Power-basis coefficients `[a0, a1, a2]` of the derivative
/// `f'(u) = a0 + a1 u + a2 u^2` of the cubic with control points `p`.
#[inline]
pub(crate) fn velocity_coefficients(p: &[Point2; 4]) -> [Point2; 3] {
    [
        (p[1] - p[0]) * 3.0,
        (p[0] - p[1] * 2.0 + p[2]) * 6.0,
        (p[3] - p[0] + (p[1] - p[2]) * 3.0) * 3.0,
    ]
}

/// Power-basis coefficients `[b0..b3]` of the cubic itself.
#[inline]
pub(crate) fn position_coefficients(p: &[Point2; 4]) -> [Point2; 4] {
    [
        p[0],
        (p[1] - p[0]) * 3.0,
        (p[0] - p[1] * 2.0 + p[2]) * 3.0,
        p[3] - p[0] + (p[1] - p[2]) * 3.0,
    ]
}

/// `VELOCITY_MATRIX[i][j]`: weight of control point `j` in velocity coefficient `i`.
pub(crate) const VELOCITY_MATRIX: [[f64; 4]; 3] = [
    [-3.0, 3.0, 0.0, 0.0],
    [6.0, -12.0, 6.0, 0.0],
    [-3.0, 9.0, -9.0, 3.0],
];

/// `POSITION_MATRIX[i][j]`: weight of control point `j` in position coefficient `i`.
pub(crate) const POSITION_MATRIX: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [-3.0, 3.0, 0.0, 0.0],
    [3.0, -6.0, 3.0, 0.0],
    [-1.0, 3.0, -3.0, 1.0],
];

impl CubicBezier {
    pub const fn new(p0: Point2, p1: Point2, p2: Point2, p3: Point2) -> Self {
        CubicBezier {
            control: [p0, p1, p2, p3],
        }
    }

    /// Degree-elevates the segment `a -> b` to a cubic with inner control
    /// points at 1/3 and 2/3 of the chord.
    pub fn line(a: Point2, b: Point2) -> Self {
        CubicBezier::new(a, a.lerp(b, 1.0 / 3.0), a.lerp(b, 2.0 / 3.0), b)
    }

    pub fn is_finite(&self) -> bool {
        self.control.iter().all(|p| p.is_finite())
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Self {
        CubicBezier {
            control: self.control.map(f),
        }
    }

    /// Point on the curve at parameter `u` in [0, 1].
    pub fn eval(&self, u: f64) -> Point2 {
        debug_assert!((0.0..=1.0).contains(&u));
        // Exact endpoint interpolation.
        if u == 0.0 {
            return self.control[0];
        }
        if u == 1.0 {
            return self.control[3];
        }
        let b = bernstein(u);
        let p = &self.control;
        p[0] * b[0] + p[1] * b[1] + p[2] * b[2] + p[3] * b[3]
    }

    /// Exact derivative `df/du`.
    pub fn velocity(&self, u: f64) -> Point2 {
        debug_assert!((0.0..=1.0).contains(&u));
        let d = bernstein_derivative(u);
        let p = &self.control;
        p[0] * d[0] + p[1] * d[1] + p[2] * d[2] + p[3] * d[3]
    }

    /// Arc length by the composite midpoint rule over `q.samples_u` nodes.
    pub fn length(&self, q: &QuadratureSpec) -> f64 {
        curve_length(self, q)
    }

    pub fn chord(&self) -> f64 {
        self.control[0].distance(self.control[3])
    }
}

pub fn eval_bezier(c: &CubicBezier, u: f64) -> Point2 {
    c.eval(u)
}

pub fn bezier_velocity(c: &CubicBezier, u: f64) -> Point2 {
    c.velocity(u)
}

pub fn curve_length(c: &CubicBezier, q: &QuadratureSpec) -> f64 {
    let n = q.samples_u;
    let [a0, a1, a2] = velocity_coefficients(&c.control);
    let mut sum = 0.0;
    for k in 0..n {
        let u = midpoint_node(k, n);
        sum += (a0 + (a1 + a2 * u) * u).norm();
    }
    sum / n as f64
}

/// Arc length and its gradient with respect to the four control points.
///
/// Where the velocity vanishes the (sub)gradient contribution is zero.
pub fn curve_length_grad(c: &CubicBezier, q: &QuadratureSpec) -> (f64, [Point2; 4]) {
    let n = q.samples_u;
    let [a0, a1, a2] = velocity_coefficients(&c.control);
    let mut sum = 0.0;
    // Gradient with respect to the power-basis coefficients, then mapped back.
    let mut ga = [Point2::ZERO; 3];
    for k in 0..n {
        let u = midpoint_node(k, n);
        let v = a0 + (a1 + a2 * u) * u;
        let len = v.norm();
        sum += len;
        if len > 0.0 {
            let dir = v * (1.0 / len);
            ga[0] += dir;
            ga[1] += dir * u;
            ga[2] += dir * (u * u);
        }
    }
    let inv = 1.0 / n as f64;
    let mut grad = [Point2::ZERO; 4];
    for (i, g) in ga.iter().enumerate() {
        for (j, out) in grad.iter_mut().enumerate() {
            *out += *g * (VELOCITY_MATRIX[i][j] * inv);
        }
    }
    (sum * inv, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn straight() -> CubicBezier {
        CubicBezier::new(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0))
    }

    #[test]
    fn eval_degenerate_point_curve() {
        let c = CubicBezier::new(Point2::ZERO, Point2::ZERO, Point2::ZERO, Point2::ZERO);
        assert_eq!(c.eval(0.7), Point2::ZERO);
        assert_eq!(c.velocity(0.3), Point2::ZERO);
        assert_eq!(curve_length(&c, &QuadratureSpec::default()), 0.0);
    }

    #[test]
    fn eval_collinear_midpoint() {
        let q = straight().eval(0.5);
        assert!((q.x - 1.5).abs() < 1e-15 && q.y == 0.0);
    }

    #[test]
    fn endpoints_are_exact() {
        let c = CubicBezier::new(p(0.1, 0.3), p(7.0, -2.0), p(-1.0, 5.0), p(2.2, 9.9));
        assert_eq!(c.eval(0.0), c.control[0]);
        assert_eq!(c.eval(1.0), c.control[3]);
    }

    #[test]
    fn velocity_of_linear_parameterization() {
        for u in [0.0, 0.25, 0.5, 1.0] {
            let v = straight().velocity(u);
            assert!((v.x - 3.0).abs() < 1e-14 && v.y.abs() < 1e-14);
        }
        let c = CubicBezier::new(p(0.1, 0.3), p(7.0, -2.0), p(-1.0, 5.0), p(2.2, 9.9));
        assert!((c.velocity(0.0) - (c.control[1] - c.control[0]) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn velocity_coefficients_agree_with_basis() {
        let c = CubicBezier::new(p(0.1, 0.3), p(7.0, -2.0), p(-1.0, 5.0), p(2.2, 9.9));
        let [a0, a1, a2] = velocity_coefficients(&c.control);
        let [b0, b1, b2, b3] = position_coefficients(&c.control);
        for u in [0.0, 0.13, 0.5, 0.91] {
            let v = a0 + (a1 + a2 * u) * u;
            assert!((v - c.velocity(u)).norm() < 1e-12);
            let f = b0 + (b1 + (b2 + b3 * u) * u) * u;
            assert!((f - c.eval(u)).norm() < 1e-12);
        }
    }

    #[test]
    fn straight_segment_length() {
        let l = curve_length(&straight(), &QuadratureSpec::default());
        assert!((l - 3.0).abs() < 1e-9);
    }

    #[test]
    fn length_gradient_matches_finite_differences() {
        let q = QuadratureSpec::new(200, 2).unwrap();
        let c = CubicBezier::new(p(0.1, 0.3), p(7.0, -2.0), p(-1.0, 5.0), p(2.2, 9.9));
        let (_, g) = curve_length_grad(&c, &q);
        let h = 1e-6;
        for j in 0..4 {
            for axis in 0..2 {
                let bump = |s: f64| {
                    let mut d = c;
                    if axis == 0 {
                        d.control[j].x += s;
                    } else {
                        d.control[j].y += s;
                    }
                    curve_length(&d, &q)
                };
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                let an = if axis == 0 { g[j].x } else { g[j].y };
                assert!((fd - an).abs() < 1e-7, "{j} {axis}: {fd} vs {an}");
            }
        }
    }
}
