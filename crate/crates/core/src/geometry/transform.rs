use serde::{Deserialize, Serialize};

use super::point::{Mat2, Point2};

/// Per-interval global motion: scale, shear, rotation and translation.
///
/// Applied about an anchor `c` as `p -> R(rotation) H(shear) S(scale) (p - c) + c + translate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalTransform {
    pub scale_x: f64,
    pub scale_y: f64,
    pub shear: f64,
    /// Radians.
    pub rotation: f64,
    pub translate: Point2,
}

impl Default for GlobalTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Linear part and translation of a transform evaluated at interval time `t`,
/// with their time derivatives.
#[derive(Debug, Clone, Copy)]
pub struct InterpolatedAffine {
    pub linear: Mat2,
    pub linear_dt: Mat2,
    pub translate: Point2,
    pub translate_dt: Point2,
}

impl GlobalTransform {
    pub const IDENTITY: GlobalTransform = GlobalTransform {
        scale_x: 1.0,
        scale_y: 1.0,
        shear: 0.0,
        rotation: 0.0,
        translate: Point2::ZERO,
    };

    pub fn rotation(angle: f64) -> Self {
        GlobalTransform {
            rotation: angle,
            ..Self::IDENTITY
        }
    }

    pub fn translation(t: Point2) -> Self {
        GlobalTransform {
            translate: t,
            ..Self::IDENTITY
        }
    }

    /// `[scale_x, scale_y, shear, rotation, tx, ty]`
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.scale_x,
            self.scale_y,
            self.shear,
            self.rotation,
            self.translate.x,
            self.translate.y,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        GlobalTransform {
            scale_x: v[0],
            scale_y: v[1],
            shear: v[2],
            rotation: v[3],
            translate: Point2::new(v[4], v[5]),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite()) && self.scale_x > 0.0 && self.scale_y > 0.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn linear(&self) -> Mat2 {
        self.at(1.0).linear
    }

    /// Maps `p` about `anchor`.
    pub fn apply(&self, p: Point2, anchor: Point2) -> Point2 {
        self.linear().apply(p - anchor) + anchor + self.translate
    }

    /// Evaluates the transform at interval time `t` by interpolating the
    /// parameter vector linearly from the identity (t = 0) to `self` (t = 1).
    pub fn at(&self, t: f64) -> InterpolatedAffine {
        let k = self.knots(t);
        let rot = Mat2::rotation(k.r);
        let rot_d = rotation_derivative(k.r);
        let m = Mat2::new(k.a, k.h * k.b, 0.0, k.b);
        let m_t = Mat2::new(k.a_t, k.h_t * k.b + k.h * k.b_t, 0.0, k.b_t);
        InterpolatedAffine {
            linear: rot.mul(&m),
            linear_dt: rot_d.mul(&m).scale(k.r_t).add(&rot.mul(&m_t)),
            translate: self.translate * t,
            translate_dt: self.translate,
        }
    }

    /// Back-propagates gradients on the linear part and its time derivative at
    /// time `t` to `[scale_x, scale_y, shear, rotation]`.
    pub fn backprop_linear(&self, t: f64, g_linear: &Mat2, g_linear_dt: &Mat2) -> [f64; 4] {
        let k = self.knots(t);
        let rot = Mat2::rotation(k.r);
        let rot_d = rotation_derivative(k.r);
        let m = Mat2::new(k.a, k.h * k.b, 0.0, k.b);
        let m_t = Mat2::new(k.a_t, k.h_t * k.b + k.h * k.b_t, 0.0, k.b_t);

        let g_rot = g_linear
            .mul(&m.transpose())
            .add(&g_linear_dt.mul(&m_t.transpose()));
        let g_rot_d = g_linear_dt.mul(&m.transpose()).scale(k.r_t);
        let g_r_t = g_linear_dt.frobenius_dot(&rot_d.mul(&m));
        let g_m = rot
            .transpose()
            .mul(g_linear)
            .add(&rot_d.transpose().mul(g_linear_dt).scale(k.r_t));
        let g_m_t = rot.transpose().mul(g_linear_dt);

        let g_r = g_rot.frobenius_dot(&rot_d) - g_rot_d.frobenius_dot(&rot);
        let g_a = g_m.a;
        let g_h = g_m.b * k.b + g_m_t.b * k.b_t;
        let g_b = g_m.b * k.h + g_m.d + g_m_t.b * k.h_t;
        let g_a_t = g_m_t.a;
        let g_h_t = g_m_t.b * k.b;
        let g_b_t = g_m_t.b * k.h + g_m_t.d;

        [
            t * g_a + g_a_t,
            t * g_b + g_b_t,
            t * g_h + g_h_t,
            t * g_r + g_r_t,
        ]
    }

    fn knots(&self, t: f64) -> Knots {
        Knots {
            r: t * self.rotation,
            h: t * self.shear,
            a: 1.0 + t * (self.scale_x - 1.0),
            b: 1.0 + t * (self.scale_y - 1.0),
            r_t: self.rotation,
            h_t: self.shear,
            a_t: self.scale_x - 1.0,
            b_t: self.scale_y - 1.0,
        }
    }
}

struct Knots {
    r: f64,
    h: f64,
    a: f64,
    b: f64,
    r_t: f64,
    h_t: f64,
    a_t: f64,
    b_t: f64,
}

#[inline]
fn rotation_derivative(r: f64) -> Mat2 {
    let (s, c) = r.sin_cos();
    Mat2::new(-s, -c, c, -s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GlobalTransform {
        GlobalTransform {
            scale_x: 1.3,
            scale_y: 0.8,
            shear: 0.2,
            rotation: 0.7,
            translate: Point2::new(3.0, -1.0),
        }
    }

    #[test]
    fn endpoints_of_interpolation() {
        let g = sample();
        let start = g.at(0.0);
        assert_eq!(start.linear, Mat2::IDENTITY);
        assert_eq!(start.translate, Point2::ZERO);
        let p = Point2::new(2.0, 5.0);
        let c = Point2::new(1.0, 1.0);
        let end = g.at(1.0);
        let q = end.linear.apply(p - c) + c + end.translate;
        assert!((q - g.apply(p, c)).norm() < 1e-14);
    }

    #[test]
    fn time_derivative_matches_finite_differences() {
        let g = sample();
        let h = 1e-6;
        for t in [0.0f64, 0.3, 0.9] {
            let lo = g.at((t - h).max(0.0));
            let hi = g.at(t + h);
            let span = t + h - (t - h).max(0.0);
            let fd = hi.linear.add(&lo.linear.scale(-1.0)).scale(1.0 / span);
            let an = g.at(t).linear_dt;
            for (x, y) in [(fd.a, an.a), (fd.b, an.b), (fd.c, an.c), (fd.d, an.d)] {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let g = sample();
        let ga = Mat2::new(0.3, -1.2, 0.7, 0.4);
        let gat = Mat2::new(-0.5, 0.9, 0.1, 1.1);
        let t = 0.37;
        let objective = |tr: &GlobalTransform| {
            let m = tr.at(t);
            ga.frobenius_dot(&m.linear) + gat.frobenius_dot(&m.linear_dt)
        };
        let an = g.backprop_linear(t, &ga, &gat);
        let h = 1e-6;
        for (i, expect) in an.iter().enumerate() {
            let mut up = g.to_array();
            let mut dn = g.to_array();
            up[i] += h;
            dn[i] -= h;
            let fd = (objective(&GlobalTransform::from_array(up))
                - objective(&GlobalTransform::from_array(dn)))
                / (2.0 * h);
            assert!((fd - expect).abs() < 1e-7, "param {i}: {fd} vs {expect}");
        }
    }
}
