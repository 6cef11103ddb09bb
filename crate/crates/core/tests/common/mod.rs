//! Shared test helpers: seeded generators and independent reference
//! implementations used as oracles.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchmotion::geometry::{CubicBezier, Point2};
use sketchmotion::sketch::SketchFrame;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Point2 {
    Point2::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

/// Random cubic strokes inside the canvas.
pub fn random_sketch(rng: &mut ChaCha8Rng, strokes: usize) -> SketchFrame {
    let strokes = (0..strokes)
        .map(|_| bez(std::array::from_fn(|_| random_point(rng, 20.0, 236.0))))
        .collect();
    SketchFrame::new(strokes).unwrap()
}

/// De Casteljau evaluation.
pub fn de_casteljau(c: &CubicBezier, u: f64) -> Point2 {
    let mut p = c.control.to_vec();
    while p.len() > 1 {
        p = p.windows(2).map(|w| w[0] * (1.0 - u) + w[1] * u).collect();
    }
    p[0]
}

/// Norm-wise relative error between an analytic gradient and central
/// differences of `f` with step `h`.
pub fn fd_rel_error(f: impl Fn(&[f64]) -> f64, x: &[f64], analytic: &[f64], h: f64) -> f64 {
    assert_eq!(x.len(), analytic.len());
    let mut xp = x.to_vec();
    let mut diff = 0.0;
    let mut norm_a = 0.0;
    let mut norm_f = 0.0;
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let up = f(&xp);
        xp[i] = x[i] - h;
        let down = f(&xp);
        xp[i] = x[i];
        let fd = (up - down) / (2.0 * h);
        diff += (fd - analytic[i]).powi(2);
        norm_a += analytic[i].powi(2);
        norm_f += fd.powi(2);
    }
    let scale = norm_a.sqrt().max(norm_f.sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff.sqrt() / scale
    }
}

pub fn flatten(points: &[Vec<Point2>]) -> Vec<f64> {
    points.iter().flatten().flat_map(|p| [p.x, p.y]).collect()
}

pub fn unflatten(x: &[f64], frames: usize) -> Vec<Vec<Point2>> {
    let per = x.len() / frames;
    x.chunks(per)
        .map(|f| f.chunks(2).map(|c| Point2::new(c[0], c[1])).collect())
        .collect()
}

/// Plain floating-point in-circle determinant; positive when `d` lies
/// strictly inside the circle through the counter-clockwise `a, b, c`.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay)
}

pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Exhaustive Delaunay oracle for points in general position: every triple
/// whose circumcircle contains no other point. Returned sorted, with each
/// triangle's indices sorted.
pub fn brute_force_delaunay(points: &[Point2]) -> Vec<[usize; 3]> {
    let n = points.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, mut b, mut c) = (points[i], points[j], points[k]);
                let o = orient(a, b, c);
                if o.abs() < 1e-12 {
                    continue;
                }
                if o < 0.0 {
                    std::mem::swap(&mut b, &mut c);
                }
                let empty = (0..n)
                    .filter(|&l| l != i && l != j && l != k)
                    .all(|l| incircle(a, b, c, points[l]) <= 0.0);
                if empty {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

pub fn sorted_triangles(tris: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut v: Vec<[usize; 3]> = tris
        .iter()
        .map(|t| {
            let mut s = *t;
            s.sort_unstable();
            s
        })
        .collect();
    v.sort_unstable();
    v
}

/// Largest incircle violation of a triangulation, scaled by the triangle's
/// circumradius to the fourth power so that it is dimensionless.
pub fn worst_circumcircle_violation(points: &[Point2], tris: &[[usize; 3]]) -> f64 {
    let mut worst = 0.0f64;
    for t in tris {
        let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
        let area2 = orient(a, b, c);
        let r = a.distance(b) * b.distance(c) * c.distance(a) / (2.0 * area2.abs());
        for (l, d) in points.iter().enumerate() {
            if t.contains(&l) {
                continue;
            }
            let v = incircle(a, b, c, *d) * area2.signum() / r.powi(4);
            worst = worst.max(v);
        }
    }
    worst
}

pub fn bez(control: [Point2; 4]) -> CubicBezier {
    CubicBezier { control }
}

/// Derivative via the hodograph: de Casteljau on `3 (p_{i+1} - p_i)`.
pub fn hodograph(c: &CubicBezier, u: f64) -> Point2 {
    let mut d: Vec<Point2> = c.control.windows(2).map(|w| (w[1] - w[0]) * 3.0).collect();
    while d.len() > 1 {
        d = d.windows(2).map(|w| w[0] * (1.0 - u) + w[1] * u).collect();
    }
    d[0]
}
