//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use textmorph::mls::{ControlPointSet, DeformationMode, Point2};
use textmorph::RandomSource;

/// Weighted least-squares objective of a candidate map `u -> u*M + t`.
pub fn objective(w: &[f64], p: &[Point2], q: &[Point2], m: [[f64; 2]; 2], t: Point2) -> f64 {
    w.iter()
        .zip(p.iter().zip(q))
        .map(|(&wi, (pi, qi))| {
            let x = pi.x * m[0][0] + pi.y * m[1][0] + t.x - qi.x;
            let y = pi.x * m[0][1] + pi.y * m[1][1] + t.y - qi.y;
            wi * (x * x + y * y)
        })
        .sum()
}

pub fn oracle_weights(u: Point2, p: &[Point2], alpha: f64) -> Vec<f64> {
    p.iter()
        .map(|pi| {
            let d2 = (pi.x - u.x).powi(2) + (pi.y - u.y).powi(2);
            1.0 / d2.powf(alpha)
        })
        .collect()
}

/// Solves the weighted linear least-squares problem `min sum w_i |A_i x - b_i|^2`
/// where each control point contributes two rows.
fn weighted_lstsq(rows: Vec<(f64, Vec<f64>, f64)>, n: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(rows.len(), n, |r, c| rows[r].0.sqrt() * rows[r].1[c]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|(w, _, b)| w.sqrt() * b));
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14)
        .expect("svd solve")
        .iter()
        .copied()
        .collect()
}

/// Best affine map `u*A + t` under weights `w`, over all six parameters.
fn affine_fit(w: &[f64], p: &[Point2], q: &[Point2]) -> ([[f64; 2]; 2], Point2) {
    let mut rows = Vec::new();
    for ((&wi, pi), qi) in w.iter().zip(p).zip(q) {
        // x' = a00 x + a10 y + tx ; y' = a01 x + a11 y + ty
        rows.push((wi, vec![pi.x, pi.y, 0.0, 0.0, 1.0, 0.0], qi.x));
        rows.push((wi, vec![0.0, 0.0, pi.x, pi.y, 0.0, 1.0], qi.y));
    }
    let s = weighted_lstsq(rows, 6);
    ([[s[0], s[2]], [s[1], s[3]]], Point2::new(s[4], s[5]))
}

/// Best map with `M = [[a, b], [-b, a]]` plus translation.
fn similarity_fit(w: &[f64], p: &[Point2], q: &[Point2]) -> ([[f64; 2]; 2], Point2) {
    let mut rows = Vec::new();
    for ((&wi, pi), qi) in w.iter().zip(p).zip(q) {
        // x' = a x - b y + tx ; y' = b x + a y + ty
        rows.push((wi, vec![pi.x, -pi.y, 1.0, 0.0], qi.x));
        rows.push((wi, vec![pi.y, pi.x, 0.0, 1.0], qi.y));
    }
    let s = weighted_lstsq(rows, 4);
    ([[s[0], s[1]], [-s[1], s[0]]], Point2::new(s[2], s[3]))
}

fn rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// For a fixed rotation the optimal translation is the weighted mean residual.
fn rigid_translation(w: &[f64], p: &[Point2], q: &[Point2], m: [[f64; 2]; 2]) -> Point2 {
    let sw: f64 = w.iter().sum();
    let mut t = Point2::new(0.0, 0.0);
    for ((&wi, pi), qi) in w.iter().zip(p).zip(q) {
        t.x += wi * (qi.x - (pi.x * m[0][0] + pi.y * m[1][0]));
        t.y += wi * (qi.y - (pi.x * m[0][1] + pi.y * m[1][1]));
    }
    Point2::new(t.x / sw, t.y / sw)
}

fn rigid_cost(w: &[f64], p: &[Point2], q: &[Point2], theta: f64) -> f64 {
    let m = rotation(theta);
    objective(w, p, q, m, rigid_translation(w, p, q, m))
}

/// Derivative of the rigid cost in the angle, about the weighted centroids.
fn rigid_slope(w: &[f64], p: &[Point2], q: &[Point2], theta: f64) -> f64 {
    let sw: f64 = w.iter().sum();
    let mean = |pts: &[Point2]| {
        let (x, y) = w.iter().zip(pts).fold((0.0, 0.0), |(x, y), (wi, pi)| {
            (x + wi * pi.x, y + wi * pi.y)
        });
        Point2::new(x / sw, y / sw)
    };
    let (pc, qc) = (mean(p), mean(q));
    let (s, c) = theta.sin_cos();
    let mut g = 0.0;
    for ((wi, pi), qi) in w.iter().zip(p).zip(q) {
        let (x, y) = (pi.x - pc.x, pi.y - pc.y);
        // d/dtheta of (x, y) * [[c, s], [-s, c]]
        let (dx, dy) = (-x * s - y * c, x * c - y * s);
        g -= 2.0 * wi * (dx * (qi.x - qc.x) + dy * (qi.y - qc.y));
    }
    g
}

/// Grid search over the angle, then bisection on the cost's derivative.
fn rigid_fit(w: &[f64], p: &[Point2], q: &[Point2]) -> ([[f64; 2]; 2], Point2) {
    let n = 7200;
    let d = std::f64::consts::TAU / n as f64;
    let best = (0..n)
        .map(|k| k as f64 * d - std::f64::consts::PI)
        .min_by(|&a, &b| rigid_cost(w, p, q, a).total_cmp(&rigid_cost(w, p, q, b)))
        .unwrap();
    let (mut lo, mut hi) = (best - d, best + d);
    assert!(
        rigid_slope(w, p, q, lo) <= 0.0 && rigid_slope(w, p, q, hi) >= 0.0,
        "minimum not bracketed"
    );
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if rigid_slope(w, p, q, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = (lo + hi) / 2.0;
    let m = rotation(theta);
    (m, rigid_translation(w, p, q, m))
}

pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    (a + b) / 2.0
}

/// Minimizer of the weighted objective at `u`, applied to `u`.
pub fn oracle_deform(u: Point2, cps: &ControlPointSet, mode: DeformationMode) -> Point2 {
    let w = oracle_weights(u, cps.p(), cps.alpha());
    let (m, t) = match mode {
        DeformationMode::Affine => affine_fit(&w, cps.p(), cps.q()),
        DeformationMode::Similarity => similarity_fit(&w, cps.p(), cps.q()),
        DeformationMode::Rigid => rigid_fit(&w, cps.p(), cps.q()),
    };
    Point2::new(
        u.x * m[0][0] + u.y * m[1][0] + t.x,
        u.x * m[0][1] + u.y * m[1][1] + t.y,
    )
}

pub fn dist(a: Point2, b: Point2) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

pub fn uniform(rng: &mut RandomSource, lo: f64, hi: f64) -> f64 {
    lo + rng.next_f64() * (hi - lo)
}

/// Random well-spread control points on a 100x32 canvas, moved by up to 15 px.
pub fn random_controls(rng: &mut RandomSource, n: usize) -> ControlPointSet {
    loop {
        let p: Vec<Point2> = (0..n)
            .map(|_| Point2::new(uniform(rng, 0.0, 100.0), uniform(rng, 0.0, 32.0)))
            .collect();
        let spread_ok = p
            .iter()
            .enumerate()
            .all(|(i, a)| p[..i].iter().all(|b| dist(*a, *b) > 2.0));
        if !spread_ok {
            continue;
        }
        let q = p
            .iter()
            .map(|pi| {
                Point2::new(
                    pi.x + uniform(rng, -15.0, 15.0),
                    pi.y + uniform(rng, -15.0, 15.0),
                )
            })
            .collect();
        return ControlPointSet::new(p, q).unwrap();
    }
}

/// A query point at least `min_gap` px from every control source.
pub fn random_query(rng: &mut RandomSource, cps: &ControlPointSet, min_gap: f64) -> Point2 {
    loop {
        let u = Point2::new(uniform(rng, -10.0, 110.0), uniform(rng, -10.0, 42.0));
        if cps.p().iter().all(|&p| dist(p, u) > min_gap) {
            return u;
        }
    }
}

/// Smallest to largest eigenvalue ratio of the weighted second moment about
/// the weighted centroid; guards affine instances against near-collinearity.
pub fn moment_conditioning(u: Point2, cps: &ControlPointSet) -> f64 {
    let w = oracle_weights(u, cps.p(), cps.alpha());
    let sw: f64 = w.iter().sum();
    let (mut cx, mut cy) = (0.0, 0.0);
    for (wi, pi) in w.iter().zip(cps.p()) {
        cx += wi * pi.x / sw;
        cy += wi * pi.y / sw;
    }
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (wi, pi) in w.iter().zip(cps.p()) {
        let (x, y) = (pi.x - cx, pi.y - cy);
        sxx += wi * x * x;
        sxy += wi * x * y;
        syy += wi * y * y;
    }
    let tr = sxx + syy;
    let disc = ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt();
    let (lo, hi) = ((tr - disc) / 2.0, (tr + disc) / 2.0);
    lo / hi
}

pub fn checkerboard(width: usize, height: usize, cell: usize) -> textmorph::Image {
    textmorph::Image::from_fn_gray(width, height, |x, y| {
        if ((x / cell) + (y / cell)) % 2 == 0 {
            20
        } else {
            235
        }
    })
    .unwrap()
}

pub fn random_image(
    rng: &mut RandomSource,
    width: usize,
    height: usize,
    channels: usize,
) -> textmorph::Image {
    let data = (0..width * height * channels)
        .map(|_| rng.next_u64() as u8)
        .collect();
    textmorph::Image::new(width, height, channels, data).unwrap()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
