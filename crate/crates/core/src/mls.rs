//! Moving-least-squares point deformation.
//!
//! For a query point `u` every control point gets the weight
//! `1 / |p_i - u|^(2 alpha)`, and the best local transform in the chosen
//! class is fitted to the weighted control displacements. Points use the
//! row-vector convention: `T(u) = (u - p*) M + q*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance under which a query point counts as sitting on a control point.
pub const COINCIDENCE_EPS: f64 = 1e-12;

/// Lower bound on the weighted second moment for similarity/rigid fits.
pub const MIN_MOMENT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Counter-clockwise quarter turn, `(x, y) -> (-y, x)`.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<Point2> for f64 {
    type Output = Point2;
    #[inline]
    fn mul(self, p: Point2) -> Point2 {
        Point2::new(self * p.x, self * p.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Class of local transforms fitted at each point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeformationMode {
    Affine,
    #[default]
    Similarity,
    Rigid,
}

impl std::str::FromStr for DeformationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "affine" => Ok(Self::Affine),
            "similarity" => Ok(Self::Similarity),
            "rigid" => Ok(Self::Rigid),
            other => Err(format!("unknown deformation mode {other:?}")),
        }
    }
}

impl std::fmt::Display for DeformationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Affine => "affine",
            Self::Similarity => "similarity",
            Self::Rigid => "rigid",
        })
    }
}

/// Source fiducials `p`, their moved positions `q`, and the weight falloff
/// exponent `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPointSet {
    p: Vec<Point2>,
    q: Vec<Point2>,
    alpha: f64,
}

impl ControlPointSet {
    pub fn new(p: Vec<Point2>, q: Vec<Point2>) -> Result<Self> {
        Self::with_alpha(p, q, 1.0)
    }

    pub fn with_alpha(p: Vec<Point2>, q: Vec<Point2>, alpha: f64) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::LengthMismatch {
                expected: p.len(),
                actual: q.len(),
            });
        }
        if p.len() < 2 {
            return Err(Error::InvalidControlPoints(format!(
                "need at least 2 control points, got {}",
                p.len()
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidControlPoints(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        if let Some(bad) = p.iter().chain(&q).find(|pt| !pt.is_finite()) {
            return Err(Error::InvalidControlPoints(format!(
                "non-finite point {bad:?}"
            )));
        }
        for (i, a) in p.iter().enumerate() {
            if p[..i].iter().any(|b| (*a - *b).norm() <= COINCIDENCE_EPS) {
                return Err(Error::InvalidControlPoints(format!(
                    "duplicate source point {a:?}"
                )));
            }
        }
        Ok(Self { p, q, alpha })
    }

    pub fn p(&self) -> &[Point2] {
        &self.p
    }

    pub fn q(&self) -> &[Point2] {
        &self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// The same deformation with source and target roles exchanged, used to
    /// build backward maps. Fails if `q` contains coincident points.
    pub fn swapped(&self) -> Result<Self> {
        Self::with_alpha(self.q.clone(), self.p.clone(), self.alpha)
    }
}

/// Per-point control weights.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    /// `u` sits on control point `index`; the weight there is unbounded.
    Coincident(usize),
    Regular(Vec<f64>),
}

/// `w_i = 1 / |p_i - u|^(2 alpha)`, or the index of a coincident control point.
pub fn weights(u: Point2, p: &[Point2], alpha: f64) -> Weights {
    let mut w = Vec::with_capacity(p.len());
    for (i, &pi) in p.iter().enumerate() {
        let d2 = (pi - u).norm_sq();
        if d2.sqrt() <= COINCIDENCE_EPS {
            return Weights::Coincident(i);
        }
        w.push(if alpha == 1.0 {
            1.0 / d2
        } else {
            d2.powf(-alpha)
        });
    }
    Weights::Regular(w)
}

/// Weighted centroids `(p*, q*)`.
pub fn centroids(w: &[f64], p: &[Point2], q: &[Point2]) -> Result<(Point2, Point2)> {
    if w.len() != p.len() || p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            actual: p.len().min(q.len()),
        });
    }
    let total: f64 = w.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::ZeroWeightSum);
    }
    let (mut ps, mut qs) = (Point2::ZERO, Point2::ZERO);
    for ((&wi, &pi), &qi) in w.iter().zip(p).zip(q) {
        ps = ps + wi * pi;
        qs = qs + wi * qi;
    }
    Ok(((1.0 / total) * ps, (1.0 / total) * qs))
}

/// Row-major 2x2 matrix acting on row vectors: `v M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    #[inline]
    pub fn left_mul(&self, v: Point2) -> Point2 {
        let m = &self.0;
        Point2::new(v.x * m[0][0] + v.y * m[1][0], v.x * m[0][1] + v.y * m[1][1])
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0.0; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// The transform fitted at one query point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTransform {
    pub m: Mat2,
    pub p_star: Point2,
    pub q_star: Point2,
}

impl LocalTransform {
    #[inline]
    pub fn apply(&self, u: Point2) -> Point2 {
        apply_transform(u, self)
    }
}

/// `(u - p*) M + q*`.
#[inline]
pub fn apply_transform(u: Point2, t: &LocalTransform) -> Point2 {
    t.m.left_mul(u - t.p_star) + t.q_star
}

/// Fits the local transform at `u`.
///
/// When `u` coincides with a control point the result is a pure translation
/// onto that point's target, so the deformation interpolates the controls.
pub fn solve_transform(
    u: Point2,
    cps: &ControlPointSet,
    mode: DeformationMode,
) -> Result<LocalTransform> {
    let (p, q) = (cps.p(), cps.q());
    let w = match weights(u, p, cps.alpha()) {
        Weights::Coincident(i) => {
            return Ok(LocalTransform {
                m: Mat2::IDENTITY,
                p_star: p[i],
                q_star: q[i],
            })
        }
        Weights::Regular(w) => w,
    };
    let (p_star, q_star) = centroids(&w, p, q)?;

    let m = match mode {
        DeformationMode::Affine => {
            // (sum w p^T p)^-1 (sum w p^T q), p and q as row vectors.
            let (mut a00, mut a01, mut a11) = (0.0, 0.0, 0.0);
            let mut b = [[0.0; 2]; 2];
            for ((&wi, &pi), &qi) in w.iter().zip(p).zip(q) {
                let ph = pi - p_star;
                let qh = qi - q_star;
                a00 += wi * ph.x * ph.x;
                a01 += wi * ph.x * ph.y;
                a11 += wi * ph.y * ph.y;
                b[0][0] += wi * ph.x * qh.x;
                b[0][1] += wi * ph.x * qh.y;
                b[1][0] += wi * ph.y * qh.x;
                b[1][1] += wi * ph.y * qh.y;
            }
            let det = a00 * a11 - a01 * a01;
            let scale = (a00 + a11) * (a00 + a11);
            if !(det.abs() > 1e-12 * scale) || scale == 0.0 {
                return Err(Error::DegenerateConfiguration("moment matrix is singular"));
            }
            let inv = Mat2([[a11 / det, -a01 / det], [-a01 / det, a00 / det]]);
            inv.mul(&Mat2(b))
        }
        DeformationMode::Similarity | DeformationMode::Rigid => {
            let (mut mu, mut a, mut bb) = (0.0, 0.0, 0.0);
            for ((&wi, &pi), &qi) in w.iter().zip(p).zip(q) {
                let ph = pi - p_star;
                let qh = qi - q_star;
                mu += wi * ph.norm_sq();
                a += wi * ph.dot(qh);
                bb += wi * ph.perp().dot(qh);
            }
            if !(mu >= MIN_MOMENT) {
                return Err(Error::DegenerateConfiguration(
                    "control points have no spread",
                ));
            }
            let (mut a, mut bb) = (a / mu, bb / mu);
            if mode == DeformationMode::Rigid {
                let len = a.hypot(bb);
                if !(len > 0.0) {
                    return Err(Error::DegenerateConfiguration("rotation is undetermined"));
                }
                a /= len;
                bb /= len;
            }
            Mat2([[a, bb], [-bb, a]])
        }
    };

    Ok(LocalTransform { m, p_star, q_star })
}

/// Solves and applies the deformation at `u` in one call.
pub fn deform_point(u: Point2, cps: &ControlPointSet, mode: DeformationMode) -> Result<Point2> {
    Ok(solve_transform(u, cps, mode)?.apply(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    const MODES: [DeformationMode; 3] = [
        DeformationMode::Affine,
        DeformationMode::Similarity,
        DeformationMode::Rigid,
    ];

    #[test]
    fn weight_examples() {
        assert_eq!(
            weights(pt(0., 0.), &[pt(1., 0.)], 1.0),
            Weights::Regular(vec![1.0])
        );
        assert_eq!(
            weights(pt(0., 0.), &[pt(2., 0.)], 1.0),
            Weights::Regular(vec![0.25])
        );
        match weights(pt(0., 0.), &[pt(3., 4.)], 1.0) {
            Weights::Regular(w) => assert!((w[0] - 1.0 / 25.0).abs() < 1e-15),
            w => panic!("{w:?}"),
        }
        assert_eq!(
            weights(pt(1., 1.), &[pt(0., 0.), pt(1., 1.)], 1.0),
            Weights::Coincident(1)
        );
    }

    #[test]
    fn weights_decrease_with_distance() {
        for alpha in [0.5, 1.0, 2.0] {
            let p: Vec<_> = (1..20).map(|i| pt(i as f64 * 0.7, 0.0)).collect();
            let Weights::Regular(w) = weights(pt(0., 0.), &p, alpha) else {
                panic!()
            };
            assert!(w.windows(2).all(|x| x[0] > x[1]));
        }
    }

    #[test]
    fn centroid_examples() {
        let sq = [pt(0., 0.), pt(2., 0.), pt(0., 2.), pt(2., 2.)];
        let (ps, _) = centroids(&[1.0; 4], &sq, &sq).unwrap();
        assert_eq!(ps, pt(1., 1.));

        let p = [pt(0., 0.), pt(9., 9.)];
        assert_eq!(centroids(&[1., 0.], &p, &p).unwrap().0, pt(0., 0.));

        let p = [pt(0., 0.), pt(4., 0.)];
        assert_eq!(centroids(&[1., 3.], &p, &p).unwrap().0, pt(3., 0.));

        assert!(matches!(
            centroids(&[0., 0.], &p, &p),
            Err(Error::ZeroWeightSum)
        ));
    }

    #[test]
    fn apply_examples() {
        let u = pt(3.5, -2.0);
        let t = LocalTransform {
            m: Mat2::IDENTITY,
            p_star: pt(1., 2.),
            q_star: pt(1., 2.),
        };
        assert_eq!(apply_transform(u, &t), u);
        let t = LocalTransform {
            m: Mat2::IDENTITY,
            p_star: pt(1., 2.),
            q_star: pt(4., 6.),
        };
        assert_eq!(apply_transform(u, &t), u + pt(3., 4.));
        let t = LocalTransform {
            m: Mat2([[2., 0.], [0., 2.]]),
            p_star: Point2::ZERO,
            q_star: Point2::ZERO,
        };
        assert_eq!(apply_transform(pt(1., 1.), &t), pt(2., 2.));
    }

    fn rect() -> Vec<Point2> {
        vec![pt(0., 0.), pt(99., 0.), pt(0., 31.), pt(99., 31.)]
    }

    #[test]
    fn identity_and_translation_in_every_mode() {
        let p = rect();
        let same = ControlPointSet::new(p.clone(), p.clone()).unwrap();
        let shifted =
            ControlPointSet::new(p.clone(), p.iter().map(|&v| v + pt(5., 0.)).collect()).unwrap();
        for mode in MODES {
            for u in [pt(50., 16.), pt(-3., 40.), pt(10.25, 7.5)] {
                let t = solve_transform(u, &same, mode).unwrap();
                assert!(close(t.apply(u), u, 1e-9), "{mode}");
                for (r, i) in t.m.0.iter().flatten().zip([1., 0., 0., 1.]) {
                    assert!((r - i).abs() < 1e-12);
                }
                let t = solve_transform(u, &shifted, mode).unwrap();
                assert!(close(t.apply(u), u + pt(5., 0.), 1e-9), "{mode}");
            }
        }
    }

    #[test]
    fn coincident_query_interpolates() {
        let p = rect();
        let q = vec![pt(1., 2.), pt(100., -3.), pt(-2., 30.), pt(95., 35.)];
        let cps = ControlPointSet::new(p.clone(), q.clone()).unwrap();
        for mode in MODES {
            for (pi, qi) in p.iter().zip(&q) {
                assert_eq!(deform_point(*pi, &cps, mode).unwrap(), *qi);
            }
        }
    }

    #[test]
    fn degenerate_configurations() {
        // Collinear sources: affine moment matrix is singular.
        let p = vec![pt(0., 0.), pt(1., 0.), pt(2., 0.)];
        let cps = ControlPointSet::new(p.clone(), p.clone()).unwrap();
        assert!(matches!(
            solve_transform(pt(0.5, 3.0), &cps, DeformationMode::Affine),
            Err(Error::DegenerateConfiguration(_))
        ));
        assert!(solve_transform(pt(0.5, 3.0), &cps, DeformationMode::Similarity).is_ok());

        // All targets collapse to one point: rotation is undetermined.
        let cps = ControlPointSet::new(p, vec![pt(4., 4.); 3]).unwrap();
        assert!(matches!(
            solve_transform(pt(0.5, 3.0), &cps, DeformationMode::Rigid),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn control_point_validation() {
        assert!(ControlPointSet::new(vec![pt(0., 0.)], vec![pt(0., 0.)]).is_err());
        assert!(
            ControlPointSet::new(vec![pt(0., 0.), pt(0., 0.)], vec![pt(0., 0.), pt(1., 1.)])
                .is_err()
        );
        assert!(ControlPointSet::new(vec![pt(0., 0.), pt(1., 0.)], vec![pt(0., 0.)]).is_err());
        assert!(ControlPointSet::with_alpha(
            vec![pt(0., 0.), pt(1., 0.)],
            vec![pt(0., 0.), pt(1., 0.)],
            0.0
        )
        .is_err());
        assert!(ControlPointSet::new(
            vec![pt(f64::NAN, 0.), pt(1., 0.)],
            vec![pt(0., 0.), pt(1., 0.)]
        )
        .is_err());
    }

    #[test]
    fn mode_parsing() {
        for mode in MODES {
            assert_eq!(mode.to_string().parse::<DeformationMode>().unwrap(), mode);
        }
        assert!("tps".parse::<DeformationMode>().is_err());
    }
}
