//! Brute-force projection oracles that do not call the closed forms.
//!
//! * polytopes: Frank-Wolfe over the vertex list;
//! * dimension 1: grid search over the interval;
//! * sets with an orthonormal box chart (box, hyperplane, halfspace,
//!   subspace, ray), dimension <= 3: coarse-to-fine grid over the chart;
//! * remaining 2-D sets (balls, cones and truncated cones): grid search
//!   along the boundary curves, after an inequality membership test.
//!
//! Unbounded sets are truncated to a box of half-width `half_width`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::sets::{SetDescriptor, SetError};
use crate::tol;
use crate::vector::Vector;

pub const DEFAULT_RESOLUTION: f64 = 1e-3;
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const FW_MAX_ITER: usize = 10_000;

const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid oracle supports dimension <= 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("no oracle for {0}")]
    UnsupportedSet(String),
    #[error("did not converge: {0}")]
    DidNotConverge(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Oracle projection with the default truncation box.
pub fn oracle_project(s: &SetDescriptor, x: &Vector, resolution: f64) -> Result<Vector, OracleError> {
    oracle_project_in(s, x, resolution, DEFAULT_HALF_WIDTH)
}

pub fn oracle_project_in(
    s: &SetDescriptor,
    x: &Vector,
    resolution: f64,
    half_width: f64,
) -> Result<Vector, OracleError> {
    use SetDescriptor as S;
    let n = s.dim();
    if x.dim() != n {
        return Err(SetError::DimensionMismatch {
            expected: n,
            found: x.dim(),
        }
        .into());
    }
    match s {
        S::Singleton { u } => return Ok(u.clone()),
        S::Polytope { vertices } => {
            let r = frank_wolfe(vertices, x, FwStep::AwayLineSearch, FW_MAX_ITER);
            return if r.converged {
                Ok(r.point)
            } else {
                Err(OracleError::DidNotConverge(format!("frank-wolfe gap {:e}", r.gap)))
            };
        }
        S::Translate { base, shift } => {
            let p = oracle_project_in(base, &(x - shift), resolution, half_width)?;
            return Ok(&p + shift);
        }
        _ => {}
    }
    if n > 3 {
        return Err(OracleError::UnsupportedDimension(n));
    }
    if let Some(chart) = Chart::of(s, half_width) {
        return Ok(chart.search(x, resolution));
    }
    if n == 1 {
        let iv = s
            .as_interval()
            .ok_or_else(|| OracleError::UnsupportedSet(s.label()))?;
        let lo = iv.lo.max(-half_width - x[0].abs());
        let hi = iv.hi.min(half_width + x[0].abs());
        let seg = Piece::Segment(Vector::from([lo]), Vector::from([hi]));
        return Ok(seg.search(x, resolution));
    }
    if n == 2 {
        return match Region2::of(s, half_width) {
            Ok(region) => Ok(region.search(x, resolution)),
            Err(e) if s.is_bounded() => support_polygon(s, x).ok_or(e),
            Err(e) => Err(e),
        };
    }
    Err(OracleError::UnsupportedSet(s.label()))
}

const POLYGON_SIDES: usize = 4096;

/// Projection onto the outer polygon {y : <u_i, y> <= σ_S(u_i)} of a
/// bounded planar set, from its support function alone.
fn support_polygon(s: &SetDescriptor, x: &Vector) -> Option<Vector> {
    let dirs: Vec<Vector> = (0..POLYGON_SIDES)
        .map(|i| {
            let t = TAU * i as f64 / POLYGON_SIDES as f64;
            Vector::from([t.cos(), t.sin()])
        })
        .collect();
    let h: Vec<f64> = dirs.iter().map(|u| s.support(u).filter(|v| v.is_finite())).collect::<Option<_>>()?;
    if dirs.iter().zip(&h).all(|(u, hi)| u.dot(x) <= *hi) {
        return Some(x.clone());
    }
    let m = dirs.len();
    let vertex = |i: usize| {
        let (a, b) = (&dirs[i], &dirs[(i + 1) % m]);
        let det = a[0] * b[1] - a[1] * b[0];
        let (ha, hb) = (h[i], h[(i + 1) % m]);
        Vector::from([(ha * b[1] - hb * a[1]) / det, (a[0] * hb - b[0] * ha) / det])
    };
    let verts: Vec<Vector> = (0..m).map(vertex).collect();
    let mut best: Option<(f64, Vector)> = None;
    for i in 0..m {
        let (p, q) = (&verts[i], &verts[(i + 1) % m]);
        let e = q - p;
        let t = if e.norm_sq() > 0.0 { ((x - p).dot(&e) / e.norm_sq()).clamp(0.0, 1.0) } else { 0.0 };
        let mut y = p.clone();
        y.axpy(t, &e);
        let d = y.dist(x);
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, y));
        }
    }
    best.map(|b| b.1)
}

/// p + B t with t in an axis-aligned box; B has orthonormal columns.
struct Chart {
    origin: Vector,
    basis: Vec<Vector>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Chart {
    fn of(s: &SetDescriptor, half_width: f64) -> Option<Chart> {
        use SetDescriptor as S;
        let n = s.dim();
        let r = half_width * (n as f64).sqrt();
        let full = |k: usize| (vec![-r; k], vec![r; k]);
        Some(match s {
            S::Box { lower, upper } => Chart {
                origin: Vector::zeros(n),
                basis: (0..n).map(|i| Vector::basis(n, i)).collect(),
                lo: lower.iter().map(|&l| l.max(-r)).collect(),
                hi: upper.iter().map(|&u| u.min(r)).collect(),
            },
            S::Hyperplane { normal, offset } => {
                let basis = linalg::complement(std::slice::from_ref(normal), n);
                let (lo, hi) = full(basis.len());
                Chart {
                    origin: normal.scale(offset / normal.norm_sq()),
                    basis,
                    lo,
                    hi,
                }
            }
            S::Halfspace { normal, offset } => {
                let mut basis = linalg::complement(std::slice::from_ref(normal), n);
                let (mut lo, mut hi) = full(basis.len());
                basis.push(normal.normalized()?);
                lo.push(-r);
                hi.push(0.0);
                Chart {
                    origin: normal.scale(offset / normal.norm_sq()),
                    basis,
                    lo,
                    hi,
                }
            }
            S::Subspace { basis } => {
                let (lo, hi) = full(basis.len());
                Chart {
                    origin: Vector::zeros(n),
                    basis: basis.clone(),
                    lo,
                    hi,
                }
            }
            S::Ray { direction } => Chart {
                origin: Vector::zeros(n),
                basis: vec![direction.normalized()?],
                lo: vec![0.0],
                hi: vec![r],
            },
            _ => return None,
        })
    }

    fn point(&self, t: &[f64]) -> Vector {
        let mut y = self.origin.clone();
        for (ti, b) in t.iter().zip(&self.basis) {
            y.axpy(*ti, b);
        }
        y
    }

    fn search(&self, x: &Vector, resolution: f64) -> Vector {
        const N: usize = 21;
        let k = self.basis.len();
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let mut best_t: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        loop {
            let steps: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / (N - 1) as f64).collect();
            let mut best = f64::INFINITY;
            let mut idx = vec![0usize; k];
            'grid: loop {
                let t: Vec<f64> = (0..k).map(|i| lo[i] + steps[i] * idx[i] as f64).collect();
                let d = (&self.point(&t) - x).norm_sq();
                if d < best {
                    best = d;
                    best_t = t;
                }
                for i in 0..k {
                    idx[i] += 1;
                    if idx[i] < N {
                        continue 'grid;
                    }
                    idx[i] = 0;
                }
                break;
            }
            let h = steps.iter().fold(0.0, |m: f64, &s| m.max(s));
            if h <= resolution / 10.0 {
                break;
            }
            for i in 0..k {
                let (a, b) = (lo[i], hi[i]);
                lo[i] = (best_t[i] - 2.0 * steps[i]).max(a);
                hi[i] = (best_t[i] + 2.0 * steps[i]).min(b);
            }
        }
        self.point(&best_t)
    }
}

/// Pieces of a boundary curve in the plane (or a segment on the line).
#[derive(Clone, Debug)]
enum Piece {
    Point(Vector),
    Segment(Vector, Vector),
    /// Arc of the circle of radius r about the origin, angles in [from, to].
    Arc { r: f64, from: f64, to: f64 },
}

fn unit(theta: f64) -> Vector {
    Vector::from([theta.cos(), theta.sin()])
}

impl Piece {
    fn at(&self, t: f64) -> Vector {
        match self {
            Piece::Point(p) => p.clone(),
            Piece::Segment(a, b) => {
                let mut y = a.scale(1.0 - t);
                y.axpy(t, b);
                y
            }
            Piece::Arc { r, from, to } => unit(from + t * (to - from)).scale(*r),
        }
    }

    fn length(&self) -> f64 {
        match self {
            Piece::Point(_) => 0.0,
            Piece::Segment(a, b) => a.dist(b),
            Piece::Arc { r, from, to } => r * (to - from).abs(),
        }
    }

    /// Coarse-to-fine search of t ∈ [0, 1]; ends are always grid points.
    fn search(&self, x: &Vector, resolution: f64) -> Vector {
        let len = self.length();
        if len == 0.0 {
            return self.at(0.0);
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut n = 401;
        let mut best_t = 0.0;
        loop {
            let step = (hi - lo) / (n - 1) as f64;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let t = lo + step * i as f64;
                let d = (&self.at(t) - x).norm_sq();
                if d < best {
                    best = d;
                    best_t = t;
                }
            }
            if step * len <= resolution / 10.0 {
                break;
            }
            lo = (best_t - 2.0 * step).max(0.0);
            hi = (best_t + 2.0 * step).min(1.0);
            n = 41;
        }
        self.at(best_t)
    }
}

/// Closed convex cones in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Cone2 {
    Zero,
    Ray(f64),
    Line(f64),
    /// directions in [start, start + width], 0 < width < π
    Sector(f64, f64),
    /// {y : <y, e(normal)> <= 0}
    HalfPlane(f64),
    Plane,
}

fn angle_of(v: &Vector) -> f64 {
    v[1].atan2(v[0]).rem_euclid(TAU)
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

impl Cone2 {
    pub(crate) fn of(s: &SetDescriptor) -> Result<Cone2, OracleError> {
        use SetDescriptor as S;
        let unsupported = || OracleError::UnsupportedSet(s.label());
        if s.dim() != 2 || !s.is_cone() {
            return Err(unsupported());
        }
        Ok(match s {
            S::Singleton { .. } => Cone2::Zero,
            S::Box { lower, upper } => {
                let mut dirs = Vec::new();
                for i in 0..2 {
                    if upper[i] == f64::INFINITY {
                        dirs.push(Vector::basis(2, i));
                    }
                    if lower[i] == f64::NEG_INFINITY {
                        dirs.push(-Vector::basis(2, i));
                    }
                }
                Cone2::from_angles(dirs.iter().map(angle_of).collect())
            }
            S::Hyperplane { normal, .. } => Cone2::Line(wrap(angle_of(normal) + PI / 2.0)),
            S::Halfspace { normal, .. } => Cone2::HalfPlane(angle_of(normal)),
            S::Subspace { basis } if basis.len() == 1 => Cone2::Line(angle_of(&basis[0])),
            S::Subspace { .. } => Cone2::Plane,
            S::Ray { direction } => Cone2::Ray(angle_of(direction)),
            S::FinitelyGeneratedCone { generators } => {
                Cone2::from_angles(generators.iter().map(angle_of).collect())
            }
            S::PolarCone { of } => Cone2::of(of)?.polar(),
            S::ConeIntersection(ci) => Cone2::of(ci.k1())?.intersect(&Cone2::of(ci.k2())?).ok_or_else(unsupported)?,
            S::MinkowskiSum(sum) => {
                let mut angles = Vec::new();
                for p in sum.parts() {
                    angles.extend(Cone2::of(p)?.spanning_angles());
                }
                Cone2::from_angles(angles)
            }
            S::Translate { base, .. } => Cone2::of(base)?,
            _ => return Err(unsupported()),
        })
    }

    /// Cone generated by the given directions.
    pub(crate) fn from_angles(mut angles: Vec<f64>) -> Cone2 {
        if angles.is_empty() {
            return Cone2::Zero;
        }
        angles.iter_mut().for_each(|a| *a = wrap(*a));
        angles.sort_by(f64::total_cmp);
        let m = angles.len();
        let (mut gap, mut after) = (f64::NEG_INFINITY, 0);
        for i in 0..m {
            let next = if i + 1 < m { angles[i + 1] } else { angles[0] + TAU };
            let g = next - angles[i];
            if g > gap + ANGLE_EPS {
                gap = g;
                after = (i + 1) % m;
            }
        }
        let span = TAU - gap;
        let start = angles[after];
        if span <= ANGLE_EPS {
            Cone2::Ray(start)
        } else if span < PI - ANGLE_EPS {
            Cone2::Sector(start, span)
        } else if span <= PI + ANGLE_EPS {
            let interior = angles.iter().any(|&a| {
                let off = wrap(a - start);
                off > ANGLE_EPS && off < PI - ANGLE_EPS
            });
            if interior {
                Cone2::HalfPlane(wrap(start - PI / 2.0))
            } else {
                Cone2::Line(start)
            }
        } else {
            Cone2::Plane
        }
    }

    fn spanning_angles(&self) -> Vec<f64> {
        match *self {
            Cone2::Zero => vec![],
            Cone2::Ray(t) => vec![t],
            Cone2::Line(t) => vec![t, t + PI],
            Cone2::Sector(a, w) => vec![a, a + w],
            Cone2::HalfPlane(p) => vec![p + PI / 2.0, p + PI, p + 1.5 * PI],
            Cone2::Plane => vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0],
        }
    }

    pub(crate) fn polar(&self) -> Cone2 {
        match *self {
            Cone2::Zero => Cone2::Plane,
            Cone2::Plane => Cone2::Zero,
            Cone2::Ray(t) => Cone2::HalfPlane(t),
            Cone2::HalfPlane(p) => Cone2::Ray(p),
            Cone2::Line(t) => Cone2::Line(wrap(t + PI / 2.0)),
            Cone2::Sector(a, w) => Cone2::Sector(wrap(a + w + PI / 2.0), PI - w),
        }
    }

    /// Closed arcs (start, width) of unit directions in the cone.
    fn arcs(&self) -> Vec<(f64, f64)> {
        match *self {
            Cone2::Zero => vec![],
            Cone2::Ray(t) => vec![(t, 0.0)],
            Cone2::Line(t) => vec![(t, 0.0), (wrap(t + PI), 0.0)],
            Cone2::Sector(a, w) => vec![(a, w)],
            Cone2::HalfPlane(p) => vec![(wrap(p + PI / 2.0), PI)],
            Cone2::Plane => vec![(0.0, TAU)],
        }
    }

    pub(crate) fn intersect(&self, other: &Cone2) -> Option<Cone2> {
        if *self == Cone2::Plane {
            return Some(*other);
        }
        if *other == Cone2::Plane {
            return Some(*self);
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, wa) in self.arcs() {
            for (b, wb) in other.arcs() {
                for k in [-1.0, 0.0, 1.0] {
                    let bs = b + k * TAU;
                    let lo = a.max(bs);
                    let hi = (a + wa).min(bs + wb);
                    if hi >= lo - ANGLE_EPS {
                        let arc = (wrap(lo), (hi - lo).max(0.0));
                        if !out
                            .iter()
                            .any(|o| circ_dist(o.0, arc.0) <= 1e-9 && (o.1 - arc.1).abs() <= 1e-9)
                        {
                            out.push(arc);
                        }
                    }
                }
            }
        }
        match out.as_slice() {
            [] => Some(Cone2::Zero),
            [(s, w)] if *w <= ANGLE_EPS => Some(Cone2::Ray(*s)),
            [(s, w)] if *w < PI - 1e-9 => Some(Cone2::Sector(*s, *w)),
            [(s, w)] if (*w - PI).abs() <= 1e-9 => Some(Cone2::HalfPlane(wrap(s - PI / 2.0))),
            [(s, 0.0), (t, 0.0)] if (circ_dist(*s, *t) - PI).abs() <= 1e-9 => Some(Cone2::Line(*s)),
            _ => None,
        }
    }

    pub(crate) fn contains(&self, y: &Vector) -> bool {
        if y.is_zero() {
            return true;
        }
        match *self {
            Cone2::Zero | Cone2::Ray(_) | Cone2::Line(_) => false,
            Cone2::Sector(a, w) => wrap(angle_of(y) - a) <= w,
            Cone2::HalfPlane(p) => y.dot(&unit(p)) <= 0.0,
            Cone2::Plane => true,
        }
    }

    /// Boundary (or whole set, when lower dimensional) within radius r.
    fn pieces(&self, r: f64, capped: bool) -> Vec<Piece> {
        let o = Vector::zeros(2);
        let mut out = match *self {
            Cone2::Zero => vec![Piece::Point(o.clone())],
            Cone2::Ray(t) => vec![Piece::Segment(o.clone(), unit(t).scale(r))],
            Cone2::Line(t) => vec![Piece::Segment(unit(t).scale(-r), unit(t).scale(r))],
            Cone2::Sector(a, w) => vec![
                Piece::Segment(o.clone(), unit(a).scale(r)),
                Piece::Segment(o.clone(), unit(a + w).scale(r)),
            ],
            Cone2::HalfPlane(p) => {
                let t = unit(p + PI / 2.0);
                vec![Piece::Segment(t.scale(-r), t.scale(r))]
            }
            Cone2::Plane => vec![],
        };
        if capped {
            match *self {
                Cone2::Sector(a, w) => out.push(Piece::Arc { r, from: a, to: a + w }),
                Cone2::HalfPlane(p) => out.push(Piece::Arc {
                    r,
                    from: p + PI / 2.0,
                    to: p + 1.5 * PI,
                }),
                Cone2::Plane => out.push(Piece::Arc { r, from: 0.0, to: TAU }),
                _ => {}
            }
        }
        out
    }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TAU - d)
}

enum Inside {
    Nothing,
    Disk { center: Vector, r: f64 },
    Cone(Cone2),
    CappedCone(Cone2, f64),
}

struct Region2 {
    pieces: Vec<Piece>,
    shift: Vector,
    inside: Inside,
}

impl Region2 {
    fn of(s: &SetDescriptor, half_width: f64) -> Result<Region2, OracleError> {
        use SetDescriptor as S;
        let r = half_width * 2f64.sqrt();
        match s {
            S::Ball { center, radius } => Ok(Region2 {
                pieces: vec![Piece::Arc {
                    r: *radius,
                    from: 0.0,
                    to: TAU,
                }],
                shift: center.clone(),
                inside: Inside::Disk {
                    center: center.clone(),
                    r: *radius,
                },
            }),
            S::TruncatedCone { cone, radius } => {
                let k = Cone2::of(cone)?;
                Ok(Region2 {
                    pieces: k.pieces(*radius, true),
                    shift: Vector::zeros(2),
                    inside: match k {
                        Cone2::Zero | Cone2::Ray(_) | Cone2::Line(_) => Inside::Nothing,
                        _ => Inside::CappedCone(k, *radius),
                    },
                })
            }
            _ => {
                let k = Cone2::of(s)?;
                Ok(Region2 {
                    pieces: k.pieces(r, false),
                    shift: Vector::zeros(2),
                    inside: match k {
                        Cone2::Zero | Cone2::Ray(_) | Cone2::Line(_) => Inside::Nothing,
                        _ => Inside::Cone(k),
                    },
                })
            }
        }
    }

    fn contains(&self, x: &Vector) -> bool {
        match &self.inside {
            Inside::Nothing => false,
            Inside::Disk { center, r } => (x - center).norm() <= *r,
            Inside::Cone(k) => k.contains(x),
            Inside::CappedCone(k, r) => k.contains(x) && x.norm() <= *r,
        }
    }

    fn search(&self, x: &Vector, resolution: f64) -> Vector {
        if self.contains(x) {
            return x.clone();
        }
        let local = x - &self.shift;
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for p in &self.pieces {
            let y = p.search(&local, resolution);
            let d = (&y - &local).norm_sq();
            if d < best_d {
                best_d = d;
                best = Some(y);
            }
        }
        &best.unwrap_or_else(|| local.clone()) + &self.shift
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FwStep {
    /// γ_k = 2 / (k + 2)
    OpenLoop,
    /// Away steps with exact line search.
    AwayLineSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FwResult {
    pub point: Vector,
    /// Frank-Wolfe duality gap at `point`; ||point - P x||² <= 2·gap.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// ½||y_k - x||² per iteration.
    pub objective: Vec<f64>,
}

/// Minimizes ½||y - x||² over conv(vertices).
pub fn frank_wolfe(vertices: &[Vector], x: &Vector, step: FwStep, max_iter: usize) -> FwResult {
    let m = vertices.len();
    let diam_sq = vertices
        .iter()
        .flat_map(|a| vertices.iter().map(move |b| a.dist(b)))
        .fold(0.0_f64, f64::max)
        .powi(2)
        .max(1.0);
    // ||y - y*||² <= 2 gap, so 1e-6 accuracy needs gap below 5e-13
    let gap_tol = 1e-13 * diam_sq;
    let start = (0..m)
        .min_by(|&a, &b| vertices[a].dist(x).total_cmp(&vertices[b].dist(x)))
        .unwrap_or(0);
    let mut w = vec![0.0; m];
    w[start] = 1.0;
    let combine = |w: &[f64]| {
        let mut y = Vector::zeros(x.dim());
        for (wi, v) in w.iter().zip(vertices) {
            if *wi != 0.0 {
                y.axpy(*wi, v);
            }
        }
        y
    };
    let mut y = combine(&w);
    let mut objective = Vec::new();
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for k in 0..max_iter {
        iterations = k + 1;
        let g = &y - x;
        objective.push(0.5 * g.norm_sq());
        let lin: Vec<f64> = vertices.iter().map(|v| g.dot(v)).collect();
        let s = (0..m).min_by(|&a, &b| lin[a].total_cmp(&lin[b])).unwrap();
        let gy = g.dot(&y);
        gap = gy - lin[s];
        if gap <= gap_tol {
            break;
        }
        match step {
            FwStep::OpenLoop => {
                let gamma = 2.0 / (k as f64 + 2.0);
                w.iter_mut().for_each(|wi| *wi *= 1.0 - gamma);
                w[s] += gamma;
            }
            FwStep::AwayLineSearch => {
                let a = (0..m)
                    .filter(|&i| w[i] > 0.0)
                    .max_by(|&p, &q| lin[p].total_cmp(&lin[q]))
                    .unwrap();
                let away_gap = lin[a] - gy;
                if gap >= away_gap {
                    let d = &vertices[s] - &y;
                    let gamma = (-g.dot(&d) / d.norm_sq()).clamp(0.0, 1.0);
                    w.iter_mut().for_each(|wi| *wi *= 1.0 - gamma);
                    w[s] += gamma;
                } else {
                    let d = &y - &vertices[a];
                    let max = w[a] / (1.0 - w[a]);
                    let gamma = (-g.dot(&d) / d.norm_sq()).clamp(0.0, max);
                    w.iter_mut().for_each(|wi| *wi *= 1.0 + gamma);
                    w[a] -= gamma;
                    if gamma == max {
                        w[a] = 0.0;
                    }
                }
            }
        }
        y = combine(&w);
    }
    FwResult {
        point: y,
        gap,
        iterations,
        converged: gap <= gap_tol,
        objective,
    }
}

/// Dykstra's alternating projections onto the intersection of `sets`.
pub fn dykstra(sets: &[SetDescriptor], x: &Vector, max_iter: usize) -> Result<Vector, OracleError> {
    let mut y = x.clone();
    let mut incr = vec![Vector::zeros(x.dim()); sets.len()];
    for _ in 0..max_iter {
        let prev = y.clone();
        for (s, p) in sets.iter().zip(incr.iter_mut()) {
            let z = &y + p;
            y = s.project(&z)?;
            *p = &z - &y;
        }
        if (&y - &prev).norm() <= 1e-14 * (1.0 + x.norm()) {
            return Ok(y);
        }
    }
    Err(OracleError::DidNotConverge(format!(
        "dykstra after {max_iter} sweeps"
    )))
}

/// Whether `y` is feasible for every set, up to the iterative tolerance.
pub fn feasible(sets: &[SetDescriptor], y: &Vector) -> Result<bool, SetError> {
    for s in sets {
        if !s.membership(y, tol::ITERATIVE)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v<const N: usize>(a: [f64; N]) -> Vector {
        Vector::from(a)
    }

    #[test]
    fn unit_square_corner() {
        let b = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let p = oracle_project(&b, &v([2.0, 2.0]), 1e-3).unwrap();
        assert!((&p - &v([1.0, 1.0])).norm() <= 1e-3);
    }

    #[test]
    fn truncated_ray() {
        let t = SetDescriptor::truncated(SetDescriptor::ray([1.0, 0.0]).unwrap(), 1.0).unwrap();
        let p = oracle_project(&t, &v([3.0, -2.0]), 1e-3).unwrap();
        assert!((&p - &v([1.0, 0.0])).norm() <= 1e-3);
    }

    #[test]
    fn truncated_ray_closed_form_agrees_on_grid() {
        // brute force over an explicit 2-D grid of K ∩ B(0,1)
        let x = v([3.0, -2.0]);
        let h = 1e-3;
        let mut best = (f64::INFINITY, v([0.0, 0.0]));
        for i in 0..=1000 {
            for j in -50..=50 {
                let y = v([i as f64 * h, j as f64 * h]);
                let inside = y[1] == 0.0 && y[0] >= 0.0 && y.norm() <= 1.0;
                if inside && (&y - &x).norm() < best.0 {
                    best = ((&y - &x).norm(), y);
                }
            }
        }
        assert_eq!(best.1, v([1.0, 0.0]));
    }

    #[test]
    fn triangle_frank_wolfe() {
        let verts = vec![v([0.0, 0.0]), v([1.0, 0.0]), v([0.0, 1.0])];
        let r = frank_wolfe(&verts, &v([1.0, 1.0]), FwStep::AwayLineSearch, FW_MAX_ITER);
        assert!(r.converged);
        assert!((&r.point - &v([0.5, 0.5])).norm() <= 1e-6);
        assert!(r.objective.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn open_loop_rule_descends_but_is_slow() {
        let verts = vec![v([0.0, 0.0]), v([1.0, 0.0]), v([0.0, 1.0])];
        let r = frank_wolfe(&verts, &v([1.0, 1.0]), FwStep::OpenLoop, FW_MAX_ITER);
        assert!((&r.point - &v([0.5, 0.5])).norm() <= 1e-3);
        assert!(r.objective.last().unwrap() <= &r.objective[0]);
    }

    #[test]
    fn cone2_classification() {
        let c = Cone2::from_angles(vec![0.0, PI, PI / 2.0]);
        assert!(matches!(c, Cone2::HalfPlane(p) if (p - 1.5 * PI).abs() < 1e-12));
        assert!(matches!(Cone2::from_angles(vec![0.0, PI]), Cone2::Line(_)));
        assert!(matches!(Cone2::from_angles(vec![0.0, 2.0, 4.0]), Cone2::Plane));
        let q = Cone2::Sector(0.0, PI / 2.0).polar();
        assert!(matches!(q, Cone2::Sector(a, w) if (a - PI).abs() < 1e-12 && (w - PI / 2.0).abs() < 1e-12));
        let l = Cone2::HalfPlane(0.0).intersect(&Cone2::HalfPlane(PI)).unwrap();
        assert!(matches!(l, Cone2::Line(_)));
        let r = Cone2::Ray(0.0).intersect(&Cone2::Ray(PI / 2.0)).unwrap();
        assert_eq!(r, Cone2::Zero);
    }

    #[test]
    fn dykstra_third_quadrant() {
        let k1 = SetDescriptor::halfspace([1.0, 0.0], 0.0).unwrap();
        let k2 = SetDescriptor::halfspace([0.0, 1.0], 0.0).unwrap();
        let p = dykstra(&[k1, k2], &v([1.0, -2.0]), 10_000).unwrap();
        assert!((&p - &v([0.0, -2.0])).norm() < 1e-12);
    }
}
