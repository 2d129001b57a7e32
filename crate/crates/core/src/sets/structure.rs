//! Structural queries used by the decision engine.

use serde::{Deserialize, Serialize};

use super::project::{pairwise_generators, unit_generators};
use super::{SetDescriptor, SetError};
use crate::linalg;
use crate::tol;
use crate::vector::Vector;

/// Closed interval of the real line; endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SetError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(SetError::InvalidDescriptor(format!("interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(a: f64) -> Self {
        Interval { lo: a, hi: a }
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, a: f64) -> bool {
        self.lo <= a && a <= self.hi
    }

    pub fn project(&self, a: f64) -> f64 {
        a.max(self.lo).min(self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn sum(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// Polar of a cone interval: the sign pattern flips.
    pub fn polar(&self) -> Interval {
        Interval {
            lo: if self.lo < 0.0 { 0.0 } else { f64::NEG_INFINITY },
            hi: if self.hi > 0.0 { 0.0 } else { f64::INFINITY },
        }
    }

    pub fn to_set(&self) -> SetDescriptor {
        if self.is_singleton() {
            SetDescriptor::Singleton {
                u: Vector::from([self.lo]),
            }
        } else {
            SetDescriptor::Box {
                lower: vec![self.lo],
                upper: vec![self.hi],
            }
        }
    }
}

fn parallel_coefficient(d: &Vector, a: &Vector) -> Option<f64> {
    let t = d.dot(a) / a.norm_sq();
    let mut r = d.clone();
    r.axpy(-t, a);
    (r.norm() <= tol::EXACT * d.norm().max(1.0)).then_some(t)
}

impl SetDescriptor {
    /// Orthonormal basis of span(S - S), when known in closed form.
    pub fn direction_space(&self) -> Option<Vec<Vector>> {
        use SetDescriptor as S;
        let n = self.dim();
        Some(match self {
            S::Singleton { .. } => Vec::new(),
            S::Ball { .. } | S::Halfspace { .. } => Self::whole_space_basis(n),
            S::Box { lower, upper } => (0..n)
                .filter(|&i| lower[i] < upper[i])
                .map(|i| Vector::basis(n, i))
                .collect(),
            S::Hyperplane { normal, .. } => linalg::complement(std::slice::from_ref(normal), n),
            S::Subspace { basis } => basis.clone(),
            S::Ray { direction } => linalg::orthonormalize(std::slice::from_ref(direction)),
            S::FinitelyGeneratedCone { generators } => linalg::orthonormalize(generators),
            S::PolarCone { of } => linalg::complement(&of.lineality()?, n),
            S::TruncatedCone { cone, .. } => cone.direction_space()?,
            S::Translate { base, .. } => base.direction_space()?,
            S::MinkowskiSum(sum) => {
                let mut all = Vec::new();
                for p in sum.parts() {
                    all.extend(p.direction_space()?);
                }
                linalg::orthonormalize(&all)
            }
            S::Polytope { vertices } => {
                let diffs: Vec<Vector> = vertices.iter().map(|v| v - &vertices[0]).collect();
                linalg::orthonormalize(&diffs)
            }
            S::ConeIntersection(_) => return None,
        })
    }

    fn whole_space_basis(n: usize) -> Vec<Vector> {
        (0..n).map(|i| Vector::basis(n, i)).collect()
    }

    /// Orthonormal basis of K ∩ -K for cones.
    pub fn lineality(&self) -> Option<Vec<Vector>> {
        use SetDescriptor as S;
        let n = self.dim();
        if !self.is_cone() {
            return None;
        }
        Some(match self {
            S::Singleton { .. } | S::Ray { .. } => Vec::new(),
            S::Box { lower, upper } => (0..n)
                .filter(|&i| lower[i] == f64::NEG_INFINITY && upper[i] == f64::INFINITY)
                .map(|i| Vector::basis(n, i))
                .collect(),
            S::Hyperplane { normal, .. } | S::Halfspace { normal, .. } => {
                linalg::complement(std::slice::from_ref(normal), n)
            }
            S::Subspace { basis } => basis.clone(),
            S::FinitelyGeneratedCone { generators } => {
                let units = pairwise_generators(generators).ok()?;
                let lines: Vec<Vector> = units
                    .iter()
                    .filter(|u| units.iter().any(|v| (*u + v).norm() <= tol::PAIRWISE))
                    .cloned()
                    .collect();
                linalg::orthonormalize(&lines)
            }
            S::PolarCone { of } => linalg::complement(&of.direction_space()?, n),
            S::Translate { base, .. } => base.lineality()?,
            _ => return None,
        })
    }

    /// Orthonormal basis of span(S).
    pub fn linear_span(&self) -> Option<Vec<Vector>> {
        let mut vs = self.direction_space()?;
        vs.push(self.project(&Vector::zeros(self.dim())).ok()?);
        Some(linalg::orthonormalize(&vs))
    }

    /// Point and direction space for affine sets.
    pub fn affine_form(&self) -> Option<(Vector, Vec<Vector>)> {
        use SetDescriptor as S;
        let n = self.dim();
        match self {
            S::Singleton { u } => Some((u.clone(), Vec::new())),
            S::Subspace { basis } => Some((Vector::zeros(n), basis.clone())),
            S::Hyperplane { normal, offset } => Some((
                normal.scale(offset / normal.norm_sq()),
                linalg::complement(std::slice::from_ref(normal), n),
            )),
            S::Translate { base, shift } => {
                let (p, d) = base.affine_form()?;
                Some((&p + shift, d))
            }
            _ => None,
        }
    }

    /// Support function σ_S(d) = sup_{s ∈ S} <d, s>; `None` when unknown.
    pub fn support(&self, d: &Vector) -> Option<f64> {
        use SetDescriptor as S;
        if d.is_zero() {
            return Some(0.0);
        }
        let inf = f64::INFINITY;
        Some(match self {
            S::Singleton { u } => d.dot(u),
            S::Ball { center, radius } => d.dot(center) + radius * d.norm(),
            S::Box { lower, upper } => {
                let mut s = 0.0;
                for i in 0..d.dim() {
                    s += if d[i] > 0.0 {
                        d[i] * upper[i]
                    } else if d[i] < 0.0 {
                        d[i] * lower[i]
                    } else {
                        0.0
                    };
                }
                s
            }
            S::Hyperplane { normal, offset } => match parallel_coefficient(d, normal) {
                Some(t) => t * offset,
                None => inf,
            },
            S::Halfspace { normal, offset } => match parallel_coefficient(d, normal) {
                Some(t) if t >= 0.0 => t * offset,
                _ => inf,
            },
            S::TruncatedCone { cone, radius } => radius * cone.project(d).ok()?.norm(),
            S::Translate { base, shift } => base.support(d)? + d.dot(shift),
            S::MinkowskiSum(sum) => {
                let mut s = 0.0;
                for p in sum.parts() {
                    s += p.support(d)?;
                }
                s
            }
            S::Polytope { vertices } => vertices.iter().map(|v| d.dot(v)).fold(f64::NEG_INFINITY, f64::max),
            _ if self.is_cone() => {
                let pk = self.project(d).ok()?;
                if pk.norm() <= tol::EXACT * d.norm() {
                    0.0
                } else {
                    inf
                }
            }
            _ => return None,
        })
    }

    /// Generators g_i with K = cone{g_i}, for cones that admit a finite list.
    pub fn cone_generators(&self) -> Option<Vec<Vector>> {
        use SetDescriptor as S;
        if !self.is_cone() {
            return None;
        }
        let n = self.dim();
        let pm = |basis: Vec<Vector>| -> Vec<Vector> {
            basis.into_iter().flat_map(|b| [b.clone(), -b]).collect()
        };
        Some(match self {
            S::Singleton { .. } => Vec::new(),
            S::Box { lower, upper } => {
                let mut g = Vec::new();
                for i in 0..n {
                    if upper[i] == f64::INFINITY {
                        g.push(Vector::basis(n, i));
                    }
                    if lower[i] == f64::NEG_INFINITY {
                        g.push(-Vector::basis(n, i));
                    }
                }
                g
            }
            S::Hyperplane { normal, .. } => pm(linalg::complement(std::slice::from_ref(normal), n)),
            S::Halfspace { normal, .. } => {
                let mut g = pm(linalg::complement(std::slice::from_ref(normal), n));
                g.push(-normal.normalized()?);
                g
            }
            S::Subspace { basis } => pm(basis.clone()),
            S::Ray { direction } => vec![direction.normalized()?],
            S::FinitelyGeneratedCone { generators } => unit_generators(generators),
            S::PolarCone { of } => of.polar_generators()?,
            S::Translate { base, .. } => base.cone_generators()?,
            S::MinkowskiSum(sum) => {
                let mut g = Vec::new();
                for p in sum.parts() {
                    g.extend(p.cone_generators()?);
                }
                g
            }
            S::ConeIntersection(_) | S::Ball { .. } | S::TruncatedCone { .. } | S::Polytope { .. } => {
                return None
            }
        })
    }

    /// Generators of the polar cone, when available in closed form.
    pub fn polar_generators(&self) -> Option<Vec<Vector>> {
        use SetDescriptor as S;
        if !self.is_cone() {
            return None;
        }
        let n = self.dim();
        let pm = |basis: Vec<Vector>| -> Vec<Vector> {
            basis.into_iter().flat_map(|b| [b.clone(), -b]).collect()
        };
        Some(match self {
            S::Singleton { .. } => pm(Self::whole_space_basis(n)),
            S::Box { lower, upper } => {
                let mut g = Vec::new();
                for i in 0..n {
                    let e = Vector::basis(n, i);
                    if lower[i] == 0.0 {
                        g.push(-&e);
                    }
                    if upper[i] == 0.0 {
                        g.push(e);
                    }
                }
                g
            }
            S::Hyperplane { normal, .. } => pm(vec![normal.normalized()?]),
            S::Halfspace { normal, .. } => vec![normal.normalized()?],
            S::Subspace { basis } => pm(linalg::complement(basis, n)),
            S::Ray { direction } => {
                let u = direction.normalized()?;
                let mut g = pm(linalg::complement(std::slice::from_ref(&u), n));
                g.push(-u);
                g
            }
            S::FinitelyGeneratedCone { generators } => {
                let units = pairwise_generators(generators).ok()?;
                let mut g = pm(linalg::complement(&units, n));
                for u in &units {
                    if !units.iter().any(|v| (u + v).norm() <= tol::PAIRWISE) {
                        g.push(-u);
                    }
                }
                g
            }
            S::PolarCone { of } => of.cone_generators()?,
            S::Translate { base, .. } => base.polar_generators()?,
            _ => return None,
        })
    }

    /// The set as an interval, for descriptors in R^1.
    pub fn as_interval(&self) -> Option<Interval> {
        use SetDescriptor as S;
        if self.dim() != 1 {
            return None;
        }
        let pos = Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        };
        let neg = Interval {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
        };
        Some(match self {
            S::Singleton { u } => Interval::point(u[0]),
            S::Ball { center, radius } => Interval {
                lo: center[0] - radius,
                hi: center[0] + radius,
            },
            S::Box { lower, upper } => Interval {
                lo: lower[0],
                hi: upper[0],
            },
            S::Hyperplane { normal, offset } => Interval::point(offset / normal[0]),
            S::Halfspace { normal, offset } => {
                let t = offset / normal[0];
                if normal[0] > 0.0 {
                    Interval {
                        lo: f64::NEG_INFINITY,
                        hi: t,
                    }
                } else {
                    Interval {
                        lo: t,
                        hi: f64::INFINITY,
                    }
                }
            }
            S::Subspace { .. } => Interval::real_line(),
            S::Ray { direction } => {
                if direction[0] > 0.0 {
                    pos
                } else {
                    neg
                }
            }
            S::FinitelyGeneratedCone { generators } => {
                let up = generators.iter().any(|g| g[0] > 0.0);
                let down = generators.iter().any(|g| g[0] < 0.0);
                Interval {
                    lo: if down { f64::NEG_INFINITY } else { 0.0 },
                    hi: if up { f64::INFINITY } else { 0.0 },
                }
            }
            S::PolarCone { of } => of.as_interval()?.polar(),
            S::TruncatedCone { cone, radius } => cone.as_interval()?.intersect(&Interval {
                lo: -radius,
                hi: *radius,
            })?,
            S::Translate { base, shift } => base.as_interval()?.sum(&Interval::point(shift[0])),
            S::MinkowskiSum(sum) => {
                let mut acc = Interval::point(0.0);
                for p in sum.parts() {
                    acc = acc.sum(&p.as_interval()?);
                }
                acc
            }
            S::Polytope { vertices } => Interval {
                lo: vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min),
                hi: vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max),
            },
            S::ConeIntersection(ci) => ci.k1().as_interval()?.intersect(&ci.k2().as_interval()?)?,
        })
    }
}
