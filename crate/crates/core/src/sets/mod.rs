//! Catalog of closed convex sets with exact projections.

mod difference;
pub(crate) mod project;
mod structure;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::tol;
use crate::vector::Vector;

pub use difference::{diff_project, set_difference_witness};
pub use structure::Interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no exact projection available: {0}")]
    UnsupportedExactProjection(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("not supported: {0}")]
    NotSupported(String),
}

/// A closed convex subset of R^n.
///
/// `MinkowskiSum` and `ConeIntersection` carry sealed payloads: they are
/// produced by the decision procedures in [`crate::algebra`] once the
/// corresponding projector identity has been established, and they are
/// rejected when read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetDescriptor {
    Singleton {
        u: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    Box {
        #[serde(with = "bounds")]
        lower: Vec<f64>,
        #[serde(with = "bounds")]
        upper: Vec<f64>,
    },
    /// {x : <normal, x> = offset}
    Hyperplane {
        normal: Vector,
        offset: f64,
    },
    /// {x : <normal, x> <= offset}
    Halfspace {
        normal: Vector,
        offset: f64,
    },
    Subspace {
        basis: Vec<Vector>,
    },
    Ray {
        direction: Vector,
    },
    FinitelyGeneratedCone {
        generators: Vec<Vector>,
    },
    PolarCone {
        of: Box<SetDescriptor>,
    },
    /// K ∩ B(0, radius)
    TruncatedCone {
        cone: Box<SetDescriptor>,
        radius: f64,
    },
    Translate {
        base: Box<SetDescriptor>,
        shift: Vector,
    },
    MinkowskiSum(CertifiedSum),
    Polytope {
        vertices: Vec<Vector>,
    },
    ConeIntersection(CertifiedIntersection),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedSum {
    parts: Vec<SetDescriptor>,
}

impl CertifiedSum {
    pub fn parts(&self) -> &[SetDescriptor] {
        &self.parts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedIntersection {
    k1: Box<SetDescriptor>,
    k2: Box<SetDescriptor>,
}

impl CertifiedIntersection {
    pub fn k1(&self) -> &SetDescriptor {
        &self.k1
    }
    pub fn k2(&self) -> &SetDescriptor {
        &self.k2
    }
}

impl<'de> Deserialize<'de> for CertifiedSum {
    fn deserialize<D: Deserializer<'de>>(_: D) -> Result<Self, D::Error> {
        Err(serde::de::Error::custom(
            "minkowski_sum is constructible only through a certifying decision",
        ))
    }
}

impl<'de> Deserialize<'de> for CertifiedIntersection {
    fn deserialize<D: Deserializer<'de>>(_: D) -> Result<Self, D::Error> {
        Err(serde::de::Error::custom(
            "cone_intersection is constructible only through a certifying decision",
        ))
    }
}

mod bounds {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Bound {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&a| {
            if a == f64::INFINITY {
                Bound::Str("inf".into())
            } else if a == f64::NEG_INFINITY {
                Bound::Str("-inf".into())
            } else {
                Bound::Num(a)
            }
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw: Vec<Bound> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                Bound::Num(a) => Ok(a),
                Bound::Str(s) => match s.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(serde::de::Error::custom(format!("bad bound {other:?}"))),
                },
            })
            .collect()
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, SetError> {
    Err(SetError::InvalidDescriptor(msg.into()))
}

fn check_vec(v: &Vector, what: &str) -> Result<(), SetError> {
    if v.dim() == 0 {
        return invalid(format!("{what}: empty vector"));
    }
    if !v.is_finite() {
        return invalid(format!("{what}: non-finite entry"));
    }
    Ok(())
}

fn check_same_dim(n: usize, v: &Vector) -> Result<(), SetError> {
    if v.dim() != n {
        return Err(SetError::DimensionMismatch {
            expected: n,
            found: v.dim(),
        });
    }
    Ok(())
}

impl SetDescriptor {
    pub fn singleton(u: impl Into<Vector>) -> Result<Self, SetError> {
        SetDescriptor::Singleton { u: u.into() }.validated()
    }

    pub fn ball(center: impl Into<Vector>, radius: f64) -> Result<Self, SetError> {
        SetDescriptor::Ball {
            center: center.into(),
            radius,
        }
        .validated()
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SetError> {
        SetDescriptor::Box { lower, upper }.validated()
    }

    /// Closed interval [lo, hi] in R^1.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, SetError> {
        Self::boxed(vec![lo], vec![hi])
    }

    pub fn hyperplane(normal: impl Into<Vector>, offset: f64) -> Result<Self, SetError> {
        SetDescriptor::Hyperplane {
            normal: normal.into(),
            offset,
        }
        .validated()
    }

    pub fn halfspace(normal: impl Into<Vector>, offset: f64) -> Result<Self, SetError> {
        SetDescriptor::Halfspace {
            normal: normal.into(),
            offset,
        }
        .validated()
    }

    /// Subspace with an already orthonormal basis.
    pub fn subspace(basis: Vec<Vector>) -> Result<Self, SetError> {
        SetDescriptor::Subspace { basis }.validated()
    }

    /// Subspace spanned by arbitrary vectors in R^n. The zero subspace
    /// comes back as `Singleton{0}`.
    pub fn span(vectors: &[Vector], n: usize) -> Result<Self, SetError> {
        for v in vectors {
            check_same_dim(n, v)?;
        }
        let basis = linalg::orthonormalize(vectors);
        if basis.is_empty() {
            return Self::singleton(Vector::zeros(n));
        }
        Self::subspace(basis)
    }

    pub fn whole_space(n: usize) -> Self {
        SetDescriptor::Subspace {
            basis: (0..n).map(|i| Vector::basis(n, i)).collect(),
        }
    }

    pub fn ray(direction: impl Into<Vector>) -> Result<Self, SetError> {
        SetDescriptor::Ray {
            direction: direction.into(),
        }
        .validated()
    }

    pub fn generated_cone(generators: Vec<Vector>) -> Result<Self, SetError> {
        SetDescriptor::FinitelyGeneratedCone { generators }.validated()
    }

    pub fn polar(of: SetDescriptor) -> Result<Self, SetError> {
        SetDescriptor::PolarCone { of: Box::new(of) }.validated()
    }

    pub fn truncated(cone: SetDescriptor, radius: f64) -> Result<Self, SetError> {
        SetDescriptor::TruncatedCone {
            cone: Box::new(cone),
            radius,
        }
        .validated()
    }

    pub fn translate(base: SetDescriptor, shift: impl Into<Vector>) -> Result<Self, SetError> {
        SetDescriptor::Translate {
            base: Box::new(base),
            shift: shift.into(),
        }
        .validated()
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Self, SetError> {
        SetDescriptor::Polytope { vertices }.validated()
    }

    /// Crate-internal: only certifying decisions build sums.
    pub(crate) fn certified_sum(parts: Vec<SetDescriptor>) -> Self {
        debug_assert!(!parts.is_empty());
        SetDescriptor::MinkowskiSum(CertifiedSum { parts })
    }

    /// Crate-internal: only certifying decisions build cone intersections.
    pub(crate) fn certified_intersection(k1: SetDescriptor, k2: SetDescriptor) -> Self {
        SetDescriptor::ConeIntersection(CertifiedIntersection {
            k1: Box::new(k1),
            k2: Box::new(k2),
        })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        use SetDescriptor as S;
        match self {
            S::Singleton { u } => u.dim(),
            S::Ball { center, .. } => center.dim(),
            S::Box { lower, .. } => lower.len(),
            S::Hyperplane { normal, .. } | S::Halfspace { normal, .. } => normal.dim(),
            S::Subspace { basis } => basis.first().map_or(0, Vector::dim),
            S::Ray { direction } => direction.dim(),
            S::FinitelyGeneratedCone { generators } => generators.first().map_or(0, Vector::dim),
            S::PolarCone { of } => of.dim(),
            S::TruncatedCone { cone, .. } => cone.dim(),
            S::Translate { shift, .. } => shift.dim(),
            S::MinkowskiSum(s) => s.parts.first().map_or(0, SetDescriptor::dim),
            S::Polytope { vertices } => vertices.first().map_or(0, Vector::dim),
            S::ConeIntersection(c) => c.k1.dim(),
        }
    }

    /// Checks invariants and returns the normalized descriptor: ray
    /// directions become unit vectors, zero-radius balls and degenerate
    /// boxes become singletons.
    pub fn validated(self) -> Result<Self, SetError> {
        use SetDescriptor as S;
        Ok(match self {
            S::Singleton { u } => {
                check_vec(&u, "singleton")?;
                S::Singleton { u }
            }
            S::Ball { center, radius } => {
                check_vec(&center, "ball center")?;
                if !radius.is_finite() || radius < 0.0 {
                    return invalid(format!("ball radius {radius}"));
                }
                if radius == 0.0 {
                    S::Singleton { u: center }
                } else {
                    S::Ball { center, radius }
                }
            }
            S::Box { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return invalid("box bounds must be nonempty and of equal length");
                }
                for (&l, &u) in lower.iter().zip(&upper) {
                    if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                        return invalid("box bound is NaN or points the wrong way");
                    }
                    if l > u {
                        return invalid(format!("box lower {l} exceeds upper {u}"));
                    }
                }
                if lower.iter().zip(&upper).all(|(l, u)| l == u) {
                    S::Singleton {
                        u: Vector::new(lower),
                    }
                } else {
                    S::Box { lower, upper }
                }
            }
            S::Hyperplane { normal, offset } | S::Halfspace { normal, offset }
                if normal.is_zero() || !offset.is_finite() =>
            {
                let _ = (normal, offset);
                return invalid("normal must be nonzero and offset finite");
            }
            S::Hyperplane { normal, offset } => {
                check_vec(&normal, "hyperplane normal")?;
                S::Hyperplane { normal, offset }
            }
            S::Halfspace { normal, offset } => {
                check_vec(&normal, "halfspace normal")?;
                S::Halfspace { normal, offset }
            }
            S::Subspace { basis } => {
                let Some(first) = basis.first() else {
                    return invalid("subspace basis is empty; use Singleton{0}");
                };
                let n = first.dim();
                for b in &basis {
                    check_vec(b, "subspace basis")?;
                    check_same_dim(n, b)?;
                }
                if basis.len() > n {
                    return invalid("more basis vectors than dimensions");
                }
                let defect = linalg::orthonormality_defect(&basis);
                if defect > tol::ORTHONORMAL {
                    return invalid(format!("basis not orthonormal (defect {defect:e})"));
                }
                S::Subspace { basis }
            }
            S::Ray { direction } => {
                check_vec(&direction, "ray direction")?;
                match direction.normalized() {
                    Some(d) => S::Ray { direction: d },
                    None => return invalid("ray direction is zero"),
                }
            }
            S::FinitelyGeneratedCone { generators } => {
                let Some(first) = generators.first() else {
                    return invalid("cone needs at least one generator");
                };
                let n = first.dim();
                for g in &generators {
                    check_vec(g, "generator")?;
                    check_same_dim(n, g)?;
                    if g.is_zero() {
                        return invalid("zero generator");
                    }
                }
                S::FinitelyGeneratedCone { generators }
            }
            S::PolarCone { of } => {
                let of = of.validated()?;
                if !of.is_cone() {
                    return invalid("polar of a non-cone");
                }
                S::PolarCone { of: Box::new(of) }
            }
            S::TruncatedCone { cone, radius } => {
                let cone = cone.validated()?;
                if !cone.is_cone() {
                    return invalid("truncation of a non-cone");
                }
                if !radius.is_finite() || radius < 0.0 {
                    return invalid(format!("truncation radius {radius}"));
                }
                if radius == 0.0 {
                    S::Singleton {
                        u: Vector::zeros(cone.dim()),
                    }
                } else {
                    S::TruncatedCone {
                        cone: Box::new(cone),
                        radius,
                    }
                }
            }
            S::Translate { base, shift } => {
                let base = base.validated()?;
                check_vec(&shift, "shift")?;
                check_same_dim(base.dim(), &shift)?;
                S::Translate {
                    base: Box::new(base),
                    shift,
                }
            }
            S::Polytope { vertices } => {
                let Some(first) = vertices.first() else {
                    return invalid("polytope needs a vertex");
                };
                let n = first.dim();
                for v in &vertices {
                    check_vec(v, "vertex")?;
                    check_same_dim(n, v)?;
                }
                if vertices.iter().all(|v| v == first) {
                    S::Singleton { u: first.clone() }
                } else {
                    S::Polytope { vertices }
                }
            }
            s @ (S::MinkowskiSum(_) | S::ConeIntersection(_)) => s,
        })
    }

    /// Whether the descriptor is syntactically a closed convex cone.
    pub fn is_cone(&self) -> bool {
        use SetDescriptor as S;
        match self {
            S::Singleton { u } => u.is_zero(),
            S::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .all(|(&l, &u)| (l == 0.0 || l == f64::NEG_INFINITY) && (u == 0.0 || u == f64::INFINITY)),
            S::Hyperplane { offset, .. } | S::Halfspace { offset, .. } => *offset == 0.0,
            S::Subspace { .. }
            | S::Ray { .. }
            | S::FinitelyGeneratedCone { .. }
            | S::PolarCone { .. }
            | S::ConeIntersection(_) => true,
            S::MinkowskiSum(s) => s.parts.iter().all(SetDescriptor::is_cone),
            S::Translate { base, shift } => shift.is_zero() && base.is_cone(),
            S::Ball { .. } | S::TruncatedCone { .. } | S::Polytope { .. } => false,
        }
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, SetDescriptor::Singleton { .. })
    }

    pub fn is_bounded(&self) -> bool {
        use SetDescriptor as S;
        match self {
            S::Singleton { .. } | S::Ball { .. } | S::TruncatedCone { .. } | S::Polytope { .. } => true,
            S::Box { lower, upper } => lower.iter().chain(upper).all(|a| a.is_finite()),
            S::Translate { base, .. } => base.is_bounded(),
            S::MinkowskiSum(s) => s.parts.iter().all(SetDescriptor::is_bounded),
            _ => false,
        }
    }

    /// Short human label, used in certificates.
    pub fn label(&self) -> String {
        use SetDescriptor as S;
        let n = self.dim();
        match self {
            S::Singleton { .. } => "singleton".into(),
            S::Ball { .. } => "ball".into(),
            S::Box { .. } if n == 1 => "interval".into(),
            S::Box { .. } => "box".into(),
            S::Hyperplane { .. } => "hyperplane".into(),
            S::Halfspace { .. } => "halfspace".into(),
            S::Subspace { basis } if basis.len() == n => "whole-space".into(),
            S::Subspace { basis } if basis.len() == 1 => "line".into(),
            S::Subspace { basis } if basis.len() == 2 => "plane".into(),
            S::Subspace { .. } => "subspace".into(),
            S::Ray { .. } => "ray".into(),
            S::FinitelyGeneratedCone { .. } => "cone".into(),
            S::PolarCone { .. } => "polar-cone".into(),
            S::TruncatedCone { .. } => "truncated-cone".into(),
            S::Translate { base, .. } => format!("translated-{}", base.label()),
            S::MinkowskiSum(_) => "minkowski-sum".into(),
            S::Polytope { .. } => "polytope".into(),
            S::ConeIntersection(_) => "cone-intersection".into(),
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Vector) -> Result<Vector, SetError> {
        check_same_dim(self.dim(), x)?;
        if !x.is_finite() {
            return invalid("query point has non-finite entries");
        }
        project::project(self, x)
    }

    /// Squared distance from `x` to the set.
    pub fn distance_sq(&self, x: &Vector) -> Result<f64, SetError> {
        let p = self.project(x)?;
        Ok((x - &p).norm_sq())
    }

    pub fn membership(&self, x: &Vector, tol: f64) -> Result<bool, SetError> {
        Ok(self.distance_sq(x)? <= tol * tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_inputs_normalize_to_singletons() {
        let b = SetDescriptor::ball([1.0, 2.0], 0.0).unwrap();
        assert_eq!(b, SetDescriptor::Singleton { u: Vector::from([1.0, 2.0]) });
        let bx = SetDescriptor::boxed(vec![3.0, -1.0], vec![3.0, -1.0]).unwrap();
        assert!(bx.is_singleton());
    }

    #[test]
    fn ray_is_normalized() {
        let r = SetDescriptor::ray([3.0, 4.0]).unwrap();
        let SetDescriptor::Ray { direction } = r else { panic!() };
        assert!((&direction - &Vector::from([0.6, 0.8])).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_descriptors() {
        assert!(SetDescriptor::ray([0.0, 0.0]).is_err());
        assert!(SetDescriptor::ball([0.0], -1.0).is_err());
        assert!(SetDescriptor::interval(2.0, 1.0).is_err());
        assert!(SetDescriptor::subspace(vec![Vector::from([1.0, 1.0])]).is_err());
        assert!(SetDescriptor::polar(SetDescriptor::ball([0.0], 1.0).unwrap()).is_err());
        assert!(SetDescriptor::hyperplane([0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn json_uses_variant_tag_and_inf_strings() {
        let b = SetDescriptor::boxed(vec![f64::NEG_INFINITY, 0.0], vec![0.0, f64::INFINITY]).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"variant":"box","lower":["-inf",0.0],"upper":[0.0,"inf"]}"#);
        let back: SetDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn certified_variants_are_not_deserializable() {
        let r = serde_json::from_str::<SetDescriptor>(
            r#"{"variant":"minkowski_sum","parts":[{"variant":"singleton","u":[0.0]}]}"#,
        );
        assert!(r.is_err());
        let r = serde_json::from_str::<SetDescriptor>(r#"{"variant":"cone_intersection","k1":1,"k2":2}"#);
        assert!(r.is_err());
    }

    #[test]
    fn certified_sum_serializes() {
        let s = SetDescriptor::certified_sum(vec![SetDescriptor::ray([1.0, 0.0]).unwrap()]);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.starts_with(r#"{"variant":"minkowski_sum","parts":["#));
    }

    #[test]
    fn cone_flags() {
        assert!(SetDescriptor::halfspace([1.0, 0.0], 0.0).unwrap().is_cone());
        assert!(!SetDescriptor::halfspace([1.0, 0.0], 1.0).unwrap().is_cone());
        assert!(SetDescriptor::boxed(vec![0.0, f64::NEG_INFINITY], vec![f64::INFINITY, 0.0]).unwrap().is_cone());
        assert!(!SetDescriptor::interval(0.0, 1.0).unwrap().is_cone());
    }

    #[test]
    fn spec_distance_examples() {
        let ball = SetDescriptor::ball([0.0, 0.0], 1.0).unwrap();
        assert!((ball.distance_sq(&Vector::from([2.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        let s = SetDescriptor::singleton([1.0, 1.0]).unwrap();
        assert_eq!(s.distance_sq(&Vector::from([0.0, 0.0])).unwrap(), 2.0);
    }

    #[test]
    fn membership_examples() {
        let r = SetDescriptor::ray([1.0, 0.0]).unwrap();
        assert!(r.membership(&Vector::from([2.0, 0.0]), 1e-9).unwrap());
        assert!(!r.membership(&Vector::from([-1.0, 0.0]), 1e-9).unwrap());
        let p = SetDescriptor::polar(r).unwrap();
        assert!(p.membership(&Vector::from([-1.0, 5.0]), 1e-9).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = SetDescriptor::ray([1.0, 0.0]).unwrap();
        assert_eq!(
            r.project(&Vector::from([1.0])),
            Err(SetError::DimensionMismatch { expected: 2, found: 1 })
        );
    }
}
