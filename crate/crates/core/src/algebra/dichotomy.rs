//! Pairs of intervals in R.

use super::{AlgebraError, Certificate, Combination, Condition, Method, Verdict, Witness};
use crate::certifier::SampleConfig;
use crate::sets::{Interval, SetDescriptor, SetError};
use crate::vector::Vector;

/// P_C + P_D on R is a projector iff both sets are singletons, or neither
/// is and C ∩ D = {0}; it is also one when either set is {0}.
pub fn decide_1d_pair(c: Interval, d: Interval) -> Certificate {
    let cfg = SampleConfig::default();
    let subject = Combination::sum_of(vec![c.to_set(), d.to_set()]).expect("intervals are valid descriptors");
    let f = |t: f64| c.project(t) * d.project(t);
    let yes = |result: Interval| Verdict::IsProjector {
        result_set: Some(result.to_set()),
        gamma: Some(f(0.0)),
    };
    let zero = Interval::point(0.0);
    let verdict = if c.is_singleton() && d.is_singleton() || c == zero || d == zero {
        yes(c.sum(&d))
    } else if !c.is_singleton() && !d.is_singleton() && c.intersect(&d) == Some(zero) {
        yes(c.sum(&d))
    } else {
        constancy_witness(&c, &d, &cfg)
    };
    Certificate::exact(subject, Method::Dichotomy1d, &cfg, verdict)
}

/// Two points where ξ ↦ P_C ξ · P_D ξ differs.
fn constancy_witness(c: &Interval, d: &Interval, cfg: &SampleConfig) -> Verdict {
    let mut cands = vec![0.0];
    let mut m: f64 = 0.0;
    for iv in [c, d] {
        for e in [iv.lo, iv.hi] {
            if e.is_finite() {
                cands.push(e);
                m = m.max(e.abs());
            }
        }
        if iv.lo.is_finite() && iv.hi.is_finite() {
            cands.push(0.5 * (iv.lo + iv.hi));
        }
    }
    for (a, b) in [(c.hi, d.lo), (d.hi, c.lo)] {
        if a.is_finite() && b.is_finite() {
            cands.push(0.5 * (a + b));
        }
    }
    if let Some(i) = c.intersect(d) {
        if i.lo.is_finite() && i.hi.is_finite() {
            cands.push(0.5 * (i.lo + i.hi));
        }
    }
    for s in [1.0, -1.0, 10.0, -10.0] {
        cands.push(s * (m + 1.0));
    }
    let f = |t: f64| c.project(t) * d.project(t);
    let (mut lo, mut hi) = (cands[0], cands[0]);
    for &t in &cands {
        if f(t) < f(lo) {
            lo = t;
        }
        if f(t) > f(hi) {
            hi = t;
        }
    }
    let tolerance = cfg.tolerance(f(hi).abs().max(f(lo).abs()));
    if f(hi) - f(lo) > 10.0 * tolerance {
        Verdict::NotProjector {
            witness: Witness::Constancy {
                condition: Condition::Criterion,
                x: Vector::from([hi]),
                y: Vector::from([lo]),
                value_x: f(hi),
                value_y: f(lo),
                tolerance,
            },
        }
    } else {
        Verdict::Inconclusive {
            diagnostics: "no candidate point separates the values of P_C ξ · P_D ξ".into(),
        }
    }
}

/// `decide_1d_pair` for descriptors, which must live in R.
pub fn decide_1d_sets(c: &SetDescriptor, d: &SetDescriptor) -> Result<Certificate, AlgebraError> {
    for s in [c, d] {
        if s.dim() != 1 {
            return Err(AlgebraError::WrongDimension {
                expected: 1,
                found: s.dim(),
            });
        }
    }
    let as_iv = |s: &SetDescriptor| {
        s.as_interval()
            .ok_or_else(|| SetError::NotSupported(format!("{} has no interval form", s.label())))
    };
    let mut cert = decide_1d_pair(as_iv(c)?, as_iv(d)?);
    cert.subject = Combination::sum_of(vec![c.clone(), d.clone()])?;
    Ok(cert)
}
