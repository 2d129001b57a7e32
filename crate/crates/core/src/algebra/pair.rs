//! Two-set sums and the rules shared with longer combinations.

use super::sampling::{self, Band};
use super::{
    check_config, generic, same_dims, AlgebraError, Certificate, Combination, Condition, Confidence, Method,
    Verdict, Witness,
};
use crate::certifier::SampleConfig;
use crate::linalg;
use crate::sets::{Interval, SetDescriptor};
use crate::tol;
use crate::vector::Vector;

/// Decides whether P_C + P_D is a projector; if so it projects onto C + D
/// and <P_C x, P_D x> is the constant γ.
pub fn decide_pair_sum(c: &SetDescriptor, d: &SetDescriptor, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    same_dims(c, d)?;
    check_config(cfg)?;
    let c = c.clone().validated()?;
    let d = d.clone().validated()?;
    let subject = Combination::sum_of(vec![c.clone(), d.clone()])?;
    let n = c.dim();
    let yes = |method, result: SetDescriptor, gamma: f64| {
        Certificate::exact(
            subject.clone(),
            method,
            cfg,
            Verdict::IsProjector {
                result_set: Some(result),
                gamma: Some(gamma),
            },
        )
    };

    if let (SetDescriptor::Singleton { u }, SetDescriptor::Singleton { u: v }) = (&c, &d) {
        return Ok(yes(Method::SingletonPair, SetDescriptor::Singleton { u: u + v }, u.dot(v)));
    }
    for (s, t) in [(&c, &d), (&d, &c)] {
        if let SetDescriptor::Singleton { u } = s {
            if let Some(mut cert) = shift_rule(u, t, cfg)? {
                cert.subject = subject.clone();
                return Ok(cert);
            }
        }
    }

    if let (Some(sc), Some(sd)) = (c.linear_span(), d.linear_span()) {
        if linalg::spans_orthogonal(&sc, &sd, tol::EXACT) {
            let method = if matches!(c, SetDescriptor::Subspace { .. }) && matches!(d, SetDescriptor::Subspace { .. }) {
                Method::SubspaceOrthogonality
            } else {
                Method::OrthogonalSets
            };
            return Ok(yes(method, sum_result(&[c.clone(), d.clone()]), 0.0));
        }
    }
    for (s, t) in [(&c, &d), (&d, &c)] {
        if let SetDescriptor::Subspace { basis } = s {
            if support_orthogonal(t, basis) {
                return Ok(yes(Method::SubspaceOrthogonality, sum_result(&[c.clone(), d.clone()]), 0.0));
            }
        }
    }

    if is_polar_pair(&c, &d) {
        let truncated = matches!(c, SetDescriptor::TruncatedCone { .. }) || matches!(d, SetDescriptor::TruncatedCone { .. });
        let result = if truncated {
            SetDescriptor::certified_sum(vec![c.clone(), d.clone()])
        } else {
            SetDescriptor::whole_space(n)
        };
        return Ok(yes(Method::PolarPair, result, 0.0));
    }

    if c.is_cone() && d.is_cone() {
        if let (Some(gc), Some(gd)) = (c.cone_generators(), d.cone_generators()) {
            return super::cones::generator_family(subject.clone(), &[gc, gd], cfg, Method::RayLemma);
        }
        let scan = sampling::scan_criterion(&subject, cfg, &[])?;
        let cert = match scan.band() {
            Band::Constant => Certificate {
                confidence: Confidence::Sampled,
                ..yes(Method::ConePairSampled, SetDescriptor::certified_sum(vec![c.clone(), d.clone()]), 0.0)
            },
            Band::Varies => Certificate {
                confidence: Confidence::Sampled,
                ..Certificate::exact(
                    subject.clone(),
                    Method::ConePairSampled,
                    cfg,
                    Verdict::NotProjector {
                        witness: scan.constancy_witness(Condition::Criterion),
                    },
                )
            },
            Band::Ambiguous => Certificate {
                confidence: Confidence::Sampled,
                ..Certificate::exact(
                    subject.clone(),
                    Method::ConePairSampled,
                    cfg,
                    Verdict::Inconclusive {
                        diagnostics: format!("cone criterion spread {:e} is within the tolerance band", scan.spread()),
                    },
                )
            },
        };
        return Ok(cert.with_scan(&scan));
    }

    if let (Some(ic), Some(id)) = (c.as_interval(), d.as_interval()) {
        let mut cert = super::dichotomy::decide_1d_pair(ic, id);
        cert.subject = subject;
        cert.evidence.seed = cfg.seed;
        return Ok(cert);
    }

    if let (SetDescriptor::Box { lower: l1, upper: u1 }, SetDescriptor::Box { lower: l2, upper: u2 }) = (&c, &d) {
        return Ok(box_pair(&subject, (l1, u1), (l2, u2), cfg)?);
    }

    let mut cert = generic(&subject, cfg, Method::ConstancySampled)?;
    if let Verdict::IsProjector { result_set, .. } = &mut cert.verdict {
        *result_set = Some(SetDescriptor::certified_sum(vec![c.clone(), d.clone()]));
    }
    Ok(cert)
}

/// P_S + u: a projector iff u ⊥ (S - S). `None` when the direction space
/// of S has no closed form.
pub(crate) fn shift_rule(u: &Vector, s: &SetDescriptor, cfg: &SampleConfig) -> Result<Option<Certificate>, AlgebraError> {
    let Some(dirs) = s.direction_space() else {
        return Ok(None);
    };
    let subject = Combination::sum_of(vec![SetDescriptor::Singleton { u: u.clone() }, s.clone()])?;
    let along = linalg::project_span(&dirs, u);
    if along.norm() <= tol::EXACT * u.norm().max(1.0) {
        let p0 = s.project(&Vector::zeros(s.dim()))?;
        return Ok(Some(Certificate::exact(
            subject,
            Method::SingletonShift,
            cfg,
            Verdict::IsProjector {
                result_set: Some(shifted(s, u)),
                gamma: Some(u.dot(&p0)),
            },
        )));
    }
    // move along the offending direction from the projection of 0
    let p0 = s.project(&Vector::zeros(s.dim()))?;
    let dir = along.normalized().expect("nonzero");
    let extra: Vec<Vector> = [1.0, -1.0, 10.0, -10.0]
        .iter()
        .map(|t| {
            let mut p = p0.clone();
            p.axpy(t * cfg.scale, &dir);
            p
        })
        .collect();
    let verdict = match sampling::search_witness(&subject, cfg, &extra)? {
        Some(witness) => Verdict::NotProjector { witness },
        None => Verdict::Inconclusive {
            diagnostics: "shift is not orthogonal to the direction space but no sampled witness was found".into(),
        },
    };
    Ok(Some(Certificate::exact(subject, Method::SingletonShift, cfg, verdict)))
}

/// σ_S(±b) = 0 for every basis vector b, i.e. S ⊂ span(basis)^⊥.
fn support_orthogonal(s: &SetDescriptor, basis: &[Vector]) -> bool {
    basis.iter().all(|b| {
        [b.clone(), -b]
            .iter()
            .all(|d| s.support(d).is_some_and(|v| v.abs() <= tol::EXACT))
    })
}

fn cone_part(s: &SetDescriptor) -> &SetDescriptor {
    match s {
        SetDescriptor::TruncatedCone { cone, .. } => cone,
        _ => s,
    }
}

fn is_polar_pair(c: &SetDescriptor, d: &SetDescriptor) -> bool {
    let (a, b) = (cone_part(c), cone_part(d));
    let polar_of = |p: &SetDescriptor, k: &SetDescriptor| matches!(p, SetDescriptor::PolarCone { of } if **of == *k);
    polar_of(a, b) || polar_of(b, a)
}

/// Per-coordinate dichotomy for two boxes.
fn box_pair(
    subject: &Combination,
    (l1, u1): (&[f64], &[f64]),
    (l2, u2): (&[f64], &[f64]),
    cfg: &SampleConfig,
) -> Result<Certificate, AlgebraError> {
    let n = l1.len();
    for i in 0..n {
        let c = Interval { lo: l1[i], hi: u1[i] };
        let d = Interval { lo: l2[i], hi: u2[i] };
        let cert = super::dichotomy::decide_1d_pair(c, d);
        if let Some(Witness::Constancy {
            x,
            y,
            value_x,
            value_y,
            tolerance,
            ..
        }) = cert.witness()
        {
            let embed = |t: &Vector| {
                let mut p = Vector::zeros(n);
                p[i] = t[0];
                p
            };
            let (x, y) = (embed(x), embed(y));
            let (gx, gy) = (subject.criterion(&x)?, subject.criterion(&y)?);
            debug_assert!(((gx - gy) - (value_x - value_y)).abs() <= 1e-9 * (1.0 + gx.abs() + gy.abs()));
            return Ok(Certificate::exact(
                subject.clone(),
                Method::BoxSeparable,
                cfg,
                Verdict::NotProjector {
                    witness: Witness::Constancy {
                        condition: Condition::Criterion,
                        x,
                        y,
                        value_x: gx,
                        value_y: gy,
                        tolerance: *tolerance,
                    },
                },
            ));
        }
    }
    let parts = subject.terms().iter().map(|t| t.1.clone()).collect::<Vec<_>>();
    Ok(Certificate::exact(
        subject.clone(),
        Method::BoxSeparable,
        cfg,
        Verdict::IsProjector {
            result_set: Some(sum_result(&parts)),
            gamma: Some(subject.criterion(&Vector::zeros(n))?),
        },
    ))
}

/// If every pair in the family is an exact projector pair, the whole sum is
/// a projector with γ the sum of the pairwise constants.
pub(crate) fn pairwise_induction(sets: &[SetDescriptor], cfg: &SampleConfig) -> Result<Option<Certificate>, AlgebraError> {
    let mut gamma = 0.0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let cert = decide_pair_sum(&sets[i], &sets[j], cfg)?;
            match (cert.gamma(), cert.confidence) {
                (Some(g), Confidence::Exact) if cert.is_projector() => gamma += g,
                _ => return Ok(None),
            }
        }
    }
    Ok(Some(Certificate::exact(
        Combination::sum_of(sets.to_vec())?,
        Method::PairwiseInduction,
        cfg,
        Verdict::IsProjector {
            result_set: Some(sum_result(sets)),
            gamma: Some(gamma),
        },
    )))
}

/// S + u in the simplest available form.
pub(crate) fn shifted(s: &SetDescriptor, u: &Vector) -> SetDescriptor {
    use SetDescriptor as S;
    if u.is_zero() {
        return s.clone();
    }
    match s {
        S::Singleton { u: p } => S::Singleton { u: p + u },
        S::Ball { center, radius } => S::Ball {
            center: center + u,
            radius: *radius,
        },
        S::Box { lower, upper } => S::Box {
            lower: lower.iter().zip(u.iter()).map(|(l, s)| l + s).collect(),
            upper: upper.iter().zip(u.iter()).map(|(h, s)| h + s).collect(),
        },
        S::Translate { base, shift } => shifted(base, &(shift + u)),
        _ => S::Translate {
            base: Box::new(s.clone()),
            shift: u.clone(),
        },
    }
}

/// Simplified descriptor for a certified sum Σ C_i.
pub(crate) fn sum_result(parts: &[SetDescriptor]) -> SetDescriptor {
    use SetDescriptor as S;
    let n = parts[0].dim();
    let mut shift = Vector::zeros(n);
    let mut rest: Vec<SetDescriptor> = Vec::new();
    for p in parts {
        let mut p = p;
        while let S::Translate { base, shift: s } = p {
            shift += s;
            p = base;
        }
        match p {
            S::Singleton { u } => shift += u,
            _ => rest.push(p.clone()),
        }
    }
    let body = if rest.is_empty() {
        S::Singleton { u: Vector::zeros(n) }
    } else if rest.len() == 1 {
        rest.pop().unwrap()
    } else if let Some(gens) = rest
        .iter()
        .map(SetDescriptor::cone_generators)
        .collect::<Option<Vec<_>>>()
    {
        cone_from_generators(gens.concat(), n)
    } else if let Some(ivs) = rest.iter().map(SetDescriptor::as_interval).collect::<Option<Vec<_>>>() {
        ivs[1..].iter().fold(ivs[0], |a, b| a.sum(b)).to_set()
    } else if rest.iter().all(|p| matches!(p, S::Box { .. })) {
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for p in &rest {
            if let S::Box { lower: l, upper: u } = p {
                for i in 0..n {
                    lower[i] += l[i];
                    upper[i] += u[i];
                }
            }
        }
        S::Box { lower, upper }
    } else {
        S::certified_sum(rest)
    };
    shifted(&body, &shift)
}

/// cone{g}: a subspace when every generator has an antipode.
fn cone_from_generators(gens: Vec<Vector>, n: usize) -> SetDescriptor {
    let units: Vec<Vector> = gens.iter().filter_map(Vector::normalized).collect();
    if units.is_empty() {
        return SetDescriptor::Singleton { u: Vector::zeros(n) };
    }
    let all_lines = units
        .iter()
        .all(|u| units.iter().any(|v| (u + v).norm() <= tol::PAIRWISE));
    if all_lines {
        let basis = linalg::orthonormalize(&units);
        return SetDescriptor::Subspace { basis };
    }
    let mut dedup: Vec<Vector> = Vec::new();
    for u in units {
        if !dedup.iter().any(|v| (&u - v).norm() <= tol::PAIRWISE) {
            dedup.push(u);
        }
    }
    if dedup.len() == 1 {
        return SetDescriptor::Ray {
            direction: dedup.pop().unwrap(),
        };
    }
    SetDescriptor::FinitelyGeneratedCone { generators: dedup }
}
