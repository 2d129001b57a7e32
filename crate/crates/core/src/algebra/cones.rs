//! Cone families: ray sums, generated cones, dualized intersections and
//! differences.

use super::pair::{decide_pair_sum, sum_result};
use super::sampling;
use super::{
    check_config, point_violation, same_dims, AlgebraError, Certificate, Combination, Condition, Confidence, Method, Verdict, Witness,
};
use crate::certifier::{dykstra, SampleConfig};
use crate::sets::project::{first_bad_pair, unit_generators, units_pairwise};
use crate::sets::SetDescriptor;
use crate::vector::Vector;

const SUBFAMILY_CAP: usize = 12;
const DYKSTRA_POINTS: usize = 64;
const DYKSTRA_ITER: usize = 20_000;
const DYKSTRA_TOL: f64 = 1e-6;
const ZARANTONELLO_TOL: f64 = 1e-9;

/// True iff P_{R+u} + P_{R+v} is a projector: u ⊥ v or u ∈ R₋₋v.
pub fn decide_ray_pair(u: &Vector, v: &Vector) -> Result<bool, AlgebraError> {
    if u.dim() != v.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let (Some(a), Some(b)) = (u.normalized(), v.normalized()) else {
        return Err(AlgebraError::ZeroVector);
    };
    Ok(units_pairwise(&a, &b))
}

/// Sum of cones each given by a generator list. The sum of projectors is a
/// projector iff the multiset union of unit generators is pairwise
/// orthogonal or antipodal.
pub(crate) fn generator_family(
    subject: Combination,
    lists: &[Vec<Vector>],
    cfg: &SampleConfig,
    method: Method,
) -> Result<Certificate, AlgebraError> {
    let units: Vec<Vector> = lists.iter().flat_map(|g| unit_generators(g)).collect();
    match first_bad_pair(&units) {
        None => {
            let parts: Vec<SetDescriptor> = subject.terms().iter().map(|t| t.1.clone()).collect();
            Ok(Certificate::exact(
                subject,
                method,
                cfg,
                Verdict::IsProjector {
                    result_set: Some(sum_result(&parts)),
                    gamma: Some(0.0),
                },
            ))
        }
        Some((i, j)) => {
            let verdict = match bad_pair_witness(&subject, &units[i], &units[j], cfg)? {
                Some(witness) => Verdict::NotProjector { witness },
                None => Verdict::Inconclusive {
                    diagnostics: "generators are not pairwise but no witness was found".into(),
                },
            };
            Ok(Certificate::exact(subject, method, cfg, verdict))
        }
    }
}

/// A point of cone{u, v} that the sum fails to fix. For obtuse pairs this
/// is the point with <x, v> = 0 and <x, u> = 1; otherwise u + v.
fn bad_pair_witness(subject: &Combination, u: &Vector, v: &Vector, cfg: &SampleConfig) -> Result<Option<Witness>, AlgebraError> {
    let c = u.dot(v);
    let x = if c < 0.0 {
        let a = 1.0 / (1.0 - c * c);
        let mut x = u.scale(a);
        x.axpy(-a * c, v);
        x
    } else {
        u + v
    };
    Ok(Some(match fixed_point_or_constancy(subject, &x, cfg)? {
        Some(w) => w,
        None => return sampling::search_witness(subject, cfg, &[x]),
    }))
}

/// ||Tx - x|| for x in the candidate range, else g(x) against g(0).
fn fixed_point_or_constancy(subject: &Combination, x: &Vector, cfg: &SampleConfig) -> Result<Option<Witness>, AlgebraError> {
    let tolerance = cfg.tolerance(x.norm());
    let violation = point_violation(Condition::FixedPoint, subject, x)?;
    if violation > 10.0 * tolerance {
        return Ok(Some(Witness::Point {
            condition: Condition::FixedPoint,
            x: x.clone(),
            violation,
            tolerance,
        }));
    }
    let zero = Vector::zeros(x.dim());
    let (gx, g0) = (subject.criterion(x)?, subject.criterion(&zero)?);
    let tolerance = cfg.tolerance(gx);
    if (gx - g0).abs() > 10.0 * tolerance {
        return Ok(Some(Witness::Constancy {
            condition: Condition::Criterion,
            x: x.clone(),
            y: zero,
            value_x: gx,
            value_y: g0,
            tolerance,
        }));
    }
    Ok(None)
}

/// Σ P_{R+ u_i}: a projector iff the generators are pairwise orthogonal or
/// antipodal; then each u_i has at most one antipodal partner.
pub fn decide_generated_cone(generators: &[Vector], cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    check_config(cfg)?;
    if generators.is_empty() {
        return Err(AlgebraError::Empty);
    }
    let mut rays = Vec::with_capacity(generators.len());
    for g in generators {
        if g.normalized().is_none() {
            return Err(AlgebraError::ZeroVector);
        }
        rays.push(SetDescriptor::ray(g.clone())?);
    }
    let subject = Combination::sum_of(rays)?;
    let lists: Vec<Vec<Vector>> = generators.iter().map(|g| vec![g.clone()]).collect();
    let cert = generator_family(subject, &lists, cfg, Method::GeneratedCone)?;
    if cert.is_projector() {
        let units: Vec<Vector> = generators.iter().filter_map(Vector::normalized).collect();
        for u in &units {
            let partners = units.iter().filter(|w| (u + *w).norm() <= crate::tol::PAIRWISE).count();
            assert!(partners <= 1, "pairwise family with two antipodal partners");
        }
    }
    Ok(cert)
}

fn require_cone(s: &SetDescriptor) -> Result<(), AlgebraError> {
    if s.is_cone() {
        Ok(())
    } else {
        Err(AlgebraError::NotACone(s.label()))
    }
}

/// Σ P_{K_i} is a projector iff <P_{K_i} x, P_{K_j} x> = 0 for i ≠ j; then
/// every sub-family is one as well.
pub fn decide_cone_family_sum(cones: &[SetDescriptor], cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    check_config(cfg)?;
    if cones.is_empty() {
        return Err(AlgebraError::Empty);
    }
    for k in cones {
        require_cone(k)?;
    }
    let subject = Combination::sum_of(cones.to_vec())?;
    let cones: Vec<SetDescriptor> = subject.terms().iter().map(|t| t.1.clone()).collect();

    if let Some(lists) = cones.iter().map(SetDescriptor::cone_generators).collect::<Option<Vec<_>>>() {
        let cert = generator_family(subject.clone(), &lists, cfg, Method::ConeFamily)?;
        return finish_family(cert, &cones, cfg);
    }

    let mut confidence = Confidence::Exact;
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            let pair = decide_pair_sum(&cones[i], &cones[j], cfg)?;
            if pair.confidence == Confidence::Sampled {
                confidence = Confidence::Sampled;
            }
            match &pair.verdict {
                Verdict::IsProjector { .. } => {}
                Verdict::NotProjector { witness } => {
                    let verdict = family_witness(&subject, witness, cfg)?;
                    return Ok(Certificate {
                        confidence: pair.confidence,
                        ..Certificate::exact(subject, Method::ConeFamily, cfg, verdict)
                    });
                }
                Verdict::Inconclusive { diagnostics } => {
                    return Ok(Certificate::exact(
                        subject,
                        Method::ConeFamily,
                        cfg,
                        Verdict::Inconclusive {
                            diagnostics: format!("pair ({i}, {j}): {diagnostics}"),
                        },
                    ))
                }
            }
        }
    }
    let cert = Certificate {
        confidence,
        ..Certificate::exact(
            subject,
            Method::ConeFamily,
            cfg,
            Verdict::IsProjector {
                result_set: Some(sum_result(&cones)),
                gamma: Some(0.0),
            },
        )
    };
    finish_family(cert, &cones, cfg)
}

/// Carries a pair witness over to the whole family.
fn family_witness(subject: &Combination, pair: &Witness, cfg: &SampleConfig) -> Result<Verdict, AlgebraError> {
    let candidates: Vec<Vector> = match pair {
        Witness::Point { x, .. } => vec![x.clone()],
        Witness::Constancy { x, y, .. } | Witness::Monotonicity { x, y, .. } => vec![x.clone(), y.clone()],
    };
    for x in &candidates {
        if let Some(w) = fixed_point_or_constancy(subject, x, cfg)? {
            return Ok(Verdict::NotProjector { witness: w });
        }
    }
    Ok(match sampling::search_witness(subject, cfg, &candidates)? {
        Some(witness) => Verdict::NotProjector { witness },
        None => Verdict::Inconclusive {
            diagnostics: "a pair of cones fails but no witness for the family was found".into(),
        },
    })
}

/// Checks idempotence of every sub-family sum on a few sample points.
fn finish_family(cert: Certificate, cones: &[SetDescriptor], cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    if !cert.is_projector() || cones.len() > SUBFAMILY_CAP {
        return Ok(cert);
    }
    let pts: Vec<Vector> = cfg.sample_points(cones[0].dim()).into_iter().take(8).collect();
    for mask in 1u32..(1 << cones.len()) {
        let sub: Vec<&SetDescriptor> = (0..cones.len()).filter(|i| mask & (1 << i) != 0).map(|i| &cones[i]).collect();
        let t = |x: &Vector| -> Result<Vector, AlgebraError> {
            let mut out = Vector::zeros(x.dim());
            for k in &sub {
                out += &k.project(x)?;
            }
            Ok(out)
        };
        for x in &pts {
            let tx = t(x)?;
            let err = (&t(&tx)? - &tx).norm();
            if err > 1e-9 * (1.0 + x.norm()) {
                return Ok(Certificate {
                    verdict: Verdict::Inconclusive {
                        diagnostics: format!("sub-family {mask:#b} is not idempotent (error {err:e})"),
                    },
                    ..cert
                });
            }
        }
    }
    Ok(cert)
}

/// P_{K1} + P_{K2} - Id is a projector (onto K1 ∩ K2) iff
/// ||P_1 x||² + ||P_2 x||² = ||x||² + <P_1 x, P_2 x>, which holds iff the
/// polar cones sum to a projector.
pub fn cone_intersection_projector(k1: &SetDescriptor, k2: &SetDescriptor, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    same_dims(k1, k2)?;
    require_cone(k1)?;
    require_cone(k2)?;
    check_config(cfg)?;
    let n = k1.dim();
    let subject = Combination::new(vec![
        (1.0, k1.clone()),
        (1.0, k2.clone()),
        (-1.0, SetDescriptor::whole_space(n)),
    ])?;
    let result = SetDescriptor::certified_intersection(k1.clone(), k2.clone());
    let identity_tol = |x: &Vector| cfg.tolerance(x.norm_sq());

    let (method, confidence, scan) = if let (Some(p1), Some(p2)) = (k1.polar_generators(), k2.polar_generators()) {
        let units: Vec<Vector> = unit_generators(&p1).into_iter().chain(unit_generators(&p2)).collect();
        if let Some((i, j)) = first_bad_pair(&units) {
            let (u, v) = (&units[i], &units[j]);
            let mut cands = vec![u + v, -&(u + v), u.clone(), v.clone()];
            cands.extend(cfg.sample_points(n));
            return Ok(dualized_witness(subject, &cands, cfg, Method::DualizedIntersection));
        }
        (Method::DualizedIntersection, Confidence::Exact, None)
    } else {
        let pts = cfg.sample_points(n);
        let scan = sampling::scan_quantity(&pts, cfg, |x| {
            Ok(point_violation(Condition::DualizedIdentity, &subject, x)? / identity_tol(x))
        })?;
        if scan.max > 10.0 {
            return Ok(dualized_witness(subject, &pts, cfg, Method::DualizedIntersectionSampled).with_scan(&scan));
        }
        if scan.max > 1.0 {
            return Ok(Certificate {
                confidence: Confidence::Sampled,
                ..Certificate::exact(
                    subject,
                    Method::DualizedIntersectionSampled,
                    cfg,
                    Verdict::Inconclusive {
                        diagnostics: format!("identity residual is {:.3} times the tolerance", scan.max),
                    },
                )
            }
            .with_scan(&scan));
        }
        (Method::DualizedIntersectionSampled, Confidence::Sampled, Some(scan))
    };

    // independent confirmation by alternating projections
    let mut worst: f64 = 0.0;
    for x in cfg.sample_points(n).iter().take(DYKSTRA_POINTS) {
        let oracle = dykstra(&[k1.clone(), k2.clone()], x, DYKSTRA_ITER).map_err(|e| match e {
            crate::certifier::OracleError::Set(s) => AlgebraError::Set(s),
            other => AlgebraError::Config(other.to_string()),
        })?;
        worst = worst.max((&result.project(x)? - &oracle).norm());
    }
    let verdict = if worst <= DYKSTRA_TOL {
        Verdict::IsProjector {
            result_set: Some(result),
            gamma: Some(0.0),
        }
    } else {
        Verdict::Inconclusive {
            diagnostics: format!("identity holds but Dykstra disagrees by {worst:e}"),
        }
    };
    let cert = Certificate {
        confidence,
        ..Certificate::exact(subject, method, cfg, verdict)
    };
    Ok(match scan {
        Some(s) => cert.with_scan(&s),
        None => cert,
    })
}

fn dualized_witness(subject: Combination, candidates: &[Vector], cfg: &SampleConfig, method: Method) -> Certificate {
    let mut best: Option<(f64, Vector, f64, f64)> = None;
    for x in candidates {
        let Ok(v) = point_violation(Condition::DualizedIdentity, &subject, x) else {
            continue;
        };
        let tol = cfg.tolerance(x.norm_sq());
        let ratio = v / tol;
        if best.as_ref().is_none_or(|b| ratio > b.0) {
            best = Some((ratio, x.clone(), v, tol));
        }
    }
    let verdict = match best {
        Some((ratio, x, violation, tolerance)) if ratio > 10.0 => Verdict::NotProjector {
            witness: Witness::Point {
                condition: Condition::DualizedIdentity,
                x,
                violation,
                tolerance,
            },
        },
        _ => Verdict::Inconclusive {
            diagnostics: "polar generators are not pairwise but the identity holds on all candidates".into(),
        },
    };
    let confidence = if method == Method::DualizedIntersection {
        Confidence::Exact
    } else {
        Confidence::Sampled
    };
    Certificate {
        confidence,
        ..Certificate::exact(subject, method, cfg, verdict)
    }
}

fn is_whole_space(k: &SetDescriptor) -> bool {
    k.lineality().is_some_and(|l| l.len() == k.dim())
}

/// P_{K1} - P_{K2} is a projector iff P_{K2} P_{K1} = P_{K2}; its range is
/// then K1 ∩ K2⊖.
pub fn cone_difference_projector(k1: &SetDescriptor, k2: &SetDescriptor, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    same_dims(k1, k2)?;
    require_cone(k1)?;
    require_cone(k2)?;
    check_config(cfg)?;
    let n = k1.dim();
    let subject = Combination::new(vec![(1.0, k1.clone()), (-1.0, k2.clone())])?;
    let exact = |result: SetDescriptor| {
        Certificate::exact(
            subject.clone(),
            Method::Zarantonello,
            cfg,
            Verdict::IsProjector {
                result_set: Some(result),
                gamma: Some(0.0),
            },
        )
    };
    if k1 == k2 {
        return Ok(exact(SetDescriptor::Singleton { u: Vector::zeros(n) }));
    }
    if is_whole_space(k1) {
        return Ok(exact(SetDescriptor::polar(k2.clone())?));
    }
    if matches!(k2, SetDescriptor::Singleton { .. }) {
        return Ok(exact(k1.clone()));
    }

    let pts = sampling::scan_points(n, cfg, &[]);
    let ratio = |x: &Vector| -> Result<f64, AlgebraError> {
        Ok(point_violation(Condition::Zarantonello, &subject, x)? / (ZARANTONELLO_TOL * (1.0 + x.norm())))
    };
    let scan = sampling::scan_quantity(&pts, cfg, ratio)?;
    let base = |verdict| Certificate {
        confidence: Confidence::Sampled,
        ..Certificate::exact(subject.clone(), Method::ZarantonelloSampled, cfg, verdict)
    };
    let cert = if scan.max <= 1.0 {
        let result = SetDescriptor::certified_intersection(k1.clone(), SetDescriptor::polar(k2.clone())?);
        base(Verdict::IsProjector {
            result_set: Some(result),
            gamma: Some(0.0),
        })
    } else if scan.max > 10.0 {
        let x = scan.argmax.clone();
        base(Verdict::NotProjector {
            witness: Witness::Point {
                condition: Condition::Zarantonello,
                violation: point_violation(Condition::Zarantonello, &subject, &x)?,
                tolerance: ZARANTONELLO_TOL * (1.0 + x.norm()),
                x,
            },
        })
    } else {
        base(Verdict::Inconclusive {
            diagnostics: format!("Zarantonello residual is {:.3} times the tolerance", scan.max),
        })
    };
    Ok(cert.with_scan(&scan))
}
