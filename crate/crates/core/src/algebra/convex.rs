//! Convex combinations Σ α_i P_{C_i} with α_i ∈ (0, 1], Σ α_i = 1.

use super::pair::{shifted, sum_result};
use super::sampling;
use super::{check_config, AlgebraError, Certificate, Combination, Confidence, Method, Verdict};
use crate::certifier::SampleConfig;
use crate::linalg;
use crate::sets::{set_difference_witness, SetDescriptor, SetError};
use crate::tol;
use crate::vector::Vector;

const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Relative tolerance on <v_i, c - c'> for sampled c, c' ∈ C_k.
const ORTHOGONALITY_TOL: f64 = 1e-7;

/// A convex combination is a projector iff, for the anchor k, every
/// v_i = P_{cl(C_i - C_k)} 0 is orthogonal to C_k - C_k and C_i = C_k + v_i.
/// The result is then C_k + Σ α_i v_i.
pub fn decide_convex_combination(comb: &Combination, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    check_config(cfg)?;
    let terms = comb.terms();
    if let Some((a, _)) = terms.iter().find(|(a, _)| !(*a > 0.0 && *a <= 1.0)) {
        return Err(AlgebraError::InvalidWeights(format!("coefficient {a} is outside (0, 1]")));
    }
    let total = comb.alpha();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(AlgebraError::InvalidWeights(format!("coefficients sum to {total}, not 1")));
    }
    let n = comb.dim();
    let mut k = 0;
    for (i, (a, _)) in terms.iter().enumerate() {
        if *a > terms[k].0 {
            k = i;
        }
    }
    let anchor = &terms[k].1;
    let base = |verdict| Certificate::exact(comb.clone(), Method::ConvexCombination, cfg, verdict);

    let mut vs = Vec::with_capacity(terms.len());
    for (i, (_, c)) in terms.iter().enumerate() {
        if i == k {
            vs.push(Vector::zeros(n));
            continue;
        }
        match set_difference_witness(anchor, c, cfg) {
            Ok(v) => vs.push(v),
            Err(SetError::NotSupported(msg)) => {
                return Ok(Certificate {
                    confidence: Confidence::Sampled,
                    ..base(Verdict::Inconclusive {
                        diagnostics: format!("difference witness for term {i}: {msg}"),
                    })
                })
            }
            Err(e) => return Err(e.into()),
        }
    }

    let anchor_pts: Vec<Vector> = cfg
        .sample_points(n)
        .iter()
        .map(|x| anchor.project(x))
        .collect::<Result<_, _>>()?;
    let dirs = anchor.direction_space();
    let mut structural = dirs.is_some();
    let mut failed = false;
    for (i, v) in vs.iter().enumerate() {
        if i == k {
            continue;
        }
        let c0 = &anchor_pts[0];
        let orthogonal = anchor_pts.iter().all(|c| {
            let d = c - c0;
            v.dot(&d).abs() <= ORTHOGONALITY_TOL * (1.0 + v.norm() * d.norm())
        });
        if let Some(dirs) = &dirs {
            if linalg::project_span(dirs, v).norm() > tol::EXACT * v.norm().max(1.0) {
                structural = false;
            }
        }
        let translate = shifted(anchor, v);
        if !orthogonal || !hausdorff_close(&terms[i].1, &translate, cfg)? {
            failed = true;
            break;
        }
        if sum_result(std::slice::from_ref(&terms[i].1)) != sum_result(std::slice::from_ref(&translate)) {
            structural = false;
        }
    }

    if !failed {
        let mut shift = Vector::zeros(n);
        for ((a, _), v) in terms.iter().zip(&vs) {
            shift.axpy(*a, v);
        }
        let cert = base(Verdict::IsProjector {
            result_set: Some(shifted(anchor, &shift)),
            gamma: Some(comb.criterion(&Vector::zeros(n))?),
        });
        return Ok(Certificate {
            confidence: if structural { Confidence::Exact } else { Confidence::Sampled },
            ..cert
        });
    }

    let mut extra: Vec<Vector> = anchor_pts.iter().take(4).cloned().collect();
    extra.extend(vs.iter().cloned());
    let verdict = match sampling::search_witness(comb, cfg, &extra)? {
        Some(witness) => Verdict::NotProjector { witness },
        None => Verdict::Inconclusive {
            diagnostics: "sets are not translates along orthogonal directions, but no sampled witness was found".into(),
        },
    };
    Ok(base(verdict))
}

/// Two-sided sampled check that C and D coincide.
fn hausdorff_close(c: &SetDescriptor, d: &SetDescriptor, cfg: &SampleConfig) -> Result<bool, AlgebraError> {
    for x in sampling::scan_points(c.dim(), cfg, &[]) {
        let tol = tol::ITERATIVE * (1.0 + x.norm());
        let pc = c.project(&x)?;
        let pd = d.project(&x)?;
        if d.distance_sq(&pc)?.sqrt() > tol || c.distance_sq(&pd)?.sqrt() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
