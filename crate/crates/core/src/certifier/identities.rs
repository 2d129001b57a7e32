use serde::Serialize;

use crate::algebra::Combination;
use crate::sets::SetError;
use crate::vector::Vector;

const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// (identity name, max residual). Unit-coefficient identities are only
    /// listed when every coefficient is 1.
    pub residuals: Vec<(String, f64)>,
    pub n_points: usize,
    pub pass: bool,
}

fn q(v: &Vector) -> f64 {
    0.5 * v.norm_sq()
}

/// Evaluates the expansion identities for x and x_i = P_{C_i} x at every
/// supplied point and reports the largest residual of each.
pub fn identity_suite(points: &[Vector], comb: &Combination) -> Result<IdentityReport, SetError> {
    let alphas: Vec<f64> = comb.terms().iter().map(|t| t.0).collect();
    let alpha = comb.alpha();
    let unit = alphas.iter().all(|&a| a == 1.0);
    let mut expansion: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut unit_expansion: f64 = 0.0;
    let mut quadratic: f64 = 0.0;

    for x in points {
        let xs: Vec<Vector> = comb
            .terms()
            .iter()
            .map(|(_, s)| s.project(x))
            .collect::<Result<_, _>>()?;
        let mut combo = Vector::zeros(x.dim());
        for (a, xi) in alphas.iter().zip(&xs) {
            combo.axpy(*a, xi);
        }
        let residual = x - &combo;

        let mut pair_sum = 0.0;
        for (ai, xi) in alphas.iter().zip(&xs) {
            for (aj, xj) in alphas.iter().zip(&xs) {
                pair_sum += ai * aj * (xi - xj).norm_sq();
            }
        }
        let weighted_dist: f64 = alphas.iter().zip(&xs).map(|(a, xi)| a * (x - xi).norm_sq()).sum();
        let weighted_norm: f64 = alphas.iter().zip(&xs).map(|(a, xi)| a * xi.norm_sq()).sum();

        let rhs = (1.0 - alpha) * x.norm_sq() + weighted_dist + (alpha - 1.0) * weighted_norm - 0.5 * pair_sum;
        expansion = expansion.max((residual.norm_sq() - rhs).abs());

        let rhs_q = 0.5 * weighted_dist - (alpha - 1.0) * q(x) + (alpha - 1.0) * 0.5 * weighted_norm
            - 0.25 * pair_sum;
        quadratic = quadratic.max((q(&residual) - rhs_q).abs());

        if unit {
            let mut off_diag = 0.0;
            for (i, xi) in xs.iter().enumerate() {
                for (j, xj) in xs.iter().enumerate() {
                    if i != j {
                        off_diag += xi.dot(xj);
                    }
                }
            }
            let lhs = (alpha - 1.0) * weighted_norm - 0.5 * pair_sum;
            cross = cross.max((lhs - off_diag).abs());
            let rhs2 = (1.0 - alpha) * x.norm_sq() + weighted_dist + off_diag;
            unit_expansion = unit_expansion.max((residual.norm_sq() - rhs2).abs());
        }
    }

    let mut residuals = vec![
        ("weighted-expansion".to_string(), expansion),
        ("quadratic-form".to_string(), quadratic),
    ];
    if unit {
        residuals.push(("unit-cross-terms".to_string(), cross));
        residuals.push(("unit-expansion".to_string(), unit_expansion));
    }
    let pass = residuals.iter().all(|(_, r)| *r <= IDENTITY_TOL);
    Ok(IdentityReport {
        residuals,
        n_points: points.len(),
        pass,
    })
}
