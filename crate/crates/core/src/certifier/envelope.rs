use serde::Serialize;
use thiserror::Error;

use super::{OperatorHandle, SampleConfig};
use crate::certifier::checks::{gradient_criterion_check, CheckReport};
use crate::sets::SetDescriptor;
use crate::vector::Vector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("no closed-form proximity operator for {0}")]
    UnsupportedFunction(String),
}

/// Functions with closed-form proximity operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Phi {
    Indicator { set: SetDescriptor },
    /// λ||x||_1
    ScaledL1 { lambda: f64, dim: usize },
    /// λ||x||_2
    ScaledL2 { lambda: f64, dim: usize },
}

impl Phi {
    pub fn dim(&self) -> usize {
        match self {
            Phi::Indicator { set } => set.dim(),
            Phi::ScaledL1 { dim, .. } | Phi::ScaledL2 { dim, .. } => *dim,
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Phi::Indicator { set } => match set.membership(x, 1e-9) {
                Ok(true) => 0.0,
                _ => f64::INFINITY,
            },
            Phi::ScaledL1 { lambda, .. } => lambda * x.iter().map(|a| a.abs()).sum::<f64>(),
            Phi::ScaledL2 { lambda, .. } => lambda * x.norm(),
        }
    }

    pub fn prox(&self, x: &Vector) -> Vector {
        match self {
            Phi::Indicator { set } => set.project(x).expect("checked in moreau_envelope_check"),
            Phi::ScaledL1 { lambda, .. } => {
                Vector::new(x.iter().map(|&a| a.signum() * (a.abs() - lambda).max(0.0)).collect())
            }
            Phi::ScaledL2 { lambda, .. } => {
                let n = x.norm();
                if n <= *lambda {
                    Vector::zeros(x.dim())
                } else {
                    x.scale(1.0 - lambda / n)
                }
            }
        }
    }

    fn check(&self) -> Result<(), EnvelopeError> {
        match self {
            Phi::Indicator { set } => set
                .project(&Vector::zeros(set.dim()))
                .map(|_| ())
                .map_err(|e| EnvelopeError::UnsupportedFunction(e.to_string())),
            Phi::ScaledL1 { lambda, dim } | Phi::ScaledL2 { lambda, dim } => {
                if *dim == 0 || !(lambda.is_finite() && *lambda >= 0.0) {
                    Err(EnvelopeError::UnsupportedFunction(format!("lambda {lambda}, dim {dim}")))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Envelope env φ(x) = φ(Prox x) + ½||x - Prox x||², evaluated with the prox.
pub fn envelope_value(phi: &Phi, x: &Vector) -> f64 {
    let p = phi.prox(x);
    let phi_p = match phi {
        Phi::Indicator { .. } => 0.0,
        _ => phi.value(&p),
    };
    phi_p + 0.5 * (x - &p).norm_sq()
}

/// Central differences of env φ against x - Prox x. For indicators the
/// envelope is ½d², so this reduces to the projector gradient check.
pub fn moreau_envelope_check(phi: &Phi, cfg: &SampleConfig) -> Result<CheckReport, EnvelopeError> {
    phi.check()?;
    let n = phi.dim();
    if let Phi::Indicator { set } = phi {
        let t = OperatorHandle::projector(set).map_err(|e| EnvelopeError::UnsupportedFunction(e.to_string()))?;
        let mut r = gradient_criterion_check(&t, cfg);
        r.check = "moreau-envelope";
        return Ok(r);
    }
    let h = cfg.fd_step;
    let dirs = cfg.directions(n, 8);
    let mut report = CheckReport {
        check: "moreau-envelope",
        pass: true,
        max_error: None,
        min_pairing: None,
        n_samples: 0,
        seed: cfg.seed,
        fd_step: h,
        witnesses: Vec::new(),
    };
    let mut worst: f64 = 0.0;
    for x in cfg.sample_points(n) {
        // skip points whose stencil crosses a kink of the prox
        let smooth = dirs.iter().all(|d| {
            let mut xp = x.clone();
            xp.axpy(h, d);
            let mut xm = x.clone();
            xm.axpy(-h, d);
            let mut s = phi.prox(&xp);
            s += &phi.prox(&xm);
            s.axpy(-2.0, &phi.prox(&x));
            s.norm() <= 1e-2 * h
        });
        if !smooth {
            continue;
        }
        report.n_samples += 1;
        let grad = &x - &phi.prox(&x);
        for d in &dirs {
            let mut xp = x.clone();
            xp.axpy(h, d);
            let mut xm = x.clone();
            xm.axpy(-h, d);
            let fd = (envelope_value(phi, &xp) - envelope_value(phi, &xm)) / (2.0 * h);
            let e = (fd - grad.dot(d)).abs();
            if e > worst {
                worst = e;
                if e > super::GRADIENT_BUDGET {
                    report.witnesses = vec![x.clone()];
                }
            }
        }
    }
    report.max_error = Some(worst);
    report.pass = report.n_samples > 0 && worst <= super::GRADIENT_BUDGET;
    Ok(report)
}
