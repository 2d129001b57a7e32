use serde::Serialize;

use super::{gaussian, OperatorHandle, SampleConfig, Stream};
use crate::vector::Vector;

/// Max finite-difference error accepted by the gradient criterion.
pub const GRADIENT_BUDGET: f64 = 1e-5;
/// Random directions added to the coordinate axes.
const EXTRA_DIRECTIONS: usize = 8;
/// Redraws allowed per sample point when it lands on a kink.
const RESAMPLE_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_pairing: Option<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub witnesses: Vec<Vector>,
}

impl CheckReport {
    fn new(check: &'static str, cfg: &SampleConfig) -> Self {
        CheckReport {
            check,
            pass: true,
            max_error: None,
            min_pairing: None,
            n_samples: 0,
            seed: cfg.seed,
            fd_step: cfg.fd_step,
            witnesses: Vec::new(),
        }
    }

    /// The offending pair, for pairwise checks that failed.
    pub fn witness_pair(&self) -> Option<(Vector, Vector)> {
        match self.witnesses.as_slice() {
            [x, y] => Some((x.clone(), y.clone())),
            _ => None,
        }
    }
}

fn half_sq_residual(t: &OperatorHandle<'_>, x: &Vector) -> f64 {
    0.5 * (x - &t.apply(x)).norm_sq()
}

/// Probe radius for kink detection, four times the largest allowed
/// fd_step. Fixed so that every step size is tested on the same points.
const KINK_RADIUS: f64 = 4e-2;

fn second_difference(t: &OperatorHandle<'_>, x: &Vector, d: &Vector, r: f64) -> Option<f64> {
    let mut xp = x.clone();
    xp.axpy(r, d);
    let mut xm = x.clone();
    xm.axpy(-r, d);
    if !t.in_domain(&xp) || !t.in_domain(&xm) {
        return None;
    }
    let mut second = t.apply(&xp);
    second += &t.apply(&xm);
    second.axpy(-2.0, &t.apply(x));
    Some(second.norm())
}

/// True if T has a kink within KINK_RADIUS / 2 of x along d. Smooth T has
/// second differences scaling like r², so halving r divides them by about
/// 4; a kink crossed by both stencils divides them by at most about 2.
fn kinked(t: &OperatorHandle<'_>, x: &Vector, d: &Vector) -> bool {
    let (Some(big), Some(small)) = (
        second_difference(t, x, d, KINK_RADIUS),
        second_difference(t, x, d, KINK_RADIUS / 2.0),
    ) else {
        return true;
    };
    small > 1e-10 * (1.0 + x.norm()) && small > 0.3 * big
}

/// Central-difference error of f = ½||x - Tx||² against x - Tx along d.
fn fd_error(t: &OperatorHandle<'_>, x: &Vector, d: &Vector, h: f64) -> f64 {
    let mut xp = x.clone();
    xp.axpy(h, d);
    let mut xm = x.clone();
    xm.axpy(-h, d);
    let fd = (half_sq_residual(t, &xp) - half_sq_residual(t, &xm)) / (2.0 * h);
    let exact = (x - &t.apply(x)).dot(d);
    (fd - exact).abs()
}

/// Checks that f = ½||(Id - T)·||² has gradient Id - T, by central
/// differences along coordinate axes and random directions. Points near a
/// kink of T are redrawn; which points are used does not depend on fd_step.
pub fn gradient_criterion_check(t: &OperatorHandle<'_>, cfg: &SampleConfig) -> CheckReport {
    let mut report = CheckReport::new("gradient", cfg);
    let h = cfg.fd_step;
    let dirs = cfg.directions(t.dim(), EXTRA_DIRECTIONS);
    let mut redraw = cfg.rng(Stream::Resample);
    let mut worst: f64 = 0.0;
    let mut worst_at: Option<Vector> = None;

    for base in cfg.sample_points(t.dim()) {
        let mut x = base;
        let mut usable = false;
        for _ in 0..RESAMPLE_ATTEMPTS {
            if t.in_domain(&x) && !dirs.iter().any(|d| kinked(t, &x, d)) {
                usable = true;
                break;
            }
            x = gaussian(&mut redraw, t.dim(), cfg.scale);
        }
        if !usable {
            continue;
        }
        report.n_samples += 1;
        for d in &dirs {
            let e = fd_error(t, &x, d, h);
            if e > worst || e.is_nan() {
                worst = e;
                worst_at = Some(x.clone());
            }
        }
    }
    report.max_error = Some(worst);
    report.pass = report.n_samples > 0 && worst <= GRADIENT_BUDGET;
    if !report.pass {
        report.witnesses.extend(worst_at);
    }
    report
}

/// min over sampled pairs of <Tx - Ty, x - y>.
pub fn monotonicity_check(t: &OperatorHandle<'_>, cfg: &SampleConfig) -> CheckReport {
    let mut report = CheckReport::new("monotonicity", cfg);
    let mut min = f64::INFINITY;
    let mut arg = None;
    for (x, y) in cfg.sample_pairs(t.dim()) {
        if !t.in_domain(&x) || !t.in_domain(&y) {
            continue;
        }
        report.n_samples += 1;
        let p = (&t.apply(&x) - &t.apply(&y)).dot(&(&x - &y));
        if p < min {
            min = p;
            arg = Some((x, y));
        }
    }
    report.min_pairing = Some(min);
    report.pass = min >= -cfg.atol;
    if !report.pass {
        if let Some((x, y)) = arg {
            report.witnesses = vec![x, y];
        }
    }
    report
}

/// min over sampled pairs of <Tx - Ty, x - y> - ||Tx - Ty||².
pub fn firm_nonexpansiveness_check(t: &OperatorHandle<'_>, cfg: &SampleConfig) -> CheckReport {
    let mut report = CheckReport::new("firm-nonexpansiveness", cfg);
    let mut min = f64::INFINITY;
    let mut arg = None;
    let mut ok = true;
    for (x, y) in cfg.sample_pairs(t.dim()) {
        if !t.in_domain(&x) || !t.in_domain(&y) {
            continue;
        }
        report.n_samples += 1;
        let dt = &t.apply(&x) - &t.apply(&y);
        let dx = &x - &y;
        let slack = dt.dot(&dx) - dt.norm_sq();
        if slack < -cfg.tolerance(dx.norm_sq()) {
            ok = false;
        }
        if slack < min {
            min = slack;
            arg = Some((x, y));
        }
    }
    report.min_pairing = Some(min);
    report.pass = ok;
    if !ok {
        if let Some((x, y)) = arg {
            report.witnesses = vec![x, y];
        }
    }
    report
}

/// max ||T(Tx) - Tx|| over samples.
pub fn idempotence_check(t: &OperatorHandle<'_>, cfg: &SampleConfig) -> CheckReport {
    let mut report = CheckReport::new("idempotence", cfg);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut arg = None;
    for x in cfg.sample_points(t.dim()) {
        if !t.in_domain(&x) {
            continue;
        }
        report.n_samples += 1;
        let tx = t.apply(&x);
        let e = (&t.apply(&tx) - &tx).norm();
        if e > cfg.tolerance(tx.norm()) {
            ok = false;
        }
        if e > worst {
            worst = e;
            arg = Some(x);
        }
    }
    report.max_error = Some(worst);
    report.pass = ok;
    if !ok {
        report.witnesses.extend(arg);
    }
    report
}

/// T(λx) = λT(x) for λ ∈ {0.25, 1, 4}; when T is also monotone, T(0) = 0.
pub fn homogeneity_check(t: &OperatorHandle<'_>, cfg: &SampleConfig) -> CheckReport {
    let mut report = CheckReport::new("homogeneity", cfg);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for x in cfg.sample_points(t.dim()) {
        if !t.in_domain(&x) {
            continue;
        }
        report.n_samples += 1;
        let tx = t.apply(&x);
        for lambda in [0.25, 1.0, 4.0] {
            let lx = x.scale(lambda);
            if !t.in_domain(&lx) {
                continue;
            }
            let target = tx.scale(lambda);
            let e = (&t.apply(&lx) - &target).norm();
            if e > cfg.tolerance(target.norm().max(lx.norm())) {
                if ok {
                    report.witnesses = vec![x.clone(), lx.clone()];
                }
                ok = false;
            }
            worst = worst.max(e);
        }
    }
    let zero = Vector::zeros(t.dim());
    if ok && t.in_domain(&zero) && monotonicity_check(t, cfg).pass {
        let t0 = t.apply(&zero).norm();
        worst = worst.max(t0);
        if t0 > cfg.atol {
            ok = false;
            report.witnesses = vec![zero];
        }
    }
    report.max_error = Some(worst);
    report.pass = ok;
    report
}
