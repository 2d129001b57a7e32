//! Sampled constancy and monotonicity scans.

use super::{AlgebraError, Combination, Condition, Witness};
use crate::certifier::SampleConfig;
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Band {
    Constant,
    Varies,
    Ambiguous,
}

/// Values of a scalar quantity over the sample set.
#[derive(Clone, Debug)]
pub(crate) struct Scan {
    pub values: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub tolerance: f64,
    pub argmin: Vector,
    pub argmax: Vector,
}

impl Scan {
    pub fn from_values(points: &[Vector], values: &[f64], cfg: &SampleConfig) -> Scan {
        let mut lo = 0;
        let mut hi = 0;
        for (i, v) in values.iter().enumerate() {
            if *v < values[lo] {
                lo = i;
            }
            if *v > values[hi] {
                hi = i;
            }
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        Scan {
            values: values.len(),
            min: values[lo],
            max: values[hi],
            median,
            tolerance: cfg.tolerance(median),
            argmin: points[lo].clone(),
            argmax: points[hi].clone(),
        }
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    pub fn band(&self) -> Band {
        let s = self.spread();
        if s <= self.tolerance {
            Band::Constant
        } else if s > 10.0 * self.tolerance {
            Band::Varies
        } else {
            Band::Ambiguous
        }
    }

    pub fn constancy_witness(&self, condition: Condition) -> Witness {
        Witness::Constancy {
            condition,
            x: self.argmax.clone(),
            y: self.argmin.clone(),
            value_x: self.max,
            value_y: self.min,
            tolerance: self.tolerance,
        }
    }
}

/// Sample points plus the wide ring plus `extra`.
pub(crate) fn scan_points(dim: usize, cfg: &SampleConfig, extra: &[Vector]) -> Vec<Vector> {
    let mut pts = cfg.wide_points(dim);
    pts.extend(extra.iter().cloned());
    pts
}

pub(crate) fn scan_quantity(
    points: &[Vector],
    cfg: &SampleConfig,
    f: impl Fn(&Vector) -> Result<f64, AlgebraError>,
) -> Result<Scan, AlgebraError> {
    let values: Vec<f64> = points.iter().map(&f).collect::<Result<_, _>>()?;
    Ok(Scan::from_values(points, &values, cfg))
}

pub(crate) fn scan_criterion(comb: &Combination, cfg: &SampleConfig, extra: &[Vector]) -> Result<Scan, AlgebraError> {
    let pts = scan_points(comb.dim(), cfg, extra);
    scan_quantity(&pts, cfg, |x| Ok(comb.criterion(x)?))
}

pub(crate) struct Mono {
    pub min: f64,
    pub witness: Option<Witness>,
    pub ambiguous: bool,
}

/// Pairings <Tx - Ty, x - y> over the sampled pairs, normalised by the
/// pair's tolerance; the worst pair is kept.
pub(crate) fn scan_monotonicity(comb: &Combination, cfg: &SampleConfig) -> Result<Mono, AlgebraError> {
    let weight: f64 = comb.terms().iter().map(|t| t.0.abs()).sum::<f64>().max(1.0);
    let mut worst: Option<(f64, f64, Vector, Vector, f64)> = None;
    let mut min = f64::INFINITY;
    for (x, y) in cfg.sample_pairs(comb.dim()) {
        let dx = &x - &y;
        let p = (&comb.apply(&x)? - &comb.apply(&y)?).dot(&dx);
        let tol = cfg.tolerance(weight * dx.norm_sq());
        min = min.min(p);
        let ratio = p / tol;
        if worst.as_ref().is_none_or(|w| ratio < w.0) {
            worst = Some((ratio, p, x, y, tol));
        }
    }
    let Some((ratio, pairing, x, y, tolerance)) = worst else {
        return Ok(Mono {
            min,
            witness: None,
            ambiguous: false,
        });
    };
    Ok(Mono {
        min,
        witness: (ratio < -10.0).then(|| Witness::Monotonicity {
            x,
            y,
            pairing,
            tolerance,
        }),
        ambiguous: (-10.0..-1.0).contains(&ratio),
    })
}

/// Looks for a monotonicity or criterion-constancy violation.
pub(crate) fn search_witness(
    comb: &Combination,
    cfg: &SampleConfig,
    extra: &[Vector],
) -> Result<Option<Witness>, AlgebraError> {
    let mono = scan_monotonicity(comb, cfg)?;
    if mono.witness.is_some() {
        return Ok(mono.witness);
    }
    let scan = scan_criterion(comb, cfg, extra)?;
    Ok((scan.band() == Band::Varies).then(|| scan.constancy_witness(Condition::Criterion)))
}
