//! Nearest point of cl(D - C).

use super::project::{first_bad_pair, unit_generators};
use super::{SetDescriptor, SetError};
use crate::certifier::SampleConfig;
use crate::linalg;
use crate::vector::Vector;

const MAX_ALTERNATIONS: usize = 100_000;

/// v = P_{cl(D - C)} 0, the minimal displacement from C to D.
pub fn set_difference_witness(
    c: &SetDescriptor,
    d: &SetDescriptor,
    cfg: &SampleConfig,
) -> Result<Vector, SetError> {
    if c.dim() != d.dim() {
        return Err(SetError::DimensionMismatch {
            expected: c.dim(),
            found: d.dim(),
        });
    }
    diff_project(c, d, &Vector::zeros(c.dim()), cfg.atol)
}

/// P_{cl(D - C)} z. Closed forms are used where cl(D - C) is a catalog set;
/// otherwise alternating minimization of ||d - c - z||.
pub fn diff_project(
    c: &SetDescriptor,
    d: &SetDescriptor,
    z: &Vector,
    atol: f64,
) -> Result<Vector, SetError> {
    if let Some(v) = exact(c, d, z)? {
        return Ok(v);
    }
    alternate(c, d, z, atol)
}

fn exact(c: &SetDescriptor, d: &SetDescriptor, z: &Vector) -> Result<Option<Vector>, SetError> {
    use SetDescriptor as S;
    match (c, d) {
        (S::Singleton { u }, _) => return Ok(Some(&d.project(&(z + u))? - u)),
        (_, S::Singleton { u: v }) => return Ok(Some(v - &c.project(&(v - z))?)),
        (S::Translate { base, shift }, _) => {
            let inner = exact(base, d, &(z + shift))?;
            return Ok(inner.map(|p| &p - shift));
        }
        (_, S::Translate { base, shift }) => {
            let inner = exact(c, base, &(z - shift))?;
            return Ok(inner.map(|p| &p + shift));
        }
        (S::Box { lower: cl, upper: cu }, S::Box { lower: dl, upper: du }) => {
            let lo: Vec<f64> = dl.iter().zip(cu).map(|(a, b)| a - b).collect();
            let hi: Vec<f64> = du.iter().zip(cl).map(|(a, b)| a - b).collect();
            return Ok(Some(S::Box { lower: lo, upper: hi }.project(z)?));
        }
        (S::Ball { center: cc, radius: rc }, S::Ball { center: dc, radius: rd }) => {
            let b = S::Ball {
                center: dc - cc,
                radius: rc + rd,
            };
            return Ok(Some(b.project(z)?));
        }
        _ => {}
    }
    if let (Some((pc, dc)), Some((pd, dd))) = (c.affine_form(), d.affine_form()) {
        let mut dirs = dc;
        dirs.extend(dd);
        let w = linalg::orthonormalize(&dirs);
        let p = &pd - &pc;
        return Ok(Some(&p + &linalg::project_span(&w, &(z - &p))));
    }
    if let (Some(gc), Some(gd)) = (c.cone_generators(), d.cone_generators()) {
        let mut all = gd;
        all.extend(gc.into_iter().map(|g| -g));
        let units = unit_generators(&all);
        if first_bad_pair(&units).is_none() {
            let mut p = Vector::zeros(z.dim());
            for u in &units {
                p.axpy(u.dot(z).max(0.0), u);
            }
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn alternate(c: &SetDescriptor, d: &SetDescriptor, z: &Vector, atol: f64) -> Result<Vector, SetError> {
    let mut cp = c.project(&Vector::zeros(z.dim()))?;
    let mut dp = d.project(&(&cp + z))?;
    let mut v = &dp - &cp;
    let tol = atol.max(1e-14);
    for _ in 0..MAX_ALTERNATIONS {
        cp = c.project(&(&dp - z))?;
        dp = d.project(&(&cp + z))?;
        let next = &dp - &cp;
        let step = (&next - &v).norm();
        v = next;
        if step <= tol * 1e-3 * (1.0 + v.norm()) {
            return Ok(v);
        }
    }
    Err(SetError::NotSupported(format!(
        "alternating minimization between {} and {} did not settle",
        c.label(),
        d.label()
    )))
}
