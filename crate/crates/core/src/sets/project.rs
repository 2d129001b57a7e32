use nalgebra::{DMatrix, DVector};

use super::{SetDescriptor, SetError};
use crate::linalg;
use crate::tol;
use crate::vector::Vector;

pub(super) fn project(s: &SetDescriptor, x: &Vector) -> Result<Vector, SetError> {
    use SetDescriptor as S;
    Ok(match s {
        S::Singleton { u } => u.clone(),
        S::Ball { center, radius } => {
            if *radius < 0.0 {
                return Err(SetError::InvalidDescriptor("negative radius".into()));
            }
            let d = x - center;
            let n = d.norm();
            if n <= *radius {
                x.clone()
            } else {
                let mut p = center.clone();
                p.axpy(radius / n, &d);
                p
            }
        }
        S::Box { lower, upper } => Vector::new(
            x.iter()
                .zip(lower.iter().zip(upper))
                .map(|(&xi, (&l, &u))| xi.max(l).min(u))
                .collect(),
        ),
        S::Hyperplane { normal, offset } => {
            let nn = nonzero_norm_sq(normal)?;
            let mut p = x.clone();
            p.axpy(-(normal.dot(x) - offset) / nn, normal);
            p
        }
        S::Halfspace { normal, offset } => {
            let nn = nonzero_norm_sq(normal)?;
            let excess = normal.dot(x) - offset;
            let mut p = x.clone();
            if excess > 0.0 {
                p.axpy(-excess / nn, normal);
            }
            p
        }
        S::Subspace { basis } => linalg::project_span(basis, x),
        S::Ray { direction } => {
            let nn = nonzero_norm_sq(direction)?;
            direction.scale(direction.dot(x).max(0.0) / nn)
        }
        S::FinitelyGeneratedCone { generators } => {
            let units = pairwise_generators(generators)?;
            let mut p = Vector::zeros(x.dim());
            for u in &units {
                p.axpy(u.dot(x).max(0.0), u);
            }
            p
        }
        S::PolarCone { of } => x - &project(of, x)?,
        S::TruncatedCone { cone, radius } => {
            let pk = project(cone, x)?;
            let n = pk.norm();
            pk.scale(radius / n.max(*radius))
        }
        S::Translate { base, shift } => {
            let mut p = project(base, &(x - shift))?;
            p += shift;
            p
        }
        S::MinkowskiSum(sum) => {
            let mut p = Vector::zeros(x.dim());
            for part in sum.parts() {
                p += &project(part, x)?;
            }
            p
        }
        S::Polytope { vertices } => min_norm_point(vertices, x),
        S::ConeIntersection(ci) => {
            let mut p = project(ci.k1(), x)?;
            p += &project(ci.k2(), x)?;
            p -= x;
            p
        }
    })
}

fn nonzero_norm_sq(v: &Vector) -> Result<f64, SetError> {
    let nn = v.norm_sq();
    if nn > 0.0 {
        Ok(nn)
    } else {
        Err(SetError::InvalidDescriptor("zero normal or direction".into()))
    }
}

/// Unit generators with positively parallel duplicates removed.
pub(crate) fn unit_generators(generators: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for g in generators {
        let Some(u) = g.normalized() else { continue };
        if !out.iter().any(|v| (v - &u).norm() <= tol::PAIRWISE) {
            out.push(u);
        }
    }
    out
}

/// True when u ⊥ v or u is a negative multiple of v (unit inputs).
pub(crate) fn units_pairwise(u: &Vector, v: &Vector) -> bool {
    u.dot(v).abs() <= tol::PAIRWISE || (u + v).norm() <= tol::PAIRWISE
}

/// First pair of unit generators violating the pairwise condition.
pub(crate) fn first_bad_pair(units: &[Vector]) -> Option<(usize, usize)> {
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            if !units_pairwise(&units[i], &units[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

pub(crate) fn pairwise_generators(generators: &[Vector]) -> Result<Vec<Vector>, SetError> {
    let units = unit_generators(generators);
    match first_bad_pair(&units) {
        None => Ok(units),
        Some((i, j)) => Err(SetError::UnsupportedExactProjection(format!(
            "generators {} and {} are neither orthogonal nor antipodal",
            units[i], units[j]
        ))),
    }
}

/// Wolfe's minimum-norm-point method applied to conv(vertices) - x.
fn min_norm_point(vertices: &[Vector], x: &Vector) -> Vector {
    let pts: Vec<Vector> = vertices.iter().map(|v| v - x).collect();
    let scale = pts.iter().map(Vector::norm_sq).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-12;

    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_sq().total_cmp(&pts[b].norm_sq()))
        .unwrap_or(0);
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut y = pts[start].clone();

    for _ in 0..(50 * pts.len() + 100) {
        let (j, yj) = (0..pts.len())
            .map(|i| (i, y.dot(&pts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if y.norm_sq() - yj <= eps * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let mu = affine_minimizer(&pts, &active);
            if mu.iter().all(|&m| m > eps) {
                lambda = mu;
                break;
            }
            let mut theta: f64 = 1.0;
            for (l, m) in lambda.iter().zip(&mu) {
                if *m <= eps && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= eps {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if active.len() <= 1 {
                break;
            }
        }
        y = Vector::zeros(x.dim());
        for (&i, &l) in active.iter().zip(&lambda) {
            y.axpy(l, &pts[i]);
        }
    }
    &y + x
}

/// Minimizer of ||Σ μ_i p_i|| subject to Σ μ_i = 1 over the active points.
fn affine_minimizer(pts: &[Vector], active: &[usize]) -> Vec<f64> {
    let m = active.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut b = DVector::<f64>::zeros(m + 1);
    for r in 0..m {
        for c in 0..m {
            a[(r, c)] = pts[active[r]].dot(&pts[active[c]]);
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    b[m] = 1.0;
    let sol = a
        .clone()
        .lu()
        .solve(&b)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .or_else(|| a.svd(true, true).solve(&b, 1e-14).ok())
        .unwrap_or_else(|| {
            let mut s = DVector::zeros(m + 1);
            s[0] = 1.0;
            s
        });
    sol.iter().take(m).copied().collect()
}
