//! Small dense helpers: Gram-Schmidt and orthogonal complements.

use crate::tol;
use crate::vector::Vector;

/// Orthonormal basis of span(vectors). Vectors whose residual falls below
/// `tol::RANK` relative to their length are dropped.
pub fn orthonormalize(vectors: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &out {
                let c = r.dot(b);
                r.axpy(-c, b);
            }
        }
        let n = r.norm();
        if n > tol::RANK * n0.max(1.0) {
            out.push(r.scale(1.0 / n));
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n.
pub fn complement(basis: &[Vector], n: usize) -> Vec<Vector> {
    let ortho = orthonormalize(basis);
    let k = ortho.len();
    let mut all = ortho;
    all.extend((0..n).map(|i| Vector::basis(n, i)));
    let full = orthonormalize(&all);
    full[k..].to_vec()
}

/// Orthogonal projection onto span(basis); `basis` must be orthonormal.
pub fn project_span(basis: &[Vector], x: &Vector) -> Vector {
    let mut out = Vector::zeros(x.dim());
    for b in basis {
        out.axpy(x.dot(b), b);
    }
    out
}

/// Component of x orthogonal to span(basis); `basis` must be orthonormal.
pub fn reject_span(basis: &[Vector], x: &Vector) -> Vector {
    x - &project_span(basis, x)
}

/// Max deviation of the Gram matrix from the identity.
pub fn orthonormality_defect(basis: &[Vector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// True when the two orthonormal bases span mutually orthogonal subspaces.
pub fn spans_orthogonal(a: &[Vector], b: &[Vector], tol: f64) -> bool {
    a.iter().all(|u| b.iter().all(|v| u.dot(v).abs() <= tol))
}
