//! Linear orthogonal projectors: L = LᵀL.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::AlgebraError;
use crate::linalg;
use crate::tol;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixCheck {
    pub is_orthogonal_projector: bool,
    /// Orthonormal basis of ran L; empty when the check fails.
    pub range_basis: Vec<Vector>,
    /// max |L - LᵀL|.
    pub defect: f64,
}

pub fn matrix_projector_check(l: &DMatrix<f64>) -> Result<MatrixCheck, AlgebraError> {
    let (rows, cols) = l.shape();
    if rows != cols {
        return Err(AlgebraError::NonSquare { rows, cols });
    }
    if l.iter().any(|v| !v.is_finite()) {
        return Err(AlgebraError::NonFiniteMatrix);
    }
    let defect = (l - l.transpose() * l).amax();
    if defect > tol::EXACT {
        return Ok(MatrixCheck {
            is_orthogonal_projector: false,
            range_basis: Vec::new(),
            defect,
        });
    }
    let sym = (l + l.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let vecs: Vec<Vector> = (0..rows)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| Vector::new(eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    Ok(MatrixCheck {
        is_orthogonal_projector: true,
        range_basis: linalg::orthonormalize(&vecs),
        defect,
    })
}
