//! Kernel vectors and the absence of generalized eigenvectors at zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{assemble_mode_operator, LinearGrids, ModeOperator};
use crate::error::{Error, Result};
use crate::params::PhysParams;

/// Singular values below this fraction of the largest span the kernel.
const KERNEL_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemisimplicityReport {
    /// `(k, ||W (A x - e)|| / ||W e||)` for each kernel vector `e`, with `x`
    /// the weighted least-squares solution and `W` the square-rooted masses.
    pub residuals: Vec<(i32, f64)>,
    pub tol: f64,
    pub passed: bool,
}

/// Orthonormal basis of the numerical kernel of the mode matrix.
pub fn kernel_basis(op: &ModeOperator) -> Vec<DVector<f64>> {
    let svd = op.matrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < KERNEL_RTOL * smax)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Removes the component of `x` along the kernel, projecting along the
/// range (spectral projection for a semisimple zero eigenvalue).
pub fn remove_kernel_component(op: &ModeOperator, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let svd = op.matrix().clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("left vectors requested"), svd.v_t.expect("right vectors requested"));
    let smax = svd.singular_values.max();
    let idx: Vec<usize> = (0..op.dim()).filter(|&i| svd.singular_values[i] < KERNEL_RTOL * smax).collect();
    if idx.is_empty() {
        return Ok(x.clone());
    }
    let right = DMatrix::from_fn(op.dim(), idx.len(), |r, c| v_t[(idx[c], r)]);
    let left = DMatrix::from_fn(op.dim(), idx.len(), |r, c| u[(r, idx[c])]);
    let pairing = left.transpose() * &right;
    let inv = pairing
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem(format!("mode {} kernel meets the range", op.k())))?;
    let cx = |m: &DMatrix<f64>| m.map(Complex64::from);
    let coeff = cx(&inv) * cx(&left.transpose()) * x;
    Ok(x - cx(&right) * coeff)
}

/// Relative least-squares residuals of `A x = e` for the kernel vectors of one mode.
pub fn semisimplicity_of(op: &ModeOperator, tol: f64) -> SemisimplicityReport {
    let w: DVector<f64> = DVector::from_iterator(op.dim(), op.masses().iter().map(|m| m.sqrt()));
    let b = DMatrix::from_fn(op.dim(), op.dim(), |i, j| w[i] * op.matrix()[(i, j)]);
    let svd = b.clone().svd(true, true);
    let eps = KERNEL_RTOL * svd.singular_values.max();
    let residuals: Vec<(i32, f64)> = kernel_basis(op)
        .into_iter()
        .filter_map(|e| {
            let we = e.component_mul(&w);
            let norm = we.norm();
            if norm == 0.0 {
                return None;
            }
            let x = svd.solve(&we, eps).expect("singular vectors computed");
            Some((op.k(), (&b * x - &we).norm() / norm))
        })
        .collect();
    let passed = residuals.iter().all(|&(_, r)| r > tol);
    SemisimplicityReport { residuals, tol, passed }
}

/// Semisimplicity of the zero eigenvalue over the modes that carry kernel
/// vectors (`k = 0` and `k = +-1`).
pub fn semisimplicity_check(params: &PhysParams, grids: &LinearGrids, tol: f64) -> Result<SemisimplicityReport> {
    let mut residuals = Vec::new();
    for k in [0, 1, -1] {
        residuals.extend(semisimplicity_of(&assemble_mode_operator(k, params, grids)?, tol).residuals);
    }
    let passed = residuals.iter().all(|&(_, r)| r > tol);
    Ok(SemisimplicityReport { residuals, tol, passed })
}
