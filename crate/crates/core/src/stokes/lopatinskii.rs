//! Lopatinskii-Shapiro condition for the two-phase Stokes interface problem
//! in the flat half-space model.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LSReport {
    pub xi: Vec<f64>,
    pub min_singular_value: f64,
    pub det_m: f64,
}

/// Values and normal derivatives at the interface of one decaying solution.
struct Trace {
    u: Vec<Complex64>,
    du: Vec<Complex64>,
    v: Complex64,
    dv: Complex64,
    p: Complex64,
}

/// Decaying solutions with tangential amplitude `alpha` (zero pressure).
fn tangential(alpha: &[f64], xi: &[f64], sign: f64) -> Trace {
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot: f64 = alpha.iter().zip(xi).map(|(a, x)| a * x).sum();
    let v = sign * I * dot / norm;
    Trace {
        u: alpha.iter().map(|&a| Complex64::from(a)).collect(),
        du: alpha.iter().map(|&a| Complex64::from(-norm * a)).collect(),
        v,
        dv: -norm * v,
        p: Complex64::new(0.0, 0.0),
    }
}

/// Decaying solution with pressure amplitude `beta`.
fn pressure_driven(beta: f64, xi: &[f64], sign: f64, nu: f64) -> Trace {
    let norm2: f64 = xi.iter().map(|x| x * x).sum();
    let norm = norm2.sqrt();
    Trace {
        u: xi.iter().map(|&x| I * beta * x / norm2).collect(),
        du: xi.iter().map(|&x| -2.0 * I * beta * x / norm).collect(),
        v: Complex64::new(0.0, 0.0),
        dv: Complex64::from(sign * beta),
        p: Complex64::from(2.0 * beta * nu),
    }
}

/// Builds the boundary matrix on the `2N`-dimensional space of decaying
/// solutions, with tangential frequency `xi` in `R^{N-1}`, and reports its
/// smallest singular value together with the determinant of the reduced
/// pressure-amplitude system.
pub fn verify_lopatinskii(nu_plus: f64, nu_minus: f64, xi: &[f64]) -> Result<LSReport> {
    if !(nu_plus > 0.0 && nu_minus > 0.0 && nu_plus.is_finite() && nu_minus.is_finite()) {
        return Err(Error::InvalidParameter(format!("viscosities must be positive, got {nu_plus}, {nu_minus}")));
    }
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if xi.is_empty() || !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidParameter("tangential frequency must be nonzero and finite".into()));
    }
    let t = xi.len();
    let n = t + 1;
    // columns: alpha_+ (t), alpha_- (t), beta_+, beta_-
    let mut cols: Vec<(Trace, f64)> = Vec::with_capacity(2 * n);
    for (sign, _) in [(1.0, nu_plus), (-1.0, nu_minus)] {
        for j in 0..t {
            let mut e = vec![0.0; t];
            e[j] = 1.0;
            cols.push((tangential(&e, xi, sign), sign));
        }
    }
    cols.push((pressure_driven(norm, xi, 1.0, nu_plus), 1.0));
    cols.push((pressure_driven(norm, xi, -1.0, nu_minus), -1.0));

    let mut b = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (c, (tr, sign)) in cols.iter().enumerate() {
        let inner = *sign > 0.0;
        let s = if inner { 1.0 } else { -1.0 };
        let nu = if inner { nu_plus } else { nu_minus };
        // stress balance, scaled by 1/|xi|
        for j in 0..t {
            let tangential = if inner { tr.du[j] + I * xi[j] * tr.v } else { tr.du[j] - I * xi[j] * tr.v };
            b[(j, c)] = nu * tangential / norm;
        }
        b[(t, c)] = (2.0 * nu * tr.dv - s * tr.p) / norm;
        // velocity continuity
        for j in 0..t {
            b[(n + j, c)] = s * tr.u[j];
        }
        b[(n + t, c)] = s * tr.v;
    }
    let min_singular_value = b.singular_values().min();
    let s = nu_plus + nu_minus;
    let det_m = Matrix2::new(s, s, s, -s).determinant();
    Ok(LSReport { xi: xi.to_vec(), min_singular_value, det_m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_formula() {
        let r = verify_lopatinskii(1.0, 1.0, &[1.0]).unwrap();
        assert_eq!(r.det_m, -8.0);
        assert!(r.min_singular_value > 0.1);
    }

    #[test]
    fn homogeneous_of_degree_zero() {
        for xi in [vec![0.3], vec![1.0, -2.0]] {
            let a = verify_lopatinskii(0.4, 2.5, &xi).unwrap();
            let b = verify_lopatinskii(0.4, 2.5, &xi.iter().map(|x| 7.0 * x).collect::<Vec<_>>()).unwrap();
            assert!((a.min_singular_value - b.min_singular_value).abs() < 1e-12 * a.min_singular_value);
        }
    }

    #[test]
    fn rejects_zero_frequency() {
        assert!(verify_lopatinskii(1.0, 1.0, &[0.0]).is_err());
        assert!(verify_lopatinskii(1.0, 1.0, &[]).is_err());
        assert!(verify_lopatinskii(-1.0, 1.0, &[1.0]).is_err());
    }
}
