//! Polynomial interpolation, differentiation and quadrature on point sets.
//!
//! Everything here works on arbitrary distinct nodes through barycentric
//! weights, which keeps the Chebyshev, half-Chebyshev (polar) and
//! interior-pressure point sets on one code path.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Barycentric weights `1 / prod_{k != j} (x_j - x_k)`, rescaled by the
/// capacity of the interval so they neither overflow nor underflow.
pub fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scale = if hi > lo { 4.0 / (hi - lo) } else { 1.0 };
    x.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let p: f64 = x.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &xk)| (xj - xk) * scale).product();
            1.0 / p
        })
        .collect()
}

/// First-derivative matrix of the interpolating polynomial through `x`.
pub fn differentiation_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w = barycentric_weights(x);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Row of Lagrange basis values `l_j(t)` for the nodes `x`.
pub fn interpolation_row(x: &[f64], t: f64) -> Vec<f64> {
    if let Some(j) = x.iter().position(|&xj| xj == t) {
        let mut row = vec![0.0; x.len()];
        row[j] = 1.0;
        return row;
    }
    let w = barycentric_weights(x);
    let terms: Vec<f64> = x.iter().zip(&w).map(|(&xj, &wj)| wj / (t - xj)).collect();
    let sum: f64 = terms.iter().sum();
    terms.into_iter().map(|v| v / sum).collect()
}

/// Interpolation matrix from nodes `x` to targets `t`.
pub fn interpolation_matrix(x: &[f64], t: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(t.len(), x.len());
    for (i, &ti) in t.iter().enumerate() {
        for (j, v) in interpolation_row(x, ti).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Chebyshev-Gauss-Lobatto points `cos(j pi / n)`, `j = 0..=n`, descending from 1.
pub fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect()
}

/// Clenshaw-Curtis weights on `chebyshev_lobatto(n)` for integrals over [-1, 1].
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    let theta: Vec<f64> = (0..=n).map(|j| j as f64 * PI / nf).collect();
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
    }
    for j in 1..n {
        let mut v = 1.0;
        if n.is_multiple_of(2) {
            v -= (nf * theta[j]).cos() / (nf * nf - 1.0);
            for k in 1..n / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
            }
        } else {
            for k in 1..=(n - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        w[j] = 2.0 * v / nf;
    }
    w
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_polynomials_exactly() {
        let x = chebyshev_lobatto(8);
        let d = differentiation_matrix(&x);
        let f: Vec<f64> = x.iter().map(|&t| t.powi(5) - 2.0 * t).collect();
        for (i, &t) in x.iter().enumerate() {
            let df: f64 = (0..x.len()).map(|j| d[(i, j)] * f[j]).sum();
            assert!((df - (5.0 * t.powi(4) - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_smooth_functions() {
        for n in [8, 9, 24] {
            let x = chebyshev_lobatto(n);
            let w = clenshaw_curtis_weights(n);
            let s: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * t.exp()).sum();
            let tol = if n < 10 { 1e-6 } else { 1e-13 };
            assert!((s - (1f64.exp() - (-1f64).exp())).abs() < tol);
        }
    }

    #[test]
    fn gauss_legendre_degree_exactness() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * t.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_polynomials() {
        let x = chebyshev_lobatto(6);
        let row = interpolation_row(&x, x[2]);
        assert_eq!(row[2], 1.0);
        let row = interpolation_row(&x, 0.3);
        let v: f64 = row.iter().zip(&x).map(|(l, &t)| l * (t * t * t)).sum();
        assert!((v - 0.027).abs() < 1e-14);
    }
}
