//! One-dimensional radial grids and their matching quadrature rules.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral;

pub const MIN_NODES: usize = 8;

/// Discretization family of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridFamily {
    /// Equispaced nodes; piecewise-linear product quadrature.
    Uniform,
    /// Arbitrary increasing nodes; piecewise-linear product quadrature.
    Nonuniform,
    /// Chebyshev-Gauss-Lobatto nodes; Clenshaw-Curtis quadrature.
    Chebyshev,
    /// Positive half of an odd-order Chebyshev grid on [-R, R]. The node set
    /// avoids r = 0; functions are extended to negative r by their parity.
    PolarParity,
}

/// Strictly increasing radii spanning one phase interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    family: GridFamily,
}

impl RadialGrid {
    /// `intervals + 1` equispaced nodes on `[a, b]`.
    pub fn uniform(a: f64, b: f64, intervals: usize) -> Result<Self> {
        check_interval(a, b)?;
        let h = (b - a) / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| a + h * i as f64).collect();
        nodes[intervals] = b;
        Self::checked(nodes, GridFamily::Uniform)
    }

    /// `order + 1` Chebyshev-Lobatto nodes on `[a, b]`, increasing.
    pub fn chebyshev(a: f64, b: f64, order: usize) -> Result<Self> {
        check_interval(a, b)?;
        let mut nodes: Vec<f64> =
            spectral::chebyshev_lobatto(order).into_iter().rev().map(|x| a + 0.5 * (b - a) * (x + 1.0)).collect();
        nodes[0] = a;
        nodes[order] = b;
        Self::checked(nodes, GridFamily::Chebyshev)
    }

    /// `order + 1` positive nodes of the Chebyshev grid of order `2 order + 1`
    /// on `[-radius, radius]`; the largest node is `radius`.
    pub fn polar_parity(radius: f64, order: usize) -> Result<Self> {
        check_interval(0.0, radius)?;
        let full = 2 * order + 1;
        let mut nodes: Vec<f64> = (0..=order).rev().map(|j| radius * (j as f64 * PI / full as f64).cos()).collect();
        nodes[order] = radius;
        Self::checked(nodes, GridFamily::PolarParity)
    }

    /// Builds a grid from raw nodes, recognising uniform and Chebyshev layouts.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        validate_nodes(&nodes)?;
        let n = nodes.len() - 1;
        let (a, b) = (nodes[0], nodes[n]);
        let tol = 1e-12 * (b - a).max(b.abs());
        let family = if let Ok(c) = Self::chebyshev(a, b, n) {
            if close(&c.nodes, &nodes, tol) {
                GridFamily::Chebyshev
            } else if close(&Self::uniform(a, b, n)?.nodes, &nodes, tol) {
                GridFamily::Uniform
            } else {
                GridFamily::Nonuniform
            }
        } else {
            GridFamily::Nonuniform
        };
        Ok(Self { nodes, family })
    }

    fn checked(nodes: Vec<f64>, family: GridFamily) -> Result<Self> {
        validate_nodes(&nodes)?;
        Ok(Self { nodes, family })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn family(&self) -> GridFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Smallest spacing between consecutive nodes.
    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Weights `w_i` with `sum_i w_i f(r_i) ~ integral of f over the planar
    /// region swept by the interval (area element `2 pi r dr`).
    ///
    /// For [`GridFamily::PolarParity`] the integrand must be even in `r`,
    /// which holds for any product of two fields of the same angular mode.
    pub fn area_weights(&self) -> Vec<f64> {
        match self.family {
            GridFamily::Uniform | GridFamily::Nonuniform => {
                piecewise_linear_moments(&self.nodes).into_iter().map(|m| 2.0 * PI * m).collect()
            }
            GridFamily::Chebyshev => {
                let n = self.len() - 1;
                let half = 0.5 * (self.end() - self.start());
                let cc = spectral::clenshaw_curtis_weights(n);
                // `cc` is ordered from x = 1 downwards; nodes ascend.
                self.nodes.iter().enumerate().map(|(i, &r)| 2.0 * PI * half * cc[n - i] * r).collect()
            }
            GridFamily::PolarParity => {
                // integral_0^R f r dr = 1/2 integral_0^{R^2} f(sqrt s) ds, and an even
                // interpolant of f is a polynomial in s = r^2.
                let s_nodes: Vec<f64> = self.nodes.iter().map(|r| r * r).collect();
                let s_max = self.end() * self.end();
                let (gx, gw) = spectral::gauss_legendre(self.len() + 1);
                let mut w = vec![0.0; self.len()];
                for (&x, &wt) in gx.iter().zip(&gw) {
                    let s = 0.5 * s_max * (x + 1.0);
                    for (j, l) in spectral::interpolation_row(&s_nodes, s).into_iter().enumerate() {
                        w[j] += 0.5 * (0.5 * s_max * wt) * l;
                    }
                }
                w.into_iter().map(|v| 2.0 * PI * v).collect()
            }
        }
    }

    /// Radial derivative of nodal values of a radially symmetric field.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.len(), "value count must match the grid");
        match self.family {
            GridFamily::Uniform | GridFamily::Nonuniform => three_point_derivative(&self.nodes, values),
            GridFamily::Chebyshev => {
                let d = spectral::differentiation_matrix(&self.nodes);
                (0..self.len()).map(|i| (0..self.len()).map(|j| d[(i, j)] * values[j]).sum()).collect()
            }
            GridFamily::PolarParity => {
                let d = self.parity_derivative_matrix(1.0);
                (0..self.len()).map(|i| (0..self.len()).map(|j| d[(i, j)] * values[j]).sum()).collect()
            }
        }
    }

    /// Derivative matrix on a polar-parity grid for functions with
    /// `f(-r) = parity * f(r)`.
    pub(crate) fn parity_derivative_matrix(&self, parity: f64) -> nalgebra::DMatrix<f64> {
        let pts = mirror(&self.nodes);
        fold_parity(&spectral::differentiation_matrix(&pts), self.len(), parity)
    }
}

/// Positive ascending points extended by their mirror images, ordered so that
/// index `j` and `2 len - 1 - j` are mirror pairs and the first half descends.
pub(crate) fn mirror(positive: &[f64]) -> Vec<f64> {
    positive.iter().rev().copied().chain(positive.iter().map(|&r| -r)).collect()
}

/// Folds an operator on a mirrored point set (see [`mirror`])
/// onto the positive nodes, in ascending order.
pub(crate) fn fold_parity(full: &nalgebra::DMatrix<f64>, n: usize, parity: f64) -> nalgebra::DMatrix<f64> {
    let mut out = nalgebra::DMatrix::zeros(n, n);
    // ascending index i corresponds to mirrored index n - 1 - i
    for i in 0..n {
        let fi = n - 1 - i;
        for j in 0..n {
            let fj = n - 1 - j;
            out[(i, j)] = full[(fi, fj)] + parity * full[(fi, 2 * n - 1 - fj)];
        }
    }
    out
}

/// `integral phi_i(r) r dr` for the piecewise-linear hat functions on `nodes`.
pub fn piecewise_linear_moments(nodes: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; nodes.len()];
    for e in 0..nodes.len() - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        // left hat (b - r)/h and right hat (r - a)/h against r
        m[e] += h * (2.0 * a + b) / 6.0;
        m[e + 1] += h * (a + 2.0 * b) / 6.0;
    }
    m
}

/// Second-order derivative on arbitrary increasing nodes (one-sided at the ends).
pub fn three_point_derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    let stencil = |i0: usize, at: usize| -> f64 {
        let (x0, x1, x2) = (x[i0], x[i0 + 1], x[i0 + 2]);
        let t = x[at];
        let l0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
        let l1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
        let l2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
        l0 * f[i0] + l1 * f[i0 + 1] + l2 * f[i0 + 2]
    };
    d[0] = stencil(0, 0);
    for i in 1..n - 1 {
        d[i] = stencil(i - 1, i);
    }
    d[n - 1] = stencil(n - 3, n - 1);
    d
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidGrid(format!("interval [{a}, {b}] is empty or not finite")));
    }
    Ok(())
}

fn validate_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.len() < MIN_NODES {
        return Err(Error::InvalidGrid(format!("need at least {MIN_NODES} nodes, got {}", nodes.len())));
    }
    if nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite node".into()));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
    }
    Ok(())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(g: &RadialGrid, f: impl Fn(f64) -> f64) -> f64 {
        g.area_weights().iter().zip(g.nodes()).map(|(w, &r)| w * f(r)).sum()
    }

    #[test]
    fn rejects_short_and_unsorted() {
        assert!(RadialGrid::uniform(0.0, 1.0, 6).is_err());
        assert!(RadialGrid::from_nodes(vec![0.0, 0.1, 0.3, 0.2, 0.4, 0.5, 0.6, 0.7]).is_err());
        assert!(RadialGrid::uniform(1.0, 1.0, 16).is_err());
    }

    #[test]
    fn constants_integrate_exactly() {
        let disk = RadialGrid::uniform(0.0, 1.0, 16).unwrap();
        assert!((integrate(&disk, |_| 2.0) - 2.0 * PI).abs() < 1e-14);
        let ring = RadialGrid::uniform(1.0, 2.0, 16).unwrap();
        assert!((integrate(&ring, |_| 1.0) - 3.0 * PI).abs() < 1e-13);
        let cheb = RadialGrid::chebyshev(1.0, 2.0, 12).unwrap();
        assert!((integrate(&cheb, |_| 1.0) - 3.0 * PI).abs() < 1e-13);
        let polar = RadialGrid::polar_parity(1.0, 10).unwrap();
        assert!((integrate(&polar, |_| 1.0) - PI).abs() < 1e-13);
    }

    #[test]
    fn spectral_rules_integrate_smooth_fields() {
        // integral over the unit disk of exp(-r^2) = pi (1 - 1/e)
        let exact = PI * (1.0 - (-1f64).exp());
        let polar = RadialGrid::polar_parity(1.0, 16).unwrap();
        assert!((integrate(&polar, |r| (-r * r).exp()) - exact).abs() < 1e-13);
        let cheb = RadialGrid::chebyshev(0.0, 1.0, 24).unwrap();
        assert!((integrate(&cheb, |r| (-r * r).exp()) - exact).abs() < 1e-13);
    }

    #[test]
    fn piecewise_linear_rule_is_second_order() {
        let exact = PI * (1.0 - (-1f64).exp());
        let err = |n| (integrate(&RadialGrid::uniform(0.0, 1.0, n).unwrap(), |r| (-r * r).exp()) - exact).abs();
        let order = (err(32) / err(64)).log2();
        assert!(order > 1.9, "observed order {order}");
    }

    #[test]
    fn recognises_families() {
        let u = RadialGrid::uniform(0.0, 1.0, 10).unwrap();
        assert_eq!(RadialGrid::from_nodes(u.nodes().to_vec()).unwrap().family(), GridFamily::Uniform);
        let c = RadialGrid::chebyshev(1.0, 3.0, 10).unwrap();
        assert_eq!(RadialGrid::from_nodes(c.nodes().to_vec()).unwrap().family(), GridFamily::Chebyshev);
        let mut n = u.nodes().to_vec();
        n[3] += 0.01;
        assert_eq!(RadialGrid::from_nodes(n).unwrap().family(), GridFamily::Nonuniform);
    }

    #[test]
    fn derivatives() {
        let c = RadialGrid::chebyshev(0.0, 1.0, 16).unwrap();
        let v: Vec<f64> = c.nodes().iter().map(|r| r.sin()).collect();
        for (d, r) in c.derivative(&v).iter().zip(c.nodes()) {
            assert!((d - r.cos()).abs() < 1e-12);
        }
        let p = RadialGrid::polar_parity(1.0, 12).unwrap();
        let v: Vec<f64> = p.nodes().iter().map(|r| (r * r).cos()).collect();
        for (d, r) in p.derivative(&v).iter().zip(p.nodes()) {
            assert!((d + 2.0 * r * (r * r).sin()).abs() < 1e-11);
        }
        let u = RadialGrid::uniform(0.0, 1.0, 20).unwrap();
        let v: Vec<f64> = u.nodes().iter().map(|r| r * r).collect();
        for (d, r) in u.derivative(&v).iter().zip(u.nodes()) {
            assert!((d - 2.0 * r).abs() < 1e-12);
        }
    }
}
