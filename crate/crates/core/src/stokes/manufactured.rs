//! Manufactured mode solutions: smooth prescribed flows whose body forces,
//! divergence and interface data are derived by forward differentiation.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{BodyForce, ModeFlowSolution, ModeForcing, ModeStokesProblem, Phase, StokesGrids};
use crate::params::PhysParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub fn var(x: f64) -> Self {
        Self { v: x, d: 1.0, dd: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { v: c, d: 0.0, dd: 0.0 }
    }

    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        Self { v: f, d: df * self.d, dd: ddf * self.d * self.d + df * self.dd }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn powi(self, n: i32) -> Self {
        let nf = f64::from(n);
        let p = |e: i32| if e < 0 && self.v == 0.0 { 0.0 } else { self.v.powi(e) };
        self.chain(p(n), nf * p(n - 1), nf * (nf - 1.0) * p(n - 2))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d: -self.d, dd: -self.dd }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, d: self.d * o.v + self.v * o.d, dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self * o.v, d: self * o.d, dd: self * o.dd }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        (1.0 / c) * self
    }
}

/// Radial profiles `(U, V, P)` with `u_r = U`, `u_theta = i V`, `p = P`.
type Profiles = fn(i32, f64, Jet) -> [Jet; 3];

fn inner_profiles(k: i32, _rc: f64, r: Jet) -> [Jet; 3] {
    let ka = k.abs();
    let a = if ka >= 1 { ka - 1 } else { 1 };
    let r2 = r * r;
    let u = if ka >= 1 { r.powi(a) * (r2 + 1.0) * (r2 / 3.0).exp() } else { r * r2.cos() };
    let v = r.powi(a) * (2.0 * Jet::constant(1.0) - r2) * r2.cos();
    let p = r.powi(ka) * (-r2).exp();
    [u, v, p]
}

fn outer_profiles(_k: i32, rc: f64, r: Jet) -> [Jet; 3] {
    let gap = Jet::constant(rc) - r;
    [gap * r.sin(), gap * (2.0 * r).cos(), r.ln() + r]
}

/// A fixed smooth two-phase flow of mode `k` that has the parity of a
/// regular mode at the centre and vanishes at the wall.
pub struct ManufacturedSolution {
    pub k: i32,
    pub params: PhysParams,
    inner: Profiles,
    outer: Profiles,
}

impl ManufacturedSolution {
    pub fn standard(k: i32, params: PhysParams) -> Self {
        Self { k, params, inner: inner_profiles, outer: outer_profiles }
    }

    fn profiles(&self, phase: Phase, r: f64) -> [Jet; 3] {
        let f = match phase {
            Phase::Inner => self.inner,
            Phase::Outer => self.outer,
        };
        f(self.k, self.params.r_container, Jet::var(r))
    }

    fn nu(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Inner => self.params.nu_plus,
            Phase::Outer => self.params.nu_minus,
        }
    }

    /// Exact `(u_r, u_theta)` at radius `r`.
    pub fn velocity(&self, phase: Phase, r: f64) -> (Complex64, Complex64) {
        let [u, v, _] = self.profiles(phase, r);
        (Complex64::from(u.v), I * v.v)
    }

    /// Normal and tangential traction of the exact flow at `r = 1`.
    fn traction(&self, phase: Phase) -> (Complex64, Complex64) {
        let [u, v, p] = self.profiles(phase, 1.0);
        let nu = self.nu(phase);
        let k = f64::from(self.k);
        (Complex64::from(2.0 * nu * u.d - p.v), I * nu * (v.d - v.v + k * u.v))
    }

    /// The mode problem whose solution is this flow.
    pub fn problem(&self, grids: StokesGrids) -> ModeStokesProblem {
        let (ni, ti) = self.traction(Phase::Inner);
        let (no, to) = self.traction(Phase::Outer);
        ModeStokesProblem { h_tangent: ti - to, ..ModeStokesProblem::new(self.k, ni - no, self.params, grids) }
    }

    /// Largest nodal velocity error of a computed solution.
    pub fn velocity_error(&self, sol: &ModeFlowSolution) -> f64 {
        let phase_err = |phase: Phase, flow: &super::PhaseFlow| {
            flow.nodes
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let (ur, ut) = self.velocity(phase, r);
                    (flow.u_r[i] - ur).norm().max((flow.u_theta[i] - ut).norm())
                })
                .fold(0.0, f64::max)
        };
        phase_err(Phase::Inner, &sol.inner).max(phase_err(Phase::Outer, &sol.outer))
    }
}

impl ModeForcing for ManufacturedSolution {
    fn body(&self, phase: Phase, r: f64) -> BodyForce {
        let [u, v, p] = self.profiles(phase, r);
        let nu = self.nu(phase);
        let k = f64::from(self.k);
        let lap = |f: Jet| f.dd + f.d / r - (k * k + 1.0) * f.v / (r * r);
        BodyForce {
            f_r: Complex64::from(-nu * (lap(u) + 2.0 * k * v.v / (r * r)) + p.d),
            f_theta: I * (-nu * (lap(v) + 2.0 * k * u.v / (r * r)) + k * p.v / r),
            g: Complex64::from(u.d + u.v / r - k * v.v / r),
        }
    }

    fn velocity_jump(&self) -> (Complex64, Complex64) {
        let (ui, ti) = self.velocity(Phase::Inner, 1.0);
        let (uo, to) = self.velocity(Phase::Outer, 1.0);
        (ui - uo, ti - to)
    }
}
