//! Energy balance and weak-form checks for computed mode flows.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{solve_stokes_mode, ModeFlowSolution, ModeStokesProblem, Phase, PhaseFlow, PhaseOps, StokesGrids};
use crate::error::Result;
use crate::params::PhysParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Work done by the interface traction against the viscous dissipation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBalance {
    /// `integral over the interface of (u . n) conj(traction)`.
    pub interface_work: f64,
    /// `1/2 integral of nu |eps(u)|^2`.
    pub viscous_dissipation: f64,
}

impl EnergyBalance {
    pub fn residual(&self) -> f64 {
        (self.interface_work - self.viscous_dissipation).abs()
    }
}

fn apply(d: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..d.nrows()).map(|i| v.iter().enumerate().map(|(j, x)| x * d[(i, j)]).sum()).collect()
}

/// Strain components `(eps_rr, eps_rtheta, eps_thetatheta)` at the nodes.
fn strain(k: i32, ops: &PhaseOps, flow: &PhaseFlow) -> Vec<[Complex64; 3]> {
    let ik = I * f64::from(k);
    let du = apply(&ops.d1, &flow.u_r);
    let dw = apply(&ops.d1, &flow.u_theta);
    ops.r
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let (u, w) = (flow.u_r[i], flow.u_theta[i]);
            [2.0 * du[i], dw[i] - w / r + ik * u / r, 2.0 * (u + ik * w) / r]
        })
        .collect()
}

fn contract(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0].conj() + 2.0 * a[1] * b[1].conj() + a[2] * b[2].conj()
}

fn phase_ops(sol: &ModeFlowSolution) -> (PhaseOps, PhaseOps) {
    (PhaseOps::inner(sol.grids().inner(), sol.k), PhaseOps::outer(sol.grids().outer()))
}

/// Viscous dissipation of a computed flow.
pub fn viscous_dissipation(sol: &ModeFlowSolution, params: &PhysParams) -> f64 {
    let (inn, out) = phase_ops(sol);
    let part = |ops: &PhaseOps, flow: &PhaseFlow, weights: Vec<f64>, nu: f64| -> f64 {
        strain(sol.k, ops, flow).iter().zip(weights).map(|(e, w)| w * nu * contract(e, e).re).sum::<f64>()
    };
    0.5 * (part(&inn, &sol.inner, sol.grids().inner().area_weights(), params.nu_plus)
        + part(&out, &sol.outer, sol.grids().outer().area_weights(), params.nu_minus))
}

/// Both sides of the energy identity for the unit interface perturbation of mode `k`.
pub fn energy_balance(k: i32, params: &PhysParams, grids: &StokesGrids) -> Result<EnergyBalance> {
    let symbol = params.curvature_symbol(k);
    let sol = solve_stokes_mode(&ModeStokesProblem::new(k, Complex64::new(symbol, 0.0), *params, grids.clone()))?;
    Ok(EnergyBalance {
        interface_work: 2.0 * PI * (sol.v_interface * symbol).re,
        viscous_dissipation: viscous_dissipation(&sol, params),
    })
}

/// `|interface work - viscous dissipation|` for the unit perturbation of mode `k`.
pub fn stokes_energy_identity_residual(k: i32, params: &PhysParams, grids: &StokesGrids) -> Result<f64> {
    Ok(energy_balance(k, params, grids)?.residual())
}

type Profile = Box<dyn Fn(Phase, f64) -> (Complex64, Complex64) + Send + Sync>;

/// Velocity test field `(phi_r, phi_theta) e^{i k theta}`, given per phase as
/// value and radial derivative. It must vanish at the wall, be continuous
/// at `r = 1` and share the parity of the mode's velocity in the disk.
pub struct TestField {
    pub phi_r: Profile,
    pub phi_theta: Profile,
}

impl TestField {
    /// Polynomial fields `r^{|k| + 1 + 2j}` in the disk, continued linearly to
    /// zero at the wall, plus annulus bubbles.
    pub fn family(k: i32, r_container: f64) -> Vec<TestField> {
        let zero: fn(Phase, f64) -> (Complex64, Complex64) =
            |_, _| (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let base = k.unsigned_abs() as i32 + 1;
        let rc = r_container;
        let radial = move |j: i32| -> Profile {
            Box::new(move |phase, r| match phase {
                Phase::Inner => {
                    let e = base + 2 * j;
                    (Complex64::from(r.powi(e)), Complex64::from(f64::from(e) * r.powi(e - 1)))
                }
                Phase::Outer => {
                    let lin = (rc - r) / (rc - 1.0);
                    let bub = (r - 1.0) * (rc - r) * r.powi(j);
                    let dbub = (rc - r) * r.powi(j) - (r - 1.0) * r.powi(j)
                        + (r - 1.0) * (rc - r) * f64::from(j) * r.powi(j - 1);
                    (Complex64::from(lin + bub), Complex64::from(-1.0 / (rc - 1.0) + dbub))
                }
            })
        };
        let bubble = move || -> Profile {
            Box::new(move |phase, r| match phase {
                Phase::Inner => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                Phase::Outer => (Complex64::from((r - 1.0) * (rc - r)), Complex64::from(rc + 1.0 - 2.0 * r)),
            })
        };
        let mut out = Vec::new();
        for j in 0..3 {
            out.push(TestField { phi_r: radial(j), phi_theta: Box::new(zero) });
            out.push(TestField { phi_r: Box::new(zero), phi_theta: radial(j) });
        }
        out.push(TestField { phi_r: bubble(), phi_theta: Box::new(zero) });
        out.push(TestField { phi_r: Box::new(zero), phi_theta: bubble() });
        out
    }
}

/// Residuals `a(u, phi) + b(p, phi) - integral over S of h . conj(phi)` of a
/// homogeneous-bulk solution for each test field.
pub fn weak_form_residual(sol: &ModeFlowSolution, problem: &ModeStokesProblem, fields: &[TestField]) -> Vec<f64> {
    let (inn, out) = phase_ops(sol);
    let ik = I * f64::from(sol.k);
    let params = &problem.params;
    let phase_term = |ops: &PhaseOps, flow: &PhaseFlow, phase: Phase, weights: Vec<f64>, nu: f64, f: &TestField| {
        let eu = strain(sol.k, ops, flow);
        let np = ops.rp.len();
        let p_nodes: Vec<Complex64> =
            (0..ops.r.len()).map(|i| (0..np).map(|j| flow.pressure[j] * ops.p_to_nodes[(i, j)]).sum()).collect();
        ops.r
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let (pr, dpr) = (f.phi_r)(phase, r);
                let (pt, dpt) = (f.phi_theta)(phase, r);
                let ephi = [2.0 * dpr, dpt - pt / r + ik * pr / r, 2.0 * (pr + ik * pt) / r];
                let div = dpr + pr / r + ik * pt / r;
                weights[i] * (0.5 * nu * contract(&eu[i], &ephi) - p_nodes[i] * div.conj())
            })
            .sum::<Complex64>()
    };
    fields
        .iter()
        .map(|f| {
            let lhs = phase_term(&inn, &sol.inner, Phase::Inner, sol.grids().inner().area_weights(), params.nu_plus, f)
                + phase_term(&out, &sol.outer, Phase::Outer, sol.grids().outer().area_weights(), params.nu_minus, f);
            let (pr, _) = (f.phi_r)(Phase::Inner, 1.0);
            let (pt, _) = (f.phi_theta)(Phase::Inner, 1.0);
            let rhs = 2.0 * PI * (problem.h_normal * pr.conj() + problem.h_tangent * pt.conj());
            (lhs - rhs).norm()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_mode_has_no_energy() {
        let p = PhysParams::default();
        let g = StokesGrids::new(16, 16, 2.0).unwrap();
        assert_eq!(stokes_energy_identity_residual(1, &p, &g).unwrap(), 0.0);
    }

    #[test]
    fn energy_identity_closes() {
        let p = PhysParams { nu_plus: 0.5, nu_minus: 3.0, ..Default::default() };
        let g = StokesGrids::new(32, 32, 2.0).unwrap();
        for k in 2..=8 {
            let b = energy_balance(k, &p, &g).unwrap();
            assert!(b.viscous_dissipation > 0.0);
            assert!(b.residual() < 1e-9 * b.viscous_dissipation, "k = {k}: {b:?}");
        }
    }

    #[test]
    fn test_fields_are_continuous_and_vanish_at_wall() {
        for k in [0, 1, 2, 5] {
            for f in TestField::family(k, 2.0) {
                for prof in [&f.phi_r, &f.phi_theta] {
                    assert!((prof(Phase::Inner, 1.0).0 - prof(Phase::Outer, 1.0).0).norm() < 1e-15);
                    assert!(prof(Phase::Outer, 2.0).0.norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn weak_form_holds_for_collocation_solution() {
        let p = PhysParams { nu_minus: 2.0, ..Default::default() };
        for k in [0, 2, 3] {
            let prob = ModeStokesProblem {
                h_tangent: Complex64::new(0.0, 0.3),
                ..ModeStokesProblem::new(
                    k,
                    Complex64::new(p.curvature_symbol(k), 0.1),
                    p,
                    StokesGrids::new(28, 28, 2.0).unwrap(),
                )
            };
            let sol = solve_stokes_mode(&prob).unwrap();
            let res = weak_form_residual(&sol, &prob, &TestField::family(k, 2.0));
            assert!(res.iter().all(|&r| r < 1e-8), "k = {k}: {res:?}");
        }
    }
}
