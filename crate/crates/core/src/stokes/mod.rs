//! Two-phase Stokes flow around the unit circle, one angular mode at a time.
//!
//! Velocity and pressure are sought as `(u_r(r), u_theta(r), p(r)) e^{i k theta}`
//! in the disk `r < 1` and in the annulus `1 < r < R_C`. Both phases are
//! discretized by Chebyshev collocation with the pressure on a grid two
//! degrees lower. The disk uses only the positive half of a grid on
//! `[-1, 1]`, with the parity of each mode built into the differentiation
//! matrices, so the centre is never a collocation point.

mod identities;
mod lopatinskii;
pub mod manufactured;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{fold_parity, mirror, GridFamily, RadialGrid};
use crate::params::PhysParams;
use crate::spectral;

pub use identities::{stokes_energy_identity_residual, weak_form_residual, EnergyBalance, TestField};
pub use lopatinskii::{verify_lopatinskii, LSReport};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Phase index: `Inner` is the disk, `Outer` the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Inner,
    Outer,
}

/// Collocation grids for the disk and the annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesGrids {
    inner: RadialGrid,
    outer: RadialGrid,
}

impl StokesGrids {
    /// Polar-parity grid of order `n_inner` on the disk and a Chebyshev grid
    /// of order `n_outer` on `[1, r_container]`.
    pub fn new(n_inner: usize, n_outer: usize, r_container: f64) -> Result<Self> {
        Self::from_grids(RadialGrid::polar_parity(1.0, n_inner)?, RadialGrid::chebyshev(1.0, r_container, n_outer)?)
    }

    pub fn uniform_order(n: usize, params: &PhysParams) -> Result<Self> {
        Self::new(n, n, params.r_container)
    }

    pub fn from_grids(inner: RadialGrid, outer: RadialGrid) -> Result<Self> {
        if inner.family() != GridFamily::PolarParity || inner.end() != 1.0 {
            return Err(Error::InvalidGrid("inner Stokes grid must be a polar-parity grid ending at r = 1".into()));
        }
        if outer.family() != GridFamily::Chebyshev || outer.start() != 1.0 {
            return Err(Error::InvalidGrid("outer Stokes grid must be a Chebyshev grid starting at r = 1".into()));
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> &RadialGrid {
        &self.inner
    }

    pub fn outer(&self) -> &RadialGrid {
        &self.outer
    }

    fn check_container(&self, params: &PhysParams) -> Result<()> {
        if (self.outer.end() - params.r_container).abs() > 1e-12 * params.r_container {
            return Err(Error::InvalidGrid(format!(
                "outer grid ends at {} but the container radius is {}",
                self.outer.end(),
                params.r_container
            )));
        }
        Ok(())
    }
}

/// How the pressure constant is fixed for `k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PressureGauge {
    /// Mean of the outer pressure nodal values is zero.
    #[default]
    OuterMean,
    /// The outer pressure value at the given pressure node is zero.
    OuterNode(usize),
}

/// Traction-jump data for one angular mode.
#[derive(Debug, Clone)]
pub struct ModeStokesProblem {
    pub k: i32,
    pub h_normal: Complex64,
    pub h_tangent: Complex64,
    pub params: PhysParams,
    pub grids: StokesGrids,
    pub gauge: PressureGauge,
}

impl ModeStokesProblem {
    pub fn new(k: i32, h_normal: Complex64, params: PhysParams, grids: StokesGrids) -> Self {
        Self { k, h_normal, h_tangent: Complex64::new(0.0, 0.0), params, grids, gauge: PressureGauge::default() }
    }
}

/// Body force `(f_r, f_theta)` and divergence source `g` (with `div u = g`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BodyForce {
    pub f_r: Complex64,
    pub f_theta: Complex64,
    pub g: Complex64,
}

/// Extra data beyond the traction jump, used for manufactured solutions.
pub trait ModeForcing {
    fn body(&self, _phase: Phase, _r: f64) -> BodyForce {
        BodyForce::default()
    }

    /// Prescribed velocity jump `(u_r, u_theta)` inner minus outer.
    fn velocity_jump(&self) -> (Complex64, Complex64) {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
}

/// Homogeneous bulk equations and continuous velocity.
pub struct NoForcing;

impl ModeForcing for NoForcing {}

/// Mode amplitudes of velocity and pressure in one phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFlow {
    pub nodes: Vec<f64>,
    pub u_r: Vec<Complex64>,
    pub u_theta: Vec<Complex64>,
    pub pressure_nodes: Vec<f64>,
    pub pressure: Vec<Complex64>,
    /// Pressure interpolated to the interface.
    pub pressure_at_interface: Complex64,
}

/// Size of the algebraic and interface residuals of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveResiduals {
    pub system: f64,
    pub velocity_jump: f64,
    pub wall: f64,
}

#[derive(Debug, Clone)]
pub struct ModeFlowSolution {
    pub k: i32,
    pub inner: PhaseFlow,
    pub outer: PhaseFlow,
    /// Normal velocity `u_r(1)`.
    pub v_interface: Complex64,
    pub residuals: SolveResiduals,
    grids: StokesGrids,
}

impl ModeFlowSolution {
    /// Inner minus outer pressure at the interface.
    pub fn pressure_jump(&self) -> Complex64 {
        self.inner.pressure_at_interface - self.outer.pressure_at_interface
    }

    pub fn grids(&self) -> &StokesGrids {
        &self.grids
    }
}

/// Spectral operators of one phase in ascending node order.
pub(crate) struct PhaseOps {
    pub r: Vec<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    pub rp: Vec<f64>,
    pub dp: DMatrix<f64>,
    /// Interpolation of pressure values to `r = 1`.
    pub p_at_one: Vec<f64>,
    /// Interpolation of pressure values to the velocity nodes.
    pub p_to_nodes: DMatrix<f64>,
}

fn velocity_parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        -1.0
    } else {
        1.0
    }
}

impl PhaseOps {
    pub(crate) fn inner(grid: &RadialGrid, k: i32) -> Self {
        let r = grid.nodes().to_vec();
        let n = r.len();
        let (par, ppar) = (velocity_parity(k), -velocity_parity(k));
        let full = spectral::differentiation_matrix(&mirror(&r));
        let d1 = fold_parity(&full, n, par);
        let d2 = fold_parity(&(&full * &full), n, par);
        let rp = r[..n - 1].to_vec();
        let np = rp.len();
        let pfull = mirror(&rp);
        let dp = fold_parity(&spectral::differentiation_matrix(&pfull), np, ppar);
        let fold_row = |row: Vec<f64>| -> Vec<f64> { (0..np).map(|i| row[np - 1 - i] + ppar * row[np + i]).collect() };
        let p_at_one = fold_row(spectral::interpolation_row(&pfull, 1.0));
        let mut p_to_nodes = DMatrix::zeros(n, np);
        for (i, &ri) in r.iter().enumerate() {
            for (j, v) in fold_row(spectral::interpolation_row(&pfull, ri)).into_iter().enumerate() {
                p_to_nodes[(i, j)] = v;
            }
        }
        Self { r, d1, d2, rp, dp, p_at_one, p_to_nodes }
    }

    pub(crate) fn outer(grid: &RadialGrid) -> Self {
        let r = grid.nodes().to_vec();
        let n = r.len();
        let d1 = spectral::differentiation_matrix(&r);
        let d2 = &d1 * &d1;
        let rp = r[1..n - 1].to_vec();
        let dp = spectral::differentiation_matrix(&rp);
        let p_at_one = spectral::interpolation_row(&rp, 1.0);
        let p_to_nodes = spectral::interpolation_matrix(&rp, &r);
        Self { r, d1, d2, rp, dp, p_at_one, p_to_nodes }
    }
}

/// Column offsets of the unknowns `(U, V, P)` per phase, where `u_r = U`
/// and `u_theta = i V` make the collocation matrix real.
struct Layout {
    ui: usize,
    vi: usize,
    pi: usize,
    uo: usize,
    vo: usize,
    po: usize,
    size: usize,
}

impl Layout {
    fn new(ni: usize, no: usize) -> Self {
        let vi = ni;
        let pi = 2 * ni;
        let uo = 3 * ni - 1;
        let vo = uo + no;
        let po = vo + no;
        Self { ui: 0, vi, pi, uo, vo, po, size: po + no - 2 }
    }
}

/// Solves the homogeneous bulk problem driven by the traction jump.
pub fn solve_stokes_mode(problem: &ModeStokesProblem) -> Result<ModeFlowSolution> {
    solve_stokes_mode_forced(problem, &NoForcing)
}

/// Solves the mode problem with additional body forces, divergence source
/// and velocity jump.
pub fn solve_stokes_mode_forced(problem: &ModeStokesProblem, forcing: &dyn ModeForcing) -> Result<ModeFlowSolution> {
    let ModeStokesProblem { k, h_normal, h_tangent, params, grids, gauge } = problem;
    let k = *k;
    params.validate_planar()?;
    grids.check_container(params)?;
    if !(h_normal.re.is_finite() && h_normal.im.is_finite() && h_tangent.re.is_finite() && h_tangent.im.is_finite()) {
        return Err(Error::InvalidParameter("traction jump must be finite".into()));
    }
    let inn = PhaseOps::inner(&grids.inner, k);
    let out = PhaseOps::outer(&grids.outer);
    let (ni, no) = (inn.r.len(), out.r.len());
    let lay = Layout::new(ni, no);
    let kf = f64::from(k);
    let mut a = DMatrix::<f64>::zeros(lay.size, lay.size);
    let mut b = DVector::<Complex64>::zeros(lay.size);
    let mut row = 0;

    let mut bulk = |ops: &PhaseOps,
                    nodes: std::ops::Range<usize>,
                    p_shift: usize,
                    offs: (usize, usize, usize),
                    nu: f64,
                    phase: Phase| {
        let (ou, ov, op) = offs;
        let n = ops.r.len();
        for i in nodes {
            let r = ops.r[i];
            let pi = i - p_shift;
            let force = forcing.body(phase, r);
            // radial momentum
            for j in 0..n {
                a[(row, ou + j)] -= nu * (ops.d2[(i, j)] + ops.d1[(i, j)] / r);
            }
            a[(row, ou + i)] += nu * (kf * kf + 1.0) / (r * r);
            a[(row, ov + i)] -= 2.0 * nu * kf / (r * r);
            for j in 0..ops.rp.len() {
                a[(row, op + j)] += ops.dp[(pi, j)];
            }
            b[row] = force.f_r;
            row += 1;
            // angular momentum, divided by i
            for j in 0..n {
                a[(row, ov + j)] -= nu * (ops.d2[(i, j)] + ops.d1[(i, j)] / r);
            }
            a[(row, ov + i)] += nu * (kf * kf + 1.0) / (r * r);
            a[(row, ou + i)] -= 2.0 * nu * kf / (r * r);
            a[(row, op + pi)] += kf / r;
            b[row] = -I * force.f_theta;
            row += 1;
            // incompressibility
            for j in 0..n {
                a[(row, ou + j)] += ops.d1[(i, j)];
            }
            a[(row, ou + i)] += 1.0 / r;
            a[(row, ov + i)] -= kf / r;
            b[row] = force.g;
            row += 1;
        }
    };
    bulk(&inn, 0..ni - 1, 0, (lay.ui, lay.vi, lay.pi), params.nu_plus, Phase::Inner);
    bulk(&out, 1..no - 1, 1, (lay.uo, lay.vo, lay.po), params.nu_minus, Phase::Outer);

    let (nup, num) = (params.nu_plus, params.nu_minus);
    let (iface_i, iface_o) = (ni - 1, 0);
    // no slip at the wall
    a[(row, lay.uo + no - 1)] = 1.0;
    row += 1;
    a[(row, lay.vo + no - 1)] = 1.0;
    row += 1;
    // velocity jump
    let (l_r, l_theta) = forcing.velocity_jump();
    a[(row, lay.ui + iface_i)] = 1.0;
    a[(row, lay.uo + iface_o)] = -1.0;
    b[row] = l_r;
    row += 1;
    a[(row, lay.vi + iface_i)] = 1.0;
    a[(row, lay.vo + iface_o)] = -1.0;
    b[row] = -I * l_theta;
    row += 1;
    // normal traction jump
    for j in 0..ni {
        a[(row, lay.ui + j)] += 2.0 * nup * inn.d1[(iface_i, j)];
    }
    for (j, w) in inn.p_at_one.iter().enumerate() {
        a[(row, lay.pi + j)] -= w;
    }
    for j in 0..no {
        a[(row, lay.uo + j)] -= 2.0 * num * out.d1[(iface_o, j)];
    }
    for (j, w) in out.p_at_one.iter().enumerate() {
        a[(row, lay.po + j)] += w;
    }
    b[row] = *h_normal;
    row += 1;
    // tangential traction jump, divided by i
    for j in 0..ni {
        a[(row, lay.vi + j)] += nup * inn.d1[(iface_i, j)];
    }
    a[(row, lay.vi + iface_i)] -= nup;
    a[(row, lay.ui + iface_i)] += nup * kf;
    for j in 0..no {
        a[(row, lay.vo + j)] -= num * out.d1[(iface_o, j)];
    }
    a[(row, lay.vo + iface_o)] += num;
    a[(row, lay.uo + iface_o)] -= num * kf;
    b[row] = -I * h_tangent;
    row += 1;
    debug_assert_eq!(row, lay.size);

    let (b_re, b_im) = (b.map(|z| z.re), b.map(|z| z.im));
    let (x_re, x_im, system) = if k == 0 {
        let np = out.rp.len();
        let mut gauge_row = DVector::<f64>::zeros(lay.size);
        match *gauge {
            PressureGauge::OuterMean => (0..np).for_each(|j| gauge_row[lay.po + j] = 1.0 / np as f64),
            PressureGauge::OuterNode(j) if j < np => gauge_row[lay.po + j] = 1.0,
            PressureGauge::OuterNode(j) => {
                return Err(Error::InvalidParameter(format!("gauge node {j} out of range (0..{np})")))
            }
        }
        let aug = a.clone().insert_row(lay.size, 0.0);
        let mut aug = aug;
        aug.set_row(lay.size, &gauge_row.transpose());
        let svd = aug.svd(true, true);
        let tol = 1e-13 * svd.singular_values.max();
        let solve = |rhs: &DVector<f64>| -> Result<DVector<f64>> {
            svd.solve(&rhs.clone().insert_row(lay.size, 0.0), tol).map_err(|e| Error::SingularSystem(e.to_string()))
        };
        let (xr, xi) = (solve(&b_re)?, solve(&b_im)?);
        let res = (&a * &xr - &b_re).amax().max((&a * &xi - &b_im).amax());
        (xr, xi, res)
    } else {
        let lu = a.clone().lu();
        let solve = |rhs: &DVector<f64>| {
            lu.solve(rhs).ok_or_else(|| Error::SingularSystem(format!("mode {k} collocation matrix is singular")))
        };
        let (xr, xi) = (solve(&b_re)?, solve(&b_im)?);
        let res = (&a * &xr - &b_re).amax().max((&a * &xi - &b_im).amax());
        (xr, xi, res)
    };
    if !(x_re.iter().chain(x_im.iter()).all(|v| v.is_finite())) {
        return Err(Error::SingularSystem(format!("mode {k} solve produced non-finite values")));
    }
    let x = DVector::from_iterator(lay.size, x_re.iter().zip(x_im.iter()).map(|(&re, &im)| Complex64::new(re, im)));

    let flow = |ops: &PhaseOps, ou: usize, ov: usize, op: usize| -> PhaseFlow {
        let n = ops.r.len();
        let np = ops.rp.len();
        let pressure: Vec<Complex64> = (0..np).map(|j| x[op + j]).collect();
        let pressure_at_interface = ops.p_at_one.iter().zip(&pressure).map(|(w, p)| p * *w).sum();
        PhaseFlow {
            nodes: ops.r.clone(),
            u_r: (0..n).map(|j| x[ou + j]).collect(),
            u_theta: (0..n).map(|j| I * x[ov + j]).collect(),
            pressure_nodes: ops.rp.clone(),
            pressure,
            pressure_at_interface,
        }
    };
    let inner = flow(&inn, lay.ui, lay.vi, lay.pi);
    let outer = flow(&out, lay.uo, lay.vo, lay.po);
    let velocity_jump = ((inner.u_r[iface_i] - outer.u_r[iface_o] - l_r).norm())
        .max((inner.u_theta[iface_i] - outer.u_theta[iface_o] - l_theta).norm());
    let wall = outer.u_r[no - 1].norm().max(outer.u_theta[no - 1].norm());
    Ok(ModeFlowSolution {
        k,
        v_interface: inner.u_r[iface_i],
        inner,
        outer,
        residuals: SolveResiduals { system, velocity_jump, wall },
        grids: grids.clone(),
    })
}

/// Normal interface velocity produced by the unit-amplitude interface
/// perturbation of mode `k`, whose traction jump is `(m - k^2)`.
pub fn normal_velocity_response(k: i32, params: &PhysParams, grids: &StokesGrids) -> Result<f64> {
    let h = Complex64::new(params.curvature_symbol(k), 0.0);
    let sol = solve_stokes_mode(&ModeStokesProblem::new(k, h, *params, grids.clone()))?;
    Ok(sol.v_interface.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids(n: usize) -> StokesGrids {
        StokesGrids::new(n, n, 2.0).unwrap()
    }

    #[test]
    fn homogeneous_problem_has_no_flow() {
        let p = PhysParams::default();
        let sol = solve_stokes_mode(&ModeStokesProblem::new(3, Complex64::new(0.0, 0.0), p, grids(16))).unwrap();
        assert!(sol.inner.u_r.iter().chain(&sol.outer.u_theta).all(|u| u.norm() == 0.0));
        assert_eq!(sol.pressure_jump().norm(), 0.0);
    }

    #[test]
    fn mode_zero_is_a_pure_pressure_jump() {
        let p = PhysParams::default();
        let h0 = Complex64::new(0.7, -0.2);
        let sol = solve_stokes_mode(&ModeStokesProblem::new(0, h0, p, grids(16))).unwrap();
        let umax =
            sol.inner.u_r.iter().chain(&sol.outer.u_r).chain(&sol.inner.u_theta).map(|u| u.norm()).fold(0.0, f64::max);
        assert!(umax < 1e-12, "velocity {umax}");
        assert!((sol.pressure_jump() + h0).norm() < 1e-12);
        let spread = |f: &PhaseFlow| f.pressure.iter().map(|q| (q - f.pressure[0]).norm()).fold(0.0, f64::max);
        assert!(spread(&sol.inner) < 1e-11 && spread(&sol.outer) < 1e-11);
        let mean: Complex64 = sol.outer.pressure.iter().sum::<Complex64>() / sol.outer.pressure.len() as f64;
        assert!(mean.norm() < 1e-13);
    }

    #[test]
    fn gauge_choice_does_not_change_velocity_or_jump() {
        let p = PhysParams { nu_minus: 2.5, ..Default::default() };
        let mut prob = ModeStokesProblem::new(0, Complex64::new(1.0, 0.0), p, grids(12));
        let a = solve_stokes_mode(&prob).unwrap();
        prob.gauge = PressureGauge::OuterNode(3);
        let b = solve_stokes_mode(&prob).unwrap();
        assert!(
            (a.pressure_jump() - b.pressure_jump()).norm() < 1e-10,
            "{} vs {}",
            a.pressure_jump(),
            b.pressure_jump()
        );
        for (x, y) in a.outer.u_r.iter().zip(&b.outer.u_r) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!(b.outer.pressure[3].norm() < 1e-13);
        prob.gauge = PressureGauge::OuterNode(99);
        assert!(solve_stokes_mode(&prob).is_err());
    }

    #[test]
    fn response_vanishes_for_modes_zero_and_one() {
        let p = PhysParams::default();
        let g = grids(24);
        assert!(normal_velocity_response(0, &p, &g).unwrap().abs() < 1e-10);
        assert_eq!(normal_velocity_response(1, &p, &g).unwrap(), 0.0);
        assert_eq!(normal_velocity_response(-1, &p, &g).unwrap(), 0.0);
    }

    #[test]
    fn response_is_negative_and_symmetric_for_higher_modes() {
        let p = PhysParams::default();
        let g = grids(24);
        for k in 2..=6 {
            let v = normal_velocity_response(k, &p, &g).unwrap();
            assert!(v < 0.0);
            assert!((v - normal_velocity_response(-k, &p, &g).unwrap()).abs() < 1e-12);
        }
        // closed form at the default parameters: -27/128
        assert!((normal_velocity_response(2, &p, &g).unwrap() + 27.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_container() {
        let p = PhysParams { r_container: 3.0, ..Default::default() };
        assert!(normal_velocity_response(2, &p, &grids(12)).is_err());
    }
}
