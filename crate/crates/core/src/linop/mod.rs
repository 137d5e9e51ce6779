//! Linearization of the evolution about the unit-circle equilibrium, per
//! angular mode.
//!
//! A mode-`k` state is `(mu_+(r), mu_-(r), rho) e^{i k theta}`. Both phase
//! profiles are piecewise linear in `r` with lumped masses. The three
//! interface and wall conditions are natural conditions of the weak form:
//! the interface fluxes they fix are substituted into the boundary terms, so
//! every coordinate vector is an admissible state and the kernel is exact.

mod semisimple;
mod spectrum;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{piecewise_linear_moments, GridFamily, RadialGrid};
use crate::params::PhysParams;
use crate::spectral;
use crate::stokes::{normal_velocity_response, StokesGrids};

pub use semisimple::{
    kernel_basis, remove_kernel_component, semisimplicity_check, semisimplicity_of, SemisimplicityReport,
};
pub use spectrum::{eigen_spectrum, eigenvalues, spectrum_report, ModeSpectrum, SpectrumOptions, SpectrumReport};

/// Default order of the Stokes collocation used for the response coefficients.
pub const DEFAULT_STOKES_ORDER: usize = 64;

/// Relative tolerance of the interface-condition check on states.
pub const ADMISSIBILITY_TOL: f64 = 1e-3;

/// Piecewise-linear grids on `[0, 1]` and `[1, R_C]` plus the Stokes grids
/// used for the interface velocity response.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGrids {
    inner: RadialGrid,
    outer: RadialGrid,
    stokes: StokesGrids,
}

impl LinearGrids {
    /// `n` uniform cells per phase.
    pub fn uniform(n: usize, params: &PhysParams) -> Result<Self> {
        Self::new(
            RadialGrid::uniform(0.0, 1.0, n)?,
            RadialGrid::uniform(1.0, params.r_container, n)?,
            StokesGrids::uniform_order(DEFAULT_STOKES_ORDER, params)?,
        )
    }

    pub fn new(inner: RadialGrid, outer: RadialGrid, stokes: StokesGrids) -> Result<Self> {
        let linear = |g: &RadialGrid| matches!(g.family(), GridFamily::Uniform | GridFamily::Nonuniform);
        if !linear(&inner) || !linear(&outer) {
            return Err(Error::InvalidGrid("linearized operator needs piecewise-linear grids".into()));
        }
        if inner.start() != 0.0 || inner.end() != 1.0 || outer.start() != 1.0 {
            return Err(Error::InvalidGrid("grids must span [0, 1] and [1, R_C]".into()));
        }
        if (outer.end() - stokes.outer().end()).abs() > 1e-12 * outer.end() {
            return Err(Error::InvalidGrid("Stokes grid and outer grid end at different radii".into()));
        }
        Ok(Self { inner, outer, stokes })
    }

    /// Uniform grids with `n` cells per phase and the same Stokes grids.
    pub fn with_cells(&self, n: usize) -> Result<Self> {
        Self::new(
            RadialGrid::uniform(0.0, 1.0, n)?,
            RadialGrid::uniform(1.0, self.outer.end(), n)?,
            self.stokes.clone(),
        )
    }

    pub fn inner(&self) -> &RadialGrid {
        &self.inner
    }

    pub fn outer(&self) -> &RadialGrid {
        &self.outer
    }

    pub fn stokes(&self) -> &StokesGrids {
        &self.stokes
    }

    pub fn cells(&self) -> usize {
        self.inner.len() - 1
    }
}

/// Complex mode amplitudes of the shifted concentrations and of the interface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeState {
    pub k: i32,
    pub mu_plus: Vec<Complex64>,
    pub mu_minus: Vec<Complex64>,
    pub rho: Complex64,
}

impl ModeState {
    pub fn zeros(k: i32, grids: &LinearGrids) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { k, mu_plus: vec![z; grids.inner.len()], mu_minus: vec![z; grids.outer.len()], rho: z }
    }

    /// Samples smooth profiles on the grids.
    pub fn from_fns(
        k: i32,
        grids: &LinearGrids,
        mu_plus: impl Fn(f64) -> Complex64,
        mu_minus: impl Fn(f64) -> Complex64,
        rho: Complex64,
    ) -> Self {
        Self {
            k,
            mu_plus: grids.inner.nodes().iter().map(|&r| mu_plus(r)).collect(),
            mu_minus: grids.outer.nodes().iter().map(|&r| mu_minus(r)).collect(),
            rho,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rho.norm() == 0.0 && self.mu_plus.iter().chain(&self.mu_minus).all(|z| z.norm() == 0.0)
    }
}

/// Discrete `L + K` on one angular mode.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    k: i32,
    matrix: DMatrix<f64>,
    /// Diagonal of the form making `weights * matrix` symmetric.
    weights: Vec<f64>,
    /// Lumped masses (one for the interface row).
    masses: Vec<f64>,
    response: f64,
    skip_centre: usize,
    grids: LinearGrids,
    params: PhysParams,
}

/// `integral phi_i / r dr` on each hat function; infinite for a hat at `r = 0`.
fn inverse_radius_moments(nodes: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; nodes.len()];
    for e in 0..nodes.len() - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        if a == 0.0 {
            w[e] = f64::INFINITY;
            w[e + 1] += 1.0;
        } else {
            let l = (b / a).ln();
            w[e] += (b * l - h) / h;
            w[e + 1] += (h - a * l) / h;
        }
    }
    w
}

/// Stiffness of `-(r mu')'` for hat functions, as `(diag, off)` tridiagonals.
fn radial_stiffness(nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; nodes.len()];
    let mut off = vec![0.0; nodes.len() - 1];
    for e in 0..nodes.len() - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let c = 0.5 * (a + b) / (b - a);
        diag[e] += c;
        diag[e + 1] += c;
        off[e] -= c;
    }
    (diag, off)
}

/// Assembles `L + K` for mode `k`, solving the Stokes problem for `v_k`.
pub fn assemble_mode_operator(k: i32, params: &PhysParams, grids: &LinearGrids) -> Result<ModeOperator> {
    params.validate_planar()?;
    params.require_reference_equilibrium()?;
    let v = if params.curvature_symbol(k) == 0.0 { 0.0 } else { normal_velocity_response(k, params, &grids.stokes)? };
    assemble_with_response(k, params, grids, v)
}

/// Assembles `L + K` for mode `k` with a given interface response `v_k`.
pub fn assemble_with_response(k: i32, params: &PhysParams, grids: &LinearGrids, v: f64) -> Result<ModeOperator> {
    params.validate_planar()?;
    params.require_reference_equilibrium()?;
    if (grids.outer.end() - params.r_container).abs() > 1e-12 * params.r_container {
        return Err(Error::InvalidGrid("outer grid does not end at the container wall".into()));
    }
    let kk = f64::from(k * k);
    let d = params.curvature_symbol(k);
    let (cp, cm) = (params.ctilde_plus, params.ctilde_minus);
    let skip = usize::from(k != 0);

    let phase = |grid: &RadialGrid, kappa: f64, skip: usize| {
        let nodes = grid.nodes();
        let (diag, off) = radial_stiffness(nodes);
        let w = inverse_radius_moments(nodes);
        let m = piecewise_linear_moments(nodes);
        let n = nodes.len() - skip;
        let mut block = DMatrix::zeros(n, n);
        for i in 0..n {
            let g = i + skip;
            let angular = if kk == 0.0 { 0.0 } else { kk * w[g] };
            block[(i, i)] = -kappa * (diag[g] + angular);
            if i + 1 < n {
                block[(i, i + 1)] = -kappa * off[g];
                block[(i + 1, i)] = -kappa * off[g];
            }
        }
        (block, m[skip..].to_vec())
    };
    let (bi, mi) = phase(&grids.inner, params.kappa_plus, skip);
    let (bo, mo) = phase(&grids.outer, params.kappa_minus, 0);
    let (ni, no) = (mi.len(), mo.len());
    let size = ni + no + 1;
    let ir = size - 1;

    let mut a = DMatrix::zeros(size, size);
    a.view_mut((0, 0), (ni, ni)).copy_from(&bi);
    a.view_mut((ni, ni), (no, no)).copy_from(&bo);
    // interface driving J = mu_+(1) - mu_-(1) + d rho; the fluxes are
    // kappa_+ mu_+'(1) = kappa_- mu_-'(1) = -ctilde J
    let mut jump = DVector::zeros(size);
    jump[ni - 1] = 1.0;
    jump[ni] = -1.0;
    jump[ir] = d;
    for c in 0..size {
        a[(ni - 1, c)] -= cp * jump[c];
        a[(ni, c)] += cm * jump[c];
        a[(ir, c)] = jump[c];
    }
    a[(ir, ir)] += v;

    let masses: Vec<f64> = mi.iter().chain(&mo).copied().chain(std::iter::once(1.0)).collect();
    for (i, m) in masses.iter().enumerate() {
        a.row_mut(i).scale_mut(1.0 / m);
    }
    let weights = mi
        .iter()
        .map(|m| 2.0 * PI * cm * m)
        .chain(mo.iter().map(|m| 2.0 * PI * cp * m))
        .chain(std::iter::once(-2.0 * PI * cp * cm * d))
        .collect();
    Ok(ModeOperator {
        k,
        matrix: a,
        weights,
        masses,
        response: v,
        skip_centre: skip,
        grids: grids.clone(),
        params: *params,
    })
}

impl ModeOperator {
    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn response(&self) -> f64 {
        self.response
    }

    pub fn grids(&self) -> &LinearGrids {
        &self.grids
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    /// Diagonal weights `G` of the form `<x, y> = sum G_i x_i conj(y_i)`
    /// for which the matrix is self-adjoint.
    pub fn form_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Lumped masses; the interface coordinate has mass one.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Copy with `shift` added to the diagonal.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut op = self.clone();
        for i in 0..op.dim() {
            op.matrix[(i, i)] += shift;
        }
        op
    }

    /// Coordinates of a state. For `k != 0` the centre value is dropped
    /// (it is zero for a regular mode).
    pub fn to_coordinates(&self, s: &ModeState) -> Result<DVector<Complex64>> {
        if s.k != self.k || s.mu_plus.len() != self.grids.inner.len() || s.mu_minus.len() != self.grids.outer.len() {
            return Err(Error::InvalidState(format!(
                "state (k = {}, {} + {} values) does not match operator (k = {}, {} + {} nodes)",
                s.k,
                s.mu_plus.len(),
                s.mu_minus.len(),
                self.k,
                self.grids.inner.len(),
                self.grids.outer.len()
            )));
        }
        let values: Vec<Complex64> =
            s.mu_plus[self.skip_centre..].iter().chain(&s.mu_minus).copied().chain(std::iter::once(s.rho)).collect();
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(DVector::from_vec(values))
    }

    pub fn from_coordinates(&self, x: &DVector<Complex64>) -> ModeState {
        let ni = self.grids.inner.len() - self.skip_centre;
        let mut mu_plus = vec![Complex64::new(0.0, 0.0); self.skip_centre];
        mu_plus.extend(x.iter().take(ni).copied());
        ModeState {
            k: self.k,
            mu_plus,
            mu_minus: x.iter().skip(ni).take(self.grids.outer.len()).copied().collect(),
            rho: x[x.len() - 1],
        }
    }

    /// `(L + K) x` in coordinates.
    pub fn apply_coordinates(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self.matrix.map(Complex64::from) * x
    }

    pub fn apply(&self, s: &ModeState) -> Result<ModeState> {
        Ok(self.from_coordinates(&self.apply_coordinates(&self.to_coordinates(s)?)))
    }

    /// `<x, y>` in the form weights.
    pub fn inner_product(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
        x.iter().zip(y.iter()).zip(&self.weights).map(|((a, b), w)| a * b.conj() * *w).sum()
    }

    /// Mass-weighted Euclidean norm of coordinates.
    pub fn norm(&self, x: &DVector<Complex64>) -> f64 {
        x.iter().zip(&self.masses).map(|(z, m)| z.norm_sqr() * m).sum::<f64>().sqrt()
    }

    /// Relative residual of the three interface and wall conditions for a
    /// state given by nodal values, using one-sided four-point derivatives.
    pub fn interface_condition_residual(&self, s: &ModeState) -> f64 {
        let p = &self.params;
        let d = p.curvature_symbol(self.k);
        let edge = edge_derivative;
        let (ri, ro) = (self.grids.inner.nodes(), self.grids.outer.nodes());
        let dp1 = edge(ri, &s.mu_plus, true);
        let dm1 = edge(ro, &s.mu_minus, false);
        let dmw = edge(ro, &s.mu_minus, true);
        let flux_p = p.alpha_plus() * dp1;
        let flux_m = p.alpha_minus() * dm1;
        let jump = s.mu_plus[ri.len() - 1] - s.mu_minus[0];
        let drho = d * s.rho;
        let scale = [flux_p.norm(), flux_m.norm(), jump.norm(), drho.norm()].into_iter().fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let wall_scale = s.mu_minus.iter().map(|z| z.norm()).fold(0.0, f64::max) / (ro[ro.len() - 1] - ro[0]);
        [(flux_p + jump + drho).norm() / scale, (flux_p - flux_m).norm() / scale, dmw.norm() / scale.max(wall_scale)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Checks the interface and wall conditions at [`ADMISSIBILITY_TOL`].
    pub fn check_admissible(&self, s: &ModeState) -> Result<()> {
        let residual = self.interface_condition_residual(s);
        if residual > ADMISSIBILITY_TOL {
            return Err(Error::Inadmissible { residual, tol: ADMISSIBILITY_TOL });
        }
        Ok(())
    }

    /// Random smooth state satisfying the interface and wall conditions:
    /// `mu_+ = r^|k| (a0 + a1 r^2 + a2 r^4)`, `mu_- = b0 + b1 (r - R_C)^2 + b2 (r - R_C)^3`.
    /// The conditions hold for the one-sided derivatives of
    /// [`Self::interface_condition_residual`], which are exact on `mu_-`.
    pub fn random_admissible_state<R: Rng + ?Sized>(&self, rng: &mut R) -> ModeState {
        let p = &self.params;
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (a0, a1, a2, mut b0, b2) = (c(), c(), c(), c(), c());
        let mut rho = c();
        let e = f64::from(self.k.unsigned_abs() as i32);
        let rc = p.r_container;
        let mu_plus_fn = |r: f64| r.powi(e as i32) * (a0 + a1 * r * r + a2 * r.powi(4));
        let mu_p1 = a0 + a1 + a2;
        let inner = self.grids.inner.nodes();
        let dmu_p1 = edge_derivative(inner, &inner.iter().map(|&r| mu_plus_fn(r)).collect::<Vec<_>>(), true);
        // alpha_+ mu_+'(1) = alpha_- mu_-'(1) fixes b1
        let s = 1.0 - rc;
        let target = p.alpha_plus() * dmu_p1 / p.alpha_minus();
        let b1 = (target - 3.0 * b2 * s * s) / (2.0 * s);
        let mu_m1 = |b0: Complex64| b0 + b1 * s * s + b2 * s * s * s;
        let d = p.curvature_symbol(self.k);
        // alpha_+ mu_+'(1) + mu_+(1) - mu_-(1) + d rho = 0
        let rest = p.alpha_plus() * dmu_p1 + mu_p1;
        if d != 0.0 {
            rho = -(rest - mu_m1(b0)) / d;
        } else {
            b0 = rest - b1 * s * s - b2 * s * s * s;
        }
        ModeState::from_fns(
            self.k,
            &self.grids,
            mu_plus_fn,
            |r| b0 + b1 * (r - rc).powi(2) + b2 * (r - rc).powi(3),
            rho,
        )
    }
}

/// One-sided four-point derivative at the first or last node.
fn edge_derivative(nodes: &[f64], vals: &[Complex64], at_end: bool) -> Complex64 {
    let idx: Vec<usize> = if at_end { (nodes.len() - 4..nodes.len()).collect() } else { (0..4).collect() };
    let x: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
    let row = if at_end { 3 } else { 0 };
    let dm = spectral::differentiation_matrix(&x);
    idx.iter().enumerate().map(|(j, &i)| vals[i] * dm[(row, j)]).sum()
}

/// `-<(L + K) w, w>` for an admissible state.
pub fn quadratic_form(op: &ModeOperator, state: &ModeState) -> Result<Complex64> {
    op.check_admissible(state)?;
    let x = op.to_coordinates(state)?;
    Ok(-op.inner_product(&op.apply_coordinates(&x), &x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn grids(n: usize) -> LinearGrids {
        let p = PhysParams::default();
        LinearGrids::new(
            RadialGrid::uniform(0.0, 1.0, n).unwrap(),
            RadialGrid::uniform(1.0, 2.0, n).unwrap(),
            StokesGrids::uniform_order(24, &p).unwrap(),
        )
        .unwrap()
    }

    fn constant_state(k: i32, g: &LinearGrids, plus: f64, minus: f64, rho: f64) -> ModeState {
        ModeState::from_fns(k, g, |_| Complex64::from(plus), |_| Complex64::from(minus), Complex64::from(rho))
    }

    fn max_abs(s: &ModeState) -> f64 {
        s.mu_plus.iter().chain(&s.mu_minus).map(|z| z.norm()).fold(s.rho.norm(), f64::max)
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let p = PhysParams::default();
        let g = grids(32);
        let op0 = assemble_mode_operator(0, &p, &g).unwrap();
        let m = p.m();
        assert!(max_abs(&op0.apply(&constant_state(0, &g, m, 0.0, -1.0)).unwrap()) < 1e-12);
        assert!(max_abs(&op0.apply(&constant_state(0, &g, 0.0, m, 1.0)).unwrap()) < 1e-12);
        let op1 = assemble_mode_operator(1, &p, &g).unwrap();
        let t = ModeState { rho: Complex64::from(1.0), ..ModeState::zeros(1, &g) };
        assert_eq!(max_abs(&op1.apply(&t).unwrap()), 0.0);
    }

    #[test]
    fn weighted_matrix_is_symmetric() {
        let p = PhysParams::default();
        let g = grids(16);
        for k in [0, 1, 2, 5] {
            let op = assemble_mode_operator(k, &p, &g).unwrap();
            let w = op.form_weights();
            let a = op.matrix();
            for i in 0..op.dim() {
                for j in 0..op.dim() {
                    let (x, y) = (w[i] * a[(i, j)], w[j] * a[(j, i)]);
                    assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "k={k} ({i},{j}) {x} {y}");
                }
            }
        }
    }

    #[test]
    fn quadratic_form_is_nonnegative_on_random_states() {
        let p = PhysParams::default();
        let g = grids(64);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for k in 0..=4 {
            let op = assemble_mode_operator(k, &p, &g).unwrap();
            for _ in 0..50 {
                let s = op.random_admissible_state(&mut rng);
                let q = quadratic_form(&op, &s).unwrap();
                assert!(q.re >= -1e-10, "k={k}: {q}");
                assert!(q.im.abs() <= 1e-10 * q.re.abs().max(1.0));
            }
        }
    }

    #[test]
    fn kernel_vector_has_zero_form() {
        let p = PhysParams::default();
        let g = grids(32);
        let op = assemble_mode_operator(0, &p, &g).unwrap();
        assert!(quadratic_form(&op, &constant_state(0, &g, 1.0, 0.0, -1.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn pure_interface_perturbation_is_inadmissible() {
        let p = PhysParams::default();
        let g = grids(32);
        let op = assemble_mode_operator(2, &p, &g).unwrap();
        let s = ModeState { rho: Complex64::from(1.0), ..ModeState::zeros(2, &g) };
        assert!(matches!(quadratic_form(&op, &s), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn rejects_mismatched_state_and_params() {
        let p = PhysParams::default();
        let g = grids(16);
        let op = assemble_mode_operator(2, &p, &g).unwrap();
        assert!(op.to_coordinates(&ModeState::zeros(3, &g)).is_err());
        let off = PhysParams { ctilde_plus: 3.0, ..p };
        assert!(assemble_mode_operator(2, &off, &g).is_err());
    }
}
