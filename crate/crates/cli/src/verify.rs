//! The acceptance suite: ten pass/fail criteria over the solvers.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use osmoflow_core::dynamics::{decay_rate_fit, linear_mode_evolve, simulate_radial, LinearEvolveConfig, StepperConfig};
use osmoflow_core::equilibria::{find_equilibrium, phi_matrix, phi_matrix_by_quadrature};
use osmoflow_core::linop::{
    assemble_mode_operator, eigenvalues, remove_kernel_component, semisimplicity_check, spectrum_report, LinearGrids,
    SpectrumOptions, SpectrumReport,
};
use osmoflow_core::stokes::manufactured::ManufacturedSolution;
use osmoflow_core::stokes::{
    normal_velocity_response, solve_stokes_mode_forced, stokes_energy_identity_residual, verify_lopatinskii,
    StokesGrids,
};
use osmoflow_core::{phase_mass, PhysParams, RadialGrid, RadialState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Identifier and short name of each criterion.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "kernel_dimension"),
    (2, "negative_real_spectrum"),
    (3, "semisimplicity"),
    (4, "stokes_energy_identity"),
    (5, "stokes_response_signs"),
    (6, "lopatinskii_shapiro"),
    (7, "manufactured_convergence"),
    (8, "nonlinear_gradient_flow"),
    (9, "linear_nonlinear_consistency"),
    (10, "phi_matrix_positivity"),
];

const KERNEL_DIMENSION: usize = 4;
const KERNEL_BUDGET: Duration = Duration::from_secs(30);
const FLOW_BUDGET: Duration = Duration::from_secs(120);
const SIGNS_K_MAX: i32 = 16;
const RESPONSE_ZERO_TOL: f64 = 1e-10;
const MMS_ORDERS: [usize; 4] = [8, 10, 12, 14];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub metrics: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {:<30} {} [{:.2?}]", self.id, self.name, self.summary, self.elapsed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub kernel_dimension: Option<usize>,
    pub criteria: Vec<CriterionResult>,
}

type Outcome = Result<(bool, String, Value), String>;

struct CachedSpectrum {
    report: SpectrumReport,
    elapsed: Duration,
}

/// Runs criteria against one configuration, sharing the spectrum between them.
pub struct Verifier {
    cfg: RunConfig,
    spectrum: OnceLock<Result<CachedSpectrum, String>>,
}

fn linear_grids(cfg: &RunConfig, params: &PhysParams, cells: usize) -> osmoflow_core::Result<LinearGrids> {
    LinearGrids::new(
        RadialGrid::uniform(0.0, 1.0, cells)?,
        RadialGrid::uniform(1.0, params.r_container, cells)?,
        StokesGrids::uniform_order(cfg.grid.stokes_order, params)?,
    )
}

fn spectrum_options(cfg: &RunConfig) -> SpectrumOptions {
    SpectrumOptions { tol_zero: cfg.spectrum.tol_zero, spurious_threshold: cfg.spectrum.spurious_threshold }
}

/// Smallest `-Re lambda` over the nonzero retained eigenvalues with `|k| <= k_max`.
fn gap_up_to(report: &SpectrumReport, k_max: i32, tol_zero: f64) -> Option<f64> {
    report
        .modes
        .iter()
        .filter(|m| m.k.abs() <= k_max)
        .flat_map(|m| &m.eigenvalues)
        .filter(|l| l.norm() >= tol_zero)
        .map(|l| -l.re)
        .reduce(f64::min)
}

fn leading_nonzero(values: &[num_complex::Complex64], tol_zero: f64) -> Option<f64> {
    values.iter().map(|z| z.re).find(|&l| l < -tol_zero)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Verifier {
    pub fn new(cfg: RunConfig) -> Self {
        Self { cfg, spectrum: OnceLock::new() }
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    fn spectrum(&self) -> Result<&CachedSpectrum, String> {
        self.spectrum
            .get_or_init(|| {
                let start = Instant::now();
                let p = &self.cfg.params;
                let grids = linear_grids(&self.cfg, p, self.cfg.grid.cells).map_err(err)?;
                let report =
                    spectrum_report(p, &grids, self.cfg.spectrum.k_max, &spectrum_options(&self.cfg)).map_err(err)?;
                Ok(CachedSpectrum { report, elapsed: start.elapsed() })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: u8) -> CriterionResult {
        let (_, name) = CRITERIA[usize::from(id) - 1];
        let start = Instant::now();
        let outcome = match id {
            1 => self.kernel_criterion(),
            2 => self.negative_real_spectrum(),
            3 => self.semisimplicity(),
            4 => self.energy_identity(),
            5 => self.response_signs(),
            6 => self.lopatinskii(),
            7 => self.manufactured(),
            8 => self.nonlinear_flow(),
            9 => self.linear_consistency(),
            10 => self.phi_positivity(),
            _ => Err(format!("unknown criterion {id}")),
        };
        let (passed, summary, metrics) = outcome.unwrap_or_else(|e| (false, format!("error: {e}"), Value::Null));
        CriterionResult { id, name, passed, summary, metrics, elapsed: start.elapsed() }
    }

    pub fn run_all(&self) -> VerifyReport {
        let criteria: Vec<CriterionResult> = CRITERIA.iter().map(|&(id, _)| self.run(id)).collect();
        VerifyReport { passed: criteria.iter().all(|c| c.passed), kernel_dimension: self.kernel_dimension(), criteria }
    }

    /// Kernel dimension of the shared spectrum, if it could be computed.
    pub fn kernel_dimension(&self) -> Option<usize> {
        self.spectrum().ok().map(|s| s.report.kernel_dimension)
    }

    fn kernel_criterion(&self) -> Outcome {
        let s = self.spectrum()?;
        let tol = self.cfg.spectrum.tol_zero;
        let per_mode: Vec<(i32, usize)> =
            [0, 1, -1].iter().map(|&k| (k, s.report.mode(k).map_or(0, |m| m.kernel_count(tol)))).collect();
        let cells = self.cfg.grid.cells;
        let passed = s.report.kernel_dimension == KERNEL_DIMENSION
            && per_mode == [(0, 2), (1, 1), (-1, 1)]
            && cells >= 128
            && s.elapsed < KERNEL_BUDGET;
        let within_budget = s.elapsed < KERNEL_BUDGET;
        Ok((
            passed,
            format!(
                "dim = {} (k=0: {}, k=+-1: {}+{}) at n = {cells}",
                s.report.kernel_dimension, per_mode[0].1, per_mode[1].1, per_mode[2].1
            ),
            json!({"kernel_dimension": s.report.kernel_dimension, "per_mode": per_mode, "cells": cells, "within_budget": within_budget}),
        ))
    }

    fn negative_real_spectrum(&self) -> Outcome {
        let s = self.spectrum()?;
        let tol = self.cfg.spectrum.tol_zero;
        let k_max = SIGNS_K_MAX.min(self.cfg.spectrum.k_max);
        let nonzero = || {
            s.report
                .modes
                .iter()
                .filter(|m| m.k.abs() <= k_max)
                .flat_map(|m| &m.eigenvalues)
                .filter(|l| l.norm() >= tol)
        };
        let max_re = nonzero().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        let max_im = nonzero().map(|l| l.im.abs()).fold(0.0, f64::max);
        let gap = gap_up_to(&s.report, k_max, tol).ok_or("no nonzero eigenvalue retained")?;
        let p = &self.cfg.params;
        let fine_grids = linear_grids(&self.cfg, p, 2 * self.cfg.grid.cells).map_err(err)?;
        let fine = spectrum_report(p, &fine_grids, k_max, &spectrum_options(&self.cfg)).map_err(err)?;
        let fine_gap = gap_up_to(&fine, k_max, tol).ok_or("no nonzero eigenvalue retained at 2n")?;
        let rel = (gap - fine_gap).abs() / fine_gap.abs();
        let passed = max_re < 0.0 && max_im < 1e-8 && gap > 0.0 && rel < 5e-4;
        Ok((
            passed,
            format!("max Re = {max_re:.4e}, max |Im| = {max_im:.1e}, gap {gap:.6} vs {fine_gap:.6} at 2n"),
            json!({"max_re": max_re, "max_abs_im": max_im, "gap_n": gap, "gap_2n": fine_gap, "relative_change": rel}),
        ))
    }

    fn semisimplicity(&self) -> Outcome {
        let p = &self.cfg.params;
        let grids = linear_grids(&self.cfg, p, self.cfg.grid.cells).map_err(err)?;
        let rep = semisimplicity_check(p, &grids, self.cfg.verify.semisimplicity_tol).map_err(err)?;
        let worst = rep.residuals.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        Ok((
            rep.passed && rep.residuals.len() == KERNEL_DIMENSION,
            format!("{} kernel vectors, smallest residual ratio {worst:.3} > {}", rep.residuals.len(), rep.tol),
            json!({"residuals": rep.residuals, "tol": rep.tol}),
        ))
    }

    fn energy_identity(&self) -> Outcome {
        let p = &self.cfg.params;
        let grids = StokesGrids::uniform_order(self.cfg.grid.stokes_order, p).map_err(err)?;
        let production: Vec<(i32, f64)> = (2..=8)
            .map(|k| stokes_energy_identity_residual(k, p, &grids).map(|r| (k, r)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let orders = [8usize, 12, 16];
        let refinement: Vec<f64> = orders
            .iter()
            .map(|&n| StokesGrids::uniform_order(n, p).and_then(|g| stokes_energy_identity_residual(4, p, &g)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let rates: Vec<f64> = (0..2)
            .map(|i| (refinement[i] / refinement[i + 1]).ln() / (orders[i + 1] as f64 / orders[i] as f64).ln())
            .collect();
        let worst = production.iter().map(|r| r.1).fold(0.0, f64::max);
        let passed = worst <= self.cfg.verify.energy_identity_tol && rates.iter().all(|&r| r >= 2.0);
        Ok((
            passed,
            format!("max residual {worst:.2e} for k = 2..8; k = 4 refinement rates {:.1}, {:.1}", rates[0], rates[1]),
            json!({"residuals": production, "refinement_orders": orders, "refinement_residuals": refinement, "observed_rates": rates}),
        ))
    }

    fn response_signs(&self) -> Outcome {
        let p = &self.cfg.params;
        let grids = StokesGrids::uniform_order(self.cfg.grid.stokes_order, p).map_err(err)?;
        let v: Vec<(i32, f64)> = (-SIGNS_K_MAX..=SIGNS_K_MAX)
            .map(|k| normal_velocity_response(k, p, &grids).map(|v| (k, v)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let at = |k: i32| v.iter().find(|e| e.0 == k).map_or(f64::NAN, |e| e.1);
        let trivial = at(0).abs().max(at(1).abs()).max(at(-1).abs());
        // responses within the zero tolerance count as zero
        let worst = v
            .iter()
            .map(|&(k, vk)| if vk.abs() <= RESPONSE_ZERO_TOL { 0.0 } else { vk * p.curvature_symbol(k) })
            .fold(f64::INFINITY, f64::min);
        Ok((
            trivial <= RESPONSE_ZERO_TOL && worst >= 0.0,
            format!("|v_0|, |v_+-1| <= {trivial:.1e}; min v_k (m - k^2) = {worst:.3e}"),
            json!({"v": v, "max_trivial": trivial, "min_product": worst}),
        ))
    }

    fn lopatinskii(&self) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let t = (self.cfg.params.dim - 1) as usize;
        let mut worst_rel = 0.0f64;
        let mut min_sigma = f64::INFINITY;
        let mut points = Vec::new();
        for _ in 0..self.cfg.verify.sweep_points {
            let nu_p = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let nu_m = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let xi: Vec<f64> = (0..t).map(|_| rng.gen_range(0.1..10.0) * if rng.gen() { 1.0 } else { -1.0 }).collect();
            let rep = verify_lopatinskii(nu_p, nu_m, &xi).map_err(err)?;
            let exact = -2.0 * (nu_p + nu_m).powi(2);
            let rel = ((rep.det_m - exact) / exact).abs();
            worst_rel = worst_rel.max(rel);
            min_sigma = min_sigma.min(rep.min_singular_value);
            points.push(json!({"nu_plus": nu_p, "nu_minus": nu_m, "xi": xi, "det_m": rep.det_m, "min_singular_value": rep.min_singular_value}));
        }
        Ok((
            worst_rel < 1e-14 && min_sigma > 0.0,
            format!(
                "{} points: max relative det error {worst_rel:.1e}, min singular value {min_sigma:.3e}",
                points.len()
            ),
            json!({"points": points, "max_relative_error": worst_rel, "min_singular_value": min_sigma}),
        ))
    }

    fn manufactured(&self) -> Outcome {
        let p = self.cfg.params;
        let mut min_rate = f64::INFINITY;
        let mut per_mode = Vec::new();
        for k in [0, 1, 2, 4] {
            let ms = ManufacturedSolution::standard(k, p);
            let errors: Vec<f64> = MMS_ORDERS
                .iter()
                .map(|&n| {
                    let prob = ms.problem(StokesGrids::new(n, n, p.r_container)?);
                    Ok(ms.velocity_error(&solve_stokes_mode_forced(&prob, &ms)?))
                })
                .collect::<osmoflow_core::Result<_>>()
                .map_err(err)?;
            let rates: Vec<f64> = (0..3)
                .map(|i| (errors[i] / errors[i + 1]).ln() / (MMS_ORDERS[i + 1] as f64 / MMS_ORDERS[i] as f64).ln())
                .collect();
            min_rate = rates.iter().copied().fold(min_rate, f64::min);
            per_mode.push(json!({"k": k, "errors": errors, "observed_rates": rates}));
        }
        Ok((
            min_rate >= 2.0,
            format!("minimum observed order {min_rate:.1} over orders {MMS_ORDERS:?}"),
            json!({"orders": MMS_ORDERS, "modes": per_mode, "min_rate": min_rate}),
        ))
    }

    fn nonlinear_flow(&self) -> Outcome {
        let start = Instant::now();
        let (p, sim) = (&self.cfg.params, &self.cfg.simulate);
        let init = RadialState::constant(sim.radius, p.r_container, sim.cells, sim.c_plus, sim.c_minus).map_err(err)?;
        let dt = match sim.dt {
            Some(dt) => dt,
            None => StepperConfig::default_dt(&init, p).map_err(err)?,
        };
        let traj = simulate_radial(&init, p, &StepperConfig::new(dt, sim.t_final)).map_err(err)?;
        let elapsed = start.elapsed();
        let (m_plus, m_minus) = phase_mass(&init);
        let eqs = find_equilibrium(m_plus, m_minus, p.r_container, p.dim).map_err(err)?;
        let eq = *eqs.first().ok_or("no equilibrium")?;
        let drift = traj.max_mass_drift();
        let rise = traj.max_energy_increase();
        let r_err = (traj.final_state.radius() - eq.r_star).abs();
        let (t0, t1) = (0.3 * sim.t_final, 0.7 * sim.t_final);
        let window: Vec<(f64, f64)> = traj.radius_error().into_iter().filter(|&(t, _)| t >= t0 && t <= t1).collect();
        let rate = decay_rate_fit(&window, 1.0).map_err(err)?.rate;
        let scaled = eq.rescaled_params(p);
        let op =
            assemble_mode_operator(0, &scaled, &linear_grids(&self.cfg, &scaled, self.cfg.grid.cells).map_err(err)?)
                .map_err(err)?;
        let lead = leading_nonzero(&eigenvalues(&op).map_err(err)?, self.cfg.spectrum.tol_zero)
            .ok_or("no nonzero mode-0 eigenvalue")?
            / (eq.r_star * eq.r_star);
        let rate_rel = (rate - lead).abs() / lead.abs();
        let passed = drift < 1e-10
            && rise <= dt * dt
            && r_err < 1e-6
            && rate_rel < self.cfg.verify.rate_tol_nonlinear
            && elapsed < FLOW_BUDGET;
        Ok((
            passed,
            format!(
                "drift {drift:.1e}, energy rise {rise:.1e} (dt^2 = {:.1e}), |R - R*| = {r_err:.1e}, rate {rate:.4} vs {lead:.4}",
                dt * dt
            ),
            json!({
                "dt": dt, "r_star": eq.r_star, "mass_drift": drift, "max_energy_increase": rise,
                "radius_error": r_err, "fitted_rate": rate, "eigenvalue_rate": lead, "relative_rate_error": rate_rel,
                "within_budget": elapsed < FLOW_BUDGET,
            }),
        ))
    }

    fn linear_consistency(&self) -> Outcome {
        let s = self.spectrum()?;
        let p = &self.cfg.params;
        let tol = self.cfg.spectrum.tol_zero;
        let grids = linear_grids(&self.cfg, p, self.cfg.grid.cells).map_err(err)?;
        let mut worst = 0.0f64;
        let mut modes = Vec::new();
        for k in [0, 2, 3] {
            let lead =
                s.report.mode(k).and_then(|m| m.leading_nonzero(tol)).ok_or(format!("no eigenvalue for k = {k}"))?.re;
            let op = assemble_mode_operator(k, p, &grids).map_err(err)?;
            let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_add(k as u64));
            let raw = op.random_admissible_state(&mut rng);
            let x = remove_kernel_component(&op, &op.to_coordinates(&raw).map_err(err)?).map_err(err)?;
            let t_final = 15.0 / lead.abs();
            let traj =
                linear_mode_evolve(&op, &op.from_coordinates(&x), &LinearEvolveConfig::new(t_final / 6000.0, t_final))
                    .map_err(err)?;
            let rate = decay_rate_fit(&traj.norms, 0.3).map_err(err)?.rate;
            let rel = (rate - lead).abs() / lead.abs();
            worst = worst.max(rel);
            modes.push(json!({"k": k, "fitted_rate": rate, "eigenvalue": lead, "relative_error": rel}));
        }
        Ok((
            worst < self.cfg.verify.rate_tol_linear,
            format!("k = 0, 2, 3: max relative rate error {worst:.2e}"),
            json!({"modes": modes, "max_relative_error": worst}),
        ))
    }

    fn phi_positivity(&self) -> Outcome {
        let reference = PhysParams::default();
        let phi = phi_matrix(&reference).map_err(err)?;
        let target = 5.5 * PI * PI;
        let det_err = (phi.det - target).abs();
        let quad = phi_matrix_by_quadrature(
            &reference,
            &linear_grids(&self.cfg, &reference, self.cfg.grid.cells).map_err(err)?,
        );
        let quad_err = (quad - phi.a).abs().max();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut min_det = f64::INFINITY;
        let mut worst_formula = 0.0f64;
        for _ in 0..self.cfg.verify.phi_sweep_points {
            let cm = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let params = PhysParams {
                ctilde_minus: cm,
                ctilde_plus: cm + 1.0,
                r_container: rng.gen_range(1.1..5.0),
                ..reference
            };
            let phi = phi_matrix(&params).map_err(err)?;
            min_det = min_det.min(phi.det);
            worst_formula = worst_formula.max((phi.det - phi.det_formula).abs() / phi.det.abs());
        }
        Ok((
            det_err <= 1e-8 && quad_err < 1e-10 && min_det > 0.0 && worst_formula < 1e-12,
            format!("det = {:.12} (5.5 pi^2 = {target:.12}); sweep min det {min_det:.3e}", phi.det),
            json!({"det": phi.det, "target": target, "quadrature_error": quad_err, "sweep_min_det": min_det, "sweep_formula_error": worst_formula}),
        ))
    }
}

/// Runs every criterion.
pub fn verify_all(cfg: &RunConfig) -> VerifyReport {
    Verifier::new(cfg.clone()).run_all()
}
