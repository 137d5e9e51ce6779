//! Radially symmetric free-boundary evolution on moving piecewise-linear grids.
//!
//! Each phase is mapped to a fixed reference interval: `r = R xi` in the disk
//! and `r = R + (R_C - R) eta` in the annulus. The grid nodes move with
//! velocity `xi R'` and `(1 - eta) R'` respectively, which adds a convection
//! term to the heat equations. In the weak form, the interface flux fixed by
//! the Robin condition cancels the flux of the moving boundary, so each
//! phase is a closed system and its solute mass is conserved exactly.

use serde::Serialize;

use super::StepperConfig;
use crate::diagnostics::{dissipation, energy, mean_curvature, phase_mass};
use crate::equilibria::{find_equilibrium, Equilibrium};
use crate::error::{Error, Result};
use crate::field::{PhaseProfile, RadialState, TwoPhaseRadialField};
use crate::grid::{piecewise_linear_moments, GridFamily, RadialGrid};
use crate::params::PhysParams;

/// Tridiagonal matrix stored by diagonals.
struct Tridiagonal {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Tridiagonal {
    fn zeros(n: usize) -> Self {
        Self { sub: vec![0.0; n - 1], diag: vec![0.0; n], sup: vec![0.0; n - 1] }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        match j as isize - i as isize {
            0 => self.diag[i] += v,
            1 => self.sup[i] += v,
            -1 => self.sub[j] += v,
            _ => unreachable!("entry outside the band"),
        }
    }

    /// Thomas algorithm; the systems here are diagonally dominant.
    fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.diag.len();
        for i in 1..n {
            let p = self.diag[i - 1];
            if p == 0.0 {
                return Err(Error::SingularSystem("zero pivot in tridiagonal solve".into()));
            }
            let f = self.sub[i - 1] / p;
            self.diag[i] -= f * self.sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        rhs[n - 1] /= self.diag[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.sup[i] * rhs[i + 1]) / self.diag[i];
        }
        Ok(rhs)
    }
}

/// `kappa K` on `nodes` plus the mesh-convection matrix
/// `C_ij = integral w phi_i' phi_j r dr` on `mid` (Simpson, exact here).
fn transport_matrix(nodes: &[f64], mid: &[f64], w: &[f64], kappa: f64, dt: f64) -> Tridiagonal {
    let n = nodes.len();
    let mut t = Tridiagonal::zeros(n);
    for (i, m) in piecewise_linear_moments(nodes).into_iter().enumerate() {
        t.add(i, i, m);
    }
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let c = dt * kappa * 0.5 * (a + b) / (b - a);
        t.add(e, e, c);
        t.add(e + 1, e + 1, c);
        t.add(e, e + 1, -c);
        t.add(e + 1, e, -c);

        let (a, b) = (mid[e], mid[e + 1]);
        let h = b - a;
        let quad = [(a, 1.0), (0.5 * (a + b), 4.0), (b, 1.0)];
        let dphi = [-1.0 / h, 1.0 / h];
        for (x, q) in quad {
            let s = (x - a) / h;
            let wx = w[e] + (w[e + 1] - w[e]) * s;
            let phi = [1.0 - s, s];
            for i in 0..2 {
                for j in 0..2 {
                    t.add(e + i, e + j, dt * q * h / 6.0 * wx * dphi[i] * phi[j] * x);
                }
            }
        }
    }
    t
}

fn profile_reference(p: &PhaseProfile, map: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    if !matches!(p.grid().family(), GridFamily::Uniform | GridFamily::Nonuniform) {
        return Err(Error::InvalidGrid("radial simulation needs piecewise-linear grids".into()));
    }
    Ok(p.nodes().iter().map(|&r| map(r)).collect())
}

/// Advances the radial state by one step of length `cfg.dt`.
pub fn step_radial(state: &RadialState, params: &PhysParams, cfg: &StepperConfig) -> Result<RadialState> {
    cfg.validate()?;
    step_with(state, params, cfg, cfg.dt)
}

fn step_with(state: &RadialState, params: &PhysParams, cfg: &StepperConfig, dt: f64) -> Result<RadialState> {
    params.validate()?;
    let c = state.concentration();
    let (r0, rc) = (state.radius(), c.container_radius());
    if (rc - params.r_container).abs() > 1e-12 * rc {
        return Err(Error::InvalidState(format!("state container radius {rc} differs from {}", params.r_container)));
    }
    let xi = profile_reference(c.inner(), |r| r / r0)?;
    let eta = profile_reference(c.outer(), |r| (r - r0) / (rc - r0))?;

    let velocity = c.jump() + mean_curvature(r0, params.dim)?;
    let r1 = r0 + dt * velocity;
    let t1 = state.time() + dt;
    if !(r1 > cfg.collision_margin && r1 < rc - cfg.collision_margin) {
        return Err(Error::InterfaceCollision { t: t1, radius: r1 });
    }
    let rm = 0.5 * (r0 + r1);

    let advance = |reference: &[f64],
                   place: &dyn Fn(f64, f64) -> f64,
                   speed: &dyn Fn(f64) -> f64,
                   old: &PhaseProfile,
                   kappa: f64| {
        let at = |r: f64| -> Vec<f64> { reference.iter().map(|&s| place(r, s)).collect() };
        let (n0, n1, nm) = (at(r0), at(r1), at(rm));
        let w: Vec<f64> = reference.iter().map(|&s| speed(s) * velocity).collect();
        let rhs: Vec<f64> = piecewise_linear_moments(&n0).iter().zip(old.values()).map(|(m, v)| m * v).collect();
        let values = transport_matrix(&n1, &nm, &w, kappa, dt).solve(rhs)?;
        if let Some((&r, &value)) = n1.iter().zip(&values).find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::PositivityLoss { t: t1, r, value });
        }
        PhaseProfile::new(RadialGrid::from_nodes(n1)?, values)
    };
    let inner = advance(&xi, &|r, s| r * s, &|s| s, c.inner(), params.kappa_plus)?;
    let outer = advance(&eta, &|r, s| r + (rc - r) * s, &|s| 1.0 - s, c.outer(), params.kappa_minus)?;
    let outer = pin_ends(outer, r1, rc)?;
    RadialState::new(TwoPhaseRadialField::new(inner, outer)?, t1)
}

/// Puts the end nodes exactly on the interface and the wall.
fn pin_ends(p: PhaseProfile, start: f64, end: f64) -> Result<PhaseProfile> {
    let mut nodes = p.nodes().to_vec();
    let last = nodes.len() - 1;
    nodes[0] = start;
    nodes[last] = end;
    PhaseProfile::new(RadialGrid::from_nodes(nodes)?, p.values().to_vec())
}

/// Diagnostics recorded along a radial trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub radius: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// `L2` distance of the concentration from the equilibrium constants
    /// (NaN without an equilibrium).
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub final_state: RadialState,
    /// Equilibrium with the initial masses nearest to the initial radius.
    pub equilibrium: Option<Equilibrium>,
}

impl Trajectory {
    /// `(t, |R(t) - R*|)`.
    pub fn radius_error(&self) -> Vec<(f64, f64)> {
        let r_star = self.equilibrium.map_or(f64::NAN, |e| e.r_star);
        self.samples.iter().map(|s| (s.t, (s.radius - r_star).abs())).collect()
    }

    /// Largest increase of the energy between consecutive samples.
    pub fn max_energy_increase(&self) -> f64 {
        self.samples.windows(2).map(|w| w[1].energy - w[0].energy).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest relative deviation of either phase mass from its initial value.
    pub fn max_mass_drift(&self) -> f64 {
        let first = self.samples[0];
        self.samples
            .iter()
            .map(|s| {
                ((s.mass_plus - first.mass_plus).abs() / first.mass_plus)
                    .max((s.mass_minus - first.mass_minus).abs() / first.mass_minus)
            })
            .fold(0.0, f64::max)
    }

    /// Whether the final radius lies within `tol` of the equilibrium.
    pub fn converged(&self, tol: f64) -> bool {
        self.equilibrium.is_some_and(|e| (self.final_state.radius() - e.r_star).abs() < tol)
    }
}

fn sample(state: &RadialState, params: &PhysParams, eq: Option<&Equilibrium>) -> Result<Sample> {
    let (mass_plus, mass_minus) = phase_mass(state);
    let distance = eq.map_or(f64::NAN, |e| {
        let c = state.concentration();
        (c.inner().integrate(|_, v| (v - e.c_plus).powi(2)) + c.outer().integrate(|_, v| (v - e.c_minus).powi(2)))
            .sqrt()
    });
    Ok(Sample {
        t: state.time(),
        radius: state.radius(),
        mass_plus,
        mass_minus,
        energy: energy(state)?,
        dissipation: dissipation(state, params)?,
        distance,
    })
}

/// Runs the radial evolution to `cfg.t_final`, sampling diagnostics.
pub fn simulate_radial(init: &RadialState, params: &PhysParams, cfg: &StepperConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let (mp, mm) = phase_mass(init);
    let equilibrium = find_equilibrium(mp, mm, params.r_container, params.dim).ok().and_then(|roots| {
        roots.into_iter().min_by(|a, b| (a.r_star - init.radius()).abs().total_cmp(&(b.r_star - init.radius()).abs()))
    });
    let (steps, last_dt) = cfg.schedule();
    let mut state = init.clone();
    let mut samples = vec![sample(&state, params, equilibrium.as_ref())?];
    for n in 1..=steps {
        let dt = if n == steps { last_dt } else { cfg.dt };
        state = step_with(&state, params, cfg, dt)?;
        if n % cfg.output_every == 0 || n == steps {
            samples.push(sample(&state, params, equilibrium.as_ref())?);
        }
    }
    Ok(Trajectory { samples, final_state: state, equilibrium })
}
