//! Time evolution: the radially symmetric free-boundary problem and the
//! linearized dynamics of a single angular mode.

mod fit;
mod linear;
mod radial;

use serde::{Deserialize, Serialize};

use crate::diagnostics::mean_curvature;
use crate::error::{Error, Result};
use crate::field::RadialState;
use crate::params::PhysParams;

pub use fit::{decay_rate_fit, RateFit};
pub use linear::{linear_mode_evolve, LinearEvolveConfig, ModeTrajectory};
pub use radial::{simulate_radial, step_radial, Sample, Trajectory};

/// Time discretization of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Implicit diffusion and mesh convection, explicit interface law.
    #[default]
    ImexEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Closest admissible distance of the interface to the centre and to the wall.
    #[serde(default = "default_margin")]
    pub collision_margin: f64,
    /// Record a sample every this many steps.
    #[serde(default = "default_cadence")]
    pub output_every: usize,
}

fn default_margin() -> f64 {
    1e-3
}

fn default_cadence() -> usize {
    1
}

impl StepperConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            scheme: Scheme::default(),
            collision_margin: default_margin(),
            output_every: default_cadence(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.collision_margin > 0.0) {
            return Err(Error::InvalidParameter("collision margin must be positive".into()));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidParameter("output cadence must be at least 1".into()));
        }
        Ok(())
    }

    /// Default step `0.1 dr^2 / max kappa`, reduced if needed so that the
    /// initial interface velocity moves the interface by at most half a cell.
    pub fn default_dt(state: &RadialState, params: &PhysParams) -> Result<f64> {
        let c = state.concentration();
        let dr = c.inner().grid().min_spacing().min(c.outer().grid().min_spacing());
        let diffusive = 0.1 * dr * dr / params.kappa_plus.max(params.kappa_minus);
        let speed = (c.jump() + mean_curvature(state.radius(), params.dim)?).abs();
        Ok(if speed > 0.0 { diffusive.min(0.5 * dr / speed) } else { diffusive })
    }

    /// Number of steps and the length of the last one.
    pub(crate) fn schedule(&self) -> (usize, f64) {
        let full = (self.t_final / self.dt * (1.0 - 1e-12)).floor() as usize;
        let rest = self.t_final - full as f64 * self.dt;
        if rest > 1e-12 * self.t_final {
            (full + 1, rest)
        } else {
            (full, self.dt)
        }
    }
}
