//! Physical parameters of the dimensionless two-phase model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material constants and container geometry.
///
/// The `+` phase is the region enclosed by the membrane, the `-` phase the
/// rest of the container. The reduced diffusivities `alpha = kappa / ctilde`
/// are always derived, never stored. Missing fields take their default values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysParams {
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub ctilde_plus: f64,
    pub ctilde_minus: f64,
    pub r_container: f64,
    pub dim: u32,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            nu_plus: 1.0,
            nu_minus: 1.0,
            kappa_plus: 1.0,
            kappa_minus: 1.0,
            ctilde_plus: 2.0,
            ctilde_minus: 1.0,
            r_container: 2.0,
            dim: 2,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("nu_plus", self.nu_plus),
            ("nu_minus", self.nu_minus),
            ("kappa_plus", self.kappa_plus),
            ("kappa_minus", self.kappa_minus),
            ("ctilde_plus", self.ctilde_plus),
            ("ctilde_minus", self.ctilde_minus),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.r_container.is_finite() && self.r_container > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "r_container must exceed the unit interface radius, got {}",
                self.r_container
            )));
        }
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {}", self.dim)));
        }
        Ok(())
    }

    /// Validation plus the restriction of the discretized solvers to the plane.
    pub fn validate_planar(&self) -> Result<()> {
        self.validate()?;
        if self.dim != 2 {
            return Err(Error::InvalidParameter(format!(
                "the mode solvers are planar; dim = {} is not supported",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn alpha_plus(&self) -> f64 {
        self.kappa_plus / self.ctilde_plus
    }

    pub fn alpha_minus(&self) -> f64 {
        self.kappa_minus / self.ctilde_minus
    }

    /// `m = N - 1`, the concentration jump of the unit-sphere equilibrium.
    pub fn m(&self) -> f64 {
        f64::from(self.dim) - 1.0
    }

    /// True when the stored concentrations are an equilibrium for the unit sphere.
    pub fn is_reference_equilibrium(&self, tol: f64) -> bool {
        ((self.ctilde_plus - self.ctilde_minus) - self.m()).abs() <= tol
    }

    pub fn require_reference_equilibrium(&self) -> Result<()> {
        if self.is_reference_equilibrium(1e-12) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "ctilde_plus - ctilde_minus = {} must equal N - 1 = {} for the unit-sphere equilibrium",
                self.ctilde_plus - self.ctilde_minus,
                self.m()
            )))
        }
    }

    /// Symbol of the linearized curvature operator `Delta_S + m` on mode `k`.
    pub fn curvature_symbol(&self, k: i32) -> f64 {
        self.m() - f64::from(k * k)
    }

    /// Area of the unit disk (`|D_+|`, planar).
    pub fn inner_area(&self) -> f64 {
        std::f64::consts::PI
    }

    /// Area of the annulus between the unit circle and the container wall.
    pub fn outer_area(&self) -> f64 {
        std::f64::consts::PI * (self.r_container * self.r_container - 1.0)
    }

    /// Length of the unit circle.
    pub fn interface_length(&self) -> f64 {
        2.0 * std::f64::consts::PI
    }
}
