//! Two-phase Stokes-osmosis membrane model in the plane.
//!
//! A closed membrane separates a solute-carrying disk from the surrounding
//! annulus of a circular container. The crate provides
//!
//! * [`stokes`]: the per-mode two-phase Stokes solver around the unit circle,
//! * [`linop`]: the linearized evolution operator and its spectrum,
//! * [`equilibria`]: radial equilibria from conserved masses,
//! * [`dynamics`]: radial nonlinear and per-mode linear time evolution,
//!
//! on top of shared parameters, grids, fields and diagnostics.

pub mod diagnostics;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod grid;
pub mod linop;
pub mod params;
pub mod spectral;
pub mod stokes;

pub use diagnostics::{dissipation, energy, mean_curvature, phase_mass};
pub use error::{Error, Result};
pub use field::{PhaseProfile, RadialState, TwoPhaseRadialField};
pub use grid::{GridFamily, RadialGrid};
pub use params::PhysParams;
