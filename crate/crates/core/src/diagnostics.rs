//! Scalar diagnostics of radial states: curvature, phase masses, energy and dissipation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{PhaseProfile, RadialState};
use crate::params::PhysParams;

pub const DEFAULT_CONCENTRATION_FLOOR: f64 = 1e-12;

/// Mean curvature of a sphere of radius `radius`, negative by convention.
pub fn mean_curvature(radius: f64, dim: u32) -> Result<f64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    Ok(-(f64::from(dim) - 1.0) / radius)
}

/// Total solute `(M_+, M_-)` in each phase.
pub fn phase_mass(state: &RadialState) -> (f64, f64) {
    let c = state.concentration();
    (c.inner().integrate(|_, v| v), c.outer().integrate(|_, v| v))
}

/// `integral of c ln c` plus the interface length.
pub fn energy(state: &RadialState) -> Result<f64> {
    let c = state.concentration();
    let entropy = |p: &PhaseProfile| -> Result<f64> {
        if let Some((&r, &value)) = p.nodes().iter().zip(p.values()).find(|(_, &v)| v < 0.0) {
            return Err(Error::NegativeConcentration { r, value });
        }
        Ok(p.integrate(|_, v| if v == 0.0 { 0.0 } else { v * v.ln() }))
    };
    Ok(entropy(c.inner())? + entropy(c.outer())? + 2.0 * PI * state.radius())
}

/// Energy dissipation rate with the default concentration floor.
pub fn dissipation(state: &RadialState, params: &PhysParams) -> Result<f64> {
    dissipation_with_floor(state, params, DEFAULT_CONCENTRATION_FLOOR)
}

/// `integral of kappa |c'|^2 / c` plus `|Gamma| ([[c]] + H)^2`.
pub fn dissipation_with_floor(state: &RadialState, params: &PhysParams, floor: f64) -> Result<f64> {
    let c = state.concentration();
    let bulk = |p: &PhaseProfile, kappa: f64| -> Result<f64> {
        if let Some((&r, &value)) = p.nodes().iter().zip(p.values()).find(|(_, &v)| v < floor) {
            return Err(Error::ConcentrationBelowFloor { r, value, floor });
        }
        let grad = p.derivative();
        Ok(p.grid().area_weights().iter().zip(grad).zip(p.values()).map(|((w, g), v)| w * kappa * g * g / v).sum())
    };
    let radius = state.radius();
    let drive = c.jump() + mean_curvature(radius, params.dim)?;
    Ok(bulk(c.inner(), params.kappa_plus)? + bulk(c.outer(), params.kappa_minus)? + 2.0 * PI * radius * drive * drive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use std::f64::consts::E;

    #[test]
    fn curvature_values() {
        assert_eq!(mean_curvature(1.0, 2).unwrap(), -1.0);
        assert_eq!(mean_curvature(2.0, 2).unwrap(), -0.5);
        assert_eq!(mean_curvature(1.0, 3).unwrap(), -2.0);
        assert!(mean_curvature(0.0, 2).is_err());
        assert!(mean_curvature(-1.0, 2).is_err());
    }

    #[test]
    fn constant_state_masses_and_energy() {
        let s = RadialState::constant(1.0, 2.0, 16, 2.0, 1.0).unwrap();
        let (mp, mm) = phase_mass(&s);
        assert!((mp - 2.0 * PI).abs() < 1e-13);
        assert!((mm - 3.0 * PI).abs() < 1e-13);
        let ones = RadialState::constant(1.0, 2.0, 16, 1.0, 1.0).unwrap();
        assert!((energy(&ones).unwrap() - 2.0 * PI).abs() < 1e-13);
        let e = RadialState::constant(1.0, 2.0, 16, E, 1.0).unwrap();
        assert!((energy(&e).unwrap() - (E * PI + 2.0 * PI)).abs() < 1e-12);
        let zero = RadialState::constant(1.0, 2.0, 16, 0.0, 0.0).unwrap();
        assert_eq!(phase_mass(&zero), (0.0, 0.0));
        assert!((energy(&zero).unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn dissipation_values() {
        let p = PhysParams::default();
        let eq = RadialState::constant(1.0, 2.0, 16, 2.0, 1.0).unwrap();
        assert!(dissipation(&eq, &p).unwrap().abs() < 1e-14);
        let p4 = PhysParams { r_container: 4.0, ..p };
        let s = RadialState::constant(2.0, 4.0, 16, 2.0, 1.0).unwrap();
        assert!((dissipation(&s, &p4).unwrap() - PI).abs() < 1e-13);
        let low = RadialState::constant(1.0, 2.0, 16, 1e-14, 1.0).unwrap();
        assert!(matches!(dissipation(&low, &p), Err(Error::ConcentrationBelowFloor { .. })));
    }

    fn smooth(n: usize) -> RadialState {
        RadialState::from_fns(
            RadialGrid::chebyshev(0.0, 1.2, n).unwrap(),
            RadialGrid::chebyshev(1.2, 2.0, n).unwrap(),
            |r| 2.0 + 0.3 * (r * r).cos(),
            |r| 1.0 + 0.2 * (2.0 - r).powi(2),
        )
        .unwrap()
    }

    #[test]
    fn spectral_grids_match_refined_oracle() {
        let p = PhysParams::default();
        let (a, b) = (smooth(20), smooth(80));
        assert!((energy(&a).unwrap() - energy(&b).unwrap()).abs() < 1e-8);
        assert!((dissipation(&a, &p).unwrap() - dissipation(&b, &p).unwrap()).abs() < 1e-8);
        let (ma, mb) = (phase_mass(&a), phase_mass(&b));
        assert!((ma.0 - mb.0).abs() < 1e-10 && (ma.1 - mb.1).abs() < 1e-10);
    }

    #[test]
    fn uniform_grids_converge_at_second_order() {
        let state = |n| {
            RadialState::from_fns(
                RadialGrid::uniform(0.0, 1.2, n).unwrap(),
                RadialGrid::uniform(1.2, 2.0, n).unwrap(),
                |r| 2.0 + 0.3 * (r * r).cos(),
                |r| 1.0 + 0.2 * (2.0 - r).powi(2),
            )
            .unwrap()
        };
        let exact = energy(&smooth(80)).unwrap();
        let err = |n| (energy(&state(n)).unwrap() - exact).abs();
        assert!((err(32) / err(64)).log2() > 1.9);
    }
}
