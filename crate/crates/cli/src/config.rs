//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use osmoflow_core::PhysParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: PhysParams,
    pub grid: GridConfig,
    pub spectrum: SpectrumConfig,
    pub simulate: SimulateConfig,
    pub evolve: EvolveConfig,
    pub verify: VerifyConfig,
    /// Seed of every random draw.
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Resolution of the linearized operator and of the Stokes solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Uniform cells per phase.
    pub cells: usize,
    /// Collocation order per phase.
    pub stokes_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub k_max: i32,
    pub tol_zero: f64,
    /// Relative shift between resolutions above which an eigenvalue is dropped.
    pub spurious_threshold: f64,
}

/// Radial simulation from phase-wise constant data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub cells: usize,
    pub radius: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Defaults to `0.1 dr^2 / max kappa` limited by the interface speed.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub output_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub k: i32,
    /// Defaults to `t_final / 6000`.
    pub dt: Option<f64>,
    /// Defaults to 15 decay times of the leading nonzero eigenvalue.
    pub t_final: Option<f64>,
    pub output_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub semisimplicity_tol: f64,
    pub energy_identity_tol: f64,
    pub sweep_points: usize,
    pub phi_sweep_points: usize,
    pub rate_tol_nonlinear: f64,
    pub rate_tol_linear: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysParams::default(),
            grid: GridConfig::default(),
            spectrum: SpectrumConfig::default(),
            simulate: SimulateConfig::default(),
            evolve: EvolveConfig::default(),
            verify: VerifyConfig::default(),
            seed: 20_240_601,
            output_dir: PathBuf::from("osmoflow-out"),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { cells: 128, stokes_order: 64 }
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { k_max: 32, tol_zero: 1e-6, spurious_threshold: 1e-3 }
    }
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { cells: 32, radius: 1.0, c_plus: 2.2, c_minus: 1.0, dt: None, t_final: 10.0, output_every: 10 }
    }
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { k: 2, dt: None, t_final: None, output_every: 10 }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            semisimplicity_tol: 0.1,
            energy_identity_tol: 1e-6,
            sweep_points: 20,
            phi_sweep_points: 100,
            rate_tol_nonlinear: 0.05,
            rate_tol_linear: 0.02,
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    toml::from_str(&read(path)?).map_err(|e| CliError::Parse { path: path.into(), message: e.to_string() })
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        parse(path)
    }

    /// Replaces the physical parameters by those of a standalone TOML file.
    pub fn load_params(&mut self, path: &Path) -> CliResult<()> {
        self.params = parse(path)?;
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.params.validate_planar().map_err(|e| CliError::Config(e.to_string()))?;
        if self.grid.cells < 16 || !self.grid.cells.is_multiple_of(2) {
            return bad(format!("grid.cells must be even and at least 16, got {}", self.grid.cells));
        }
        if self.grid.stokes_order < 8 {
            return bad(format!("grid.stokes_order must be at least 8, got {}", self.grid.stokes_order));
        }
        if self.spectrum.k_max < 2 {
            return bad(format!("spectrum.k_max must be at least 2, got {}", self.spectrum.k_max));
        }
        let positive = [
            ("spectrum.tol_zero", self.spectrum.tol_zero),
            ("spectrum.spurious_threshold", self.spectrum.spurious_threshold),
            ("simulate.radius", self.simulate.radius),
            ("simulate.c_plus", self.simulate.c_plus),
            ("simulate.c_minus", self.simulate.c_minus),
            ("simulate.t_final", self.simulate.t_final),
            ("simulate.dt", self.simulate.dt.unwrap_or(1.0)),
            ("evolve.dt", self.evolve.dt.unwrap_or(1.0)),
            ("evolve.t_final", self.evolve.t_final.unwrap_or(1.0)),
            ("verify.semisimplicity_tol", self.verify.semisimplicity_tol),
            ("verify.energy_identity_tol", self.verify.energy_identity_tol),
            ("verify.rate_tol_nonlinear", self.verify.rate_tol_nonlinear),
            ("verify.rate_tol_linear", self.verify.rate_tol_linear),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return bad(format!("{name} must be positive and finite, got {v}"));
        }
        if self.simulate.radius >= self.params.r_container {
            return bad("simulate.radius must lie inside the container".into());
        }
        if self.simulate.cells < 8 {
            return bad(format!("simulate.cells must be at least 8, got {}", self.simulate.cells));
        }
        if self.simulate.output_every == 0 || self.evolve.output_every == 0 {
            return bad("output cadences must be at least 1".into());
        }
        if self.evolve.k.abs() > self.spectrum.k_max {
            return bad(format!("evolve.k = {} exceeds spectrum.k_max", self.evolve.k));
        }
        if self.verify.sweep_points == 0 || self.verify.phi_sweep_points == 0 {
            return bad("sweep sizes must be at least 1".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the configuration, without the
    /// output directory.
    pub fn hash(&self) -> String {
        let content = Self { output_dir: PathBuf::new(), ..self.clone() };
        let canonical = serde_json::to_string(&content).expect("configuration serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// The default configuration as TOML, for the help text.
pub fn defaults_help() -> String {
    let text = toml::to_string(&RunConfig::default()).expect("defaults serialize");
    format!("Configuration file (--config), with its defaults:\n\n{text}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[grid]\ncels = 64\n").is_err());
        assert!(toml::from_str::<RunConfig>("[params]\nnu = 1.0\n").is_err());
    }

    #[test]
    fn negative_viscosity_fails_validation() {
        let cfg: RunConfig = toml::from_str("[params]\nnu_minus = -1.0\n").unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig { seed: 1, ..RunConfig::default() };
        assert_eq!(a.hash(), RunConfig::default().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let moved = RunConfig { output_dir: "elsewhere".into(), ..RunConfig::default() };
        assert_eq!(a.hash(), moved.hash());
    }
}
