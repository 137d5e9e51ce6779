//! `osmoflow` command-line driver: configuration, subcommands and the
//! acceptance suite.

pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use osmoflow_core::dynamics::{decay_rate_fit, linear_mode_evolve, simulate_radial, LinearEvolveConfig, StepperConfig};
use osmoflow_core::equilibria::find_equilibrium;
use osmoflow_core::linop::{
    assemble_mode_operator, eigenvalues, remove_kernel_component, spectrum_report, LinearGrids, SpectrumOptions,
};
use osmoflow_core::stokes::{solve_stokes_mode, verify_lopatinskii, ModeStokesProblem, StokesGrids};
use osmoflow_core::{RadialGrid, RadialState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{OutputDir, Provenance};

#[derive(Debug, Parser)]
#[command(name = "osmoflow", version, about = "Two-phase Stokes-osmosis membrane toolkit", after_long_help = config::defaults_help())]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML); unknown keys are rejected.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Physical parameters (TOML), replacing the [params] table of the configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for random draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum of the linearized operator over the modes -K..K.
    Spectrum {
        #[arg(long = "kmax", value_name = "K")]
        k_max: Option<i32>,
        /// Uniform cells per phase.
        #[arg(long)]
        cells: Option<usize>,
    },
    /// Radially symmetric gradient flow.
    Simulate {
        /// Initial state (JSON, as written to final_state.json).
        #[arg(long, value_name = "FILE")]
        init: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        /// Simulated duration, counted from the time of the initial state.
        #[arg(long = "tfinal", value_name = "T")]
        t_final: Option<f64>,
    },
    /// Linearized evolution of one angular mode from a random admissible state.
    ModeEvolve {
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "tfinal", value_name = "T")]
        t_final: Option<f64>,
    },
    /// Radial equilibria for prescribed phase masses.
    Equilibrium {
        #[arg(long = "m+", value_name = "A")]
        m_plus: f64,
        #[arg(long = "m-", value_name = "B")]
        m_minus: f64,
        #[arg(long = "rc", value_name = "C")]
        r_container: f64,
        #[arg(long, default_value_t = 2)]
        dim: u32,
    },
    /// Two-phase Stokes flow of one mode driven by a normal traction jump.
    Stokes {
        #[arg(long, allow_hyphen_values = true)]
        k: i32,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
    },
    /// Lopatinskii-Shapiro check of the interface conditions.
    VerifyLs {
        #[arg(long = "nu+", value_name = "A")]
        nu_plus: f64,
        #[arg(long = "nu-", value_name = "B")]
        nu_minus: f64,
        #[arg(long, num_args = 1.., allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
    },
    /// Runs the acceptance suite and writes verify_report.json.
    VerifyAll,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("osmoflow: {e}");
            e.exit_code()
        }
    }
}

fn load_config(global: &GlobalArgs) -> CliResult<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(path) = &global.params {
        cfg.load_params(path)?;
    }
    if let Some(out) = &global.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let mut cfg = load_config(&cli.global)?;
    match &cli.command {
        Command::Spectrum { k_max, cells } => {
            cfg.spectrum.k_max = k_max.unwrap_or(cfg.spectrum.k_max);
            cfg.grid.cells = cells.unwrap_or(cfg.grid.cells);
        }
        Command::Simulate { dt, t_final, .. } => {
            cfg.simulate.dt = dt.or(cfg.simulate.dt);
            cfg.simulate.t_final = t_final.unwrap_or(cfg.simulate.t_final);
        }
        Command::ModeEvolve { k, dt, t_final } => {
            cfg.evolve.k = k.unwrap_or(cfg.evolve.k);
            cfg.evolve.dt = dt.or(cfg.evolve.dt);
            cfg.evolve.t_final = t_final.or(cfg.evolve.t_final);
        }
        _ => {}
    }
    cfg.validate()?;
    let prov = Provenance::new(cfg.hash());
    match cli.command {
        Command::Spectrum { .. } => cmd_spectrum(&cfg, prov),
        Command::Simulate { init, .. } => cmd_simulate(&cfg, prov, init.as_deref()),
        Command::ModeEvolve { .. } => cmd_mode_evolve(&cfg, prov),
        Command::Equilibrium { m_plus, m_minus, r_container, dim } => {
            let roots = find_equilibrium(m_plus, m_minus, r_container, dim)?;
            print!("{}", output::to_json(&prov, &serde_json::json!({ "equilibria": roots }))?);
            Ok(0)
        }
        Command::Stokes { k, h } => cmd_stokes(&cfg, prov, k, h),
        Command::VerifyLs { nu_plus, nu_minus, xi } => {
            let rep = verify_lopatinskii(nu_plus, nu_minus, &xi)?;
            print!("{}", output::to_json(&prov, &rep)?);
            Ok(0)
        }
        Command::VerifyAll => cmd_verify_all(&cfg, prov),
    }
}

fn linear_grids(cfg: &RunConfig) -> CliResult<LinearGrids> {
    let p = &cfg.params;
    Ok(LinearGrids::new(
        RadialGrid::uniform(0.0, 1.0, cfg.grid.cells)?,
        RadialGrid::uniform(1.0, p.r_container, cfg.grid.cells)?,
        StokesGrids::uniform_order(cfg.grid.stokes_order, p)?,
    )?)
}

#[derive(Serialize)]
struct EigenRow {
    k: i32,
    re: f64,
    im: f64,
}

fn cmd_spectrum(cfg: &RunConfig, prov: Provenance) -> CliResult<i32> {
    let opts = SpectrumOptions { tol_zero: cfg.spectrum.tol_zero, spurious_threshold: cfg.spectrum.spurious_threshold };
    let report = spectrum_report(&cfg.params, &linear_grids(cfg)?, cfg.spectrum.k_max, &opts)?;
    let failures = report.failures(4);
    let out = OutputDir::create(&cfg.output_dir, prov)?;
    out.write_json("spectrum.json", &serde_json::json!({ "report": report, "failures": failures }))?;
    let rows =
        report.modes.iter().flat_map(|m| m.eigenvalues.iter().map(move |l| EigenRow { k: m.k, re: l.re, im: l.im }));
    out.write_csv("spectrum.csv", rows)?;
    println!(
        "kernel dimension {}, gap {}",
        report.kernel_dimension,
        report.gap.map_or("none".into(), |g| format!("{g:.6}"))
    );
    for f in &failures {
        eprintln!("osmoflow: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "M+")]
    mass_plus: f64,
    #[serde(rename = "M-")]
    mass_minus: f64,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "D")]
    dissipation: f64,
    distance: f64,
}

/// Reads a state written by `simulate`, or a bare state document.
pub fn read_state(path: &Path) -> CliResult<RadialState> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err = |e: serde_json::Error| CliError::Parse { path: path.into(), message: e.to_string() };
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    let doc = value.get_mut("state").map(serde_json::Value::take).unwrap_or(value);
    serde_json::from_value(doc).map_err(parse_err)
}

fn cmd_simulate(cfg: &RunConfig, prov: Provenance, init: Option<&Path>) -> CliResult<i32> {
    let p = &cfg.params;
    let sim = &cfg.simulate;
    let state = match init {
        Some(path) => read_state(path)?,
        None => RadialState::constant(sim.radius, p.r_container, sim.cells, sim.c_plus, sim.c_minus)?,
    };
    let dt = match sim.dt {
        Some(dt) => dt,
        None => StepperConfig::default_dt(&state, p)?,
    };
    let step = StepperConfig { output_every: sim.output_every, ..StepperConfig::new(dt, sim.t_final) };
    let traj = simulate_radial(&state, p, &step)?;
    let out = OutputDir::create(&cfg.output_dir, prov)?;
    out.write_csv(
        "trajectory.csv",
        traj.samples.iter().map(|s| TrajectoryRow {
            t: s.t,
            radius: s.radius,
            mass_plus: s.mass_plus,
            mass_minus: s.mass_minus,
            energy: s.energy,
            dissipation: s.dissipation,
            distance: s.distance,
        }),
    )?;
    out.write_json(
        "final_state.json",
        &serde_json::json!({ "dt": dt, "equilibrium": traj.equilibrium, "state": traj.final_state }),
    )?;
    println!(
        "R(T) = {:.12}, R* = {}",
        traj.final_state.radius(),
        traj.equilibrium.map_or("none".into(), |e| format!("{:.12}", e.r_star))
    );
    Ok(0)
}

#[derive(Serialize)]
struct NormRow {
    t: f64,
    norm: f64,
    drift: f64,
}

fn cmd_mode_evolve(cfg: &RunConfig, prov: Provenance) -> CliResult<i32> {
    let k = cfg.evolve.k;
    let op = assemble_mode_operator(k, &cfg.params, &linear_grids(cfg)?)?;
    let lead = eigenvalues(&op)?
        .iter()
        .map(|z| z.re)
        .find(|&l| l < -cfg.spectrum.tol_zero)
        .ok_or_else(|| CliError::Failed(format!("mode {k} has no decaying eigenvalue")))?;
    let t_final = cfg.evolve.t_final.unwrap_or(15.0 / lead.abs());
    let dt = cfg.evolve.dt.unwrap_or(t_final / 6000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let raw = op.random_admissible_state(&mut rng);
    let init = op.from_coordinates(&remove_kernel_component(&op, &op.to_coordinates(&raw)?)?);
    let evolve = LinearEvolveConfig { output_every: cfg.evolve.output_every, ..LinearEvolveConfig::new(dt, t_final) };
    let traj = linear_mode_evolve(&op, &init, &evolve)?;
    let fit = decay_rate_fit(&traj.norms, 0.3)?;
    let out = OutputDir::create(&cfg.output_dir, prov)?;
    out.write_csv(
        "mode_norms.csv",
        traj.norms.iter().zip(&traj.drift).map(|(&(t, norm), &(_, drift))| NormRow { t, norm, drift }),
    )?;
    let rel = (fit.rate - lead).abs() / lead.abs();
    out.write_json(
        "mode_evolve.json",
        &serde_json::json!({ "k": k, "dt": dt, "t_final": t_final, "eigenvalue": lead, "fit": fit, "relative_error": rel }),
    )?;
    println!("k = {k}: fitted rate {:.6}, leading eigenvalue {lead:.6}", fit.rate);
    Ok(0)
}

#[derive(Serialize)]
struct StokesRecord {
    k: i32,
    v_interface: Complex64,
    pressure_jump: Complex64,
    residuals: osmoflow_core::stokes::SolveResiduals,
}

fn cmd_stokes(cfg: &RunConfig, prov: Provenance, k: i32, h: f64) -> CliResult<i32> {
    let grids = StokesGrids::uniform_order(cfg.grid.stokes_order, &cfg.params)?;
    let sol = solve_stokes_mode(&ModeStokesProblem::new(k, Complex64::new(h, 0.0), cfg.params, grids))?;
    let rec =
        StokesRecord { k, v_interface: sol.v_interface, pressure_jump: sol.pressure_jump(), residuals: sol.residuals };
    print!("{}", output::to_json(&prov, &rec)?);
    Ok(0)
}

fn cmd_verify_all(cfg: &RunConfig, prov: Provenance) -> CliResult<i32> {
    let verifier = verify::Verifier::new(cfg.clone());
    let mut criteria = Vec::new();
    for &(id, _) in &verify::CRITERIA {
        let c = verifier.run(id);
        println!("{}", c.line());
        criteria.push(c);
    }
    let passed = criteria.iter().all(|c| c.passed);
    let report = verify::VerifyReport { passed, kernel_dimension: verifier.kernel_dimension(), criteria };
    let out = OutputDir::create(&cfg.output_dir, prov)?;
    let path = out.write_json("verify_report.json", &report)?;
    println!("report written to {}", path.display());
    Ok(if passed { 0 } else { 1 })
}
