//! Radial gradient flow and linear mode dynamics against the spectrum.

use osmoflow_core::dynamics::{decay_rate_fit, linear_mode_evolve, simulate_radial, LinearEvolveConfig, StepperConfig};
use osmoflow_core::equilibria::find_equilibrium;
use osmoflow_core::linop::{assemble_mode_operator, eigenvalues, remove_kernel_component, LinearGrids};
use osmoflow_core::{phase_mass, PhysParams, RadialState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reference_start(cells: usize) -> RadialState {
    RadialState::constant(1.0, 2.0, cells, 2.2, 1.0).unwrap()
}

#[test]
fn radial_flow_relaxes_to_the_predicted_equilibrium() {
    let p = PhysParams::default();
    let init = reference_start(32);
    let (m_plus, m_minus) = phase_mass(&init);
    let eq = find_equilibrium(m_plus, m_minus, 2.0, 2).unwrap();
    assert_eq!(eq.len(), 1);
    let dt = StepperConfig::default_dt(&init, &p).unwrap();
    let traj = simulate_radial(&init, &p, &StepperConfig::new(dt, 10.0)).unwrap();

    assert!(traj.max_mass_drift() < 1e-10);
    assert!(traj.max_energy_increase() <= dt * dt);
    assert!(traj.converged(1e-6));

    let window: Vec<(f64, f64)> = traj.radius_error().into_iter().filter(|&(t, _)| (3.0..=7.0).contains(&t)).collect();
    let rate = decay_rate_fit(&window, 1.0).unwrap().rate;
    let r_star = eq[0].r_star;
    let scaled = eq[0].rescaled_params(&p);
    let op = assemble_mode_operator(0, &scaled, &LinearGrids::uniform(128, &scaled).unwrap()).unwrap();
    let lead = eigenvalues(&op).unwrap().iter().map(|z| z.re).find(|&l| l < -1e-6).unwrap() / (r_star * r_star);
    assert!((rate - lead).abs() < 0.05 * lead.abs(), "{rate} vs {lead}");
}

#[test]
fn energy_decay_matches_dissipation() {
    let p = PhysParams::default();
    let init = reference_start(64);
    let dt = 1e-4;
    let traj = simulate_radial(&init, &p, &StepperConfig::new(dt, 0.5)).unwrap();
    let s = &traj.samples;
    for i in [2000, 3000, 4000] {
        let de = (s[i + 1].energy - s[i - 1].energy) / (s[i + 1].t - s[i - 1].t);
        let d = s[i].dissipation;
        assert!((de + d).abs() < 0.01 * d, "t = {}: {de} vs {d}", s[i].t);
    }
}

#[test]
fn linear_decay_rates_match_leading_eigenvalues() {
    let p = PhysParams::default();
    let g = LinearGrids::uniform(64, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [0, 2, 3] {
        let op = assemble_mode_operator(k, &p, &g).unwrap();
        let lead = eigenvalues(&op).unwrap().iter().map(|z| z.re).find(|&l| l < -1e-6).unwrap();
        let raw = op.random_admissible_state(&mut rng);
        let init = op.from_coordinates(&remove_kernel_component(&op, &op.to_coordinates(&raw).unwrap()).unwrap());
        let t_final = 15.0 / lead.abs();
        let traj = linear_mode_evolve(&op, &init, &LinearEvolveConfig::new(t_final / 6000.0, t_final)).unwrap();
        let rate = decay_rate_fit(&traj.norms, 0.3).unwrap().rate;
        assert!((rate - lead).abs() < 0.02 * lead.abs(), "k = {k}: {rate} vs {lead}");
    }
}

#[test]
fn state_round_trips_through_json() {
    let s = reference_start(16).with_time(0.25);
    let back = RadialState::from_json(&s.to_json()).unwrap();
    assert_eq!(back, s);
}
