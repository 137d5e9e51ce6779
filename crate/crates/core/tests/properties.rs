//! Randomized structural properties.

use osmoflow_core::equilibria::constant_state_energy;
use osmoflow_core::linop::{assemble_mode_operator, quadratic_form, LinearGrids};
use osmoflow_core::{dissipation, energy, PhysParams, RadialGrid, RadialState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dissipation_is_nonnegative(radius in 0.3f64..1.7, a in 0.1f64..3.0, b in 0.1f64..3.0, w in 0.5f64..4.0) {
        let p = PhysParams::default();
        let s = RadialState::from_fns(RadialGrid::uniform(0.0, radius, 24).unwrap(), RadialGrid::uniform(radius, 2.0, 24).unwrap(), |r| a + 0.2 * (w * r).sin().abs(), |r| b * (1.0 + 0.1 * r)).unwrap();
        prop_assert!(dissipation(&s, &p).unwrap() >= 0.0);
    }

    #[test]
    fn constant_state_energy_matches_quadrature(radius in 0.3f64..1.7, a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let s = RadialState::constant(radius, 2.0, 16, a, b).unwrap();
        let (mp, mm) = osmoflow_core::phase_mass(&s);
        let e = energy(&s).unwrap();
        prop_assert!((e - constant_state_energy(mp, mm, 2.0, radius)).abs() < 1e-10 * e.abs().max(1.0));
    }

    #[test]
    fn quadratic_form_is_nonnegative_above_translations(k in 2i32..7, seed in any::<u64>()) {
        let p = PhysParams::default();
        let g = LinearGrids::uniform(24, &p).unwrap();
        let op = assemble_mode_operator(k, &p, &g).unwrap();
        let s = op.random_admissible_state(&mut ChaCha8Rng::seed_from_u64(seed));
        let q = quadratic_form(&op, &s).unwrap();
        let scale = op.norm(&op.to_coordinates(&s).unwrap()).powi(2);
        prop_assert!(q.re >= -1e-10 * scale);
        prop_assert!(q.im.abs() <= 1e-10 * scale);
    }
}
