//! Linearized dynamics `x' = (L + K) x` of one angular mode.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linop::{ModeOperator, ModeState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearEvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub output_every: usize,
}

impl LinearEvolveConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, output_every: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    /// `(t, ||x(t)||)` in the mass-weighted norm.
    pub norms: Vec<(f64, f64)>,
    /// `(t, ||x(t) - x(0)||)`.
    pub drift: Vec<(f64, f64)>,
    pub final_state: ModeState,
}

/// Integrates the linear mode dynamics with the two-step backward
/// differentiation formula (one backward Euler start-up step).
pub fn linear_mode_evolve(op: &ModeOperator, init: &ModeState, cfg: &LinearEvolveConfig) -> Result<ModeTrajectory> {
    if !(cfg.dt > 0.0 && cfg.t_final > 0.0 && cfg.dt.is_finite() && cfg.t_final.is_finite()) || cfg.output_every == 0 {
        return Err(Error::InvalidParameter(format!("invalid evolution config {cfg:?}")));
    }
    if !init.is_zero() {
        op.check_admissible(init)?;
    }
    let x0 = op.to_coordinates(init)?;
    let n = op.dim();
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let a = op.matrix();
    let id = nalgebra::DMatrix::<f64>::identity(n, n);
    let euler = (&id - a * cfg.dt).lu();
    let bdf2 = (&id * 3.0 - a * (2.0 * cfg.dt)).lu();
    let solve = |lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
                 rhs: &DVector<Complex64>|
     -> Result<DVector<Complex64>> {
        let re = lu.solve(&rhs.map(|z| z.re)).ok_or_else(|| Error::SingularSystem("implicit step".into()))?;
        let im = lu.solve(&rhs.map(|z| z.im)).ok_or_else(|| Error::SingularSystem("implicit step".into()))?;
        Ok(DVector::from_fn(n, |i, _| Complex64::new(re[i], im[i])))
    };
    let mut norms = vec![(0.0, op.norm(&x0))];
    let mut drift = vec![(0.0, 0.0)];
    let mut prev = x0.clone();
    let mut cur = solve(&euler, &x0)?;
    for step in 1..=steps {
        if step > 1 {
            let next = solve(&bdf2, &(&cur * Complex64::from(4.0) - &prev))?;
            prev = std::mem::replace(&mut cur, next);
        }
        if step % cfg.output_every == 0 || step == steps {
            let t = step as f64 * cfg.dt;
            norms.push((t, op.norm(&cur)));
            drift.push((t, op.norm(&(&cur - &x0))));
        }
    }
    Ok(ModeTrajectory { norms, drift, final_state: op.from_coordinates(&cur) })
}
