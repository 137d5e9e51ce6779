//! Eigenvalues of the mode operators and their aggregation over modes.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{assemble_with_response, LinearGrids, ModeOperator};
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::stokes::normal_velocity_response;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumOptions {
    /// Eigenvalues with modulus below this count as zero.
    pub tol_zero: f64,
    /// Relative distance to the nearest coarse eigenvalue above which a
    /// fine eigenvalue is discarded as unresolved.
    pub spurious_threshold: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { tol_zero: 1e-6, spurious_threshold: 1e-3 }
    }
}

/// Resolved eigenvalues of one mode, sorted by decreasing real part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub k: i32,
    pub eigenvalues: Vec<Complex64>,
    pub discarded: usize,
    /// Largest relative distance between a retained eigenvalue and its
    /// nearest coarse counterpart.
    pub max_shift: f64,
}

impl ModeSpectrum {
    pub fn kernel_count(&self, tol_zero: f64) -> usize {
        self.eigenvalues.iter().filter(|l| l.norm() < tol_zero).count()
    }

    /// Largest real part among the nonzero eigenvalues.
    pub fn leading_nonzero(&self, tol_zero: f64) -> Option<Complex64> {
        self.eigenvalues.iter().copied().find(|l| l.norm() >= tol_zero)
    }
}

/// All eigenvalues of a mode operator. Modes whose form weights are positive
/// are symmetrized and use the symmetric solver; the others use a real Schur
/// decomposition.
pub fn eigenvalues(op: &ModeOperator) -> Result<Vec<Complex64>> {
    let a = op.matrix();
    let w = op.form_weights();
    let mut out: Vec<Complex64> = if w.iter().all(|&g| g > 0.0) {
        let n = op.dim();
        let s: Vec<f64> = w.iter().map(|g| g.sqrt()).collect();
        let b = DMatrix::from_fn(n, n, |i, j| 0.5 * (s[i] * a[(i, j)] / s[j] + s[j] * a[(j, i)] / s[i]));
        SymmetricEigen::try_new(b, f64::EPSILON, 0)
            .ok_or(Error::EigenFailure { k: op.k() })?
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(l, 0.0))
            .collect()
    } else {
        Schur::try_new(a.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigenFailure { k: op.k() })?
            .complex_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    if out.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
        return Err(Error::EigenFailure { k: op.k() });
    }
    out.sort_by(|x, y| y.re.total_cmp(&x.re));
    Ok(out)
}

/// Eigenvalues of `fine` that are reproduced by `coarse`.
pub fn eigen_spectrum(fine: &ModeOperator, coarse: &ModeOperator, opts: &SpectrumOptions) -> Result<ModeSpectrum> {
    let lf = eigenvalues(fine)?;
    let lc = eigenvalues(coarse)?;
    let coarse_has_zero = lc.iter().any(|l| l.norm() < opts.tol_zero);
    let mut eigenvalues = Vec::with_capacity(lf.len());
    let mut max_shift: f64 = 0.0;
    for &l in &lf {
        if l.norm() < opts.tol_zero {
            if coarse_has_zero {
                eigenvalues.push(l);
            }
            continue;
        }
        let shift = lc.iter().map(|c| (l - c).norm()).fold(f64::INFINITY, f64::min) / l.norm();
        if shift <= opts.spurious_threshold {
            max_shift = max_shift.max(shift);
            eigenvalues.push(l);
        }
    }
    Ok(ModeSpectrum { k: fine.k(), discarded: lf.len() - eigenvalues.len(), eigenvalues, max_shift })
}

/// Spectrum of `L + K` over the modes `-k_max..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub cells: usize,
    pub k_max: i32,
    pub tol_zero: f64,
    pub modes: Vec<ModeSpectrum>,
    pub kernel_dimension: usize,
    /// `-max Re lambda` over the nonzero retained eigenvalues.
    pub gap: Option<f64>,
    pub max_imag: f64,
    pub refinement_delta: f64,
}

impl SpectrumReport {
    pub fn mode(&self, k: i32) -> Option<&ModeSpectrum> {
        self.modes.iter().find(|m| m.k == k)
    }

    /// Problems preventing the expected kernel dimension and a positive gap.
    pub fn failures(&self, expected_kernel: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.kernel_dimension != expected_kernel {
            out.push(format!("kernel dimension {} != {expected_kernel}", self.kernel_dimension));
        }
        match self.gap {
            Some(g) if g > 0.0 => {}
            Some(g) => out.push(format!("spectral gap {g} is not positive")),
            None => out.push("no nonzero eigenvalue retained".into()),
        }
        out
    }
}

/// Assembles each mode at the given resolution and at half of it, and keeps
/// the eigenvalues the two agree on. The operator depends on `k` only
/// through `k^2`, so the spectra of `-k` are copies of those of `k`.
pub fn spectrum_report(
    params: &PhysParams,
    grids: &LinearGrids,
    k_max: i32,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("k_max must be at least 2, got {k_max}")));
    }
    let cells = grids.cells();
    let coarse_grids = grids.with_cells(cells / 2)?;
    let positive: Vec<ModeSpectrum> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let v = if params.curvature_symbol(k) == 0.0 {
                0.0
            } else {
                normal_velocity_response(k, params, grids.stokes())?
            };
            let fine = assemble_with_response(k, params, grids, v)?;
            let coarse = assemble_with_response(k, params, &coarse_grids, v)?;
            eigen_spectrum(&fine, &coarse, opts)
        })
        .collect::<Result<_>>()?;
    let mut modes: Vec<ModeSpectrum> =
        positive.iter().rev().filter(|m| m.k > 0).map(|m| ModeSpectrum { k: -m.k, ..m.clone() }).collect();
    modes.extend(positive);

    let all = || modes.iter().flat_map(|m| m.eigenvalues.iter());
    let kernel_dimension = all().filter(|l| l.norm() < opts.tol_zero).count();
    let gap = all().filter(|l| l.norm() >= opts.tol_zero).map(|l| -l.re).reduce(f64::min);
    let max_imag = all().map(|l| l.im.abs()).fold(0.0, f64::max);
    let refinement_delta = modes.iter().map(|m| m.max_shift).fold(0.0, f64::max);
    Ok(SpectrumReport {
        cells,
        k_max,
        tol_zero: opts.tol_zero,
        modes,
        kernel_dimension,
        gap,
        max_imag,
        refinement_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::super::assemble_mode_operator;
    use super::*;

    #[test]
    fn symmetric_and_schur_paths_agree() {
        let p = PhysParams::default();
        let g = LinearGrids::uniform(24, &p).unwrap();
        let op = assemble_mode_operator(3, &p, &g).unwrap();
        let sym = eigenvalues(&op).unwrap();
        let mut gen: Vec<Complex64> = Schur::new(op.matrix().clone()).complex_eigenvalues().iter().copied().collect();
        gen.sort_by(|x, y| y.re.total_cmp(&x.re));
        for (a, b) in sym.iter().zip(&gen) {
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn plus_and_minus_modes_coincide() {
        let p = PhysParams::default();
        let g = LinearGrids::uniform(24, &p).unwrap();
        let a = eigenvalues(&assemble_mode_operator(2, &p, &g).unwrap()).unwrap();
        let b = eigenvalues(&assemble_mode_operator(-2, &p, &g).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_report_has_four_dimensional_kernel() {
        let p = PhysParams::default();
        let g = LinearGrids::uniform(48, &p).unwrap();
        let r = spectrum_report(&p, &g, 4, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.kernel_dimension, 4);
        assert_eq!(r.mode(0).unwrap().kernel_count(1e-6), 2);
        assert_eq!(r.mode(-1).unwrap().kernel_count(1e-6), 1);
        assert!(r.gap.unwrap() > 0.0);
        assert!(r.failures(4).is_empty());
        let strict = spectrum_report(&p, &g, 2, &SpectrumOptions { tol_zero: 1e-30, ..Default::default() }).unwrap();
        assert_eq!(strict.failures(4).len(), 1);
    }
}
