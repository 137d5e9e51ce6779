//! Spectrum of the linearized operator at the reference equilibrium.

use osmoflow_core::equilibria::{phi_matrix, phi_matrix_by_quadrature};
use nalgebra::DMatrix;
use num_complex::Complex64;
use osmoflow_core::linop::{
    assemble_mode_operator, kernel_basis, semisimplicity_check, spectrum_report, LinearGrids, ModeState,
    SpectrumOptions,
};
use osmoflow_core::PhysParams;

#[test]
fn kernel_and_gap_at_default_parameters() {
    let p = PhysParams::default();
    let opts = SpectrumOptions::default();
    let grids = LinearGrids::uniform(128, &p).unwrap();
    let rep = spectrum_report(&p, &grids, 16, &opts).unwrap();
    assert!(rep.failures(4).is_empty(), "{:?}", rep.failures(4));
    for (k, expected) in [(0, 2), (1, 1), (-1, 1), (2, 0)] {
        assert_eq!(rep.mode(k).unwrap().kernel_count(opts.tol_zero), expected, "k = {k}");
    }
    assert!(rep.max_imag < 1e-8);
    assert!(rep.modes.iter().flat_map(|m| &m.eigenvalues).all(|l| l.norm() < opts.tol_zero || l.re < 0.0));

    let leading: Vec<f64> =
        (2..=16).map(|k| rep.mode(k).unwrap().leading_nonzero(opts.tol_zero).unwrap().re).collect();
    assert!(leading.windows(2).all(|w| w[1] < w[0]), "{leading:?}");

    let fine = spectrum_report(&p, &grids.with_cells(256).unwrap(), 16, &opts).unwrap();
    let (g1, g2) = (rep.gap.unwrap(), fine.gap.unwrap());
    assert!((g1 - g2).abs() < 5e-4 * g2, "{g1} vs {g2}");
}

#[test]
fn kernel_detection_fails_with_an_unreachable_tolerance() {
    let p = PhysParams::default();
    let opts = SpectrumOptions { tol_zero: 1e-30, ..Default::default() };
    let rep = spectrum_report(&p, &LinearGrids::uniform(32, &p).unwrap(), 4, &opts).unwrap();
    assert!(!rep.failures(4).is_empty());
}

#[test]
fn zero_eigenvalue_is_semisimple() {
    let p = PhysParams::default();
    let rep = semisimplicity_check(&p, &LinearGrids::uniform(64, &p).unwrap(), 0.1).unwrap();
    assert!(rep.passed, "{:?}", rep.residuals);
    assert_eq!(rep.residuals.len(), 4);
}

#[test]
fn phi_matrix_determinant_and_quadrature_agree() {
    let p = PhysParams::default();
    let phi = phi_matrix(&p).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((phi.det - 5.5 * pi2).abs() < 1e-8);
    let quad = phi_matrix_by_quadrature(&p, &LinearGrids::uniform(64, &p).unwrap());
    assert!((quad - phi.a).abs().max() < 1e-10);
}

#[test]
fn mode_zero_kernel_is_spanned_by_the_constant_shifts() {
    let p = PhysParams::default();
    let g = LinearGrids::uniform(64, &p).unwrap();
    let op = assemble_mode_operator(0, &p, &g).unwrap();
    let basis = kernel_basis(&op);
    assert_eq!(basis.len(), 2);
    let b = DMatrix::from_columns(&basis);
    for (mp, mm, rho) in [(p.m(), 0.0, -1.0), (0.0, p.m(), 1.0)] {
        let s = ModeState::from_fns(0, &g, |_| Complex64::from(mp), |_| Complex64::from(mm), Complex64::from(rho));
        let x = op.to_coordinates(&s).unwrap().map(|z| z.re);
        let coeff = b.transpose() * &x;
        let residual = (&x - &b * coeff).norm() / x.norm();
        assert!(residual < 1e-6, "{residual}");
    }
}
