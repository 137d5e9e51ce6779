//! Radial equilibria, the kernel of the linearization and the map that
//! separates kernel from range.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::RadialState;
use crate::linop::{LinearGrids, ModeState};
use crate::params::PhysParams;

/// Interior points of the sign-change scan.
pub const SCAN_POINTS: usize = 1024;
/// Bisection stops when the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-12;

/// A disk of radius `r_star` with phase-wise constant concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub r_star: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub r_container: f64,
    pub dim: u32,
}

impl Equilibrium {
    /// `c_+ - c_- - (N - 1) / R*`.
    pub fn defect(&self) -> f64 {
        self.c_plus - self.c_minus - (f64::from(self.dim) - 1.0) / self.r_star
    }

    /// The constant state on uniform grids with `intervals` cells per phase.
    pub fn state(&self, intervals: usize) -> Result<RadialState> {
        RadialState::constant(self.r_star, self.r_container, intervals, self.c_plus, self.c_minus)
    }

    /// Parameters of the same equilibrium after rescaling lengths by `R*`,
    /// so that the interface becomes the unit circle. Times scale by `R*^2`:
    /// a rate `lambda'` of the rescaled problem is `lambda' / R*^2` here.
    pub fn rescaled_params(&self, params: &PhysParams) -> PhysParams {
        let s = self.r_star;
        PhysParams {
            nu_plus: params.nu_plus / s,
            nu_minus: params.nu_minus / s,
            ctilde_plus: s * self.c_plus,
            ctilde_minus: s * self.c_minus,
            r_container: self.r_container / s,
            ..*params
        }
    }
}

fn equilibrium_defect(m_plus: f64, m_minus: f64, r_container: f64, dim: u32, r: f64) -> f64 {
    m_plus / (PI * r * r) - m_minus / (PI * (r_container * r_container - r * r)) - (f64::from(dim) - 1.0) / r
}

/// All radii in `(0, R_C)` at which the constant concentrations carrying the
/// masses `M_+`, `M_-` balance the curvature.
pub fn find_equilibrium(m_plus: f64, m_minus: f64, r_container: f64, dim: u32) -> Result<Vec<Equilibrium>> {
    if !(m_plus > 0.0 && m_minus > 0.0 && m_plus.is_finite() && m_minus.is_finite()) {
        return Err(Error::InvalidParameter(format!("masses must be positive, got {m_plus}, {m_minus}")));
    }
    if !(r_container > 0.0 && r_container.is_finite()) {
        return Err(Error::InvalidParameter(format!("container radius must be positive, got {r_container}")));
    }
    let f = |r: f64| equilibrium_defect(m_plus, m_minus, r_container, dim, r);
    let h = r_container / (SCAN_POINTS + 1) as f64;
    let scan: Vec<(f64, f64)> = (1..=SCAN_POINTS).map(|i| (h * i as f64, f(h * i as f64))).collect();
    let mut roots = Vec::new();
    for (i, w) in scan.windows(2).enumerate() {
        let ((mut a, fa), (mut b, fb)) = (w[0], w[1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if i + 2 == scan.len() && fb == 0.0 {
            roots.push(b);
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let mut fa = fa;
        while b - a > ROOT_TOL {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if roots.is_empty() {
        return Err(Error::NoEquilibrium { scan });
    }
    Ok(roots
        .into_iter()
        .map(|r| {
            let c_minus = m_minus / (PI * (r_container * r_container - r * r));
            // c_+ from the balance keeps the defining identity exact
            let c_plus = c_minus + (f64::from(dim) - 1.0) / r;
            Equilibrium { r_star: r, c_plus, c_minus, r_container, dim }
        })
        .collect())
}

/// Energy of the constant state with masses `(M_+, M_-)` and interface radius `r`.
pub fn constant_state_energy(m_plus: f64, m_minus: f64, r_container: f64, r: f64) -> f64 {
    let cp = m_plus / (PI * r * r);
    let cm = m_minus / (PI * (r_container * r_container - r * r));
    m_plus * cp.ln() + m_minus * cm.ln() + 2.0 * PI * r
}

/// Kernel direction of `L + K`, as its angular mode components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelVector {
    pub name: &'static str,
    pub modes: Vec<ModeState>,
}

/// The `N + 2` kernel directions: the two concentration shifts of mode 0
/// and the planar translations `x_1 = cos theta`, `x_2 = sin theta`.
pub fn null_space_basis(params: &PhysParams, grids: &LinearGrids) -> Vec<KernelVector> {
    let m = Complex64::from(params.m());
    let z = Complex64::new(0.0, 0.0);
    let constant =
        |a: Complex64, b: Complex64, rho: f64| ModeState::from_fns(0, grids, |_| a, |_| b, Complex64::from(rho));
    let interface = |k: i32, rho: Complex64| ModeState { rho, ..ModeState::zeros(k, grids) };
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    vec![
        KernelVector { name: "inner_shift", modes: vec![constant(m, z, -1.0)] },
        KernelVector { name: "outer_shift", modes: vec![constant(z, m, 1.0)] },
        KernelVector { name: "translation_x1", modes: vec![interface(1, half), interface(-1, half)] },
        KernelVector { name: "translation_x2", modes: vec![interface(1, -ihalf), interface(-1, ihalf)] },
    ]
}

/// `Phi(f_+, f_-, theta) = (ctilde_+ int_S theta + int_{D+} f_+, ctilde_- int_S theta - int_{D-} f_-)`
/// for a mode-0 state (other modes have zero mean and map to zero).
pub fn phi_map(state: &ModeState, params: &PhysParams, grids: &LinearGrids) -> [Complex64; 2] {
    if state.k != 0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let integral = |w: Vec<f64>, v: &[Complex64]| -> Complex64 { w.iter().zip(v).map(|(w, x)| x * *w).sum() };
    let surface = 2.0 * PI * state.rho;
    let inner = integral(grids.inner().area_weights(), &state.mu_plus);
    let outer = integral(grids.outer().area_weights(), &state.mu_minus);
    [params.ctilde_plus * surface + inner, params.ctilde_minus * surface - outer]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiMatrix {
    pub a: Matrix2<f64>,
    pub det: f64,
    /// The closed-form determinant as a sum of positive and negative terms.
    pub det_formula: f64,
}

/// Matrix `A` of `Phi` on the mode-0 kernel directions, rows scaled by
/// `-1 / ctilde_+-`, together with its determinant.
pub fn phi_matrix(params: &PhysParams) -> Result<PhiMatrix> {
    params.validate()?;
    params.require_reference_equilibrium()?;
    let (m, n) = (params.m(), f64::from(params.dim));
    let (cp, cm) = (params.ctilde_plus, params.ctilde_minus);
    let s = params.interface_length();
    let dp = params.inner_area();
    let dm = params.outer_area();
    let a = Matrix2::new(-m * dp / cp + s, -s, s, m * dm / cm - s);
    let det_formula = -m * s * dm / (n * cm) + m * s * dm / cm + m * s * dp / cp + m * dp * dm / cp;
    Ok(PhiMatrix { a, det: a.determinant(), det_formula })
}

/// `A` assembled by applying [`phi_map`] to the discrete mode-0 kernel vectors.
pub fn phi_matrix_by_quadrature(params: &PhysParams, grids: &LinearGrids) -> Matrix2<f64> {
    let basis = null_space_basis(params, grids);
    let cols: Vec<[Complex64; 2]> = basis[..2].iter().map(|v| phi_map(&v.modes[0], params, grids)).collect();
    let scale = [-1.0 / params.ctilde_plus, -1.0 / params.ctilde_minus];
    Matrix2::from_fn(|i, j| scale[i] * cols[j][i].re)
}
