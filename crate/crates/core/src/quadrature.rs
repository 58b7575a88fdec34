//! Rotated-quadrature distributions pr(x|θ) = Σ_{m,n} ρ_{mn} Ψ_m(x) Ψ_n(x) e^{i(n−m)θ}.

use ndarray::Array2;
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::fock_wavefunctions;

/// The probability density of the X_θ quadrature of a single-mode state,
/// precomputed for one phase and evaluable at any x.
#[derive(Debug, Clone)]
pub struct QuadraturePdf {
    /// ρ with the e^{i(n−m)θ} phases folded in.
    rotated: Array2<Complex64>,
}

impl QuadraturePdf {
    pub fn eval(&self, x: f64) -> f64 {
        let dim = self.rotated.nrows();
        let psi = fock_wavefunctions(dim - 1, x);
        let mut total = 0.0;
        for m in 0..dim {
            // diagonal plus twice the real part of the upper triangle
            total += self.rotated[(m, m)].re * psi[m] * psi[m];
            for n in (m + 1)..dim {
                total += 2.0 * self.rotated[(m, n)].re * psi[m] * psi[n];
            }
        }
        total
    }

    /// Riemann integral over a uniform grid, for normalization checks.
    pub fn integral(&self, x_min: f64, x_max: f64, points: usize) -> f64 {
        let dx = (x_max - x_min) / (points - 1) as f64;
        (0..points)
            .map(|i| self.eval(x_min + i as f64 * dx) * dx)
            .sum()
    }
}

/// Builds pr(·|θ) for a single-mode state.
pub fn quadrature_pdf(rho: &DensityMatrix, theta: f64) -> Result<QuadraturePdf> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    let dim = rho.dim();
    let elements = rho.elements();
    let mut rotated = Array2::zeros((dim, dim));
    for m in 0..dim {
        for n in 0..dim {
            let phase = Complex64::from_polar(1.0, (n as f64 - m as f64) * theta);
            rotated[(m, n)] = elements[(m, n)] * phase;
        }
    }
    Ok(QuadraturePdf { rotated })
}
