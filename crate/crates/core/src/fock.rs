//! Pure states over a truncated Fock basis.
//!
//! Quadrature convention throughout the crate: X = (a + a†)/√2, so the
//! vacuum has Var(X) = 1/2 and the position-basis wavefunction of |n⟩ is
//! the unit-mass harmonic-oscillator eigenfunction Ψ_n.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::squeeze_operator;

/// Ψ_n(x) for the convention X = (a + a†)/√2 (∫ Ψ_n² dx = 1).
///
/// Evaluated with the three-term recurrence in n, which stays accurate
/// far beyond the factorial-overflow limit of the closed form.
pub fn fock_wavefunction(n: usize, x: f64) -> f64 {
    fock_wavefunctions(n, x)[n]
}

/// All of Ψ_0(x) ..= Ψ_{n_max}(x) in one recurrence pass.
pub fn fock_wavefunctions(n_max: usize, x: f64) -> Vec<f64> {
    let mut psi = vec![0.0; n_max + 1];
    psi[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n_max == 0 {
        return psi;
    }
    psi[1] = std::f64::consts::SQRT_2 * x * psi[0];
    for n in 1..n_max {
        let np1 = (n + 1) as f64;
        psi[n + 1] = x * (2.0 / np1).sqrt() * psi[n] - (n as f64 / np1).sqrt() * psi[n - 1];
    }
    psi
}

/// A pure single-mode state: complex amplitudes over |0⟩ ..= |N⟩.
///
/// The truncation N is fixed at construction; operations across different
/// truncations are rejected rather than silently padded.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Array1<Complex64>,
    truncation: usize,
}

impl FockVector {
    /// Wraps an amplitude vector of length N+1 (N ≥ 1). Does not normalize.
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Domain {
                param: "truncation",
                value: amplitudes.len() as f64 - 1.0,
                bounds: "N >= 1",
            });
        }
        let truncation = amplitudes.len() - 1;
        Ok(Self {
            amplitudes,
            truncation,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Returns the unit-norm version of this state.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::DegenerateState("cannot normalize the zero vector"));
        }
        Ok(Self {
            amplitudes: self.amplitudes.mapv(|a| a / n),
            truncation: self.truncation,
        })
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.truncation != other.truncation {
            return Err(Error::Mismatch {
                what: "truncation",
                left: self.truncation,
                right: other.truncation,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|² for unit-norm states.
    pub fn overlap_sq(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies a (N+1)x(N+1) matrix to the amplitudes.
    pub fn apply(&self, op: &Array2<Complex64>) -> Result<Self> {
        if op.nrows() != self.amplitudes.len() || op.ncols() != self.amplitudes.len() {
            return Err(Error::Mismatch {
                what: "operator dimension",
                left: op.nrows(),
                right: self.amplitudes.len(),
            });
        }
        Ok(Self {
            amplitudes: op.dot(&self.amplitudes),
            truncation: self.truncation,
        })
    }
}

/// |n⟩ at truncation N.
pub fn fock_state(n: usize, truncation: usize) -> Result<FockVector> {
    if n > truncation {
        return Err(Error::Truncation { n, max: truncation });
    }
    let mut amplitudes = Array1::zeros(truncation + 1);
    amplitudes[n] = Complex64::new(1.0, 0.0);
    FockVector::new(amplitudes)
}

/// Raw coherent-state amplitudes α^n/√(n!) · e^{-|α|²/2}, not renormalized
/// and with no truncation guard. Callers that scan parameter grids past the
/// guard use this directly.
pub(crate) fn coherent_amplitudes(alpha: Complex64, truncation: usize) -> Array1<Complex64> {
    let mut amplitudes = Array1::zeros(truncation + 1);
    let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amplitudes[0] = term;
    for n in 1..=truncation {
        term *= alpha / (n as f64).sqrt();
        amplitudes[n] = term;
    }
    amplitudes
}

/// |α⟩ renormalized over the truncated basis.
///
/// Requires |α|² ≤ N/3 so the truncated tail is negligible.
pub fn coherent_state(alpha: Complex64, truncation: usize) -> Result<FockVector> {
    let nsq = alpha.norm_sqr();
    if nsq > truncation as f64 / 3.0 {
        return Err(Error::Domain {
            param: "|alpha|^2",
            value: nsq,
            bounds: "<= N/3",
        });
    }
    FockVector::new(coherent_amplitudes(alpha, truncation))?.normalized()
}

/// Parity of a coherent-state superposition: odd is |α⟩ − |−α⟩, even is
/// |α⟩ + |−α⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Odd => write!(f, "odd"),
            Parity::Even => write!(f, "even"),
        }
    }
}

/// Parameters of a squeezed coherent-state superposition S(z)(|α⟩ ± |−α⟩).
///
/// The squeezing parameter z relates to dB via dB = 20·z/ln(10); z > 0
/// squeezes the X quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScssParams {
    pub alpha: f64,
    pub z: f64,
    pub parity: Parity,
}

impl ScssParams {
    /// α must be ≥ 0; the sign of the superposition is absorbed into the
    /// parity convention.
    pub fn new(alpha: f64, z: f64, parity: Parity) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::Domain {
                param: "alpha",
                value: alpha,
                bounds: ">= 0",
            });
        }
        Ok(Self { alpha, z, parity })
    }

    pub fn squeezing_db(&self) -> f64 {
        20.0 * self.z / std::f64::consts::LN_10
    }

    pub fn from_db(alpha: f64, db: f64, parity: Parity) -> Result<Self> {
        Self::new(alpha, std::f64::consts::LN_10 * db / 20.0, parity)
    }
}

pub(crate) fn cat_amplitudes_raw(params: &ScssParams, truncation: usize) -> Array1<Complex64> {
    let alpha = Complex64::new(params.alpha, 0.0);
    let plus = coherent_amplitudes(alpha, truncation);
    let minus = coherent_amplitudes(-alpha, truncation);
    match params.parity {
        Parity::Odd => plus - minus,
        Parity::Even => plus + minus,
    }
}

/// Builds the unnormalized superposition, applies S(z), and normalizes.
/// The truncation guard on α applies; the degenerate odd α = 0 case errors.
pub(crate) fn cat_state_raw(params: &ScssParams, truncation: usize) -> Result<FockVector> {
    let raw = FockVector::new(cat_amplitudes_raw(params, truncation))?;
    if raw.norm() < 1e-12 {
        return Err(Error::DegenerateState(
            "odd superposition at alpha = 0 vanishes",
        ));
    }
    let squeezed = if params.z == 0.0 {
        raw
    } else {
        raw.apply(&squeeze_operator(params.z, truncation)?)?
    };
    squeezed.normalized()
}

/// Normalized S(z)(|α⟩ ± |−α⟩) at truncation N.
pub fn cat_state(params: &ScssParams, truncation: usize) -> Result<FockVector> {
    if params.alpha * params.alpha > truncation as f64 / 3.0 {
        return Err(Error::Domain {
            param: "alpha^2",
            value: params.alpha * params.alpha,
            bounds: "<= N/3",
        });
    }
    cat_state_raw(params, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_state_is_basis_vector() {
        let v = fock_state(0, 20).unwrap();
        assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes().iter().skip(1).all(|a| a.norm() == 0.0));

        let v3 = fock_state(3, 20).unwrap();
        for (n, a) in v3.amplitudes().iter().enumerate() {
            if n == 3 {
                assert_eq!(a.re, 1.0);
            } else {
                assert_eq!(a.norm(), 0.0);
            }
        }
    }

    #[test]
    fn fock_state_rejects_out_of_range() {
        assert!(matches!(
            fock_state(21, 20),
            Err(Error::Truncation { n: 21, max: 20 })
        ));
    }

    #[test]
    fn vacuum_is_coherent_zero() {
        let v = coherent_state(Complex64::new(0.0, 0.0), 20).unwrap();
        let vac = fock_state(0, 20).unwrap();
        assert_abs_diff_eq!(v.overlap_sq(&vac).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_overlap_matches_gaussian_closed_form() {
        // ⟨α=1|α=−1⟩ = e^{−2|α|²} with |α−(−α)| fixed; oracle e^{-2}
        let a = coherent_state(Complex64::new(1.0, 0.0), 20).unwrap();
        let b = coherent_state(Complex64::new(-1.0, 0.0), 20).unwrap();
        let overlap = a.inner(&b).unwrap();
        assert_abs_diff_eq!(overlap.re, (-2.0_f64).exp(), epsilon = 1e-6);
        assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_tail_inside_truncation() {
        // Poisson tail of |α|² = 2.47² over n ≤ 20, summed directly.
        let alpha = Complex64::new(2.47, 0.0);
        let raw = coherent_amplitudes(alpha, 20);
        let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm >= 0.9999, "norm before renormalization: {norm}");
    }

    #[test]
    fn coherent_guard_rejects_large_amplitude() {
        assert!(coherent_state(Complex64::new(3.0, 0.0), 20).is_err());
    }

    #[test]
    fn odd_cat_has_no_even_amplitudes() {
        let params = ScssParams::new(1.3, 0.0, Parity::Odd).unwrap();
        let v = cat_state(&params, 20).unwrap();
        for n in (0..=20).step_by(2) {
            assert_abs_diff_eq!(v.amplitudes()[n].norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn small_alpha_odd_cat_approaches_single_photon() {
        let params = ScssParams::new(0.01, 0.0, Parity::Odd).unwrap();
        let v = cat_state(&params, 20).unwrap();
        let one = fock_state(1, 20).unwrap();
        assert!(v.overlap_sq(&one).unwrap() > 0.9999);
    }

    #[test]
    fn small_alpha_even_cat_approaches_vacuum() {
        let params = ScssParams::new(0.01, 0.0, Parity::Even).unwrap();
        let v = cat_state(&params, 20).unwrap();
        let vac = fock_state(0, 20).unwrap();
        assert!(v.overlap_sq(&vac).unwrap() > 0.9999);
    }

    #[test]
    fn odd_cat_at_zero_alpha_is_degenerate() {
        let params = ScssParams::new(0.0, 0.0, Parity::Odd).unwrap();
        assert!(matches!(
            cat_state(&params, 20),
            Err(Error::DegenerateState(_))
        ));
        // degenerate regardless of squeezing
        let squeezed = ScssParams::new(0.0, 0.5, Parity::Odd).unwrap();
        assert!(cat_state(&squeezed, 20).is_err());
    }

    #[test]
    fn wavefunction_closed_forms_at_origin() {
        let pi_quarter = std::f64::consts::PI.powf(-0.25);
        assert_abs_diff_eq!(fock_wavefunction(0, 0.0), pi_quarter, epsilon = 1e-9);
        assert_abs_diff_eq!(fock_wavefunction(1, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            fock_wavefunction(2, 0.0),
            -pi_quarter / 2.0_f64.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn wavefunctions_are_orthonormal_under_quadrature() {
        // ∫ Ψ_m Ψ_n dx over a wide grid; Riemann sum at Δx = 0.01.
        let dx = 0.01;
        let xs: Vec<f64> = (-1500..=1500).map(|i| i as f64 * dx).collect();
        let mut gram = [[0.0; 3]; 3];
        for &x in &xs {
            let psi = fock_wavefunctions(8, x);
            for m in 0..3 {
                for n in 0..3 {
                    // spot-check a few low orders plus one high order below
                    gram[m][n] += psi[m + 3] * psi[n + 3] * dx;
                }
            }
        }
        for m in 0..3 {
            for n in 0..3 {
                let expected = if m == n { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[m][n], expected, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn high_order_wavefunction_stays_finite_and_normalized() {
        let dx = 0.005;
        let norm: f64 = (-4000..=4000)
            .map(|i| {
                let x = i as f64 * dx;
                let p = fock_wavefunction(90, x);
                p * p * dx
            })
            .sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn squeezing_db_round_trips() {
        let p = ScssParams::from_db(2.47, 4.82, Parity::Odd).unwrap();
        assert_abs_diff_eq!(p.squeezing_db(), 4.82, epsilon = 1e-14);
        let q = ScssParams::new(1.0, 0.56, Parity::Odd).unwrap();
        let r = ScssParams::from_db(1.0, q.squeezing_db(), Parity::Odd).unwrap();
        assert_abs_diff_eq!(r.z, 0.56, epsilon = 1e-15);
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(ScssParams::new(-0.5, 0.0, Parity::Odd).is_err());
    }

    #[test]
    fn cross_truncation_inner_product_is_rejected() {
        let a = fock_state(0, 20).unwrap();
        let b = fock_state(0, 10).unwrap();
        assert!(a.inner(&b).is_err());
    }
}
