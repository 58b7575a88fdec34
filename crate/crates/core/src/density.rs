//! Density matrices over one or two truncated modes.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::operators::{adjoint, eigh_hermitian, hermiticity_defect};

/// Which mode of a two-mode state an operation addresses. Mode one is the
/// kept (memory) mode, mode two the heralded/measured mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Hermitian, unit-trace, positive-semidefinite operator over one or two
/// modes, each truncated at N. The two-mode index ordering is
/// i = i₁·(N+1) + i₂.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    elements: Array2<Complex64>,
    modes: u8,
    truncation: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity (within 1e-10), normalizes the trace, and wraps.
    /// Positivity is not checked here; `validate` performs the full check.
    pub fn from_matrix(elements: Array2<Complex64>, modes: u8, truncation: usize) -> Result<Self> {
        if modes != 1 && modes != 2 {
            return Err(Error::Domain {
                param: "modes",
                value: modes as f64,
                bounds: "1 or 2",
            });
        }
        let dim = (truncation + 1).pow(modes as u32);
        if elements.nrows() != elements.ncols() {
            return Err(Error::NotSquare {
                rows: elements.nrows(),
                cols: elements.ncols(),
            });
        }
        if elements.nrows() != dim {
            return Err(Error::Mismatch {
                what: "matrix dimension",
                left: elements.nrows(),
                right: dim,
            });
        }
        let defect = hermiticity_defect(&elements);
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        // remove floating-point asymmetry so downstream eigensolves stay clean
        let symmetrized = (&elements + &adjoint(&elements)).mapv(|v| v * 0.5);
        Self::normalized_unchecked(symmetrized, modes, truncation)
    }

    /// Trace-normalizes a matrix already known to be Hermitian.
    pub(crate) fn normalized_unchecked(
        elements: Array2<Complex64>,
        modes: u8,
        truncation: usize,
    ) -> Result<Self> {
        let trace: Complex64 = elements.diag().sum();
        if trace.re.abs() < 1e-14 {
            return Err(Error::ZeroTrace(trace.re));
        }
        Ok(Self {
            elements: elements.mapv(|v| v / trace.re),
            modes,
            truncation,
        })
    }

    /// |ψ⟩⟨ψ| of a normalized pure state.
    pub fn pure(state: &FockVector) -> Result<Self> {
        let v = state.normalized()?;
        let amps = v.amplitudes();
        let dim = amps.len();
        let elements = Array2::from_shape_fn((dim, dim), |(i, j)| amps[i] * amps[j].conj());
        Ok(Self {
            elements,
            modes: 1,
            truncation: v.truncation(),
        })
    }

    pub fn elements(&self) -> &Array2<Complex64> {
        &self.elements
    }

    pub fn modes(&self) -> u8 {
        self.modes
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.elements.diag().sum().re
    }

    pub fn purity(&self) -> f64 {
        self.elements
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> Array1<f64> {
        let (vals, _) = eigh_hermitian(&self.elements);
        vals
    }

    /// Full invariant check: Hermitian within 1e-10, trace 1 within 1e-10,
    /// eigenvalues ≥ −1e-9.
    pub fn validate(&self) -> Result<()> {
        let defect = hermiticity_defect(&self.elements);
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Domain {
                param: "trace",
                value: tr,
                bounds: "1 within 1e-10",
            });
        }
        let min = self
            .eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::Domain {
                param: "min eigenvalue",
                value: min,
                bounds: ">= -1e-9",
            });
        }
        Ok(())
    }

    /// ρ ⊗ σ of two single-mode states at the same truncation.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.modes != 1 || other.modes != 1 {
            return Err(Error::Domain {
                param: "modes",
                value: (self.modes * other.modes) as f64,
                bounds: "tensor of single-mode states",
            });
        }
        if self.truncation != other.truncation {
            return Err(Error::Mismatch {
                what: "truncation",
                left: self.truncation,
                right: other.truncation,
            });
        }
        let d = self.dim();
        let dim = d * d;
        let mut elements = Array2::zeros((dim, dim));
        for i1 in 0..d {
            for i2 in 0..d {
                for j1 in 0..d {
                    for j2 in 0..d {
                        elements[(i1 * d + i2, j1 * d + j2)] =
                            self.elements[(i1, j1)] * other.elements[(i2, j2)];
                    }
                }
            }
        }
        Ok(Self {
            elements,
            modes: 2,
            truncation: self.truncation,
        })
    }

    /// Traces out the other mode of a two-mode state.
    pub fn partial_trace(&self, keep: Mode) -> Result<Self> {
        if self.modes != 2 {
            return Err(Error::Domain {
                param: "modes",
                value: self.modes as f64,
                bounds: "two-mode state required",
            });
        }
        let d = self.truncation + 1;
        let mut reduced = Array2::zeros((d, d));
        match keep {
            Mode::One => {
                for i in 0..d {
                    for j in 0..d {
                        let mut sum = Complex64::new(0.0, 0.0);
                        for k in 0..d {
                            sum += self.elements[(i * d + k, j * d + k)];
                        }
                        reduced[(i, j)] = sum;
                    }
                }
            }
            Mode::Two => {
                for i in 0..d {
                    for j in 0..d {
                        let mut sum = Complex64::new(0.0, 0.0);
                        for k in 0..d {
                            sum += self.elements[(k * d + i, k * d + j)];
                        }
                        reduced[(i, j)] = sum;
                    }
                }
            }
        }
        Ok(Self {
            elements: reduced,
            modes: 1,
            truncation: self.truncation,
        })
    }

    /// U ρ U†. U must match the full dimension.
    pub fn conjugate_by(&self, u: &Array2<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::Mismatch {
                what: "unitary dimension",
                left: u.nrows(),
                right: self.dim(),
            });
        }
        Ok(Self {
            elements: u.dot(&self.elements).dot(&adjoint(u)),
            modes: self.modes,
            truncation: self.truncation,
        })
    }

    /// tr(ρ A).
    pub fn expectation(&self, op: &Array2<Complex64>) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::Mismatch {
                what: "operator dimension",
                left: op.nrows(),
                right: self.dim(),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                sum += self.elements[(i, j)] * op[(j, i)];
            }
        }
        Ok(sum)
    }

    /// Diagonal populations of a single-mode state.
    pub fn populations(&self) -> Result<Vec<f64>> {
        if self.modes != 1 {
            return Err(Error::Domain {
                param: "modes",
                value: self.modes as f64,
                bounds: "single-mode state required",
            });
        }
        Ok(self.elements.diag().iter().map(|v| v.re).collect())
    }

    /// Re-embeds a single-mode state at a larger truncation (zero padding).
    pub fn embed(&self, truncation: usize) -> Result<Self> {
        if self.modes != 1 {
            return Err(Error::Domain {
                param: "modes",
                value: self.modes as f64,
                bounds: "single-mode state required",
            });
        }
        if truncation < self.truncation {
            return Err(Error::Truncation {
                n: self.truncation,
                max: truncation,
            });
        }
        let dim = truncation + 1;
        let mut elements = Array2::zeros((dim, dim));
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                elements[(i, j)] = self.elements[(i, j)];
            }
        }
        Ok(Self {
            elements,
            modes: 1,
            truncation,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DensityMatrixJson::from(self)).expect("serialization failed")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DensityMatrixJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

/// Wire format: {"truncation": N, "modes": m, "re": [[..]], "im": [[..]]}.
#[derive(Serialize, Deserialize)]
pub(crate) struct DensityMatrixJson {
    pub truncation: usize,
    pub modes: u8,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for DensityMatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut re = vec![vec![0.0; dim]; dim];
        let mut im = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                re[i][j] = rho.elements[(i, j)].re;
                im[i][j] = rho.elements[(i, j)].im;
            }
        }
        Self {
            truncation: rho.truncation,
            modes: rho.modes,
            re,
            im,
        }
    }
}

impl TryFrom<DensityMatrixJson> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: DensityMatrixJson) -> Result<Self> {
        let dim = (raw.truncation + 1).pow(raw.modes as u32);
        if raw.re.len() != dim || raw.im.len() != dim {
            return Err(Error::Mismatch {
                what: "matrix dimension",
                left: raw.re.len(),
                right: dim,
            });
        }
        let mut elements = Array2::zeros((dim, dim));
        for i in 0..dim {
            if raw.re[i].len() != dim || raw.im[i].len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: raw.re[i].len().max(raw.im[i].len()),
                });
            }
            for j in 0..dim {
                elements[(i, j)] = Complex64::new(raw.re[i][j], raw.im[i][j]);
            }
        }
        DensityMatrix::from_matrix(elements, raw.modes, raw.truncation)
    }
}

/// Hermitian square root clipped to the PSD cone.
fn psd_sqrt(m: &Array2<Complex64>) -> Array2<Complex64> {
    let (vals, vecs) = eigh_hermitian(m);
    let roots = vals.mapv(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let scaled = &vecs * &roots.view().insert_axis(ndarray::Axis(0));
    scaled.dot(&adjoint(&vecs))
}

/// Uhlmann fidelity [tr √(√a b √a)]², evaluated as the squared trace norm
/// of √a·√b: the singular values carry the small spectral scales without
/// the precision loss of squaring them first.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.truncation != b.truncation || a.modes != b.modes {
        return Err(Error::Mismatch {
            what: "state dimension",
            left: a.dim(),
            right: b.dim(),
        });
    }
    let product = psd_sqrt(&a.elements).dot(&psd_sqrt(&b.elements));
    let (_, singular, _) = product
        .svd(false, false)
        .expect("singular value decomposition failed");
    let trace_norm: f64 = singular.iter().sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// ⟨ψ|ρ|ψ⟩, the Uhlmann fidelity when one argument is pure.
pub fn fidelity_pure(psi: &FockVector, rho: &DensityMatrix) -> Result<f64> {
    if rho.modes != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes as f64,
            bounds: "single-mode state required",
        });
    }
    if psi.truncation() != rho.truncation {
        return Err(Error::Mismatch {
            what: "truncation",
            left: psi.truncation(),
            right: rho.truncation,
        });
    }
    let v = psi.normalized()?;
    let amps = v.amplitudes();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..amps.len() {
        for j in 0..amps.len() {
            sum += amps[i].conj() * rho.elements[(i, j)] * amps[j];
        }
    }
    Ok(sum.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{cat_state, fock_state, Parity, ScssParams};
    use approx::assert_abs_diff_eq;

    fn pure_fock(n: usize) -> DensityMatrix {
        DensityMatrix::pure(&fock_state(n, 20).unwrap()).unwrap()
    }

    #[test]
    fn fidelity_with_self_is_one() {
        let params = ScssParams::new(1.5, 0.3, Parity::Odd).unwrap();
        let rho = DensityMatrix::pure(&cat_state(&params, 20).unwrap()).unwrap();
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn fidelity_of_orthogonal_states_is_zero() {
        assert_abs_diff_eq!(
            fidelity(&pure_fock(0), &pure_fock(1)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_reduces_to_overlap_for_pure_states() {
        let a = cat_state(&ScssParams::new(1.2, 0.2, Parity::Odd).unwrap(), 20).unwrap();
        let b = cat_state(&ScssParams::new(1.5, 0.4, Parity::Odd).unwrap(), 20).unwrap();
        let f_full = fidelity(
            &DensityMatrix::pure(&a).unwrap(),
            &DensityMatrix::pure(&b).unwrap(),
        )
        .unwrap();
        let overlap = a.overlap_sq(&b).unwrap();
        assert_abs_diff_eq!(f_full, overlap, epsilon = 1e-9);
        // and the pure-state shortcut agrees
        let f_fast = fidelity_pure(&a, &DensityMatrix::pure(&b).unwrap()).unwrap();
        assert_abs_diff_eq!(f_fast, overlap, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_for_mixed_states() {
        let mut m = Array2::<Complex64>::zeros((21, 21));
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.3, 0.0);
        m[(2, 2)] = Complex64::new(0.2, 0.0);
        m[(0, 2)] = Complex64::new(0.1, 0.05);
        m[(2, 0)] = Complex64::new(0.1, -0.05);
        let a = DensityMatrix::from_matrix(m, 1, 20).unwrap();
        let b = pure_fock(1);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert_abs_diff_eq!(fab, fba, epsilon = 1e-9);
        assert!((0.0..=1.0).contains(&fab));
    }

    #[test]
    fn tensor_then_partial_trace_round_trips() {
        let a = pure_fock(1);
        let b = pure_fock(2);
        let joint = a.tensor(&b).unwrap();
        assert_eq!(joint.modes(), 2);
        assert_abs_diff_eq!(joint.trace(), 1.0, epsilon = 1e-12);
        let back_a = joint.partial_trace(Mode::One).unwrap();
        let back_b = joint.partial_trace(Mode::Two).unwrap();
        assert!(fidelity(&back_a, &a).unwrap() > 1.0 - 1e-10);
        assert!(fidelity(&back_b, &b).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = pure_fock(0);
        let b = DensityMatrix::pure(&fock_state(0, 10).unwrap()).unwrap();
        assert!(fidelity(&a, &b).is_err());
    }

    #[test]
    fn non_hermitian_matrix_is_rejected() {
        let mut m = Array2::<Complex64>::eye(21);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            DensityMatrix::from_matrix(m, 1, 20),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn json_round_trip_preserves_elements() {
        let params = ScssParams::new(1.1, 0.25, Parity::Even).unwrap();
        let rho = DensityMatrix::pure(&cat_state(&params, 8).unwrap()).unwrap();
        let text = rho.to_json();
        let back = DensityMatrix::from_json(&text).unwrap();
        assert_eq!(back.truncation(), 8);
        assert!(fidelity(&rho, &back).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn validate_accepts_constructed_states_and_flags_bad_trace() {
        let rho = pure_fock(3);
        rho.validate().unwrap();
    }
}
