//! Single-mode operators on the truncated basis.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a complex Hermitian matrix with a verified
/// eigenvector convention: returns (λ ascending, V) with H·V[:,k] = λ_k·V[:,k].
///
/// Depending on the memory order handed to LAPACK, the backend may solve
/// for conj(H) instead, returning conjugated eigenvectors; the residual
/// check below detects that and conjugates back.
pub(crate) fn eigh_hermitian(h: &Array2<Complex64>) -> (Array1<f64>, Array2<Complex64>) {
    let (vals, vecs) = h.eigh(UPLO::Lower).expect("eigendecomposition failed");
    let k = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let residual = |v: &Array1<Complex64>| -> f64 {
        h.dot(v)
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b * vals[k]).norm_sqr())
            .sum()
    };
    let v = vecs.column(k).to_owned();
    if residual(&v) <= residual(&v.mapv(|c| c.conj())) {
        (vals, vecs)
    } else {
        (vals, vecs.mapv(|c| c.conj()))
    }
}

/// a: a|n⟩ = √n |n−1⟩.
pub fn annihilation(truncation: usize) -> Array2<Complex64> {
    let dim = truncation + 1;
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// a†.
pub fn creation(truncation: usize) -> Array2<Complex64> {
    adjoint(&annihilation(truncation))
}

/// n̂ = a†a.
pub fn number(truncation: usize) -> Array2<Complex64> {
    let dim = truncation + 1;
    Array2::from_diag(&Array1::from_iter(
        (0..dim).map(|n| Complex64::new(n as f64, 0.0)),
    ))
}

/// X = (a + a†)/√2.
pub fn position(truncation: usize) -> Array2<Complex64> {
    let a = annihilation(truncation);
    (&a + &adjoint(&a)).mapv(|v| v / std::f64::consts::SQRT_2)
}

/// Photon-number parity, diag((−1)^n).
pub fn parity_operator(truncation: usize) -> Array2<Complex64> {
    let dim = truncation + 1;
    Array2::from_diag(&Array1::from_iter((0..dim).map(|n| {
        Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    })))
}

pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|v| v.conj())
}

/// exp(G) for anti-Hermitian G, via the eigendecomposition of iG.
///
/// The result is unitary to machine precision regardless of truncation.
pub fn expm_antihermitian(g: &Array2<Complex64>) -> Array2<Complex64> {
    let h = g.mapv(|v| v * Complex64::new(0.0, 1.0));
    debug_assert!(
        hermiticity_defect(&h) < 1e-10,
        "generator is not anti-Hermitian"
    );
    let (eigvals, eigvecs) = eigh_hermitian(&h);
    // exp(G) = exp(-iH) = V diag(e^{-iλ}) V†
    let phases = eigvals.mapv(|l| Complex64::from_polar(1.0, -l));
    let scaled = &eigvecs * &phases.view().insert_axis(ndarray::Axis(0));
    scaled.dot(&adjoint(&eigvecs))
}

/// S(z) = exp((z a² − z a†²)/2) for real z; z > 0 squeezes X.
///
/// |z| is capped at 1.5: past that the truncated generator at the default
/// basis size no longer represents the intended operation accurately.
pub fn squeeze_operator(z: f64, truncation: usize) -> Result<Array2<Complex64>> {
    if !z.is_finite() || z.abs() > 1.5 {
        return Err(Error::Domain {
            param: "z",
            value: z,
            bounds: "|z| <= 1.5",
        });
    }
    let a = annihilation(truncation);
    let a2 = a.dot(&a);
    let half_z = Complex64::new(0.5 * z, 0.0);
    let generator = (&a2 - &adjoint(&a2)).mapv(|v| v * half_z);
    Ok(expm_antihermitian(&generator))
}

/// ‖U U† − I‖_max, used by the unitarity contracts in tests.
pub fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
    let product = u.dot(&adjoint(u));
    let dim = u.nrows();
    let mut worst = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let expected = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((product[(i, j)] - expected).norm());
        }
    }
    worst
}

pub(crate) fn hermiticity_defect(m: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ladder_operators_satisfy_commutator_inside_truncation() {
        let a = annihilation(10);
        let comm = a.dot(&creation(10)) - creation(10).dot(&a);
        // [a, a†] = 1 except at the truncation edge
        for n in 0..10 {
            assert_abs_diff_eq!(comm[(n, n)].re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn squeeze_at_zero_is_identity() {
        let s = squeeze_operator(0.0, 20).unwrap();
        assert!(unitarity_defect(&s) < 1e-12);
        for n in 0..=20 {
            assert_abs_diff_eq!(s[(n, n)].re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn squeeze_is_unitary() {
        let s = squeeze_operator(0.56, 20).unwrap();
        assert!(unitarity_defect(&s) < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_variance_matches_closed_form() {
        let s = squeeze_operator(0.56, 20).unwrap();
        let vac = fock_state(0, 20).unwrap();
        let sv = vac.apply(&s).unwrap();
        let x = position(20);
        let x2 = x.dot(&x);
        let amps = sv.amplitudes();
        let mean_x: Complex64 = amps.mapv(|v| v.conj()).dot(&x.dot(amps));
        let mean_x2: Complex64 = amps.mapv(|v| v.conj()).dot(&x2.dot(amps));
        let var = mean_x2.re - mean_x.re * mean_x.re;
        assert_abs_diff_eq!(var, (-2.0 * 0.56_f64).exp() / 2.0, epsilon = 1e-3);
    }

    #[test]
    fn squeeze_guard_rejects_large_z() {
        assert!(squeeze_operator(1.6, 20).is_err());
    }

    #[test]
    fn antihermitian_exponentials_are_unitary() {
        // assorted generator strengths used across the crate
        for &scale in &[0.1, 0.56, 1.0, 1.5] {
            let a = annihilation(20);
            let a2 = a.dot(&a);
            let g = (&a2 - &adjoint(&a2)).mapv(|v| v * Complex64::new(0.5 * scale, 0.0));
            let u = expm_antihermitian(&g);
            assert!(unitarity_defect(&u) < 1e-8, "scale {scale}");
        }
    }
}
