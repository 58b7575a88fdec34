//! Two-mode interactions, photon loss, and quadrature heralding.

use ndarray::Array2;
use num_complex::Complex64;

use crate::density::{DensityMatrix, Mode};
use crate::error::{Error, Result};
use crate::fock::fock_wavefunctions;
use crate::operators::expm_antihermitian;

/// Intensity reflectivity R = r² of a beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    reflectivity: f64,
}

impl BeamSplitterSpec {
    pub fn new(reflectivity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::Domain {
                param: "reflectivity",
                value: reflectivity,
                bounds: "[0, 1]",
            });
        }
        Ok(Self { reflectivity })
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    /// Mixing angle arcsin(√R) ∈ [0, π/2].
    pub fn angle(&self) -> f64 {
        self.reflectivity.sqrt().asin()
    }
}

/// δ ↦ R = sin²(δ/2): the effective reflectivity of a retardance-δ wave
/// plate followed by a polarizing splitter.
pub fn retardance_to_reflectivity(delta: f64) -> f64 {
    let s = (delta / 2.0).sin();
    s * s
}

/// Exponentiates a two-mode generator c₊·a₁†a₂ + c₋·a₁a₂†, which conserves
/// total photon number, block by block. Requires c₋ = −c̄₊ (anti-Hermitian).
fn number_conserving_unitary(
    c_plus: Complex64,
    c_minus: Complex64,
    truncation: usize,
) -> Array2<Complex64> {
    let d = truncation + 1;
    let mut u = Array2::zeros((d * d, d * d));
    for total in 0..=(2 * truncation) {
        let lo = total.saturating_sub(truncation);
        let hi = total.min(truncation);
        let size = hi - lo + 1;
        let mut g = Array2::zeros((size, size));
        for k in lo..hi {
            // a₁†a₂ : |k, total−k⟩ → |k+1, total−k−1⟩
            let amp = (((k + 1) * (total - k)) as f64).sqrt();
            g[(k + 1 - lo, k - lo)] += c_plus * amp;
            // a₁a₂† : |k+1, total−k−1⟩ → |k, total−k⟩
            g[(k - lo, k + 1 - lo)] += c_minus * amp;
        }
        let block = if size == 1 {
            Array2::from_elem((1, 1), Complex64::new(1.0, 0.0))
        } else {
            expm_antihermitian(&g)
        };
        for (bi, i) in (lo..=hi).enumerate() {
            for (bj, j) in (lo..=hi).enumerate() {
                u[(i * d + (total - i), j * d + (total - j))] = block[(bi, bj)];
            }
        }
    }
    u
}

/// U = exp(arcsin(√R)(a₁†a₂ − a₁a₂†)) on the (N+1)² two-mode space.
pub fn beam_splitter_unitary(spec: BeamSplitterSpec, truncation: usize) -> Array2<Complex64> {
    let phi = spec.angle();
    number_conserving_unitary(
        Complex64::new(phi, 0.0),
        Complex64::new(-phi, 0.0),
        truncation,
    )
}

/// U(δ) = exp(i(δ/2)(a₁†a₂ + a₂†a₁)): the wave-plate unitary. Equivalent to
/// a beam splitter of reflectivity sin²(δ/2) up to single-mode phase
/// rotations, so all photon-number statistics agree between the two.
pub fn pockels_unitary(delta: f64, truncation: usize) -> Array2<Complex64> {
    let half = Complex64::new(0.0, delta / 2.0);
    number_conserving_unitary(half, half, truncation)
}

/// Kraus diagonals of the transmissivity-(1−loss) channel:
/// `coeff[k][n]` multiplies ρ[(m+k, n+k)] contributions, i.e.
/// A_k = Σ_n coeff[k][n+k] |n⟩⟨n+k| with coeff[k][n] = √(C(n,k) t^{n−k} ℓ^k).
fn loss_kraus_diagonals(loss: f64, truncation: usize) -> Vec<Vec<f64>> {
    let t = 1.0 - loss;
    let d = truncation + 1;
    let mut coeff = vec![vec![0.0; d]; d];
    for n in 0..d {
        // running binomial C(n, k)
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            coeff[k][n] = (binom * t.powi((n - k) as i32) * loss.powi(k as i32)).sqrt();
        }
    }
    coeff
}

/// Single-mode photon loss, built exactly as the dilation it models: mix
/// with vacuum on a beam splitter of reflectivity `loss`, trace out the
/// open port.
pub fn apply_loss(rho: &DensityMatrix, loss: f64) -> Result<DensityMatrix> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Domain {
            param: "loss",
            value: loss,
            bounds: "[0, 1]",
        });
    }
    if loss == 0.0 {
        return Ok(rho.clone());
    }
    let trunc = rho.truncation();
    let vacuum =
        DensityMatrix::pure(&crate::fock::fock_state(0, trunc)?).expect("vacuum is well formed");
    let joint = rho.tensor(&vacuum)?;
    let u = beam_splitter_unitary(BeamSplitterSpec::new(loss)?, trunc);
    joint.conjugate_by(&u)?.partial_trace(Mode::One)
}

/// Photon loss on one mode of a two-mode state, via the Kraus form of the
/// same channel (the dilation would need a third mode).
pub fn apply_loss_on_mode(rho: &DensityMatrix, mode: Mode, loss: f64) -> Result<DensityMatrix> {
    if rho.modes() != 2 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "two-mode state required",
        });
    }
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Domain {
            param: "loss",
            value: loss,
            bounds: "[0, 1]",
        });
    }
    if loss == 0.0 {
        return Ok(rho.clone());
    }
    let d = rho.truncation() + 1;
    let coeff = loss_kraus_diagonals(loss, rho.truncation());
    let elements = rho.elements();
    let mut out = Array2::zeros((d * d, d * d));
    for i1 in 0..d {
        for i2 in 0..d {
            for j1 in 0..d {
                for j2 in 0..d {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        let (src_i, src_j, c) = match mode {
                            Mode::Two => {
                                if i2 + k >= d || j2 + k >= d {
                                    break;
                                }
                                (
                                    i1 * d + (i2 + k),
                                    j1 * d + (j2 + k),
                                    coeff[k][i2 + k] * coeff[k][j2 + k],
                                )
                            }
                            Mode::One => {
                                if i1 + k >= d || j1 + k >= d {
                                    break;
                                }
                                (
                                    (i1 + k) * d + i2,
                                    (j1 + k) * d + j2,
                                    coeff[k][i1 + k] * coeff[k][j1 + k],
                                )
                            }
                        };
                        sum += elements[(src_i, src_j)] * c;
                    }
                    out[(i1 * d + i2, j1 * d + j2)] = sum;
                }
            }
        }
    }
    DensityMatrix::from_matrix(out, 2, rho.truncation())
}

/// A quadrature heralding measurement on one mode.
///
/// `window_halfwidth` = 0 means exact projection on X = 0; a positive value
/// accepts outcomes X ∈ [−w, w].
#[derive(Debug, Clone, Copy)]
pub struct HeraldSpec {
    pub mode: Mode,
    pub window_halfwidth: f64,
}

impl HeraldSpec {
    pub fn new(mode: Mode, window_halfwidth: f64) -> Result<Self> {
        if !(window_halfwidth >= 0.0) {
            return Err(Error::Domain {
                param: "window_halfwidth",
                value: window_halfwidth,
                bounds: ">= 0",
            });
        }
        Ok(Self {
            mode,
            window_halfwidth,
        })
    }

    /// Exact X = 0 projection on the measured (second) mode.
    pub fn exact() -> Self {
        Self {
            mode: Mode::Two,
            window_halfwidth: 0.0,
        }
    }
}

/// ⟨x| contraction of the measured mode: returns the unnormalized
/// conditional matrix of the kept mode.
fn contract_measured_mode(
    rho: &DensityMatrix,
    mode: Mode,
    x: f64,
) -> Array2<Complex64> {
    let d = rho.truncation() + 1;
    let psi = fock_wavefunctions(rho.truncation(), x);
    let elements = rho.elements();
    let mut out = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 0..d {
                for n in 0..d {
                    let (row, col) = match mode {
                        Mode::Two => (i * d + m, j * d + n),
                        Mode::One => (m * d + i, n * d + j),
                    };
                    sum += elements[(row, col)] * (psi[m] * psi[n]);
                }
            }
            out[(i, j)] = sum;
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p_prev = 1.0;
            let mut p = x;
            for k in 2..=n {
                let kf = k as f64;
                let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
                p_prev = p;
                p = p_next;
            }
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

const HERALD_QUADRATURE_NODES: usize = 31;

/// Conditions a two-mode state on a quadrature outcome of the measured mode.
///
/// Returns the renormalized conditional state of the kept mode together
/// with the herald weight: for `window_halfwidth` = 0 this is the
/// probability *density* pr(X = 0); for a finite window it is the true
/// acceptance probability ∫_{−w}^{w} pr(x) dx.
pub fn herald_project(rho: &DensityMatrix, spec: HeraldSpec) -> Result<(DensityMatrix, f64)> {
    if rho.modes() != 2 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "two-mode state required",
        });
    }
    let w = spec.window_halfwidth;
    let unnormalized = if w == 0.0 {
        contract_measured_mode(rho, spec.mode, 0.0)
    } else {
        let (nodes, weights) = gauss_legendre(HERALD_QUADRATURE_NODES);
        let d = rho.truncation() + 1;
        let mut acc = Array2::zeros((d, d));
        for (&node, &weight) in nodes.iter().zip(&weights) {
            let x = w * node;
            let term = contract_measured_mode(rho, spec.mode, x);
            acc = acc + term.mapv(|v| v * (weight * w));
        }
        acc
    };
    let weight: f64 = unnormalized.diag().sum().re;
    if weight < 1e-14 {
        return Err(Error::DegenerateHerald { weight });
    }
    let state = DensityMatrix::from_matrix(unnormalized, 1, rho.truncation())?;
    Ok((state, weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{fidelity, DensityMatrix, Mode};
    use crate::fock::{fock_state, FockVector};
    use crate::operators::unitarity_defect;
    use approx::assert_abs_diff_eq;
    use ndarray::Array1;
    use proptest::prelude::*;

    fn pure_fock(n: usize, trunc: usize) -> DensityMatrix {
        DensityMatrix::pure(&fock_state(n, trunc).unwrap()).unwrap()
    }

    /// Two-mode product vector |a⟩⊗|b⟩ as a dense amplitude vector.
    fn product_vector(a: usize, b: usize, trunc: usize) -> Array1<Complex64> {
        let d = trunc + 1;
        let mut v = Array1::zeros(d * d);
        v[a * d + b] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn zero_reflectivity_is_identity() {
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.0).unwrap(), 6);
        for i in 0..49 {
            assert_abs_diff_eq!(u[(i, i)].re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(u[(i, i)].im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn balanced_beam_splitter_cancels_coincidences() {
        // |1,1⟩ in, no |1,1⟩ out at R = 1/2
        let trunc = 6;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.5).unwrap(), trunc);
        let out = u.dot(&product_vector(1, 1, trunc));
        let d = trunc + 1;
        assert_abs_diff_eq!(out[d + 1].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn full_reflectivity_swaps_modes() {
        let trunc = 6;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(1.0).unwrap(), trunc);
        let out = u.dot(&product_vector(1, 0, trunc));
        // |1,0⟩ → |0,1⟩ up to sign
        assert_abs_diff_eq!(out[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_is_unitary_and_number_conserving() {
        let trunc = 8;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.72).unwrap(), trunc);
        assert!(unitarity_defect(&u) < 1e-10);
        let d = trunc + 1;
        for i1 in 0..d {
            for i2 in 0..d {
                for j1 in 0..d {
                    for j2 in 0..d {
                        if i1 + i2 != j1 + j2 {
                            assert_abs_diff_eq!(
                                u[(i1 * d + i2, j1 * d + j2)].norm(),
                                0.0,
                                epsilon = 1e-12
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn retardance_mapping_hits_known_points() {
        assert_abs_diff_eq!(
            retardance_to_reflectivity(std::f64::consts::PI),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(retardance_to_reflectivity(0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(retardance_to_reflectivity(2.03), 0.721, epsilon = 0.001);
    }

    #[test]
    fn pockels_at_zero_is_identity_and_pi_swaps() {
        let trunc = 5;
        let u0 = pockels_unitary(0.0, trunc);
        assert_abs_diff_eq!(u0[(0, 0)].re, 1.0, epsilon = 1e-12);
        let u = pockels_unitary(std::f64::consts::PI, trunc);
        let out = u.dot(&product_vector(1, 0, trunc));
        assert_abs_diff_eq!(out[1].norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out[trunc + 1].norm(), 0.0, epsilon = 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn pockels_and_beam_splitter_share_number_statistics(delta in 0.05f64..3.1) {
            let trunc = 5;
            let d = trunc + 1;
            let u_pc = pockels_unitary(delta, trunc);
            let u_bs = beam_splitter_unitary(
                BeamSplitterSpec::new(retardance_to_reflectivity(delta)).unwrap(),
                trunc,
            );
            let input = {
                // |2,1⟩ exercises multi-photon interference
                let v = product_vector(2, 1, trunc);
                v
            };
            let out_pc = u_pc.dot(&input);
            let out_bs = u_bs.dot(&input);
            for i1 in 0..d {
                for i2 in 0..d {
                    let p_pc = out_pc[i1 * d + i2].norm_sqr();
                    let p_bs = out_bs[i1 * d + i2].norm_sqr();
                    prop_assert!((p_pc - p_bs).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn loss_composition_law_holds(a in 0.0f64..0.9, b in 0.0f64..0.9) {
            let rho = pure_fock(3, 8);
            let sequential = apply_loss(&apply_loss(&rho, a).unwrap(), b).unwrap();
            let combined = apply_loss(&rho, 1.0 - (1.0 - a) * (1.0 - b)).unwrap();
            prop_assert!(fidelity(&sequential, &combined).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn loss_zero_is_identity() {
        let rho = pure_fock(2, 10);
        let out = apply_loss(&rho, 0.0).unwrap();
        assert!(fidelity(&rho, &out).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn single_photon_loss_follows_binomial_law() {
        let rho = pure_fock(1, 10);
        let out = apply_loss(&rho, 0.3).unwrap();
        let pops = out.populations().unwrap();
        assert_abs_diff_eq!(pops[0], 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(pops[1], 0.7, epsilon = 1e-10);
        assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-10);
        assert!(out.purity() <= rho.purity() + 1e-12);
    }

    #[test]
    fn loss_outside_unit_interval_is_rejected() {
        let rho = pure_fock(0, 5);
        assert!(apply_loss(&rho, -0.1).is_err());
        assert!(apply_loss(&rho, 1.1).is_err());
    }

    #[test]
    fn mode_loss_matches_dilation_route() {
        // Apply loss to mode two of a correlated state both ways: Kraus
        // diagonals vs. per-mode dilation after swapping the mode order.
        let trunc = 5;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.4).unwrap(), trunc);
        let joint = pure_fock(1, trunc)
            .tensor(&pure_fock(2, trunc))
            .unwrap()
            .conjugate_by(&u)
            .unwrap();
        let lossy = apply_loss_on_mode(&joint, Mode::Two, 0.24).unwrap();
        // reduced state of mode two must equal the single-mode loss channel
        let reduced_direct = apply_loss(&joint.partial_trace(Mode::Two).unwrap(), 0.24).unwrap();
        let reduced_via_joint = lossy.partial_trace(Mode::Two).unwrap();
        assert!(fidelity(&reduced_direct, &reduced_via_joint).unwrap() > 1.0 - 1e-10);
        // and the kept mode is untouched
        let kept_before = joint.partial_trace(Mode::One).unwrap();
        let kept_after = lossy.partial_trace(Mode::One).unwrap();
        assert!(fidelity(&kept_before, &kept_after).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn herald_reproduces_the_two_photon_interference_superposition() {
        // |1⟩|2⟩ through r² = R, projected on X = 0: ∝ (1−3r²)|1⟩ − √6 r²|3⟩
        let trunc = 12;
        for &r2 in &[0.1, 0.5, 0.72, 0.9] {
            let u = beam_splitter_unitary(BeamSplitterSpec::new(r2).unwrap(), trunc);
            let joint = pure_fock(1, trunc)
                .tensor(&pure_fock(2, trunc))
                .unwrap()
                .conjugate_by(&u)
                .unwrap();
            let (state, _density) = herald_project(&joint, HeraldSpec::exact()).unwrap();

            let mut expected = Array1::zeros(trunc + 1);
            expected[1] = Complex64::new(1.0 - 3.0 * r2, 0.0);
            expected[3] = Complex64::new(-(6.0_f64.sqrt()) * r2, 0.0);
            let target = FockVector::new(expected).unwrap().normalized().unwrap();
            let f = crate::density::fidelity_pure(&target, &state).unwrap();
            assert!(f > 1.0 - 1e-9, "R = {r2}: fidelity {f}");
        }
    }

    #[test]
    fn herald_at_one_third_reflectivity_yields_pure_three() {
        let trunc = 12;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(1.0 / 3.0).unwrap(), trunc);
        let joint = pure_fock(1, trunc)
            .tensor(&pure_fock(2, trunc))
            .unwrap()
            .conjugate_by(&u)
            .unwrap();
        let (state, _) = herald_project(&joint, HeraldSpec::exact()).unwrap();
        let three = fock_state(3, trunc).unwrap();
        assert!(crate::density::fidelity_pure(&three, &state).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn herald_matches_direct_wavefunction_contraction_for_pure_inputs() {
        let trunc = 10;
        let d = trunc + 1;
        let u = beam_splitter_unitary(BeamSplitterSpec::new(0.72).unwrap(), trunc);
        let vec_out = u.dot(&product_vector(1, 2, trunc));
        // direct contraction Σ_m Ψ_m(0)⟨m|₂ on the amplitude vector
        let psi0 = fock_wavefunctions(trunc, 0.0);
        let mut amp = Array1::<Complex64>::zeros(d);
        for i in 0..d {
            for m in 0..d {
                amp[i] += vec_out[i * d + m] * psi0[m];
            }
        }
        let direct = FockVector::new(amp).unwrap().normalized().unwrap();

        let joint = pure_fock(1, trunc)
            .tensor(&pure_fock(2, trunc))
            .unwrap()
            .conjugate_by(&u)
            .unwrap();
        let (state, _) = herald_project(&joint, HeraldSpec::exact()).unwrap();
        assert!(crate::density::fidelity_pure(&direct, &state).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn even_branch_amplitude_ratio_is_sqrt_two() {
        // |1,1⟩ through any R ∈ (0,1), herald X=0 → c₀|0⟩ + c₂|2⟩ with |c₂/c₀| = √2
        let trunc = 8;
        for &r2 in &[0.2, 0.5, 0.72] {
            let u = beam_splitter_unitary(BeamSplitterSpec::new(r2).unwrap(), trunc);
            let joint = pure_fock(1, trunc)
                .tensor(&pure_fock(1, trunc))
                .unwrap()
                .conjugate_by(&u)
                .unwrap();
            let (state, _) = herald_project(&joint, HeraldSpec::exact()).unwrap();
            let pops = state.populations().unwrap();
            for (n, &p) in pops.iter().enumerate() {
                if n != 0 && n != 2 {
                    assert_abs_diff_eq!(p, 0.0, epsilon = 1e-10);
                }
            }
            let ratio = (pops[2] / pops[0]).sqrt();
            assert_abs_diff_eq!(ratio, std::f64::consts::SQRT_2, epsilon = 1e-9);
        }
    }

    #[test]
    fn vacuum_product_heralds_to_vacuum_with_gaussian_acceptance() {
        let trunc = 8;
        let joint = pure_fock(0, trunc).tensor(&pure_fock(0, trunc)).unwrap();
        let w = 0.2;
        let (state, acceptance) =
            herald_project(&joint, HeraldSpec::new(Mode::Two, w).unwrap()).unwrap();
        let vac = fock_state(0, trunc).unwrap();
        assert!(crate::density::fidelity_pure(&vac, &state).unwrap() > 1.0 - 1e-12);
        // ∫_{−w}^{w} e^{−x²}/√π dx = erf(w); compare against a fine Riemann sum
        let dx = 1e-5;
        let steps = (w / dx) as usize;
        let gaussian: f64 = (0..2 * steps)
            .map(|i| {
                let x = -w + (i as f64 + 0.5) * dx;
                (-x * x).exp() / std::f64::consts::PI.sqrt() * dx
            })
            .sum();
        assert_abs_diff_eq!(acceptance, gaussian, epsilon = 1e-6);
    }

    #[test]
    fn annihilating_herald_is_reported() {
        // |1⟩⟨1| ⊗ |1⟩⟨1| untouched: Ψ₁(0) = 0, so the X = 0 projection kills it
        let joint = pure_fock(1, 6).tensor(&pure_fock(1, 6)).unwrap();
        assert!(matches!(
            herald_project(&joint, HeraldSpec::exact()),
            Err(Error::DegenerateHerald { .. })
        ));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(5);
        // degree ≤ 9 is exact; ∫_{-1}^{1} x^8 dx = 2/9
        let integral: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(8))
            .sum();
        assert_abs_diff_eq!(integral, 2.0 / 9.0, epsilon = 1e-12);
        let total: f64 = weights.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
    }
}
