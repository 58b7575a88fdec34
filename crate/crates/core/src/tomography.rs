//! Homodyne data synthesis and iterative maximum-likelihood state
//! reconstruction, with loss-aware measurement operators, Wigner
//! negativity counting, and parametric-bootstrap uncertainties.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::density::{fidelity_pure, DensityMatrix};
use crate::error::{Error, Result};
use crate::fock::{cat_state_raw, fock_wavefunctions, ScssParams};
use crate::operators::{adjoint, eigh_hermitian};
use crate::wigner::WignerGrid;

/// One homodyne outcome. Phases are folded into [0, π): X_{θ+π} = −X_θ,
/// so records at θ ∈ [π, 2π) are stored with the sign of x flipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRecord {
    x: f64,
    theta: f64,
}

impl QuadratureRecord {
    pub fn new(x: f64, theta: f64) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut t = theta.rem_euclid(two_pi);
        let mut x = x;
        if t >= std::f64::consts::PI {
            t -= std::f64::consts::PI;
            x = -x;
        }
        Self { x, theta: t }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// CSV with header "x,theta".
pub fn records_to_csv(records: &[QuadratureRecord]) -> String {
    let mut out = String::from("x,theta\n");
    for r in records {
        out.push_str(&format!("{},{}\n", r.x, r.theta));
    }
    out
}

/// Parses "x,theta" CSV; errors carry the 1-based line number.
pub fn records_from_csv(text: &str) -> Result<Vec<QuadratureRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    if headers.len() < 2 || headers.get(0) != Some("x") || headers.get(1) != Some("theta") {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header \"x,theta\", got \"{}\"", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        let parse = |field: usize, name: &str| -> Result<f64> {
            row.get(field)
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("missing {name}"),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("{name}: {e}"),
                })
        };
        records.push(QuadratureRecord::new(parse(0, "x")?, parse(1, "theta")?));
    }
    Ok(records)
}

/// Phase schedule for synthetic data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMode {
    /// θ drawn uniformly over [0, π) per sample.
    Uniform,
    /// All samples at the given phase.
    Fixed(f64),
}

const SAMPLE_GRID_HALF: f64 = 7.0;
const SAMPLE_GRID_STEP: f64 = 0.02;

/// Per-state sampling tables: the pdf in diagonal-offset form,
/// pr(x|θ) = c₀(x) + 2·Re Σ_{d≥1} c_d(x) e^{idθ}.
struct QuadratureSampler {
    xs: Vec<f64>,
    /// `coeffs[d][g]` = Σ_m ρ_{m,m+d} Ψ_m(x_g) Ψ_{m+d}(x_g)
    coeffs: Vec<Vec<Complex64>>,
}

impl QuadratureSampler {
    fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let n_grid = (2.0 * SAMPLE_GRID_HALF / SAMPLE_GRID_STEP).round() as usize + 1;
        let xs: Vec<f64> = (0..n_grid)
            .map(|i| -SAMPLE_GRID_HALF + i as f64 * SAMPLE_GRID_STEP)
            .collect();
        let elements = rho.elements();
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); n_grid]; dim];
        for (g, &x) in xs.iter().enumerate() {
            let psi = fock_wavefunctions(dim - 1, x);
            for d in 0..dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for m in 0..(dim - d) {
                    sum += elements[(m, m + d)] * (psi[m] * psi[m + d]);
                }
                coeffs[d][g] = sum;
            }
        }
        Self { xs, coeffs }
    }

    /// Inverse-CDF draw of x at phase θ.
    fn draw_x<R: Rng>(&self, theta: f64, rng: &mut R) -> f64 {
        let dim = self.coeffs.len();
        let twiddle: Vec<Complex64> = (0..dim)
            .map(|d| Complex64::from_polar(1.0, d as f64 * theta))
            .collect();
        let mut pdf = vec![0.0; self.xs.len()];
        for (g, value) in pdf.iter_mut().enumerate() {
            let mut acc = self.coeffs[0][g].re;
            for d in 1..dim {
                let t = self.coeffs[d][g] * twiddle[d];
                acc += 2.0 * t.re;
            }
            *value = acc.max(0.0);
        }
        let total: f64 = pdf.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        for (g, &p) in pdf.iter().enumerate() {
            if acc + p >= target {
                let frac = if p > 0.0 { (target - acc) / p } else { 0.5 };
                return self.xs[g] - 0.5 * SAMPLE_GRID_STEP + frac * SAMPLE_GRID_STEP;
            }
            acc += p;
        }
        *self.xs.last().expect("grid is nonempty")
    }
}

/// Draws i.i.d. quadrature records from a single-mode state,
/// deterministically for a fixed seed.
pub fn sample_quadratures(
    rho: &DensityMatrix,
    n: usize,
    seed: u64,
    phase_mode: PhaseMode,
) -> Result<Vec<QuadratureRecord>> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    let sampler = QuadratureSampler::new(rho);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let theta = match phase_mode {
            PhaseMode::Uniform => rng.gen::<f64>() * std::f64::consts::PI,
            PhaseMode::Fixed(t) => t,
        };
        let record = QuadratureRecord::new(sampler.draw_x(theta, &mut rng), theta);
        records.push(record);
    }
    Ok(records)
}

/// A reconstruction task: the dataset, the basis size, and the composite
/// transmission (detector efficiency × storage transmission) folded into
/// the measurement operators.
#[derive(Debug, Clone)]
pub struct TomographyJob {
    pub records: Vec<QuadratureRecord>,
    pub truncation: usize,
    pub efficiency_correction: f64,
    pub max_iterations: usize,
    pub convergence_tol: f64,
}

impl TomographyJob {
    pub fn new(records: Vec<QuadratureRecord>, truncation: usize) -> Self {
        Self {
            records,
            truncation,
            efficiency_correction: 1.0,
            max_iterations: 2000,
            convergence_tol: 1e-9,
        }
    }

    pub fn with_efficiency(mut self, efficiency_correction: f64) -> Self {
        self.efficiency_correction = efficiency_correction;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::Config("no quadrature records".into()));
        }
        if !(self.efficiency_correction > 0.5 && self.efficiency_correction <= 1.0) {
            return Err(Error::Domain {
                param: "efficiency_correction",
                value: self.efficiency_correction,
                bounds: "(0.5, 1] (inversion is ill-conditioned below 0.5)",
            });
        }
        Ok(())
    }
}

/// Result of a maximum-likelihood run. A non-converged run still carries
/// the last iterate, flagged through `converged`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    /// Summed log-likelihood after every accepted iteration; nondecreasing.
    pub log_likelihood_trace: Vec<f64>,
}

const MAXLIK_X_HALF_RANGE: f64 = 6.0;
const MAXLIK_BIN_WIDTH: f64 = 0.1;

/// Heisenberg-picture loss map Λ†(M) = Σ_k A_k† M A_k for transmission t.
fn fold_loss_adjoint(m: &Array2<f64>, transmission: f64, dim: usize) -> Array2<Complex64> {
    let loss = 1.0 - transmission;
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    if loss == 0.0 {
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = Complex64::new(m[(i, j)], 0.0);
            }
        }
        return out;
    }
    // A_k = Σ_n c[k][n] |n−k⟩⟨n| ⇒ (A_k† M A_k)_{mn} = c[k][m] c[k][n] M_{m−k, n−k}
    let t = transmission;
    let mut c = vec![vec![0.0; dim]; dim];
    for n in 0..dim {
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            c[k][n] = (binom * t.powi((n - k) as i32) * loss.powi(k as i32)).sqrt();
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let mut sum = 0.0;
            for k in 0..=i.min(j) {
                sum += c[k][i] * c[k][j] * m[(i - k, j - k)];
            }
            out[(i, j)] = Complex64::new(sum, 0.0);
        }
    }
    out
}

/// Precomputed per-job measurement data: x-binned POVM kernels at θ = 0
/// (phases enter as e^{iθ(m−n)} twiddles) and per-record twiddle tables.
struct MaxlikTables {
    /// kernel[b] : (dim × dim), Λ†(|x_b⟩⟨x_b|)·Δx
    kernels: Vec<Array2<Complex64>>,
    /// record → x-bin index
    bins: Vec<usize>,
    /// twiddles[r][d] = e^{i·d·θ_r}, d = 0..dim
    twiddles: Vec<Vec<Complex64>>,
}

impl MaxlikTables {
    fn build(job: &TomographyJob) -> Self {
        let dim = job.truncation + 1;
        let n_bins = (2.0 * MAXLIK_X_HALF_RANGE / MAXLIK_BIN_WIDTH).round() as usize;
        let mut kernels = Vec::with_capacity(n_bins);
        for b in 0..n_bins {
            let x = -MAXLIK_X_HALF_RANGE + (b as f64 + 0.5) * MAXLIK_BIN_WIDTH;
            let psi = fock_wavefunctions(job.truncation, x);
            let projector = Array2::from_shape_fn((dim, dim), |(m, n)| {
                psi[m] * psi[n] * MAXLIK_BIN_WIDTH
            });
            kernels.push(fold_loss_adjoint(
                &projector,
                job.efficiency_correction,
                dim,
            ));
        }
        let bins = job
            .records
            .iter()
            .map(|r| {
                let idx = ((r.x + MAXLIK_X_HALF_RANGE) / MAXLIK_BIN_WIDTH).floor();
                (idx.max(0.0) as usize).min(n_bins - 1)
            })
            .collect();
        let twiddles = job
            .records
            .iter()
            .map(|r| {
                (0..=job.truncation)
                    .map(|d| Complex64::from_polar(1.0, d as f64 * r.theta))
                    .collect()
            })
            .collect();
        Self {
            kernels,
            bins,
            twiddles,
        }
    }

    /// Per-record probabilities tr(ρ Π_r) and the summed log-likelihood.
    fn probabilities(&self, rho: &Array2<Complex64>, dim: usize) -> (Vec<f64>, f64) {
        // per bin: diagonal contractions A_b(d) = Σ_{m−n=d} ρ_{nm} kernel_{mn}
        let n_bins = self.kernels.len();
        let mut diag = vec![vec![Complex64::new(0.0, 0.0); dim]; n_bins];
        let mut occupied = vec![false; n_bins];
        for &b in &self.bins {
            occupied[b] = true;
        }
        for b in 0..n_bins {
            if !occupied[b] {
                continue;
            }
            let kernel = &self.kernels[b];
            for d in 0..dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for n in 0..(dim - d) {
                    sum += rho[(n, n + d)] * kernel[(n + d, n)];
                }
                diag[b][d] = sum;
            }
        }
        let mut log_likelihood = 0.0;
        let probabilities: Vec<f64> = self
            .bins
            .iter()
            .zip(&self.twiddles)
            .map(|(&b, twiddle)| {
                let row = &diag[b];
                let mut p = row[0].re;
                for d in 1..dim {
                    p += 2.0 * (row[d] * twiddle[d]).re;
                }
                let p = p.max(1e-300);
                log_likelihood += p.ln();
                p
            })
            .collect();
        (probabilities, log_likelihood)
    }

    /// R = Σ_r Π_r / (n p_r).
    fn response(&self, probabilities: &[f64], dim: usize) -> Array2<Complex64> {
        let n_bins = self.kernels.len();
        let n = probabilities.len() as f64;
        // S_b(d) = Σ_{r ∈ b} w_r e^{idθ_r}
        let mut phase_sums = vec![vec![Complex64::new(0.0, 0.0); dim]; n_bins];
        for ((&b, twiddle), &p) in self.bins.iter().zip(&self.twiddles).zip(probabilities) {
            let w = 1.0 / (n * p);
            for d in 0..dim {
                phase_sums[b][d] += twiddle[d] * w;
            }
        }
        let mut r = Array2::<Complex64>::zeros((dim, dim));
        for b in 0..n_bins {
            let kernel = &self.kernels[b];
            let sums = &phase_sums[b];
            for m in 0..dim {
                for n_idx in 0..dim {
                    // e^{iθ(m−n)}: positive offsets use the table, negative the conjugate
                    let s = if m >= n_idx {
                        sums[m - n_idx]
                    } else {
                        sums[n_idx - m].conj()
                    };
                    r[(m, n_idx)] += kernel[(m, n_idx)] * s;
                }
            }
        }
        r
    }
}

/// Iterative maximum-likelihood reconstruction (the R·ρ·R fixed point),
/// with the detection inefficiency folded into the measurement operators.
/// The log-likelihood is nondecreasing across iterations; a step that
/// would decrease it is replaced by damped steps until it improves.
pub fn maxlik_reconstruct(job: &TomographyJob) -> Result<Reconstruction> {
    job.validate()?;
    let dim = job.truncation + 1;
    let tables = MaxlikTables::build(job);

    let mut rho = Array2::<Complex64>::eye(dim).mapv(|v| v / dim as f64);
    let (_, mut log_likelihood) = tables.probabilities(&rho, dim);
    let mut converged = false;
    let mut iterations = 0;
    let mut log_likelihood_trace = vec![log_likelihood];

    for iter in 0..job.max_iterations {
        iterations = iter + 1;
        let (probabilities, _) = tables.probabilities(&rho, dim);
        let r = tables.response(&probabilities, dim);

        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..24 {
            let step = if damping == 1.0 {
                r.clone()
            } else {
                // (1−s)·I + s·R keeps the update a positive map for s ∈ (0,1]
                let mut damped = r.mapv(|v| v * damping);
                for i in 0..dim {
                    damped[(i, i)] += 1.0 - damping;
                }
                damped
            };
            let candidate = step.dot(&rho).dot(&adjoint(&step));
            let trace: Complex64 = candidate.diag().sum();
            let candidate = candidate.mapv(|v| v / trace.re);
            let (_, candidate_ll) = tables.probabilities(&candidate, dim);
            if candidate_ll >= log_likelihood - 1e-12 {
                let gain = candidate_ll - log_likelihood;
                rho = candidate;
                log_likelihood = candidate_ll;
                log_likelihood_trace.push(log_likelihood);
                accepted = true;
                if gain.abs() < job.convergence_tol * log_likelihood.abs().max(1.0) {
                    converged = true;
                }
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            converged = true; // no productive step remains
        }
        if converged {
            break;
        }
    }

    let rho = DensityMatrix::from_matrix(rho, 1, job.truncation)?;
    Ok(Reconstruction {
        rho,
        iterations,
        converged,
        log_likelihood,
        log_likelihood_trace,
    })
}

/// Direct inversion of the Bernoulli loss map at the given transmission,
/// clipped back onto the PSD cone. The POVM-folded reconstruction is the
/// statistically sound route; this map amplifies truncation noise and is
/// provided for cross-checks on already-reconstructed states.
pub fn loss_correct(rho: &DensityMatrix, transmission: f64) -> Result<DensityMatrix> {
    if !(transmission > 0.5 && transmission <= 1.0) {
        return Err(Error::Domain {
            param: "transmission",
            value: transmission,
            bounds: "(0.5, 1]",
        });
    }
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    if transmission == 1.0 {
        return Ok(rho.clone());
    }
    let dim = rho.dim();
    let t = transmission;
    let loss = 1.0 - t;
    // forward map: ρ'_{mn} = Σ_k √(C(m+k,k)C(n+k,k)) t^{(m+n)/2} ℓ^k ρ_{m+k,n+k};
    // solve for ρ from the top-right corner downward.
    let mut binom = vec![vec![0.0f64; dim]; dim];
    for n in 0..dim {
        binom[n][0] = 1.0;
        for k in 1..=n {
            binom[n][k] = binom[n][k - 1] * (n - k + 1) as f64 / k as f64;
        }
    }
    let src = rho.elements();
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for m in (0..dim).rev() {
        for n in (0..dim).rev() {
            let mut value = src[(m, n)];
            let k_max = dim - 1 - m.max(n);
            for k in 1..=k_max {
                let c = (binom[m + k][k] * binom[n + k][k]).sqrt()
                    * t.powf((m + n) as f64 / 2.0)
                    * loss.powi(k as i32);
                value -= out[(m + k, n + k)] * c;
            }
            out[(m, n)] = value / t.powf((m + n) as f64 / 2.0);
        }
    }
    // clip to the PSD cone and renormalize
    let symmetrized = (&out + &adjoint(&out)).mapv(|v| v * 0.5);
    let (vals, vecs) = eigh_hermitian(&symmetrized);
    let floored = vals.mapv(|l| Complex64::new(l.max(0.0), 0.0));
    let scaled = &vecs * &floored.view().insert_axis(ndarray::Axis(0));
    let clipped = scaled.dot(&adjoint(&vecs));
    DensityMatrix::from_matrix(clipped, 1, rho.truncation())
}

/// Percentile interval of a bootstrap fidelity distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapReport {
    pub point_estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub n_repetitions: usize,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Parametric bootstrap of the fidelity to a target superposition:
/// repeatedly resamples synthetic datasets from `rho_hat`, reconstructs,
/// and reports the 16th/84th percentile band (clipped to contain the
/// point estimate). Repetitions run in parallel with per-repetition
/// derived seeds.
pub fn parametric_bootstrap(
    rho_hat: &DensityMatrix,
    n_samples: usize,
    n_rep: usize,
    target: &ScssParams,
    seed: u64,
) -> Result<BootstrapReport> {
    if n_rep < 2 {
        return Err(Error::Domain {
            param: "n_rep",
            value: n_rep as f64,
            bounds: ">= 2",
        });
    }
    let target_state = cat_state_raw(target, rho_hat.truncation())?;
    let point_estimate = fidelity_pure(&target_state, rho_hat)?;
    let fidelities: Vec<f64> = (0..n_rep)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(rep as u64 + 1));
            let records =
                sample_quadratures(rho_hat, n_samples, rep_seed, PhaseMode::Uniform)?;
            let job = TomographyJob::new(records, rho_hat.truncation());
            let reconstruction = maxlik_reconstruct(&job)?;
            fidelity_pure(&target_state, &reconstruction.rho)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = fidelities;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lower = percentile(&sorted, 0.16).min(point_estimate);
    let upper = percentile(&sorted, 0.84).max(point_estimate);
    Ok(BootstrapReport {
        point_estimate,
        lower,
        upper,
        n_repetitions: n_rep,
    })
}

/// Counts 4-connected regions of cells with W < −eps.
pub fn count_negative_regions(grid: &WignerGrid, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::Domain {
            param: "eps",
            value: eps,
            bounds: "> 0",
        });
    }
    let (nx, np) = grid.values.dim();
    let mut visited = vec![false; nx * np];
    let mut regions = 0;
    let mut stack = Vec::new();
    for start in 0..nx * np {
        let (i, j) = (start / np, start % np);
        if visited[start] || grid.values[(i, j)] >= -eps {
            continue;
        }
        regions += 1;
        stack.push(start);
        visited[start] = true;
        while let Some(cell) = stack.pop() {
            let (ci, cj) = (cell / np, cell % np);
            let mut push = |ni: usize, nj: usize| {
                let idx = ni * np + nj;
                if !visited[idx] && grid.values[(ni, nj)] < -eps {
                    visited[idx] = true;
                    stack.push(idx);
                }
            };
            if ci > 0 {
                push(ci - 1, cj);
            }
            if ci + 1 < nx {
                push(ci + 1, cj);
            }
            if cj > 0 {
                push(ci, cj - 1);
            }
            if cj + 1 < np {
                push(ci, cj + 1);
            }
        }
    }
    Ok(regions)
}

/// Adjustments applied while coercing published matrix data into a valid
/// state.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub rho: DensityMatrix,
    /// trace of the raw input before renormalization
    pub raw_trace: f64,
    /// largest |ΔM| introduced by symmetrization
    pub symmetrization_defect: f64,
    /// most negative raw eigenvalue floored to zero (0 if none)
    pub eigenvalue_floor_adjustment: f64,
}

/// Ingests a density matrix from the JSON wire format, symmetrizing,
/// flooring negative eigenvalues, and renormalizing. Rounded published
/// data routinely needs all three.
pub fn ingest_density_matrix(text: &str) -> Result<IngestReport> {
    let raw: crate::density::DensityMatrixJson = serde_json::from_str(text)?;
    if raw.modes != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: raw.modes as f64,
            bounds: "single-mode matrices only",
        });
    }
    let dim = raw.truncation + 1;
    if raw.re.len() != dim || raw.re.iter().any(|row| row.len() != dim) {
        return Err(Error::NotSquare {
            rows: raw.re.len(),
            cols: raw.re.first().map(|r| r.len()).unwrap_or(0),
        });
    }
    if raw.im.len() != dim || raw.im.iter().any(|row| row.len() != dim) {
        return Err(Error::NotSquare {
            rows: raw.im.len(),
            cols: raw.im.first().map(|r| r.len()).unwrap_or(0),
        });
    }
    let mut m = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = Complex64::new(raw.re[i][j], raw.im[i][j]);
        }
    }
    let raw_trace = m.diag().sum().re;
    let symmetrized = (&m + &adjoint(&m)).mapv(|v| v * 0.5);
    let symmetrization_defect = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| (symmetrized[(i, j)] - m[(i, j)]).norm())
        .fold(0.0, f64::max);
    let (vals, vecs) = eigh_hermitian(&symmetrized);
    let eigenvalue_floor_adjustment = vals.iter().cloned().fold(0.0f64, |acc, l| acc.max(-l));
    let floored: Array1<Complex64> = vals.mapv(|l| Complex64::new(l.max(0.0), 0.0));
    let scaled = &vecs * &floored.view().insert_axis(ndarray::Axis(0));
    let clipped = scaled.dot(&adjoint(&vecs));
    let rho = DensityMatrix::from_matrix(clipped, 1, raw.truncation)?;
    Ok(IngestReport {
        rho,
        raw_trace,
        symmetrization_defect,
        eigenvalue_floor_adjustment,
    })
}
