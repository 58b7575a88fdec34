//! The end-to-end generation model: heralded resource states, storage and
//! propagation losses, the tunable interaction, quadrature heralding, and
//! the closest-squeezed-cat analysis on top.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_loss, apply_loss_on_mode, beam_splitter_unitary, herald_project, BeamSplitterSpec,
    HeraldSpec,
};
use crate::density::{DensityMatrix, Mode};
use crate::error::{Error, Result};
use crate::fock::{cat_state_raw, FockVector, Parity, ScssParams};
use crate::optim::nelder_mead_max_2d;
use crate::operators::squeeze_operator;

/// Physical parameters of the generation chain.
///
/// `eta` is the overall heralding-channel efficiency, the product of the
/// filtering stage (`eta_f`) and the detectors (`eta_apd`). `eta_prop`
/// covers all optical losses before the memory cavity, `eta_qmc` the loss
/// per cavity round trip, and `r_hd` the loss equivalent of the homodyne
/// detector inefficiency (1 − detector efficiency).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub eta: f64,
    pub eta_f: f64,
    pub eta_apd: f64,
    /// Hz
    pub single_click_rate: f64,
    /// Hz
    pub double_click_rate: f64,
    /// Hz
    pub f_pump: f64,
    pub eta_prop: f64,
    pub eta_qmc: f64,
    pub n_stor_min: u32,
    pub n_stor_max: u32,
    pub r_hd: f64,
    pub truncation: usize,
    pub herald_halfwidth: f64,
    pub tmsv_phase: f64,
}

impl ExperimentConfig {
    /// The nominal operating point: η = 0.15 split as 0.6 × 0.25,
    /// 400 kHz single and 1 kHz double click rates at a 76 MHz pump,
    /// 6% propagation loss, 1% per round trip over 9–18 stored round
    /// trips, 76% homodyne efficiency, basis size 20, ±0.2 heralding
    /// window.
    pub fn paper() -> Self {
        Self {
            eta: 0.15,
            eta_f: 0.6,
            eta_apd: 0.25,
            single_click_rate: 400e3,
            double_click_rate: 1e3,
            f_pump: 76e6,
            eta_prop: 0.06,
            eta_qmc: 0.01,
            n_stor_min: 9,
            n_stor_max: 18,
            r_hd: 0.24,
            truncation: 20,
            herald_halfwidth: 0.2,
            tmsv_phase: 0.0,
        }
    }

    /// All channels lossless, vanishing pair-generation rate: the
    /// configuration whose pipeline output reduces to the ideal
    /// interference superposition.
    pub fn ideal() -> Self {
        Self {
            single_click_rate: 0.0,
            eta_prop: 0.0,
            eta_qmc: 0.0,
            r_hd: 0.0,
            ..Self::paper()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, v: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain {
                    param: name,
                    value: v,
                    bounds: "[0, 1]",
                });
            }
            Ok(())
        };
        unit("eta", self.eta)?;
        unit("eta_f", self.eta_f)?;
        unit("eta_apd", self.eta_apd)?;
        unit("eta_prop", self.eta_prop)?;
        unit("eta_qmc", self.eta_qmc)?;
        unit("r_hd", self.r_hd)?;
        if (self.eta - self.eta_f * self.eta_apd).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "eta = {} must equal eta_f * eta_apd = {}",
                self.eta,
                self.eta_f * self.eta_apd
            )));
        }
        if self.n_stor_min > self.n_stor_max {
            return Err(Error::Config(format!(
                "n_stor_min {} > n_stor_max {}",
                self.n_stor_min, self.n_stor_max
            )));
        }
        if self.herald_halfwidth < 0.0 {
            return Err(Error::Domain {
                param: "herald_halfwidth",
                value: self.herald_halfwidth,
                bounds: ">= 0",
            });
        }
        if self.truncation < 1 {
            return Err(Error::Domain {
                param: "truncation",
                value: self.truncation as f64,
                bounds: ">= 1",
            });
        }
        Ok(())
    }

    /// Loads a TOML file of named profiles: `[profile.<name>]` tables with
    /// the config fields. Missing fields fall back to the paper preset.
    pub fn from_toml_profile(text: &str, profile: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            profile: std::collections::BTreeMap<String, toml::Value>,
        }
        let parsed: File =
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse: {e}")))?;
        let table = parsed
            .profile
            .get(profile)
            .ok_or_else(|| Error::Config(format!("no profile named '{profile}'")))?;
        let mut base = toml::Value::try_from(Self::paper())
            .map_err(|e| Error::Config(format!("preset serialization: {e}")))?;
        if let (toml::Value::Table(base_table), toml::Value::Table(overrides)) =
            (&mut base, table)
        {
            for (k, v) in overrides {
                if !base_table.contains_key(k) {
                    return Err(Error::Config(format!("unknown config key '{k}'")));
                }
                base_table.insert(k.clone(), v.clone());
            }
        }
        let config: Self = base
            .try_into()
            .map_err(|e| Error::Config(format!("config field: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

/// r² of the pair source, inferred from the single-click rate:
/// click rate / (η · f_pump).
pub fn estimate_r_squared(config: &ExperimentConfig) -> Result<f64> {
    if config.eta <= 0.0 || config.f_pump <= 0.0 {
        return Err(Error::Domain {
            param: "eta * f_pump",
            value: config.eta * config.f_pump,
            bounds: "> 0",
        });
    }
    Ok(config.single_click_rate / (config.eta * config.f_pump))
}

/// State heralded by a single APD click:
/// ∝ |1⟩⟨1| + r²(2−η)|2⟩⟨2|.
pub fn heralded_single(r2: f64, eta: f64, truncation: usize) -> Result<DensityMatrix> {
    let contamination = r2 * (2.0 - eta);
    if !(0.0..1.0).contains(&contamination) {
        return Err(Error::Domain {
            param: "r2*(2-eta)",
            value: contamination,
            bounds: "[0, 1)",
        });
    }
    let mut m = Array2::zeros((truncation + 1, truncation + 1));
    m[(1, 1)] = Complex64::new(1.0, 0.0);
    m[(2, 2)] = Complex64::new(contamination, 0.0);
    DensityMatrix::from_matrix(m, 1, truncation)
}

/// Probability that both detectors click given a two-photon component:
/// η²/2.
pub fn p_double_given_two(eta: f64) -> f64 {
    eta * eta / 2.0
}

/// Probability that both detectors click given a three-photon component:
/// (3/2)η²(1 − η/2). Equivalently, summing the two detection scenarios,
/// (3/4)η_f³η_APD(1−(1−η_APD)²) + (3/2)η_f²(1−η_f)η_APD².
pub fn p_double_given_three(eta: f64) -> f64 {
    1.5 * eta * eta * (1.0 - eta / 2.0)
}

/// Same probability decomposed over the filtering and detection stages;
/// algebraically identical to `p_double_given_three(eta_f * eta_apd)`.
pub fn p_double_given_three_by_scenario(eta_f: f64, eta_apd: f64) -> f64 {
    0.75 * eta_f.powi(3) * eta_apd * (1.0 - (1.0 - eta_apd).powi(2))
        + 1.5 * eta_f.powi(2) * (1.0 - eta_f) * eta_apd.powi(2)
}

/// State heralded by a coincidence of both APDs:
/// ∝ p₂r⁴|2⟩⟨2| + p₃r⁶|3⟩⟨3|.
pub fn heralded_double(r2: f64, eta: f64, truncation: usize) -> Result<DensityMatrix> {
    if !(0.0..1.0).contains(&(r2 * (2.0 - eta))) {
        return Err(Error::Domain {
            param: "r2*(2-eta)",
            value: r2 * (2.0 - eta),
            bounds: "[0, 1)",
        });
    }
    let w2 = p_double_given_two(eta) * r2 * r2;
    let w3 = p_double_given_three(eta) * r2 * r2 * r2;
    let mut m = Array2::zeros((truncation + 1, truncation + 1));
    // r2 = 0 leaves the bare |2⟩⟨2|; normalization handles the common r⁴
    if w2 == 0.0 && w3 == 0.0 {
        m[(2, 2)] = Complex64::new(1.0, 0.0);
    } else {
        m[(2, 2)] = Complex64::new(w2, 0.0);
        m[(3, 3)] = Complex64::new(w3, 0.0);
    }
    DensityMatrix::from_matrix(m, 1, truncation)
}

/// Composite loss seen by a state stored for `n_stor` round trips:
/// 1 − (1−η_prop)(1−η_qmc)^n_stor.
pub fn storage_loss(n_stor: u32, config: &ExperimentConfig) -> f64 {
    1.0 - (1.0 - config.eta_prop) * (1.0 - config.eta_qmc).powi(n_stor as i32)
}

fn pipeline(
    config: &ExperimentConfig,
    input_one: &DensityMatrix,
    input_two: &DensityMatrix,
    r_interaction: f64,
    herald: HeraldSpec,
) -> Result<(DensityMatrix, f64)> {
    let joint = input_one.tensor(input_two)?;
    let u = beam_splitter_unitary(BeamSplitterSpec::new(r_interaction)?, config.truncation);
    let mixed = joint.conjugate_by(&u)?;
    let degraded = if config.r_hd > 0.0 {
        apply_loss_on_mode(&mixed, Mode::Two, config.r_hd)?
    } else {
        mixed
    };
    herald_project(&degraded, herald)
}

/// One realization of the odd-branch experiment: the stored single-photon
/// state against a coincidence-heralded state, mixed at reflectivity R and
/// heralded by an exact X = 0 measurement on the output port.
///
/// Returns the renormalized state of the kept mode and the herald weight,
/// a probability *density* for the exact projection.
pub fn simulate_scss(
    config: &ExperimentConfig,
    r_interaction: f64,
    n_stor: u32,
) -> Result<(DensityMatrix, f64)> {
    let (stored, fresh) = branch_inputs(config, n_stor, false)?;
    pipeline(config, &stored, &fresh, r_interaction, HeraldSpec::exact())
}

/// Same chain with a finite heralding window X ∈ [−w, w]; the weight is
/// then a true acceptance probability.
pub fn simulate_scss_windowed(
    config: &ExperimentConfig,
    r_interaction: f64,
    n_stor: u32,
    window_halfwidth: f64,
) -> Result<(DensityMatrix, f64)> {
    if window_halfwidth == 0.0 {
        // measure-zero window: no acceptances
        let (state, _) = simulate_scss(config, r_interaction, n_stor)?;
        return Ok((state, 0.0));
    }
    let (stored, fresh) = branch_inputs(config, n_stor, false)?;
    pipeline(
        config,
        &stored,
        &fresh,
        r_interaction,
        HeraldSpec::new(Mode::Two, window_halfwidth)?,
    )
}

/// The even branch: both inputs are single-click heralded states.
pub fn simulate_even(
    config: &ExperimentConfig,
    r_interaction: f64,
    n_stor: u32,
) -> Result<DensityMatrix> {
    let (stored, fresh) = branch_inputs(config, n_stor, true)?;
    let (state, _) = pipeline(config, &stored, &fresh, r_interaction, HeraldSpec::exact())?;
    Ok(state)
}

fn branch_inputs(
    config: &ExperimentConfig,
    n_stor: u32,
    second_is_single: bool,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let r2 = estimate_r_squared(config)?;
    let stored = apply_loss(
        &heralded_single(r2, config.eta, config.truncation)?,
        storage_loss(n_stor, config),
    )?;
    let second_loss = storage_loss(1, config);
    let fresh_raw = if second_is_single {
        heralded_single(r2, config.eta, config.truncation)?
    } else {
        heralded_double(r2, config.eta, config.truncation)?
    };
    Ok((stored, apply_loss(&fresh_raw, second_loss)?))
}

fn average_states(states: Vec<DensityMatrix>) -> Result<DensityMatrix> {
    let first = &states[0];
    let mut sum = Array2::zeros((first.dim(), first.dim()));
    for s in &states {
        sum = sum + s.elements();
    }
    DensityMatrix::from_matrix(sum, first.modes(), first.truncation())
}

/// Mean of the heralded states over the configured storage range, as the
/// uniform round-trip distribution of the stored photon dictates.
pub fn average_over_storage(config: &ExperimentConfig, r_interaction: f64) -> Result<DensityMatrix> {
    let states = (config.n_stor_min..=config.n_stor_max)
        .into_par_iter()
        .map(|n| simulate_scss(config, r_interaction, n).map(|(s, _)| s))
        .collect::<Result<Vec<_>>>()?;
    average_states(states)
}

/// Storage-averaged even branch.
pub fn average_over_storage_even(
    config: &ExperimentConfig,
    r_interaction: f64,
) -> Result<DensityMatrix> {
    let states = (config.n_stor_min..=config.n_stor_max)
        .into_par_iter()
        .map(|n| simulate_even(config, r_interaction, n))
        .collect::<Result<Vec<_>>>()?;
    average_states(states)
}

/// The ideal interference output: normalized (1−3r²)|1⟩ − √6 r²|3⟩.
pub fn ideal_heralded_state(r2: f64, truncation: usize) -> Result<FockVector> {
    let mut amps = ndarray::Array1::zeros(truncation + 1);
    amps[1] = Complex64::new(1.0 - 3.0 * r2, 0.0);
    amps[3] = Complex64::new(-(6.0_f64.sqrt()) * r2, 0.0);
    FockVector::new(amps)?.normalized()
}

const ALPHA_GRID_MAX: f64 = 4.0;
const ALPHA_GRID_STEP: f64 = 0.05;
const Z_GRID_MAX: f64 = 1.5;
const Z_GRID_STEP: f64 = 0.05;
/// Smallest α the odd-parity search may visit; the superposition is
/// degenerate at exactly zero but its α → 0 limit is smooth.
const ALPHA_FLOOR_ODD: f64 = 1e-4;

/// Population the true state may carry above the working truncation before
/// a search candidate is rejected. Parameter combinations whose state does
/// not fit the basis alias under the truncated squeeze and score spuriously
/// high fidelities.
const CANDIDATE_TAIL_LIMIT: f64 = 1e-4;
/// Extra Fock levels used to measure that tail.
const CANDIDATE_GUARD_LEVELS: usize = 20;

/// Tail mass beyond `truncation` of the (α, z) superposition, measured by
/// building it in an enlarged basis.
fn candidate_tail(params: &ScssParams, truncation: usize) -> f64 {
    let big = truncation + CANDIDATE_GUARD_LEVELS;
    match cat_state_raw(params, big) {
        Ok(state) => state
            .amplitudes()
            .iter()
            .skip(truncation + 1)
            .map(|a| a.norm_sqr())
            .sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Builds the squeezed superposition for the optimizer. The α truncation
/// guard of `cat_state` is not applied (the grid deliberately extends past
/// it); instead, candidates whose true state leaks out of the basis are
/// rejected.
fn scss_candidate(alpha: f64, z: f64, parity: Parity, truncation: usize) -> Option<FockVector> {
    let params = ScssParams { alpha, z, parity };
    if candidate_tail(&params, truncation) > CANDIDATE_TAIL_LIMIT {
        return None;
    }
    cat_state_raw(&params, truncation).ok()
}

/// Finds the squeezed coherent-state superposition closest in fidelity to
/// `rho`: a coarse (α, z) grid scan followed by simplex refinement, with
/// ties broken toward smaller α.
pub fn closest_scss(rho: &DensityMatrix, parity: Parity) -> Result<(ScssParams, f64)> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    let truncation = rho.truncation();
    let alpha_floor = match parity {
        Parity::Odd => ALPHA_FLOOR_ODD,
        Parity::Even => 0.0,
    };

    let guard_truncation = truncation + CANDIDATE_GUARD_LEVELS;
    let n_alpha = (ALPHA_GRID_MAX / ALPHA_GRID_STEP).round() as usize + 1;
    let n_z = (2.0 * Z_GRID_MAX / Z_GRID_STEP).round() as usize + 1;
    let mut best = (alpha_floor.max(ALPHA_GRID_STEP), 0.0, f64::MIN);
    for iz in 0..n_z {
        let z = -Z_GRID_MAX + iz as f64 * Z_GRID_STEP;
        let squeeze = squeeze_operator(z, truncation)?;
        let squeeze_guard = squeeze_operator(z, guard_truncation)?;
        for ia in 0..n_alpha {
            let alpha = (ia as f64 * ALPHA_GRID_STEP).max(alpha_floor);
            let params = ScssParams { alpha, z, parity };
            let build = |trunc: usize, op: &ndarray::Array2<Complex64>| {
                let raw = crate::fock::cat_amplitudes_raw(&params, trunc);
                FockVector::new(raw).ok().and_then(|v| {
                    if v.norm() < 1e-12 {
                        None
                    } else {
                        v.apply(op).ok().and_then(|s| s.normalized().ok())
                    }
                })
            };
            let Some(guard) = build(guard_truncation, &squeeze_guard) else {
                continue;
            };
            let tail: f64 = guard
                .amplitudes()
                .iter()
                .skip(truncation + 1)
                .map(|a| a.norm_sqr())
                .sum();
            if tail > CANDIDATE_TAIL_LIMIT {
                continue;
            }
            let Some(candidate) = build(truncation, &squeeze) else {
                continue;
            };
            let f = crate::density::fidelity_pure(&candidate, rho)?;
            if f > best.2 + 1e-12 || (f > best.2 - 1e-12 && alpha < best.0) {
                best = (alpha, z, f);
            }
        }
    }

    let objective = |p: &[f64; 2]| {
        scss_candidate(p[0].max(alpha_floor), p[1], parity, truncation)
            .and_then(|v| crate::density::fidelity_pure(&v, rho).ok())
            .unwrap_or(f64::MIN)
    };
    let ([alpha, z], fidelity) = nelder_mead_max_2d(
        objective,
        [best.0, best.1],
        [ALPHA_GRID_STEP, Z_GRID_STEP],
        [alpha_floor, -Z_GRID_MAX],
        [ALPHA_GRID_MAX + 0.5, Z_GRID_MAX],
        1e-4,
        400,
    );
    Ok((ScssParams { alpha, z, parity }, fidelity))
}

/// One point of a reflectivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub fidelity: f64,
    pub alpha: f64,
    pub z: f64,
}

impl SweepRow {
    pub fn squeezing_db(&self) -> f64 {
        20.0 * self.z / std::f64::consts::LN_10
    }
}

/// Fidelity/α/z of the closest superposition across reflectivities,
/// sorted by R.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// The row with the highest fidelity.
    pub fn argmax(&self) -> &SweepRow {
        self.rows
            .iter()
            .max_by(|a, b| a.fidelity.partial_cmp(&b.fidelity).unwrap())
            .expect("sweep is nonempty")
    }

    /// CSV with header "R,fidelity,alpha,z,squeezing_db".
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "R,fidelity,alpha,z,squeezing_db")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.r,
                row.fidelity,
                row.alpha,
                row.z,
                row.squeezing_db()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

fn checked_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Config("empty reflectivity grid".into()));
    }
    for &r in r_grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain {
                param: "R",
                value: r,
                bounds: "[0, 1)",
            });
        }
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("reflectivity grid must be increasing".into()));
    }
    Ok(())
}

/// Sweep over the closed-form lossless superposition.
pub fn sweep_ideal(r_grid: &[f64], truncation: usize) -> Result<SweepResult> {
    checked_grid(r_grid)?;
    let rows = r_grid
        .par_iter()
        .map(|&r| {
            let state = ideal_heralded_state(r, truncation)?;
            let rho = DensityMatrix::pure(&state)?;
            let (params, fidelity) = closest_scss(&rho, Parity::Odd)?;
            Ok(SweepRow {
                r,
                fidelity,
                alpha: params.alpha,
                z: params.z,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// Sweep over the storage-averaged realistic model.
pub fn sweep_realistic(config: &ExperimentConfig, r_grid: &[f64]) -> Result<SweepResult> {
    checked_grid(r_grid)?;
    config.validate()?;
    let rows = r_grid
        .par_iter()
        .map(|&r| {
            let rho = average_over_storage(config, r)?;
            let (params, fidelity) = closest_scss(&rho, Parity::Odd)?;
            Ok(SweepRow {
                r,
                fidelity,
                alpha: params.alpha,
                z: params.z,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// Reflectivity of the nominal operating point (retardance 2.03 rad).
pub const OPERATING_REFLECTIVITY: f64 = 0.72;

/// Order-of-magnitude generation-rate model: a double click converts into
/// an output state when a stored single photon is available in the
/// accepted round-trip window and the heralding quadrature falls inside
/// ±w. Pulse occupancy is taken uniform with at most one usable stored
/// photon per double click.
pub fn generation_rate(config: &ExperimentConfig) -> Result<f64> {
    config.validate()?;
    if config.herald_halfwidth == 0.0 {
        return Ok(0.0);
    }
    let p_single_per_pulse = (config.single_click_rate / config.f_pump).min(1.0);
    let slots = (config.n_stor_max - config.n_stor_min + 1) as i32;
    let availability = 1.0 - (1.0 - p_single_per_pulse).powi(slots);
    let n_values: Vec<u32> = (config.n_stor_min..=config.n_stor_max).collect();
    let acceptances = n_values
        .par_iter()
        .map(|&n| {
            simulate_scss_windowed(
                config,
                OPERATING_REFLECTIVITY,
                n,
                config.herald_halfwidth,
            )
            .map(|(_, p)| p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_acceptance = acceptances.iter().sum::<f64>() / acceptances.len() as f64;
    Ok(config.double_click_rate * availability * mean_acceptance)
}

/// Least-squares fit of F(n) = A·(1−ℓ)ⁿ in log space; returns ℓ.
pub fn decay_fit(points: &[(u32, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Config(format!(
            "decay fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(_, f) in points {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::Domain {
                param: "fidelity",
                value: f,
                bounds: "(0, 1]",
            });
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, f) in points {
        let x = x as f64;
        let y = f.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::Config("degenerate abscissae in decay fit".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    Ok(1.0 - slope.exp())
}
