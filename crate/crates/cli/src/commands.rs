//! Command handlers. Every handler returns `CliError` with the exit code
//! contract: 2 for usage/config problems, 3 for numerical failures.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use scss_core::{
    average_over_storage, average_over_storage_even, cat_state, closest_scss,
    count_negative_regions, decay_fit, fidelity_pure, generation_rate, ingest_density_matrix,
    maxlik_reconstruct, parametric_bootstrap, records_from_csv, sweep_ideal, sweep_realistic,
    wigner, ExperimentConfig, GridSpec, Parity, ScssParams, TomographyJob,
};

use crate::manifest::RunManifest;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<scss_core::Error> for CliError {
    fn from(e: scss_core::Error) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e.to_string())
    }
}

type CmdResult = Result<(), CliError>;

/// Resolves `--config`: the built-in "paper" profile, a TOML path, or a
/// file under $SCSS_CONFIG_DIR.
pub fn load_config(value: &str, profile: &str) -> Result<(ExperimentConfig, String), CliError> {
    if value == "paper" {
        return Ok((ExperimentConfig::paper(), "paper".into()));
    }
    let direct = PathBuf::from(value);
    let path = if direct.exists() {
        direct
    } else if let Ok(dir) = std::env::var("SCSS_CONFIG_DIR") {
        let fallback = Path::new(&dir).join(value);
        if fallback.exists() {
            fallback
        } else {
            return Err(CliError::config(format!(
                "config file not found: {} (also tried {})",
                direct.display(),
                fallback.display()
            )));
        }
    } else {
        return Err(CliError::config(format!(
            "config file not found: {}",
            direct.display()
        )));
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let config = ExperimentConfig::from_toml_profile(&text, profile)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok((config, format!("{}:{profile}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> CmdResult {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn r_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::config("--steps must be at least 2"));
    }
    if !(0.0..1.0).contains(&r_min) || !(0.0..1.0).contains(&r_max) || r_min >= r_max {
        return Err(CliError::config(format!(
            "reflectivity range [{r_min}, {r_max}] must satisfy 0 <= r-min < r-max < 1"
        )));
    }
    let step = (r_max - r_min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| r_min + i as f64 * step).collect())
}

pub struct SweepArgs {
    pub ideal: bool,
    pub config: String,
    pub profile: String,
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
    pub out: PathBuf,
}

pub fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let started = Instant::now();
    let (config, profile_name) = load_config(&args.config, &args.profile)?;
    let grid = r_grid(args.r_min, args.r_max, args.steps)?;
    let result = if args.ideal {
        sweep_ideal(&grid, config.truncation)?
    } else {
        sweep_realistic(&config, &grid)?
    };
    write_output(&args.out, &result.to_csv_string())?;
    let best = result.argmax();
    eprintln!(
        "best row: R = {:.4}, fidelity = {:.4}, alpha = {:.4}, z = {:.4}",
        best.r, best.fidelity, best.alpha, best.z
    );
    let mut manifest = RunManifest::new("sweep", &profile_name);
    manifest.outputs.push(args.out.clone());
    manifest
        .write_beside(&args.out, started.elapsed())
        .map_err(|e| CliError::config(e.to_string()))?;
    Ok(())
}

pub struct SimulateArgs {
    pub parity: Parity,
    pub reflectivity: f64,
    pub config: String,
    pub profile: String,
    pub n_stor: Option<u32>,
    pub out: PathBuf,
    pub wigner_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ClosestReport {
    alpha: f64,
    z: f64,
    squeezing_db: f64,
    fidelity: f64,
}

pub fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let started = Instant::now();
    if !(0.0..1.0).contains(&args.reflectivity) {
        return Err(CliError::config(format!(
            "reflectivity {} outside [0, 1)",
            args.reflectivity
        )));
    }
    let (config, profile_name) = load_config(&args.config, &args.profile)?;
    let rho = match (args.parity, args.n_stor) {
        (Parity::Odd, None) => average_over_storage(&config, args.reflectivity)?,
        (Parity::Odd, Some(n)) => {
            scss_core::simulate_scss(&config, args.reflectivity, n)?.0
        }
        (Parity::Even, None) => average_over_storage_even(&config, args.reflectivity)?,
        (Parity::Even, Some(n)) => scss_core::simulate_even(&config, args.reflectivity, n)?,
    };
    let (params, fidelity) = closest_scss(&rho, args.parity)?;
    let grid = wigner(&rho, &GridSpec::square(4.0, 201))?;
    let negative_regions = count_negative_regions(&grid, 0.005)?;
    let report = json!({
        "reflectivity": args.reflectivity,
        "parity": args.parity.to_string(),
        "storage_round_trips": args.n_stor
            .map(|n| json!(n))
            .unwrap_or(json!(format!("averaged {}..={}", config.n_stor_min, config.n_stor_max))),
        "closest": ClosestReport {
            alpha: params.alpha,
            z: params.z,
            squeezing_db: params.squeezing_db(),
            fidelity,
        },
        "negative_regions": negative_regions,
        "populations": rho.populations()?,
        "density_matrix": serde_json::from_str::<serde_json::Value>(&rho.to_json())
            .expect("density matrix serializes"),
    });
    write_output(&args.out, &serde_json::to_string_pretty(&report).unwrap())?;
    let mut manifest = RunManifest::new("simulate", &profile_name);
    manifest.outputs.push(args.out.clone());
    if let Some(wigner_path) = &args.wigner_out {
        write_output(wigner_path, &grid.to_csv_string())?;
        manifest.outputs.push(wigner_path.clone());
    }
    manifest
        .write_beside(&args.out, started.elapsed())
        .map_err(|e| CliError::config(e.to_string()))?;
    eprintln!(
        "closest superposition: fidelity = {:.4}, alpha = {:.4}, {:.2} dB; {} negative regions",
        fidelity,
        params.alpha,
        params.squeezing_db(),
        negative_regions
    );
    Ok(())
}

pub struct TomoArgs {
    pub input: PathBuf,
    pub efficiency: f64,
    pub storage_roundtrips: u32,
    pub loss_per_roundtrip: f64,
    pub truncation: usize,
    pub target_alpha: Option<f64>,
    pub target_z: Option<f64>,
    pub bootstrap: Option<usize>,
    pub seed: u64,
    pub max_iterations: usize,
    pub tol: f64,
    pub out: PathBuf,
}

pub fn cmd_tomo(args: &TomoArgs) -> CmdResult {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::config(format!("{}: {e}", args.input.display())))?;
    let records = records_from_csv(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", args.input.display())))?;
    let storage_transmission = (1.0 - args.loss_per_roundtrip).powi(args.storage_roundtrips as i32);
    let correction = args.efficiency * storage_transmission;
    let mut job = TomographyJob::new(records, args.truncation).with_efficiency(correction);
    job.max_iterations = args.max_iterations;
    job.convergence_tol = args.tol;
    let n_records = job.records.len();
    let reconstruction = maxlik_reconstruct(&job).map_err(|e| CliError::config(e.to_string()))?;

    let target = match (args.target_alpha, args.target_z) {
        (Some(alpha), Some(z)) => Some(ScssParams::new(alpha, z, Parity::Odd)?),
        (None, None) => None,
        _ => {
            return Err(CliError::config(
                "--target-alpha and --target-z must be given together",
            ))
        }
    };
    let fidelity_to_target = match &target {
        Some(params) => Some(fidelity_pure(
            &cat_state(params, args.truncation)?,
            &reconstruction.rho,
        )?),
        None => None,
    };
    let bootstrap = match (args.bootstrap, &target) {
        (Some(n_rep), Some(params)) => Some(parametric_bootstrap(
            &reconstruction.rho,
            n_records,
            n_rep,
            params,
            args.seed,
        )?),
        (Some(_), None) => {
            return Err(CliError::config(
                "--bootstrap requires --target-alpha/--target-z",
            ))
        }
        _ => None,
    };

    let report = json!({
        "records": n_records,
        "efficiency_correction": correction,
        "iterations": reconstruction.iterations,
        "converged": reconstruction.converged,
        "log_likelihood": reconstruction.log_likelihood,
        "fidelity_to_target": fidelity_to_target,
        "target": target.map(|t| json!({
            "alpha": t.alpha, "z": t.z, "squeezing_db": t.squeezing_db(),
        })),
        "bootstrap": bootstrap.map(|b| json!({
            "point_estimate": b.point_estimate,
            "lower": b.lower,
            "upper": b.upper,
            "n_repetitions": b.n_repetitions,
        })),
        "density_matrix": serde_json::from_str::<serde_json::Value>(&reconstruction.rho.to_json())
            .expect("density matrix serializes"),
    });
    write_output(&args.out, &serde_json::to_string_pretty(&report).unwrap())?;
    let mut manifest = RunManifest::new("tomo", "-");
    manifest.seed = Some(args.seed);
    manifest.inputs.push(args.input.clone());
    manifest.outputs.push(args.out.clone());
    manifest
        .write_beside(&args.out, started.elapsed())
        .map_err(|e| CliError::config(e.to_string()))?;
    if let Some(f) = fidelity_to_target {
        eprintln!("fidelity to target: {f:.4}");
    }
    if !reconstruction.converged {
        return Err(CliError::numerical(format!(
            "reconstruction did not converge within {} iterations",
            reconstruction.iterations
        )));
    }
    Ok(())
}

pub struct RateArgs {
    pub config: String,
    pub profile: String,
    pub n_stor_max: Option<u32>,
}

pub fn cmd_rate(args: &RateArgs) -> CmdResult {
    let (mut config, _) = load_config(&args.config, &args.profile)?;
    if let Some(n) = args.n_stor_max {
        config.n_stor_max = n;
    }
    let rate = generation_rate(&config)?;
    println!("{rate:.6}");
    Ok(())
}

pub struct DecayFitArgs {
    pub input: PathBuf,
}

pub fn cmd_decay_fit(args: &DecayFitArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::config(format!("{}: {e}", args.input.display())))?;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 {
            if line != "n_stor,fidelity" {
                return Err(CliError::config(format!(
                    "{}: expected header \"n_stor,fidelity\", got \"{line}\"",
                    args.input.display()
                )));
            }
            continue;
        }
        let mut fields = line.split(',');
        let parse_err = |what: &str| {
            CliError::config(format!(
                "{} line {}: malformed {what}",
                args.input.display(),
                idx + 1
            ))
        };
        let n: u32 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse_err("n_stor"))?;
        let f: f64 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse_err("fidelity"))?;
        points.push((n, f));
    }
    let loss = decay_fit(&points).map_err(|e| CliError::numerical(e.to_string()))?;
    println!("{loss:.6}");
    Ok(())
}

/// Re-validates files this tool produced against their schemas.
pub fn cmd_check(paths: &[PathBuf]) -> CmdResult {
    for path in paths {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        check_one(path, &text).map_err(|e| {
            CliError::config(format!("{}: {}", path.display(), e.message))
        })?;
        eprintln!("{}: ok", path.display());
    }
    Ok(())
}

fn check_one(path: &Path, text: &str) -> CmdResult {
    let name = path.to_string_lossy();
    if name.ends_with(".manifest.json") {
        serde_json::from_str::<crate::manifest::RunManifest>(text)
            .map_err(|e| CliError::config(format!("manifest: {e}")))?;
        return Ok(());
    }
    if name.ends_with(".json") {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let dm = value
            .get("density_matrix")
            .cloned()
            .unwrap_or(value.clone());
        let report = ingest_density_matrix(&dm.to_string())
            .map_err(|e| CliError::config(format!("density matrix: {e}")))?;
        report
            .rho
            .validate()
            .map_err(|e| CliError::config(format!("density matrix: {e}")))?;
        return Ok(());
    }
    if name.ends_with(".csv") {
        let header = text.lines().next().unwrap_or("");
        match header {
            "R,fidelity,alpha,z,squeezing_db" => check_sweep_csv(text),
            "x,p,w" => check_numeric_csv(text, 3),
            "x,theta" => {
                records_from_csv(text).map_err(|e| CliError::config(e.to_string()))?;
                Ok(())
            }
            "n_stor,fidelity" => check_numeric_csv(text, 2),
            other => Err(CliError::config(format!("unrecognized CSV header \"{other}\""))),
        }
    } else {
        Err(CliError::config("unrecognized file type".to_string()))
    }
}

fn check_sweep_csv(text: &str) -> CmdResult {
    let mut previous_r = f64::NEG_INFINITY;
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::config(format!("line {}: {e}", idx + 1)))?;
        if fields.len() != 5 {
            return Err(CliError::config(format!(
                "line {}: expected 5 columns, got {}",
                idx + 1,
                fields.len()
            )));
        }
        if fields[0] <= previous_r {
            return Err(CliError::config(format!(
                "line {}: R column must be strictly increasing",
                idx + 1
            )));
        }
        previous_r = fields[0];
        if !(0.0..=1.0).contains(&fields[1]) {
            return Err(CliError::config(format!(
                "line {}: fidelity {} outside [0, 1]",
                idx + 1,
                fields[1]
            )));
        }
    }
    Ok(())
}

fn check_numeric_csv(text: &str, columns: usize) -> CmdResult {
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse()).collect();
        match parsed {
            Ok(fields) if fields.len() == columns => {}
            Ok(fields) => {
                return Err(CliError::config(format!(
                    "line {}: expected {} columns, got {}",
                    idx + 1,
                    columns,
                    fields.len()
                )))
            }
            Err(e) => {
                return Err(CliError::config(format!("line {}: {e}", idx + 1)));
            }
        }
    }
    Ok(())
}
