//! The `delaynet` command line.
//!
//! ```text
//! delaynet <simulate|discretize|certify|periodic|validate|sweep>
//!          --model FILE [--out DIR] [--config FILE] [flags…]
//! ```
//!
//! Outputs land in the `--out` directory: `report.json` always,
//! `trajectory.csv` from simulate/periodic, `sweep.csv` from sweep, and
//! `discrete_model.json` from discretize. Exit codes: 0 success, 1 usage
//! or input error, 2 stability condition violated, 3 validation failed.
//! Log verbosity is controlled by the `DELAYNET_LOG` environment variable
//! only (`error`, `warn`, `info`, `debug`).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certify::{
    corollary22_certificate, corollary22_margins, corollary23_certificate, empirical_certificate,
    CertMode, Certificate,
};
use crate::harness::{
    run_sweep, run_validate, write_report, DiscreteModel, ExperimentConfig, HarnessError,
    ModelFile, SweepConfig,
};
use crate::model::HistorySegment;
use crate::periodic::{check_periodicity, find_periodic, verify_attraction};

#[derive(Debug, Parser)]
#[command(
    name = "delaynet",
    about = "Simulation and exponential-stability certification for delayed discrete-time networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Model definition file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Output directory for reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Experiment config JSON supplying defaults for unset flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Simulation horizon (steps past the start index).
    #[arg(long)]
    horizon: Option<i64>,
    /// Truncation window for the contraction supremum.
    #[arg(long)]
    window: Option<usize>,
    /// Certificate mode: paper | strict.
    #[arg(long)]
    mode: Option<String>,
    /// Period of the coefficients.
    #[arg(long)]
    omega: Option<u32>,
    /// Iteration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Target for the contraction coefficient λ.
    #[arg(long)]
    lambda_target: Option<f64>,
    /// Half-width of the random initial-segment box.
    #[arg(long = "box")]
    box_bound: Option<f64>,
    /// Fixed decay rate (sweep reporting).
    #[arg(long)]
    mu: Option<f64>,
    /// Base index n.
    #[arg(long)]
    start: Option<i64>,
    /// Discretization step size.
    #[arg(long)]
    step: Option<f64>,
    /// Number of samples tabulated when discretizing.
    #[arg(long)]
    sample_horizon: Option<usize>,
    /// Sweep pointer (RFC 6901) into the model JSON.
    #[arg(long)]
    pointer: Option<String>,
    /// Comma-separated sweep grid values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Certificate JSON to validate (computed from the model when absent).
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a model and export the trajectory.
    Simulate(CommonArgs),
    /// Discretize a continuous model description.
    Discretize(CommonArgs),
    /// Compute a stability certificate.
    Certify(CommonArgs),
    /// Find the periodic orbit and verify attraction.
    Periodic(CommonArgs),
    /// Validate a certificate against a random ensemble.
    Validate(CommonArgs),
    /// Sweep a scalar parameter and certify each grid point.
    Sweep(CommonArgs),
}

/// Effective settings after merging flags, config file, and defaults.
struct Settings {
    model_path: PathBuf,
    out: PathBuf,
    certificate_path: Option<PathBuf>,
    seed: u64,
    trials: usize,
    horizon: i64,
    window: usize,
    mode: CertMode,
    omega: Option<u32>,
    tol: f64,
    lambda_target: f64,
    box_bound: f64,
    start: i64,
    step: Option<f64>,
    sample_horizon: usize,
    initial: Option<Vec<Vec<f64>>>,
    sweep: Option<SweepConfig>,
}

impl Settings {
    fn merge(args: &CommonArgs) -> Result<Self, HarnessError> {
        let config = match &args.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let mode = match args.mode.as_deref() {
            Some("paper") => CertMode::Paper,
            Some("strict") => CertMode::Strict,
            Some(other) => {
                return Err(HarnessError::Usage(format!(
                    "unknown mode `{other}` (expected paper or strict)"
                )))
            }
            None => config.mode.unwrap_or(CertMode::Strict),
        };
        Ok(Settings {
            model_path: args.model.clone(),
            out: args.out.clone(),
            certificate_path: args.certificate.clone(),
            seed: args.seed.or(config.seed).unwrap_or(42),
            trials: args.trials.or(config.trials).unwrap_or(100),
            horizon: args.horizon.or(config.horizon).unwrap_or(300),
            window: args.window.or(config.window).unwrap_or(400),
            mode,
            omega: args.omega.or(config.omega),
            tol: args.tol.or(config.tol).unwrap_or(1e-10),
            lambda_target: args.lambda_target.or(config.lambda_target).unwrap_or(0.99),
            box_bound: args.box_bound.or(config.box_bound).unwrap_or(1.0),
            start: args.start.or(config.start).unwrap_or(0),
            step: args.step.or(config.step),
            sample_horizon: args.sample_horizon.or(config.sample_horizon).unwrap_or(512),
            initial: config.initial,
            sweep: match (&args.pointer, &args.values) {
                (Some(pointer), Some(values)) => Some(SweepConfig {
                    pointer: pointer.clone(),
                    values: values.clone(),
                    mode: Some(mode),
                    mu: args.mu.or(config.mu),
                    lambda_target: args.lambda_target.or(config.lambda_target),
                    window: args.window.or(config.window),
                    validate: false,
                    trials: args.trials.or(config.trials),
                    horizon: args.horizon.or(config.horizon),
                }),
                _ => config.sweep,
            },
        })
    }

    fn ensure_out(&self) -> Result<(), HarnessError> {
        fs::create_dir_all(&self.out).map_err(|source| HarnessError::Io {
            path: self.out.display().to_string(),
            source,
        })
    }

    fn validate_positive(&self) -> Result<(), HarnessError> {
        if self.horizon <= 0 {
            return Err(HarnessError::Usage("horizon must be positive".into()));
        }
        if self.window == 0 {
            return Err(HarnessError::Usage("window must be positive".into()));
        }
        Ok(())
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders --help/--version through the same path
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Discretize(a) => ("discretize", a),
        Command::Certify(a) => ("certify", a),
        Command::Periodic(a) => ("periodic", a),
        Command::Validate(a) => ("validate", a),
        Command::Sweep(a) => ("sweep", a),
    };
    let settings = match Settings::merge(args) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: {err}");
            return err.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Simulate(_) => cmd_simulate(&settings),
        Command::Discretize(_) => cmd_discretize(&settings),
        Command::Certify(_) => cmd_certify(&settings),
        Command::Periodic(_) => cmd_periodic(&settings),
        Command::Validate(_) => cmd_validate(&settings),
        Command::Sweep(_) => cmd_sweep(&settings),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {name}: {err}");
            err.exit_code()
        }
    }
}

fn initial_segment(
    settings: &Settings,
    model: &DiscreteModel,
) -> Result<HistorySegment, HarnessError> {
    match &settings.initial {
        Some(rows) => Ok(HistorySegment::from_rows(model.r(), rows)?),
        None => {
            let mut rng = super::rng::rng_from(super::rng::seed_for(settings.seed, 0));
            Ok(super::rng::random_segment(
                &mut rng,
                model.dim(),
                model.r(),
                settings.box_bound,
            ))
        }
    }
}

fn write_trajectory(
    out: &Path,
    trajectory: &crate::engine::Trajectory,
) -> Result<PathBuf, HarnessError> {
    let path = out.join("trajectory.csv");
    let file = fs::File::create(&path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    trajectory
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(path)
}

fn cmd_simulate(settings: &Settings) -> Result<(), HarnessError> {
    settings.validate_positive()?;
    settings.ensure_out()?;
    let model = ModelFile::load(&settings.model_path)?.as_discrete()?;
    let alpha = initial_segment(settings, &model)?;
    let trajectory = model.solve(settings.start, &alpha, settings.start + settings.horizon)?;
    let csv = write_trajectory(&settings.out, &trajectory)?;
    log::info!("simulated {} steps into {}", settings.horizon, csv.display());
    write_report(
        &settings.out,
        "simulate",
        Some(settings.seed),
        json!({
            "source": trajectory.source(),
            "components": model.dim(),
            "start": settings.start,
            "horizon": settings.horizon,
            "initial": alpha.to_rows(),
            "final_norm": trajectory.history_norm(trajectory.end()),
            "trajectory_csv": "trajectory.csv",
        }),
    )
}

fn cmd_discretize(settings: &Settings) -> Result<(), HarnessError> {
    settings.ensure_out()?;
    let file = ModelFile::load(&settings.model_path)?;
    let spec = match file {
        ModelFile::Continuous(spec) => spec,
        _ => {
            return Err(HarnessError::Usage(
                "discretize expects a continuous model file".into(),
            ))
        }
    };
    let step = settings
        .step
        .ok_or_else(|| HarnessError::Usage("discretize requires --step".into()))?;
    let model = spec.discretize(step, settings.sample_horizon)?;
    let out_model = ModelFile::Hopfield(model.clone());
    let path = settings.out.join("discrete_model.json");
    let text = serde_json::to_string_pretty(&out_model).expect("models serialize");
    fs::write(&path, text + "\n").map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_report(
        &settings.out,
        "discretize",
        None,
        json!({
            "step": step,
            "sample_horizon": settings.sample_horizon,
            "components": model.dim(),
            "delay_bound": model.delay_bound(),
            "model_json": "discrete_model.json",
        }),
    )
}

/// The certificate pipeline shared by certify/periodic/validate:
/// specialized models in paper mode go through the closed form with the
/// M-matrix transfer as fallback; strict mode runs the empirical search,
/// falling back to the transfer for delay-free models (where corollary
/// certificates are exact-norm-backed and the row-wise search can fail
/// even though ℳ is an M-matrix).
fn certificate_for(
    model: &DiscreteModel,
    mode: CertMode,
    lambda_target: f64,
    window: usize,
) -> Result<Certificate, HarnessError> {
    use crate::certify::CertifyError;
    match (mode, model.as_xu_wu()) {
        (CertMode::Paper, Some(xu_wu)) => {
            // prefer the plain closed form when its row condition holds
            match corollary22_certificate(xu_wu, lambda_target) {
                Ok(cert) => Ok(cert),
                Err(CertifyError::ConditionViolated { .. }) => {
                    Ok(corollary23_certificate(xu_wu, lambda_target)?)
                }
                Err(err) => Err(err.into()),
            }
        }
        _ => {
            match empirical_certificate(&model.general(), mode, lambda_target, window) {
                Ok(cert) => Ok(cert),
                Err(
                    err @ (CertifyError::NotContractive { .. }
                    | CertifyError::LambdaTargetUnreachable { .. }),
                ) => {
                    if let Some(xu_wu) = model.as_xu_wu().filter(|m| m.delay_bound() == 0) {
                        Ok(corollary23_certificate(xu_wu, lambda_target).map_err(|_| err)?)
                    } else {
                        Err(err.into())
                    }
                }
                Err(err) => Err(err.into()),
            }
        }
    }
}

fn cmd_certify(settings: &Settings) -> Result<(), HarnessError> {
    settings.validate_positive()?;
    settings.ensure_out()?;
    let model = ModelFile::load(&settings.model_path)?.as_discrete()?;
    let certificate = certificate_for(&model, settings.mode, settings.lambda_target, settings.window)?;
    log::info!(
        "certificate: λ = {}, μ = {}, C = {}",
        certificate.lambda,
        certificate.mu,
        certificate.c
    );
    let margins22 = model.as_xu_wu().map(corollary22_margins);
    write_report(
        &settings.out,
        "certify",
        None,
        json!({
            "certificate": certificate,
            "lambda_target": settings.lambda_target,
            "window": settings.window,
            "row_margins": margins22,
        }),
    )
}

fn cmd_periodic(settings: &Settings) -> Result<(), HarnessError> {
    settings.validate_positive()?;
    settings.ensure_out()?;
    let model = ModelFile::load(&settings.model_path)?.as_discrete()?;
    let xu_wu = model.as_xu_wu().ok_or_else(|| {
        HarnessError::Usage("periodic requires a specialized (xu-wu) model file".into())
    })?;
    let omega = settings
        .omega
        .ok_or_else(|| HarnessError::Usage("periodic requires --omega".into()))?;
    let periodicity = check_periodicity(xu_wu, omega)?;
    let certificate = empirical_certificate(
        &model.general(),
        CertMode::Strict,
        settings.lambda_target,
        settings.window,
    )?;
    let orbit = find_periodic(xu_wu, settings.start, omega, &certificate, settings.tol, None)?;
    let attraction = verify_attraction(
        xu_wu,
        settings.start,
        omega,
        &orbit.phi,
        Some(&certificate),
        settings.trials,
        settings.horizon,
        settings.box_bound,
        settings.seed,
    )?;
    let extended = crate::engine::solve_xu_wu(
        xu_wu,
        settings.start,
        &orbit.phi,
        settings.start + 10 * i64::from(omega),
    )?;
    write_trajectory(&settings.out, &extended)?;
    write_report(
        &settings.out,
        "periodic",
        Some(settings.seed),
        json!({
            "omega": omega,
            "periodicity": periodicity,
            "certificate": certificate,
            "residual": orbit.residual,
            "iterations": orbit.iterations,
            "k": orbit.k,
            "shift_defect": orbit.shift_defect,
            "phi": orbit.phi.to_rows(),
            "envelope_ok": attraction.envelope_ok,
            "worst_ratio": attraction.worst_ratio,
            "tail_step_ratio": attraction.tail_step_ratio,
            "per_period_ratios": attraction.per_period_ratios,
            "trajectory_csv": "trajectory.csv",
        }),
    )
}

fn cmd_validate(settings: &Settings) -> Result<(), HarnessError> {
    settings.validate_positive()?;
    settings.ensure_out()?;
    let model = ModelFile::load(&settings.model_path)?.as_discrete()?;
    // validate a supplied certificate, or compute one; ensemble validation
    // is only sound against exact-norm certificates
    let certificate = match &settings.certificate_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|source| HarnessError::Json {
                path: path.display().to_string(),
                source,
            })?
        }
        None => certificate_for(
            &model,
            CertMode::Strict,
            settings.lambda_target,
            settings.window,
        )?,
    };
    let report = run_validate(
        &model,
        &certificate,
        settings.start,
        settings.trials,
        settings.horizon,
        settings.box_bound,
        settings.seed,
    )?;
    let pass = report.pass;
    let max_ratio = report.global_max;
    write_report(&settings.out, "validate", Some(settings.seed), &report)?;
    if pass {
        Ok(())
    } else {
        Err(HarnessError::ValidationFailed { max_ratio })
    }
}

fn cmd_sweep(settings: &Settings) -> Result<(), HarnessError> {
    settings.ensure_out()?;
    let sweep_config = settings
        .sweep
        .clone()
        .ok_or_else(|| HarnessError::Usage("sweep requires --pointer and --values (or a config file)".into()))?;
    let text = fs::read_to_string(&settings.model_path).map_err(|source| HarnessError::Io {
        path: settings.model_path.display().to_string(),
        source,
    })?;
    let model_json: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: settings.model_path.display().to_string(),
            source,
        })?;
    let report = run_sweep(&model_json, &sweep_config, settings.seed)?;
    let csv_path = settings.out.join("sweep.csv");
    fs::write(&csv_path, report.to_csv()).map_err(|source| HarnessError::Io {
        path: csv_path.display().to_string(),
        source,
    })?;
    write_report(
        &settings.out,
        "sweep",
        Some(settings.seed),
        json!({
            "sweep": report,
            "sweep_csv": "sweep.csv",
        }),
    )
}
