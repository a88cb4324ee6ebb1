//! Experiment orchestration: model files, ensemble validation, parameter
//! sweeps, report emission and the `delaynet` command line.

pub mod cli;
mod model_file;
mod report;
pub mod rng;
mod sweep;
mod validate;

pub use model_file::{DiscreteModel, ModelFile};
pub use report::write_report;
pub use sweep::{run_sweep, SweepConfig, SweepReport, SweepRow};
pub use validate::{run_validate, ValidationReport, ValidationTrial};
pub(crate) use validate::noise_floor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::CertifyError;
use crate::engine::EngineError;
use crate::model::ModelError;
use crate::periodic::PeriodicError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
    #[error("continuous models must be discretized first (run the discretize command)")]
    NeedsDiscretization,
    #[error(
        "refusing to validate a paper-mode certificate: exact operator norms exceed the \
         literal product bound at gaps up to the delay bound, so the claimed envelope is \
         not sound as stated; request a strict-mode certificate"
    )]
    PaperModeCertificate,
    #[error("validation failed: worst envelope ratio {max_ratio} > 1")]
    ValidationFailed { max_ratio: f64 },
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// Process exit code: 1 usage/input error, 2 certificate condition
    /// violated, 3 validation failed.
    pub fn exit_code(&self) -> i32 {
        fn certify_code(err: &CertifyError) -> i32 {
            match err {
                CertifyError::ConditionViolated { .. }
                | CertifyError::NotAnMMatrix { .. }
                | CertifyError::LambdaTargetUnreachable { .. }
                | CertifyError::NotContractive { .. } => 2,
                _ => 1,
            }
        }
        match self {
            HarnessError::Certify(err) => certify_code(err),
            HarnessError::Periodic(PeriodicError::Certify(err)) => certify_code(err),
            HarnessError::ValidationFailed { .. } => 3,
            _ => 1,
        }
    }
}

/// Experiment configuration file: every field is optional and fills in
/// for command-line flags that were not given explicitly (explicit flags
/// win).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub horizon: Option<i64>,
    pub window: Option<usize>,
    pub mode: Option<crate::certify::CertMode>,
    pub omega: Option<u32>,
    pub tol: Option<f64>,
    pub lambda_target: Option<f64>,
    #[serde(rename = "box")]
    pub box_bound: Option<f64>,
    pub mu: Option<f64>,
    pub start: Option<i64>,
    pub step: Option<f64>,
    pub sample_horizon: Option<usize>,
    /// Initial segment rows from offset `r` up to offset 0.
    pub initial: Option<Vec<Vec<f64>>>,
    pub sweep: Option<SweepConfig>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.display().to_string(),
            source,
        })
    }
}
