//! Parameter sweeps over scalar model entries.
//!
//! A sweep addresses one scalar in the model JSON by pointer (RFC 6901,
//! e.g. `/b/0/0/value`), rebuilds the model at each grid value, certifies
//! it, and optionally validates the certificate. Failures at a grid point
//! are recorded in that row and never abort the sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::{
    corollary22_lambda, corollary23_certificate, empirical_certificate, CertMode, Certificate,
};

use super::model_file::ModelFile;
use super::validate::run_validate;
use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// JSON pointer to the scalar being swept.
    pub pointer: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub mode: Option<CertMode>,
    /// Fixed decay rate: report λ(μ) at this μ instead of searching for
    /// the target (makes λ comparable across grid points).
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub lambda_target: Option<f64>,
    #[serde(default)]
    pub window: Option<usize>,
    /// Validate each certificate on an ensemble.
    #[serde(default)]
    pub validate: bool,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub horizon: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// `certified`, `pass`, `fail`, or `no-certificate: <reason>`.
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub pointer: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV body: `parameter,lambda,mu,C,status`, rows in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,lambda,mu,C,status\n");
        for row in &self.rows {
            let field = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.parameter,
                field(row.lambda),
                field(row.mu),
                field(row.c),
                row.status
            ));
        }
        out
    }
}

/// Run the sweep on the JSON form of a model. Grid points execute
/// concurrently; rows come back in grid order.
pub fn run_sweep(
    model_json: &Value,
    config: &SweepConfig,
    seed: u64,
) -> Result<SweepReport, HarnessError> {
    if config.values.is_empty() {
        return Err(HarnessError::Usage("sweep grid is empty".into()));
    }
    if model_json.pointer(&config.pointer).is_none() {
        return Err(HarnessError::Usage(format!(
            "pointer {} does not address the model",
            config.pointer
        )));
    }
    let rows: Vec<SweepRow> = config
        .values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| sweep_point(model_json, config, value, super::rng::seed_for(seed, index as u64)))
        .collect();
    Ok(SweepReport {
        pointer: config.pointer.clone(),
        rows,
    })
}

fn sweep_point(model_json: &Value, config: &SweepConfig, value: f64, seed: u64) -> SweepRow {
    let mut json = model_json.clone();
    match json.pointer_mut(&config.pointer) {
        Some(slot) => *slot = Value::from(value),
        None => {
            return SweepRow {
                parameter: value,
                lambda: None,
                mu: None,
                c: None,
                status: "no-certificate: pointer missing".into(),
            }
        }
    }
    let file: ModelFile = match serde_json::from_value(json) {
        Ok(file) => file,
        Err(err) => {
            return SweepRow {
                parameter: value,
                lambda: None,
                mu: None,
                c: None,
                status: format!("no-certificate: {err}"),
            }
        }
    };
    match certify_point(&file, config) {
        Err(err) => SweepRow {
            parameter: value,
            lambda: None,
            mu: None,
            c: None,
            status: format!("no-certificate: {err}"),
        },
        Ok(cert) => {
            let status = if config.validate {
                let trials = config.trials.unwrap_or(100);
                let horizon = config.horizon.unwrap_or(200);
                match file
                    .as_discrete()
                    .and_then(|m| run_validate(&m, &cert, 0, trials, horizon, 1.0, seed))
                {
                    Ok(report) if report.pass => "pass".to_string(),
                    Ok(_) => "fail".to_string(),
                    Err(err) => format!("fail: {err}"),
                }
            } else {
                "certified".to_string()
            };
            SweepRow {
                parameter: value,
                lambda: Some(cert.lambda),
                mu: Some(cert.mu),
                c: Some(cert.c),
                status,
            }
        }
    }
}

fn certify_point(file: &ModelFile, config: &SweepConfig) -> Result<Certificate, HarnessError> {
    let discrete = file.as_discrete()?;
    let mode = config.mode.unwrap_or(CertMode::Paper);
    let target = config.lambda_target.unwrap_or(0.99);
    let window = config.window.unwrap_or(400);
    match (mode, discrete.as_xu_wu()) {
        (CertMode::Paper, Some(xu_wu)) => {
            if let Some(mu) = config.mu {
                Ok(fixed_rate_certificate(xu_wu, mu)?)
            } else {
                Ok(corollary23_certificate(xu_wu, target)?)
            }
        }
        _ => Ok(empirical_certificate(
            &discrete.general(),
            mode,
            target,
            window,
        )?),
    }
}

/// Closed-form certificate at a caller-fixed rate, so λ is comparable
/// across grid points instead of sitting at the search target everywhere.
fn fixed_rate_certificate(
    model: &crate::model::XuWuModel,
    mu: f64,
) -> Result<Certificate, crate::certify::CertifyError> {
    use crate::certify::{corollary22_margins, CertificateKind, CertifyError};
    let margins = corollary22_margins(model);
    if let Some((i, &margin)) = margins.iter().enumerate().find(|(_, &m)| m <= 0.0) {
        return Err(CertifyError::ConditionViolated { i, margin });
    }
    let lambda = corollary22_lambda(model, mu)?;
    if lambda >= 1.0 {
        return Err(CertifyError::LambdaTargetUnreachable {
            floor: lambda,
            target: 1.0,
        });
    }
    Ok(Certificate {
        kind: CertificateKind::Corollary22,
        mode: if model.delay_bound() == 0 {
            CertMode::Strict
        } else {
            CertMode::Paper
        },
        lambda,
        mu,
        c: 1.0 / (1.0 - lambda),
        mu_supremal: None,
        d: None,
        argmax_pair: None,
        converged: true,
        margins,
        norm_overshoot: None,
        scale_factor: None,
    })
}
