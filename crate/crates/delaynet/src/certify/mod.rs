//! Stability certificates.
//!
//! A certificate is a triple (λ, μ, C) with λ < 1 and C = 1/(1 − λ) such
//! that any two solutions of the certified model satisfy
//!
//! ```text
//! ‖x̄_m(·,n,ᾱ) − x̄_m(·,n,ᾱ*)‖ ≤ C · e^{−μ(m−n)} · ‖ᾱ − ᾱ*‖
//! ```
//!
//! Three routes produce certificates: the truncated empirical supremum of
//! the contraction coefficient λ over the pair set Δ (in the literal
//! *paper* operator-bound convention or the exact-norm *strict* one), the
//! closed-form geometric-series bound for the specialized model, and the
//! M-matrix test with witness rescaling that widens the closed form's
//! applicability.

mod corollary;
mod lambda;
mod m_matrix;

pub use corollary::{
    corollary22_certificate, corollary22_lambda, corollary22_margins, corollary23_certificate,
    rescale,
};
pub use lambda::{
    empirical_certificate, lambda_abstract, lambda_empirical, operator_norm_audit, product_bound,
    BoundSpec, LambdaCell, LambdaReport, NormAudit, NormAuditEntry,
};
pub(crate) use lambda::lambda_abstract_at;
pub use m_matrix::{
    build_m, m_matrix_witness, MMatrix, MMatrixWitness, SpectralCheck, WitnessReason,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("pair (m, n) = ({m}, {n}) is not in Δ (need m ≥ n ≥ 0)")]
    NotInDelta { m: i64, n: i64 },
    #[error("lambda target {0} must lie in (0, 1)")]
    InvalidLambdaTarget(f64),
    #[error("rate {0} must be positive and finite")]
    InvalidRate(f64),
    #[error("invalid rate bound: {0}")]
    InvalidRateBound(&'static str),
    #[error(
        "stability condition violated at component {i}: a_i⁻ − Σ_j b_ij⁺·F_j = {margin} ≤ 0"
    )]
    ConditionViolated { i: usize, margin: f64 },
    #[error("λ floor {floor} already exceeds the target {target}; raise the lambda target")]
    LambdaTargetUnreachable { floor: f64, target: f64 },
    #[error("model is not certifiable: λ ≥ 1 for every admissible rate (floor {lambda_floor})")]
    NotContractive { lambda_floor: f64 },
    #[error("matrix is not an M-matrix: {reason}")]
    NotAnMMatrix { reason: String },
    #[error(
        "M-matrix verdicts disagree: witness says {witness}, spectral test says {spectral} \
         (ρ = {rho}, shift = {shift})"
    )]
    VerdictDisagreement {
        witness: bool,
        spectral: bool,
        rho: f64,
        shift: f64,
    },
}

/// Which operator bound backs the certificate.
///
/// *Paper* uses the coefficient products `Π c_i(s)` over the whole gap.
/// *Strict* replaces them by the exact history-space operator norm, which
/// equals the product truncated at `m + r` and stays 1 while `m − n ≤ τ`.
/// Only strict certificates are admissible for ensemble envelope
/// validation; see [`operator_norm_audit`] for where the two differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMode {
    Paper,
    Strict,
}

/// The decay family `a'_{m,n}` weighting the contraction sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateBound {
    /// `a'_{m,n} = e^{−rate·(m−n)}`, so `a'_{m,m} = 1`.
    Exponential { rate: f64 },
    /// `a'_{m,n} = values[min(m−n, len−1)]`: a user table over the gap,
    /// extended by its last value.
    Table { values: Vec<f64> },
}

impl RateBound {
    pub fn exponential(rate: f64) -> Self {
        RateBound::Exponential { rate }
    }

    pub fn check(&self) -> Result<(), CertifyError> {
        match self {
            RateBound::Exponential { rate } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(CertifyError::InvalidRate(*rate));
                }
            }
            RateBound::Table { values } => {
                if values.is_empty() {
                    return Err(CertifyError::InvalidRateBound("empty table"));
                }
                if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(CertifyError::InvalidRateBound(
                        "table values must be positive",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, m: i64, n: i64) -> f64 {
        let gap = (m - n).max(0) as usize;
        match self {
            RateBound::Exponential { rate } => (-rate * gap as f64).exp(),
            RateBound::Table { values } => values[gap.min(values.len() - 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    EmpiricalLambda,
    #[serde(rename = "corollary-2.2")]
    Corollary22,
    #[serde(rename = "corollary-2.3")]
    Corollary23,
}

/// A stability certificate; see the module docs for the envelope it claims.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub mode: CertMode,
    /// Contraction coefficient, `< 1`.
    pub lambda: f64,
    /// Exponential decay rate of the envelope.
    pub mu: f64,
    /// Envelope constant; `1/(1 − λ)`, additionally inflated by the
    /// coordinate-scaling factor for rescaled certificates.
    #[serde(rename = "C")]
    pub c: f64,
    /// Largest rate admissible before λ reaches 1, when the route computes it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_supremal: Option<f64>,
    /// M-matrix witness for rescaled certificates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
    /// `(component, m, n)` attaining the empirical supremum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_pair: Option<(usize, i64, i64)>,
    /// True when the truncated supremum stopped moving over the last
    /// quarter of the window (closed forms always converge).
    pub converged: bool,
    /// Per-component slack: `1 − λ_i` for empirical certificates,
    /// `a_i⁻ − Σ_j b_ij⁺·F_j` (after rescaling, if any) for the corollaries.
    pub margins: Vec<f64>,
    /// Strict-mode only: `sup a^{(i)}_{m,n}/a'_{m,n}` over the scanned
    /// window. Kept ≤ C by the certificate search so the claimed envelope
    /// also covers the gaps `m − n ≤ τ` where histories still carry initial
    /// data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_overshoot: Option<f64>,
    /// `max_i d_i / min_i d_i` for rescaled certificates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_factor: Option<f64>,
}

impl Certificate {
    /// The envelope `C·e^{−μ(m−n)}` claimed by this certificate.
    pub fn envelope(&self, m: i64, n: i64) -> f64 {
        self.c * (-self.mu * (m - n).max(0) as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_bound_eval() {
        let e = RateBound::exponential(0.5);
        assert_eq!(e.eval(3, 3), 1.0);
        assert!((e.eval(5, 3) - (-1.0_f64).exp()).abs() < 1e-15);

        let t = RateBound::Table {
            values: vec![1.0, 0.5, 0.25],
        };
        assert_eq!(t.eval(0, 0), 1.0);
        assert_eq!(t.eval(4, 3), 0.5);
        assert_eq!(t.eval(9, 3), 0.25);
    }

    #[test]
    fn rate_bound_validation() {
        assert!(RateBound::exponential(0.0).check().is_err());
        assert!(RateBound::Table { values: vec![] }.check().is_err());
        assert!(RateBound::Table { values: vec![1.0, -0.5] }.check().is_err());
        assert!(RateBound::Table { values: vec![1.0, 0.5] }.check().is_ok());
    }

    #[test]
    fn certificate_kind_json_names() {
        let json = serde_json::to_string(&CertificateKind::Corollary22).unwrap();
        assert_eq!(json, "\"corollary-2.2\"");
        let json = serde_json::to_string(&CertificateKind::EmpiricalLambda).unwrap();
        assert_eq!(json, "\"empirical-lambda\"");
    }
}
