//! Closed-form exponential certificates for the specialized model.
//!
//! Under the row condition `a_i⁻ > Σ_j b_ij⁺·F_j` the geometric series in
//! the contraction sum collapses, giving for every admissible rate
//! `μ ∈ (0, min_i ν_i)` the closed form
//!
//! ```text
//! λ(μ) = max_i  (e^{ν_i} − 1)/(e^{ν_i − μ} − 1) · (Σ_j b_ij⁺·F_j)/a_i⁻
//! ```
//!
//! which is strictly increasing in μ with `λ(0⁺) = max_i β_i/a_i⁻ < 1`.
//! The certificate bisects for the largest μ with `λ(μ) ≤ λ_target` and
//! reports the supremal admissible μ (the root of `λ(μ) = 1`) alongside.
//!
//! When a row violates the condition but `ℳ` is an M-matrix, the witness
//! `d = ℳ⁻¹·1` rescales the model into the applicable regime; the decay
//! rate transfers back unchanged and the envelope constant inflates by the
//! coordinate-change factor `max_i d_i / min_i d_i`.

use crate::model::XuWuModel;

use super::{
    build_m, m_matrix_witness, CertMode, Certificate, CertificateKind, CertifyError,
};

const BISECTION_STEPS: usize = 200;

/// Per-row slack `a_i⁻ − Σ_j b_ij⁺·F_j` of the stability condition.
pub fn corollary22_margins(model: &XuWuModel) -> Vec<f64> {
    let n = model.dim();
    (0..n)
        .map(|i| {
            let budget: f64 = (0..n)
                .map(|j| model.weight_sup(i, j) * model.lipschitz(j))
                .sum();
            model.rate_inf(i) - budget
        })
        .collect()
}

/// The closed-form `λ(μ)` above. Errors when μ falls outside `(0, min ν_i)`.
pub fn corollary22_lambda(model: &XuWuModel, mu: f64) -> Result<f64, CertifyError> {
    let nu_min = (0..model.dim()).map(|i| model.nu(i)).fold(f64::INFINITY, f64::min);
    if !(mu > 0.0 && mu < nu_min) {
        return Err(CertifyError::InvalidRate(mu));
    }
    Ok(lambda_closed_form(model, mu))
}

fn lambda_closed_form(model: &XuWuModel, mu: f64) -> f64 {
    let n = model.dim();
    (0..n)
        .map(|i| {
            let nu = model.nu(i);
            let budget: f64 = (0..n)
                .map(|j| model.weight_sup(i, j) * model.lipschitz(j))
                .sum();
            (nu.exp_m1() / (nu - mu).exp_m1()) * budget / model.rate_inf(i)
        })
        .fold(0.0, f64::max)
}

/// Largest μ in `(0, nu_min)` with `λ(μ) ≤ target` (λ is increasing).
fn bisect_rate(model: &XuWuModel, nu_min: f64, target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = nu_min;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || mid >= nu_min {
            break;
        }
        if lambda_closed_form(model, mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Closed-form exponential certificate. Fails cleanly with the offending
/// row and margin when the condition `a_i⁻ > Σ_j b_ij⁺·F_j` is violated.
///
/// The certificate is stamped strict when the model has no delay (the
/// literal products coincide with the exact operator norms there); with
/// delays present it documents the paper-literal bound and is not accepted
/// by the ensemble validator.
pub fn corollary22_certificate(
    model: &XuWuModel,
    lambda_target: f64,
) -> Result<Certificate, CertifyError> {
    if !(lambda_target > 0.0 && lambda_target < 1.0) {
        return Err(CertifyError::InvalidLambdaTarget(lambda_target));
    }
    let margins = corollary22_margins(model);
    if let Some((i, &margin)) = margins.iter().enumerate().find(|(_, &m)| m <= 0.0) {
        return Err(CertifyError::ConditionViolated { i, margin });
    }
    let n = model.dim();
    let nu_min = (0..n).map(|i| model.nu(i)).fold(f64::INFINITY, f64::min);
    // λ(0⁺) = max_i β_i/a_i⁻, the reachable floor
    let floor = (0..n)
        .map(|i| {
            let budget: f64 = (0..n)
                .map(|j| model.weight_sup(i, j) * model.lipschitz(j))
                .sum();
            budget / model.rate_inf(i)
        })
        .fold(0.0, f64::max);
    if floor > lambda_target {
        return Err(CertifyError::LambdaTargetUnreachable {
            floor,
            target: lambda_target,
        });
    }
    let mu = bisect_rate(model, nu_min, lambda_target);
    let mu_supremal = bisect_rate(model, nu_min, 1.0);
    let lambda = lambda_closed_form(model, mu);
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
        mu_supremal: Some(mu_supremal),
        d: None,
        argmax_pair: None,
        converged: true,
        margins,
        norm_overshoot: None,
        scale_factor: None,
    })
}

/// The coordinate change `y_i = x_i/d_i`; see [`XuWuModel::rescaled`].
/// Trajectories correspond exactly: `y_i(m)·d_i = x_i(m)`.
pub fn rescale(model: &XuWuModel, d: &[f64]) -> Result<XuWuModel, CertifyError> {
    Ok(model.rescaled(d)?)
}

/// M-matrix certificate: verify `ℳ`, rescale by the witness, certify the
/// rescaled model with the closed form, and transfer the envelope back.
/// The rate μ is coordinate-free; the constant inflates by
/// `max_i d_i / min_i d_i`.
pub fn corollary23_certificate(
    model: &XuWuModel,
    lambda_target: f64,
) -> Result<Certificate, CertifyError> {
    let m = build_m(model);
    let witness = m_matrix_witness(&m.matrix)?;
    if !witness.is_m_matrix {
        return Err(CertifyError::NotAnMMatrix {
            reason: format!("{:?}", witness.reason),
        });
    }
    let d = witness.d.expect("acceptance carries a witness");
    let rescaled = rescale(model, &d)?;
    let base = corollary22_certificate(&rescaled, lambda_target)?;
    let spread = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / d.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Certificate {
        kind: CertificateKind::Corollary23,
        mode: base.mode,
        lambda: base.lambda,
        mu: base.mu,
        c: base.c * spread,
        mu_supremal: base.mu_supremal,
        d: Some(d),
        argmax_pair: None,
        converged: true,
        margins: base.margins,
        norm_overshoot: None,
        scale_factor: Some(spread),
    })
}
