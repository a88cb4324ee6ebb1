//! Periodic orbits of ω-periodic models via Poincaré-map contraction.
//!
//! For an ω-periodic model the map `P(ᾱ) = x̄_{n+ω}(·, n, ᾱ)` advances
//! history segments by one period. A strict exponential certificate makes
//! some power `P^k` a contraction (`C·e^{−μkω} < 1`), so `P` has a unique
//! fixed point φ̄ whose trajectory is the globally attracting ω-periodic
//! solution. Iterating `P` itself converges to the same limit with fewer
//! wasted steps; the power `k` only sizes the worst-case iteration budget.

use serde::Serialize;
use thiserror::Error;

use rayon::prelude::*;

use crate::certify::{CertMode, Certificate, CertifyError};
use crate::engine::{solve_xu_wu, EngineError};
use crate::harness::rng::{random_segment, rng_from, seed_for};
use crate::model::{HistorySegment, XuWuModel};

#[derive(Debug, Error)]
pub enum PeriodicError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("model is not {omega}-periodic: {field} differs at m = {m} ({value} vs {shifted})")]
    NotPeriodic {
        omega: u32,
        field: String,
        m: i64,
        value: f64,
        shifted: f64,
    },
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("decay rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("orbit finding requires a strict-mode certificate (got paper mode)")]
    PaperModeCertificate,
    #[error("orbit iteration did not reach tolerance {tol} within {max_iter} iterations (residual {residual})")]
    MaxIterExceeded {
        tol: f64,
        max_iter: usize,
        residual: f64,
    },
}

/// First mismatch found when checking ω-periodicity of the coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityMismatch {
    pub field: String,
    pub m: i64,
    pub value: f64,
    pub shifted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityReport {
    pub omega: u32,
    pub periodic: bool,
    pub first_mismatch: Option<PeriodicityMismatch>,
}

/// Verify `a_i(m+ω) = a_i(m)`, `b_ij(m+ω) = b_ij(m)`, `I_i(m+ω) = I_i(m)`
/// and `τ(m+ω) = τ(m)`. The scan over one declared prefix plus one cycle
/// per sequence is exact for this sequence class.
pub fn check_periodicity(model: &XuWuModel, omega: u32) -> Result<PeriodicityReport, PeriodicError> {
    if omega == 0 {
        return Err(PeriodicError::ZeroPeriod);
    }
    let mut first_mismatch = None;
    let mut consider = |name: String, spec: &crate::model::SequenceSpec| {
        if first_mismatch.is_none() {
            if let Some((m, value, shifted)) = spec.periodicity_defect(omega) {
                first_mismatch = Some(PeriodicityMismatch {
                    field: name,
                    m,
                    value,
                    shifted,
                });
            }
        }
    };
    let n = model.dim();
    for i in 0..n {
        consider(format!("a[{i}]"), model.rate_spec(i));
    }
    for i in 0..n {
        for j in 0..n {
            consider(format!("b[{i}][{j}]"), model.weight_spec(i, j));
        }
    }
    for i in 0..n {
        consider(format!("I[{i}]"), model.input_spec(i));
    }
    consider("tau".to_owned(), model.delay_spec());
    Ok(PeriodicityReport {
        omega,
        periodic: first_mismatch.is_none(),
        first_mismatch,
    })
}

fn require_periodic(model: &XuWuModel, omega: u32) -> Result<(), PeriodicError> {
    let report = check_periodicity(model, omega)?;
    match report.first_mismatch {
        None => Ok(()),
        Some(mismatch) => Err(PeriodicError::NotPeriodic {
            omega,
            field: mismatch.field,
            m: mismatch.m,
            value: mismatch.value,
            shifted: mismatch.shifted,
        }),
    }
}

/// The Poincaré map `P(ᾱ) = x̄_{n+ω}(·, n, ᾱ)` by exact simulation of ω
/// steps. Errors when the model is not ω-periodic.
pub fn poincare(
    model: &XuWuModel,
    n: i64,
    omega: u32,
    alpha: &HistorySegment,
) -> Result<HistorySegment, PeriodicError> {
    require_periodic(model, omega)?;
    poincare_unchecked(model, n, omega, alpha)
}

/// Smallest `k ∈ ℕ` with `C·e^{−μkω} < 1` strictly.
pub fn choose_k(c: f64, mu: f64, omega: u32) -> Result<u32, PeriodicError> {
    if !(mu > 0.0) {
        return Err(PeriodicError::NonPositiveRate(mu));
    }
    assert!(c > 1.0, "overshoot constant must exceed 1");
    assert!(omega >= 1, "period must be at least 1");
    let mut k = (c.ln() / (mu * f64::from(omega))).floor() as u32 + 1;
    // strict inequality at the boundary
    while c * (-mu * f64::from(k) * f64::from(omega)).exp() >= 1.0 {
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbitResult {
    /// Fixed point of the Poincaré map.
    pub phi: HistorySegment,
    /// `‖P(φ) − φ‖` at termination.
    pub residual: f64,
    pub omega: u32,
    /// Poincaré iterations performed.
    pub iterations: usize,
    /// Decay rate of the certificate that established contraction.
    pub mu: f64,
    /// Envelope constant of that certificate.
    pub c: f64,
    /// Contraction power `k` with `C·e^{−μkω} < 1`.
    pub k: u32,
    /// Worst `‖x̄(m+ω) − x̄(m)‖` over a five-period verification window.
    pub shift_defect: f64,
}

/// Find the ω-periodic solution by iterating `P` from the zero segment
/// until `‖P(ᾱ_j) − ᾱ_j‖ ≤ tol`.
///
/// Requires a strict-mode certificate; `max_iter` defaults to the budget
/// implied by the certified contraction of `P^k` plus a safety margin.
pub fn find_periodic(
    model: &XuWuModel,
    n: i64,
    omega: u32,
    certificate: &Certificate,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<PeriodicOrbitResult, PeriodicError> {
    if certificate.mode != CertMode::Strict {
        return Err(PeriodicError::PaperModeCertificate);
    }
    require_periodic(model, omega)?;
    let k = choose_k(certificate.c.max(1.0 + 1e-12), certificate.mu, omega)?;

    let mut alpha = HistorySegment::zeros(model.dim(), model.r());
    let mut image = poincare_unchecked(model, n, omega, &alpha)?;
    let mut residual = image.sup_distance(&alpha);
    let max_iter = max_iter.unwrap_or_else(|| {
        // per-k-block contraction C·e^{−μkω}: bound the blocks needed to
        // push the initial residual below tol, with headroom
        let scale = (residual / tol).max(std::f64::consts::E);
        let budget =
            (scale.ln() / (certificate.mu * f64::from(omega))).ceil() as usize + k as usize;
        k as usize * (budget / k as usize + 2) + 16
    });
    let mut iterations = 1;
    while residual > tol {
        if iterations >= max_iter {
            return Err(PeriodicError::MaxIterExceeded {
                tol,
                max_iter,
                residual,
            });
        }
        alpha = image;
        image = poincare_unchecked(model, n, omega, &alpha)?;
        residual = image.sup_distance(&alpha);
        iterations += 1;
    }
    let phi = image;

    // the extended trajectory of φ must be ω-periodic up to the residual
    let window = 5 * i64::from(omega);
    let horizon = n + window + i64::from(omega);
    let extended = solve_xu_wu(model, n, &phi, horizon)?;
    let mut shift_defect = 0.0_f64;
    for m in n..=n + window {
        let now = extended.value(m);
        let later = extended.value(m + i64::from(omega));
        for i in 0..model.dim() {
            shift_defect = shift_defect.max((later[i] - now[i]).abs());
        }
    }

    Ok(PeriodicOrbitResult {
        phi,
        residual,
        omega,
        iterations,
        mu: certificate.mu,
        c: certificate.c,
        k,
        shift_defect,
    })
}

/// `poincare` without re-checking periodicity on every iteration.
fn poincare_unchecked(
    model: &XuWuModel,
    n: i64,
    omega: u32,
    alpha: &HistorySegment,
) -> Result<HistorySegment, PeriodicError> {
    let trajectory = solve_xu_wu(model, n, alpha, n + i64::from(omega))?;
    Ok(trajectory.history_at(n + i64::from(omega))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractionTrial {
    pub trial: usize,
    /// `max_m ‖x̄_m − φ̄_m‖ / (C·e^{−μ(m−n)}·‖ᾱ − φ̄‖)`.
    pub worst_ratio: f64,
    pub worst_index: i64,
    /// Largest per-step distance ratio over the tail half of the horizon.
    pub tail_step_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractionReport {
    pub trials: usize,
    pub horizon: i64,
    pub seed: u64,
    /// Whether the certified envelope was asserted (strict certificate
    /// present). Without one the report is measurement-only.
    pub asserted: bool,
    pub envelope_ok: Option<bool>,
    pub worst_ratio: f64,
    pub worst_trial: Option<usize>,
    /// Max over trials of the tail per-step contraction ratio.
    pub tail_step_ratio: f64,
    /// Per-period ratios `‖x̄_{n+(j+1)ω} − φ‖/‖x̄_{n+jω} − φ‖` of the worst
    /// trial.
    pub per_period_ratios: Vec<f64>,
    pub per_trial: Vec<AttractionTrial>,
}

/// Simulate seeded random initial segments and measure their convergence
/// to the orbit: per-period contraction ratios and, when a strict
/// certificate is supplied, the geometric envelope
/// `‖x̄_m − φ̄_m‖ ≤ C·e^{−μ(m−n)}·‖ᾱ − φ̄‖` at every index.
#[allow(clippy::too_many_arguments)]
pub fn verify_attraction(
    model: &XuWuModel,
    n: i64,
    omega: u32,
    phi: &HistorySegment,
    certificate: Option<&Certificate>,
    trials: usize,
    horizon: i64,
    box_bound: f64,
    seed: u64,
) -> Result<AttractionReport, PeriodicError> {
    require_periodic(model, omega)?;
    let asserted = matches!(certificate, Some(c) if c.mode == CertMode::Strict);
    let envelope = certificate.filter(|c| c.mode == CertMode::Strict);
    let reference = solve_xu_wu(model, n, phi, n + horizon)?;

    let results: Vec<AttractionTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_from(seed_for(seed, trial as u64));
            let alpha = random_segment(&mut rng, model.dim(), model.r(), box_bound);
            let trajectory =
                solve_xu_wu(model, n, &alpha, n + horizon).expect("valid inputs simulate");
            let initial = alpha.sup_distance(phi);
            let mut worst_ratio = 0.0_f64;
            let mut worst_index = n;
            let mut tail_step_ratio = 0.0_f64;
            let mut previous_distance = f64::NAN;
            for m in n..=n + horizon {
                let distance = trajectory.history_distance(&reference, m);
                let floor = crate::harness::noise_floor(
                    trajectory.history_norm(m).max(reference.history_norm(m)),
                );
                if envelope.is_some() && initial > 0.0 && distance > floor {
                    let cert = envelope.expect("checked above");
                    let allowed = cert.envelope(m, n) * initial;
                    let ratio = distance / allowed;
                    if ratio > worst_ratio {
                        worst_ratio = ratio;
                        worst_index = m;
                    }
                }
                if m >= n + horizon / 2 {
                    let value_now = point_distance(&trajectory, &reference, m);
                    if previous_distance > floor && value_now > floor {
                        tail_step_ratio = tail_step_ratio.max(value_now / previous_distance);
                    }
                    previous_distance = value_now;
                }
            }
            AttractionTrial {
                trial,
                worst_ratio,
                worst_index,
                tail_step_ratio,
            }
        })
        .collect();

    let mut worst_ratio = 0.0_f64;
    let mut worst_trial = None;
    let mut tail_step_ratio = 0.0_f64;
    for t in &results {
        if t.worst_ratio > worst_ratio {
            worst_ratio = t.worst_ratio;
            worst_trial = Some(t.trial);
        }
        tail_step_ratio = tail_step_ratio.max(t.tail_step_ratio);
    }

    // per-period ratios of the worst trial (or trial 0 without an envelope)
    let focus = worst_trial.unwrap_or(0);
    let per_period_ratios = {
        let mut rng = rng_from(seed_for(seed, focus as u64));
        let alpha = random_segment(&mut rng, model.dim(), model.r(), box_bound);
        let trajectory = solve_xu_wu(model, n, &alpha, n + horizon)?;
        let mut ratios = Vec::new();
        let mut j = 0u32;
        loop {
            let here = n + i64::from(omega) * i64::from(j);
            let next = here + i64::from(omega);
            if next > n + horizon {
                break;
            }
            let d_here = trajectory.history_distance(&reference, here);
            let d_next = trajectory.history_distance(&reference, next);
            if d_here > 1e-200 {
                ratios.push(d_next / d_here);
            }
            j += 1;
        }
        ratios
    };

    Ok(AttractionReport {
        trials,
        horizon,
        seed,
        asserted,
        envelope_ok: if asserted { Some(worst_ratio <= 1.0) } else { None },
        worst_ratio,
        worst_trial,
        tail_step_ratio,
        per_period_ratios,
        per_trial: results,
    })
}

fn point_distance(a: &crate::engine::Trajectory, b: &crate::engine::Trajectory, m: i64) -> f64 {
    a.value(m)
        .iter()
        .zip(b.value(m))
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}
