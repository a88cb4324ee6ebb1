//! Ensemble validation of certified envelopes.
//!
//! The certified bound quantifies over all pairs of initial segments; the
//! desk-scale surrogate draws seeded random pairs, simulates both, and
//! checks the envelope at every index of the horizon. A pass therefore
//! certifies the sampled ensemble, not the theorem; reports carry the
//! seeds so any trial can be replayed.

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{CertMode, Certificate};

use super::model_file::DiscreteModel;
use super::rng::{random_segment, rng_from, seed_for};
use super::HarnessError;

/// Distances at or below this many ulps of the local trajectory magnitude
/// count as converged. Once two trajectories contract to within rounding
/// noise of each other their distance stalls at a few ulps instead of
/// decaying further, which would otherwise dominate the envelope ratio at
/// late indices with pure round-off.
pub(crate) const NOISE_FLOOR_ULPS: f64 = 64.0;

pub(crate) fn noise_floor(scale: f64) -> f64 {
    NOISE_FLOOR_ULPS * f64::EPSILON * scale.max(1e-300)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationTrial {
    pub trial: usize,
    /// `max_m ‖x̄_m(ᾱ) − x̄_m(ᾱ*)‖ / (C·e^{−μ(m−n)}·‖ᾱ − ᾱ*‖)`.
    pub worst_ratio: f64,
    pub worst_index: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub certificate: Certificate,
    pub trials: usize,
    pub horizon: i64,
    pub seed: u64,
    pub box_bound: f64,
    pub per_trial_worst: Vec<f64>,
    pub global_max: f64,
    pub worst_trial: Option<usize>,
    pub worst_index: i64,
    pub pass: bool,
}

/// Draw `trials` random pairs (ᾱ, ᾱ*), simulate both to `n + horizon`, and
/// evaluate the envelope ratio at every index. Pass iff no ratio exceeds 1.
///
/// Paper-mode certificates are refused: the exact history-space operator
/// norms exceed the literal product bounds at gaps up to the delay bound,
/// so the paper-literal envelope is not a sound claim to validate against.
pub fn run_validate(
    model: &DiscreteModel,
    certificate: &Certificate,
    n: i64,
    trials: usize,
    horizon: i64,
    box_bound: f64,
    seed: u64,
) -> Result<ValidationReport, HarnessError> {
    if certificate.mode != CertMode::Strict {
        return Err(HarnessError::PaperModeCertificate);
    }
    let results: Vec<ValidationTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<ValidationTrial, HarnessError> {
            let mut rng = rng_from(seed_for(seed, trial as u64));
            let alpha = random_segment(&mut rng, model.dim(), model.r(), box_bound);
            let alpha_star = random_segment(&mut rng, model.dim(), model.r(), box_bound);
            let initial = alpha.sup_distance(&alpha_star);
            let mut worst_ratio = 0.0_f64;
            let mut worst_index = n;
            if initial > 0.0 {
                let x = model.solve(n, &alpha, n + horizon)?;
                let x_star = model.solve(n, &alpha_star, n + horizon)?;
                for m in n..=n + horizon {
                    let distance = x.history_distance(&x_star, m);
                    if distance <= noise_floor(x.history_norm(m).max(x_star.history_norm(m))) {
                        continue;
                    }
                    let allowed = certificate.envelope(m, n) * initial;
                    let ratio = distance / allowed;
                    if ratio > worst_ratio {
                        worst_ratio = ratio;
                        worst_index = m;
                    }
                }
            }
            Ok(ValidationTrial {
                trial,
                worst_ratio,
                worst_index,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut global_max = 0.0_f64;
    let mut worst_trial = None;
    let mut worst_index = n;
    for t in &results {
        if t.worst_ratio > global_max {
            global_max = t.worst_ratio;
            worst_trial = Some(t.trial);
            worst_index = t.worst_index;
        }
    }
    Ok(ValidationReport {
        certificate: certificate.clone(),
        trials,
        horizon,
        seed,
        box_bound,
        per_trial_worst: results.iter().map(|t| t.worst_ratio).collect(),
        global_max,
        worst_trial,
        worst_index,
        pass: global_max <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{corollary22_certificate, empirical_certificate};
    use crate::model::{scalar_model, Activation};
    use std::sync::Arc;

    fn scalar_discrete(delay: u32) -> DiscreteModel {
        DiscreteModel::XuWu(Arc::new(scalar_model(
            0.3,
            0.0,
            Activation::Tanh { gain: 1.0 },
            delay,
        )))
    }

    #[test]
    fn identical_segments_pass_trivially() {
        // box 0 forces α = α*; all distances are zero
        let model = scalar_discrete(0);
        let cert = corollary22_certificate(model.as_xu_wu().unwrap(), 0.9).unwrap();
        let report = run_validate(&model, &cert, 0, 8, 50, 0.0, 3).unwrap();
        assert!(report.pass);
        assert_eq!(report.global_max, 0.0);
    }

    #[test]
    fn certified_scalar_model_passes() {
        let model = scalar_discrete(0);
        let cert = corollary22_certificate(model.as_xu_wu().unwrap(), 0.99).unwrap();
        let report = run_validate(&model, &cert, 0, 64, 200, 1.0, 40).unwrap();
        assert!(report.pass, "max ratio {}", report.global_max);
    }

    #[test]
    fn inflated_rate_is_caught() {
        let model = scalar_discrete(0);
        let mut cert = corollary22_certificate(model.as_xu_wu().unwrap(), 0.99).unwrap();
        cert.mu *= 1.2;
        let report = run_validate(&model, &cert, 0, 64, 300, 1.0, 40).unwrap();
        assert!(!report.pass);
        assert!(report.global_max > 1.0);
    }

    #[test]
    fn paper_mode_is_refused() {
        let model = scalar_discrete(2);
        let cert = corollary22_certificate(model.as_xu_wu().unwrap(), 0.9).unwrap();
        assert!(matches!(
            run_validate(&model, &cert, 0, 4, 50, 1.0, 1),
            Err(HarnessError::PaperModeCertificate)
        ));
    }

    #[test]
    fn strict_certificate_with_delay_passes() {
        let model = scalar_discrete(2);
        let cert = empirical_certificate(
            &model.as_xu_wu().unwrap().as_general(),
            CertMode::Strict,
            0.9,
            300,
        )
        .unwrap();
        let report = run_validate(&model, &cert, 0, 64, 200, 1.0, 9).unwrap();
        assert!(report.pass, "max ratio {}", report.global_max);
    }
}
