//! Certify a delayed model strictly and validate the claimed envelope
//! against a seeded trajectory ensemble; then falsify the certificate and
//! watch the validator catch it.
//!
//! ```text
//! cargo run --example validate_envelope
//! ```

use std::sync::Arc;

use delaynet::certify::{empirical_certificate, CertMode};
use delaynet::harness::{run_validate, DiscreteModel};
use delaynet::model::{scalar_model, Activation};

fn main() {
    // scalar model with a two-step delay: the strict certificate accounts
    // for the history persistence that the literal product bound misses
    let model = scalar_model(0.25, 0.0, Activation::Tanh { gain: 1.0 }, 2);
    let cert = empirical_certificate(&model.as_general(), CertMode::Strict, 0.9, 400)
        .expect("certifiable");
    println!(
        "strict certificate: λ = {:.6}, μ = {:.6}, C = {:.4}, norm overshoot = {:.4}",
        cert.lambda,
        cert.mu,
        cert.c,
        cert.norm_overshoot.unwrap()
    );

    let discrete = DiscreteModel::XuWu(Arc::new(model));
    let report = run_validate(&discrete, &cert, 0, 500, 300, 1.0, 2024).expect("validation runs");
    println!(
        "validation: pass = {}, worst ratio = {:.6} (trial {:?}, index {})",
        report.pass, report.global_max, report.worst_trial, report.worst_index
    );

    // inflate the claimed decay rate by 20%: the envelope now undercuts the
    // true contraction and the ensemble finds the violation
    let mut forged = cert.clone();
    forged.mu *= 1.2;
    let report = run_validate(&discrete, &forged, 0, 500, 300, 1.0, 2024).expect("validation runs");
    println!(
        "forged rate μ×1.2: pass = {}, worst ratio = {:.3} (trial {:?}, index {})",
        report.pass, report.global_max, report.worst_trial, report.worst_index
    );
}
