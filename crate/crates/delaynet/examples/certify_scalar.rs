//! The closed-form exponential certificate on the scalar reference model
//! (a ≡ 1, h = 1, b = 0.3, F = 1).
//!
//! ```text
//! cargo run --example certify_scalar
//! ```

use delaynet::certify::{
    corollary22_certificate, corollary22_lambda, corollary22_margins, lambda_empirical, CertMode,
    RateBound,
};
use delaynet::model::{scalar_model, Activation};

fn main() {
    let model = scalar_model(0.3, 0.0, Activation::Identity, 0);

    let margins = corollary22_margins(&model);
    println!("row condition margins a_i⁻ − Σ_j b_ij⁺·F_j: {margins:?}");

    println!();
    println!("λ(μ) along the admissible rate interval (0, ν):");
    for k in 1..=9 {
        let mu = 0.584 * k as f64 / 9.0;
        let lambda = corollary22_lambda(&model, mu).expect("admissible rate");
        println!("  μ = {mu:.4}   λ(μ) = {lambda:.6}   C = {:.4}", 1.0 / (1.0 - lambda));
    }

    let cert = corollary22_certificate(&model, 0.99).expect("certifiable");
    println!();
    println!("certificate at λ target 0.99:");
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());

    // the truncated empirical supremum agrees with the closed form
    let empirical = lambda_empirical(
        &model.as_general(),
        &RateBound::exponential(0.3),
        500,
        CertMode::Paper,
    );
    let closed = corollary22_lambda(&model, 0.3).unwrap();
    println!();
    println!("cross-check at μ = 0.3:");
    println!("  closed form      λ = {closed:.12}");
    println!("  truncated sup    λ̂ = {:.12} (converged: {})", empirical.lambda, empirical.converged_tail);
}
