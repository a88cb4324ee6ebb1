//! Certify a model whose rows violate the plain stability condition by
//! verifying the M-matrix property and rescaling along its witness.
//!
//! ```text
//! cargo run --example m_matrix_transfer
//! ```

use std::sync::Arc;

use delaynet::certify::{
    build_m, corollary22_certificate, corollary23_certificate, m_matrix_witness,
};
use delaynet::harness::{run_validate, DiscreteModel};
use delaynet::model::{Activation, SequenceSpec, XuWuModel};

fn main() {
    // row 0 carries more coupling than its own rate (0.2 + 0.9 > 1), so the
    // row-wise condition fails; the off-diagonal structure still admits a
    // certificate through ℳ
    let model = XuWuModel::new(
        1.0,
        vec![SequenceSpec::constant(1.0), SequenceSpec::constant(3.0)],
        vec![
            vec![SequenceSpec::constant(0.2), SequenceSpec::constant(-0.9)],
            vec![SequenceSpec::constant(0.5), SequenceSpec::constant(0.5)],
        ],
        vec![SequenceSpec::constant(0.5), SequenceSpec::constant(-0.25)],
        vec![Activation::Tanh { gain: 1.0 }, Activation::Tanh { gain: 1.0 }],
        SequenceSpec::constant(0.0),
        0,
        None,
    )
    .expect("model is valid");

    match corollary22_certificate(&model, 0.99) {
        Err(err) => println!("row-wise condition: {err}"),
        Ok(_) => unreachable!("row 0 violates the condition"),
    }

    let m = build_m(&model);
    println!();
    println!("ℳ = {}", m.matrix);
    let witness = m_matrix_witness(&m.matrix).expect("verdicts agree");
    println!("M-matrix: {} (witness d = {:?})", witness.is_m_matrix, witness.d);
    let spectral = witness.spectral.as_ref().unwrap();
    println!("spectral cross-check: ρ(B) = {:.6} < shift {:.6}", spectral.rho, spectral.shift);

    let cert = corollary23_certificate(&model, 0.99).expect("transfer certifies");
    println!();
    println!(
        "transferred certificate: λ = {:.6}, μ = {:.6}, C = {:.4} (×{:.4} from the coordinate change)",
        cert.lambda,
        cert.mu,
        cert.c,
        cert.scale_factor.unwrap()
    );

    // the envelope holds in the original coordinates
    let discrete = DiscreteModel::XuWu(Arc::new(model));
    let report = run_validate(&discrete, &cert, 0, 300, 200, 1.0, 11).expect("validation runs");
    println!(
        "ensemble validation: pass = {}, worst ratio = {:.6} over {} trials",
        report.pass, report.global_max, report.trials
    );
}
