//! Find the globally attracting periodic solution of a periodically forced
//! model by iterating the Poincaré map, and verify the attraction rate.
//!
//! ```text
//! cargo run --example periodic_orbit
//! ```

use delaynet::certify::{empirical_certificate, CertMode};
use delaynet::model::{Activation, SequenceSpec, XuWuModel};
use delaynet::periodic::{check_periodicity, choose_k, find_periodic, verify_attraction};

fn main() {
    // scalar neuron, 2-periodic drive alternating between 1 and 2
    let model = XuWuModel::new(
        1.0,
        vec![SequenceSpec::constant(1.0)],
        vec![vec![SequenceSpec::constant(0.0)]],
        vec![SequenceSpec::periodic(vec![1.0, 2.0])],
        vec![Activation::Identity],
        SequenceSpec::constant(0.0),
        0,
        None,
    )
    .expect("model is valid");
    let omega = 2;

    let periodicity = check_periodicity(&model, omega).expect("valid period");
    println!("coefficients {omega}-periodic: {}", periodicity.periodic);

    let cert = empirical_certificate(&model.as_general(), CertMode::Strict, 0.9, 300)
        .expect("certifiable");
    let k = choose_k(cert.c.max(1.0 + 1e-12), cert.mu, omega).unwrap();
    println!(
        "certificate: μ = {:.6}, C = {:.4}; P^{k} is a contraction (C·e^(−μkω) < 1)",
        cert.mu, cert.c
    );

    let orbit = find_periodic(&model, 0, omega, &cert, 1e-12, None).expect("orbit found");
    println!();
    println!(
        "fixed point of P after {} iterations: φ = {:?} (residual {:.3e})",
        orbit.iterations,
        orbit.phi.to_rows(),
        orbit.residual
    );
    println!("shift defect over five periods: {:.3e}", orbit.shift_defect);

    // analytic comparison: the orbit solves a 2×2 linear system
    let c = (-1.0_f64).exp();
    let theta = 1.0 - c;
    let phi0 = theta * (2.0 + c) / (1.0 - c * c);
    println!("linear-solve value:  φ(0) = {phi0:.12}");
    println!("iterated value:      φ(0) = {:.12}", orbit.phi.get(0, 0));

    let report = verify_attraction(&model, 0, omega, &orbit.phi, Some(&cert), 100, 200, 1.0, 5)
        .expect("attraction runs");
    println!();
    println!(
        "attraction over {} random starts: envelope ok = {:?}, worst ratio = {:.6}",
        report.trials, report.envelope_ok, report.worst_ratio
    );
    println!(
        "tail per-step contraction {:.6} vs certified e^(−μ) = {:.6}",
        report.tail_step_ratio,
        (-cert.mu).exp()
    );
    println!("per-period ratios of the worst trial: {:?}", report.per_period_ratios);
}
