//! Discretize a continuous-time model by exact one-step integration of the
//! frozen-coefficient equation and check the result against the closed
//! form for a pure decay.
//!
//! ```text
//! cargo run --example discretize_continuous
//! ```

use delaynet::engine::solve;
use delaynet::model::{
    ContinuousHopfieldSpec, ContinuousInteraction, HistorySegment, TimeFunction,
};

fn main() {
    // x'(t) = −a·x(t) with a ≡ 1.5: the discretization must reproduce
    // x(mh) = e^{−a·h·m}·x(0) exactly, not merely to O(h)
    let a = 1.5;
    let h = 0.25;
    let spec = ContinuousHopfieldSpec::new(
        vec![TimeFunction::constant(a)],
        vec![vec![ContinuousInteraction::zero()]],
        vec![vec![TimeFunction::constant(0.0)]],
        0.0,
    )
    .expect("continuous spec is valid");
    let model = spec.discretize(h, 128).expect("discretization succeeds");

    let alpha = HistorySegment::from_rows(0, &[vec![1.0]]).expect("segment");
    let trajectory = solve(&model, 0, &alpha, 64).expect("simulation runs");
    let mut worst = 0.0_f64;
    for m in 0..=64i64 {
        let exact = (-a * h * m as f64).exp();
        worst = worst.max((trajectory.value(m)[0] - exact).abs());
    }
    println!("pure decay, a = {a}, h = {h}");
    println!("  max |x(m) − e^(−a·h·m)| over 64 steps: {worst:.3e}");

    // time-varying rates and a delayed interaction tabulate at t = m·h
    let spec = ContinuousHopfieldSpec::new(
        vec![TimeFunction::Sinusoid {
            offset: 1.2,
            amplitude: 0.4,
            angular_frequency: 0.6,
            phase: 0.0,
        }],
        vec![vec![ContinuousInteraction {
            activation: delaynet::model::Activation::Tanh { gain: 1.0 },
            gain: TimeFunction::constant(0.2),
            offset: TimeFunction::constant(0.0),
        }]],
        vec![vec![TimeFunction::constant(0.9)]],
        0.9,
    )
    .expect("continuous spec is valid");
    let model = spec.discretize(0.25, 128).expect("discretization succeeds");
    println!();
    println!("time-varying rate, delayed self-coupling, h = 0.25:");
    println!("  delay bound τ = ⌊0.9/0.25⌋ = {}", model.delay_bound());
    for m in [0i64, 1, 2, 10] {
        println!(
            "  c(({m})) = {:.6}   H({m}) = {:.6}",
            model.coefficient(0, m),
            model.envelope(0, 0, m)
        );
    }
}
