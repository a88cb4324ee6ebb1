//! Build a small delayed network in code and simulate it.
//!
//! ```text
//! cargo run --example simulate_basic
//! ```

use delaynet::engine::solve_xu_wu;
use delaynet::model::{Activation, HistorySegment, SequenceSpec, XuWuModel};

fn main() {
    // two neurons, cross-coupled through tanh, one delayed step, periodic drive
    let model = XuWuModel::new(
        0.5,
        vec![SequenceSpec::constant(1.0), SequenceSpec::constant(1.4)],
        vec![
            vec![SequenceSpec::constant(0.0), SequenceSpec::constant(0.3)],
            vec![SequenceSpec::constant(-0.2), SequenceSpec::constant(0.0)],
        ],
        vec![
            SequenceSpec::periodic(vec![0.8, -0.8]),
            SequenceSpec::constant(0.2),
        ],
        vec![
            Activation::Tanh { gain: 1.0 },
            Activation::Tanh { gain: 1.0 },
        ],
        SequenceSpec::constant(1.0),
        1,
        None,
    )
    .expect("model is valid");

    let alpha = HistorySegment::from_rows(-1, &[vec![0.5, -0.5], vec![1.0, 0.25]])
        .expect("initial segment is valid");
    let trajectory = solve_xu_wu(&model, 0, &alpha, 40).expect("simulation runs");

    println!("step size h = {}, delay bound τ = {}", model.step_size(), model.delay_bound());
    println!("m      x_1          x_2");
    for m in trajectory.first_index()..=trajectory.end() {
        let x = trajectory.value(m);
        println!("{m:>3}  {:>11.6}  {:>11.6}", x[0], x[1]);
    }
    println!();
    println!("history norm at the end: {:.6}", trajectory.history_norm(trajectory.end()));

    // the same trajectory through the general representation
    let general = model.as_general();
    let other = delaynet::engine::solve(&general, 0, &alpha, 40).expect("simulation runs");
    let mut worst = 0.0_f64;
    for m in 0..=40 {
        for i in 0..2 {
            worst = worst.max((trajectory.value(m)[i] - other.value(m)[i]).abs());
        }
    }
    println!("max deviation between the two representations: {worst:.3e}");
}
