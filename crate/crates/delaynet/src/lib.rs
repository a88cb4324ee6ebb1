//! Simulation and exponential-stability certification for nonautonomous
//! discrete-time Hopfield-type neural networks with bounded delays.
//!
//! The crate covers the full pipeline:
//!
//! * [`model`]: domain types: history segments, coefficient sequences,
//!   activations, the general delayed recurrence and its specialized form,
//!   plus the exact-step discretization of continuous models.
//! * [`engine`]: forward simulation, linear evolution operators with their
//!   cocycle structure, the variation-of-constants reconstruction, and the
//!   weighted-space fixed-point iteration behind the stability theorem.
//! * [`certify`]: contraction coefficients λ (truncated empirical suprema
//!   and closed-form exponential certificates), the M-matrix test with
//!   witness rescaling, and the operator-norm audit.
//! * [`periodic`]: Poincaré-map machinery: periodicity checks, orbit
//!   finding by contraction iteration, and attraction verification.
//! * [`harness`]: model files, seeded ensemble validation of certified
//!   envelopes, parameter sweeps, and the `delaynet` command-line tool.
//!
//! The `examples/` directory contains one runnable walkthrough per
//! capability; `cargo run --example certify_scalar` is a good starting
//! point.

pub mod certify;
pub mod engine;
pub mod harness;
pub mod model;
pub mod periodic;

pub use model::{
    Activation, ContinuousHopfieldSpec, HistorySegment, HopfieldModel, Interaction, SequenceSpec,
    TimeFunction, XuWuModel,
};
