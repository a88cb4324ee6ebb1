//! Domain types for delayed discrete-time Hopfield-type models.
//!
//! The central recurrence is
//!
//! ```text
//! x_i(m+1) = c_i(m)·x_i(m) + Σ_j h_ij(m, x_j(m − τ_ij(m)))
//! ```
//!
//! with multipliers `c_i(m) ∈ (0,1)`, bounded integer delays
//! `0 ≤ τ_ij(m) ≤ τ`, and interactions `h_ij` Lipschitz in the second
//! argument with envelopes `H_ij(m)`. The specialized form used by the
//! certification corollaries is [`XuWuModel`], obtained from a continuous
//! model by exact one-step integration of the frozen-coefficient equation
//! (see [`ContinuousHopfieldSpec::discretize`]).

mod activation;
mod continuous;
mod hopfield;
mod segment;
mod sequence;
mod xu_wu;

pub use activation::Activation;
pub use continuous::{ContinuousHopfieldSpec, ContinuousInteraction, TimeFunction};
pub use hopfield::{HopfieldModel, Interaction};
pub use segment::HistorySegment;
pub use sequence::{SequenceSpec, MAX_ZIP_CYCLE};
pub use xu_wu::{scalar_model, XuWuModel, DEFAULT_RATE_FLOOR};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("empty {0} sequence")]
    EmptySequence(&'static str),
    #[error("invalid activation: {0}")]
    InvalidActivation(&'static str),
    #[error("invalid history segment: {0}")]
    InvalidSegment(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("multiplier c_{i}({m}) = {value} outside (0, 1)")]
    MultiplierRange { i: usize, m: i64, value: f64 },
    #[error("rate a_{i} has infimum {inf}, below the floor {floor}")]
    RateFloor { i: usize, inf: f64, floor: f64 },
    #[error("delay sequence value {value} at m = {m} is not an integer in [0, {bound}]")]
    DelayRange { m: i64, value: f64, bound: u32 },
    #[error("negative rate: {0}")]
    NegativeRate(f64),
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("envelope H_{i}{j}({m}) = {value} is negative")]
    NegativeEnvelope {
        i: usize,
        j: usize,
        m: i64,
        value: f64,
    },
    #[error("continuous rate a_{i}({t}) = {value} is negative")]
    NegativeContinuousRate { i: usize, t: f64, value: f64 },
    #[error("probe grid is degenerate: {0}")]
    DegenerateGrid(&'static str),
}

/// `θ(a, h) = (1 − e^{−a·h})/a`, the exact one-step input weight of the
/// frozen-coefficient integration; continued by its limit `h` at `a = 0`.
///
/// Strictly decreasing in `a` for fixed `h`, with range `(0, h]`.
pub fn theta(a: f64, h: f64) -> Result<f64, ModelError> {
    if !a.is_finite() || a < 0.0 {
        return Err(ModelError::NegativeRate(a));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(ModelError::NonPositiveStep(h));
    }
    if a == 0.0 {
        return Ok(h);
    }
    // exp_m1 keeps full precision for small a·h
    Ok(-(-a * h).exp_m1() / a)
}

/// Probe grid for [`lipschitz_probe`]: `u_count` equispaced points in
/// `[u_min, u_max]` crossed with explicit time indices.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub u_count: usize,
    pub times: Vec<i64>,
}

impl ProbeGrid {
    pub fn new(u_min: f64, u_max: f64, u_count: usize, times: Vec<i64>) -> Result<Self, ModelError> {
        if u_count < 2 || u_min >= u_max {
            return Err(ModelError::DegenerateGrid("need ≥ 2 distinct u points"));
        }
        if times.is_empty() {
            return Err(ModelError::DegenerateGrid("need ≥ 1 time point"));
        }
        Ok(ProbeGrid {
            u_min,
            u_max,
            u_count,
            times,
        })
    }

    fn u_points(&self) -> Vec<f64> {
        let step = (self.u_max - self.u_min) / (self.u_count - 1) as f64;
        (0..self.u_count).map(|k| self.u_min + k as f64 * step).collect()
    }
}

/// Outcome of a Lipschitz envelope probe. A failed probe is a report, not
/// an error: the envelope hypothesis is data to be checked, and violations
/// carry the witness pair.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LipschitzReport {
    pub pass: bool,
    /// Worst observed `|f(m,u) − f(m,v)| / (H(m)·|u − v|)`; infinite when a
    /// zero envelope meets a non-constant function.
    pub worst_ratio: f64,
    pub first_violation: Option<LipschitzViolation>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LipschitzViolation {
    pub m: i64,
    pub u: f64,
    pub v: f64,
    pub ratio: f64,
}

/// Check `|f(m,u) − f(m,v)| ≤ envelope(m)·|u − v|` over all grid pairs.
pub fn lipschitz_probe(
    f: impl Fn(i64, f64) -> f64,
    envelope: &SequenceSpec,
    grid: &ProbeGrid,
) -> LipschitzReport {
    let us = grid.u_points();
    let mut worst = 0.0_f64;
    let mut first_violation = None;
    for &m in &grid.times {
        let bound = envelope.eval(m);
        for (a, &u) in us.iter().enumerate() {
            for &v in &us[a + 1..] {
                let diff = (f(m, u) - f(m, v)).abs();
                let ratio = if diff == 0.0 {
                    0.0
                } else {
                    diff / (bound * (u - v).abs())
                };
                if ratio > worst {
                    worst = ratio;
                }
                if ratio > 1.0 && first_violation.is_none() {
                    first_violation = Some(LipschitzViolation { m, u, v, ratio });
                }
            }
        }
    }
    LipschitzReport {
        pass: first_violation.is_none(),
        worst_ratio: worst,
        first_violation,
    }
}
