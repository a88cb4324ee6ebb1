//! Scalar activation functions with machine-readable Lipschitz constants.
//!
//! The certificates downstream only consume the constant `F` with
//! `|f(u) − f(v)| ≤ F·|u − v|`, so the catalog is closed: every member
//! carries its constant by construction, and tabulated functions declare
//! theirs explicitly (validated by probing, see
//! [`lipschitz_probe`](super::lipschitz_probe)).

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Activation {
    /// `u ↦ gain · tanh(u)`, Lipschitz constant `gain`.
    Tanh { gain: f64 },
    /// `u ↦ slope · clamp(u, −cap, cap)`: linear with saturation at `±cap`,
    /// Lipschitz constant `slope`.
    PiecewiseLinear { slope: f64, cap: f64 },
    /// `u ↦ u`, Lipschitz constant 1.
    Identity,
    /// Piecewise-linear interpolation of `(u, f(u))` samples with constant
    /// extension outside the sampled range and a declared constant.
    Tabulated {
        points: Vec<[f64; 2]>,
        lipschitz: f64,
    },
    /// `u ↦ inner(scale · u)`, Lipschitz constant `scale · F_inner`.
    /// Produced by coordinate rescaling.
    InputScaled { scale: f64, inner: Box<Activation> },
}

impl Activation {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Activation::Tanh { gain } => gain * u.tanh(),
            Activation::PiecewiseLinear { slope, cap } => slope * u.clamp(-cap, *cap),
            Activation::Identity => u,
            Activation::Tabulated { points, .. } => eval_table(points, u),
            Activation::InputScaled { scale, inner } => inner.eval(scale * u),
        }
    }

    /// The declared Lipschitz constant `F`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Activation::Tanh { gain } => gain.abs(),
            Activation::PiecewiseLinear { slope, .. } => slope.abs(),
            Activation::Identity => 1.0,
            Activation::Tabulated { lipschitz, .. } => *lipschitz,
            Activation::InputScaled { scale, inner } => scale.abs() * inner.lipschitz(),
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        match self {
            Activation::Tanh { gain } => {
                if !gain.is_finite() || *gain <= 0.0 {
                    return Err(ModelError::InvalidActivation("tanh gain must be positive"));
                }
            }
            Activation::PiecewiseLinear { slope, cap } => {
                if !slope.is_finite() || *slope <= 0.0 {
                    return Err(ModelError::InvalidActivation(
                        "piecewise-linear slope must be positive",
                    ));
                }
                if !cap.is_finite() || *cap <= 0.0 {
                    return Err(ModelError::InvalidActivation(
                        "piecewise-linear cap must be positive",
                    ));
                }
            }
            Activation::Identity => {}
            Activation::Tabulated { points, lipschitz } => {
                if points.len() < 2 {
                    return Err(ModelError::InvalidActivation(
                        "tabulated activation needs at least two samples",
                    ));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(ModelError::NonFinite("tabulated activation sample"));
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(ModelError::InvalidActivation(
                        "tabulated activation abscissae must be strictly increasing",
                    ));
                }
                if !lipschitz.is_finite() || *lipschitz < 0.0 {
                    return Err(ModelError::InvalidActivation(
                        "declared Lipschitz constant must be nonnegative",
                    ));
                }
            }
            Activation::InputScaled { scale, inner } => {
                if !scale.is_finite() || *scale <= 0.0 {
                    return Err(ModelError::InvalidActivation(
                        "input scale must be positive",
                    ));
                }
                inner.check()?;
            }
        }
        Ok(())
    }

    /// Compose with an input rescaling, collapsing the trivial case.
    pub fn with_input_scale(&self, scale: f64) -> Activation {
        if scale == 1.0 {
            self.clone()
        } else {
            Activation::InputScaled {
                scale,
                inner: Box::new(self.clone()),
            }
        }
    }
}

fn eval_table(points: &[[f64; 2]], u: f64) -> f64 {
    let first = points.first().expect("validated non-empty");
    let last = points.last().expect("validated non-empty");
    if u <= first[0] {
        return first[1];
    }
    if u >= last[0] {
        return last[1];
    }
    let idx = points.partition_point(|p| p[0] <= u);
    let (a, b) = (points[idx - 1], points[idx]);
    let t = (u - a[0]) / (b[0] - a[0]);
    a[1] + t * (b[1] - a[1])
}
