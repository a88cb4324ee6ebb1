//! Continuous-time model descriptions and their exact-step discretization.
//!
//! On each sampling interval `[mh, (m+1)h)` the rates, weights and delays
//! are frozen at their left-endpoint values and the resulting linear
//! equation is integrated exactly. That yields the discrete recurrence
//! with multiplier `e^{−a(mh)h}`, input weight `θ(a(mh), h)` and integer
//! delays `⌊α(mh)/h⌋`; no ODE solver is involved anywhere.

use serde::{Deserialize, Serialize};

use super::{theta, Activation, HopfieldModel, Interaction, ModelError, SequenceSpec};

/// A scalar function of continuous time `t ≥ 0` from a small closed catalog
/// (no symbolic parsing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TimeFunction {
    Constant { value: f64 },
    /// `offset + amplitude·sin(angular_frequency·t + phase)`.
    Sinusoid {
        offset: f64,
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
    /// Piecewise-constant samples at spacing `dt`, `tail` beyond the table.
    Sampled { dt: f64, values: Vec<f64>, tail: f64 },
}

impl TimeFunction {
    pub fn constant(value: f64) -> Self {
        TimeFunction::Constant { value }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => *value,
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                angular_frequency,
                phase,
            } => offset + amplitude * (angular_frequency * t + phase).sin(),
            TimeFunction::Sampled { dt, values, tail } => {
                let idx = (t / dt).floor() as usize;
                values.get(idx).copied().unwrap_or(*tail)
            }
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let finite = match self {
            TimeFunction::Constant { value } => value.is_finite(),
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                angular_frequency,
                phase,
            } => [offset, amplitude, angular_frequency, phase]
                .iter()
                .all(|v| v.is_finite()),
            TimeFunction::Sampled { dt, values, tail } => {
                *dt > 0.0
                    && dt.is_finite()
                    && tail.is_finite()
                    && !values.is_empty()
                    && values.iter().all(|v| v.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(ModelError::NonFinite("time function parameter"))
        }
    }

    /// Tabulate at `t = m·h` for `m ≤ horizon`; constants stay constants so
    /// autonomous models discretize exactly for every index.
    fn sample(&self, h: f64, horizon: usize, mut f: impl FnMut(f64) -> f64) -> SequenceSpec {
        match self {
            TimeFunction::Constant { value } => SequenceSpec::constant(f(*value)),
            _ => {
                let values: Vec<f64> = (0..=horizon).map(|m| f(self.eval(m as f64 * h))).collect();
                let tail = *values.last().expect("horizon sampling is non-empty");
                SequenceSpec::table(values, tail)
            }
        }
    }
}

/// One continuous interaction `k(t, u) = gain(t)·act(u) + offset(t)` with
/// envelope `K(t) = |gain(t)|·F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousInteraction {
    pub activation: Activation,
    pub gain: TimeFunction,
    pub offset: TimeFunction,
}

impl ContinuousInteraction {
    pub fn zero() -> Self {
        ContinuousInteraction {
            activation: Activation::Identity,
            gain: TimeFunction::constant(0.0),
            offset: TimeFunction::constant(0.0),
        }
    }
}

/// Continuous-time model
/// `x_i'(t) = −a_i(t)·x_i(t) + Σ_j k_ij(t, x_j(t − α_ij(t)))`.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuousHopfieldSpec {
    n: usize,
    /// Nonnegative charging rates `a_i(t)`.
    rates: Vec<TimeFunction>,
    interactions: Vec<Vec<ContinuousInteraction>>,
    /// Bounded nonnegative delays `α_ij(t)`.
    delays: Vec<Vec<TimeFunction>>,
    /// Declared bound `sup α_ij`.
    delay_sup: f64,
}

impl ContinuousHopfieldSpec {
    pub fn new(
        rates: Vec<TimeFunction>,
        interactions: Vec<Vec<ContinuousInteraction>>,
        delays: Vec<Vec<TimeFunction>>,
        delay_sup: f64,
    ) -> Result<Self, ModelError> {
        let n = rates.len();
        if n == 0 {
            return Err(ModelError::Dimension("need at least one component"));
        }
        if interactions.len() != n
            || delays.len() != n
            || interactions.iter().any(|row| row.len() != n)
            || delays.iter().any(|row| row.len() != n)
        {
            return Err(ModelError::Dimension("interaction/delay tables must be N×N"));
        }
        if !delay_sup.is_finite() || delay_sup < 0.0 {
            return Err(ModelError::NonFinite("delay bound"));
        }
        for f in &rates {
            f.check()?;
        }
        for row in &interactions {
            for k in row {
                k.activation.check()?;
                k.gain.check()?;
                k.offset.check()?;
            }
        }
        for row in &delays {
            for f in row {
                f.check()?;
            }
        }
        Ok(ContinuousHopfieldSpec {
            n,
            rates,
            interactions,
            delays,
            delay_sup,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Discretize with step `h`, sampling the time functions at `t = m·h`
    /// for `m ≤ horizon` (constants remain exact for every index):
    ///
    /// * `c_i(m) = e^{−a_i(mh)·h}`
    /// * `h_ij(m,u) = θ_i(m)·k_ij(mh, u)`, envelope `H_ij(m) = θ_i(m)·K_ij(mh)`
    /// * `τ_ij(m) = ⌊α_ij(mh)/h⌋`, bounded by `⌊sup α / h⌋`
    pub fn discretize(&self, h: f64, horizon: usize) -> Result<HopfieldModel, ModelError> {
        if !h.is_finite() || h <= 0.0 {
            return Err(ModelError::NonPositiveStep(h));
        }
        let n = self.n;
        for (i, a) in self.rates.iter().enumerate() {
            for m in 0..=horizon {
                let t = m as f64 * h;
                let value = a.eval(t);
                if value < 0.0 {
                    return Err(ModelError::NegativeContinuousRate { i, t, value });
                }
            }
        }
        let delay_bound = (self.delay_sup / h).floor() as u32;
        let thetas: Vec<SequenceSpec> = self
            .rates
            .iter()
            .map(|a| a.sample(h, horizon, |v| theta(v, h).expect("rates checked nonnegative")))
            .collect();
        let c: Vec<SequenceSpec> = self
            .rates
            .iter()
            .map(|a| a.sample(h, horizon, |v| (-v * h).exp()))
            .collect();
        let mut interactions = Vec::with_capacity(n);
        let mut envelopes = Vec::with_capacity(n);
        let mut delays = Vec::with_capacity(n);
        for i in 0..n {
            let mut irow = Vec::with_capacity(n);
            let mut erow = Vec::with_capacity(n);
            let mut drow = Vec::with_capacity(n);
            for j in 0..n {
                let k = &self.interactions[i][j];
                let gain = thetas[i].zip(&k.gain.sample(h, horizon, |v| v), |t, g| t * g);
                let offset = thetas[i].zip(&k.offset.sample(h, horizon, |v| v), |t, o| t * o);
                let envelope = gain.map(|g| g.abs() * k.activation.lipschitz());
                irow.push(Interaction {
                    activation: k.activation.clone(),
                    gain,
                    offset,
                });
                erow.push(envelope);
                drow.push(self.delays[i][j].sample(h, horizon, |alpha| (alpha / h).floor()));
            }
            interactions.push(irow);
            envelopes.push(erow);
            delays.push(drow);
        }
        HopfieldModel::new(c, interactions, envelopes, delays, delay_bound)
    }
}

impl<'de> Deserialize<'de> for ContinuousHopfieldSpec {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            rates: Vec<TimeFunction>,
            interactions: Vec<Vec<ContinuousInteraction>>,
            delays: Vec<Vec<TimeFunction>>,
            delay_sup: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        ContinuousHopfieldSpec::new(raw.rates, raw.interactions, raw.delays, raw.delay_sup)
            .map_err(serde::de::Error::custom)
    }
}
