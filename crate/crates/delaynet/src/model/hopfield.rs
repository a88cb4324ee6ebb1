//! The general nonautonomous delayed model with per-pair interactions.

use serde::{Deserialize, Serialize};

use super::{Activation, ModelError, SequenceSpec};

/// One interaction entry `h(m, u) = gain(m)·act(u) + offset(m)`.
///
/// Raw tabulated interactions are the special case `gain ≡ 1, offset ≡ 0`
/// with a [`Activation::Tabulated`] activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub activation: Activation,
    pub gain: SequenceSpec,
    pub offset: SequenceSpec,
}

impl Interaction {
    pub fn zero() -> Self {
        Interaction {
            activation: Activation::Identity,
            gain: SequenceSpec::constant(0.0),
            offset: SequenceSpec::constant(0.0),
        }
    }

    pub fn autonomous(activation: Activation, gain: f64) -> Self {
        Interaction {
            activation,
            gain: SequenceSpec::constant(gain),
            offset: SequenceSpec::constant(0.0),
        }
    }

    pub fn eval(&self, m: i64, u: f64) -> f64 {
        self.gain.eval(m) * self.activation.eval(u) + self.offset.eval(m)
    }

    /// The induced Lipschitz envelope `|gain(m)|·F`.
    pub fn envelope(&self) -> SequenceSpec {
        let f = self.activation.lipschitz();
        self.gain.map(|g| g.abs() * f)
    }

    fn check(&self) -> Result<(), ModelError> {
        self.activation.check()?;
        self.gain.check()?;
        self.offset.check()
    }
}

/// The general discrete model
/// `x_i(m+1) = c_i(m)·x_i(m) + Σ_j h_ij(m, x_j(m − τ_ij(m)))`.
#[derive(Debug, Clone, Serialize)]
pub struct HopfieldModel {
    n: usize,
    c: Vec<SequenceSpec>,
    interactions: Vec<Vec<Interaction>>,
    /// Declared Lipschitz envelopes `H_ij(m)`.
    envelopes: Vec<Vec<SequenceSpec>>,
    /// Integer-valued delay sequences `τ_ij(m)`.
    delays: Vec<Vec<SequenceSpec>>,
    /// Global delay bound `τ`; histories span offsets `−τ..=0`.
    delay_bound: u32,
}

impl HopfieldModel {
    pub fn new(
        c: Vec<SequenceSpec>,
        interactions: Vec<Vec<Interaction>>,
        envelopes: Vec<Vec<SequenceSpec>>,
        delays: Vec<Vec<SequenceSpec>>,
        delay_bound: u32,
    ) -> Result<Self, ModelError> {
        let n = c.len();
        if n == 0 {
            return Err(ModelError::Dimension("need at least one component"));
        }
        let square = |name: &'static str, rows: usize| {
            if rows != n {
                Err(ModelError::Dimension(name))
            } else {
                Ok(())
            }
        };
        square("interaction rows", interactions.len())?;
        square("envelope rows", envelopes.len())?;
        square("delay rows", delays.len())?;
        for i in 0..n {
            square("interaction columns", interactions[i].len())?;
            square("envelope columns", envelopes[i].len())?;
            square("delay columns", delays[i].len())?;
        }

        for (i, spec) in c.iter().enumerate() {
            spec.check()?;
            let scan = spec.prefix_len() + spec.cycle_len();
            for m in 0..scan as i64 {
                let value = spec.eval(m);
                if !(value > 0.0 && value < 1.0) {
                    return Err(ModelError::MultiplierRange { i, m, value });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                interactions[i][j].check()?;
                let env = &envelopes[i][j];
                env.check()?;
                let scan = env.prefix_len() + env.cycle_len();
                for m in 0..scan as i64 {
                    let value = env.eval(m);
                    if value < 0.0 {
                        return Err(ModelError::NegativeEnvelope { i, j, m, value });
                    }
                }
                check_integer_delay(&delays[i][j], delay_bound)?;
            }
        }
        Ok(HopfieldModel {
            n,
            c,
            interactions,
            envelopes,
            delays,
            delay_bound,
        })
    }

    /// Scalar model without interactions; handy for linear reference cases.
    pub fn linear_scalar(c: SequenceSpec) -> Result<Self, ModelError> {
        Self::new(
            vec![c],
            vec![vec![Interaction::zero()]],
            vec![vec![SequenceSpec::constant(0.0)]],
            vec![vec![SequenceSpec::constant(0.0)]],
            0,
        )
    }

    /// Like [`HopfieldModel::linear_scalar`] but with an artificial delay
    /// bound, so histories carry a longer window than the dynamics use.
    pub fn linear_scalar_with_bound(c: SequenceSpec, delay_bound: u32) -> Result<Self, ModelError> {
        Self::new(
            vec![c],
            vec![vec![Interaction::zero()]],
            vec![vec![SequenceSpec::constant(0.0)]],
            vec![vec![SequenceSpec::constant(0.0)]],
            delay_bound,
        )
    }

    /// Component count `N`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn delay_bound(&self) -> u32 {
        self.delay_bound
    }

    /// `r = −τ`, the history offset bound.
    pub fn r(&self) -> i32 {
        -(self.delay_bound as i32)
    }

    pub fn coefficient(&self, i: usize, m: i64) -> f64 {
        self.c[i].eval(m)
    }

    pub fn coefficients(&self) -> &[SequenceSpec] {
        &self.c
    }

    pub fn interaction(&self, i: usize, j: usize, m: i64, u: f64) -> f64 {
        self.interactions[i][j].eval(m, u)
    }

    pub fn interaction_spec(&self, i: usize, j: usize) -> &Interaction {
        &self.interactions[i][j]
    }

    pub fn envelope(&self, i: usize, j: usize, m: i64) -> f64 {
        self.envelopes[i][j].eval(m)
    }

    pub fn envelope_spec(&self, i: usize, j: usize) -> &SequenceSpec {
        &self.envelopes[i][j]
    }

    pub fn delay(&self, i: usize, j: usize, m: i64) -> i64 {
        self.delays[i][j].eval(m).round() as i64
    }

    /// Row Lipschitz budget `Σ_j H_ij(m)` of component `i`.
    pub fn lip_row(&self, i: usize, m: i64) -> f64 {
        (0..self.n).map(|j| self.envelope(i, j, m)).sum()
    }

    /// Probe every declared envelope against its interaction on `grid`.
    /// Returns the first failing pair, if any.
    pub fn probe_envelopes(
        &self,
        grid: &super::ProbeGrid,
    ) -> Option<(usize, usize, super::LipschitzReport)> {
        for i in 0..self.n {
            for j in 0..self.n {
                let report = super::lipschitz_probe(
                    |m, u| self.interaction(i, j, m, u),
                    &self.envelopes[i][j],
                    grid,
                );
                if !report.pass {
                    return Some((i, j, report));
                }
            }
        }
        None
    }
}

pub(super) fn check_integer_delay(spec: &SequenceSpec, bound: u32) -> Result<(), ModelError> {
    spec.check()?;
    let scan = spec.prefix_len() + spec.cycle_len();
    for m in 0..scan as i64 {
        let value = spec.eval(m);
        if value.fract() != 0.0 || value < 0.0 || value > f64::from(bound) {
            return Err(ModelError::DelayRange {
                m,
                value,
                bound,
            });
        }
    }
    Ok(())
}

impl<'de> Deserialize<'de> for HopfieldModel {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            c: Vec<SequenceSpec>,
            interactions: Vec<Vec<Interaction>>,
            envelopes: Vec<Vec<SequenceSpec>>,
            delays: Vec<Vec<SequenceSpec>>,
            delay_bound: u32,
        }
        let raw = Raw::deserialize(deserializer)?;
        HopfieldModel::new(
            raw.c,
            raw.interactions,
            raw.envelopes,
            raw.delays,
            raw.delay_bound,
        )
        .map_err(serde::de::Error::custom)
    }
}
