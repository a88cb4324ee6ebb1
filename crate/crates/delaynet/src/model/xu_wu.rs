//! The specialized discrete model with a shared delay and external inputs,
//!
//! ```text
//! x_i(m+1) = e^{−a_i(m)h}·x_i(m) + θ_i(m)·[Σ_j b_ij(m)·f_j(x_j(m − τ(m))) + I_i(m)]
//! ```
//!
//! where `θ_i(m) = (1 − e^{−a_i(m)h})/a_i(m)` and `h` is the discretization
//! step. This is the form the closed-form certificates and the M-matrix
//! test operate on.

use serde::{Deserialize, Serialize};

use super::hopfield::check_integer_delay;
use super::{theta, Activation, HopfieldModel, Interaction, ModelError, SequenceSpec};

/// Default lower bound enforced on `inf_m a_i(m)`. The multiplier
/// `e^{−a_i(m)h}` must stay strictly below 1, which fails in the limit
/// `a_i → 0`; the floor makes that boundary explicit and configurable.
pub const DEFAULT_RATE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct XuWuModel {
    n: usize,
    /// Discretization step `h > 0`.
    h: f64,
    /// Neuron charging rates `a_i(m) > 0`.
    a: Vec<SequenceSpec>,
    /// Interconnection weights `b_ij(m)`.
    b: Vec<Vec<SequenceSpec>>,
    /// External inputs `I_i(m)`.
    input: Vec<SequenceSpec>,
    /// Activations `f_j` with constants `F_j`.
    activations: Vec<Activation>,
    /// Shared integer delay `τ(m)`.
    delay: SequenceSpec,
    /// Bound `τ` with `0 ≤ τ(m) ≤ τ`.
    delay_bound: u32,
    /// Enforced lower bound on `inf_m a_i(m)`.
    rate_floor: f64,
}

impl XuWuModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h: f64,
        a: Vec<SequenceSpec>,
        b: Vec<Vec<SequenceSpec>>,
        input: Vec<SequenceSpec>,
        activations: Vec<Activation>,
        delay: SequenceSpec,
        delay_bound: u32,
        rate_floor: Option<f64>,
    ) -> Result<Self, ModelError> {
        let n = a.len();
        if n == 0 {
            return Err(ModelError::Dimension("need at least one component"));
        }
        if b.len() != n || input.len() != n || activations.len() != n {
            return Err(ModelError::Dimension("per-component arrays must have length N"));
        }
        if b.iter().any(|row| row.len() != n) {
            return Err(ModelError::Dimension("weight matrix must be N×N"));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(ModelError::NonPositiveStep(h));
        }
        let rate_floor = rate_floor.unwrap_or(DEFAULT_RATE_FLOOR);
        if !rate_floor.is_finite() || rate_floor <= 0.0 {
            return Err(ModelError::NegativeRate(rate_floor));
        }
        for (i, spec) in a.iter().enumerate() {
            spec.check()?;
            let inf = spec.inf();
            if inf < rate_floor {
                return Err(ModelError::RateFloor {
                    i,
                    inf,
                    floor: rate_floor,
                });
            }
        }
        for row in &b {
            for spec in row {
                spec.check()?;
            }
        }
        for spec in &input {
            spec.check()?;
        }
        for f in &activations {
            f.check()?;
        }
        check_integer_delay(&delay, delay_bound)?;
        Ok(XuWuModel {
            n,
            h,
            a,
            b,
            input,
            activations,
            delay,
            delay_bound,
            rate_floor,
        })
    }

    /// Component count `N`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn delay_bound(&self) -> u32 {
        self.delay_bound
    }

    pub fn r(&self) -> i32 {
        -(self.delay_bound as i32)
    }

    pub fn rate(&self, i: usize, m: i64) -> f64 {
        self.a[i].eval(m)
    }

    pub fn rate_spec(&self, i: usize) -> &SequenceSpec {
        &self.a[i]
    }

    pub fn weight(&self, i: usize, j: usize, m: i64) -> f64 {
        self.b[i][j].eval(m)
    }

    pub fn weight_spec(&self, i: usize, j: usize) -> &SequenceSpec {
        &self.b[i][j]
    }

    pub fn input(&self, i: usize, m: i64) -> f64 {
        self.input[i].eval(m)
    }

    pub fn input_spec(&self, i: usize) -> &SequenceSpec {
        &self.input[i]
    }

    pub fn activation(&self, j: usize) -> &Activation {
        &self.activations[j]
    }

    pub fn delay(&self, m: i64) -> i64 {
        self.delay.eval(m).round() as i64
    }

    pub fn delay_spec(&self) -> &SequenceSpec {
        &self.delay
    }

    /// Multiplier `c_i(m) = e^{−a_i(m)h}`.
    pub fn multiplier(&self, i: usize, m: i64) -> f64 {
        (-self.a[i].eval(m) * self.h).exp()
    }

    /// Input weight `θ_i(m)`.
    pub fn theta(&self, i: usize, m: i64) -> f64 {
        theta(self.a[i].eval(m), self.h).expect("rates validated positive")
    }

    /// `a_i⁻ = inf_m a_i(m)` (exact for this sequence class).
    pub fn rate_inf(&self, i: usize) -> f64 {
        self.a[i].inf()
    }

    /// `b_ij⁺ = sup_m |b_ij(m)|`.
    pub fn weight_sup(&self, i: usize, j: usize) -> f64 {
        self.b[i][j].sup_abs()
    }

    /// `θ_i⁺ = sup_m θ_i(m) = θ(a_i⁻, h)` since θ is decreasing in the rate.
    pub fn theta_sup(&self, i: usize) -> f64 {
        theta(self.rate_inf(i), self.h).expect("rates validated positive")
    }

    /// `ν_i = a_i⁻·h`.
    pub fn nu(&self, i: usize) -> f64 {
        self.rate_inf(i) * self.h
    }

    /// Lipschitz constant `F_j` of activation `j`.
    pub fn lipschitz(&self, j: usize) -> f64 {
        self.activations[j].lipschitz()
    }

    /// One step of the recurrence evaluated directly in this representation.
    /// `window[j]` must hold the delayed value `x_j(m − τ(m))` and
    /// `current[i]` the value `x_i(m)`.
    pub fn step_values(&self, m: i64, current: &[f64], delayed: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let coupling: f64 = (0..self.n)
                    .map(|j| self.b[i][j].eval(m) * self.activations[j].eval(delayed[j]))
                    .sum();
                self.multiplier(i, m) * current[i]
                    + self.theta(i, m) * (coupling + self.input[i].eval(m))
            })
            .collect()
    }

    /// Rewrite as the general model: the multiplier becomes
    /// `c_i(m) = e^{−a_i(m)h}`, every pair gets
    /// `h_ij(m,u) = θ_i(m)·(b_ij(m)·f_j(u) + I_i(m)/N)` (the input split
    /// evenly over `j` so the row sum reproduces this model exactly) with
    /// envelopes `H_ij(m) = θ_i(m)·|b_ij(m)|·F_j` and delays `τ_ij = τ`.
    pub fn as_general(&self) -> HopfieldModel {
        let h = self.h;
        let n = self.n;
        let thetas: Vec<SequenceSpec> = self
            .a
            .iter()
            .map(|a| a.map(|v| theta(v, h).expect("rates validated positive")))
            .collect();
        let c: Vec<SequenceSpec> = self.a.iter().map(|a| a.map(|v| (-v * h).exp())).collect();
        let mut interactions = Vec::with_capacity(n);
        let mut envelopes = Vec::with_capacity(n);
        let mut delays = Vec::with_capacity(n);
        for i in 0..n {
            let mut irow = Vec::with_capacity(n);
            let mut erow = Vec::with_capacity(n);
            let mut drow = Vec::with_capacity(n);
            for j in 0..n {
                let gain = thetas[i].zip(&self.b[i][j], |t, b| t * b);
                let offset = thetas[i].zip(&self.input[i], |t, inp| t * inp / n as f64);
                let envelope = gain.map(|g| g.abs() * self.activations[j].lipschitz());
                irow.push(Interaction {
                    activation: self.activations[j].clone(),
                    gain,
                    offset,
                });
                erow.push(envelope);
                drow.push(self.delay.clone());
            }
            interactions.push(irow);
            envelopes.push(erow);
            delays.push(drow);
        }
        HopfieldModel::new(c, interactions, envelopes, delays, self.delay_bound)
            .expect("a valid specialized model maps to a valid general model")
    }

    /// Coordinate change `y_i = x_i / d_i`: weights become `b_ij/d_i`,
    /// activations `f_j(d_j·u)` with constants `d_j·F_j`, inputs `I_i/d_i`.
    pub fn rescaled(&self, d: &[f64]) -> Result<XuWuModel, ModelError> {
        if d.len() != self.n {
            return Err(ModelError::Dimension("scaling vector must have length N"));
        }
        if d.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(ModelError::NegativeRate(
                *d.iter().find(|&&v| !(v > 0.0)).unwrap_or(&f64::NAN),
            ));
        }
        let b = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.b[i][j].map(|v| v / d[i]))
                    .collect()
            })
            .collect();
        let input = (0..self.n)
            .map(|i| self.input[i].map(|v| v / d[i]))
            .collect();
        let activations = (0..self.n)
            .map(|j| self.activations[j].with_input_scale(d[j]))
            .collect();
        XuWuModel::new(
            self.h,
            self.a.clone(),
            b,
            input,
            activations,
            self.delay.clone(),
            self.delay_bound,
            Some(self.rate_floor),
        )
    }
}

impl<'de> Deserialize<'de> for XuWuModel {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            h: f64,
            a: Vec<SequenceSpec>,
            b: Vec<Vec<SequenceSpec>>,
            input: Vec<SequenceSpec>,
            activations: Vec<Activation>,
            delay: SequenceSpec,
            delay_bound: u32,
            rate_floor: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        XuWuModel::new(
            raw.h,
            raw.a,
            raw.b,
            raw.input,
            raw.activations,
            raw.delay,
            raw.delay_bound,
            raw.rate_floor,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// The scalar reference model: `a ≡ 1`, `h = 1`, one weight `b`, unit-gain
/// activation, constant input, constant delay.
pub fn scalar_model(b: f64, input: f64, activation: Activation, delay: u32) -> XuWuModel {
    XuWuModel::new(
        1.0,
        vec![SequenceSpec::constant(1.0)],
        vec![vec![SequenceSpec::constant(b)]],
        vec![SequenceSpec::constant(input)],
        vec![activation],
        SequenceSpec::constant(f64::from(delay)),
        delay,
        None,
    )
    .expect("scalar reference model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_floor_is_enforced() {
        let err = XuWuModel::new(
            1.0,
            vec![SequenceSpec::constant(0.0)],
            vec![vec![SequenceSpec::constant(0.0)]],
            vec![SequenceSpec::constant(0.0)],
            vec![Activation::Identity],
            SequenceSpec::constant(0.0),
            0,
            None,
        );
        assert!(matches!(err, Err(ModelError::RateFloor { .. })));

        // a custom floor admits small rates
        let ok = XuWuModel::new(
            1.0,
            vec![SequenceSpec::constant(1e-12)],
            vec![vec![SequenceSpec::constant(0.0)]],
            vec![SequenceSpec::constant(0.0)],
            vec![Activation::Identity],
            SequenceSpec::constant(0.0),
            0,
            Some(1e-13),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn zero_interaction_maps_to_zero_general_entries() {
        // N=1, a≡1, h=1, b≡0, I≡0
        let model = scalar_model(0.0, 0.0, Activation::Identity, 0);
        let general = model.as_general();
        assert_eq!(general.interaction(0, 0, 3, 0.7), 0.0);
        assert!((general.coefficient(0, 5) - (-1.0_f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn general_envelope_is_theta_times_weight() {
        // H_11(m) = θ·|b|·F = 0.3·(1 − e^{−1})
        let model = scalar_model(0.3, 0.0, Activation::Identity, 0);
        let general = model.as_general();
        let expected = 0.3 * (1.0 - (-1.0_f64).exp());
        assert!((general.envelope(0, 0, 9) - expected).abs() < 1e-15);
        assert!((expected - 0.189_636_167_648_567_3).abs() < 1e-15);
    }

    #[test]
    fn derived_quantities() {
        let model = XuWuModel::new(
            0.5,
            vec![SequenceSpec::periodic(vec![2.0, 3.0])],
            vec![vec![SequenceSpec::periodic(vec![0.5, -0.75])]],
            vec![SequenceSpec::constant(0.0)],
            vec![Activation::Tanh { gain: 2.0 }],
            SequenceSpec::constant(1.0),
            1,
            None,
        )
        .unwrap();
        assert_eq!(model.rate_inf(0), 2.0);
        assert_eq!(model.weight_sup(0, 0), 0.75);
        assert_eq!(model.nu(0), 1.0);
        assert_eq!(model.lipschitz(0), 2.0);
        let expected_theta_sup = (1.0 - (-1.0_f64).exp()) / 2.0;
        assert!((model.theta_sup(0) - expected_theta_sup).abs() < 1e-15);
    }

    #[test]
    fn rescaling_by_ones_is_identity() {
        let model = scalar_model(0.3, 0.5, Activation::Tanh { gain: 1.0 }, 1);
        let same = model.rescaled(&[1.0]).unwrap();
        assert_eq!(same.weight(0, 0, 3), model.weight(0, 0, 3));
        assert_eq!(same.activation(0), model.activation(0));
        assert_eq!(same.input(0, 2), model.input(0, 2));
    }

    #[test]
    fn rescaling_scales_lipschitz_constants() {
        let model = XuWuModel::new(
            1.0,
            vec![SequenceSpec::constant(1.0), SequenceSpec::constant(1.0)],
            vec![
                vec![SequenceSpec::constant(0.1), SequenceSpec::constant(0.2)],
                vec![SequenceSpec::constant(0.0), SequenceSpec::constant(0.1)],
            ],
            vec![SequenceSpec::constant(0.0), SequenceSpec::constant(0.0)],
            vec![Activation::Tanh { gain: 1.0 }, Activation::Tanh { gain: 3.0 }],
            SequenceSpec::constant(0.0),
            0,
            None,
        )
        .unwrap();
        let scaled = model.rescaled(&[2.0, 0.5]).unwrap();
        assert_eq!(scaled.lipschitz(0), 2.0);
        assert_eq!(scaled.lipschitz(1), 1.5);
        assert!(model.rescaled(&[1.0, 0.0]).is_err());
        assert!(model.rescaled(&[1.0, -2.0]).is_err());
    }
}
