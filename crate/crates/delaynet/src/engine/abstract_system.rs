//! The abstract delayed system `x̄(m+1) = L̄_m x̄_m + f̄_m(x̄_m)`.
//!
//! Component spaces are instantiated as ℝ, so each linear functional
//! `L_m^{(i)}` is a coefficient row over the history offsets and each
//! perturbation `f_m^{(i)}` is a scalar function of the whole history
//! segment with a declared Lipschitz constant and `f_m(0) = 0`.

use std::fmt;
use std::sync::Arc;

use crate::model::{HistorySegment, HopfieldModel, SequenceSpec};

use super::{EngineError, Trajectory};

type PerturbationFn = dyn Fn(i64, &HistorySegment) -> f64 + Send + Sync;

/// A component perturbation `f_m^{(i)} : X^N → ℝ` with its declared
/// Lipschitz envelope `Lip(f_m^{(i)})`.
#[derive(Clone)]
pub struct Perturbation {
    func: Arc<PerturbationFn>,
    lipschitz: SequenceSpec,
}

impl Perturbation {
    pub fn new(
        lipschitz: SequenceSpec,
        func: impl Fn(i64, &HistorySegment) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Perturbation {
            func: Arc::new(func),
            lipschitz,
        }
    }

    pub fn zero() -> Self {
        Perturbation::new(SequenceSpec::constant(0.0), |_, _| 0.0)
    }

    pub fn eval(&self, m: i64, window: &HistorySegment) -> f64 {
        (self.func)(m, window)
    }

    pub fn lipschitz(&self, m: i64) -> f64 {
        self.lipschitz.eval(m)
    }

    pub fn lipschitz_spec(&self) -> &SequenceSpec {
        &self.lipschitz
    }
}

impl fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Perturbation")
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

/// Number of zero-segment probes used to check `f_m(0) = 0` at construction.
const VANISHING_PROBES: i64 = 33;

#[derive(Debug, Clone)]
pub struct AbstractSystem {
    components: usize,
    r: i32,
    /// `lin[i][t]` is the coefficient of `x_i(m + r + t)` in `L_m^{(i)}`.
    lin: Vec<Vec<SequenceSpec>>,
    perturbations: Vec<Perturbation>,
}

impl AbstractSystem {
    pub fn new(
        r: i32,
        lin: Vec<Vec<SequenceSpec>>,
        perturbations: Vec<Perturbation>,
    ) -> Result<Self, EngineError> {
        assert!(r <= 0, "offset bound must be nonpositive");
        let components = lin.len();
        if components == 0 || perturbations.len() != components {
            return Err(EngineError::ComponentMismatch {
                expected: components.max(1),
                got: perturbations.len(),
            });
        }
        let width = (1 - r) as usize;
        for row in &lin {
            if row.len() != width {
                return Err(EngineError::WindowShape {
                    expected: r,
                    got: -(row.len() as i32 - 1),
                });
            }
            for spec in row {
                spec.check()?;
            }
        }
        for p in &perturbations {
            p.lipschitz.check()?;
        }
        // f̄_m(0) = 0, probed by evaluation
        let zero = HistorySegment::zeros(components, r);
        for (i, p) in perturbations.iter().enumerate() {
            for m in 0..VANISHING_PROBES {
                let value = p.eval(m, &zero);
                if value != 0.0 {
                    return Err(EngineError::PerturbationNotVanishing { i, m, value });
                }
            }
        }
        Ok(AbstractSystem {
            components,
            r,
            lin,
            perturbations,
        })
    }

    /// Purely linear system (`f̄ ≡ 0`).
    pub fn linear(r: i32, lin: Vec<Vec<SequenceSpec>>) -> Result<Self, EngineError> {
        let n = lin.len();
        Self::new(r, lin, (0..n).map(|_| Perturbation::zero()).collect())
    }

    /// Diagonal linear part only: `ℓ_m^{(i)}(0) = c_i(m)`, everything else 0.
    pub fn diagonal_linear(r: i32, c: &[SequenceSpec]) -> Result<Self, EngineError> {
        let width = (1 - r) as usize;
        let lin = c
            .iter()
            .map(|ci| {
                let mut row = vec![SequenceSpec::constant(0.0); width];
                row[width - 1] = ci.clone();
                row
            })
            .collect();
        Self::linear(r, lin)
    }

    /// Encode the general model: diagonal linear part `c_i(m)` and
    /// perturbations absorbing the delayed interactions, with
    /// `Lip(f_m^{(i)}) = Σ_j H_ij(m)`. Requires `h_ij(m, 0) = 0` so the
    /// zero segment stays an equilibrium; models with inputs go through
    /// [`AbstractSystem::hopfield_difference`] instead.
    pub fn from_hopfield(model: Arc<HopfieldModel>) -> Result<Self, EngineError> {
        let n = model.dim();
        let r = model.r();
        let lin = (0..n)
            .map(|i| {
                let width = (1 - r) as usize;
                let mut row = vec![SequenceSpec::constant(0.0); width];
                row[width - 1] = model.coefficients()[i].clone();
                row
            })
            .collect();
        let perturbations = (0..n)
            .map(|i| {
                let lip = (0..n)
                    .map(|j| model.envelope_spec(i, j).clone())
                    .fold(SequenceSpec::constant(0.0), |acc, e| acc.zip(&e, |a, b| a + b));
                let m_ref = Arc::clone(&model);
                Perturbation::new(lip, move |m, window: &HistorySegment| {
                    (0..n)
                        .map(|j| {
                            let delay = m_ref.delay(i, j, m) as i32;
                            m_ref.interaction(i, j, m, window.get(-delay, j))
                        })
                        .sum()
                })
            })
            .collect();
        Self::new(r, lin, perturbations)
    }

    /// The shift-to-zero-equilibrium device: given a reference solution
    /// `x̄*(·, n, α*)`, the difference `ȳ = x̄ − x̄*` obeys the same linear
    /// part with shifted interactions
    /// `h̃_ij(m, u) = h_ij(m, u + x*_j(m − τ_ij)) − h_ij(m, x*_j(m − τ_ij))`,
    /// which vanish at 0 and inherit the envelopes `H_ij`. The reference is
    /// precomputed up to `horizon`; evaluating past it panics.
    pub fn hopfield_difference(
        model: Arc<HopfieldModel>,
        n: i64,
        alpha_star: &HistorySegment,
        horizon: i64,
    ) -> Result<Self, EngineError> {
        let reference = Arc::new(super::solve(&model, n, alpha_star, horizon)?);
        let dim = model.dim();
        let r = model.r();
        let lin = (0..dim)
            .map(|i| {
                let width = (1 - r) as usize;
                let mut row = vec![SequenceSpec::constant(0.0); width];
                row[width - 1] = model.coefficients()[i].clone();
                row
            })
            .collect();
        let perturbations = (0..dim)
            .map(|i| {
                let lip = (0..dim)
                    .map(|j| model.envelope_spec(i, j).clone())
                    .fold(SequenceSpec::constant(0.0), |acc, e| acc.zip(&e, |a, b| a + b));
                let m_ref = Arc::clone(&model);
                let traj = Arc::clone(&reference);
                Perturbation::new(lip, move |m, window: &HistorySegment| {
                    assert!(
                        m < traj.end(),
                        "difference system evaluated past its reference horizon"
                    );
                    (0..dim)
                        .map(|j| {
                            let delay = m_ref.delay(i, j, m);
                            let anchor = traj.value(m - delay)[j];
                            m_ref.interaction(i, j, m, window.get(-(delay as i32), j) + anchor)
                                - m_ref.interaction(i, j, m, anchor)
                        })
                        .sum()
                })
            })
            .collect();
        Self::new(r, lin, perturbations)
    }

    pub fn dim(&self) -> usize {
        self.components
    }

    pub fn r(&self) -> i32 {
        self.r
    }

    /// Coefficient of offset `j ∈ [r, 0]` in `L_m^{(i)}`.
    pub fn linear_coefficient(&self, i: usize, j: i32, m: i64) -> f64 {
        let t = (j - self.r) as usize;
        self.lin[i][t].eval(m)
    }

    /// `L_m^{(i)}` applied to one component history (values over `r..=0`).
    pub fn apply_linear_row(&self, i: usize, m: i64, history: &[f64]) -> f64 {
        debug_assert_eq!(history.len(), (1 - self.r) as usize);
        self.lin[i]
            .iter()
            .zip(history)
            .map(|(spec, v)| spec.eval(m) * v)
            .sum()
    }

    pub fn lipschitz(&self, i: usize, m: i64) -> f64 {
        self.perturbations[i].lipschitz(m)
    }

    pub fn perturbation(&self, i: usize) -> &Perturbation {
        &self.perturbations[i]
    }

    pub(crate) fn linear_specs(&self) -> &[Vec<SequenceSpec>] {
        &self.lin
    }
}

/// The unique solution of the abstract system with `x̄_n = α`:
/// `x_i(m+1) = L_m^{(i)} x̄_{m,i} + f_m^{(i)}(x̄_m)`.
pub fn abstract_solve(
    sys: &AbstractSystem,
    n: i64,
    alpha: &HistorySegment,
    horizon: i64,
) -> Result<Trajectory, EngineError> {
    super::check_solve_inputs(n, horizon, alpha, sys.r(), sys.dim())?;
    let mut trajectory = Trajectory::seeded(n, alpha, "abstract");
    for m in n..horizon {
        let window = trajectory
            .history_at(m)
            .expect("window stays inside the growing trajectory");
        let row: Vec<f64> = (0..sys.dim())
            .map(|i| {
                let history = window.component_values(i);
                sys.apply_linear_row(i, m, &history) + sys.perturbations[i].eval(m, &window)
            })
            .collect();
        trajectory.push_row(&row);
    }
    Ok(trajectory)
}
