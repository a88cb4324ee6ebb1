//! Exact forward simulation and the linear-evolution machinery.
//!
//! Besides stepping the general recurrence this module provides the
//! abstract view used by the stability theory: per-component linear
//! history functionals plus Lipschitz perturbations, their evolution
//! operators `𝒜_{m,n}` with the cocycle identity, the Γ embedding, the
//! variation-of-constants reconstruction, and the contraction iteration on
//! the weighted trajectory space.

mod abstract_system;
mod evolution;
mod fixed_point;
mod trajectory;

pub use abstract_system::{abstract_solve, AbstractSystem, Perturbation};
pub use evolution::{
    evolution_family, evolution_matrix, gamma_embed, operator_norm, voc_reconstruct,
    EvolutionMatrix,
};
pub(crate) use evolution::flow_norms;
pub use fixed_point::{j_fixed_point, FixedPointResult};
pub use trajectory::Trajectory;

use thiserror::Error;

use crate::model::{HistorySegment, HopfieldModel, ModelError, XuWuModel};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("window shape mismatch: expected r = {expected}, got {got}")]
    WindowShape { expected: i32, got: i32 },
    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("horizon {horizon} precedes start {start}")]
    HorizonBeforeStart { start: i64, horizon: i64 },
    #[error("start index must be nonnegative, got {0}")]
    NegativeStart(i64),
    #[error("delay τ_{i}{j}({m}) = {delay} exceeds the declared bound {bound}")]
    DelayExceedsBound {
        i: usize,
        j: usize,
        m: i64,
        delay: i64,
        bound: u32,
    },
    #[error("index {m} outside trajectory range [{start}, {end}]")]
    IndexOutsideTrajectory { m: i64, start: i64, end: i64 },
    #[error("pair (m, n) = ({m}, {n}) is not in Δ (need m ≥ n ≥ 0)")]
    NotInDelta { m: i64, n: i64 },
    #[error("perturbation f_{i} does not vanish on the zero segment at m = {m} (got {value})")]
    PerturbationNotVanishing { i: usize, m: i64, value: f64 },
    #[error("initial segment must be nonzero")]
    ZeroInitialSegment,
    #[error("contraction hypothesis fails: λ = {lambda} ≥ 1")]
    ContractionFailed { lambda: f64 },
    #[error(
        "rate bound does not dominate the evolution norms: ‖𝒜^({i})_{{{m},{n}}}‖ = {norm} > a'_{{{m},{n}}} = {bound}"
    )]
    DominationFailed {
        i: usize,
        m: i64,
        n: i64,
        norm: f64,
        bound: f64,
    },
    #[error("fixed-point iteration did not converge within {max_iter} iterations (last distance {last})")]
    NoConvergence { max_iter: usize, last: f64 },
    #[error("difference encoding evaluated past its reference horizon")]
    ReferenceHorizonExceeded,
}

/// One step of the general recurrence:
/// `x_i(m+1) = c_i(m)·x_i(m) + Σ_j h_ij(m, x_j(m − τ_ij(m)))`.
///
/// `window` holds the history at time `m` over offsets `[−τ, 0]`.
pub fn step(
    model: &HopfieldModel,
    m: i64,
    window: &HistorySegment,
) -> Result<Vec<f64>, EngineError> {
    if window.r() != model.r() {
        return Err(EngineError::WindowShape {
            expected: model.r(),
            got: window.r(),
        });
    }
    if window.components() != model.dim() {
        return Err(EngineError::ComponentMismatch {
            expected: model.dim(),
            got: window.components(),
        });
    }
    let n = model.dim();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = model.coefficient(i, m) * window.get(0, i);
        for j in 0..n {
            let delay = model.delay(i, j, m);
            if delay < 0 || delay > i64::from(model.delay_bound()) {
                return Err(EngineError::DelayExceedsBound {
                    i,
                    j,
                    m,
                    delay,
                    bound: model.delay_bound(),
                });
            }
            let delayed = window.get(-(delay as i32), j);
            acc += model.interaction(i, j, m, delayed);
        }
        next.push(acc);
    }
    Ok(next)
}

/// The unique solution with `x̄_n = α`, evolved up to index `M ≥ n`.
pub fn solve(
    model: &HopfieldModel,
    n: i64,
    alpha: &HistorySegment,
    horizon: i64,
) -> Result<Trajectory, EngineError> {
    check_solve_inputs(n, horizon, alpha, model.r(), model.dim())?;
    let mut trajectory = Trajectory::seeded(n, alpha, "hopfield");
    for m in n..horizon {
        let window = trajectory
            .history_at(m)
            .expect("window stays inside the growing trajectory");
        let row = step(model, m, &window)?;
        trajectory.push_row(&row);
    }
    Ok(trajectory)
}

/// Forward simulation of the specialized model in its own representation
/// (shared delay, explicit inputs). Trajectories agree with
/// `solve(model.as_general(), …)` up to floating-point association.
pub fn solve_xu_wu(
    model: &XuWuModel,
    n: i64,
    alpha: &HistorySegment,
    horizon: i64,
) -> Result<Trajectory, EngineError> {
    check_solve_inputs(n, horizon, alpha, model.r(), model.dim())?;
    let mut trajectory = Trajectory::seeded(n, alpha, "xu-wu");
    for m in n..horizon {
        let delay = model.delay(m);
        if delay < 0 || delay > i64::from(model.delay_bound()) {
            return Err(EngineError::DelayExceedsBound {
                i: 0,
                j: 0,
                m,
                delay,
                bound: model.delay_bound(),
            });
        }
        let current = trajectory.value(m).to_vec();
        let delayed = trajectory.value(m - delay).to_vec();
        let row = model.step_values(m, &current, &delayed);
        trajectory.push_row(&row);
    }
    Ok(trajectory)
}

fn check_solve_inputs(
    n: i64,
    horizon: i64,
    alpha: &HistorySegment,
    r: i32,
    dim: usize,
) -> Result<(), EngineError> {
    if n < 0 {
        return Err(EngineError::NegativeStart(n));
    }
    if horizon < n {
        return Err(EngineError::HorizonBeforeStart {
            start: n,
            horizon,
        });
    }
    if alpha.r() != r {
        return Err(EngineError::WindowShape {
            expected: r,
            got: alpha.r(),
        });
    }
    if alpha.components() != dim {
        return Err(EngineError::ComponentMismatch {
            expected: dim,
            got: alpha.components(),
        });
    }
    Ok(())
}
