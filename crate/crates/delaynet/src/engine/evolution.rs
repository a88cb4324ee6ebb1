//! Evolution operators of the linear part and the variation-of-constants
//! reconstruction.
//!
//! For each component `i` the linear equation `v(k+1) = L_k^{(i)} v_k` acts
//! on histories of width `τ + 1`; its evolution operator `𝒜^{(i)}_{m,n}`
//! maps the history at `n` to the history at `m`. The operators are linear,
//! satisfy `𝒜_{m,m} = Id`, and compose along the cocycle identity
//! `𝒜_{l,m}·𝒜_{m,n} = 𝒜_{l,n}`.

use nalgebra::DMatrix;

use crate::model::HistorySegment;

use super::{abstract_solve, AbstractSystem, EngineError};

/// The matrix of `𝒜^{(i)}_{m,n}` in the canonical history basis: rows and
/// columns are indexed by offsets `r..=0` (index 0 ↔ offset `r`).
#[derive(Debug, Clone)]
pub struct EvolutionMatrix {
    pub component: usize,
    pub m: i64,
    pub n: i64,
    pub matrix: DMatrix<f64>,
}

fn check_delta(m: i64, n: i64) -> Result<(), EngineError> {
    if m >= n && n >= 0 {
        Ok(())
    } else {
        Err(EngineError::NotInDelta { m, n })
    }
}

/// `𝒜^{(i)}_{m,n}` computed by flowing the canonical basis histories
/// forward with the one-step maps.
pub fn evolution_matrix(
    sys: &AbstractSystem,
    component: usize,
    m: i64,
    n: i64,
) -> Result<EvolutionMatrix, EngineError> {
    check_delta(m, n)?;
    let width = (1 - sys.r()) as usize;
    let mut matrix = DMatrix::<f64>::identity(width, width);
    for s in n..m {
        matrix = one_step_left(sys, component, s, &matrix);
    }
    Ok(EvolutionMatrix {
        component,
        m,
        n,
        matrix,
    })
}

/// `S_s · X` where `S_s` is the one-step history map at time `s`: shift the
/// window up and append the new value row `ℓ_sᵀ X`.
fn one_step_left(sys: &AbstractSystem, i: usize, s: i64, x: &DMatrix<f64>) -> DMatrix<f64> {
    let width = x.nrows();
    let mut out = DMatrix::<f64>::zeros(width, width);
    for row in 1..width {
        for col in 0..width {
            out[(row - 1, col)] = x[(row, col)];
        }
    }
    for col in 0..width {
        let mut acc = 0.0;
        for t in 0..width {
            let j = sys.r() + t as i32;
            acc += sys.linear_coefficient(i, j, s) * x[(t, col)];
        }
        out[(width - 1, col)] = acc;
    }
    out
}

/// `X · S_k`, used by the backward suffix recursion
/// `𝒜_{m,k} = 𝒜_{m,k+1}·S_k`. Exploits the shift-plus-rank-one structure
/// of `S_k`, so one step costs `O((τ+1)²)`.
fn one_step_right(sys: &AbstractSystem, i: usize, k: i64, x: &DMatrix<f64>) -> DMatrix<f64> {
    let width = x.nrows();
    let mut out = DMatrix::<f64>::zeros(width, width);
    let last_col = x.column(width - 1);
    for row in 0..width {
        for col in 0..width {
            let shifted = if col >= 1 { x[(row, col - 1)] } else { 0.0 };
            let j = sys.r() + col as i32;
            out[(row, col)] = shifted + last_col[row] * sys.linear_coefficient(i, j, k);
        }
    }
    out
}

/// The whole suffix family `{𝒜^{(i)}_{m,k}}_{k=n..=m}`, returned so that
/// `family[(k − n) as usize]` is `𝒜_{m,k}`. Costs `O((τ+1)²·(m−n))` total.
pub fn evolution_family(
    sys: &AbstractSystem,
    component: usize,
    m: i64,
    n: i64,
) -> Result<Vec<DMatrix<f64>>, EngineError> {
    check_delta(m, n)?;
    let width = (1 - sys.r()) as usize;
    let count = (m - n) as usize + 1;
    let mut family = vec![DMatrix::<f64>::zeros(0, 0); count];
    family[count - 1] = DMatrix::identity(width, width);
    for k in (n..m).rev() {
        let next = &family[(k - n) as usize + 1];
        family[(k - n) as usize] = one_step_right(sys, component, k, next);
    }
    Ok(family)
}

/// Induced operator norm for the max norm on histories: the maximum
/// absolute row sum.
pub fn operator_norm(op: &EvolutionMatrix) -> f64 {
    max_abs_row_sum(&op.matrix)
}

/// Exact norms `‖𝒜^{(i)}_{anchor+g, anchor}‖` for `g = 0..=steps`, computed
/// by flowing one matrix forward.
pub(crate) fn flow_norms(
    sys: &AbstractSystem,
    component: usize,
    anchor: i64,
    steps: usize,
) -> Vec<f64> {
    let width = (1 - sys.r()) as usize;
    let mut matrix = DMatrix::<f64>::identity(width, width);
    let mut norms = Vec::with_capacity(steps + 1);
    norms.push(1.0);
    for g in 0..steps {
        matrix = one_step_left(sys, component, anchor + g as i64, &matrix);
        norms.push(max_abs_row_sum(&matrix));
    }
    norms
}

pub(crate) fn max_abs_row_sum(matrix: &DMatrix<f64>) -> f64 {
    (0..matrix.nrows())
        .map(|r| matrix.row(r).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// The embedding `Γ : Y → X` placing a value at offset 0 and zero at all
/// past offsets.
pub fn gamma_embed(u: f64, r: i32) -> HistorySegment {
    let mut seg = HistorySegment::zeros(1, r);
    seg.set(0, 0, u);
    seg
}

/// Variation-of-constants reconstruction of the history at `m`:
///
/// ```text
/// x̄_m^{(i)} = 𝒜^{(i)}_{m,n} α_i + Σ_{k=n}^{m−1} 𝒜^{(i)}_{m,k+1} Γ f_k^{(i)}(x̄_k)
/// ```
///
/// The trajectory `x̄(·, n, α)` is computed internally; the result must
/// agree with `abstract_solve(...).history_at(m)`.
pub fn voc_reconstruct(
    sys: &AbstractSystem,
    n: i64,
    alpha: &HistorySegment,
    m: i64,
) -> Result<HistorySegment, EngineError> {
    check_delta(m, n)?;
    let trajectory = abstract_solve(sys, n, alpha, m)?;
    let width = (1 - sys.r()) as usize;
    let mut result = HistorySegment::zeros(sys.dim(), sys.r());
    for i in 0..sys.dim() {
        let family = evolution_family(sys, i, m, n)?;
        // 𝒜_{m,n} α_i
        let alpha_col: Vec<f64> = alpha.component_values(i);
        let mut acc = vec![0.0; width];
        for row in 0..width {
            for col in 0..width {
                acc[row] += family[0][(row, col)] * alpha_col[col];
            }
        }
        // Γ embeds each f value at offset 0, so 𝒜_{m,k+1} Γ u = u · (last column)
        for k in n..m {
            let window = trajectory.history_at(k).expect("k within trajectory");
            let f_value = sys.perturbation(i).eval(k, &window);
            let a = &family[(k - n) as usize + 1];
            for row in 0..width {
                acc[row] += f_value * a[(row, width - 1)];
            }
        }
        for (t, value) in acc.iter().enumerate() {
            result.set(sys.r() + t as i32, i, *value);
        }
    }
    Ok(result)
}
