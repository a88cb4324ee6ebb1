//! M-matrix construction and verification.
//!
//! `ℳ = diag(a_1⁻, …, a_N⁻) − [b_ij⁺·F_j]` is a Z-matrix (nonpositive
//! off-diagonal entries); it is an M-matrix when all eigenvalues have
//! positive real part, equivalently when some `d > 0` satisfies `ℳd > 0`.
//! Verification solves `ℳd = 1` for that witness and cross-checks the
//! verdict spectrally through the splitting `ℳ = sI − B` with `B ≥ 0`:
//! accept iff `ρ(B) < s`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::model::XuWuModel;

use super::CertifyError;

/// Residual threshold above which an LU solution of `ℳd = 1` is treated
/// as a singular solve.
const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Absolute margin required of the spectral verdict `ρ(B) < s`.
const SPECTRAL_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct MMatrix {
    pub matrix: DMatrix<f64>,
    /// `a_i⁻ = inf_m a_i(m)`.
    pub a_minus: Vec<f64>,
    /// `b_ij⁺ = sup_m |b_ij(m)|`.
    pub b_plus: Vec<Vec<f64>>,
    /// `ν_i = a_i⁻·h`.
    pub nu: Vec<f64>,
    /// `θ_i⁺ = sup_m θ_i(m)`.
    pub theta_plus: Vec<f64>,
}

/// Assemble `ℳ` and the derived scalars from the model's sequence bounds
/// (exact for the eventually periodic sequence class).
pub fn build_m(model: &XuWuModel) -> MMatrix {
    let n = model.dim();
    let a_minus: Vec<f64> = (0..n).map(|i| model.rate_inf(i)).collect();
    let b_plus: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| model.weight_sup(i, j)).collect())
        .collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let coupling = b_plus[i][j] * model.lipschitz(j);
        if i == j {
            a_minus[i] - coupling
        } else {
            -coupling
        }
    });
    MMatrix {
        matrix,
        a_minus,
        b_plus,
        nu: (0..n).map(|i| model.nu(i)).collect(),
        theta_plus: (0..n).map(|i| model.theta_sup(i)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessReason {
    Verified,
    PositiveOffDiagonal { i: usize, j: usize },
    Singular,
    NonPositiveWitness { i: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralCheck {
    /// The splitting shift `s` (max diagonal entry).
    pub shift: f64,
    /// Perron root estimate `ρ(B)` from power iteration.
    pub rho: f64,
    pub is_m_matrix: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MMatrixWitness {
    pub is_m_matrix: bool,
    /// Positive witness with `ℳd = 1 > 0`, present exactly on acceptance.
    pub d: Option<Vec<f64>>,
    pub reason: WitnessReason,
    /// Spectral cross-check; absent when the matrix is not even a Z-matrix.
    pub spectral: Option<SpectralCheck>,
}

/// Decide the M-matrix property with the solvable witness `d = ℳ⁻¹·1` and
/// cross-check spectrally. Disagreement between the two paths is an error,
/// not a verdict.
pub fn m_matrix_witness(matrix: &DMatrix<f64>) -> Result<MMatrixWitness, CertifyError> {
    assert_eq!(matrix.nrows(), matrix.ncols(), "matrix must be square");
    let n = matrix.nrows();

    for i in 0..n {
        for j in 0..n {
            if i != j && matrix[(i, j)] > 0.0 {
                return Ok(MMatrixWitness {
                    is_m_matrix: false,
                    d: None,
                    reason: WitnessReason::PositiveOffDiagonal { i, j },
                    spectral: None,
                });
            }
        }
    }

    let ones = DVector::from_element(n, 1.0);
    let scale = matrix.amax().max(1.0);
    let (witness_ok, d, reason) = match matrix.clone().lu().solve(&ones) {
        None => (false, None, WitnessReason::Singular),
        Some(d) => {
            let residual = (matrix * &d - &ones).amax();
            if residual > RESIDUAL_TOLERANCE * scale * d.amax().max(1.0) {
                (false, None, WitnessReason::Singular)
            } else if let Some(i) = (0..n).find(|&i| d[i] <= 0.0) {
                (false, None, WitnessReason::NonPositiveWitness { i })
            } else {
                (true, Some(d.iter().copied().collect()), WitnessReason::Verified)
            }
        }
    };

    let shift = (0..n).map(|i| matrix[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    let b = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            shift - matrix[(i, i)]
        } else {
            -matrix[(i, j)]
        }
    });
    let rho = perron_root(&b);
    let spectral_ok = rho < shift - SPECTRAL_MARGIN * shift.abs().max(1.0);

    if witness_ok != spectral_ok {
        return Err(CertifyError::VerdictDisagreement {
            witness: witness_ok,
            spectral: spectral_ok,
            rho,
            shift,
        });
    }

    Ok(MMatrixWitness {
        is_m_matrix: witness_ok,
        d,
        reason,
        spectral: Some(SpectralCheck {
            shift,
            rho,
            is_m_matrix: spectral_ok,
        }),
    })
}

/// Perron root of a nonnegative matrix by power iteration on `B + I`
/// (the shift removes cycling on periodic sparsity patterns; the root
/// shifts by exactly one).
fn perron_root(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0);
    let mut estimate = f64::NAN;
    let mut stable = 0;
    for _ in 0..200_000 {
        let mut w = b * &v;
        w += &v; // (B + I)·v
        let norm = w.amax();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.amax();
        v = w / norm;
        if (next - estimate).abs() <= 1e-14 * next.max(1.0) {
            stable += 1;
            if stable >= 4 {
                estimate = next;
                break;
            }
        } else {
            stable = 0;
        }
        estimate = next;
    }
    estimate - 1.0
}
