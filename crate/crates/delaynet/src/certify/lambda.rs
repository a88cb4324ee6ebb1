//! The contraction coefficient λ and its truncated empirical suprema.
//!
//! For operator bounds `a^{(i)}_{m,n}`, weights `a'_{m,n}` and component
//! Lipschitz budgets `lip_i(k)`,
//!
//! ```text
//! λ = max_i  sup_{(m,n) ∈ Δ}  (1/a'_{m,n}) Σ_{k=n}^{m−1} a^{(i)}_{m,k+1} · a'_{k,n} · lip_i(k)
//! ```
//!
//! The supremum is truncated to gaps `m − n ≤ W`. The base index `n` only
//! enters through the coefficient sequences, which are eventually periodic,
//! so scanning one prefix plus one joint cycle of bases covers all of Δ
//! exactly; a convergence flag reports whether the truncation in the gap
//! direction has stabilized.

use serde::Serialize;

use crate::engine::{self, AbstractSystem, EvolutionMatrix};
use crate::model::{HopfieldModel, SequenceSpec};

use super::{CertMode, Certificate, CertificateKind, CertifyError, RateBound};

/// Cap on the number of base indices scanned (prefix + joint cycle).
const MAX_SCAN_BASES: usize = 256;

/// Tolerance for the monotone-tail convergence flag.
const TAIL_TOLERANCE: f64 = 1e-9;

/// Relative backoff of the selected rate from the feasibility boundary.
/// At the boundary the claimed envelope can touch the true decay with
/// equality (λ = 0 models), where rounding drift in long simulations
/// pushes measured ratios marginally past 1; the backoff keeps the
/// envelope strictly slack.
const RATE_BACKOFF: f64 = 5e-3;

/// Coefficient product `a^{(i)}_{m,n}` of the linear part.
///
/// Paper mode: `Π_{s=n}^{m−1} c_i(s)` (empty product = 1). Strict mode:
/// `Π_{s=n}^{max(m+r,n)−1} c_i(s)`, the exact history-space operator norm
/// of the diagonal linear flow.
pub fn product_bound(
    model: &HopfieldModel,
    i: usize,
    m: i64,
    n: i64,
    mode: CertMode,
) -> Result<f64, CertifyError> {
    if m < n || n < 0 {
        return Err(CertifyError::NotInDelta { m, n });
    }
    let upper = match mode {
        CertMode::Paper => m,
        CertMode::Strict => (m + i64::from(model.r())).max(n),
    };
    let mut product = 1.0;
    for s in n..upper {
        product *= model.coefficient(i, s);
    }
    Ok(product)
}

/// One table cell of the truncated supremum: the value at a pair `(m, n)`,
/// maximized over components.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaCell {
    pub m: i64,
    pub n: i64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    /// The truncated supremum λ̂.
    pub lambda: f64,
    /// Per-component suprema λ̂_i.
    pub per_component: Vec<f64>,
    /// `(component, m, n)` attaining λ̂.
    pub argmax: Option<(usize, i64, i64)>,
    /// λ̂ restricted to gaps `m − n ≤ w`, for `w = 0..=W`. Nondecreasing.
    pub by_width: Vec<f64>,
    /// Per-pair table, maximized over components.
    pub entries: Vec<LambdaCell>,
    /// `sup a^{(i)}_{m,n} / a'_{m,n}` over the scanned window: 1 when the
    /// weights dominate the operator bounds (a hypothesis of the stability
    /// theorem), larger when they fail to.
    pub bound_overshoot: f64,
    pub overshoot_argmax: Option<(usize, i64, i64)>,
    /// `bound_overshoot ≤ 1` up to rounding.
    pub domination_ok: bool,
    /// Whether λ̂ moved by less than 1e−9 over the last quarter of widths.
    pub converged_tail: bool,
    /// Base indices scanned (prefix + one joint cycle, capped).
    pub bases_scanned: usize,
    /// True when the joint cycle exceeded the cap and the base scan is a
    /// heuristic rather than exact.
    pub cycle_capped: bool,
}

/// How to evaluate the per-component operator bounds `a^{(i)}_{m,k}`.
pub enum BoundSpec<'a> {
    /// Coefficient products of a diagonal linear part.
    Products {
        c: &'a [SequenceSpec],
        r: i32,
        mode: CertMode,
    },
    /// Exact operator norms of the system's evolution matrices.
    ExactNorms,
    /// Caller-supplied per-component tables over the gap `m − k`,
    /// extended by their last entry.
    Tables(&'a [Vec<f64>]),
}

/// Truncated empirical λ̂ for the general model: `lip_i(k) = Σ_j H_ij(k)`
/// with the products of `c_i` as operator bounds.
pub fn lambda_empirical(
    model: &HopfieldModel,
    aprime: &RateBound,
    window: usize,
    mode: CertMode,
) -> LambdaReport {
    let mut specs: Vec<&SequenceSpec> = model.coefficients().iter().collect();
    for i in 0..model.dim() {
        for j in 0..model.dim() {
            specs.push(model.envelope_spec(i, j));
        }
    }
    let (bases, capped) = scan_bases(&specs);
    products_scan(
        model.dim(),
        model.coefficients(),
        model.r(),
        mode,
        &|i, k| model.lip_row(i, k),
        aprime,
        window,
        &bases,
        capped,
    )
}

/// Truncated empirical λ̂ for an abstract system: `lip_i(k) = Lip(f_k^{(i)})`.
pub fn lambda_abstract(
    sys: &AbstractSystem,
    bounds: &BoundSpec<'_>,
    aprime: &RateBound,
    window: usize,
) -> LambdaReport {
    let mut specs: Vec<&SequenceSpec> = Vec::new();
    for row in sys.linear_specs() {
        specs.extend(row.iter());
    }
    for i in 0..sys.dim() {
        specs.push(sys.perturbation(i).lipschitz_spec());
    }
    let (bases, capped) = scan_bases(&specs);
    lambda_abstract_on_bases(sys, bounds, aprime, window, &bases, capped)
}

/// As [`lambda_abstract`] but restricted to explicit base indices (used by
/// the fixed-point iteration, where only one base matters).
pub(crate) fn lambda_abstract_at(
    sys: &AbstractSystem,
    bounds: &BoundSpec<'_>,
    aprime: &RateBound,
    window: usize,
    bases: &[i64],
) -> LambdaReport {
    lambda_abstract_on_bases(sys, bounds, aprime, window, bases, false)
}

fn lambda_abstract_on_bases(
    sys: &AbstractSystem,
    bounds: &BoundSpec<'_>,
    aprime: &RateBound,
    window: usize,
    bases: &[i64],
    capped: bool,
) -> LambdaReport {
    let lip = |i: usize, k: i64| sys.lipschitz(i, k);
    match bounds {
        BoundSpec::Products { c, r, mode } => {
            products_scan(sys.dim(), c, *r, *mode, &lip, aprime, window, bases, capped)
        }
        BoundSpec::ExactNorms => {
            let eval = |i: usize, base: i64| -> Vec<Vec<f64>> {
                // norms_from[k − base][m − k] = ‖𝒜_{m,k}‖
                (0..=window)
                    .map(|offset| {
                        engine::flow_norms(sys, i, base + offset as i64, window - offset)
                    })
                    .collect()
            };
            generic_scan(
                sys.dim(),
                &|i, base| {
                    let norms = eval(i, base);
                    Box::new(move |m: i64, k: i64| {
                        norms[(k - base) as usize][(m - k) as usize]
                    })
                },
                &lip,
                aprime,
                window,
                bases,
                capped,
            )
        }
        BoundSpec::Tables(tables) => generic_scan(
            sys.dim(),
            &|i, _base| {
                let table = tables[i].clone();
                Box::new(move |m: i64, k: i64| {
                    let gap = (m - k) as usize;
                    table[gap.min(table.len() - 1)]
                })
            },
            &lip,
            aprime,
            window,
            bases,
            capped,
        ),
    }
}

/// Base indices covering Δ exactly: one joint prefix plus one joint cycle
/// of all involved sequences, capped at [`MAX_SCAN_BASES`].
fn scan_bases(specs: &[&SequenceSpec]) -> (Vec<i64>, bool) {
    let prefix = specs.iter().map(|s| s.prefix_len()).max().unwrap_or(0);
    let mut cycle: usize = 1;
    for s in specs {
        cycle = lcm(cycle, s.cycle_len());
        if cycle > MAX_SCAN_BASES {
            break;
        }
    }
    let capped = prefix + cycle > MAX_SCAN_BASES;
    let count = (prefix + cycle).min(MAX_SCAN_BASES);
    ((0..count as i64).collect(), capped)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    (a / gcd(a, b)).saturating_mul(b)
}

struct ScanAccumulator {
    window: usize,
    per_component: Vec<f64>,
    argmax: Option<(usize, i64, i64)>,
    lambda: f64,
    width_max: Vec<f64>,
    cell_max: Vec<Vec<f64>>, // [base index][gap]
    overshoot: f64,
    overshoot_argmax: Option<(usize, i64, i64)>,
}

impl ScanAccumulator {
    fn new(components: usize, window: usize, bases: usize) -> Self {
        ScanAccumulator {
            window,
            per_component: vec![0.0; components],
            argmax: None,
            lambda: 0.0,
            width_max: vec![0.0; window + 1],
            cell_max: vec![vec![0.0; window + 1]; bases],
            overshoot: 0.0,
            overshoot_argmax: None,
        }
    }

    fn record(&mut self, i: usize, base_idx: usize, base: i64, gap: usize, value: f64) {
        let m = base + gap as i64;
        if value > self.per_component[i] {
            self.per_component[i] = value;
        }
        if value > self.lambda {
            self.lambda = value;
            self.argmax = Some((i, m, base));
        }
        if value > self.width_max[gap] {
            self.width_max[gap] = value;
        }
        if value > self.cell_max[base_idx][gap] {
            self.cell_max[base_idx][gap] = value;
        }
    }

    fn record_overshoot(&mut self, i: usize, base: i64, gap: usize, ratio: f64) {
        if ratio > self.overshoot {
            self.overshoot = ratio;
            self.overshoot_argmax = Some((i, base + gap as i64, base));
        }
    }

    fn finish(self, bases: &[i64], capped: bool) -> LambdaReport {
        let mut by_width = Vec::with_capacity(self.window + 1);
        let mut running = 0.0_f64;
        for w in 0..=self.window {
            running = running.max(self.width_max[w]);
            by_width.push(running);
        }
        let tail_start = (self.window * 3) / 4;
        let converged_tail = by_width[self.window] - by_width[tail_start] < TAIL_TOLERANCE;
        let entries = bases
            .iter()
            .enumerate()
            .flat_map(|(bi, &base)| {
                let cells = &self.cell_max[bi];
                (0..=self.window).map(move |gap| LambdaCell {
                    m: base + gap as i64,
                    n: base,
                    value: cells[gap],
                })
            })
            .collect();
        LambdaReport {
            lambda: self.lambda,
            per_component: self.per_component,
            argmax: self.argmax,
            by_width,
            entries,
            bound_overshoot: self.overshoot,
            overshoot_argmax: self.overshoot_argmax,
            domination_ok: self.overshoot <= 1.0 + 1e-12,
            converged_tail,
            bases_scanned: bases.len(),
            cycle_capped: capped,
        }
    }
}

/// Fast path for product bounds. Per base the inner sums satisfy
/// `S(m+1,n) = c(m)·S(m,n) + a'_{m,n}·lip(m)`, and the strict-mode sum
/// decomposes into the paper sum at `m + r` plus a weighted tail with unit
/// operator bounds, so the whole scan is linear in the window.
#[allow(clippy::too_many_arguments)]
fn products_scan(
    components: usize,
    c: &[SequenceSpec],
    r: i32,
    mode: CertMode,
    lip: &dyn Fn(usize, i64) -> f64,
    aprime: &RateBound,
    window: usize,
    bases: &[i64],
    capped: bool,
) -> LambdaReport {
    let mut acc = ScanAccumulator::new(components, window, bases.len());
    for i in 0..components {
        for (base_idx, &base) in bases.iter().enumerate() {
            let mut s_paper = vec![0.0_f64; window + 1];
            let mut products = vec![1.0_f64; window + 1];
            for d in 0..window {
                let m = base + d as i64;
                let coeff = c[i].eval(m);
                s_paper[d + 1] = coeff * s_paper[d] + aprime.eval(m, base) * lip(i, m);
                products[d + 1] = products[d] * coeff;
            }
            for d in 0..=window {
                let m = base + d as i64;
                let weight = aprime.eval(m, base);
                let (sum, bound) = match mode {
                    CertMode::Paper => (s_paper[d], products[d]),
                    CertMode::Strict => {
                        let dr = d as i64 + i64::from(r);
                        let head = if dr >= 0 { s_paper[dr as usize] } else { 0.0 };
                        // the ≤ |r| unit-bound terms are summed directly;
                        // a prefix-sum difference would cancel away the
                        // (exponentially small) head and tail magnitudes
                        let mut tail = 0.0;
                        for k in dr.max(0) as usize..d {
                            let km = base + k as i64;
                            tail += aprime.eval(km, base) * lip(i, km);
                        }
                        (head + tail, products[dr.max(0) as usize])
                    }
                };
                acc.record(i, base_idx, base, d, sum / weight);
                acc.record_overshoot(i, base, d, bound / weight);
            }
        }
    }
    acc.finish(bases, capped)
}

/// Direct evaluation for arbitrary operator bounds (quadratic in the
/// window).
#[allow(clippy::type_complexity)]
fn generic_scan(
    components: usize,
    prepare: &dyn Fn(usize, i64) -> Box<dyn Fn(i64, i64) -> f64>,
    lip: &dyn Fn(usize, i64) -> f64,
    aprime: &RateBound,
    window: usize,
    bases: &[i64],
    capped: bool,
) -> LambdaReport {
    let mut acc = ScanAccumulator::new(components, window, bases.len());
    for i in 0..components {
        for (base_idx, &base) in bases.iter().enumerate() {
            let bound = prepare(i, base);
            for d in 0..=window {
                let m = base + d as i64;
                let weight = aprime.eval(m, base);
                let mut sum = 0.0;
                for k in base..m {
                    sum += bound(m, k + 1) * aprime.eval(k, base) * lip(i, k);
                }
                acc.record(i, base_idx, base, d, sum / weight);
                acc.record_overshoot(i, base, d, bound(m, base) / weight);
            }
        }
    }
    acc.finish(bases, capped)
}

/// Search the exponential rate family for the largest rate whose λ̂ stays
/// at or below `lambda_target`, and return the certificate at that rate.
///
/// In strict mode the search additionally keeps the envelope constant
/// `C = 1/(1 − λ)` at or above the norm overshoot `sup a^{(i)}_{m,n}/a'_{m,n}`.
/// Histories keep their initial data verbatim for `m − n ≤ τ`, so an
/// envelope with a smaller constant is violated by the linear part alone;
/// the guard makes the claimed envelope cover those gaps.
pub fn empirical_certificate(
    model: &HopfieldModel,
    mode: CertMode,
    lambda_target: f64,
    window: usize,
) -> Result<Certificate, CertifyError> {
    if !(lambda_target > 0.0 && lambda_target < 1.0) {
        return Err(CertifyError::InvalidLambdaTarget(lambda_target));
    }
    // rates must stay below ν = min_i inf_m (−ln c_i(m)), else the products
    // themselves outgrow the weights
    let nu_min = model
        .coefficients()
        .iter()
        .map(|c| -c.sup().ln())
        .fold(f64::INFINITY, f64::min);

    let report_at = |mu: f64| lambda_empirical(model, &RateBound::exponential(mu), window, mode);
    let feasible = |report: &LambdaReport| -> bool {
        report.lambda <= lambda_target
            && (mode == CertMode::Paper
                || report.bound_overshoot * (1.0 - report.lambda) <= 1.0 + 1e-12)
    };

    let floor_report = report_at(nu_min * 1e-9);
    if !feasible(&floor_report) {
        if floor_report.lambda >= 1.0 {
            return Err(CertifyError::NotContractive {
                lambda_floor: floor_report.lambda,
            });
        }
        return Err(CertifyError::LambdaTargetUnreachable {
            floor: floor_report.lambda,
            target: lambda_target,
        });
    }

    // coarse grid from above, then bisect the feasibility boundary
    const GRID: usize = 48;
    let mut lo = nu_min * 1e-9;
    let mut hi = nu_min;
    for k in (1..=GRID).rev() {
        let mu = nu_min * k as f64 / (GRID as f64 + 1.0);
        if feasible(&report_at(mu)) {
            lo = mu;
            hi = nu_min * (k + 1) as f64 / (GRID as f64 + 1.0);
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(&report_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = lo * (1.0 - RATE_BACKOFF);
    let report = report_at(mu);

    // supremal admissible rate (λ < 1 alone), for reporting
    let mut slo = mu;
    let mut shi = nu_min;
    for _ in 0..60 {
        let mid = 0.5 * (slo + shi);
        if report_at(mid).lambda < 1.0 {
            slo = mid;
        } else {
            shi = mid;
        }
    }

    Ok(Certificate {
        kind: CertificateKind::EmpiricalLambda,
        mode,
        lambda: report.lambda,
        mu,
        c: 1.0 / (1.0 - report.lambda),
        mu_supremal: Some(slo),
        d: None,
        argmax_pair: report.argmax,
        converged: report.converged_tail,
        margins: report.per_component.iter().map(|l| 1.0 - l).collect(),
        norm_overshoot: Some(report.bound_overshoot),
        scale_factor: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormAuditEntry {
    pub m: i64,
    pub n: i64,
    /// Exact history-space operator norm of `𝒜^{(i)}_{m,n}`.
    pub exact: f64,
    /// The literal coefficient product `Π_{s=n}^{m−1} c_i(s)`.
    pub paper: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormAudit {
    pub component: usize,
    pub entries: Vec<NormAuditEntry>,
    /// Every `(m, n)` where the exact norm exceeds the product bound.
    pub flagged: Vec<(i64, i64)>,
}

/// Compare the exact evolution-operator norms of the model's linear part
/// against the coefficient products, flagging every pair where the product
/// understates the norm. With delays present, the exact norm stays 1 while
/// `m − n ≤ τ` and equals the product truncated at `m + r` thereafter, so
/// the literal product bound is exceeded at every positive gap.
pub fn operator_norm_audit(
    model: &HopfieldModel,
    component: usize,
    n: i64,
    window: usize,
) -> Result<NormAudit, CertifyError> {
    let sys = AbstractSystem::diagonal_linear(model.r(), model.coefficients())?;
    let mut entries = Vec::with_capacity(window + 1);
    let mut flagged = Vec::new();
    for gap in 0..=window {
        let m = n + gap as i64;
        let op: EvolutionMatrix = engine::evolution_matrix(&sys, component, m, n)?;
        let exact = engine::operator_norm(&op);
        let paper = product_bound(model, component, m, n, CertMode::Paper)?;
        let exceeded = exact > paper * (1.0 + 1e-12);
        if exceeded {
            flagged.push((m, n));
        }
        entries.push(NormAuditEntry {
            m,
            n,
            exact,
            paper,
            exceeded,
        });
    }
    Ok(NormAudit {
        component,
        entries,
        flagged,
    })
}
