//! Bounded real sequences on ℕ₀ used for coefficients, inputs, envelopes
//! and delays.
//!
//! Every sequence here is *eventually periodic*: an optional finite prefix
//! followed by a repeating cycle. That class is closed under pointwise maps
//! and pointwise combinations of two sequences, which is what keeps the
//! model transformations (discretization, representation changes,
//! coordinate rescaling) exact instead of sampled.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Cap on the combined cycle length produced by [`SequenceSpec::zip`].
///
/// Joint cycles are least common multiples of the operand cycles; the cap
/// keeps pathological co-prime period pairs from exploding memory. A capped
/// result repeats the truncated cycle and is no longer pointwise exact.
pub const MAX_ZIP_CYCLE: usize = 4096;

/// A real sequence `m ↦ s(m)` defined for every `m ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceSpec {
    /// The same value at every index.
    Constant { value: f64 },
    /// `values[m mod period]`.
    Periodic { values: Vec<f64> },
    /// Explicit values for `m < values.len()`, the constant `tail` afterwards.
    Table { values: Vec<f64>, tail: f64 },
    /// Explicit prefix, then an endlessly repeating cycle. Produced by model
    /// transformations; accepted in model files as well.
    PrefixPeriodic { prefix: Vec<f64>, cycle: Vec<f64> },
}

impl SequenceSpec {
    pub fn constant(value: f64) -> Self {
        SequenceSpec::Constant { value }
    }

    pub fn periodic(values: Vec<f64>) -> Self {
        SequenceSpec::Periodic { values }
    }

    pub fn table(values: Vec<f64>, tail: f64) -> Self {
        SequenceSpec::Table { values, tail }
    }

    /// Structural validity: non-empty cycles/tables and finite entries.
    pub fn check(&self) -> Result<(), ModelError> {
        let non_finite = |vs: &[f64]| vs.iter().any(|v| !v.is_finite());
        match self {
            SequenceSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(ModelError::NonFinite("constant sequence value"));
                }
            }
            SequenceSpec::Periodic { values } => {
                if values.is_empty() {
                    return Err(ModelError::EmptySequence("periodic"));
                }
                if non_finite(values) {
                    return Err(ModelError::NonFinite("periodic sequence value"));
                }
            }
            SequenceSpec::Table { values, tail } => {
                if values.is_empty() {
                    return Err(ModelError::EmptySequence("table"));
                }
                if non_finite(values) || !tail.is_finite() {
                    return Err(ModelError::NonFinite("table sequence value"));
                }
            }
            SequenceSpec::PrefixPeriodic { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err(ModelError::EmptySequence("prefix-periodic"));
                }
                if non_finite(prefix) || non_finite(cycle) {
                    return Err(ModelError::NonFinite("prefix-periodic sequence value"));
                }
            }
        }
        Ok(())
    }

    /// Value at index `m ≥ 0`.
    pub fn eval(&self, m: i64) -> f64 {
        assert!(m >= 0, "sequence index must be nonnegative, got {m}");
        let m = m as usize;
        match self {
            SequenceSpec::Constant { value } => *value,
            SequenceSpec::Periodic { values } => values[m % values.len()],
            SequenceSpec::Table { values, tail } => {
                if m < values.len() {
                    values[m]
                } else {
                    *tail
                }
            }
            SequenceSpec::PrefixPeriodic { prefix, cycle } => {
                if m < prefix.len() {
                    prefix[m]
                } else {
                    cycle[(m - prefix.len()) % cycle.len()]
                }
            }
        }
    }

    /// Length of the non-repeating head.
    pub fn prefix_len(&self) -> usize {
        match self {
            SequenceSpec::Constant { .. } | SequenceSpec::Periodic { .. } => 0,
            SequenceSpec::Table { values, .. } => values.len(),
            SequenceSpec::PrefixPeriodic { prefix, .. } => prefix.len(),
        }
    }

    /// Length of the repeating cycle (1 for constants and table tails).
    pub fn cycle_len(&self) -> usize {
        match self {
            SequenceSpec::Constant { .. } | SequenceSpec::Table { .. } => 1,
            SequenceSpec::Periodic { values } => values.len(),
            SequenceSpec::PrefixPeriodic { cycle, .. } => cycle.len(),
        }
    }

    fn scan<T>(&self, init: T, mut f: impl FnMut(T, f64) -> T) -> T {
        let mut acc = init;
        for m in 0..(self.prefix_len() + self.cycle_len()) {
            acc = f(acc, self.eval(m as i64));
        }
        acc
    }

    /// Exact infimum over all `m ≥ 0` (attained; the range is finite).
    pub fn inf(&self) -> f64 {
        self.scan(f64::INFINITY, f64::min)
    }

    /// Exact supremum over all `m ≥ 0`.
    pub fn sup(&self) -> f64 {
        self.scan(f64::NEG_INFINITY, f64::max)
    }

    /// Exact supremum of `|s(m)|`.
    pub fn sup_abs(&self) -> f64 {
        self.scan(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise image under `f`, preserving the spec kind.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> SequenceSpec {
        match self {
            SequenceSpec::Constant { value } => SequenceSpec::Constant { value: f(*value) },
            SequenceSpec::Periodic { values } => SequenceSpec::Periodic {
                values: values.iter().map(|&v| f(v)).collect(),
            },
            SequenceSpec::Table { values, tail } => SequenceSpec::Table {
                values: values.iter().map(|&v| f(v)).collect(),
                tail: f(*tail),
            },
            SequenceSpec::PrefixPeriodic { prefix, cycle } => SequenceSpec::PrefixPeriodic {
                prefix: prefix.iter().map(|&v| f(v)).collect(),
                cycle: cycle.iter().map(|&v| f(v)).collect(),
            },
        }
    }

    /// Pointwise combination `m ↦ f(self(m), other(m))`, exact whenever the
    /// joint cycle fits under [`MAX_ZIP_CYCLE`].
    pub fn zip(&self, other: &SequenceSpec, mut f: impl FnMut(f64, f64) -> f64) -> SequenceSpec {
        let prefix_len = self.prefix_len().max(other.prefix_len());
        let cycle_len = lcm(self.cycle_len(), other.cycle_len());
        // LCM overflow / cap fallback: tabulate a long head and keep the value
        // at the cap as tail. Only reachable with adversarial co-prime periods.
        let cycle_len = cycle_len.min(MAX_ZIP_CYCLE);
        let prefix: Vec<f64> = (0..prefix_len)
            .map(|m| f(self.eval(m as i64), other.eval(m as i64)))
            .collect();
        let cycle: Vec<f64> = (prefix_len..prefix_len + cycle_len)
            .map(|m| f(self.eval(m as i64), other.eval(m as i64)))
            .collect();
        simplify(prefix, cycle)
    }

    /// First index where `s(m + omega) ≠ s(m)`, or `None` when the sequence
    /// is `omega`-periodic. The scan over one prefix plus one cycle is exact
    /// for this sequence class.
    pub fn periodicity_defect(&self, omega: u32) -> Option<(i64, f64, f64)> {
        let omega = i64::from(omega);
        let scan = (self.prefix_len() + self.cycle_len()) as i64;
        for m in 0..scan {
            let here = self.eval(m);
            let shifted = self.eval(m + omega);
            if here != shifted {
                return Some((m, here, shifted));
            }
        }
        None
    }
}

/// Collapse a prefix/cycle pair to the simplest equivalent kind.
fn simplify(prefix: Vec<f64>, cycle: Vec<f64>) -> SequenceSpec {
    let uniform_cycle = cycle.windows(2).all(|w| w[0] == w[1]);
    match (prefix.is_empty(), uniform_cycle) {
        (true, true) => SequenceSpec::Constant { value: cycle[0] },
        (true, false) => SequenceSpec::Periodic { values: cycle },
        (false, true) => SequenceSpec::Table {
            values: prefix,
            tail: cycle[0],
        },
        (false, false) => SequenceSpec::PrefixPeriodic { prefix, cycle },
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_covers_all_kinds() {
        let c = SequenceSpec::constant(2.5);
        assert_eq!(c.eval(0), 2.5);
        assert_eq!(c.eval(1000), 2.5);

        let p = SequenceSpec::periodic(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(0), 1.0);
        assert_eq!(p.eval(4), 2.0);

        let t = SequenceSpec::table(vec![5.0, 6.0], -1.0);
        assert_eq!(t.eval(1), 6.0);
        assert_eq!(t.eval(2), -1.0);
        assert_eq!(t.eval(99), -1.0);

        let pp = SequenceSpec::PrefixPeriodic {
            prefix: vec![9.0],
            cycle: vec![1.0, 2.0],
        };
        assert_eq!(pp.eval(0), 9.0);
        assert_eq!(pp.eval(1), 1.0);
        assert_eq!(pp.eval(2), 2.0);
        assert_eq!(pp.eval(3), 1.0);
    }

    #[test]
    fn inf_sup_are_exact() {
        let t = SequenceSpec::table(vec![5.0, -6.0], 0.5);
        assert_eq!(t.inf(), -6.0);
        assert_eq!(t.sup(), 5.0);
        assert_eq!(t.sup_abs(), 6.0);

        let p = SequenceSpec::periodic(vec![0.2, 0.7]);
        assert_eq!(p.inf(), 0.2);
        assert_eq!(p.sup(), 0.7);
    }

    #[test]
    fn zip_is_pointwise_exact() {
        let t = SequenceSpec::table(vec![1.0, 2.0, 3.0], 0.0);
        let p = SequenceSpec::periodic(vec![1.0, -1.0]);
        let z = t.zip(&p, |a, b| a * b);
        for m in 0..40 {
            assert_eq!(z.eval(m), t.eval(m) * p.eval(m), "mismatch at m={m}");
        }
    }

    #[test]
    fn zip_simplifies_kinds() {
        let a = SequenceSpec::constant(2.0);
        let b = SequenceSpec::constant(3.0);
        assert_eq!(a.zip(&b, |x, y| x + y), SequenceSpec::constant(5.0));

        let p = SequenceSpec::periodic(vec![1.0, 2.0]);
        match a.zip(&p, |x, y| x * y) {
            SequenceSpec::Periodic { values } => assert_eq!(values, vec![2.0, 4.0]),
            other => panic!("expected periodic, got {other:?}"),
        }
    }

    #[test]
    fn periodicity_defect_finds_first_mismatch() {
        let p = SequenceSpec::periodic(vec![1.0, 2.0]);
        assert_eq!(p.periodicity_defect(2), None);
        assert_eq!(p.periodicity_defect(4), None);
        assert_eq!(p.periodicity_defect(3), Some((0, 1.0, 2.0)));

        let c = SequenceSpec::constant(7.0);
        for omega in 1..5 {
            assert_eq!(c.periodicity_defect(omega), None);
        }

        // finite table whose tail does not match the head
        let t = SequenceSpec::table(vec![1.0, 2.0], 2.0);
        assert_eq!(t.periodicity_defect(2), Some((0, 1.0, 2.0)));
    }

    #[test]
    fn check_rejects_bad_specs() {
        assert!(SequenceSpec::periodic(vec![]).check().is_err());
        assert!(SequenceSpec::constant(f64::NAN).check().is_err());
        assert!(SequenceSpec::table(vec![1.0], f64::INFINITY).check().is_err());
    }
}
