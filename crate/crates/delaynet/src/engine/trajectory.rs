//! Solution trajectories of delayed difference equations.

use std::io::Write;

use crate::model::HistorySegment;

use super::EngineError;

/// A solution `x̄(·, n, ᾱ)` stored on the index range `[n + r, M]`.
///
/// The first `τ + 1` rows are the initial segment; everything after index
/// `n` was produced by the generating recurrence, identified by `source`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    start: i64,
    r: i32,
    components: usize,
    values: Vec<f64>,
    source: String,
}

impl Trajectory {
    /// Seed a trajectory with its initial segment at base index `n`.
    pub(crate) fn seeded(n: i64, alpha: &HistorySegment, source: &str) -> Self {
        let components = alpha.components();
        let r = alpha.r();
        let mut values = Vec::with_capacity(((1 - r) as usize) * components);
        for offset in r..=0 {
            for i in 0..components {
                values.push(alpha.get(offset, i));
            }
        }
        Trajectory {
            start: n,
            r,
            components,
            values,
            source: source.to_owned(),
        }
    }

    pub(crate) fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.components);
        self.values.extend_from_slice(row);
    }

    /// Base index `n`.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// History offset bound `r ≤ 0`.
    pub fn r(&self) -> i32 {
        self.r
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Terminal index `M`.
    pub fn end(&self) -> i64 {
        self.first_index() + self.rows() as i64 - 1
    }

    /// First stored index, `n + r`.
    pub fn first_index(&self) -> i64 {
        self.start + i64::from(self.r)
    }

    fn rows(&self) -> usize {
        self.values.len() / self.components
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value vector `x(m)`.
    pub fn value(&self, m: i64) -> &[f64] {
        assert!(
            m >= self.first_index() && m <= self.end(),
            "index {m} outside stored range [{}, {}]",
            self.first_index(),
            self.end()
        );
        let row = (m - self.first_index()) as usize;
        &self.values[row * self.components..(row + 1) * self.components]
    }

    /// The history `x̄_m` with `x̄_m(j) = x̄(m + j)`, `j = r..0`.
    pub fn history_at(&self, m: i64) -> Result<HistorySegment, EngineError> {
        if m < self.start || m > self.end() {
            return Err(EngineError::IndexOutsideTrajectory {
                m,
                start: self.start,
                end: self.end(),
            });
        }
        Ok(HistorySegment::from_fn(self.components, self.r, |offset, i| {
            self.value(m + i64::from(offset))[i]
        }))
    }

    /// `‖x̄_m − ȳ_m‖` between two trajectories over the same window shape.
    pub fn history_distance(&self, other: &Trajectory, m: i64) -> f64 {
        debug_assert_eq!(self.r, other.r);
        debug_assert_eq!(self.components, other.components);
        let mut worst = 0.0_f64;
        for offset in self.r..=0 {
            let a = self.value(m + i64::from(offset));
            let b = other.value(m + i64::from(offset));
            for i in 0..self.components {
                worst = worst.max((a[i] - b[i]).abs());
            }
        }
        worst
    }

    /// Sup norm of the history at `m` without materializing it.
    pub fn history_norm(&self, m: i64) -> f64 {
        let mut worst = 0.0_f64;
        for offset in self.r..=0 {
            for v in self.value(m + i64::from(offset)) {
                worst = worst.max(v.abs());
            }
        }
        worst
    }

    /// CSV export: header `m,x_1,...,x_N`, one row per stored index,
    /// 17-significant-digit decimal rendering.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        write!(out, "m")?;
        for i in 1..=self.components {
            write!(out, ",x_{i}")?;
        }
        writeln!(out)?;
        for m in self.first_index()..=self.end() {
            write!(out, "{m}")?;
            for v in self.value(m) {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric() -> Trajectory {
        // x(m+1) = 0.5 x(m), α = {1.0 at offset 0, 2.0 at −1}, n = 0
        let alpha = HistorySegment::from_rows(-1, &[vec![2.0], vec![1.0]]).unwrap();
        let mut t = Trajectory::seeded(0, &alpha, "test");
        for m in 0..4 {
            let last = t.value(m)[0];
            t.push_row(&[0.5 * last]);
        }
        t
    }

    #[test]
    fn indices_and_values() {
        let t = geometric();
        assert_eq!(t.first_index(), -1);
        assert_eq!(t.end(), 4);
        assert_eq!(t.value(-1)[0], 2.0);
        assert_eq!(t.value(0)[0], 1.0);
        assert_eq!(t.value(3)[0], 0.125);
    }

    #[test]
    fn history_at_start_returns_initial_segment() {
        let t = geometric();
        let h = t.history_at(0).unwrap();
        assert_eq!(h.get(-1, 0), 2.0);
        assert_eq!(h.get(0, 0), 1.0);
    }

    #[test]
    fn history_at_interior_uses_index_arithmetic() {
        let t = geometric();
        let h = t.history_at(2).unwrap();
        assert_eq!(h.get(-1, 0), 0.5);
        assert_eq!(h.get(0, 0), 0.25);
    }

    #[test]
    fn history_at_rejects_out_of_range() {
        let t = geometric();
        assert!(t.history_at(-1).is_err());
        assert!(t.history_at(5).is_err());
        assert!(t.history_at(4).is_ok());
    }

    #[test]
    fn csv_has_header_and_17_digits() {
        let t = geometric();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "m,x_1");
        let first = lines.next().unwrap();
        assert!(first.starts_with("-1,2.0000000000000000e0"), "{first}");
    }
}
