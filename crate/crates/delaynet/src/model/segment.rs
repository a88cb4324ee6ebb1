//! History segments: the state of a delayed difference equation.
//!
//! A segment is an element of `X^N`: for each component an array of values
//! over the integer offsets `r, r+1, …, 0`, normed by the maximum absolute
//! entry (the product of sup norms used throughout).

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySegment {
    /// Most negative offset (`r ≤ 0`).
    r: i32,
    /// Component count `N ≥ 1`.
    components: usize,
    /// Row-major over offsets: `values[t * components + i]` holds component
    /// `i` at offset `r + t`.
    values: Vec<f64>,
}

impl HistorySegment {
    /// All-zero segment over offsets `r..=0`.
    pub fn zeros(components: usize, r: i32) -> Self {
        assert!(r <= 0, "offset bound must be nonpositive");
        assert!(components >= 1, "need at least one component");
        let rows = (1 - r) as usize;
        HistorySegment {
            r,
            components,
            values: vec![0.0; rows * components],
        }
    }

    /// Fill from a function of `(offset, component)`.
    pub fn from_fn(components: usize, r: i32, mut f: impl FnMut(i32, usize) -> f64) -> Self {
        let mut seg = Self::zeros(components, r);
        for t in 0..seg.rows() {
            let offset = r + t as i32;
            for i in 0..components {
                seg.values[t * components + i] = f(offset, i);
            }
        }
        seg
    }

    /// Same value everywhere.
    pub fn constant(components: usize, r: i32, value: f64) -> Self {
        Self::from_fn(components, r, |_, _| value)
    }

    /// Build from per-offset rows ordered from offset `r` up to offset 0.
    pub fn from_rows(r: i32, rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        if r > 0 {
            return Err(ModelError::InvalidSegment("offset bound must be ≤ 0"));
        }
        if rows.len() != (1 - r) as usize {
            return Err(ModelError::InvalidSegment("row count must equal 1 − r"));
        }
        let components = rows[0].len();
        if components == 0 || rows.iter().any(|row| row.len() != components) {
            return Err(ModelError::InvalidSegment("ragged or empty rows"));
        }
        let values: Vec<f64> = rows.iter().flatten().copied().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("history segment entry"));
        }
        Ok(HistorySegment {
            r,
            components,
            values,
        })
    }

    pub fn r(&self) -> i32 {
        self.r
    }

    pub fn components(&self) -> usize {
        self.components
    }

    fn rows(&self) -> usize {
        (1 - self.r) as usize
    }

    fn index(&self, offset: i32, component: usize) -> usize {
        assert!(
            offset >= self.r && offset <= 0,
            "offset {offset} outside [{}, 0]",
            self.r
        );
        assert!(component < self.components, "component out of range");
        (offset - self.r) as usize * self.components + component
    }

    pub fn get(&self, offset: i32, component: usize) -> f64 {
        self.values[self.index(offset, component)]
    }

    pub fn set(&mut self, offset: i32, component: usize, value: f64) {
        let idx = self.index(offset, component);
        self.values[idx] = value;
    }

    /// `‖·‖`: maximum absolute entry over all components and offsets.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `‖self − other‖` without materializing the difference.
    pub fn sup_distance(&self, other: &HistorySegment) -> f64 {
        assert_eq!(self.r, other.r, "segment shapes differ");
        assert_eq!(self.components, other.components, "segment shapes differ");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn scale(&self, factor: f64) -> HistorySegment {
        HistorySegment {
            r: self.r,
            components: self.components,
            values: self.values.iter().map(|v| factor * v).collect(),
        }
    }

    pub fn add(&self, other: &HistorySegment) -> HistorySegment {
        assert_eq!(self.r, other.r, "segment shapes differ");
        assert_eq!(self.components, other.components, "segment shapes differ");
        HistorySegment {
            r: self.r,
            components: self.components,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Values of one component ordered from offset `r` up to 0.
    pub fn component_values(&self, component: usize) -> Vec<f64> {
        (0..self.rows())
            .map(|t| self.values[t * self.components + component])
            .collect()
    }

    /// Per-offset rows (offset `r` first), e.g. for reports.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|t| self.values[t * self.components..(t + 1) * self.components].to_vec())
            .collect()
    }

    /// Single-component segment from a value column (offset `r` first).
    pub fn from_component_values(r: i32, values: &[f64]) -> Result<Self, ModelError> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Self::from_rows(r, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_segment_has_zero_norm() {
        let seg = HistorySegment::zeros(2, -3);
        assert_eq!(seg.sup_norm(), 0.0);
    }

    #[test]
    fn sup_norm_takes_max_abs() {
        let seg = HistorySegment::from_rows(-1, &[vec![-2.0], vec![1.5]]).unwrap();
        assert_eq!(seg.sup_norm(), 2.0);
    }

    #[test]
    fn sup_norm_matches_exhaustive_scan() {
        // N=2, r=−2: six entries, compare against a plain loop
        let seg = HistorySegment::from_rows(
            -2,
            &[vec![0.3, -1.7], vec![2.1, 0.0], vec![-0.4, 1.05]],
        )
        .unwrap();
        let mut expected = 0.0_f64;
        for offset in -2..=0 {
            for i in 0..2 {
                expected = expected.max(seg.get(offset, i).abs());
            }
        }
        assert_eq!(seg.sup_norm(), expected);
    }

    #[test]
    fn from_rows_rejects_bad_shapes() {
        assert!(HistorySegment::from_rows(-1, &[vec![1.0]]).is_err());
        assert!(HistorySegment::from_rows(0, &[vec![]]).is_err());
        assert!(HistorySegment::from_rows(0, &[vec![f64::NAN]]).is_err());
    }

    proptest! {
        // Norm axioms on random segments: absolute homogeneity is exact in
        // floating point (rounding is monotone), the triangle inequality is
        // asserted up to one rounding step.
        #[test]
        fn norm_axioms(
            vals_a in proptest::collection::vec(-10.0f64..10.0, 6),
            vals_b in proptest::collection::vec(-10.0f64..10.0, 6),
            c in -4.0f64..4.0,
        ) {
            let a = HistorySegment::from_fn(2, -2, |o, i| vals_a[((o + 2) * 2) as usize + i]);
            let b = HistorySegment::from_fn(2, -2, |o, i| vals_b[((o + 2) * 2) as usize + i]);
            prop_assert_eq!(a.scale(c).sup_norm(), c.abs() * a.sup_norm());
            let lhs = a.add(&b).sup_norm();
            let rhs = a.sup_norm() + b.sup_norm();
            prop_assert!(lhs <= rhs * (1.0 + 4.0 * f64::EPSILON));
            prop_assert!((a.sup_norm() == 0.0) == a.component_values(0).iter()
                .chain(a.component_values(1).iter()).all(|&v| v == 0.0));
        }
    }
}
