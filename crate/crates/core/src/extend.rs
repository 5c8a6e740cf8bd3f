//! Continuous piecewise-linear extension of table functions to the real line.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::TableFunction;
use crate::geometry::Level;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tails {
    #[default]
    Constant,
}

/// A continuous piecewise-linear function with constant tails.
///
/// An empty breakpoint list is the zero function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPWLinear")]
pub struct PWLinear {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    tails: Tails,
}

#[derive(Deserialize)]
struct RawPWLinear {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    #[allow(dead_code)]
    tails: Tails,
}

impl TryFrom<RawPWLinear> for PWLinear {
    type Error = Error;

    fn try_from(raw: RawPWLinear) -> Result<Self> {
        PWLinear::new(raw.breakpoints, raw.values)
    }
}

impl PWLinear {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "breakpoints and values must be finite".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PWLinear {
            breakpoints,
            values,
            tails: Tails::Constant,
        })
    }

    pub fn zero() -> Self {
        PWLinear {
            breakpoints: Vec::new(),
            values: Vec::new(),
            tails: Tails::Constant,
        }
    }

    pub fn constant(value: f64) -> Self {
        PWLinear {
            breakpoints: vec![0.0],
            values: vec![value],
            tails: Tails::Constant,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tails(&self) -> Tails {
        self.tails
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_pwl(self, x)
    }

    /// Sup norm on the whole line, attained at a breakpoint.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise sum, breakpoints merged.
    pub fn add(&self, other: &PWLinear) -> PWLinear {
        let merged: BTreeSet<u64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .map(|b| ordered_bits(*b))
            .collect();
        let breakpoints: Vec<f64> = merged.into_iter().map(from_ordered_bits).collect();
        let values = breakpoints
            .iter()
            .map(|&b| self.eval(b) + other.eval(b))
            .collect();
        PWLinear {
            breakpoints,
            values,
            tails: Tails::Constant,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

// Order-preserving bijection between finite f64 (with -0.0 folded into 0.0) and u64.
fn ordered_bits(x: f64) -> u64 {
    let x = if x == 0.0 { 0.0 } else { x };
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

fn from_ordered_bits(b: u64) -> f64 {
    if b >> 63 == 1 {
        f64::from_bits(b & !(1 << 63))
    } else {
        f64::from_bits(!b)
    }
}

pub fn eval_pwl(g: &PWLinear, x: f64) -> f64 {
    let bp = &g.breakpoints;
    let Some(&first) = bp.first() else {
        return 0.0;
    };
    if x <= first {
        return g.values[0];
    }
    let last = bp.len() - 1;
    if x >= bp[last] {
        return g.values[last];
    }
    // bp[i - 1] < x <= bp[i]
    let i = bp.partition_point(|&b| b < x);
    if bp[i] == x {
        return g.values[i];
    }
    let (x0, x1) = (bp[i - 1], bp[i]);
    let (y0, y1) = (g.values[i - 1], g.values[i]);
    let t = (x - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}

/// Extends `table` to the line.
///
/// Consecutive table points closer than `1 / 2^(n-1)` are joined linearly.
/// Across a wider gap the left value is held up to `j / 2^n` and the right
/// value from `(j + 1) / 2^n`, where `j` is the smallest column strictly
/// inside the gap that `projected_cells` does not contain; the function is
/// linear across that column.
pub fn extend_pwl(
    table: &TableFunction,
    level: Level,
    projected_cells: &BTreeSet<i64>,
) -> Result<PWLinear> {
    if table.is_empty() {
        return Err(Error::InvalidParameter("table function is empty".into()));
    }
    let side = level.cell_side();
    let wide = 2.0 * side;
    let mut breakpoints = Vec::with_capacity(table.len() * 2);
    let mut values = Vec::with_capacity(table.len() * 2);
    breakpoints.push(table.domain[0]);
    values.push(table.values[0]);
    for k in 1..table.len() {
        let (left, right) = (table.domain[k - 1], table.domain[k]);
        let (lv, rv) = (table.values[k - 1], table.values[k]);
        if right - left >= wide {
            let j = empty_column(left, right, level, projected_cells)?;
            let start = j as f64 * side;
            let end = (j + 1) as f64 * side;
            breakpoints.push(start);
            values.push(lv);
            if end < right {
                breakpoints.push(end);
                values.push(rv);
            }
        }
        breakpoints.push(right);
        values.push(rv);
    }
    PWLinear::new(breakpoints, values)
}

fn empty_column(
    left: f64,
    right: f64,
    level: Level,
    projected_cells: &BTreeSet<i64>,
) -> Result<i64> {
    let side = level.cell_side();
    // Column `first` starts strictly right of `left`.
    let first = crate::geometry::column_index(left, level)? + 1;
    let mut j = first;
    for &c in projected_cells.range(first..) {
        if c != j {
            break;
        }
        j += 1;
    }
    if (j + 1) as f64 * side > right {
        return Err(Error::EmptyColumnNotFound {
            left,
            right,
            level: level.get(),
        });
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(pairs: &[(f64, f64)]) -> TableFunction {
        TableFunction {
            domain: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        }
    }

    fn lv(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    fn cols(c: &[i64]) -> BTreeSet<i64> {
        c.iter().copied().collect()
    }

    #[test]
    fn single_point_is_constant() {
        let g = extend_pwl(&table(&[(0.0, 1.0)]), lv(3), &cols(&[0])).unwrap();
        assert_eq!(g.eval(-100.0), 1.0);
        assert_eq!(g.eval(100.0), 1.0);
    }

    #[test]
    fn narrow_gap_is_linear() {
        let g = extend_pwl(&table(&[(0.0, 0.0), (0.1, 0.3)]), lv(4), &cols(&[0, 1])).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.1]);
        assert!((g.eval(0.05) - 0.15).abs() < 1e-15);
        assert_eq!(g.eval(-1.0), 0.0);
        assert_eq!(g.eval(1.0), 0.3);
    }

    #[test]
    fn wide_gap_bridges_across_empty_column() {
        let occupied: Vec<i64> = (0..16).filter(|&j| j != 8).collect();
        let g = extend_pwl(&table(&[(0.0, 0.0), (1.0, 1.0)]), lv(4), &cols(&occupied)).unwrap();
        assert_eq!(g.eval(0.25), 0.0);
        assert_eq!(g.eval(0.5), 0.0);
        assert_eq!(g.eval(0.53125), 0.5);
        assert_eq!(g.eval(0.5625), 1.0);
        assert_eq!(g.eval(0.75), 1.0);
    }

    #[test]
    fn smallest_empty_column_is_used() {
        let g = extend_pwl(&table(&[(0.0, 0.0), (1.0, 1.0)]), lv(2), &cols(&[0, 3])).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(g.values(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn column_touching_right_end() {
        // Right table point sits on the right edge of the empty column.
        let g = extend_pwl(&table(&[(0.0, 2.0), (0.5, 4.0)]), lv(2), &cols(&[0, 2])).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.25, 0.5]);
        assert_eq!(g.eval(0.375), 3.0);
    }

    #[test]
    fn inconsistent_columns_are_reported() {
        let err = extend_pwl(
            &table(&[(0.0, 0.0), (1.0, 1.0)]),
            lv(2),
            &cols(&[0, 1, 2, 3]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::EmptyColumnNotFound { .. }));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PWLinear::constant(1.0).eval(-100.0), 1.0);
        let g = PWLinear::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(PWLinear::zero().eval(3.0), 0.0);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PWLinear::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(PWLinear::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(PWLinear::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn ordered_bits_roundtrip() {
        for x in [-3.5, -0.0, 0.0, 1e-300, 2.0, -1e300] {
            let back = from_ordered_bits(ordered_bits(x));
            assert!(back == x);
        }
        assert!(ordered_bits(-1.0) < ordered_bits(0.0));
        assert!(ordered_bits(0.0) < ordered_bits(1e-300));
    }

    fn sorted_table() -> impl Strategy<Value = (TableFunction, u32)> {
        (
            proptest::collection::btree_set(-2000i32..2000, 1..30),
            1u32..8,
        )
            .prop_flat_map(|(xs, n)| {
                let domain: Vec<f64> = xs.iter().map(|&x| x as f64 / 997.0).collect();
                let len = domain.len();
                (
                    Just(domain),
                    proptest::collection::vec(-5.0f64..5.0, len),
                    Just(n),
                )
                    .prop_map(|(domain, values, n)| (TableFunction { domain, values }, n))
            })
    }

    proptest! {
        #[test]
        fn extension_agrees_and_is_bounded((t, n) in sorted_table()) {
            let level = lv(n);
            let occupied: BTreeSet<i64> = t
                .domain
                .iter()
                .map(|&x| crate::geometry::column_index(x, level).unwrap())
                .collect();
            let g = extend_pwl(&t, level, &occupied).unwrap();
            for (x, v) in t.domain.iter().zip(&t.values) {
                prop_assert_eq!(g.eval(*x), *v);
            }
            let bound = t.norm();
            for k in -50..50 {
                let x = k as f64 * 0.05;
                prop_assert!(g.eval(x).abs() <= bound + 1e-12);
            }
            prop_assert!(g.norm() <= bound);
        }

        #[test]
        fn eval_is_continuous((t, n) in sorted_table(), x in -2.5f64..2.5) {
            let level = lv(n);
            let occupied: BTreeSet<i64> = t
                .domain
                .iter()
                .map(|&x| crate::geometry::column_index(x, level).unwrap())
                .collect();
            let g = extend_pwl(&t, level, &occupied).unwrap();
            let h = 1e-9;
            let jump = (g.eval(x + h) - g.eval(x)).abs();
            prop_assert!(jump <= 10.0 * h / min_gap(&g) + 1e-12);
        }

        #[test]
        fn sum_matches_pointwise((t1, n1) in sorted_table(), (t2, n2) in sorted_table(), x in -2.5f64..2.5) {
            let to_pwl = |t: &TableFunction, n: u32| {
                let level = lv(n);
                let occupied: BTreeSet<i64> = t.domain.iter()
                    .map(|&x| crate::geometry::column_index(x, level).unwrap()).collect();
                extend_pwl(t, level, &occupied).unwrap()
            };
            let (a, b) = (to_pwl(&t1, n1), to_pwl(&t2, n2));
            let s = a.add(&b);
            prop_assert!((s.eval(x) - (a.eval(x) + b.eval(x))).abs() <= 1e-12);
        }
    }

    fn min_gap(g: &PWLinear) -> f64 {
        g.breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}
