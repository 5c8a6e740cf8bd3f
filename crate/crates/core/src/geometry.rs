//! Points in the plane, the Chebyshev metric, dyadic cells and segment
//! classification.
//!
//! All comparisons use the raw IEEE values: a segment is almost vertical at
//! level `n` iff `|x1 - x2| < 2 / 2^n`, long iff its Chebyshev length is
//! `>= delta`. There is no fuzz factor anywhere.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported grid level. Cell indices are `i64`, and `2^60` keeps
/// `x * 2^n` exactly representable for any coordinate of magnitude below 8.
pub const MAX_LEVEL: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order on `(x, y)`. Total for finite points.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Grid refinement level; cells at level `n` have side `1 / 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Level(u32);

impl Level {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_LEVEL {
            return Err(Error::InvalidParameter(format!(
                "level {n} exceeds the supported maximum {MAX_LEVEL}"
            )));
        }
        Ok(Level(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^n`, exact.
    pub fn scale(self) -> f64 {
        (1u64 << self.0) as f64
    }

    /// Cell side `1 / 2^n`, exact.
    pub fn cell_side(self) -> f64 {
        1.0 / self.scale()
    }

    /// The almost-axis threshold `2 / 2^n`.
    pub fn almost_threshold(self) -> f64 {
        2.0 / self.scale()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Index of the half-open dyadic cell `[i/2^n, (i+1)/2^n) x [j/2^n, (j+1)/2^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub i: i64,
    pub j: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentClass {
    pub almost_vertical: bool,
    pub almost_horizontal: bool,
    pub long: bool,
}

impl SegmentClass {
    pub fn short(&self) -> bool {
        !self.long
    }
}

pub fn chebyshev(a: Point, b: Point) -> f64 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

fn axis_index(value: f64, level: Level) -> Result<i64> {
    let scaled = (value * level.scale()).floor();
    // i64::MAX as f64 rounds up to 2^63, so the upper test must be strict.
    if !scaled.is_finite() || scaled < i64::MIN as f64 || scaled >= i64::MAX as f64 {
        return Err(Error::CoordinateOutOfRange {
            value,
            level: level.get(),
        });
    }
    Ok(scaled as i64)
}

pub fn column_index(x: f64, level: Level) -> Result<i64> {
    axis_index(x, level)
}

pub fn cell_index(p: Point, level: Level) -> Result<CellIndex> {
    Ok(CellIndex {
        i: axis_index(p.x, level)?,
        j: axis_index(p.y, level)?,
    })
}

pub fn classify_segment(a: Point, b: Point, level: Level, delta: f64) -> SegmentClass {
    let threshold = level.almost_threshold();
    SegmentClass {
        almost_vertical: (a.x - b.x).abs() < threshold,
        almost_horizontal: (a.y - b.y).abs() < threshold,
        long: chebyshev(a, b) >= delta,
    }
}
