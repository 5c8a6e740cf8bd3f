//! The finite approximation `V^n` of a sampled compactum and the search for
//! a usable grid level.
//!
//! The level search replaces an existence argument with an explicit check:
//! at the chosen level every almost array running from an end of a long
//! almost vertical segment to an end of a long almost horizontal segment has
//! at least `F` edges. That is exactly what keeps the staircase potential
//! zero on long vertical ends.

use std::collections::VecDeque;
use std::fmt;

use crate::arrays::AlmostArrayPath;
use crate::error::{Error, Result};
use crate::geometry::{cell_index, chebyshev, CellIndex, Level, Point, MAX_LEVEL};

pub const DEFAULT_N_MAX: u32 = 32;

/// A finite sample of the compactum together with the function values on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCompactum {
    points: Vec<Point>,
    values: Vec<f64>,
    declared_spacing: Option<f64>,
}

impl SampledCompactum {
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        Self::with_spacing(points, values, None)
    }

    pub fn with_spacing(
        points: Vec<Point>,
        values: Vec<f64>,
        declared_spacing: Option<f64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample("sample has no points".into()));
        }
        if points.len() != values.len() {
            return Err(Error::InvalidSample(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "point {} has a non-finite coordinate",
                i + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "value {} is not finite",
                i + 1
            )));
        }
        if let Some(s) = declared_spacing {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidSample(format!(
                    "declared spacing {s} must be positive"
                )));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            // -0.0 and 0.0 compare equal here, as they should.
            if points[a] == points[b] {
                return Err(Error::DuplicatePoint {
                    x: points[a].x,
                    y: points[a].y,
                    first: a.min(b) + 1,
                    second: a.max(b) + 1,
                });
            }
        }
        Ok(SampledCompactum {
            points,
            values,
            declared_spacing,
        })
    }

    /// Same points, new function values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::with_spacing(self.points.clone(), values, self.declared_spacing)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn declared_spacing(&self) -> Option<f64> {
        self.declared_spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sup norm of `f` over the sample.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representative {
    pub cell: CellIndex,
    pub point: Point,
    pub value: f64,
    /// Position of the point in the source sample.
    pub sample_index: usize,
}

/// `V^n`: one sample point per occupied cell, ordered by cell index.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeSet {
    level: Level,
    reps: Vec<Representative>,
}

impl RepresentativeSet {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn reps(&self) -> &[Representative] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn get(&self, cell: CellIndex) -> Option<&Representative> {
        self.reps
            .binary_search_by(|r| r.cell.cmp(&cell))
            .ok()
            .map(|i| &self.reps[i])
    }

    pub fn point(&self, i: usize) -> Point {
        self.reps[i].point
    }

    pub fn value(&self, i: usize) -> f64 {
        self.reps[i].value
    }
}

/// Picks the lexicographically smallest sample point of every occupied cell.
pub fn build_representatives(sample: &SampledCompactum, level: Level) -> Result<RepresentativeSet> {
    let mut tagged = Vec::with_capacity(sample.len());
    for (k, (&p, &v)) in sample.points().iter().zip(sample.values()).enumerate() {
        tagged.push(Representative {
            cell: cell_index(p, level)?,
            point: p,
            value: v,
            sample_index: k,
        });
    }
    tagged.sort_by(|a, b| a.cell.cmp(&b.cell).then(a.point.lex_cmp(&b.point)));
    tagged.dedup_by(|later, first| later.cell == first.cell);
    Ok(RepresentativeSet {
        level,
        reps: tagged,
    })
}

/// Ordered pairs `(i, j)`, `i < j` in sweep order, with `|a_i - a_j| < width`
/// along the coordinate picked by `key`.
fn band_pairs<K>(v: &RepresentativeSet, width: f64, key: K, mut visit: impl FnMut(usize, usize))
where
    K: Fn(&Point) -> f64,
{
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        key(&v.reps[a].point)
            .total_cmp(&key(&v.reps[b].point))
            .then(a.cmp(&b))
    });
    for (pos, &a) in order.iter().enumerate() {
        let ka = key(&v.reps[a].point);
        for &b in &order[pos + 1..] {
            if key(&v.reps[b].point) - ka >= width {
                break;
            }
            visit(a, b);
        }
    }
}

/// Every pair forming an almost vertical segment at the set's level.
pub(crate) fn almost_vertical_pairs(v: &RepresentativeSet, visit: impl FnMut(usize, usize)) {
    band_pairs(v, v.level.almost_threshold(), |p| p.x, visit)
}

pub(crate) fn almost_horizontal_pairs(v: &RepresentativeSet, visit: impl FnMut(usize, usize)) {
    band_pairs(v, v.level.almost_threshold(), |p| p.y, visit)
}

/// Every pair forming a short segment (Chebyshev distance `< delta`).
pub(crate) fn short_pairs(v: &RepresentativeSet, delta: f64, mut visit: impl FnMut(usize, usize)) {
    band_pairs(
        v,
        delta,
        |p| p.x,
        |a, b| {
            if chebyshev(v.reps[a].point, v.reps[b].point) < delta {
                visit(a, b)
            }
        },
    )
}

fn long_ends(
    v: &RepresentativeSet,
    delta: f64,
    pairs: fn(&RepresentativeSet, &mut dyn FnMut(usize, usize)),
) -> Vec<bool> {
    let mut flags = vec![false; v.len()];
    pairs(v, &mut |a, b| {
        if chebyshev(v.reps[a].point, v.reps[b].point) >= delta {
            flags[a] = true;
            flags[b] = true;
        }
    });
    flags
}

/// Flags, indexed like `v.reps()`, marking ends of long almost vertical segments.
pub fn long_vertical_flags(v: &RepresentativeSet, delta: f64) -> Vec<bool> {
    long_ends(v, delta, |v, f| almost_vertical_pairs(v, f))
}

pub fn long_horizontal_flags(v: &RepresentativeSet, delta: f64) -> Vec<bool> {
    long_ends(v, delta, |v, f| almost_horizontal_pairs(v, f))
}

fn flagged_points(v: &RepresentativeSet, flags: &[bool]) -> Vec<Point> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(i, _)| v.reps[i].point)
        .collect()
}

/// Ends of long almost vertical segments, in representative order.
pub fn long_vertical_ends(v: &RepresentativeSet, delta: f64) -> Vec<Point> {
    flagged_points(v, &long_vertical_flags(v, delta))
}

/// Ends of long almost horizontal segments, in representative order.
pub fn long_horizontal_ends(v: &RepresentativeSet, delta: f64) -> Vec<Point> {
    flagged_points(v, &long_horizontal_flags(v, delta))
}

/// Length of a shortest almost-array bridge, `Infinite` when none exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gap {
    Finite(u64),
    Infinite,
}

impl Gap {
    pub fn at_least(self, required: u64) -> bool {
        match self {
            Gap::Finite(g) => g >= required,
            Gap::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Gap::Finite(g) => Some(g),
            Gap::Infinite => None,
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Finite(g) => g.fmt(f),
            Gap::Infinite => f.write_str("inf"),
        }
    }
}

/// Adjacency of the bridge graph: short, almost vertical or almost horizontal pairs.
pub(crate) fn bridge_adjacency(v: &RepresentativeSet, delta: f64) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); v.len()];
    let mut add = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    short_pairs(v, delta, &mut add);
    almost_vertical_pairs(v, &mut add);
    almost_horizontal_pairs(v, &mut add);
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Shortest path (as representative indices) from a long vertical end to a
/// long horizontal end in the bridge graph. Ties resolve towards smaller indices.
pub(crate) fn shortest_bridge(v: &RepresentativeSet, delta: f64) -> Option<Vec<usize>> {
    let vertical = long_vertical_flags(v, delta);
    let horizontal = long_horizontal_flags(v, delta);
    if !vertical.contains(&true) || !horizontal.contains(&true) {
        return None;
    }
    let adj = bridge_adjacency(v, delta);
    let mut parent = vec![usize::MAX; v.len()];
    let mut seen = vec![false; v.len()];
    let mut queue = VecDeque::new();
    for (i, &is_source) in vertical.iter().enumerate() {
        if is_source {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(u) = queue.pop_front() {
        if horizontal[u] {
            let mut path = vec![u];
            let mut cur = u;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

pub fn bridge_gap(v: &RepresentativeSet, delta: f64) -> Gap {
    match shortest_bridge(v, delta) {
        Some(path) => Gap::Finite(path.len() as u64 - 1),
        None => Gap::Infinite,
    }
}

/// Smallest `n >= 0` with `1 / 2^n <= delta`.
pub fn min_level_for(delta: f64) -> Result<Level> {
    check_delta(delta)?;
    let mut n = 0;
    while Level::new(n)?.cell_side() > delta {
        n += 1;
    }
    Level::new(n)
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "delta must be positive and finite, got {delta}"
        )))
    }
}

/// Outcome of a successful level search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelChoice {
    pub level: Level,
    pub gap: Gap,
}

pub fn search_level(
    sample: &SampledCompactum,
    delta: f64,
    big_f: u64,
    n_max: u32,
) -> Result<LevelChoice> {
    let start = min_level_for(delta)?;
    let n_max = n_max.min(MAX_LEVEL);
    let mut obstruction = None;
    for n in start.get()..=n_max {
        let level = Level::new(n)?;
        if big_f == 0 {
            // Any gap is >= 0; skip the graph work.
            return Ok(LevelChoice {
                level,
                gap: Gap::Finite(0),
            });
        }
        let v = build_representatives(sample, level)?;
        match shortest_bridge(&v, delta) {
            None => {
                return Ok(LevelChoice {
                    level,
                    gap: Gap::Infinite,
                })
            }
            Some(path) if path.len() as u64 > big_f => {
                return Ok(LevelChoice {
                    level,
                    gap: Gap::Finite(path.len() as u64 - 1),
                })
            }
            Some(path) => {
                obstruction = Some(AlmostArrayPath {
                    points: path.iter().map(|&i| v.point(i)).collect(),
                    level,
                });
            }
        }
    }
    Err(Error::LevelNotFound {
        min_level: start.get(),
        n_max,
        required: big_f,
        obstruction,
    })
}

/// Smallest level `n` with `1/2^n <= delta` and `bridge_gap >= big_f`.
pub fn select_level(
    sample: &SampledCompactum,
    delta: f64,
    big_f: u64,
    n_max: u32,
) -> Result<Level> {
    search_level(sample, delta, big_f, n_max).map(|c| c.level)
}
