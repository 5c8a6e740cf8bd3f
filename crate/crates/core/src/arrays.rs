//! Arrays (polylines of alternating axis-parallel segments) and almost arrays.

use serde::{Deserialize, Serialize};

use crate::geometry::{classify_segment, Level, Point};
use crate::quantize::{shortest_bridge, RepresentativeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayCertificate {
    pub points: Vec<(f64, f64)>,
    pub orientations: Vec<Orientation>,
}

impl ArrayCertificate {
    pub fn len(&self) -> usize {
        self.orientations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orientations.is_empty()
    }

    /// Re-checks every segment against `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        if self.points.len() != self.orientations.len() + 1 {
            return false;
        }
        let alternating = self.orientations.windows(2).all(|w| w[0] != w[1]);
        let segments = self
            .points
            .windows(2)
            .zip(&self.orientations)
            .all(|(w, &o)| {
                let (a, b) = (pt(w[0]), pt(w[1]));
                segment_orientation(a, b, o, tol)
            });
        let no_backtrack = self.points.windows(3).all(|w| w[0] != w[2]);
        alternating && segments && no_backtrack
    }
}

fn pt(p: (f64, f64)) -> Point {
    Point::new(p.0, p.1)
}

/// `[a; b]` is parallel to the axis named by `o`, coordinates compared within `tol`.
pub fn segment_orientation(a: Point, b: Point, o: Orientation, tol: f64) -> bool {
    if a == b {
        return false;
    }
    match o {
        Orientation::Vertical => (a.x - b.x).abs() <= tol,
        Orientation::Horizontal => (a.y - b.y).abs() <= tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostArrayPath {
    pub points: Vec<Point>,
    pub level: Level,
}

impl AlmostArrayPath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points pairwise distinct and each consecutive pair almost vertical or
    /// almost horizontal at the path's level.
    pub fn is_almost_array(&self) -> bool {
        let distinct = self
            .points
            .iter()
            .enumerate()
            .all(|(i, p)| self.points[..i].iter().all(|q| q != p));
        distinct
            && self.points.windows(2).all(|w| {
                // delta does not affect the two axis flags.
                let c = classify_segment(w[0], w[1], self.level, 1.0);
                c.almost_vertical || c.almost_horizontal
            })
    }
}

struct AxisIndex {
    pts: Vec<Point>,
    by_x: Vec<usize>,
    by_y: Vec<usize>,
}

impl AxisIndex {
    fn new(points: &[Point]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.lex_cmp(b));
        pts.dedup();
        let mut by_x: Vec<usize> = (0..pts.len()).collect();
        by_x.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x).then(a.cmp(&b)));
        let mut by_y: Vec<usize> = (0..pts.len()).collect();
        by_y.sort_by(|&a, &b| pts[a].y.total_cmp(&pts[b].y).then(a.cmp(&b)));
        AxisIndex { pts, by_x, by_y }
    }

    /// Partners of `i` along orientation `o`, ascending in lexicographic order
    /// (point indices are lexicographic ranks).
    fn partners(&self, i: usize, o: Orientation, tol: f64) -> Vec<usize> {
        let (order, key): (&[usize], fn(&Point) -> f64) = match o {
            Orientation::Vertical => (&self.by_x, |p| p.x),
            Orientation::Horizontal => (&self.by_y, |p| p.y),
        };
        let c = key(&self.pts[i]);
        let lo = order.partition_point(|&k| key(&self.pts[k]) < c - tol);
        let mut out: Vec<usize> = order[lo..]
            .iter()
            .take_while(|&&k| key(&self.pts[k]) <= c + tol)
            .copied()
            .filter(|&k| k != i && segment_orientation(self.pts[i], self.pts[k], o, tol))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Lexicographically first length-two array `(z1, z2, z3)`, if any.
///
/// `tol` is the coordinate-equality tolerance; `0.0` means exact equality.
pub fn find_length2_array(points: &[Point], tol: f64) -> Option<ArrayCertificate> {
    find_array(points, 2, tol)
}

/// Lexicographically first array of length `len` (`len >= 1`).
///
/// Consecutive segments must be orthogonal and consecutive points distinct;
/// `z_i = z_{i+2}` is excluded since the two segments would coincide.
pub fn find_array(points: &[Point], len: usize, tol: f64) -> Option<ArrayCertificate> {
    assert!(len >= 1, "array length must be at least 1");
    let index = AxisIndex::new(points);
    let m = index.pts.len();
    let mut cache: Vec<[Option<Vec<usize>>; 2]> = vec![[None, None]; m];
    let mut partners = |i: usize, o: Orientation| -> Vec<usize> {
        let slot = o as usize;
        cache[i][slot]
            .get_or_insert_with(|| index.partners(i, o, tol))
            .clone()
    };
    // Lexicographic order on the point sequence: first vertex, then the second, ...
    // DFS in ascending partner order finds the lexicographically first array
    // for a fixed first vertex and first orientation; compare both orientations.
    for start in 0..m {
        let mut best: Option<(Vec<usize>, Orientation)> = None;
        for first in [Orientation::Vertical, Orientation::Horizontal] {
            let mut path = vec![start];
            if extend_array(&mut path, first, len, &mut partners) {
                let better = match &best {
                    None => true,
                    Some((b, _)) => path < *b,
                };
                if better {
                    best = Some((path, first));
                }
            }
        }
        if let Some((path, first)) = best {
            let mut orientations = Vec::with_capacity(len);
            let mut o = first;
            for _ in 0..len {
                orientations.push(o);
                o = o.flip();
            }
            return Some(ArrayCertificate {
                points: path
                    .iter()
                    .map(|&i| (index.pts[i].x, index.pts[i].y))
                    .collect(),
                orientations,
            });
        }
    }
    None
}

fn extend_array(
    path: &mut Vec<usize>,
    next: Orientation,
    len: usize,
    partners: &mut impl FnMut(usize, Orientation) -> Vec<usize>,
) -> bool {
    if path.len() == len + 1 {
        return true;
    }
    let last = *path.last().unwrap();
    let before = path.len().checked_sub(2).map(|k| path[k]);
    for cand in partners(last, next) {
        if Some(cand) == before {
            continue;
        }
        path.push(cand);
        if extend_array(path, next.flip(), len, partners) {
            return true;
        }
        path.pop();
    }
    false
}

/// A witness realising the bridge gap, `None` when the gap is infinite.
pub fn shortest_bridging_almost_array(
    v: &RepresentativeSet,
    delta: f64,
) -> Option<AlmostArrayPath> {
    shortest_bridge(v, delta).map(|path| AlmostArrayPath {
        points: path.iter().map(|&i| v.point(i)).collect(),
        level: v.level(),
    })
}
