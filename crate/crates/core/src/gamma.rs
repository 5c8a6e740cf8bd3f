//! Level graphs on `V^n` and the staircase potential `gamma` built from
//! breadth-first depths.
//!
//! Each sign gets its own graph. The plus graph holds the representatives
//! with `f >= 0` plus a sentinel at `(F + 1) * eps`; the minus graph holds
//! those with `f < 0` plus a sentinel at `-(F + 1) * eps`. The minus graph is
//! the exact mirror of the plus graph under `f -> -f`, so every vertex carries
//! a nonnegative `step`: `floor(f / eps)` on the plus side and
//! `floor(-f / eps)` on the minus side.
//!
//! Edges:
//! * short segments between real vertices of the same graph,
//! * long horizontal ends whose steps differ by exactly one,
//! * the sentinel to every long horizontal end at step `F`.
//!
//! `gamma(w) = max(F - d(w) + 1, 0) * eps` on the plus side (negated on the
//! minus side), where `d` is the depth from the sentinel. Vertices the
//! sentinel cannot reach get `gamma = 0`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::quantize::{long_horizontal_flags, long_vertical_flags, short_pairs, RepresentativeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(value: f64) -> Sign {
        if value >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The fixed quantities of one approximation pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub epsilon: f64,
    pub delta: f64,
    /// `F = floor(||f|| / eps)`.
    pub big_f: u64,
}

impl StepParams {
    pub fn new(norm: f64, epsilon: f64, delta: f64) -> Self {
        StepParams {
            epsilon,
            delta,
            big_f: floor_steps(norm, epsilon).max(0) as u64,
        }
    }

    pub fn multiple(&self, steps: i64) -> f64 {
        steps as f64 * self.epsilon
    }
}

/// `floor(value / eps)`, corrected so that `k * eps <= value < (k + 1) * eps`
/// holds for the products as computed in floating point.
pub fn floor_steps(value: f64, epsilon: f64) -> i64 {
    let mut k = (value / epsilon).floor() as i64;
    while k as f64 * epsilon > value {
        k -= 1;
    }
    while (k + 1) as f64 * epsilon <= value {
        k += 1;
    }
    k
}

/// Step of `value` inside the graph of its own sign.
pub fn signed_step(value: f64, epsilon: f64) -> u64 {
    match Sign::of(value) {
        Sign::Plus => floor_steps(value, epsilon) as u64,
        Sign::Minus => floor_steps(-value, epsilon) as u64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexKind {
    /// A representative, by index into `V.reps()`.
    Real {
        rep: usize,
        point: Point,
    },
    /// A virtual vertex standing in for a missing step; it has no plane
    /// coordinates and joins no short edges.
    Artificial,
    Sentinel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedVertex {
    pub kind: VertexKind,
    pub sign: Sign,
    pub value: f64,
    pub step: u64,
    pub long_horizontal_end: bool,
    pub long_vertical_end: bool,
}

impl AugmentedVertex {
    pub fn rep(&self) -> Option<usize> {
        match self.kind {
            VertexKind::Real { rep, .. } => Some(rep),
            _ => None,
        }
    }

    /// The signed level `floor(f / eps)` as used on the plus side; minus-side
    /// vertices report `-step`.
    pub fn signed_level(&self) -> i64 {
        self.sign.factor() * self.step as i64
    }
}

/// Real vertices for all of `V`, followed by artificial vertices for every
/// step in `0..=F` of either sign that no real long horizontal end occupies.
///
/// Artificial vertices are long horizontal ends by fiat, so the chain of
/// step edges from the sentinel down to any real long horizontal end is
/// never broken.
pub fn pad_levels(v: &RepresentativeSet, params: &StepParams) -> Vec<AugmentedVertex> {
    let vertical = long_vertical_flags(v, params.delta);
    let horizontal = long_horizontal_flags(v, params.delta);
    let size = params.big_f as usize + 1;
    let mut occupied = [vec![false; size], vec![false; size]];
    let mut out = Vec::with_capacity(v.len() + 2 * size);
    for (i, r) in v.reps().iter().enumerate() {
        let sign = Sign::of(r.value);
        let step = signed_step(r.value, params.epsilon);
        if horizontal[i] && (step as usize) < size {
            occupied[(sign == Sign::Minus) as usize][step as usize] = true;
        }
        out.push(AugmentedVertex {
            kind: VertexKind::Real {
                rep: i,
                point: r.point,
            },
            sign,
            value: r.value,
            step,
            long_horizontal_end: horizontal[i],
            long_vertical_end: vertical[i],
        });
    }
    // Signed levels -F..=F; level 0 belongs to the plus side.
    for level in -(params.big_f as i64)..=params.big_f as i64 {
        let sign = if level >= 0 { Sign::Plus } else { Sign::Minus };
        let step = level.unsigned_abs();
        if !occupied[(sign == Sign::Minus) as usize][step as usize] {
            out.push(AugmentedVertex {
                kind: VertexKind::Artificial,
                sign,
                value: params.multiple(level),
                step,
                long_horizontal_end: true,
                long_vertical_end: false,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelGraph {
    pub sign: Sign,
    /// Vertex 0 is the sentinel.
    pub vertices: Vec<AugmentedVertex>,
    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub params: StepParams,
}

impl LevelGraph {
    pub fn sentinel(&self) -> usize {
        0
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        adjacency(self.vertices.len(), &self.edges)
    }
}

fn adjacency(count: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); count];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

pub fn build_sign_graph(
    vertices: &[AugmentedVertex],
    sign: Sign,
    v: &RepresentativeSet,
    params: &StepParams,
) -> LevelGraph {
    let big_f = params.big_f;
    let sentinel_steps = (big_f + 1) as i64;
    let mut graph_vertices = vec![AugmentedVertex {
        kind: VertexKind::Sentinel,
        sign,
        value: params.multiple(sign.factor() * sentinel_steps),
        step: big_f + 1,
        long_horizontal_end: false,
        long_vertical_end: false,
    }];
    let mut local_of_rep = vec![usize::MAX; v.len()];
    for vertex in vertices.iter().filter(|w| w.sign == sign) {
        if let Some(rep) = vertex.rep() {
            local_of_rep[rep] = graph_vertices.len();
        }
        graph_vertices.push(*vertex);
    }

    let mut edges = Vec::new();
    short_pairs(v, params.delta, |a, b| {
        let (la, lb) = (local_of_rep[a], local_of_rep[b]);
        if la != usize::MAX && lb != usize::MAX {
            edges.push((la.min(lb), la.max(lb)));
        }
    });

    let mut by_step: Vec<Vec<usize>> = vec![Vec::new(); big_f as usize + 1];
    for (k, w) in graph_vertices.iter().enumerate().skip(1) {
        if w.long_horizontal_end && w.step <= big_f {
            by_step[w.step as usize].push(k);
        }
    }
    for s in 0..big_f as usize {
        for &a in &by_step[s] {
            for &b in &by_step[s + 1] {
                edges.push((a.min(b), a.max(b)));
            }
        }
    }
    for &w in &by_step[big_f as usize] {
        edges.push((0, w));
    }

    edges.sort_unstable();
    edges.dedup();
    LevelGraph {
        sign,
        vertices: graph_vertices,
        edges,
        params: *params,
    }
}

/// Unit-weight distances from `source`; `None` for unreachable vertices.
pub fn bfs_distances(count: usize, edges: &[(usize, usize)], source: usize) -> Vec<Option<u32>> {
    let adj = adjacency(count, edges);
    let mut dist = vec![None; count];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = dist[u].map(|d| d + 1);
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Depth of every vertex below the sentinel.
pub fn bfs_depth(graph: &LevelGraph) -> Vec<Option<u32>> {
    bfs_distances(graph.vertices.len(), &graph.edges, graph.sentinel())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEntry {
    pub rep: usize,
    /// `gamma / eps`, signed.
    pub steps: i64,
    pub value: f64,
}

/// `gamma` on the real vertices of one sign graph.
pub fn gamma(graph: &LevelGraph, depths: &[Option<u32>]) -> Vec<GammaEntry> {
    let big_f = graph.params.big_f as i64;
    graph
        .vertices
        .iter()
        .zip(depths)
        .filter_map(|(w, d)| {
            let rep = w.rep()?;
            let magnitude = match d {
                Some(d) => (big_f - *d as i64 + 1).max(0),
                None => 0,
            };
            let steps = graph.sign.factor() * magnitude;
            Some(GammaEntry {
                rep,
                steps,
                value: graph.params.multiple(steps),
            })
        })
        .collect()
}

/// Everything the potential computation produced, kept for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub plus: LevelGraph,
    pub minus: LevelGraph,
    /// `gamma / eps` per representative.
    pub steps: Vec<i64>,
    /// `gamma` per representative.
    pub values: Vec<f64>,
}

/// Runs padding, both sign graphs, BFS and `gamma` over `V`.
pub fn potential(v: &RepresentativeSet, params: &StepParams) -> Potential {
    let vertices = pad_levels(v, params);
    let plus = build_sign_graph(&vertices, Sign::Plus, v, params);
    let minus = build_sign_graph(&vertices, Sign::Minus, v, params);
    let mut steps = vec![0i64; v.len()];
    for graph in [&plus, &minus] {
        for entry in gamma(graph, &bfs_depth(graph)) {
            steps[entry.rep] = entry.steps;
        }
    }
    let values = steps.iter().map(|&k| params.multiple(k)).collect();
    Potential {
        plus,
        minus,
        steps,
        values,
    }
}

/// A function on a finite, strictly increasing set of reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFunction {
    pub domain: Vec<f64>,
    pub values: Vec<f64>,
}

impl TableFunction {
    pub fn get(&self, at: f64) -> Option<f64> {
        self.domain
            .binary_search_by(|u| u.total_cmp(&at))
            .ok()
            .map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Representatives grouped by equal `axis` coordinate, each group headed by
/// the member with the smallest other coordinate.
fn canonical_by_axis(v: &RepresentativeSet, by_x: bool) -> Vec<(f64, usize)> {
    let key = |i: usize| {
        let p = v.point(i);
        if by_x {
            (p.x, p.y)
        } else {
            (p.y, p.x)
        }
    };
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let mut out: Vec<(f64, usize)> = Vec::new();
    for i in order {
        let u = key(i).0;
        if out.last().is_none_or(|&(last, _)| last != u) {
            out.push((u, i));
        }
    }
    out
}

/// `G(u) = gamma(u, v*)` with `v*` the smallest `y` among points of `V` above `u`.
pub fn build_g(v: &RepresentativeSet, gamma_values: &[f64]) -> TableFunction {
    let heads = canonical_by_axis(v, true);
    TableFunction {
        domain: heads.iter().map(|&(u, _)| u).collect(),
        values: heads.iter().map(|&(_, i)| gamma_values[i]).collect(),
    }
}

/// `H(v) = f(u*, v) - G(u*)` with `u*` the smallest `x` among points of `V` at height `v`.
pub fn build_h(v: &RepresentativeSet, g: &TableFunction) -> TableFunction {
    let heads = canonical_by_axis(v, false);
    TableFunction {
        domain: heads.iter().map(|&(y, _)| y).collect(),
        values: heads
            .iter()
            .map(|&(_, i)| {
                let p = v.point(i);
                let gu = g.get(p.x).expect("G is defined on every x-projection of V");
                v.value(i) - gu
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Level;
    use crate::quantize::{build_representatives, SampledCompactum};

    fn reps(points: &[(f64, f64, f64)], n: u32) -> RepresentativeSet {
        let pts = points.iter().map(|&(x, y, _)| Point::new(x, y)).collect();
        let vals = points.iter().map(|&(_, _, f)| f).collect();
        let s = SampledCompactum::new(pts, vals).unwrap();
        build_representatives(&s, Level::new(n).unwrap()).unwrap()
    }

    fn params_for(v: &RepresentativeSet, epsilon: f64, delta: f64) -> StepParams {
        let norm = v.reps().iter().fold(0.0f64, |m, r| m.max(r.value.abs()));
        StepParams::new(norm, epsilon, delta)
    }

    #[test]
    fn floor_steps_is_consistent_with_products() {
        assert_eq!(floor_steps(-0.5, 1.0), -1);
        assert_eq!(floor_steps(2.0, 1.0), 2);
        // As doubles 0.3 < 3 * 0.1, so the exact floor is 2.
        assert_eq!(floor_steps(0.3, 0.1), 2);
        assert_eq!(floor_steps(0.25, 0.05), 5);
        for k in 0..200 {
            let eps = 0.05;
            let value = k as f64 * eps;
            let s = floor_steps(value, eps);
            assert!(s as f64 * eps <= value && value < (s + 1) as f64 * eps);
        }
    }

    #[test]
    fn zero_function_needs_no_padding() {
        let v = reps(&[(0.0, 0.0, 0.0), (0.5, 0.7, 0.0)], 3);
        let p = params_for(&v, 0.1, 0.2);
        assert_eq!(p.big_f, 0);
        let vertices = pad_levels(&v, &p);
        // No long horizontal ends, so level 0 gets an artificial stand-in.
        assert_eq!(
            vertices
                .iter()
                .filter(|w| w.kind == VertexKind::Artificial)
                .count(),
            1
        );
        assert_eq!(vertices.iter().filter(|w| w.rep().is_some()).count(), 2);
    }

    #[test]
    fn single_point_pads_every_level() {
        let v = reps(&[(0.3, 0.3, 2.0)], 0);
        let p = params_for(&v, 1.0, 0.5);
        assert_eq!(p.big_f, 2);
        let vertices = pad_levels(&v, &p);
        let levels: Vec<i64> = vertices
            .iter()
            .filter(|w| w.kind == VertexKind::Artificial)
            .map(|w| w.signed_level())
            .collect();
        assert_eq!(levels, vec![-2, -1, 0, 1, 2]);
        for w in vertices.iter().filter(|w| w.kind == VertexKind::Artificial) {
            assert_eq!(w.value, w.signed_level() as f64);
            assert!(w.long_horizontal_end && !w.long_vertical_end);
        }
    }

    #[test]
    fn long_horizontal_pair_at_top_level() {
        // Two long horizontal ends with f = 2, eps = 1: F = 2.
        let v = reps(&[(0.0, 0.0, 2.0), (0.9, 0.01, 2.0)], 4);
        let p = params_for(&v, 1.0, 0.5);
        let vertices = pad_levels(&v, &p);
        let artificial: Vec<i64> = vertices
            .iter()
            .filter(|w| w.kind == VertexKind::Artificial)
            .map(|w| w.signed_level())
            .collect();
        assert_eq!(artificial, vec![-2, -1, 0, 1]);

        let plus = build_sign_graph(&vertices, Sign::Plus, &v, &p);
        // 0 sentinel, 1..=2 reals, 3 artificial(0), 4 artificial(1).
        assert_eq!(plus.vertices.len(), 5);
        assert_eq!(plus.edges, vec![(0, 1), (0, 2), (1, 4), (2, 4), (3, 4)]);
        let d = bfs_depth(&plus);
        assert_eq!(d, vec![Some(0), Some(1), Some(1), Some(3), Some(2)]);
        let g = gamma(&plus, &d);
        assert!(g.iter().all(|e| e.value == 2.0));

        let minus = build_sign_graph(&vertices, Sign::Minus, &v, &p);
        // 0 sentinel, 1 artificial(-2), 2 artificial(-1).
        assert_eq!(minus.edges, vec![(0, 1), (1, 2)]);
        assert!(minus.vertices[0].value == -3.0);
    }

    #[test]
    fn short_edges_join_close_points_of_one_sign() {
        let v = reps(&[(0.0, 0.0, 0.3), (0.05, 0.05, 0.31), (0.02, 0.6, -0.2)], 6);
        let p = params_for(&v, 0.1, 0.1);
        let vertices = pad_levels(&v, &p);
        let plus = build_sign_graph(&vertices, Sign::Plus, &v, &p);
        let reals: Vec<usize> = plus
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, w)| w.rep().is_some())
            .map(|(k, _)| k)
            .collect();
        assert_eq!(reals.len(), 2);
        assert!(plus.edges.contains(&(reals[0], reals[1])));
    }

    #[test]
    fn gamma_formula() {
        let sentinel_only = LevelGraph {
            sign: Sign::Plus,
            vertices: Vec::new(),
            edges: Vec::new(),
            params: StepParams {
                epsilon: 1.0,
                delta: 1.0,
                big_f: 2,
            },
        };
        let real = |rep| AugmentedVertex {
            kind: VertexKind::Real {
                rep,
                point: Point::new(rep as f64, 0.0),
            },
            sign: Sign::Plus,
            value: 3.0,
            step: 3,
            long_horizontal_end: false,
            long_vertical_end: false,
        };
        let mut g = sentinel_only.clone();
        g.vertices = vec![real(0), real(1), real(2), real(3)];
        let d = [Some(1), Some(2), Some(4), None];
        let values: Vec<f64> = gamma(&g, &d).iter().map(|e| e.value).collect();
        assert_eq!(values, vec![2.0, 1.0, 0.0, 0.0]);

        g.sign = Sign::Minus;
        let values: Vec<f64> = gamma(&g, &d).iter().map(|e| e.value).collect();
        assert_eq!(values, vec![-2.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn bfs_small_paths() {
        assert_eq!(bfs_distances(3, &[], 0), vec![Some(0), None, None]);
        assert_eq!(
            bfs_distances(3, &[(0, 1), (1, 2)], 0),
            vec![Some(0), Some(1), Some(2)]
        );
    }

    #[test]
    fn mixed_instance_histogram_and_sandwich() {
        let pts = [
            (0.0, 0.0, 0.42),
            (0.05, 0.9, 0.37),
            (0.9, 0.02, 0.11),
            (0.4, 0.4, -0.08),
            (0.52, 0.43, -0.13),
            (1.5, 1.5, -0.33),
            (2.3, 1.52, -0.41),
            (2.0, 2.9, 0.0),
        ];
        let v = reps(&pts, 3);
        let p = params_for(&v, 0.1, 0.3);
        assert_eq!(p.big_f, 4);
        let vertices = pad_levels(&v, &p);
        let mut histogram = std::collections::BTreeMap::new();
        for w in vertices.iter().filter(|w| w.rep().is_some()) {
            *histogram.entry(w.signed_level()).or_insert(0) += 1;
        }
        // Hand histogram of signed steps: floor(f/eps) for f >= 0, -floor(-f/eps) for f < 0.
        let expected: std::collections::BTreeMap<i64, i32> =
            [(4, 1), (3, 1), (1, 1), (0, 2), (-1, 1), (-3, 1), (-4, 1)]
                .into_iter()
                .collect();
        assert_eq!(histogram, expected);

        let pot = potential(&v, &p);
        for (i, r) in v.reps().iter().enumerate() {
            let g = pot.values[i];
            if r.value >= 0.0 {
                assert!(0.0 <= g && g <= r.value, "rep {i}: {g} vs {}", r.value);
            } else {
                assert!(r.value <= g && g <= 0.0, "rep {i}: {g} vs {}", r.value);
            }
        }
        // Steps never jump by more than one along an edge. The f-gap is below
        // eps on short and sentinel edges but can reach 2 eps on step edges.
        for graph in [&pot.plus, &pot.minus] {
            for &(a, b) in &graph.edges {
                let (wa, wb) = (graph.vertices[a], graph.vertices[b]);
                assert!(wa.step.abs_diff(wb.step) <= 1);
                let both_real = wa.rep().is_some() && wb.rep().is_some();
                let gap = (wa.value - wb.value).abs();
                if a == 0 || (both_real && wa.step == wb.step) {
                    assert!(gap <= p.epsilon, "edge ({a}, {b})");
                } else {
                    assert!(gap < 2.0 * p.epsilon, "edge ({a}, {b})");
                }
            }
        }
    }

    #[test]
    fn zero_function_tables() {
        let v = reps(&[(0.0, 0.0, 0.0), (0.3, 0.8, 0.0), (0.3, 0.1, 0.0)], 3);
        let p = params_for(&v, 0.1, 0.2);
        let pot = potential(&v, &p);
        let g = build_g(&v, &pot.values);
        assert_eq!(g.domain, vec![0.0, 0.3]);
        assert!(g.values.iter().all(|&x| x == 0.0));
        let h = build_h(&v, &g);
        assert_eq!(h.domain, vec![0.0, 0.1, 0.8]);
        assert!(h.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn canonical_choices() {
        let v = reps(&[(0.5, 0.9, 1.0), (0.5, 0.2, 2.0), (0.1, 0.2, 5.0)], 3);
        let gamma_values: Vec<f64> = v.reps().iter().map(|r| r.value * 10.0).collect();
        let g = build_g(&v, &gamma_values);
        // Column u = 0.5 uses the lowest point (0.5, 0.2).
        assert_eq!(g.get(0.5), Some(20.0));
        let zero = TableFunction {
            domain: g.domain.clone(),
            values: vec![0.0; g.len()],
        };
        let h = build_h(&v, &zero);
        // Row v = 0.2 uses the leftmost point (0.1, 0.2).
        assert_eq!(h.get(0.2), Some(5.0));
        assert_eq!(h.get(0.9), Some(1.0));
    }
}
