//! Seeded test compacta with known array structure, and functions to put on them.

use std::str::FromStr;

use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quantize::SampledCompactum;

/// Points per segment for the two segment-union generators.
pub const DEFAULT_SEGMENT_COUNT: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    MonotoneCurve,
    DisjointCrossFree,
    WithArray,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone_curve" => Ok(GeneratorKind::MonotoneCurve),
            "disjoint_cross_free" => Ok(GeneratorKind::DisjointCrossFree),
            "with_array" => Ok(GeneratorKind::WithArray),
            other => Err(Error::InvalidParameter(format!(
                "unknown generator kind '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Total points for a curve, points per segment otherwise.
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<SampledCompactum> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        match self.kind {
            GeneratorKind::MonotoneCurve => gen_monotone_curve(self.count, self.seed),
            GeneratorKind::DisjointCrossFree => disjoint_cross_free(self.count, self.seed),
            GeneratorKind::WithArray => with_array(self.count, self.seed),
        }
    }
}

/// `count` points on a strictly increasing curve from `(0, 0)` to `(1, 1)`.
///
/// Both coordinates are normalized cumulative sums of positive random
/// increments, so no two points share an `x` or a `y`.
pub fn gen_monotone_curve(count: usize, seed: u64) -> Result<SampledCompactum> {
    if count < 2 {
        return Err(Error::InvalidParameter(
            "a curve needs at least 2 points".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    xs.push(0.0);
    ys.push(0.0);
    for _ in 1..count {
        sx += rng.gen_range(0.05..1.0);
        sy += rng.gen_range(0.05..1.0);
        xs.push(sx);
        ys.push(sy);
    }
    let points = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| Point::new(x / sx, y / sy))
        .collect();
    SampledCompactum::new(points, vec![0.0; count])
}

/// `{0} x [0, 1]` together with `[2, 3] x {2}`.
pub fn gen_disjoint_cross_free(seed: u64) -> Result<SampledCompactum> {
    disjoint_cross_free(DEFAULT_SEGMENT_COUNT, seed)
}

/// An L-shape `{0} x [0, 1]` and `[0, 1] x {1}`; it always contains
/// `(0, 0)`, `(0, 1)` and `(1, 1)`.
pub fn gen_with_array(seed: u64) -> Result<SampledCompactum> {
    with_array(DEFAULT_SEGMENT_COUNT, seed)
}

fn disjoint_cross_free(per_segment: usize, seed: u64) -> Result<SampledCompactum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = segment_params(per_segment, &mut rng)
        .into_iter()
        .map(|t| Point::new(0.0, t))
        .collect();
    points.extend(
        segment_params(per_segment, &mut rng)
            .into_iter()
            .map(|t| Point::new(2.0 + t, 2.0)),
    );
    let n = points.len();
    SampledCompactum::new(points, vec![0.0; n])
}

fn with_array(per_segment: usize, seed: u64) -> Result<SampledCompactum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = segment_params(per_segment, &mut rng)
        .into_iter()
        .map(|t| Point::new(0.0, t))
        .collect();
    // The corner (0, 1) is already on the vertical leg.
    points.extend(
        segment_params(per_segment, &mut rng)
            .into_iter()
            .filter(|&t| t > 0.0)
            .map(|t| Point::new(t, 1.0)),
    );
    let n = points.len();
    SampledCompactum::new(points, vec![0.0; n])
}

/// Sorted distinct parameters in `[0, 1]`, always including both ends.
fn segment_params(count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut ts = vec![0.0, 1.0];
    for _ in 2..count.max(2) {
        ts.push(rng.gen_range(0.0..1.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Replaces the sample's values with `name` evaluated pointwise.
///
/// Named functions: `zero`, `constant` (value `params[0]`, default 1),
/// `coordinate_sum` (`x + y`) and `sin_poly` (`sin(a x) + y^b`, default
/// `a = 3`, `b = 2`). Any other name is parsed as an expression in `x` and
/// `y`, for example `math::sin(x) * y`.
pub fn attach_function(
    sample: &SampledCompactum,
    name: &str,
    params: &[f64],
) -> Result<SampledCompactum> {
    let f = function_by_name(name, params)?;
    let values = sample
        .points()
        .iter()
        .map(|p| f.eval(p.x, p.y))
        .collect::<Result<Vec<f64>>>()?;
    sample.with_values(values)
}

enum NamedFunction {
    Zero,
    Constant(f64),
    CoordinateSum,
    SinPoly(f64, f64),
    Expression(String, Node<DefaultNumericTypes>),
}

fn function_by_name(name: &str, params: &[f64]) -> Result<NamedFunction> {
    let param = |k: usize, default: f64| params.get(k).copied().unwrap_or(default);
    Ok(match name {
        "zero" => NamedFunction::Zero,
        "constant" => NamedFunction::Constant(param(0, 1.0)),
        "coordinate_sum" => NamedFunction::CoordinateSum,
        "sin_poly" => NamedFunction::SinPoly(param(0, 3.0), param(1, 2.0)),
        expr => {
            let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(expr)
                .map_err(|_| Error::UnknownFunction(expr.to_string()))?;
            let f = NamedFunction::Expression(expr.to_string(), tree);
            // Unknown identifiers only surface on evaluation.
            f.eval(0.5, 0.5)?;
            f
        }
    })
}

impl NamedFunction {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            NamedFunction::Zero => Ok(0.0),
            NamedFunction::Constant(c) => Ok(*c),
            NamedFunction::CoordinateSum => Ok(x + y),
            NamedFunction::SinPoly(a, b) => {
                let power = if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                    y.powi(*b as i32)
                } else {
                    y.powf(*b)
                };
                Ok((a * x).sin() + power)
            }
            NamedFunction::Expression(text, tree) => {
                let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
                ctx.set_value("x".into(), Value::Float(x))
                    .and_then(|_| ctx.set_value("y".into(), Value::Float(y)))
                    .map_err(|e| Error::Parse(e.to_string()))?;
                tree.eval_number_with_context(&ctx)
                    .map_err(|_| Error::UnknownFunction(text.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::find_length2_array;
    use crate::geometry::Level;
    use crate::quantize::{build_representatives, long_horizontal_ends, long_vertical_ends};

    #[test]
    fn two_point_curve() {
        let s = gen_monotone_curve(2, 9).unwrap();
        let p = s.points();
        assert!(p[0].x < p[1].x && p[0].y < p[1].y);
    }

    #[test]
    fn curve_is_strictly_increasing_and_array_free() {
        let s = gen_monotone_curve(500, 3).unwrap();
        for w in s.points().windows(2) {
            assert!(w[0].x < w[1].x && w[0].y < w[1].y);
        }
        assert!(find_length2_array(s.points(), 0.0).is_none());
    }

    #[test]
    fn generators_are_seed_deterministic() {
        assert_eq!(
            gen_monotone_curve(1000, 5).unwrap(),
            gen_monotone_curve(1000, 5).unwrap()
        );
        assert_ne!(
            gen_monotone_curve(50, 5).unwrap(),
            gen_monotone_curve(50, 6).unwrap()
        );
        assert_eq!(gen_with_array(2).unwrap(), gen_with_array(2).unwrap());
    }

    #[test]
    fn cross_free_union() {
        let s = gen_disjoint_cross_free(1).unwrap();
        for p in s.points() {
            let vertical = p.x == 0.0 && (0.0..=1.0).contains(&p.y);
            let horizontal = p.y == 2.0 && (2.0..=3.0).contains(&p.x);
            assert!(vertical || horizontal, "{p}");
        }
        assert!(find_length2_array(s.points(), 0.0).is_none());
        let v = build_representatives(&s, Level::new(4).unwrap()).unwrap();
        assert!(!long_vertical_ends(&v, 0.5).is_empty());
        assert!(!long_horizontal_ends(&v, 0.5).is_empty());
    }

    #[test]
    fn l_shape_contains_corner_and_array() {
        let s = gen_with_array(4).unwrap();
        for (x, y) in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            assert!(s.points().contains(&Point::new(x, y)));
        }
        let cert = find_length2_array(s.points(), 0.0).unwrap();
        assert!(cert.is_valid(0.0));
    }

    #[test]
    fn named_functions() {
        let s = gen_monotone_curve(20, 1).unwrap();
        let zero = attach_function(&s, "zero", &[]).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let sum = attach_function(&s, "coordinate_sum", &[]).unwrap();
        let sp = attach_function(&s, "sin_poly", &[3.0, 2.0]).unwrap();
        for (k, p) in s.points().iter().enumerate() {
            assert_eq!(sum.values()[k], p.x + p.y);
            assert_eq!(sp.values()[k], (3.0 * p.x).sin() + p.y * p.y);
        }
        let c = attach_function(&s, "constant", &[2.5]).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn custom_expression() {
        let s = gen_monotone_curve(10, 2).unwrap();
        let e = attach_function(&s, "2 * x - y", &[]).unwrap();
        for (k, p) in s.points().iter().enumerate() {
            assert!((e.values()[k] - (2.0 * p.x - p.y)).abs() < 1e-15);
        }
        assert!(matches!(
            attach_function(&s, "no_such_function", &[]),
            Err(Error::UnknownFunction(_))
        ));
        assert!(matches!(
            attach_function(&s, "x +* (", &[]),
            Err(Error::UnknownFunction(_))
        ));
    }
}
