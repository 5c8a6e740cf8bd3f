//! One approximate decomposition pass and the refinement loop built on it.

mod delta;
mod refine;
mod report;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extend::{extend_pwl, PWLinear};
use crate::gamma::{build_g, build_h, potential, Potential, StepParams, TableFunction};
use crate::geometry::Level;
use crate::quantize::{
    bridge_gap, build_representatives, check_delta, search_level, Gap, RepresentativeSet,
    SampledCompactum,
};

pub use delta::{delta_from_lipschitz, estimate_delta};
pub use refine::refine;
pub use report::{residual_report, BoundCheck, HistogramBin, Report};

use delta::check_epsilon;

/// `f ~ g(x) + h(y)` together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub meta: DecompositionMeta,
    pub g: PWLinear,
    pub h: PWLinear,
}

impl Decomposition {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.g.eval(x) + self.h.eval(y)
    }

    /// `max |f - g - h|` over the sample.
    pub fn sup_residual(&self, sample: &SampledCompactum) -> f64 {
        sup_abs(&residuals(sample, &self.g, &self.h))
    }
}

/// Parameters of the last pass plus a record of every pass.
///
/// `level`, `epsilon`, `delta` and `F` are `None` when no pass ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMeta {
    pub level: Option<u32>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "F")]
    pub big_f: Option<u64>,
    pub iterations: usize,
    pub sup_residual: f64,
    /// Stopping tolerance of a refinement run.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub passes: Vec<PassSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassSummary {
    pub norm_before: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub level: u32,
    #[serde(rename = "F")]
    pub big_f: u64,
    /// `None` when no almost array joins a long vertical end to a long
    /// horizontal end.
    pub bridge_gap: Option<u64>,
    /// The level satisfies both `1/2^n <= delta` and `bridge_gap >= F`.
    pub certified: bool,
    pub norm_after: f64,
}

/// Everything one pass computes, kept for inspection and bound checks.
#[derive(Debug, Clone)]
pub struct PassArtifacts {
    pub reps: RepresentativeSet,
    pub params: StepParams,
    /// Absent when `F = 0`; the potential is then identically zero.
    pub potential: Option<Potential>,
    pub gamma: Vec<f64>,
    pub g_table: TableFunction,
    pub h_table: TableFunction,
    pub g: PWLinear,
    pub h: PWLinear,
    pub gap: Gap,
    pub certified: bool,
}

impl PassArtifacts {
    pub fn level(&self) -> Level {
        self.reps.level()
    }
}

/// Runs one pass: representatives, both level graphs, the potential, the
/// table functions and their extensions.
///
/// Without `delta` it is estimated from the sample; a one-point sample uses
/// `1`. Without `level` the smallest certified level up to `n_max` is
/// searched. A forced level is used even when it is not certified; the
/// result then says so.
pub fn approximate_pass(
    sample: &SampledCompactum,
    epsilon: f64,
    delta: Option<f64>,
    level: Option<Level>,
    n_max: u32,
) -> Result<PassArtifacts> {
    check_epsilon(epsilon)?;
    let delta = match delta {
        Some(d) => {
            check_delta(d)?;
            d
        }
        None if sample.len() == 1 => 1.0,
        None => estimate_delta(sample, epsilon)?,
    };
    let params = StepParams::new(sample.norm(), epsilon, delta);
    let (reps, gap) = match level {
        Some(level) => {
            let reps = build_representatives(sample, level)?;
            let gap = bridge_gap(&reps, delta);
            (reps, gap)
        }
        None => {
            let choice = search_level(sample, delta, params.big_f, n_max)?;
            let reps = build_representatives(sample, choice.level)?;
            // The search skips the bridge graph when F = 0.
            let gap = if params.big_f == 0 {
                bridge_gap(&reps, delta)
            } else {
                choice.gap
            };
            (reps, gap)
        }
    };
    let certified = reps.level().cell_side() <= delta && gap.at_least(params.big_f);

    let (potential, gamma) = if params.big_f == 0 {
        (None, vec![0.0; reps.len()])
    } else {
        let p = potential(&reps, &params);
        let values = p.values.clone();
        (Some(p), values)
    };
    let g_table = build_g(&reps, &gamma);
    let h_table = build_h(&reps, &g_table);
    let columns: BTreeSet<i64> = reps.reps().iter().map(|r| r.cell.i).collect();
    let rows: BTreeSet<i64> = reps.reps().iter().map(|r| r.cell.j).collect();
    let g = extend_pwl(&g_table, reps.level(), &columns)?;
    let h = extend_pwl(&h_table, reps.level(), &rows)?;
    Ok(PassArtifacts {
        reps,
        params,
        potential,
        gamma,
        g_table,
        h_table,
        g,
        h,
        gap,
        certified,
    })
}

/// A single pass packaged as a [`Decomposition`].
pub fn approximate_decompose(
    sample: &SampledCompactum,
    epsilon: f64,
    delta: Option<f64>,
    level: Option<Level>,
    n_max: u32,
) -> Result<Decomposition> {
    let pass = approximate_pass(sample, epsilon, delta, level, n_max)?;
    let sup = sup_abs(&residuals(sample, &pass.g, &pass.h));
    let summary = summarize(&pass, sample.norm(), sup);
    Ok(Decomposition {
        meta: meta_from(&[summary], sup, None),
        g: pass.g,
        h: pass.h,
    })
}

pub(crate) fn summarize(pass: &PassArtifacts, norm_before: f64, norm_after: f64) -> PassSummary {
    PassSummary {
        norm_before,
        epsilon: pass.params.epsilon,
        delta: pass.params.delta,
        level: pass.level().get(),
        big_f: pass.params.big_f,
        bridge_gap: pass.gap.finite(),
        certified: pass.certified,
        norm_after,
    }
}

pub(crate) fn meta_from(passes: &[PassSummary], sup: f64, tol: Option<f64>) -> DecompositionMeta {
    let last = passes.last();
    DecompositionMeta {
        level: last.map(|p| p.level),
        epsilon: last.map(|p| p.epsilon),
        delta: last.map(|p| p.delta),
        big_f: last.map(|p| p.big_f),
        iterations: passes.len(),
        sup_residual: sup,
        tol,
        passes: passes.to_vec(),
    }
}

/// `f - g(x) - h(y)` at every sample point.
pub fn residuals(sample: &SampledCompactum, g: &PWLinear, h: &PWLinear) -> Vec<f64> {
    sample
        .points()
        .iter()
        .zip(sample.values())
        .map(|(p, &f)| f - g.eval(p.x) - h.eval(p.y))
        .collect()
}

pub(crate) fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, r| m.max(r.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::Point;
    use crate::quantize::DEFAULT_N_MAX;

    fn sample(rows: &[(f64, f64, f64)]) -> SampledCompactum {
        SampledCompactum::new(
            rows.iter().map(|&(x, y, _)| Point::new(x, y)).collect(),
            rows.iter().map(|&(_, _, f)| f).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_function() {
        let s = sample(&[(0.0, 0.0, 0.0), (0.3, 0.5, 0.0), (0.7, 0.9, 0.0)]);
        let d = approximate_decompose(&s, 0.1, None, None, DEFAULT_N_MAX).unwrap();
        assert!(d.g.is_zero() && d.h.is_zero());
        assert_eq!(d.meta.sup_residual, 0.0);
        assert_eq!(d.meta.big_f, Some(0));
    }

    #[test]
    fn single_point() {
        let s = sample(&[(0.25, 0.75, 3.5)]);
        let d = approximate_decompose(&s, 0.1, None, None, DEFAULT_N_MAX).unwrap();
        assert_eq!(d.meta.sup_residual, 0.0);
        assert_eq!(d.g.eval(0.25) + d.h.eval(0.75), 3.5);
        assert_eq!(d.g.breakpoints().len(), 1);
        assert_eq!(d.h.breakpoints().len(), 1);
    }

    #[test]
    fn stored_residual_matches_recomputation() {
        let rows: Vec<(f64, f64, f64)> = (0..40)
            .map(|i| {
                let t = i as f64 / 39.0;
                (t, t * t, (3.0 * t).sin() + t * t * t * t)
            })
            .collect();
        let s = sample(&rows);
        let d = approximate_decompose(&s, 0.05, None, None, DEFAULT_N_MAX).unwrap();
        assert_eq!(d.meta.sup_residual, d.sup_residual(&s));
        assert!(d.meta.sup_residual <= 1.0);
        assert!(d.g.norm() <= s.norm());
        assert!(d.h.norm() <= 2.0 * s.norm());
        assert!(d.meta.passes[0].certified);
    }

    #[test]
    fn l_shape_is_rejected() {
        let mut rows = Vec::new();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            rows.push((0.0, t, t));
            if k > 0 {
                rows.push((t, 1.0, 1.0 - t));
            }
        }
        let s = sample(&rows);
        let err = approximate_decompose(&s, 0.05, None, None, 12).unwrap_err();
        assert!(matches!(err, Error::LevelNotFound { .. }), "{err}");
    }

    #[test]
    fn forced_level_reports_certification() {
        let mut rows = Vec::new();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            rows.push((0.0, t, t));
            if k > 0 {
                rows.push((t, 1.0, 1.0 - t));
            }
        }
        let s = sample(&rows);
        let d = approximate_decompose(&s, 0.05, None, Some(Level::new(6).unwrap()), 12).unwrap();
        assert!(!d.meta.passes[0].certified);
    }
}
