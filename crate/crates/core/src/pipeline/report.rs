use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gamma::Sign;
use crate::geometry::Level;
use crate::quantize::{
    almost_horizontal_pairs, almost_vertical_pairs, long_horizontal_flags, long_vertical_flags,
    short_pairs, SampledCompactum, DEFAULT_N_MAX,
};

use super::{approximate_pass, residuals, sup_abs, Decomposition};

/// Relative slack for bounds that are small multiples of `epsilon`; those
/// are computed in floating point and may be off by a few ulps.
pub const ROUNDING_SLACK: f64 = 16.0 * f64::EPSILON;

const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    /// Largest value of the checked quantity.
    pub observed: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub sup_residual: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub norm_h: f64,
    /// Every pass ran at a certified level.
    pub certified: bool,
    /// `||f_0||` followed by the residual norm after each pass.
    pub iteration_norms: Vec<f64>,
    pub checks: Vec<BoundCheck>,
    /// `|f - g - h|` over the sample in equal bins on `[0, sup_residual]`.
    pub histogram: Vec<HistogramBin>,
}

impl Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sup_residual  {}", self.sup_residual)?;
        writeln!(f, "norm_f        {}", self.norm_f)?;
        writeln!(f, "norm_g        {}", self.norm_g)?;
        writeln!(f, "norm_h        {}", self.norm_h)?;
        writeln!(f, "certified     {}", self.certified)?;
        if self.iteration_norms.len() > 1 {
            writeln!(f, "iteration norms:")?;
            for (i, n) in self.iteration_norms.iter().enumerate() {
                writeln!(f, "  {i:>3}  {n}")?;
            }
        }
        writeln!(f, "checks:")?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<4} {:<24} observed {} <= {}",
                if c.holds { "ok" } else { "FAIL" },
                c.name,
                c.observed,
                c.bound
            )?;
        }
        writeln!(f, "residual histogram:")?;
        for b in &self.histogram {
            writeln!(f, "  [{}, {}]  {}", b.lower, b.upper, b.count)?;
        }
        Ok(())
    }
}

struct Checks {
    scale: f64,
    out: Vec<BoundCheck>,
}

impl Checks {
    /// `observed <= bound` up to [`ROUNDING_SLACK`].
    fn approx(&mut self, name: &str, bound: f64, observed: f64) {
        let slack = ROUNDING_SLACK * self.scale.max(bound);
        self.push(name, bound, observed, observed <= bound + slack);
    }

    fn exact(&mut self, name: &str, bound: f64, observed: f64) {
        self.push(name, bound, observed, observed <= bound);
    }

    fn push(&mut self, name: &str, bound: f64, observed: f64, holds: bool) {
        self.out.push(BoundCheck {
            name: name.to_string(),
            bound,
            observed,
            holds,
        });
    }
}

/// Re-derives the residual statistics and every applicable bound for `d`.
///
/// A single-pass decomposition is checked against the full list of
/// intermediate bounds, with the potential rebuilt at the stored level and
/// `delta`. A refinement run is checked against its stopping tolerance,
/// per-pass halving and the accumulated norm bounds.
pub fn residual_report(sample: &SampledCompactum, d: &Decomposition) -> Result<Report> {
    let res = residuals(sample, &d.g, &d.h);
    let sup = sup_abs(&res);
    let norm_f = sample.norm();
    let mut checks = Checks {
        scale: norm_f,
        out: Vec::new(),
    };
    let meta = &d.meta;
    let single = meta.tol.is_none() && meta.passes.len() == 1;
    if single {
        single_pass_checks(sample, d, sup, &mut checks)?;
    } else {
        if let Some(tol) = meta.tol {
            checks.exact("residual_tol", tol, sup);
        }
        let worst_ratio = meta
            .passes
            .iter()
            .map(|p| {
                if p.norm_before > 0.0 {
                    p.norm_after / p.norm_before
                } else {
                    0.0
                }
            })
            .fold(0.0f64, f64::max);
        if !meta.passes.is_empty() {
            checks.exact("pass_halving", 0.5, worst_ratio);
        }
        checks.exact("norm_g", 2.0 * norm_f, d.g.norm());
        checks.exact("norm_h", 4.0 * norm_f, d.h.norm());
    }

    let mut iteration_norms = Vec::with_capacity(meta.passes.len() + 1);
    iteration_norms.push(norm_f);
    iteration_norms.extend(meta.passes.iter().map(|p| p.norm_after));

    Ok(Report {
        sup_residual: sup,
        norm_f,
        norm_g: d.g.norm(),
        norm_h: d.h.norm(),
        certified: meta.passes.iter().all(|p| p.certified),
        iteration_norms,
        checks: checks.out,
        histogram: histogram(&res, sup),
    })
}

fn single_pass_checks(
    sample: &SampledCompactum,
    d: &Decomposition,
    sup: f64,
    checks: &mut Checks,
) -> Result<()> {
    let pass_meta = &d.meta.passes[0];
    let eps = pass_meta.epsilon;
    let delta = pass_meta.delta;
    let norm_f = sample.norm();
    let level = Level::new(pass_meta.level)?;
    let pass = approximate_pass(sample, eps, Some(delta), Some(level), DEFAULT_N_MAX)?;
    let v = &pass.reps;
    let gamma = &pass.gamma;
    let lv = long_vertical_flags(v, delta);
    let lh = long_horizontal_flags(v, delta);
    let g_at = |i: usize| d.g.eval(v.point(i).x);
    let h_at = |i: usize| d.h.eval(v.point(i).y);

    let mut gamma_short = 0.0f64;
    let mut g_short = 0.0f64;
    short_pairs(v, delta, |a, b| {
        gamma_short = gamma_short.max((gamma[a] - gamma[b]).abs());
        g_short = g_short.max((g_at(a) - g_at(b)).abs());
    });
    let mut g_vertical = 0.0f64;
    almost_vertical_pairs(v, |a, b| {
        g_vertical = g_vertical.max((g_at(a) - g_at(b)).abs());
    });
    let mut h_horizontal = 0.0f64;
    almost_horizontal_pairs(v, |a, b| {
        h_horizontal = h_horizontal.max((h_at(a) - h_at(b)).abs());
    });

    let mut gamma_lh = 0.0f64;
    let mut gamma_lv = 0.0f64;
    let mut g_lh = 0.0f64;
    let mut g_lv = 0.0f64;
    let mut sandwich = 0.0f64;
    let mut table_residual = 0.0f64;
    for i in 0..v.len() {
        let f = v.value(i);
        if lh[i] {
            gamma_lh = gamma_lh.max((f - gamma[i]).abs());
            g_lh = g_lh.max((g_at(i) - f).abs());
        }
        if lv[i] {
            gamma_lv = gamma_lv.max(gamma[i].abs());
            g_lv = g_lv.max(g_at(i).abs());
        }
        let violation = match Sign::of(f) {
            Sign::Plus => (-gamma[i]).max(gamma[i] - f),
            Sign::Minus => gamma[i].max(f - gamma[i]),
        };
        sandwich = sandwich.max(violation.max(0.0));
        table_residual = table_residual.max((f - g_at(i) - h_at(i)).abs());
    }

    checks.approx("gamma_short", eps, gamma_short);
    checks.approx("gamma_long_horizontal", eps, gamma_lh);
    checks.exact("gamma_long_vertical", 0.0, gamma_lv);
    checks.exact("gamma_sandwich", 0.0, sandwich);
    checks.approx("g_short", 3.0 * eps, g_short);
    checks.approx("g_long_horizontal", 2.0 * eps, g_lh);
    checks.approx("g_long_vertical", eps, g_lv);
    checks.exact("g_table_norm", norm_f, pass.g_table.norm());
    checks.approx("table_residual", 4.0 * eps, table_residual);
    checks.approx("g_almost_vertical", 3.0 * eps, g_vertical);
    checks.approx("h_almost_horizontal", 12.0 * eps, h_horizontal);
    checks.exact("h_table_norm", 2.0 * norm_f, pass.h_table.norm());
    checks.exact("residual", 20.0 * eps, sup);
    checks.exact("norm_g", norm_f, d.g.norm());
    checks.exact("norm_h", 2.0 * norm_f, d.h.norm());
    Ok(())
}

fn histogram(res: &[f64], sup: f64) -> Vec<HistogramBin> {
    if sup == 0.0 {
        return vec![HistogramBin {
            lower: 0.0,
            upper: 0.0,
            count: res.len(),
        }];
    }
    let width = sup / HISTOGRAM_BINS as f64;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for r in res {
        let k = ((r.abs() / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[k] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(k, &count)| HistogramBin {
            lower: k as f64 * width,
            upper: if k + 1 == HISTOGRAM_BINS {
                sup
            } else {
                (k + 1) as f64 * width
            },
            count,
        })
        .collect()
}
