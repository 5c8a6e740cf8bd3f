use crate::error::{Error, Result};
use crate::extend::PWLinear;
use crate::quantize::SampledCompactum;

use super::{approximate_pass, meta_from, residuals, summarize, sup_abs, Decomposition};

/// Each pass approximates the current residual with `epsilon = ||f_i|| / 40`,
/// which at least halves it.
const EPSILON_RATIO: f64 = 40.0;

/// Repeats approximate passes on the residual until its sup norm on the
/// sample is at most `tol`.
///
/// The residual is recomputed from the accumulated `g` and `h` after every
/// pass, so the stored norms are those of the returned functions.
pub fn refine(
    sample: &SampledCompactum,
    tol: f64,
    max_iter: usize,
    n_max: u32,
) -> Result<Decomposition> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive and finite, got {tol}"
        )));
    }
    let mut g = PWLinear::zero();
    let mut h = PWLinear::zero();
    let mut residual = sample.values().to_vec();
    let mut norm = sup_abs(&residual);
    let mut passes = Vec::new();
    while norm > tol {
        if passes.len() >= max_iter {
            return Err(Error::NoConvergence {
                iterations: passes.len(),
                residual: norm,
                tol,
            });
        }
        let current = sample.with_values(residual)?;
        let pass = approximate_pass(&current, norm / EPSILON_RATIO, None, None, n_max)?;
        g = g.add(&pass.g);
        h = h.add(&pass.h);
        residual = residuals(sample, &g, &h);
        let after = sup_abs(&residual);
        passes.push(summarize(&pass, norm, after));
        norm = after;
    }
    Ok(Decomposition {
        meta: meta_from(&passes, norm, Some(tol)),
        g,
        h,
    })
}
