use crate::error::{Error, Result};
use crate::geometry::chebyshev;
use crate::quantize::SampledCompactum;

/// Largest `delta` such that every sample pair closer than `delta` differs in
/// `f` by less than `epsilon`.
///
/// That is the Chebyshev length of the closest pair with `|df| >= epsilon`,
/// or the largest pair distance when no pair violates the bound.
pub fn estimate_delta(sample: &SampledCompactum, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if sample.len() < 2 {
        return Err(Error::DegenerateSample(
            "at least two distinct points are needed to estimate delta".into(),
        ));
    }
    let pts = sample.points();
    let vals = sample.values();
    let mut widest = 0.0f64;
    let mut closest_violation = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = chebyshev(pts[i], pts[j]);
            widest = widest.max(d);
            if d < closest_violation && (vals[i] - vals[j]).abs() >= epsilon {
                closest_violation = d;
            }
        }
    }
    if widest == 0.0 {
        return Err(Error::DegenerateSample("all points coincide".into()));
    }
    Ok(if closest_violation.is_finite() {
        closest_violation
    } else {
        widest
    })
}

/// `epsilon / L` for an `L`-Lipschitz function (Chebyshev metric).
pub fn delta_from_lipschitz(lipschitz: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(lipschitz.is_finite() && lipschitz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    Ok(epsilon / lipschitz)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )))
    }
}
