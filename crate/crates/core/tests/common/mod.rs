//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use superpose::geometry::{chebyshev, Point};
use superpose::pipeline::PassArtifacts;

/// Exhaustive scan for a length-two array: a vertical and a horizontal
/// segment sharing an endpoint, with distinct outer endpoints.
pub fn triple_scan(points: &[Point]) -> bool {
    let m = points.len();
    for b in 0..m {
        for a in 0..m {
            if a == b || points[a].x != points[b].x {
                continue;
            }
            for c in 0..m {
                if c == b || c == a || points[c].y != points[b].y {
                    continue;
                }
                return true;
            }
        }
    }
    false
}

/// Every intermediate bound of one pass, checked by direct pair scans over
/// the representatives. Returns a description of each violation.
pub fn bound_violations(pass: &PassArtifacts) -> Vec<String> {
    let v = &pass.reps;
    let m = v.len();
    let eps = pass.params.epsilon;
    let delta = pass.params.delta;
    let threshold = 2.0 / 2f64.powi(pass.level().get() as i32);
    let norm = (0..m).fold(0.0f64, |a, i| a.max(v.value(i).abs()));
    let slack = |bound: f64| 16.0 * f64::EPSILON * norm.max(bound);

    let pts: Vec<Point> = (0..m).map(|i| v.point(i)).collect();
    let f: Vec<f64> = (0..m).map(|i| v.value(i)).collect();
    let steps: Vec<i64> = match &pass.potential {
        Some(p) => p.steps.clone(),
        None => vec![0; m],
    };
    let gamma = &pass.gamma;
    let g: Vec<f64> = pts.iter().map(|p| pass.g_table.get(p.x).unwrap()).collect();
    let h: Vec<f64> = pts.iter().map(|p| pass.h_table.get(p.y).unwrap()).collect();

    let mut lv = vec![false; m];
    let mut lh = vec![false; m];
    for a in 0..m {
        for b in 0..m {
            if a == b || chebyshev(pts[a], pts[b]) < delta {
                continue;
            }
            if (pts[a].x - pts[b].x).abs() < threshold {
                lv[a] = true;
            }
            if (pts[a].y - pts[b].y).abs() < threshold {
                lh[a] = true;
            }
        }
    }

    let mut out = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            out.push(what);
        }
    };
    for a in 0..m {
        for b in a + 1..m {
            let short = chebyshev(pts[a], pts[b]) < delta;
            if short {
                check(
                    (steps[a] - steps[b]).abs() <= 1,
                    format!("gamma short {a}-{b}: steps {} {}", steps[a], steps[b]),
                );
                let d = (g[a] - g[b]).abs();
                check(
                    d <= 3.0 * eps + slack(3.0 * eps),
                    format!("G short {a}-{b}: {d}"),
                );
            }
            if (pts[a].x - pts[b].x).abs() < threshold {
                let d = (g[a] - g[b]).abs();
                check(
                    d <= 3.0 * eps + slack(3.0 * eps),
                    format!("G almost vertical {a}-{b}: {d}"),
                );
            }
            if (pts[a].y - pts[b].y).abs() < threshold {
                let d = (h[a] - h[b]).abs();
                check(
                    d <= 12.0 * eps + slack(12.0 * eps),
                    format!("H almost horizontal {a}-{b}: {d}"),
                );
            }
        }
        if lh[a] {
            let d = (f[a] - gamma[a]).abs();
            check(
                d <= eps + slack(eps),
                format!("gamma long horizontal {a}: {d}"),
            );
            let d = (g[a] - f[a]).abs();
            check(
                d <= 2.0 * eps + slack(2.0 * eps),
                format!("G long horizontal {a}: {d}"),
            );
        }
        if lv[a] {
            check(
                gamma[a] == 0.0,
                format!("gamma long vertical {a}: {}", gamma[a]),
            );
            check(
                g[a].abs() <= eps + slack(eps),
                format!("G long vertical {a}: {}", g[a]),
            );
        }
        let r = (f[a] - g[a] - h[a]).abs();
        check(
            r <= 4.0 * eps + slack(4.0 * eps),
            format!("table residual {a}: {r}"),
        );
    }
    let g_norm = pass
        .g_table
        .values
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let h_norm = pass
        .h_table
        .values
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    check(g_norm <= norm, format!("||G|| {g_norm} > ||f|| {norm}"));
    check(
        h_norm <= 2.0 * norm,
        format!("||H|| {h_norm} > 2||f|| {norm}"),
    );
    out
}

/// Sandwich and quantization of the potential.
pub fn sandwich_violations(pass: &PassArtifacts) -> Vec<String> {
    let v = &pass.reps;
    let eps = pass.params.epsilon;
    let mut out = Vec::new();
    for i in 0..v.len() {
        let (f, g) = (v.value(i), pass.gamma[i]);
        let ok = if f >= 0.0 {
            0.0 <= g && g <= f
        } else {
            f <= g && g <= 0.0
        };
        if !ok {
            out.push(format!("sandwich at {i}: f {f}, gamma {g}"));
        }
        let k = (g / eps).round();
        if (g - k * eps).abs() > f64::EPSILON * g.abs().max(eps) {
            out.push(format!("gamma {g} is not a multiple of {eps}"));
        }
    }
    out
}
