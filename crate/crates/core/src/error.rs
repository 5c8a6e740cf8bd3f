use thiserror::Error;

use crate::arrays::AlmostArrayPath;
use crate::geometry::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("duplicate point ({x}, {y}) at rows {first} and {second}")]
    DuplicatePoint {
        x: f64,
        y: f64,
        first: usize,
        second: usize,
    },

    #[error("coordinate {value} does not fit a cell index at level {level}")]
    CoordinateOutOfRange { value: f64, level: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample is degenerate: {0}")]
    DegenerateSample(String),

    /// No level in `[min_level, n_max]` separates long vertical ends from
    /// long horizontal ends by at least `required` bridge hops.
    #[error("{}", level_not_found_message(*.min_level, *.n_max, *.required, .obstruction.as_ref()))]
    LevelNotFound {
        min_level: u32,
        n_max: u32,
        required: u64,
        /// Witness at the last level tried, when one exists.
        obstruction: Option<AlmostArrayPath>,
    },

    #[error("gap between {left} and {right} contains no unoccupied column at level {level}")]
    EmptyColumnNotFound { left: f64, right: f64, level: u32 },

    #[error("no convergence after {iterations} iterations: residual {residual} > tol {tol}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("unknown function: {0}")]
    UnknownFunction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn level_not_found_message(
    min_level: u32,
    n_max: u32,
    required: u64,
    obstruction: Option<&AlmostArrayPath>,
) -> String {
    let mut msg = format!("no level n in [{min_level}, {n_max}] has bridge gap >= F = {required}");
    match obstruction {
        Some(path) => {
            let first: &Point = path.points.first().expect("witness is nonempty");
            let last: &Point = path.points.last().expect("witness is nonempty");
            msg.push_str(&format!(
                "; bridge obstruction at n = {}: almost array of length {} from long vertical end ({}, {}) to long horizontal end ({}, {})",
                path.level.get(),
                path.len(),
                first.x,
                first.y,
                last.x,
                last.y
            ));
        }
        None if min_level > n_max => {
            msg.push_str("; delta requires a level above n_max");
        }
        None => {}
    }
    msg
}
