//! Constructive approximation of `f(x, y)` by `g(x) + h(y)` on finite planar
//! samples that contain no array of length two.
//!
//! A pass quantizes the sample on a dyadic grid, builds two level graphs from
//! the values of `f`, reads a staircase potential off their BFS depths and
//! extends the resulting table functions piecewise linearly. Repeating the
//! pass on the residual converges geometrically.
//!
//! ```
//! use superpose::{approximate_decompose, gen_monotone_curve, attach_function, DEFAULT_N_MAX};
//!
//! let sample = attach_function(&gen_monotone_curve(200, 1)?, "sin_poly", &[3.0, 2.0])?;
//! let d = approximate_decompose(&sample, 0.05, None, None, DEFAULT_N_MAX)?;
//! assert!(d.meta.sup_residual <= 20.0 * 0.05);
//! # Ok::<(), superpose::Error>(())
//! ```

pub mod arrays;
pub mod cli;
pub mod error;
pub mod extend;
pub mod gamma;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod quantize;

pub use arrays::{find_array, find_length2_array, AlmostArrayPath, ArrayCertificate, Orientation};
pub use error::{Error, Result};
pub use extend::{eval_pwl, extend_pwl, PWLinear};
pub use generators::{
    attach_function, gen_disjoint_cross_free, gen_monotone_curve, gen_with_array, GeneratorKind,
    GeneratorSpec,
};
pub use geometry::{chebyshev, Level, Point};
pub use io::DecompositionFile;
pub use pipeline::{
    approximate_decompose, approximate_pass, delta_from_lipschitz, estimate_delta, refine,
    residual_report, Decomposition, DecompositionMeta, Report,
};
pub use quantize::{select_level, SampledCompactum, DEFAULT_N_MAX};
