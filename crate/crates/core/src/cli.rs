//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative result (an array was found, no level
//! exists, or a forced level is not certified), 2 input error, 3 no
//! convergence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::arrays::find_array;
use crate::error::Error;
use crate::generators::{attach_function, GeneratorKind, GeneratorSpec};
use crate::geometry::Level;
use crate::io::{read_sample, write_sample, DecompositionFile};
use crate::pipeline::{
    approximate_decompose, delta_from_lipschitz, refine, residual_report, residuals, Decomposition,
};
use crate::quantize::DEFAULT_N_MAX;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "superpose",
    version,
    about = "Decompose f(x, y) into g(x) + h(y) on planar samples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search the sample for an array of axis-parallel segments.
    CheckArrays {
        /// Sample CSV with columns x, y, f.
        input: PathBuf,
        /// Number of segments in the array.
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        /// Coordinates within `tol` count as equal.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// One approximation pass with sup residual at most 20 epsilon.
    Decompose(DecomposeArgs),
    /// Repeat passes on the residual until it is at most `tol`.
    Refine {
        input: PathBuf,
        /// Target sup residual on the sample.
        #[arg(long)]
        tol: f64,
        /// Give up after this many passes.
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        /// Finest level tried in each pass.
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: u32,
        /// Write the JSON document here and the report to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print g(x), h(y) and their sum.
    #[command(allow_negative_numbers = true)]
    Eval {
        /// JSON document from `decompose` or `refine`.
        decomposition: PathBuf,
        x: f64,
        y: f64,
    },
    /// Columnar text of g, h and the sample residuals.
    Plotdata {
        decomposition: PathBuf,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated sample as CSV.
    Generate {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// zero, constant, coordinate_sum, sin_poly, or an expression in x and y.
        #[arg(long, default_value = "zero")]
        function: String,
        /// Comma-separated parameters of the named function.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("delta_source").required(true).args(["delta", "lipschitz", "auto_delta"])))]
#[command(group(ArgGroup::new("level_source").args(["level", "auto_level"])))]
pub struct DecomposeArgs {
    pub input: PathBuf,
    /// Quantization step. The pass guarantees a residual of at most 20 epsilon.
    #[arg(long)]
    pub epsilon: f64,
    /// Points closer than this have values within epsilon.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lipschitz constant of f; sets delta = epsilon / L.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    /// Estimate delta from the sample.
    #[arg(long)]
    pub auto_delta: bool,
    /// Force this level instead of searching.
    #[arg(long)]
    pub level: Option<u32>,
    /// Search for the smallest certified level (the default).
    #[arg(long)]
    pub auto_level: bool,
    /// Finest level tried by the search.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u32,
    /// Write the JSON document here and the report to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl clap::ValueEnum for GeneratorKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[
            GeneratorKind::MonotoneCurve,
            GeneratorKind::DisjointCrossFree,
            GeneratorKind::WithArray,
        ]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            GeneratorKind::MonotoneCurve => "monotone_curve",
            GeneratorKind::DisjointCrossFree => "disjoint_cross_free",
            GeneratorKind::WithArray => "with_array",
        }))
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::LevelNotFound { .. } | Error::EmptyColumnNotFound { .. } => EXIT_NEGATIVE,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    match command {
        Command::CheckArrays {
            input,
            max_len,
            tol,
        } => {
            if max_len == 0 {
                return Err(Error::InvalidParameter("max-len must be at least 1".into()));
            }
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tol must be >= 0, got {tol}"
                )));
            }
            let sample = read_sample(&input)?;
            match find_array(sample.points(), max_len, tol) {
                None => {
                    writeln!(stdout, "none")?;
                    Ok(EXIT_OK)
                }
                Some(cert) => {
                    let text = serde_json::to_string_pretty(&cert)
                        .map_err(|e| Error::Parse(e.to_string()))?;
                    writeln!(stdout, "{text}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Decompose(args) => decompose(args, stdout, stderr),
        Command::Refine {
            input,
            tol,
            max_iter,
            n_max,
            out,
        } => {
            let sample = read_sample(&input)?;
            let d = refine(&sample, tol, max_iter, n_max)?;
            let report = residual_report(&sample, &d)?;
            emit(d, report, out.as_deref(), stdout, stderr)?;
            Ok(EXIT_OK)
        }
        Command::Eval {
            decomposition,
            x,
            y,
        } => {
            let file = DecompositionFile::read(&decomposition)?;
            let d = &file.decomposition;
            let (gx, hy) = (d.g.eval(x), d.h.eval(y));
            writeln!(stdout, "g(x) = {gx}")?;
            writeln!(stdout, "h(y) = {hy}")?;
            writeln!(stdout, "g(x) + h(y) = {}", gx + hy)?;
            Ok(EXIT_OK)
        }
        Command::Plotdata {
            decomposition,
            input,
            out,
        } => {
            let file = DecompositionFile::read(&decomposition)?;
            let sample = read_sample(&input)?;
            let text = plotdata(&file.decomposition, &sample);
            write_output(out.as_deref(), text.as_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Generate {
            kind,
            count,
            seed,
            function,
            params,
            out,
        } => {
            let spec = GeneratorSpec {
                kind,
                count,
                seed,
                params: params.clone(),
            };
            let sample = attach_function(&spec.generate()?, &function, &params)?;
            let mut buf = Vec::new();
            write_sample(&mut buf, &sample)?;
            write_output(out.as_deref(), &buf, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn decompose(
    args: DecomposeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let sample = read_sample(&args.input)?;
    let delta = match (args.delta, args.lipschitz) {
        (Some(d), _) => Some(d),
        (None, Some(l)) => Some(delta_from_lipschitz(l, args.epsilon)?),
        (None, None) => None,
    };
    let level = args.level.map(Level::new).transpose()?;
    let d = approximate_decompose(&sample, args.epsilon, delta, level, args.n_max)?;
    let report = residual_report(&sample, &d)?;
    let certified = report.certified;
    emit(d, report, args.out.as_deref(), stdout, stderr)?;
    if certified {
        Ok(EXIT_OK)
    } else {
        writeln!(
            stderr,
            "warning: the forced level is not certified; the 20 epsilon bound is not guaranteed"
        )?;
        Ok(EXIT_NEGATIVE)
    }
}

/// The document goes to `out` (report on stdout) or, without `out`, to
/// stdout (report on stderr).
fn emit(
    d: Decomposition,
    report: crate::pipeline::Report,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Error> {
    let summary = report.to_string();
    let file = DecompositionFile {
        decomposition: d,
        report: Some(report),
    };
    let json = file.to_json()?;
    match out {
        Some(path) => {
            std::fs::write(path, json)?;
            stdout.write_all(summary.as_bytes())?;
        }
        None => {
            stdout.write_all(json.as_bytes())?;
            stderr.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

fn write_output(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

/// Three whitespace-separated tables: the breakpoints of `g`, those of `h`,
/// and one residual row per sample point.
pub fn plotdata(d: &Decomposition, sample: &crate::quantize::SampledCompactum) -> String {
    let mut s = String::new();
    s.push_str("# g\nx g\n");
    for (x, v) in d.g.breakpoints().iter().zip(d.g.values()) {
        let _ = writeln!(s, "{x} {v}");
    }
    s.push_str("\n# h\ny h\n");
    for (y, v) in d.h.breakpoints().iter().zip(d.h.values()) {
        let _ = writeln!(s, "{y} {v}");
    }
    s.push_str("\n# residual\nx y f residual\n");
    let res = residuals(sample, &d.g, &d.h);
    for ((p, f), r) in sample.points().iter().zip(sample.values()).zip(res) {
        let _ = writeln!(s, "{} {} {f} {r}", p.x, p.y);
    }
    s
}
