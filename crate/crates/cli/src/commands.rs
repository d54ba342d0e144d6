//! Subcommand implementations. Each returns the text to print and an exit
//! code; `main` only handles argument parsing and I/O.

use std::time::Instant;

use thiserror::Error;
use toricount::engines::BruteForce;
use toricount::{
    cross_check_against, cross_check_with, pointedness_certificate, toric_reduce_with, BoxRange,
    ClosedForm, DmCounter, IntVector, ReduceOptions,
};

use crate::input::{InputError, ProblemSpec};
use crate::json::{self, JsonError};
use crate::render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Brute,
    Recursion,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(#[from] InputError),

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Json(#[from] JsonError),

    #[error("{0}")]
    Core(#[from] toricount::Error),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Json(_) | CliError::Core(_) => EXIT_FAILURE,
        }
    }
}

pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            code: EXIT_OK,
        }
    }
}

/// `"c1,c2,…"` as a point of dimension `dim`.
pub fn parse_point(text: &str, dim: usize) -> Result<IntVector, CliError> {
    let coords = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<num_bigint::BigInt>()
                .map_err(|_| CliError::Usage(format!("invalid coordinate {t:?} in --point")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != dim {
        return Err(CliError::Usage(format!(
            "--point has {} coordinates, the system has dimension {dim}",
            coords.len()
        )));
    }
    Ok(IntVector::new(coords))
}

/// `"lo:hi"` for every coordinate, or one `"lo:hi"` per coordinate separated
/// by commas.
pub fn parse_box(text: &str, dim: usize) -> Result<BoxRange, CliError> {
    let bad = || CliError::Usage(format!("invalid --box {text:?}, expected lo:hi"));
    let ranges = text
        .split(',')
        .map(|r| {
            let (lo, hi) = r.split_once(':').ok_or_else(bad)?;
            let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let ranges = match ranges.len() {
        1 => vec![ranges[0]; dim],
        n if n == dim => ranges,
        n => {
            return Err(CliError::Usage(format!(
                "--box has {n} ranges, the system has dimension {dim}"
            )))
        }
    };
    let lo: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let hi: Vec<i64> = ranges.iter().map(|r| r.1).collect();
    BoxRange::new(IntVector::from_i64s(&lo), IntVector::from_i64s(&hi))
        .map_err(|e| CliError::Usage(format!("invalid --box {text:?}: {e}")))
}

fn closed_form_of(spec: &ProblemSpec, options: &ReduceOptions) -> Result<ClosedForm, CliError> {
    let reduced = toric_reduce_with(&spec.vectors, options)?;
    Ok(ClosedForm::from_reduced(&reduced)?)
}

pub fn cmd_count(
    spec: &ProblemSpec,
    alpha: &IntVector,
    engine: Engine,
    options: &ReduceOptions,
) -> Result<Outcome, CliError> {
    let x = &spec.vectors;
    let value = match engine {
        Engine::Brute => {
            let cert = pointedness_certificate(x).ok_or(InputError::NotPointed)?;
            BruteForce::new(x, &cert)?.count(alpha)?.to_string()
        }
        Engine::Recursion => DmCounter::new(x)?.count(alpha)?.to_string(),
        Engine::Closed => closed_form_of(spec, options)?
            .evaluator()?
            .count(alpha)
            .to_string(),
    };
    Ok(Outcome::ok(format!("{value}\n")))
}

pub fn cmd_closed_form(
    spec: &ProblemSpec,
    format: Format,
    options: &ReduceOptions,
) -> Result<Outcome, CliError> {
    let cf = closed_form_of(spec, options)?;
    let out = match format {
        Format::Text => render::closed_form_text(&cf),
        Format::Latex => render::closed_form_latex(&cf),
        Format::Json => json::render_closed_form(&cf)? + "\n",
    };
    Ok(Outcome::ok(out))
}

pub fn cmd_reduce(
    spec: &ProblemSpec,
    format: Format,
    options: &ReduceOptions,
) -> Result<Outcome, CliError> {
    let reduced = toric_reduce_with(&spec.vectors, options)?;
    let out = match format {
        Format::Text => render::reduced_text(&reduced),
        Format::Latex => render::reduced_latex(&reduced),
        Format::Json => json::render_reduced(&reduced)? + "\n",
    };
    Ok(Outcome::ok(out))
}

/// Number of mismatching points listed before the output is truncated.
const MISMATCH_LISTING: usize = 20;

pub fn cmd_verify(
    spec: &ProblemSpec,
    bounds: &BoxRange,
    seed: u64,
    given: Option<&ClosedForm>,
    options: &ReduceOptions,
) -> Result<Outcome, CliError> {
    let report = match given {
        Some(cf) => {
            if cf.source != spec.vectors {
                return Err(CliError::Usage(
                    "the closed form was computed for a different vector system".into(),
                ));
            }
            cross_check_against(&spec.vectors, bounds, cf)?
        }
        None => cross_check_with(&spec.vectors, bounds, seed, options)?,
    };
    let points = report.totals.brute;
    if report.is_ok() {
        return Ok(Outcome::ok(format!("OK: {points} points, 0 mismatches\n")));
    }
    let mut out = format!(
        "FAIL: {points} points, {} mismatches\n",
        report.mismatches.len()
    );
    for m in report.mismatches.iter().take(MISMATCH_LISTING) {
        out.push_str(&format!(
            "  at {}: brute {}, recursion {}, closed {}\n",
            m.alpha, m.brute, m.recursion, m.closed
        ));
    }
    Ok(Outcome {
        stdout: out,
        code: EXIT_MISMATCH,
    })
}

pub fn cmd_bench(
    spec: &ProblemSpec,
    bounds: &BoxRange,
    options: &ReduceOptions,
) -> Result<Outcome, CliError> {
    let x = &spec.vectors;
    let points = bounds.points();
    let n = points.len();

    let start = Instant::now();
    let reduced = toric_reduce_with(x, options)?;
    let cf = ClosedForm::from_reduced(&reduced)?;
    let eval = cf.evaluator()?;
    let t_build = start.elapsed().as_secs_f64();
    let start = Instant::now();
    for a in &points {
        eval.count(a);
    }
    let t_closed = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let cert = pointedness_certificate(x).ok_or(InputError::NotPointed)?;
    let bf = BruteForce::new(x, &cert)?;
    for a in &points {
        bf.count(a)?;
    }
    let t_brute = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut dm = DmCounter::new(x)?;
    for a in &points {
        dm.count(a)?;
    }
    let t_rec = start.elapsed().as_secs_f64();

    let mut out = format!(
        "{} vectors in dimension {}, {} reduced terms, {} pieces\n",
        x.len(),
        spec.dimension,
        reduced.sum.len(),
        cf.pieces.len()
    );
    out.push_str(&render::timing_table(&[
        ("brute", n, t_brute),
        ("recursion", n, t_rec),
        ("reduce", 0, t_build),
        ("closed", n, t_closed),
    ]));
    Ok(Outcome::ok(out))
}
