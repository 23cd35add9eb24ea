//! Named multipliers and operators accepted on the command line.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use mulop_core::{Exponent, LinearOperator, LpFunction, MeasureSpace, MultiplierShape};

use crate::formats::read_function;
use crate::LabError;

/// `identity`, `const`, `const(c)`, `plateau(a,b)`, `affine(s,o)`,
/// `staircase(k)`, `x`, `y`, or `csv:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSpec {
    Shape(MultiplierShape),
    Csv(String),
}

fn call<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let rest = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(rest.split(',').map(str::trim).collect())
}

fn numbers(args: &[&str], count: usize, what: &str) -> Result<Vec<f64>, LabError> {
    let parsed: Result<Vec<f64>, _> = args.iter().map(|a| a.parse::<f64>()).collect();
    match parsed {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(LabError::Config(format!("{what} takes {count} numeric argument(s)"))),
    }
}

impl FromStr for MultiplierSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("csv:") {
            return Ok(MultiplierSpec::Csv(path.to_string()));
        }
        let shape = match s {
            "identity" | "t" => MultiplierShape::Identity,
            "const" => MultiplierShape::Constant(1.0),
            "x" => MultiplierShape::CoordinateX,
            "y" => MultiplierShape::CoordinateY,
            _ => {
                if let Some(args) = call(s, "const") {
                    MultiplierShape::Constant(numbers(&args, 1, "const")?[0])
                } else if let Some(args) = call(s, "plateau") {
                    let v = numbers(&args, 2, "plateau")?;
                    MultiplierShape::Plateau { a: v[0], b: v[1] }
                } else if let Some(args) = call(s, "affine") {
                    let v = numbers(&args, 2, "affine")?;
                    MultiplierShape::Affine { slope: v[0], offset: v[1] }
                } else if let Some(args) = call(s, "staircase") {
                    let steps = args
                        .first()
                        .filter(|_| args.len() == 1)
                        .and_then(|a| a.parse().ok())
                        .ok_or_else(|| LabError::Config(String::from("staircase takes one integer argument")))?;
                    MultiplierShape::Staircase { steps }
                } else {
                    return Err(LabError::Config(format!("unknown multiplier {s:?}")));
                }
            }
        };
        Ok(MultiplierSpec::Shape(shape))
    }
}

impl fmt::Display for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplierSpec::Csv(path) => write!(f, "csv:{path}"),
            MultiplierSpec::Shape(shape) => match *shape {
                MultiplierShape::Identity => write!(f, "identity"),
                MultiplierShape::Constant(c) => write!(f, "const({c})"),
                MultiplierShape::Plateau { a, b } => write!(f, "plateau({a},{b})"),
                MultiplierShape::Affine { slope, offset } => write!(f, "affine({slope},{offset})"),
                MultiplierShape::Staircase { steps } => write!(f, "staircase({steps})"),
                MultiplierShape::CoordinateX => write!(f, "x"),
                MultiplierShape::CoordinateY => write!(f, "y"),
            },
        }
    }
}

impl MultiplierSpec {
    /// Samples the multiplier; the result carries the sup-norm exponent.
    pub fn sample(&self, space: &Arc<MeasureSpace>) -> Result<LpFunction, LabError> {
        match self {
            MultiplierSpec::Shape(shape) => Ok(shape.sample(space)?),
            MultiplierSpec::Csv(path) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| LabError::Config(format!("multiplier file {path:?}: {e}")))?;
                Ok(read_function(file, space)?.with_exponent(Exponent::Infinity))
            }
        }
    }
}

/// Operators for the witness command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSpec {
    Identity,
    /// `A = M_{(1+φ)/2}`, dominated by `R = M_{1+φ}`.
    ScaledMultiplier,
    /// Row averaging on a grid.
    Averaging,
    /// `(Af)_i = f_{n−1−i}`.
    Reversal,
}

impl FromStr for OperatorSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        match s.trim() {
            "identity" => Ok(OperatorSpec::Identity),
            "scaled-multiplier" => Ok(OperatorSpec::ScaledMultiplier),
            "averaging" => Ok(OperatorSpec::Averaging),
            "reversal" => Ok(OperatorSpec::Reversal),
            other => Err(LabError::Config(format!("unknown operator {other:?}"))),
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorSpec::Identity => "identity",
            OperatorSpec::ScaledMultiplier => "scaled-multiplier",
            OperatorSpec::Averaging => "averaging",
            OperatorSpec::Reversal => "reversal",
        })
    }
}

impl OperatorSpec {
    /// The operator `A` and, when one is known, a commutant member `R`
    /// dominating it.
    pub fn build(
        &self,
        phi: &LpFunction,
        p: Exponent,
    ) -> Result<(LinearOperator, Option<LinearOperator>), LabError> {
        let space = phi.space();
        Ok(match self {
            OperatorSpec::Identity => (LinearOperator::identity(space, p), Some(LinearOperator::identity(space, p))),
            OperatorSpec::ScaledMultiplier => {
                let r: Vec<f64> = phi.values().iter().map(|v| 1.0 + v).collect();
                let a: Vec<f64> = r.iter().map(|v| 0.5 * v).collect();
                let r = LinearOperator::diagonal(space, p, r)?;
                (LinearOperator::diagonal(space, p, a)?, Some(r))
            }
            OperatorSpec::Averaging => {
                let a = LinearOperator::averaging_counterexample(space, p)?;
                (a.clone(), Some(a))
            }
            OperatorSpec::Reversal => {
                let n = space.len();
                let mut entries = vec![0.0; n * n];
                for i in 0..n {
                    entries[i * n + (n - 1 - i)] = 1.0;
                }
                (LinearOperator::dense(space, p, entries)?, None)
            }
        })
    }
}
