//! On-disk formats.
//!
//! * spaces: JSON `{"kind": "interval", "n": 4096}` or
//!   `{"kind": "grid", "nx": 32, "ny": 32}`;
//! * sets: JSON arrays of sorted atom indices;
//! * functions: CSV with a `# p=<p> space=<hash>` first line and an
//!   `atom,value` header;
//! * matrices: headerless CSV, one row per line.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

use mulop_core::{Exponent, Geometry, LinearOperator, LpFunction, MeasurableSet, MeasureSpace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceSpec {
    Interval { n: usize },
    Grid { nx: usize, ny: usize },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Arc<MeasureSpace>, LabError> {
        Ok(match *self {
            SpaceSpec::Interval { n } => MeasureSpace::uniform_interval(n)?,
            SpaceSpec::Grid { nx, ny } => MeasureSpace::product_grid(nx, ny)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        Ok(serde_json::from_str(text)?)
    }

    /// `4096`, `32x32`, or a path to a JSON descriptor.
    pub fn parse(arg: &str) -> Result<Self, LabError> {
        if let Ok(n) = arg.parse::<usize>() {
            return Ok(SpaceSpec::Interval { n });
        }
        if let Some((a, b)) = arg.split_once('x') {
            if let (Ok(nx), Ok(ny)) = (a.parse(), b.parse()) {
                return Ok(SpaceSpec::Grid { nx, ny });
            }
        }
        let text = std::fs::read_to_string(arg)
            .map_err(|e| LabError::Config(format!("space {arg:?}: not a size, grid or readable file ({e})")))?;
        Self::from_json(&text)
    }
}

/// Short digest of the weights and geometry, used to tie files to a space.
pub fn space_hash(space: &MeasureSpace) -> String {
    let mut h = Sha256::new();
    match space.geometry() {
        Geometry::Atoms => h.update(b"atoms"),
        Geometry::Interval => h.update(b"interval"),
        Geometry::Grid { nx, ny } => {
            h.update(b"grid");
            h.update((*nx as u64).to_le_bytes());
            h.update((*ny as u64).to_le_bytes());
        }
    }
    for w in space.weights() {
        h.update(w.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

fn exponent_label(p: Exponent) -> String {
    match p {
        Exponent::Finite(p) => p.to_string(),
        Exponent::Infinity => String::from("inf"),
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, LabError> {
    if s == "inf" {
        return Ok(Exponent::Infinity);
    }
    let p: f64 = s.parse().map_err(|_| LabError::Config(format!("bad exponent {s:?}")))?;
    Ok(Exponent::from_value(p)?)
}

pub fn write_function<W: Write>(f: &LpFunction, out: W) -> Result<(), LabError> {
    let mut out = out;
    writeln!(out, "# p={} space={}", exponent_label(f.p()), space_hash(f.space()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["atom", "value"])?;
    for (i, v) in f.values().iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_function<R: Read>(input: R, space: &Arc<MeasureSpace>) -> Result<LpFunction, LabError> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    let mut p = None;
    let mut hash = None;
    for field in first.trim().trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("p", v)) => p = Some(parse_exponent(v)?),
            Some(("space", v)) => hash = Some(v.to_string()),
            _ => {}
        }
    }
    let (Some(p), Some(hash)) = (p, hash) else {
        return Err(LabError::Config(String::from("function CSV must start with '# p=<p> space=<hash>'")));
    };
    if hash != space_hash(space) {
        return Err(LabError::Config(format!("function CSV belongs to space {hash}, not {}", space_hash(space))));
    }
    let mut values = vec![f64::NAN; space.len()];
    for record in csv::Reader::from_reader(input).records() {
        let record = record?;
        let atom: usize = record.get(0).unwrap_or("").trim().parse().map_err(|_| LabError::Config(String::from("bad atom index")))?;
        let value: f64 = record.get(1).unwrap_or("").trim().parse().map_err(|_| LabError::Config(String::from("bad value")))?;
        let slot = values
            .get_mut(atom)
            .ok_or_else(|| LabError::Config(format!("atom {atom} out of range")))?;
        *slot = value;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(LabError::Config(format!("function CSV has no value for atom {i}")));
    }
    Ok(LpFunction::new(space, values, p)?)
}

pub fn write_matrix<W: Write>(t: &LinearOperator, out: W) -> Result<(), LabError> {
    let n = t.dim();
    let dense = t.to_dense();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in dense.chunks(n) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R, space: &Arc<MeasureSpace>, p: Exponent) -> Result<LinearOperator, LabError> {
    let mut rows = Vec::new();
    for record in csv::ReaderBuilder::new().has_headers(false).from_reader(input).records() {
        let row = record?
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| LabError::Config(String::from("bad matrix entry")))?;
        rows.push(row);
    }
    Ok(LinearOperator::from_rows(space, p, &rows)?)
}

pub fn write_set(set: &MeasurableSet) -> String {
    serde_json::to_string(&set.indices().collect::<Vec<_>>()).expect("index arrays serialize")
}

pub fn read_set(text: &str, space: &Arc<MeasureSpace>) -> Result<MeasurableSet, LabError> {
    let indices: Vec<usize> = serde_json::from_str(text)?;
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Config(String::from("set indices must be strictly increasing")));
    }
    Ok(MeasurableSet::from_indices(space, indices)?)
}
