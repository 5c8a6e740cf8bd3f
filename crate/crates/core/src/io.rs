//! Sample CSV files and decomposition documents.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::pipeline::{Decomposition, Report};
use crate::quantize::SampledCompactum;

/// Reads `x,y,f` rows. A first row that does not parse as numbers is taken
/// as a header. Row numbers in errors count file lines from 1.
pub fn parse_sample<R: Read>(input: R) -> Result<SampledCompactum> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line()) as usize;
        if record.len() != 3 {
            return Err(Error::Parse(format!(
                "row {line}: expected 3 fields (x, y, f), found {}",
                record.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|field| field.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Parse(format!("row {line}: non-finite value")));
                }
                points.push(Point::new(row[0], row[1]));
                values.push(row[2]);
                lines.push(line);
            }
            Err(_) if k == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("row {line}: {e}"))),
        }
    }
    SampledCompactum::new(points, values).map_err(|e| match e {
        Error::DuplicatePoint {
            x,
            y,
            first,
            second,
        } => Error::DuplicatePoint {
            x,
            y,
            first: lines[first - 1],
            second: lines[second - 1],
        },
        other => other,
    })
}

pub fn read_sample(path: &Path) -> Result<SampledCompactum> {
    parse_sample(BufReader::new(File::open(path)?))
}

/// Writes a header and one `x,y,f` row per point, each number in its
/// shortest round-trip form.
pub fn write_sample<W: Write>(out: W, sample: &SampledCompactum) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    writer.write_record(["x", "y", "f"]).map_err(csv_err)?;
    for (p, f) in sample.points().iter().zip(sample.values()) {
        writer
            .write_record([p.x.to_string(), p.y.to_string(), f.to_string()])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

/// A decomposition and, when written by the tool, its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    #[serde(flatten)]
    pub decomposition: Decomposition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
}

impl DecompositionFile {
    pub fn to_json(&self) -> Result<String> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
