//! CSV diagnostics series with a fixed header contract and 17-significant-
//! digit floats so every value round-trips bit-exactly.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nlts_core::diagnostics::DiagnosticsRecord;

pub const SERIES_HEADER: &str =
    "t,mass,mass_positive,M,m,hdot_alpha_sq,grad_inf,criterion_integrand,tail_fraction";

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad header: expected `{SERIES_HEADER}`, got `{0}`")]
    Header(String),
    #[error("line {line}: expected 9 fields, got {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: unparsable float `{text}`")]
    Float { line: usize, text: String },
}

fn fmt(x: f64) -> String {
    // 17 significant digits guarantee exact f64 round trip
    format!("{x:.16e}")
}

pub fn format_record(r: &DiagnosticsRecord) -> String {
    [
        r.t,
        r.mass,
        r.mass_positive,
        r.max,
        r.min,
        r.hdot_alpha_sq,
        r.grad_inf,
        r.criterion_integrand,
        r.tail_fraction,
    ]
    .map(fmt)
    .join(",")
}

pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), SeriesError> {
    let io_err = |source| SeriesError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    let mut out = String::with_capacity(records.len() * 220 + 100);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_record(r));
        out.push('\n');
    }
    file.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_series(path: &Path) -> Result<Vec<DiagnosticsRecord>, SeriesError> {
    let io_err = |source| SeriesError::Io { path: path.display().to_string(), source };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(io_err)?
        .unwrap_or_default();
    if header.trim_end() != SERIES_HEADER {
        return Err(SeriesError::Header(header));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(SeriesError::FieldCount { line: i + 2, found: fields.len() });
        }
        let mut vals = [0.0f64; 9];
        for (slot, text) in vals.iter_mut().zip(fields.iter()) {
            *slot = text
                .parse()
                .map_err(|_| SeriesError::Float { line: i + 2, text: text.to_string() })?;
        }
        records.push(DiagnosticsRecord {
            t: vals[0],
            mass: vals[1],
            mass_positive: vals[2],
            max: vals[3],
            min: vals[4],
            hdot_alpha_sq: vals[5],
            grad_inf: vals[6],
            criterion_integrand: vals[7],
            tail_fraction: vals[8],
        });
    }
    Ok(records)
}
