//! Minimal binary snapshot format:
//! magic `NLTS` | version u32 | n u32 | N u32 | L f64 | t f64 | N^n f64
//! row-major samples, all little-endian.

use std::io::{Read, Write};
use std::path::Path;

use nlts_core::field::PhysicalField;
use nlts_core::grid::Grid;

pub const MAGIC: [u8; 4] = *b"NLTS";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad magic: {0:?}")]
    Magic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("invalid header: {0}")]
    Header(String),
    #[error("truncated payload: expected {expected} samples, got {found}")]
    Truncated { expected: usize, found: usize },
}

pub fn write_snapshot(path: &Path, field: &PhysicalField, t: f64) -> Result<(), SnapshotError> {
    let io_err = |source| SnapshotError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let grid = field.grid;
    let mut buf = Vec::with_capacity(4 + 4 * 3 + 16 + field.values.len() * 8);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.length().to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(&buf).map_err(io_err)
}

pub fn read_snapshot(path: &Path) -> Result<(PhysicalField, f64), SnapshotError> {
    let io_err = |source| SnapshotError::Io { path: path.display().to_string(), source };
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(io_err)?
        .read_to_end(&mut bytes)
        .map_err(io_err)?;
    if bytes.len() < 32 {
        return Err(SnapshotError::Header("file shorter than the header".into()));
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(SnapshotError::Magic(magic));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let points = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let t = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let grid = Grid::new(n, points, length)
        .map_err(|e| SnapshotError::Header(e.to_string()))?;
    let expected = grid.len();
    let payload = &bytes[32..];
    if payload.len() != expected * 8 {
        return Err(SnapshotError::Truncated { expected, found: payload.len() / 8 });
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((PhysicalField { grid, values }, t))
}

/// Read every `*.nlts` snapshot in a directory, sorted by embedded time.
pub fn read_snapshot_dir(dir: &Path) -> Result<Vec<(f64, PhysicalField)>, SnapshotError> {
    let io_err = |source| SnapshotError::Io { path: dir.display().to_string(), source };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let path = entry.path();
        if path.extension().map(|e| e == "nlts").unwrap_or(false) {
            let (field, t) = read_snapshot(&path)?;
            out.push((t, field));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Canonical snapshot file name for index `i` at time `t`.
pub fn snapshot_file_name(i: usize, t: f64) -> String {
    format!("snap_{i:05}_t{t:.9}.nlts")
}
