//! CSV export and the binary `SLVT` trajectory format.
//!
//! `SLVT` layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `SLVT` |
//! | 4 | `u32` format version (1) |
//! | 8 | `f64` half-length `L` |
//! | 8 | `u64` node count `N` |
//! | 8 | `f64` time step |
//! | 8 | `u64` number of time levels |
//! | 8·N·levels | `f64` values, row-major by time level |

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SlvError};
use crate::fixed_point::ContractionHistory;
use crate::grid::{Field, GridSpec};

pub const SLVT_MAGIC: &[u8; 4] = b"SLVT";
pub const SLVT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8 + 8;

/// Time levels of one scalar field, as stored in an `SLVT` file.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredTrajectory {
    pub grid: GridSpec,
    pub dt: f64,
    pub levels: Vec<Field>,
}

pub fn write_slvt(path: &Path, grid: &GridSpec, dt: f64, levels: &[Field]) -> Result<()> {
    if levels.iter().any(|f| !f.grid().same_as(grid)) {
        return Err(SlvError::GridMismatch("level on a different grid".into()));
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(SLVT_MAGIC)?;
    out.write_all(&SLVT_VERSION.to_le_bytes())?;
    out.write_all(&grid.half_length().to_le_bytes())?;
    out.write_all(&(grid.len() as u64).to_le_bytes())?;
    out.write_all(&dt.to_le_bytes())?;
    out.write_all(&(levels.len() as u64).to_le_bytes())?;
    for field in levels {
        for v in field.values() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_slvt(path: &Path) -> Result<StoredTrajectory> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(|e| SlvError::Io(format!("{}: {e}", path.display())))?
        .read_to_end(&mut bytes)?;
    decode_slvt(&bytes)
}

pub fn decode_slvt(bytes: &[u8]) -> Result<StoredTrajectory> {
    let bad = |msg: &str| SlvError::Format(format!("SLVT: {msg}"));
    if bytes.len() < HEADER_LEN {
        return Err(bad("truncated header"));
    }
    if &bytes[0..4] != SLVT_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != SLVT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let half_length = f64_at(8);
    let n = usize::try_from(u64_at(16)).map_err(|_| bad("node count overflow"))?;
    let dt = f64_at(24);
    let count = usize::try_from(u64_at(32)).map_err(|_| bad("level count overflow"))?;
    let grid = GridSpec::new(half_length, n)?;
    let expected = n
        .checked_mul(count)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(HEADER_LEN))
        .ok_or_else(|| bad("size overflow"))?;
    if bytes.len() != expected {
        return Err(bad(&format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let levels = (0..count)
        .map(|k| {
            let start = HEADER_LEN + 8 * n * k;
            let values = (0..n).map(|j| f64_at(start + 8 * j)).collect();
            Field::new(grid, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StoredTrajectory { grid, dt, levels })
}

/// `x,value` rows for one field.
pub fn field_csv(field: &Field) -> String {
    let mut s = String::from("x,value\n");
    for (x, v) in field.grid().nodes().zip(field.values()) {
        let _ = writeln!(s, "{x},{v}");
    }
    s
}

/// `t,quantity,value` rows.
pub fn series_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a str, f64)>) -> String {
    let mut s = String::from("t,quantity,value\n");
    for (t, q, v) in rows {
        let _ = writeln!(s, "{t},{q},{v}");
    }
    s
}

/// `iteration,distance,ratio` rows; the first ratio is empty.
pub fn contraction_csv(history: &ContractionHistory) -> String {
    let mut s = String::from("iteration,distance,ratio\n");
    for (k, d) in history.distances.iter().enumerate() {
        let ratio = if k == 0 {
            String::new()
        } else {
            history.ratios[k - 1].to_string()
        };
        let _ = writeln!(s, "{},{d},{ratio}", k + 1);
    }
    s
}
