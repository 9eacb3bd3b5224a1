//! Validated intensity rasters and their interchange formats.
//!
//! The canonical on-disk form is raw little-endian f64, row-major, with a
//! JSON sidecar `<path>.json` declaring the shape:
//!
//! ```text
//! {"format":1,"rows":R,"cols":C,"dtype":"f64","order":"row-major"}
//! ```
//!
//! — lossless and trivially produced from any scientific stack. A
//! headered `row,col,value` CSV is accepted as an alternative ingestion
//! format, and a 16-bit PGM preview writer handles eyeballing: raw
//! heavy-tailed intensities would black out a linear 8-bit rendering, so
//! the preview clips at the 99th percentile before quantizing.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::IntensitySample;

/// Row-major grid of nonnegative intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Raster {
    /// Validated constructor: `values.len()` must equal `rows·cols` and
    /// every value must be finite and ≥ 0.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{cols} = {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::NegativeValue(format!(
                    "pixel {i} is negative ({v}); intensities must be >= 0"
                )));
            }
            if !v.is_finite() {
                return Err(domain!("pixel {i} is not finite ({v})"));
            }
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// All pixels, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pixel at (row, col). Panics out of bounds, like slice indexing.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "pixel out of bounds");
        self.values[row * self.cols + col]
    }

    /// Copy a rectangular region out as an estimation sample.
    ///
    /// # Errors
    /// Invalid-region when the rectangle is empty or leaves the raster;
    /// domain error when the region is all-zero (no sample to fit).
    pub fn region(&self, spec: &RegionSpec) -> Result<IntensitySample<f64>> {
        spec.check_within(self.rows, self.cols)?;
        let mut out = Vec::with_capacity(spec.width * spec.height);
        for r in spec.y0..spec.y0 + spec.height {
            let start = r * self.cols + spec.x0;
            out.extend_from_slice(&self.values[start..start + spec.width]);
        }
        IntensitySample::new(out)
    }
}

/// Rectangular pixel region: `x0`/`y0` are the top-left column/row
/// offsets, `width`/`height` the extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionSpec {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl RegionSpec {
    fn check_within(&self, rows: usize, cols: usize) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidRegion(format!(
                "region {self} is empty"
            )));
        }
        if self.x0 + self.width > cols || self.y0 + self.height > rows {
            return Err(Error::InvalidRegion(format!(
                "region {self} exceeds raster bounds {rows}x{cols}"
            )));
        }
        Ok(())
    }
}

/// Round-trips with [`FromStr`]: the CLI form `x0,y0,width,height`.
impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.y0, self.width, self.height)
    }
}

impl FromStr for RegionSpec {
    type Err = Error;

    /// Parses the CLI form `x0,y0,width,height`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "region must be x0,y0,width,height, got {s:?}"
            )));
        }
        let field = |i: usize, name: &str| -> Result<usize> {
            parts[i].trim().parse().map_err(|_| {
                Error::Parse(format!("region {name} must be a nonnegative integer, got {:?}", parts[i]))
            })
        };
        Ok(Self {
            x0: field(0, "x0")?,
            y0: field(1, "y0")?,
            width: field(2, "width")?,
            height: field(3, "height")?,
        })
    }
}

/// Shape sidecar for the binary format.
#[derive(Serialize, Deserialize)]
struct Sidecar {
    #[serde(default = "one")]
    format: u32,
    rows: usize,
    cols: usize,
    #[serde(default = "f64_name")]
    dtype: String,
    #[serde(default = "row_major")]
    order: String,
}

fn one() -> u32 {
    1
}

fn f64_name() -> String {
    "f64".into()
}

fn row_major() -> String {
    "row-major".into()
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".json");
    PathBuf::from(os)
}

/// Read a raster: `.csv` paths parse as headered `row,col,value` text,
/// anything else as raw little-endian f64 with a JSON sidecar.
///
/// # Errors
/// Missing-sidecar, dimension-mismatch, negative-value, and parse errors
/// each carry their own code; I/O failures pass through.
pub fn read_raster(path: &Path) -> Result<Raster> {
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if is_csv {
        read_csv_raster(path)
    } else {
        read_binary_raster(path)
    }
}

fn read_binary_raster(path: &Path) -> Result<Raster> {
    let sc_path = sidecar_path(path);
    if !sc_path.exists() {
        return Err(Error::MissingSidecar(sc_path));
    }
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(&sc_path)?)
        .map_err(|e| Error::Parse(format!("sidecar {}: {e}", sc_path.display())))?;
    if sidecar.format != 1 {
        return Err(Error::Parse(format!(
            "unsupported sidecar format {}",
            sidecar.format
        )));
    }
    if sidecar.dtype != "f64" || sidecar.order != "row-major" {
        return Err(Error::Parse(format!(
            "unsupported layout dtype={} order={}; only f64 row-major is defined",
            sidecar.dtype, sidecar.order
        )));
    }

    let bytes = fs::read(path)?;
    let expected = sidecar.rows * sidecar.cols * 8;
    if bytes.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "sidecar declares {}x{} ({expected} bytes) but file holds {} bytes",
            sidecar.rows,
            sidecar.cols,
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks_exact yields 8 bytes")))
        .collect();
    Raster::new(sidecar.rows, sidecar.cols, values)
}

fn read_csv_raster(path: &Path) -> Result<Raster> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h.eq_ignore_ascii_case("row,col,value") => {}
        other => {
            return Err(Error::Parse(format!(
                "raster CSV must start with header row,col,value, got {other:?}"
            )))
        }
    }

    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    let mut rows = 0usize;
    let mut cols = 0usize;
    for (lineno, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let (r, c, v) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(c), Some(v), None) => (r.trim(), c.trim(), v.trim()),
            _ => {
                return Err(Error::Parse(format!(
                    "raster CSV line {}: expected row,col,value, got {line:?}",
                    lineno + 2
                )))
            }
        };
        let parse_idx = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| {
                Error::Parse(format!(
                    "raster CSV line {}: {what} must be an integer, got {s:?}",
                    lineno + 2
                ))
            })
        };
        let r = parse_idx(r, "row")?;
        let c = parse_idx(c, "col")?;
        let v: f64 = v.parse().map_err(|_| {
            Error::Parse(format!(
                "raster CSV line {}: value must be a number, got {v:?}",
                lineno + 2
            ))
        })?;
        if v < 0.0 {
            return Err(Error::NegativeValue(format!(
                "raster CSV line {}: pixel ({r},{c}) is negative ({v})",
                lineno + 2
            )));
        }
        rows = rows.max(r + 1);
        cols = cols.max(c + 1);
        cells.push((r, c, v));
    }

    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch("raster CSV holds no cells".into()));
    }
    let mut values = vec![None; rows * cols];
    for (r, c, v) in cells {
        let slot = &mut values[r * cols + c];
        if slot.is_some() {
            return Err(Error::DimensionMismatch(format!(
                "raster CSV defines pixel ({r},{c}) twice"
            )));
        }
        *slot = Some(v);
    }
    let values: Vec<f64> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "raster CSV is missing pixel ({},{}) of the {rows}x{cols} grid",
                    i / cols,
                    i % cols
                ))
            })
        })
        .collect::<Result<_>>()?;
    Raster::new(rows, cols, values)
}

/// Write the binary + sidecar pair. Round-trips through [`read_raster`]
/// bit-exactly.
pub fn write_raster(raster: &Raster, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(raster.values.len() * 8);
    for v in &raster.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let sidecar = Sidecar {
        format: 1,
        rows: raster.rows,
        cols: raster.cols,
        dtype: f64_name(),
        order: row_major(),
    };
    fs::write(
        sidecar_path(path),
        serde_json::to_string(&sidecar).expect("sidecar serializes"),
    )?;
    Ok(())
}

/// Write a 16-bit binary PGM (`P5`, maxval 65535, big-endian samples)
/// preview: intensities are clipped at the 99th percentile (nearest
/// rank) and linearly mapped onto [0, 65535].
pub fn write_pgm_preview(raster: &Raster, path: &Path) -> Result<()> {
    let mut sorted = raster.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("raster values are finite"));
    let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let clip = sorted[rank - 1];

    let mut out = fs::File::create(path).map(std::io::BufWriter::new)?;
    write!(out, "P5\n{} {}\n65535\n", raster.cols, raster.rows)?;
    for &v in &raster.values {
        let q = if clip > 0.0 {
            (v.min(clip) / clip * 65535.0).round() as u16
        } else {
            0
        };
        out.write_all(&q.to_be_bytes())?;
    }
    out.flush()?;
    Ok(())
}
