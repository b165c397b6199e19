//! Reading and writing fields.
//!
//! The binary `NDF1` layout is: the magic bytes `NDF1`, `d` as a little-endian
//! `u32`, `d` origins as `i64`, `d` extents as `u64`, the mesh as `f64`, then
//! the samples as `f64`, row-major. Every number is little-endian.
//!
//! One-dimensional fields can also go through a small CSV dialect: an optional
//! `# mesh=<h>` comment, a `index,value` header and one row per cell.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::field::{Field, GridBox};

const MAGIC: &[u8; 4] = b"NDF1";

pub fn write_ndf1<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &o in grid.origin() {
        w.write_all(&o.to_le_bytes())?;
    }
    for &e in grid.extent() {
        w.write_all(&(e as u64).to_le_bytes())?;
    }
    w.write_all(&grid.mesh().to_le_bytes())?;
    for &v in field.samples() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("file ends early".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

pub fn read_ndf1<R: Read>(mut r: R) -> Result<Field> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if d == 0 || d > 16 {
        return Err(Error::Format(format!("unsupported dimension {d}")));
    }
    let mut origin = Vec::with_capacity(d);
    for _ in 0..d {
        origin.push(i64::from_le_bytes(read_array(&mut r)?));
    }
    let mut extent = Vec::with_capacity(d);
    for _ in 0..d {
        let e = u64::from_le_bytes(read_array(&mut r)?);
        extent.push(usize::try_from(e).map_err(|_| Error::Format("extent too large".into()))?);
    }
    let mesh = f64::from_le_bytes(read_array(&mut r)?);
    let grid = GridBox::new(origin, extent, mesh)?;
    let n = grid.len();
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        samples.push(f64::from_le_bytes(read_array(&mut r)?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after samples".into()));
    }
    Field::new(grid, samples)
}

pub fn write_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    if field.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: field.dim() });
    }
    writeln!(w, "# mesh={}", field.grid().mesh())?;
    writeln!(w, "index,value")?;
    let o = field.grid().origin()[0];
    for (i, v) in field.samples().iter().enumerate() {
        writeln!(w, "{},{}", o + i as i64, v)?;
    }
    Ok(())
}

/// Reads the CSV dialect written by [`write_csv`]. Indices must be
/// consecutive; the mesh defaults to 1.
pub fn read_csv<R: Read>(r: R) -> Result<Field> {
    let mut mesh = 1.0;
    let mut first: Option<i64> = None;
    let mut samples = Vec::new();
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(h) = rest.trim().strip_prefix("mesh=") {
                mesh = h.trim().parse().map_err(|_| Error::Format(format!("bad mesh {h:?}")))?;
            }
            continue;
        }
        if line.starts_with("index") {
            continue;
        }
        let bad = || Error::Format(format!("line {}: expected `index,value`", lineno + 1));
        let (i, v) = line.split_once(',').ok_or_else(bad)?;
        let i: i64 = i.trim().parse().map_err(|_| bad())?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        let start = *first.get_or_insert(i);
        if i != start + samples.len() as i64 {
            return Err(Error::Format(format!("line {}: index {i} is not consecutive", lineno + 1)));
        }
        samples.push(v);
    }
    let start = first.ok_or_else(|| Error::Format("no samples".into()))?;
    Field::new(GridBox::line(start, samples.len(), mesh)?, samples)
}
