//! Grid file I/O.
//!
//! Two containers share one logical schema
//! `{axes: [{start, step, count}], values_re, values_im, order: "row-major"}`:
//!
//! * JSON — field names as above, values as flat row-major arrays.
//! * Binary (little-endian) — magic `GRIDFN01`, `u32` dimension count, per
//!   axis `f64 start, f64 step, u64 count`, then all real parts followed by
//!   all imaginary parts as `f64`, row-major.
//!
//! `read_grid` sniffs the magic bytes and falls back to JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, GridFunction};

const MAGIC: &[u8; 8] = b"GRIDFN01";

#[derive(Serialize, Deserialize)]
struct AxisRecord {
    start: f64,
    step: f64,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRecord {
    axes: Vec<AxisRecord>,
    values_re: Vec<f64>,
    values_im: Vec<f64>,
    order: String,
}

fn to_record(f: &GridFunction) -> GridRecord {
    let flat: Vec<Complex64> = f.values().iter().copied().collect();
    GridRecord {
        axes: f
            .axes()
            .iter()
            .map(|a| AxisRecord {
                start: a.start(),
                step: a.step(),
                count: a.count(),
            })
            .collect(),
        values_re: flat.iter().map(|v| v.re).collect(),
        values_im: flat.iter().map(|v| v.im).collect(),
        order: "row-major".into(),
    }
}

fn from_record(rec: GridRecord) -> Result<GridFunction> {
    if rec.order != "row-major" {
        return Err(Error::Format(format!(
            "unsupported element order {:?}",
            rec.order
        )));
    }
    let axes: Vec<Axis> = rec
        .axes
        .iter()
        .map(|a| Axis::new(a.start, a.step, a.count))
        .collect::<Result<_>>()?;
    let n: usize = axes.iter().map(Axis::count).product();
    if rec.values_re.len() != n || rec.values_im.len() != n {
        return Err(Error::Format(format!(
            "expected {n} samples, file has {} re / {} im",
            rec.values_re.len(),
            rec.values_im.len()
        )));
    }
    let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
    let flat: Vec<Complex64> = rec
        .values_re
        .iter()
        .zip(rec.values_im.iter())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    let values = ArrayD::from_shape_vec(IxDyn(&shape), flat)
        .map_err(|e| Error::Format(e.to_string()))?;
    GridFunction::new(axes, values)
}

pub fn write_grid_json<W: Write>(f: &GridFunction, mut w: W) -> Result<()> {
    let rec = to_record(f);
    serde_json::to_writer(&mut w, &rec).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_grid_json<R: Read>(r: R) -> Result<GridFunction> {
    let rec: GridRecord =
        serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))?;
    from_record(rec)
}

pub fn write_grid_binary<W: Write>(f: &GridFunction, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(f.ndim() as u32).to_le_bytes())?;
    for a in f.axes() {
        w.write_all(&a.start().to_le_bytes())?;
        w.write_all(&a.step().to_le_bytes())?;
        w.write_all(&(a.count() as u64).to_le_bytes())?;
    }
    for v in f.values().iter() {
        w.write_all(&v.re.to_le_bytes())?;
    }
    for v in f.values().iter() {
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_binary<R: Read>(mut r: R) -> Result<GridFunction> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing grid magic bytes".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let ndim = u32::from_le_bytes(b4) as usize;
    if ndim == 0 || ndim > crate::grid::MAX_DIM {
        return Err(Error::Format(format!("unsupported dimension count {ndim}")));
    }
    let mut b8 = [0u8; 8];
    let mut axes = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        r.read_exact(&mut b8)?;
        let start = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let step = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        axes.push(Axis::new(start, step, count)?);
    }
    let n: usize = axes.iter().map(Axis::count).product();
    let mut re = vec![0.0f64; n];
    for v in re.iter_mut() {
        r.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    let mut flat = Vec::with_capacity(n);
    for &re_v in &re {
        r.read_exact(&mut b8)?;
        flat.push(Complex64::new(re_v, f64::from_le_bytes(b8)));
    }
    let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
    let values = ArrayD::from_shape_vec(IxDyn(&shape), flat)
        .map_err(|e| Error::Format(e.to_string()))?;
    GridFunction::new(axes, values)
}

/// Write to `path`; `.json` selects the JSON container, anything else binary.
pub fn write_grid(f: &GridFunction, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let w = BufWriter::new(file);
    if path.extension().is_some_and(|e| e == "json") {
        write_grid_json(f, w)
    } else {
        write_grid_binary(f, w)
    }
}

/// Read from `path`, sniffing the binary magic and falling back to JSON.
pub fn read_grid(path: &Path) -> Result<GridFunction> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_grid_binary(BufReader::new(&bytes[..]))
    } else {
        read_grid_json(&bytes[..])
    }
}
