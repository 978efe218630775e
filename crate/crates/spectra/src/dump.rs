//! Raw matrix dumps.
//!
//! Each record is the magic `SSDE`, then `m`, `n` and `step` as little-endian
//! `u32`, then `m * n` little-endian `f64` in row-major order. A file may hold
//! several records back to back.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use spectra_core::Matrix;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SSDE";

pub fn write_matrix<W: Write>(out: &mut W, matrix: &Matrix, step: u32) -> std::io::Result<()> {
    let (m, n) = matrix.shape();
    out.write_all(&MAGIC)?;
    for v in [m as u32, n as u32, step] {
        out.write_all(&v.to_le_bytes())?;
    }
    for x in matrix.as_slice() {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(input: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads one record; `Ok(None)` at a clean end of input.
pub fn read_matrix<R: Read>(input: &mut R) -> std::io::Result<Option<(u32, Matrix)>> {
    let mut magic = [0u8; 4];
    match input.read_exact(&mut magic) {
        Ok(()) => {}
        Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    if magic != MAGIC {
        return Err(std::io::Error::new(ErrorKind::InvalidData, "bad magic"));
    }
    let m = read_u32(input)? as usize;
    let n = read_u32(input)? as usize;
    let step = read_u32(input)?;
    let mut data = vec![0.0; m * n];
    let mut b = [0u8; 8];
    for x in data.iter_mut() {
        input.read_exact(&mut b)?;
        *x = f64::from_le_bytes(b);
    }
    let matrix = Matrix::from_vec(m, n, data)
        .map_err(|e| std::io::Error::new(ErrorKind::InvalidData, e.to_string()))?;
    Ok(Some((step, matrix)))
}

pub fn save(path: &Path, matrix: &Matrix, step: u32) -> Result<()> {
    save_all(path, std::iter::once((step, matrix)))
}

pub fn save_all<'a>(
    path: &Path,
    records: impl IntoIterator<Item = (u32, &'a Matrix)>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (step, m) in records {
        write_matrix(&mut out, m, step).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Every record in the file.
pub fn load_all(path: &Path) -> Result<Vec<(u32, Matrix)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut input = BufReader::new(file);
    let mut out = Vec::new();
    while let Some(rec) = read_matrix(&mut input).map_err(|e| Error::io(path, e))? {
        out.push(rec);
    }
    Ok(out)
}

/// The single record in the file.
pub fn load(path: &Path) -> Result<(u32, Matrix)> {
    let mut all = load_all(path)?;
    if all.len() != 1 {
        return Err(Error::format(
            path,
            format!("expected one matrix, found {}", all.len()),
        ));
    }
    Ok(all.remove(0))
}
