//! Flat binary persistence for matrices and vectors.
//!
//! Format: 16-byte header (8-byte magic `AGMMAT01`, u32 rows, u32 cols,
//! little-endian) followed by `rows * cols` f64 values in row-major order.
//! Writes go through a temp file and an atomic rename.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const MAGIC: &[u8; 8] = b"AGMMAT01";

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(MAGIC)?;
        f.write_all(&(m.rows() as u32).to_le_bytes())?;
        f.write_all(&(m.cols() as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(m.data().len() * 8);
        for v in m.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let mut f = fs::File::open(path)?;
    let mut header = [0u8; 16];
    f.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(Error::BadFormat(format!("bad magic in {}", path.display())));
    }
    let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let mut buf = Vec::new();
    f.read_to_end(&mut buf)?;
    if buf.len() != rows * cols * 8 {
        return Err(Error::BadFormat(format!(
            "{}: expected {} payload bytes, found {}",
            path.display(),
            rows * cols * 8,
            buf.len()
        )));
    }
    let data = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_data(rows, cols, data)
}

/// Vectors are stored as single-column matrices.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix(path, &DenseMatrix::from_data(v.len(), 1, v.to_vec())?)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.cols() != 1 {
        return Err(Error::BadFormat(format!(
            "{}: expected a vector, found {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.data().to_vec())
}
