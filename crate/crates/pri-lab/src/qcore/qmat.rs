//! QMAT debug dump: 16-byte header (`QMAT`, u32 rows, u32 cols, u32 reserved
//! zero), then row-major `(re, im)` f64 pairs, all little-endian.

use std::io::{Read, Write};

use crate::error::{LabError, Result};

use super::linalg::{CMatrix, C64};

pub const MAGIC: &[u8; 4] = b"QMAT";
pub const HEADER_LEN: usize = 16;

pub fn write_qmat<W: Write>(mut w: W, m: &CMatrix) -> Result<()> {
    let rows =
        u32::try_from(m.nrows()).map_err(|_| LabError::Dims("too many rows for QMAT".into()))?;
    let cols =
        u32::try_from(m.ncols()).map_err(|_| LabError::Dims("too many columns for QMAT".into()))?;
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * m.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&cols.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_qmat<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(LabError::Invalid("missing QMAT magic".into()));
    }
    let word =
        |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().expect("4 bytes")) as usize;
    let (rows, cols) = (word(4), word(8));
    let mut body = vec![0u8; rows * cols * 16];
    r.read_exact(&mut body)?;
    let f = |k: usize| f64::from_le_bytes(body[k..k + 8].try_into().expect("8 bytes"));
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let k = (i * cols + j) * 16;
        C64::new(f(k), f(k + 8))
    }))
}
