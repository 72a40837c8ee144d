//! Binary record array format.
//!
//! Little-endian: magic `PSRT`, version `u32`, count `u64`, then `count`
//! pairs of `(key u64, payload u64)`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::Record;

pub const RECORD_MAGIC: &[u8; 4] = b"PSRT";
pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub fn write_records<W: Write>(mut w: W, records: &[Record]) -> Result<(), FormatError> {
    w.write_all(RECORD_MAGIC)?;
    w.write_all(&RECORD_VERSION.to_le_bytes())?;
    w.write_all(&(records.len() as u64).to_le_bytes())?;
    for r in records {
        w.write_all(&r.key.to_le_bytes())?;
        w.write_all(&r.payload.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_records<R: Read>(mut r: R) -> Result<Vec<Record>, FormatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != RECORD_MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    let version = u32::from_le_bytes(v);
    if version != RECORD_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let n = read_u64(&mut r)?;
    let mut out = Vec::with_capacity(n.min(1 << 24) as usize);
    for _ in 0..n {
        let key = read_u64(&mut r)?;
        let payload = read_u64(&mut r)?;
        out.push(Record { key, payload });
    }
    Ok(out)
}

pub fn save_records(path: &Path, records: &[Record]) -> Result<(), FormatError> {
    write_records(BufWriter::new(File::create(path)?), records)
}

pub fn load_records(path: &Path) -> Result<Vec<Record>, FormatError> {
    read_records(BufReader::new(File::open(path)?))
}
