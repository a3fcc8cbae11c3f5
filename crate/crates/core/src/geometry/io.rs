//! Flat binary grid-field files.
//!
//! Layout, all integers `u32` little-endian:
//!
//! | offset | content                                  |
//! |--------|------------------------------------------|
//! | 0      | magic `b"HQGF"`                          |
//! | 4      | format version (1)                       |
//! | 8      | number of grid dimensions (always 2)     |
//! | 12     | manifold dimension `n`                   |
//! | 16     | `N1`, points along the first coordinate  |
//! | 20     | `N2`, points along the second coordinate |
//! | 24     | `N1·N2` values, `f64` little-endian      |
//!
//! Values are row-major: entry `(i1, i2)` sits at index `i1·N2 + i2` and
//! samples the point `(2π i1/N1, 2π i2/N2)`.

use std::io::{Read, Write};
use std::path::Path;

use super::grid::{Field, TorusChart};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HQGF";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, n: usize, field: &Field) -> Result<()> {
    let (n1, n2) = field.shape();
    w.write_all(MAGIC)?;
    for v in [VERSION, 2, n as u32, n1 as u32, n2 as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for x in field.values() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Returns the manifold dimension and the field.
pub fn read_field<R: Read>(mut r: R) -> Result<(usize, Field)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a grid-field file".into()));
    }
    let mut word = || -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    };
    let (version, dims, n, n1, n2) = (word()?, word()?, word()?, word()?, word()?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    if dims != 2 {
        return Err(Error::Format(format!("{dims} grid dimensions, expected 2")));
    }
    let (n1, n2) = (n1 as usize, n2 as usize);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * n1 * n2 {
        return Err(Error::Format(format!("{} payload bytes for a {n1}x{n2} grid", bytes.len())));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((n as usize, Field::from_vec(n1, n2, data)?))
}

pub fn save(path: impl AsRef<Path>, chart: &TorusChart, field: &Field) -> Result<()> {
    chart.check(field)?;
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), chart.n(), field)
}

pub fn load(path: impl AsRef<Path>) -> Result<(usize, Field)> {
    read_field(std::io::BufReader::new(std::fs::File::open(path)?))
}
