//! `.bfld` binary tensors.
//!
//! Layout, all little-endian:
//! magic (4 bytes) | version u32 | axes u32 | N per axis u32 | L per axis f64 |
//! representation u8 | samples (re f64, im f64) row-major | tag count u32 | tags f64.
//!
//! Magic `BFLD` marks fields and kernel slices (the tags hold the base point),
//! `BSYM` marks tabulated symbols with axes ordered x | ξ | η.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{ComplexField, Grid, Representation};
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 4] = b"BFLD";
pub const SYMBOL_MAGIC: &[u8; 4] = b"BSYM";
pub const VERSION: u32 = 1;

/// A raw tensor as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub magic: [u8; 4],
    pub points: Vec<u32>,
    pub periods: Vec<f64>,
    pub representation: u8,
    pub values: Vec<Complex64>,
    pub tags: Vec<f64>,
}

impl Tensor {
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let expected: usize = self.points.iter().map(|&p| p as usize).product();
        if expected != self.values.len() || self.points.len() != self.periods.len() {
            return Err(Error::Format("tensor shape does not match its samples".into()));
        }
        w.write_all(&self.magic)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.points.len() as u32).to_le_bytes())?;
        for p in &self.points {
            w.write_all(&p.to_le_bytes())?;
        }
        for l in &self.periods {
            w.write_all(&l.to_le_bytes())?;
        }
        w.write_all(&[self.representation])?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        w.write_all(&(self.tags.len() as u32).to_le_bytes())?;
        for t in &self.tags {
            w.write_all(&t.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != FIELD_MAGIC && &magic != SYMBOL_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let axes = read_u32(r)? as usize;
        if axes == 0 || axes > 6 {
            return Err(Error::Format(format!("unsupported axis count {axes}")));
        }
        let points = (0..axes).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
        let periods = (0..axes).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
        let mut rep = [0u8; 1];
        r.read_exact(&mut rep)?;
        let count = points.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p as usize));
        let count = count.filter(|&c| c <= 1 << 28).ok_or_else(|| Error::Format("tensor too large".into()))?;
        let mut raw = vec![0u8; 16 * count];
        r.read_exact(&mut raw)?;
        let values = raw
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        let ntags = read_u32(r)? as usize;
        if ntags > 64 {
            return Err(Error::Format("too many tags".into()));
        }
        let tags = (0..ntags).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
        Ok(Self { magic, points, periods, representation: rep[0], values, tags })
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn rep_byte(r: Representation) -> u8 {
    match r {
        Representation::Spatial => 0,
        Representation::Spectral => 1,
    }
}

pub fn field_to_tensor(f: &ComplexField) -> Tensor {
    let g = f.grid();
    Tensor {
        magic: *FIELD_MAGIC,
        points: vec![g.points() as u32; g.dim()],
        periods: vec![g.period(); g.dim()],
        representation: rep_byte(f.representation()),
        values: f.values().to_vec(),
        tags: Vec::new(),
    }
}

pub fn tensor_to_field(t: &Tensor) -> Result<ComplexField> {
    if &t.magic != FIELD_MAGIC {
        return Err(Error::Format("not a field tensor".into()));
    }
    let dim = t.points.len();
    if dim > 2 || t.points.iter().any(|&p| p != t.points[0]) || t.periods.iter().any(|&l| l != t.periods[0]) {
        return Err(Error::Format("fields need 1 or 2 axes with equal sizes and periods".into()));
    }
    let grid = Grid::new(dim, t.points[0] as usize, t.periods[0])?;
    let repr = match t.representation {
        0 => Representation::Spatial,
        1 => Representation::Spectral,
        other => return Err(Error::Format(format!("bad representation flag {other}"))),
    };
    ComplexField::new(grid, t.values.clone(), repr)
}

pub fn write_field(f: &ComplexField, w: &mut impl Write) -> Result<()> {
    field_to_tensor(f).write_to(w)
}

pub fn read_field(r: &mut impl Read) -> Result<ComplexField> {
    tensor_to_field(&Tensor::read_from(r)?)
}

pub fn save_field(f: &ComplexField, path: &std::path::Path) -> Result<()> {
    let mut buf = Vec::new();
    write_field(f, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_field(path: &std::path::Path) -> Result<ComplexField> {
    let bytes = std::fs::read(path)?;
    read_field(&mut bytes.as_slice())
}
