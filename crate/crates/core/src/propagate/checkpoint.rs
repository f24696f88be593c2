//! Versioned little-endian binary dumps of propagator states and matrices.
//!
//! Layout: 4-byte magic, u32 version, then a kind-specific body. Complex
//! arrays are stored row-major as (re, im) pairs in f32 or f64.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{Diagnostics, PropagatorState};
use crate::config::Precision;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, Vec2};
use crate::states::{FactorizedField2D, Field2D, PairField1D, TwoParticleField};

pub const STATE_MAGIC: [u8; 4] = *b"FSCP";
pub const MATRIX_MAGIC: [u8; 4] = *b"FSWM";
pub const SNAPSHOT_MAGIC: [u8; 4] = *b"FSSN";
pub const VERSION: u32 = 1;

const KIND_PAIR_1D: u8 = 1;
const KIND_FACTORIZED_2D: u8 = 2;

fn precision_tag(p: Precision) -> u8 {
    match p {
        Precision::Complex64 => 1,
        Precision::Complex128 => 2,
    }
}

fn precision_from_tag(t: u8) -> Result<Precision> {
    match t {
        1 => Ok(Precision::Complex64),
        2 => Ok(Precision::Complex128),
        _ => Err(Error::Format(format!("unknown precision tag {t}"))),
    }
}

fn write_header(w: &mut impl Write, magic: [u8; 4]) -> Result<()> {
    w.write_all(&magic)?;
    w.write_u32::<LE>(VERSION)?;
    Ok(())
}

fn read_header(r: &mut impl Read, magic: [u8; 4]) -> Result<()> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    if m != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(&magic)
        )));
    }
    let v = r.read_u32::<LE>()?;
    if v != VERSION {
        return Err(Error::Format(format!("unsupported version {v}")));
    }
    Ok(())
}

fn write_grid1d(w: &mut impl Write, g: &Grid1D) -> Result<()> {
    w.write_u64::<LE>(g.len() as u64)?;
    w.write_f64::<LE>(g.x_min())?;
    w.write_f64::<LE>(g.x_max())?;
    Ok(())
}

fn read_grid1d(r: &mut impl Read) -> Result<Grid1D> {
    let n = r.read_u64::<LE>()? as usize;
    let lo = r.read_f64::<LE>()?;
    let hi = r.read_f64::<LE>()?;
    Grid1D::new(n, lo, hi).map_err(|e| Error::Format(format!("invalid grid: {e}")))
}

fn write_grid2d(w: &mut impl Write, g: &Grid2D) -> Result<()> {
    write_grid1d(w, &g.x)?;
    write_grid1d(w, &g.y)
}

fn read_grid2d(r: &mut impl Read) -> Result<Grid2D> {
    Ok(Grid2D::new(read_grid1d(r)?, read_grid1d(r)?))
}

fn write_complex(w: &mut impl Write, data: &Array2<C64>, p: Precision) -> Result<()> {
    for z in data.iter() {
        match p {
            Precision::Complex64 => {
                w.write_f32::<LE>(z.re as f32)?;
                w.write_f32::<LE>(z.im as f32)?;
            }
            Precision::Complex128 => {
                w.write_f64::<LE>(z.re)?;
                w.write_f64::<LE>(z.im)?;
            }
        }
    }
    Ok(())
}

fn read_complex(r: &mut impl Read, shape: (usize, usize), p: Precision) -> Result<Array2<C64>> {
    let mut v = Vec::with_capacity(shape.0 * shape.1);
    for _ in 0..shape.0 * shape.1 {
        let z = match p {
            Precision::Complex64 => C64::new(r.read_f32::<LE>()? as f64, r.read_f32::<LE>()? as f64),
            Precision::Complex128 => C64::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?),
        };
        v.push(z);
    }
    Array2::from_shape_vec(shape, v).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_state(w: &mut impl Write, state: &PropagatorState, precision: Precision) -> Result<()> {
    write_header(w, STATE_MAGIC)?;
    let kind = match state.field {
        TwoParticleField::Pair1D(_) => KIND_PAIR_1D,
        TwoParticleField::Factorized2D(_) => KIND_FACTORIZED_2D,
    };
    w.write_u8(kind)?;
    w.write_u8(precision_tag(precision))?;
    w.write_u16::<LE>(0)?;
    w.write_f64::<LE>(state.t)?;
    w.write_u64::<LE>(state.step_count)?;
    w.write_f64::<LE>(state.diagnostics.norm)?;
    w.write_f64::<LE>(state.diagnostics.total_energy)?;
    w.write_f64::<LE>(state.diagnostics.coulomb_energy)?;
    match &state.field {
        TwoParticleField::Pair1D(p) => {
            write_grid1d(w, &p.grid)?;
            write_complex(w, &p.amp, precision)?;
        }
        TwoParticleField::Factorized2D(f) => {
            for field in [&f.cm, &f.rel] {
                write_grid2d(w, &field.grid)?;
                write_complex(w, &field.amp, precision)?;
            }
        }
    }
    Ok(())
}

pub fn read_state(r: &mut impl Read) -> Result<PropagatorState> {
    read_header(r, STATE_MAGIC)?;
    let kind = r.read_u8()?;
    let precision = precision_from_tag(r.read_u8()?)?;
    let _reserved = r.read_u16::<LE>()?;
    let t = r.read_f64::<LE>()?;
    let step_count = r.read_u64::<LE>()?;
    let diagnostics = Diagnostics {
        norm: r.read_f64::<LE>()?,
        total_energy: r.read_f64::<LE>()?,
        coulomb_energy: r.read_f64::<LE>()?,
    };
    let field = match kind {
        KIND_PAIR_1D => {
            let grid = read_grid1d(r)?;
            let amp = read_complex(r, (grid.len(), grid.len()), precision)?;
            TwoParticleField::Pair1D(PairField1D { grid, amp })
        }
        KIND_FACTORIZED_2D => {
            let mut read_field = || -> Result<Field2D> {
                let grid = read_grid2d(r)?;
                let amp = read_complex(r, grid.shape(), precision)?;
                Ok(Field2D { grid, amp })
            };
            let cm = read_field()?;
            let rel = read_field()?;
            TwoParticleField::Factorized2D(FactorizedField2D { cm, rel })
        }
        k => return Err(Error::Format(format!("unknown state kind {k}"))),
    };
    Ok(PropagatorState {
        field,
        t,
        step_count,
        diagnostics,
    })
}

pub fn save_state(path: &Path, state: &PropagatorState, precision: Precision) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_state(&mut w, state, precision)?;
    w.flush()?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<PropagatorState> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_state(&mut r)
}

/// Dense complex matrix with a one-byte layout tag (e.g. a Slater matrix).
pub fn write_matrix(w: &mut impl Write, tag: u8, m: &Array2<C64>, precision: Precision) -> Result<()> {
    write_header(w, MATRIX_MAGIC)?;
    w.write_u8(tag)?;
    w.write_u8(precision_tag(precision))?;
    w.write_u16::<LE>(0)?;
    w.write_u64::<LE>(m.nrows() as u64)?;
    w.write_u64::<LE>(m.ncols() as u64)?;
    write_complex(w, m, precision)
}

pub fn read_matrix(r: &mut impl Read) -> Result<(u8, Array2<C64>)> {
    read_header(r, MATRIX_MAGIC)?;
    let tag = r.read_u8()?;
    let precision = precision_from_tag(r.read_u8()?)?;
    let _ = r.read_u16::<LE>()?;
    let rows = r.read_u64::<LE>()? as usize;
    let cols = r.read_u64::<LE>()? as usize;
    Ok((tag, read_complex(r, (rows, cols), precision)?))
}

/// Real field on a 2D grid at time `t` with the fixed point it refers to.
pub fn write_snapshot(w: &mut impl Write, grid: &Grid2D, t: f64, fixed: Vec2, data: &Array2<f64>) -> Result<()> {
    write_header(w, SNAPSHOT_MAGIC)?;
    write_grid2d(w, grid)?;
    w.write_f64::<LE>(t)?;
    w.write_f64::<LE>(fixed.x)?;
    w.write_f64::<LE>(fixed.y)?;
    for v in data.iter() {
        w.write_f64::<LE>(*v)?;
    }
    Ok(())
}

pub fn read_snapshot(r: &mut impl Read) -> Result<(Grid2D, f64, Vec2, Array2<f64>)> {
    read_header(r, SNAPSHOT_MAGIC)?;
    let grid = read_grid2d(r)?;
    let t = r.read_f64::<LE>()?;
    let fixed = Vec2::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?);
    let (nx, ny) = grid.shape();
    let mut v = Vec::with_capacity(nx * ny);
    for _ in 0..nx * ny {
        v.push(r.read_f64::<LE>()?);
    }
    let data = Array2::from_shape_vec((nx, ny), v).map_err(|e| Error::Format(e.to_string()))?;
    Ok((grid, t, fixed, data))
}
