//! Conditional densities |Φ_A(r, R)|² at a fixed second-particle position.

use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Vec2};
use crate::propagate::checkpoint::write_snapshot;
use crate::propagate::PropagatorState;
use crate::states::{FactorizedField2D, TwoParticleField};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: Grid2D,
    /// fs
    pub t: f64,
    pub fixed: Vec2,
    /// Normalized to unit maximum (all zero if the field vanishes).
    pub density: Array2<f64>,
}

/// |Φ(r, R) − Φ(R, r)|² over `grid`, scaled to unit maximum.
pub fn conditional_density(field: &FactorizedField2D, grid: &Grid2D, fixed: Vec2) -> Result<Array2<f64>> {
    if !grid.contains(fixed) {
        return Err(Error::OutsideGrid { x: fixed.x, y: fixed.y });
    }
    let (nx, ny) = grid.shape();
    let mut out = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let r = grid.point(i, j);
            let a = field.amplitude_at(r, fixed)? - field.amplitude_at(fixed, r)?;
            out[[i, j]] = a.norm_sqr();
        }
    }
    let max = out.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        out.mapv_inplace(|v| v / max);
    }
    Ok(out)
}

pub fn snapshot_conditional_density(state: &PropagatorState, grid: &Grid2D, fixed: Vec2) -> Result<Snapshot> {
    let TwoParticleField::Factorized2D(field) = &state.field else {
        return Err(Error::GridMismatch("conditional densities need a 2D run".into()));
    };
    Ok(Snapshot {
        grid: *grid,
        t: state.t,
        fixed,
        density: conditional_density(field, grid, fixed)?,
    })
}

/// Pearson correlation of two fields on the same grid.
pub fn cross_correlation(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::GridMismatch(format!("fields differ in shape: {:?} vs {:?}", a.dim(), b.dim())));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.sum() / n, b.sum() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    Zip::from(a).and(b).for_each(|&x, &y| {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    });
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Degenerate("correlation of a constant field".into()));
    }
    Ok(sab / (saa * sbb).sqrt())
}

pub fn write_snapshot_csv(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x_nm,y_nm,density")?;
    let (nx, ny) = snap.grid.shape();
    for i in 0..nx {
        for j in 0..ny {
            let p = snap.grid.point(i, j);
            writeln!(w, "{},{},{}", p.x, p.y, snap.density[[i, j]])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `snapshot_t{t}_R{x}_{y}.fssn` (and the matching `.csv` when `csv`)
/// into `dir`; returns the binary file's path.
pub fn write_snapshot_files(dir: &Path, snap: &Snapshot, csv: bool) -> Result<PathBuf> {
    let stem = format!("snapshot_t{}_R{}_{}", snap.t, snap.fixed.x, snap.fixed.y);
    let path = dir.join(format!("{stem}.fssn"));
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path)?);
    write_snapshot(&mut w, &snap.grid, snap.t, snap.fixed, &snap.density)?;
    w.flush()?;
    if csv {
        write_snapshot_csv(&dir.join(format!("{stem}.csv")), snap)?;
    }
    Ok(path)
}
