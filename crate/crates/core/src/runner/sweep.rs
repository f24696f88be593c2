//! Parameter sweeps: independent runs over one axis, run in a worker pool.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::{run_spins, PlateauReport, RunOutcome};
use crate::config::{Geometry, GridSpec, SimulationConfig, SpinConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Wire distance d (1D).
    WireDistance,
    /// Packet width σ (1D; the domain is resized).
    Sigma,
    /// Kinetic energy of the packets (1D: domain resized) or of the incoming
    /// electron (2D).
    KineticEnergy,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::WireDistance => "d",
            SweepAxis::Sigma => "sigma",
            SweepAxis::KineticEnergy => "kinetic_energy",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" | "wire_distance" => Ok(SweepAxis::WireDistance),
            "sigma" => Ok(SweepAxis::Sigma),
            "kinetic_energy" | "energy" => Ok(SweepAxis::KineticEnergy),
            _ => Err(Error::config("axis", format!("unknown sweep axis `{s}` (d, sigma, kinetic_energy)"))),
        }
    }
}

/// Rebuilds a wires config for a new σ or energy, keeping every other
/// setting of `base` (the domain is resized for the new packets).
fn rewire(base: &SimulationConfig, sigma: f64, energy: f64) -> Result<SimulationConfig> {
    let Geometry::Wires1D { wire_distance } = base.geometry else {
        unreachable!()
    };
    let n = base.grid_1d()?.len();
    let fresh = SimulationConfig::wires(base.material.clone(), wire_distance, n, sigma, energy, base.t_end)?;
    let mut cfg = base.clone();
    cfg.grid = fresh.grid;
    cfg.packets = fresh.packets;
    cfg.validate()?;
    Ok(cfg)
}

/// One config per value, in order.
///
/// 1D σ and energy sweeps share one grid, sized for the most demanding value,
/// so that every run sees the same discretization error.
pub fn sweep_configs(base: &SimulationConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SimulationConfig>> {
    if values.len() < 2 {
        return Err(Error::config("values", "a sweep needs at least two values"));
    }
    base.validate()?;
    let mut configs = values
        .iter()
        .map(|&v| {
            let mut cfg = base.clone();
            match (axis, &mut cfg.geometry) {
                (SweepAxis::WireDistance, Geometry::Wires1D { wire_distance }) => {
                    *wire_distance = v;
                    cfg.validate()?;
                    Ok(cfg)
                }
                (SweepAxis::Sigma, Geometry::Wires1D { .. }) => rewire(base, v, base.packets[0].kinetic_energy),
                (SweepAxis::KineticEnergy, Geometry::Wires1D { .. }) => rewire(base, base.packets[0].sigma, v),
                (SweepAxis::KineticEnergy, Geometry::Trap2D(_)) => {
                    cfg.packets[0].kinetic_energy = v;
                    cfg.validate()?;
                    Ok(cfg)
                }
                (axis, _) => Err(Error::config(
                    "axis",
                    format!("axis `{axis}` is not available for {} geometry", base.geometry.name()),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if matches!(axis, SweepAxis::Sigma | SweepAxis::KineticEnergy) && matches!(base.geometry, Geometry::Wires1D { .. }) {
        let mut widest = configs[0].grid_1d()?;
        for cfg in &configs[1..] {
            let g = cfg.grid_1d()?;
            if g.extent() > widest.extent() {
                widest = g;
            }
        }
        for cfg in &mut configs {
            cfg.grid = GridSpec::OneD(widest);
            cfg.validate()?;
        }
    }
    Ok(configs)
}


#[derive(Debug)]
pub struct SweepEntry {
    pub value: f64,
    pub outcome: Result<RunOutcome>,
}

#[derive(Debug)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub spins: Vec<SpinConfig>,
    pub entries: Vec<SweepEntry>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.outcome.is_err()).count()
    }

    /// Plateau reports for one spin configuration, `None` for failed runs.
    pub fn plateaus(&self, spin: SpinConfig) -> Vec<Option<PlateauReport>> {
        self.entries
            .iter()
            .map(|e| {
                e.outcome
                    .as_ref()
                    .ok()
                    .and_then(|o| o.for_spin(spin))
                    .map(|t| t.plateau)
            })
            .collect()
    }

    pub fn stationary_values(&self, spin: SpinConfig) -> Vec<Option<f64>> {
        self.plateaus(spin).into_iter().map(|p| p.map(|p| p.stationary_value)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},spin,{},status\n", self.axis, PlateauReport::CSV_HEADER);
        for e in &self.entries {
            for &spin in &self.spins {
                match &e.outcome {
                    Ok(o) => {
                        let p = o.for_spin(spin).expect("every requested spin is traced").plateau;
                        s.push_str(&format!("{},{spin},{},ok\n", e.value, p.to_csv()));
                    }
                    Err(err) => {
                        let msg = err.to_string().replace([',', '\n'], ";");
                        s.push_str(&format!("{},{spin},,,,,,error: {msg}\n", e.value));
                    }
                }
            }
        }
        s
    }
}

/// Runs every value of the sweep (in parallel) and collects the results in
/// value order. A failed run is recorded and the others continue.
pub fn sweep(
    base: &SimulationConfig,
    axis: SweepAxis,
    values: &[f64],
    spins: &[SpinConfig],
    out: Option<&Path>,
) -> Result<SweepTable> {
    let configs = sweep_configs(base, axis, values)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let entries: Vec<SweepEntry> = configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, &value)| {
            let dir = out.map(|d| d.join(format!("{axis}_{value}")));
            let outcome = run_spins(cfg, spins, dir.as_deref());
            if let Err(e) = &outcome {
                log::error!("sweep {axis} = {value} failed: {e}");
            }
            SweepEntry { value, outcome }
        })
        .collect();
    let table = SweepTable {
        axis,
        spins: spins.to_vec(),
        entries,
    };
    if let Some(dir) = out {
        std::fs::write(dir.join("sweep.csv"), table.to_csv())?;
    }
    Ok(table)
}
