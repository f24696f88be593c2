//! Named recipes that regenerate the data behind each figure.
//!
//! Desk scale keeps every recipe on one workstation: 1D runs use N = 512 and
//! stop at 1.4 ps (the plateau sets in well before), 2D runs use N = 48 per
//! axis. Paper scale doubles the 1D grid, runs to 2 ps and uses N = 64 in 2D.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::snapshot::{snapshot_conditional_density, write_snapshot_files, Snapshot};
use super::sweep::{sweep, SweepAxis, SweepTable};
use super::{run_spins, RunOutcome, Simulation};
use crate::config::{SimulationConfig, SpinConfig};
use crate::error::{Error, Result};
use crate::grid::Vec2;
use crate::units::Material;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Same-spin entropy vs time for several wire distances.
    Fig2,
    /// Opposite-spin (non-factorizable) entropy vs time for several distances.
    Fig3,
    /// Same-spin entropy for several packet widths.
    Fig4,
    /// All four spin configurations at one distance.
    Fig5,
    /// Trap scattering at three incoming energies.
    Fig6,
    /// Conditional densities before and after the collision in the trap.
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 6] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownFigure(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(Error::config("scale", format!("unknown scale `{s}` (desk, paper)"))),
        }
    }
}

pub const FIG2_DISTANCES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const FIG3_DISTANCES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const FIG4_SIGMAS: [f64; 3] = [10.0, 20.0, 30.0];
pub const FIG6_ENERGIES: [f64; 3] = [10.0, 20.0, 30.0];
/// Fixed second-particle positions of the conditional densities, nm.
pub const FIG7_FIXED: [Vec2; 2] = [Vec2 { x: 100.0, y: 100.0 }, Vec2 { x: 50.0, y: 150.0 }];
pub const FIG7_TIME: f64 = 400.0;

/// Silicon wires, σ = 20 nm, 50 meV, at the given scale.
pub fn wires_recipe(scale: Scale, wire_distance: f64, spin: SpinConfig) -> Result<SimulationConfig> {
    let (n, t_end) = match scale {
        Scale::Desk => (512, 1400.0),
        Scale::Paper => (1024, 2000.0),
    };
    let mut cfg = SimulationConfig::wires(Material::silicon(), wire_distance, n, 20.0, 50.0, t_end)?;
    cfg.spin = spin;
    Ok(cfg)
}

pub fn trap_recipe(scale: Scale, kinetic_energy: f64) -> Result<SimulationConfig> {
    let n = match scale {
        Scale::Desk => 48,
        Scale::Paper => 64,
    };
    SimulationConfig::trap(kinetic_energy, n)
}

/// The labelled configurations a figure runs.
pub fn figure_configs(figure: Figure, scale: Scale) -> Result<Vec<(String, SimulationConfig)>> {
    let wires = |spin, ds: &[f64]| -> Result<Vec<(String, SimulationConfig)>> {
        ds.iter().map(|&d| Ok((format!("d_{d}"), wires_recipe(scale, d, spin)?))).collect()
    };
    match figure {
        Figure::Fig2 => wires(SpinConfig::SameSpin, &FIG2_DISTANCES),
        Figure::Fig3 => wires(SpinConfig::OppositeNonFactorizable, &FIG3_DISTANCES),
        Figure::Fig4 => {
            let base = wires_recipe(scale, 0.5, SpinConfig::SameSpin)?;
            let cfgs = super::sweep::sweep_configs(&base, SweepAxis::Sigma, &FIG4_SIGMAS)?;
            Ok(FIG4_SIGMAS.iter().map(|s| format!("sigma_{s}")).zip(cfgs).collect())
        }
        Figure::Fig5 => {
            let mut cfg = wires_recipe(scale, 0.5, SpinConfig::SameSpin)?;
            cfg.output.distinguishable = true;
            Ok(vec![("d_0.5".into(), cfg)])
        }
        Figure::Fig6 => FIG6_ENERGIES
            .iter()
            .map(|&e| Ok((format!("kinetic_energy_{e}"), trap_recipe(scale, e)?)))
            .collect(),
        Figure::Fig7 => Ok(vec![("kinetic_energy_20".into(), trap_recipe(scale, 20.0)?)]),
    }
}

#[derive(Debug)]
pub struct FigureBundle {
    pub figure: Figure,
    /// Sweep figures (2, 3, 4, 6).
    pub table: Option<SweepTable>,
    /// Single-run figures (5, 7).
    pub run: Option<RunOutcome>,
    /// Figure 7: for each time, one snapshot per fixed point.
    pub snapshots: Vec<Snapshot>,
}

/// Runs a figure recipe; with `out`, writes traces, tables and snapshots.
pub fn reproduce_figure(figure: Figure, scale: Scale, out: Option<&Path>) -> Result<FigureBundle> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let configs = figure_configs(figure, scale)?;
    let mut bundle = FigureBundle {
        figure,
        table: None,
        run: None,
        snapshots: Vec::new(),
    };
    match figure {
        Figure::Fig2 | Figure::Fig3 => {
            let base = &configs[0].1;
            let ds: &[f64] = if figure == Figure::Fig2 { &FIG2_DISTANCES } else { &FIG3_DISTANCES };
            bundle.table = Some(sweep(base, SweepAxis::WireDistance, ds, &[base.spin], out)?);
        }
        Figure::Fig4 => {
            let base = wires_recipe(scale, 0.5, SpinConfig::SameSpin)?;
            bundle.table = Some(sweep(&base, SweepAxis::Sigma, &FIG4_SIGMAS, &[base.spin], out)?);
        }
        Figure::Fig5 => {
            bundle.run = Some(run_spins(&configs[0].1, &SpinConfig::ALL, out)?);
        }
        Figure::Fig6 => {
            let base = &configs[0].1;
            bundle.table = Some(sweep(base, SweepAxis::KineticEnergy, &FIG6_ENERGIES, &[base.spin], out)?);
        }
        Figure::Fig7 => {
            let cfg = &configs[0].1;
            let outcome = run_spins(cfg, &[cfg.spin], out)?;
            let trace = outcome.trace();
            let t_min = trace
                .rows()
                .iter()
                .min_by(|a, b| a.entropy.total_cmp(&b.entropy))
                .map(|r| r.t)
                .unwrap_or(0.0);
            let mut times = vec![t_min, FIG7_TIME.min(cfg.t_end), cfg.t_end];
            times.sort_by(f64::total_cmp);
            times.dedup();
            let mut sim = Simulation::new(cfg)?;
            let grid = *sim.particle_grid().expect("2D run");
            for t in times {
                sim.advance_to(t)?;
                for fixed in FIG7_FIXED {
                    let snap = snapshot_conditional_density(sim.state(), &grid, fixed)?;
                    if let Some(dir) = out {
                        write_snapshot_files(dir, &snap, true)?;
                    }
                    bundle.snapshots.push(snap);
                }
            }
            bundle.run = Some(outcome);
        }
    }
    if let Some(dir) = out {
        let scale_name = match scale {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        };
        let mut s = format!("# {figure} at {scale_name} scale\n");
        for (label, cfg) in &configs {
            s.push_str(&format!("\n[{label}]\n{}", cfg.to_text()));
        }
        std::fs::write(dir.join("figure.txt"), s)?;
    }
    Ok(bundle)
}
