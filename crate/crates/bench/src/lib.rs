//! Fixtures shared by the benchmarks: realistic states at a chosen grid size.

use fermiscat_core::runner::Simulation;
use fermiscat_core::{Material, SimulationConfig};

/// Silicon wires at d = 0.5 nm with an `n`-point grid over the 1.4 ps domain.
pub fn wires(n: usize) -> Simulation {
    let cfg = SimulationConfig::wires(Material::silicon(), 0.5, n, 20.0, 50.0, 1400.0).unwrap();
    Simulation::new(&cfg).unwrap()
}

/// 20 meV electron on the GaAs trap, `n` points per axis.
pub fn trap(n: usize) -> Simulation {
    Simulation::new(&SimulationConfig::trap(20.0, n).unwrap()).unwrap()
}

/// Advances to `t` fs, past the collision, so entropy benchmarks see a
/// generic full-rank amplitude rather than a product state.
pub fn collided(mut sim: Simulation, t: f64) -> Simulation {
    sim.advance_to(t).unwrap();
    sim
}
