//! Runs, sweeps, snapshots and figure recipes.
//!
//! A run propagates the pair state and, every `entropy_stride` steps, hands a
//! copy of the field to a worker thread that builds W and evaluates the
//! entropy, so propagation of later steps overlaps with diagonalization.
//! Rows reach the trace in time order through a bounded channel.

mod figures;
mod snapshot;
mod sweep;
mod trace;

pub use figures::{
    figure_configs, reproduce_figure, trap_recipe, wires_recipe, Figure, FigureBundle, Scale, FIG2_DISTANCES,
    FIG3_DISTANCES, FIG4_SIGMAS, FIG6_ENERGIES, FIG7_FIXED, FIG7_TIME,
};
pub use snapshot::{
    conditional_density, cross_correlation, snapshot_conditional_density, write_snapshot_csv, write_snapshot_files,
    Snapshot,
};
pub use sweep::{sweep, sweep_configs, SweepAxis, SweepEntry, SweepTable};
pub use trace::{detect_plateau, EntropyTrace, PlateauReport, TraceRow, TRACE_HEADER};

use std::path::{Path, PathBuf};
use std::sync::mpsc::sync_channel;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::config::{Geometry, SimulationConfig, SpinConfig};
use crate::entanglement::{distinguishable_entropy, evaluate, evaluate_spins_1d, EntropyResult};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::propagate::checkpoint::{load_state, save_state};
use crate::propagate::{
    reconstruct_pair_2d, Diagnostics, Hamiltonian1DPair, Hamiltonian2DFactors, Propagator, Propagator1D,
    Propagator2D, PropagatorState, BOUNDARY_TOLERANCE, NORM_TOLERANCE,
};
use crate::slater::assemble_w_2d;
use crate::states::{aligned_cm_rel_grids, assemble_cm_2d, assemble_pair_1d, gaussian_1d, TwoParticleField};
use trace::TraceWriter;

pub const METADATA_FILE: &str = "metadata.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.fscp";
pub const PLATEAU_FILE: &str = "plateau.csv";
pub const DISTINGUISHABLE_FILE: &str = "distinguishable.csv";

/// Relative energy drift above which a run logs a warning.
const ENERGY_DRIFT_WARN: f64 = 1e-3;

/// A configured state and its propagator.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimulationConfig,
    propagator: Propagator,
    state: PropagatorState,
    particle_grid: Option<Grid2D>,
}

impl Simulation {
    /// Builds the initial state of `config`.
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        let field = match config.geometry {
            Geometry::Wires1D { wire_distance } => {
                let grid = config.grid_1d()?;
                let psi = gaussian_1d(&grid, &config.packets[0], &config.material)?;
                let phi = gaussian_1d(&grid, &config.packets[1], &config.material)?;
                TwoParticleField::Pair1D(assemble_pair_1d(&psi, &phi, &config.material, wire_distance)?)
            }
            Geometry::Trap2D(trap) => {
                let grid = config.grid_2d()?;
                let (cm, rel) = aligned_cm_rel_grids(&grid, config.cm_refine, config.rel_refine)?;
                TwoParticleField::Factorized2D(assemble_cm_2d(&config.packets[0], &trap, &config.material, &cm, &rel)?)
            }
        };
        Self::from_state(config, PropagatorState::new(field))
    }

    /// Continues from a stored state, which must live on the grids of `config`.
    pub fn from_state(config: &SimulationConfig, mut state: PropagatorState) -> Result<Self> {
        config.validate()?;
        let (propagator, particle_grid) = match config.geometry {
            Geometry::Wires1D { wire_distance } => {
                let grid = config.grid_1d()?;
                match &state.field {
                    TwoParticleField::Pair1D(p) if p.grid == grid => {}
                    _ => return Err(Error::GridMismatch("state does not match the configured 1D grid".into())),
                }
                let ham = Hamiltonian1DPair::new(grid, config.material.clone(), wire_distance, config.coulomb_enabled)?;
                (Propagator::Pair1D(Propagator1D::new(ham, config.dt, config.solver)?), None)
            }
            Geometry::Trap2D(trap) => {
                let grid = config.grid_2d()?;
                let (cm, rel) = aligned_cm_rel_grids(&grid, config.cm_refine, config.rel_refine)?;
                match &state.field {
                    TwoParticleField::Factorized2D(f) if f.cm.grid == cm && f.rel.grid == rel => {}
                    _ => return Err(Error::GridMismatch("state does not match the configured CM/relative grids".into())),
                }
                let ham = Hamiltonian2DFactors::new(
                    config.material.clone(),
                    trap,
                    config.coulomb_softening,
                    config.coulomb_enabled,
                    cm,
                    rel,
                )?;
                (Propagator::Factorized2D(Propagator2D::new(ham, config.dt)?), Some(grid))
            }
        };
        if (state.field.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            // Reduced-precision checkpoints round the amplitudes.
            log::info!("renormalizing restored state (norm {})", state.field.norm_sqr());
            renormalize(&mut state.field)?;
        }
        state.diagnostics = propagator.diagnostics(&state.field)?;
        Ok(Simulation {
            config: config.clone(),
            propagator,
            state,
            particle_grid,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn state(&self) -> &PropagatorState {
        &self.state
    }

    pub fn into_state(self) -> PropagatorState {
        self.state
    }

    /// Particle grid on which 2D pair amplitudes are reconstructed.
    pub fn particle_grid(&self) -> Option<&Grid2D> {
        self.particle_grid.as_ref()
    }

    /// One time step; the norm contract is checked by the propagator.
    pub fn step(&mut self) -> Result<()> {
        self.propagator.step(&mut self.state)
    }

    /// Steps until `t` (fs) is reached or passed.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.state.t < t - 1e-9 * self.config.dt {
            self.step()?;
        }
        Ok(())
    }

    pub fn refresh_diagnostics(&mut self) -> Result<Diagnostics> {
        let d = self.propagator.diagnostics(&self.state.field)?;
        self.state.diagnostics = d;
        Ok(d)
    }

    /// Probability on the wall-adjacent nodes, checked against the contract.
    pub fn check_boundary(&self) -> Result<f64> {
        let p = self.propagator.boundary_probability(&self.state.field)?;
        if p > BOUNDARY_TOLERANCE {
            return Err(Error::BoundaryLeak {
                step: self.state.step_count,
                probability: p,
            });
        }
        Ok(p)
    }

    /// Φ on the particle grid (1D: the amplitude itself; 2D: reconstructed).
    pub fn pair_amplitude(&self) -> Result<Array2<C64>> {
        pair_amplitude(&self.state.field, self.particle_grid.as_ref())
    }
}

fn renormalize(field: &mut TwoParticleField) -> Result<()> {
    match field {
        TwoParticleField::Pair1D(p) => p.normalize(),
        TwoParticleField::Factorized2D(f) => {
            f.cm.normalize()?;
            f.rel.normalize()
        }
    }
}

pub fn pair_amplitude(field: &TwoParticleField, particle_grid: Option<&Grid2D>) -> Result<Array2<C64>> {
    match field {
        TwoParticleField::Pair1D(p) => Ok(p.amp.clone()),
        TwoParticleField::Factorized2D(f) => {
            let grid = particle_grid.ok_or_else(|| Error::GridMismatch("2D field needs a particle grid".into()))?;
            reconstruct_pair_2d(f, grid)
        }
    }
}

/// Entropy of each spin configuration for one field, plus the
/// distinguishable-particle entropy when requested (1D only).
pub fn evaluate_field(
    field: &TwoParticleField,
    particle_grid: Option<&Grid2D>,
    spins: &[SpinConfig],
    distinguishable: bool,
) -> Result<(Vec<EntropyResult>, Option<f64>)> {
    match field {
        TwoParticleField::Pair1D(p) => {
            let results = evaluate_spins_1d(p.amp.view(), spins)?;
            let dist = distinguishable.then(|| distinguishable_entropy(p.amp.view())).transpose()?;
            Ok((results, dist))
        }
        TwoParticleField::Factorized2D(_) => {
            let a = pair_amplitude(field, particle_grid)?;
            let results = spins
                .iter()
                .map(|&s| evaluate(&assemble_w_2d(a.view(), s)?))
                .collect::<Result<Vec<_>>>()?;
            Ok((results, None))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpinTrace {
    pub spin: SpinConfig,
    pub trace: EntropyTrace,
    pub plateau: PlateauReport,
    /// Largest |λ_{2i} − λ_{2i+1}| over every evaluated ρ.
    pub max_pair_mismatch: f64,
    /// Largest |Tr ρ − 1| over every evaluated ρ.
    pub max_trace_error: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// One per requested spin configuration, in request order.
    pub traces: Vec<SpinTrace>,
    /// (t, distinguishable entropy) when enabled.
    pub distinguishable: Option<Vec<(f64, f64)>>,
    pub final_state: PropagatorState,
}

impl RunOutcome {
    pub fn trace(&self) -> &EntropyTrace {
        &self.traces[0].trace
    }

    pub fn plateau(&self) -> &PlateauReport {
        &self.traces[0].plateau
    }

    pub fn for_spin(&self, spin: SpinConfig) -> Option<&SpinTrace> {
        self.traces.iter().find(|t| t.spin == spin)
    }
}

/// Trace file name inside a run directory.
pub fn trace_file_name(spins: &[SpinConfig], spin: SpinConfig) -> String {
    if spins.len() == 1 {
        "trace.csv".into()
    } else {
        format!("trace_{spin}.csv")
    }
}

/// Full pipeline for `config.spin`.
pub fn run(config: &SimulationConfig, out: Option<&Path>) -> Result<RunOutcome> {
    run_spins(config, &[config.spin], out)
}

/// One propagation shared by several spin configurations.
pub fn run_spins(config: &SimulationConfig, spins: &[SpinConfig], out: Option<&Path>) -> Result<RunOutcome> {
    let sim = Simulation::new(config)?;
    drive(sim, spins, None, out)
}

/// Continues a run from a checkpoint up to `config.t_end`. Existing trace
/// files in `out` are kept up to the checkpoint time and extended.
pub fn resume(config: &SimulationConfig, checkpoint: &Path, out: Option<&Path>) -> Result<RunOutcome> {
    resume_spins(config, &[config.spin], checkpoint, out)
}

pub fn resume_spins(
    config: &SimulationConfig,
    spins: &[SpinConfig],
    checkpoint: &Path,
    out: Option<&Path>,
) -> Result<RunOutcome> {
    let state = load_state(checkpoint)?;
    let t0 = state.t;
    let sim = Simulation::from_state(config, state)?;
    let mut existing = Vec::new();
    for &spin in spins {
        let mut trace = EntropyTrace::new();
        if let Some(dir) = out {
            let path = dir.join(trace_file_name(spins, spin));
            if path.exists() {
                trace = EntropyTrace::read_csv(&path)?;
                trace.truncate_after(t0);
            }
        }
        existing.push(trace);
    }
    drive(sim, spins, Some(existing), out)
}

fn metadata(config: &SimulationConfig, spins: &[SpinConfig], resumed_at: Option<f64>) -> String {
    let names: Vec<&str> = spins.iter().map(|s| s.as_str()).collect();
    let mut s = format!(
        "# fermiscat {}\n# spins: {}\n# steps: {} of {} fs, entropy every {} steps\n",
        env!("CARGO_PKG_VERSION"),
        names.join(","),
        config.n_steps(),
        config.dt,
        config.entropy_stride
    );
    if let Some(t) = resumed_at {
        s.push_str(&format!("# resumed from checkpoint at t = {t} fs\n"));
    }
    s.push_str(&config.to_text());
    s
}

struct Sample {
    step: u64,
    t: f64,
    diagnostics: Diagnostics,
    field: TwoParticleField,
}

fn drive(
    mut sim: Simulation,
    spins: &[SpinConfig],
    existing: Option<Vec<EntropyTrace>>,
    out: Option<&Path>,
) -> Result<RunOutcome> {
    if spins.is_empty() {
        return Err(Error::config("spin", "no spin configuration requested"));
    }
    let config = sim.config.clone();
    if matches!(config.geometry, Geometry::Trap2D(_)) {
        if let Some(s) = spins.iter().find(|s| !s.allowed_in_2d()) {
            return Err(Error::UnsupportedSpin(s.as_str().into()));
        }
    }
    let resumed_at = existing.as_ref().map(|_| sim.state.t);
    let mut traces = existing.unwrap_or_else(|| vec![EntropyTrace::new(); spins.len()]);
    let want_dist = config.output.distinguishable && matches!(config.geometry, Geometry::Wires1D { .. });

    let out_dir: Option<PathBuf> = out.map(Path::to_path_buf);
    let mut writers = Vec::new();
    let mut dist_writer = None;
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(METADATA_FILE), metadata(&config, spins, resumed_at))?;
        for (spin, trace) in spins.iter().zip(&traces) {
            writers.push(TraceWriter::create(&dir.join(trace_file_name(spins, *spin)), trace)?);
        }
        if want_dist {
            let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(DISTINGUISHABLE_FILE))?);
            use std::io::Write;
            writeln!(w, "t_fs,distinguishable_entropy_nats")?;
            dist_writer = Some(w);
        }
    }

    sim.propagator.check_accuracy(&sim.state.field);
    let n_steps = config.n_steps();
    let stride = config.entropy_stride.max(1) as u64;
    let last_t = traces[0].rows().last().map(|r| r.t);
    let particle_grid = sim.particle_grid;

    type Worked = (Vec<EntropyTrace>, Vec<(f64, f64)>, Vec<(f64, f64)>);
    let (traces, dist, checks) = std::thread::scope(|scope| -> Result<Worked> {
        let (tx, rx) = sync_channel::<Sample>(1);
        let worker = scope.spawn(move || -> Result<Worked> {
            let mut dist = Vec::new();
            let mut checks = vec![(0.0f64, 0.0f64); spins.len()];
            let mut e0: Option<f64> = None;
            for sample in rx {
                let (results, d) = evaluate_field(&sample.field, particle_grid.as_ref(), spins, want_dist)
                    .map_err(|e| e.at_step("entropy evaluation", sample.step))?;
                let diag = sample.diagnostics;
                let e_ref = *e0.get_or_insert(diag.total_energy);
                let drift = (diag.total_energy - e_ref).abs() / e_ref.abs().max(f64::MIN_POSITIVE);
                if drift > ENERGY_DRIFT_WARN {
                    log::warn!("relative energy drift {drift:.2e} at t = {} fs", sample.t);
                }
                for (i, r) in results.iter().enumerate() {
                    checks[i].0 = checks[i].0.max(r.spectrum.max_pair_mismatch);
                    checks[i].1 = checks[i].1.max((r.spectrum.total() - 1.0).abs());
                    let row = TraceRow {
                        t: sample.t,
                        entropy: r.entropy,
                        slater_rank: r.slater_rank,
                        norm: diag.norm,
                        total_energy: diag.total_energy,
                        coulomb_energy: diag.coulomb_energy,
                    };
                    traces[i].push(row)?;
                    if let Some(w) = writers.get_mut(i) {
                        w.append(&row)?;
                    }
                }
                if let Some(d) = d {
                    dist.push((sample.t, d));
                    if let Some(w) = dist_writer.as_mut() {
                        use std::io::Write;
                        writeln!(w, "{},{}", sample.t, d)?;
                        w.flush()?;
                    }
                }
                log::debug!("t = {:.1} fs: entropy {:.6}", sample.t, results[0].entropy);
            }
            Ok((traces, dist, checks))
        });

        let produced = (|| -> Result<()> {
            loop {
                let step = sim.state.step_count;
                let due = step % stride == 0 || step == n_steps;
                if due && last_t.map_or(true, |t| sim.state.t > t) {
                    sim.check_boundary()?;
                    let diagnostics = sim.refresh_diagnostics()?;
                    let sample = Sample {
                        step,
                        t: sim.state.t,
                        diagnostics,
                        field: sim.state.field.clone(),
                    };
                    if tx.send(sample).is_err() {
                        // The worker stopped; its error is reported on join.
                        return Ok(());
                    }
                }
                if step >= n_steps {
                    return Ok(());
                }
                sim.step()?;
            }
        })();
        drop(tx);
        let worked = worker.join().expect("entropy worker panicked");
        produced?;
        worked
    })?;

    let mut out_traces = Vec::with_capacity(spins.len());
    for ((&spin, trace), (max_pair_mismatch, max_trace_error)) in spins.iter().zip(traces).zip(checks) {
        let plateau = detect_plateau(&trace, config.plateau_window, config.plateau_tol)?;
        out_traces.push(SpinTrace {
            spin,
            trace,
            plateau,
            max_pair_mismatch,
            max_trace_error,
        });
    }
    if let Some(dir) = &out_dir {
        let mut s = format!("spin,{}\n", PlateauReport::CSV_HEADER);
        for t in &out_traces {
            s.push_str(&format!("{},{}\n", t.spin, t.plateau.to_csv()));
        }
        std::fs::write(dir.join(PLATEAU_FILE), s)?;
        if config.output.checkpoint {
            save_state(&dir.join(CHECKPOINT_FILE), &sim.state, config.output.checkpoint_precision)?;
        }
    }
    Ok(RunOutcome {
        traces: out_traces,
        distinguishable: want_dist.then_some(dist),
        final_state: sim.state,
    })
}
