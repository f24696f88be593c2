//! `fermiscat`: run, sweep and snapshot two-electron scattering simulations.
//!
//! Exit status: 0 on success, 1 when a run aborts (invalid input or a
//! violated numerical contract), 2 when some runs of a sweep failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fermiscat_core::propagate::checkpoint::load_state;
use fermiscat_core::runner::{
    reproduce_figure, resume_spins, run_spins, snapshot_conditional_density, sweep, write_snapshot_files, Figure,
    RunOutcome, Scale, SweepAxis, METADATA_FILE,
};
use fermiscat_core::{Error, SimulationConfig, SpinConfig, Vec2};

#[derive(Parser)]
#[command(name = "fermiscat", version, about = "Entanglement dynamics of two scattering electrons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one configuration and trace its entanglement entropy.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Spin states to evaluate on the same propagation (default: the
        /// config's `spin`).
        #[arg(long, value_delimiter = ',')]
        spins: Vec<SpinConfig>,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Independent runs over one parameter; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// d, sigma or kinetic_energy
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',')]
        spins: Vec<SpinConfig>,
    },
    /// Regenerate the data of one figure (fig2 … fig7).
    Figure {
        id: Figure,
        #[arg(long, default_value = "desk")]
        scale: Scale,
        #[arg(long)]
        out: PathBuf,
    },
    /// Conditional density |Φ(r, R) − Φ(R, r)|² of a planar checkpoint.
    Snapshot {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Fixed position R as `x,y` in nm.
        #[arg(long, value_parser = parse_point)]
        fix: Vec2,
        #[arg(long)]
        out: PathBuf,
        /// Run configuration (default: the metadata file next to the checkpoint).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the field as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Print a commented default configuration.
    Template {
        #[arg(value_enum)]
        geometry: Template,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Template {
    Wires,
    Trap,
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or("expected `x,y`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Vec2::new(num(x)?, num(y)?))
}

fn spins_or_default(spins: Vec<SpinConfig>, cfg: &SimulationConfig) -> Vec<SpinConfig> {
    if spins.is_empty() {
        vec![cfg.spin]
    } else {
        spins
    }
}

fn report(outcome: &RunOutcome) {
    for t in &outcome.traces {
        let p = &t.plateau;
        println!(
            "{}: stationary entropy {:.6} nats{}, onset {} fs",
            t.spin,
            p.stationary_value,
            if p.converged { "" } else { " (not converged)" },
            p.onset_time
        );
    }
}

fn run_dir_config(checkpoint: &Path, config: Option<PathBuf>) -> PathBuf {
    config.unwrap_or_else(|| checkpoint.parent().unwrap_or(Path::new(".")).join(METADATA_FILE))
}

fn execute(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run {
            config,
            out,
            spins,
            resume,
        } => {
            let cfg = SimulationConfig::load(&config)?;
            let spins = spins_or_default(spins, &cfg);
            let outcome = match resume {
                Some(ckpt) => resume_spins(&cfg, &spins, &ckpt, Some(&out))?,
                None => run_spins(&cfg, &spins, Some(&out))?,
            };
            report(&outcome);
        }
        Command::Sweep {
            config,
            axis,
            values,
            out,
            spins,
        } => {
            let cfg = SimulationConfig::load(&config)?;
            let spins = spins_or_default(spins, &cfg);
            let table = sweep(&cfg, axis, &values, &spins, Some(&out))?;
            print!("{}", table.to_csv());
            if table.failures() > 0 {
                eprintln!("{} of {} runs failed", table.failures(), table.entries.len());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Figure { id, scale, out } => {
            let bundle = reproduce_figure(id, scale, Some(&out))?;
            if let Some(table) = &bundle.table {
                print!("{}", table.to_csv());
                if table.failures() > 0 {
                    return Ok(ExitCode::from(2));
                }
            }
            if let Some(run) = &bundle.run {
                report(run);
            }
        }
        Command::Snapshot {
            checkpoint,
            fix,
            out,
            config,
            csv,
        } => {
            let cfg = SimulationConfig::load(&run_dir_config(&checkpoint, config))?;
            let grid = cfg.grid_2d()?;
            let state = load_state(&checkpoint)?;
            let snap = snapshot_conditional_density(&state, &grid, fix)?;
            std::fs::create_dir_all(&out)?;
            let path = write_snapshot_files(&out, &snap, csv)?;
            println!("{}", path.display());
        }
        Command::Template { geometry } => {
            let cfg = match geometry {
                Template::Wires => SimulationConfig::wires_default(),
                Template::Trap => SimulationConfig::trap_default(),
            };
            print!("{}", cfg.to_text());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
