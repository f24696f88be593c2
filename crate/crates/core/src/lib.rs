//! Entanglement dynamics of two scattering electrons.
//!
//! Two electrons in parallel quantum wires (1D) or an incoming electron and a
//! trapped one (2D) are propagated with Crank–Nicolson schemes; at sampled
//! times the pair amplitude is embedded in a spin-resolved Slater coefficient
//! matrix W whose reduced density gives the von Neumann entropy.

pub mod config;
pub mod entanglement;
pub mod error;
pub mod grid;
pub mod propagate;
pub mod runner;
pub mod slater;
pub mod states;
pub mod units;

pub use config::{Geometry, GridSpec, OutputSpec, Precision, SimulationConfig, SolverMode, SpinConfig, Trap};
pub use entanglement::{evaluate, EntropyResult, SchmidtSpectrum};
pub use error::{Error, Result};
pub use grid::{Grid1D, Grid2D, Vec2};
pub use slater::{assemble_w, assemble_w_2d, SlaterMatrix};
pub use states::{TwoParticleField, WavepacketSpec};
pub use units::Material;
