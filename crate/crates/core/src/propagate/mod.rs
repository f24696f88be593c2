//! Crank–Nicolson time evolution with conservation diagnostics.

mod brute4d;
pub mod checkpoint;
mod field2d;
mod pair1d;
pub(crate) mod tridiag;

pub use brute4d::{brute_force_4d_step, BruteForce4D, FullPair2D, BRUTE_FORCE_MAX_POINTS};
pub use field2d::{
    reconstruct_pair_2d, reconstructed_norm, step_2d, FieldOperator2D, FieldPropagator2D, Hamiltonian2DFactors,
    Propagator2D,
};
pub use pair1d::{step_1d, Energies, Hamiltonian1DPair, Propagator1D, EXACT_MAX_POINTS};

use crate::error::{Error, Result};
use crate::states::TwoParticleField;

/// Largest tolerated |norm − 1| at any step.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Largest tolerated probability on the nodes next to a wall.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub norm: f64,
    /// meV
    pub total_energy: f64,
    /// meV
    pub coulomb_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorState {
    pub field: TwoParticleField,
    /// fs
    pub t: f64,
    pub step_count: u64,
    pub diagnostics: Diagnostics,
}

impl PropagatorState {
    pub fn new(field: TwoParticleField) -> Self {
        let norm = field.norm_sqr();
        PropagatorState {
            field,
            t: 0.0,
            step_count: 0,
            diagnostics: Diagnostics {
                norm,
                ..Diagnostics::default()
            },
        }
    }

    fn check_norm(&self) -> Result<()> {
        let drift = (self.diagnostics.norm - 1.0).abs();
        if drift > NORM_TOLERANCE || !drift.is_finite() {
            return Err(Error::NormDrift {
                step: self.step_count,
                drift,
            });
        }
        Ok(())
    }

    fn check_norm_factors(&self, a: f64, b: f64) -> Result<()> {
        let drift = (a - 1.0).abs().max((b - 1.0).abs());
        if drift > NORM_TOLERANCE || !drift.is_finite() {
            return Err(Error::NormDrift {
                step: self.step_count,
                drift,
            });
        }
        Ok(())
    }
}

/// Either propagator, chosen by geometry.
#[derive(Debug, Clone)]
pub enum Propagator {
    Pair1D(Propagator1D),
    Factorized2D(Propagator2D),
}

impl Propagator {
    pub fn dt(&self) -> f64 {
        match self {
            Propagator::Pair1D(p) => p.dt(),
            Propagator::Factorized2D(p) => p.dt(),
        }
    }

    pub fn step(&self, state: &mut PropagatorState) -> Result<()> {
        match self {
            Propagator::Pair1D(p) => step_1d(state, p),
            Propagator::Factorized2D(p) => step_2d(state, p),
        }
    }

    pub fn diagnostics(&self, field: &TwoParticleField) -> Result<Diagnostics> {
        match (self, field) {
            (Propagator::Pair1D(p), TwoParticleField::Pair1D(f)) => Ok(p.diagnostics(f)),
            (Propagator::Factorized2D(p), TwoParticleField::Factorized2D(f)) => Ok(p.hamiltonian().diagnostics(f)),
            _ => Err(Error::GridMismatch("field kind does not match the propagator".into())),
        }
    }

    pub fn boundary_probability(&self, field: &TwoParticleField) -> Result<f64> {
        match (self, field) {
            (Propagator::Pair1D(p), TwoParticleField::Pair1D(f)) => Ok(p.hamiltonian().boundary_probability(&f.amp)),
            (Propagator::Factorized2D(p), TwoParticleField::Factorized2D(f)) => {
                Ok(p.hamiltonian().boundary_probability(f))
            }
            _ => Err(Error::GridMismatch("field kind does not match the propagator".into())),
        }
    }

    pub fn check_accuracy(&self, field: &TwoParticleField) -> bool {
        match (self, field) {
            (Propagator::Pair1D(p), TwoParticleField::Pair1D(f)) => p.check_accuracy(&f.amp),
            (Propagator::Factorized2D(p), TwoParticleField::Factorized2D(f)) => p.check_accuracy(f),
            _ => true,
        }
    }
}
