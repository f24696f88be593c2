//! Units and material constants.
//!
//! Everything in the crate is expressed in nanometres, femtoseconds and
//! millielectronvolts. Derived constants are computed from the CODATA values
//! below rather than stored, so there is a single source of truth.

use crate::error::{Error, Result};

/// Reduced Planck constant in meV·fs.
pub const HBAR: f64 = 658.211_956_9;

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// Electron rest energy in eV.
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.950_00;

/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// e²/(4πϵ₀) in meV·nm.
pub fn vacuum_coulomb_constant() -> f64 {
    FINE_STRUCTURE * HBAR_C_EV_NM * 1.0e3
}

/// ħ²/(2mₑ) in meV·nm² for the bare electron mass.
pub fn free_electron_kinetic_scale() -> f64 {
    HBAR_C_EV_NM * HBAR_C_EV_NM / (2.0 * ELECTRON_REST_ENERGY_EV) * 1.0e3
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    name: String,
    effective_mass: f64,
    relative_permittivity: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, effective_mass: f64, relative_permittivity: f64) -> Result<Self> {
        if !(effective_mass > 0.0 && effective_mass.is_finite()) {
            return Err(Error::config("effective_mass", format!("must be > 0, got {effective_mass}")));
        }
        if !(relative_permittivity >= 1.0 && relative_permittivity.is_finite()) {
            return Err(Error::config(
                "relative_permittivity",
                format!("must be >= 1, got {relative_permittivity}"),
            ));
        }
        let name = name.into();
        if name.is_empty() || name.contains(['\n', '#', '=']) {
            return Err(Error::config("material", "name must be a non-empty single token"));
        }
        Ok(Material {
            name,
            effective_mass,
            relative_permittivity,
        })
    }

    /// Silicon with the transverse effective mass.
    pub fn silicon() -> Self {
        Material::new("Si", 0.19, 11.7).unwrap()
    }

    pub fn gallium_arsenide() -> Self {
        Material::new("GaAs", 0.067, 12.9).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn effective_mass(&self) -> f64 {
        self.effective_mass
    }

    pub fn relative_permittivity(&self) -> f64 {
        self.relative_permittivity
    }

    /// e²/(4πϵ₀ϵ_r) in meV·nm.
    pub fn coulomb_prefactor(&self) -> f64 {
        vacuum_coulomb_constant() / self.relative_permittivity
    }

    /// ħ²/(2m) in meV·nm².
    pub fn kinetic_scale(&self) -> f64 {
        free_electron_kinetic_scale() / self.effective_mass
    }

    /// Wavevector (1/nm) of a particle with the given kinetic energy.
    pub fn wavevector(&self, kinetic_energy: f64) -> f64 {
        (kinetic_energy / self.kinetic_scale()).sqrt()
    }
}

pub fn coulomb_prefactor(material: &Material) -> f64 {
    material.coulomb_prefactor()
}

pub fn kinetic_scale(material: &Material) -> f64 {
    material.kinetic_scale()
}

/// Oscillator length sqrt(ħ/(mω)) for a particle of mass `mass_factor`·m.
pub fn oscillator_length(material: &Material, omega_energy: f64, mass_factor: f64) -> f64 {
    // ħ/(mω) = ħ²/(m·ħω) = 2·(ħ²/2m)/ħω
    (2.0 * material.kinetic_scale() / (mass_factor * omega_energy)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materials_reject_unphysical_values() {
        assert!(Material::new("x", 0.0, 2.0).is_err());
        assert!(Material::new("x", 1.0, 0.5).is_err());
        let err = Material::new("x", -1.0, 2.0).unwrap_err().to_string();
        assert!(err.contains("effective_mass"), "{err}");
    }

    #[test]
    fn wavevector_inverts_kinetic_energy() {
        let si = Material::silicon();
        let k = si.wavevector(50.0);
        assert!((si.kinetic_scale() * k * k - 50.0).abs() < 1e-12);
    }
}
