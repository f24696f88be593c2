//! Simulation configuration and its flat `key = value` text form.
//!
//! Keys map one-to-one onto [`SimulationConfig`] fields. Keys that do not
//! apply to the chosen geometry are rejected just like unknown ones, so a file
//! always describes exactly one run.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, Vec2};
use crate::states::WavepacketSpec;
use crate::units::{oscillator_length, Material};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinConfig {
    SameSpin,
    OppositeNonFactorizable,
    Singlet,
    Triplet,
}

impl SpinConfig {
    pub const ALL: [SpinConfig; 4] = [
        SpinConfig::SameSpin,
        SpinConfig::OppositeNonFactorizable,
        SpinConfig::Singlet,
        SpinConfig::Triplet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpinConfig::SameSpin => "same_spin",
            SpinConfig::OppositeNonFactorizable => "opposite_nonfactorizable",
            SpinConfig::Singlet => "singlet",
            SpinConfig::Triplet => "triplet",
        }
    }

    pub fn allowed_in_2d(self) -> bool {
        matches!(self, SpinConfig::SameSpin | SpinConfig::Triplet)
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpinConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SpinConfig::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::config("spin", format!("unknown spin configuration `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trap {
    /// Level spacing ħω in meV.
    pub omega_energy: f64,
    pub center: Vec2,
}

impl Trap {
    /// sqrt(ħ/(2mω)): width of the single-particle ground state.
    pub fn ground_sigma(&self, material: &Material) -> f64 {
        oscillator_length(material, self.omega_energy, 1.0) / std::f64::consts::SQRT_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Two parallel wires at distance `wire_distance` (nm).
    Wires1D { wire_distance: f64 },
    Trap2D(Trap),
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Wires1D { .. } => "wires1d",
            Geometry::Trap2D(_) => "trap2d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    OneD(Grid1D),
    TwoD(Grid2D),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Strang splitting with per-axis Crank–Nicolson sweeps.
    Adi,
    /// Full Crank–Nicolson on the tensor grid via banded LU (small grids only).
    Exact,
}

impl SolverMode {
    fn as_str(self) -> &'static str {
        match self {
            SolverMode::Adi => "adi",
            SolverMode::Exact => "exact",
        }
    }
}

impl FromStr for SolverMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adi" => Ok(SolverMode::Adi),
            "exact" => Ok(SolverMode::Exact),
            _ => Err(Error::config("solver", format!("expected `adi` or `exact`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Complex64,
    Complex128,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Complex64 => "complex64",
            Precision::Complex128 => "complex128",
        }
    }
}

impl FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex64" => Ok(Precision::Complex64),
            "complex128" => Ok(Precision::Complex128),
            _ => Err(Error::config(
                "checkpoint_precision",
                format!("expected `complex64` or `complex128`, got `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// Write a checkpoint of the final state.
    pub checkpoint: bool,
    pub checkpoint_precision: Precision,
    /// Also trace the distinguishable-particle Schmidt entropy (1D only).
    pub distinguishable: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            checkpoint: true,
            checkpoint_precision: Precision::Complex128,
            distinguishable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: Geometry,
    pub material: Material,
    pub grid: GridSpec,
    /// Two packets (1D: particle a then b) or one incoming packet (2D).
    pub packets: Vec<WavepacketSpec>,
    pub spin: SpinConfig,
    /// Time step in fs.
    pub dt: f64,
    pub t_end: f64,
    /// Evaluate the entropy every this many steps.
    pub entropy_stride: usize,
    /// Softening length of the 2D Coulomb term, nm.
    pub coulomb_softening: f64,
    pub coulomb_enabled: bool,
    pub solver: SolverMode,
    /// CM grid cells per half particle-grid spacing (2D).
    pub cm_refine: usize,
    /// Relative grid cells per particle-grid spacing (2D).
    pub rel_refine: usize,
    pub plateau_window: f64,
    pub plateau_tol: f64,
    pub output: OutputSpec,
}

/// Separation of the two 1D packet centres.
pub fn default_separation(sigma: f64) -> f64 {
    (10.0 * sigma).max(300.0)
}

/// Half-width of a 1D domain that keeps both counter-propagating packets at
/// least 5σ(t) from the walls until `t_end`, and 6σ at the start (where the
/// wall-adjacent probability is checked before any spreading).
pub fn wires_half_extent(material: &Material, sigma: f64, kinetic_energy: f64, t_end: f64) -> f64 {
    let kappa = material.kinetic_scale();
    let velocity = 2.0 * kappa * material.wavevector(kinetic_energy) / crate::units::HBAR;
    let spread = |t: f64| sigma * (1.0 + (kappa * t / (crate::units::HBAR * sigma * sigma)).powi(2)).sqrt();
    let start = 0.5 * default_separation(sigma);
    let end = (start - velocity * t_end).abs();
    // A little extra room for the energy exchanged in the collision.
    (start + 6.0 * sigma).max(1.05 * end + 5.0 * spread(t_end))
}

impl SimulationConfig {
    /// Two counter-propagating packets in parallel wires, with the domain
    /// sized for `t_end`.
    pub fn wires(
        material: Material,
        wire_distance: f64,
        n_points: usize,
        sigma: f64,
        kinetic_energy: f64,
        t_end: f64,
    ) -> Result<Self> {
        let half = wires_half_extent(&material, sigma, kinetic_energy, t_end);
        let grid = Grid1D::new(n_points, -half, half)?;
        let offset = 0.5 * default_separation(sigma);
        let packets = vec![
            WavepacketSpec::new(Vec2::new(grid.midpoint() - offset, 0.0), sigma, kinetic_energy, Vec2::new(1.0, 0.0)),
            WavepacketSpec::new(Vec2::new(grid.midpoint() + offset, 0.0), sigma, kinetic_energy, Vec2::new(-1.0, 0.0)),
        ];
        let cfg = SimulationConfig {
            geometry: Geometry::Wires1D { wire_distance },
            material,
            grid: GridSpec::OneD(grid),
            packets,
            spin: SpinConfig::SameSpin,
            dt: 0.2,
            t_end,
            entropy_stride: 50,
            coulomb_softening: 1.0,
            coulomb_enabled: true,
            solver: SolverMode::Adi,
            cm_refine: 1,
            rel_refine: 1,
            plateau_window: 200.0,
            plateau_tol: 1e-3,
            output: OutputSpec::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Silicon wires, d = 0.5 nm, σ = 20 nm, 50 meV, N = 512, 2 ps.
    pub fn wires_default() -> Self {
        SimulationConfig::wires(Material::silicon(), 0.5, 512, 20.0, 50.0, 2000.0).unwrap()
    }

    /// Electron incident on a GaAs harmonic trap (ħω = 2 meV centred at
    /// (100, 100) nm), N = 48 per axis.
    pub fn trap(kinetic_energy: f64, n_points: usize) -> Result<Self> {
        let material = Material::gallium_arsenide();
        let trap = Trap {
            omega_energy: 2.0,
            center: Vec2::new(100.0, 100.0),
        };
        let sigma = trap.ground_sigma(&material);
        let start = trap.center + Vec2::new(100.0, 0.0);
        let grid = Grid2D::new(
            Grid1D::new(n_points, trap.center.x - 218.0, trap.center.x + 150.0)?,
            Grid1D::new(n_points, trap.center.y - 184.0, trap.center.y + 184.0)?,
        );
        let cfg = SimulationConfig {
            geometry: Geometry::Trap2D(trap),
            material,
            grid: GridSpec::TwoD(grid),
            packets: vec![WavepacketSpec::new(start, sigma, kinetic_energy, Vec2::new(-1.0, 0.0))],
            spin: SpinConfig::SameSpin,
            dt: 0.25,
            t_end: 600.0,
            entropy_stride: 40,
            coulomb_softening: 1.0,
            coulomb_enabled: true,
            solver: SolverMode::Adi,
            cm_refine: 4,
            rel_refine: 4,
            plateau_window: 200.0,
            plateau_tol: 1e-3,
            output: OutputSpec::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn trap_default() -> Self {
        SimulationConfig::trap(20.0, 48).unwrap()
    }

    pub fn n_steps(&self) -> u64 {
        (self.t_end / self.dt - 1e-9).ceil() as u64
    }

    pub fn grid_1d(&self) -> Result<Grid1D> {
        match self.grid {
            GridSpec::OneD(g) => Ok(g),
            GridSpec::TwoD(_) => Err(Error::GridMismatch("expected a 1D grid".into())),
        }
    }

    pub fn grid_2d(&self) -> Result<Grid2D> {
        match self.grid {
            GridSpec::TwoD(g) => Ok(g),
            GridSpec::OneD(_) => Err(Error::GridMismatch("expected a 2D grid".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be > 0, got {v}")))
            }
        };
        positive("dt_fs", self.dt)?;
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::config("t_end_fs", format!("must be >= dt, got {}", self.t_end)));
        }
        if self.entropy_stride < 1 {
            return Err(Error::config("entropy_stride", "must be >= 1"));
        }
        positive("plateau_window_fs", self.plateau_window)?;
        if !(self.plateau_tol > 0.0 && self.plateau_tol < 1.0) {
            return Err(Error::config("plateau_tol_nats", "must lie in (0, 1)"));
        }
        for (name, p) in ["packet_a", "packet_b"].iter().zip(&self.packets) {
            p.validate().map_err(|e| match e {
                Error::InvalidConfig { field, reason } => Error::config(format!("{name}_{field}"), reason),
                e => e,
            })?;
        }
        match self.geometry {
            Geometry::Wires1D { wire_distance } => {
                positive("wire_distance_nm", wire_distance)?;
                if !matches!(self.grid, GridSpec::OneD(_)) {
                    return Err(Error::config("grid", "wires1d needs a 1D grid"));
                }
                if self.packets.len() != 2 {
                    return Err(Error::config("packet_b", "wires1d needs exactly two packets"));
                }
            }
            Geometry::Trap2D(trap) => {
                positive("trap_energy_meV", trap.omega_energy)?;
                if !(trap.center.x.is_finite() && trap.center.y.is_finite()) {
                    return Err(Error::config("trap_center_nm", "must be finite"));
                }
                positive("coulomb_softening_nm", self.coulomb_softening)?;
                if !matches!(self.grid, GridSpec::TwoD(_)) {
                    return Err(Error::config("grid", "trap2d needs a 2D grid"));
                }
                if self.packets.len() != 1 {
                    return Err(Error::config("packet_b", "trap2d takes exactly one incoming packet"));
                }
                if !self.spin.allowed_in_2d() {
                    return Err(Error::UnsupportedSpin(self.spin.to_string()));
                }
                if self.solver != SolverMode::Adi {
                    return Err(Error::config("solver", "trap2d supports only `adi`"));
                }
                if self.cm_refine < 1 {
                    return Err(Error::config("cm_refine", "must be >= 1"));
                }
                if self.rel_refine < 1 {
                    return Err(Error::config("rel_refine", "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("geometry", &self.geometry.name());
        match self.geometry {
            Geometry::Wires1D { wire_distance } => kv("wire_distance_nm", &wire_distance),
            Geometry::Trap2D(t) => {
                kv("trap_energy_meV", &t.omega_energy);
                kv("trap_center_nm", &t.center);
            }
        }
        kv("material", &self.material.name());
        kv("effective_mass", &self.material.effective_mass());
        kv("relative_permittivity", &self.material.relative_permittivity());
        let mut axis = |name: &str, g: &Grid1D| {
            kv(&format!("grid_{name}_points"), &g.len());
            kv(&format!("grid_{name}_min_nm"), &g.x_min());
            kv(&format!("grid_{name}_max_nm"), &g.x_max());
        };
        match &self.grid {
            GridSpec::OneD(g) => axis("x", g),
            GridSpec::TwoD(g) => {
                axis("x", &g.x);
                axis("y", &g.y);
            }
        }
        let one_d = matches!(self.geometry, Geometry::Wires1D { .. });
        for (name, p) in ["packet_a", "packet_b"].iter().zip(&self.packets) {
            if one_d {
                kv(&format!("{name}_center_nm"), &p.center.x);
                kv(&format!("{name}_direction"), &p.direction.x);
            } else {
                kv(&format!("{name}_center_nm"), &p.center);
                kv(&format!("{name}_direction"), &p.direction);
            }
            kv(&format!("{name}_sigma_nm"), &p.sigma);
            kv(&format!("{name}_energy_meV"), &p.kinetic_energy);
        }
        kv("spin", &self.spin);
        kv("dt_fs", &self.dt);
        kv("t_end_fs", &self.t_end);
        kv("entropy_stride", &self.entropy_stride);
        kv("coulomb", &self.coulomb_enabled);
        if one_d {
            kv("solver", &self.solver.as_str());
        } else {
            kv("coulomb_softening_nm", &self.coulomb_softening);
            kv("cm_refine", &self.cm_refine);
            kv("rel_refine", &self.rel_refine);
        }
        kv("plateau_window_fs", &self.plateau_window);
        kv("plateau_tol_nats", &self.plateau_tol);
        kv("checkpoint", &self.output.checkpoint);
        kv("checkpoint_precision", &self.output.checkpoint_precision.as_str());
        if one_d {
            kv("distinguishable", &self.output.distinguishable);
        }
        out
    }
}

const COMMON_KEYS: &[&str] = &[
    "geometry",
    "material",
    "effective_mass",
    "relative_permittivity",
    "grid_x_points",
    "grid_x_min_nm",
    "grid_x_max_nm",
    "packet_a_center_nm",
    "packet_a_direction",
    "packet_a_sigma_nm",
    "packet_a_energy_meV",
    "spin",
    "dt_fs",
    "t_end_fs",
    "entropy_stride",
    "coulomb",
    "plateau_window_fs",
    "plateau_tol_nats",
    "checkpoint",
    "checkpoint_precision",
];

const WIRES_KEYS: &[&str] = &[
    "wire_distance_nm",
    "packet_b_center_nm",
    "packet_b_direction",
    "packet_b_sigma_nm",
    "packet_b_energy_meV",
    "solver",
    "distinguishable",
];

const TRAP_KEYS: &[&str] = &[
    "trap_energy_meV",
    "trap_center_nm",
    "grid_y_points",
    "grid_y_min_nm",
    "grid_y_max_nm",
    "coulomb_softening_nm",
    "cm_refine",
    "rel_refine",
];

struct Entries {
    items: Vec<(String, String, usize)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.items.iter().position(|(k, _, _)| k == key)?;
        let (_, v, line) = self.items.remove(pos);
        Some((v, line))
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<T>().map(Some).map_err(|e| Error::Parse {
                line,
                reason: format!("`{key}`: cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn vec2(&mut self, key: &str) -> Result<Option<Vec2>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                let parts: Vec<_> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
                match parts.as_slice() {
                    [Ok(x), Ok(y)] => Ok(Some(Vec2::new(*x, *y))),
                    _ => Err(Error::Parse {
                        line,
                        reason: format!("`{key}`: expected `x, y`, got `{v}`"),
                    }),
                }
            }
        }
    }
}

/// Parses a bool written as `true/false` or `on/off`.
struct Flag(bool);

impl FromStr for Flag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "true" | "on" => Ok(Flag(true)),
            "false" | "off" => Ok(Flag(false)),
            _ => Err("expected true/false".into()),
        }
    }
}

impl FromStr for SimulationConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Entries { items: Vec::new() };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                reason: format!("expected `key = value`, got `{body}`"),
            })?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if entries.items.iter().any(|(e, _, _)| *e == k) {
                return Err(Error::Parse {
                    line,
                    reason: format!("duplicate key `{k}`"),
                });
            }
            entries.items.push((k, v, line));
        }

        let geometry: String = entries
            .parse("geometry")?
            .ok_or_else(|| Error::config("geometry", "missing (wires1d or trap2d)"))?;
        let (mut cfg, specific) = match geometry.as_str() {
            "wires1d" => (SimulationConfig::wires_default(), WIRES_KEYS),
            "trap2d" => (SimulationConfig::trap_default(), TRAP_KEYS),
            other => return Err(Error::config("geometry", format!("unknown geometry `{other}`"))),
        };
        for (k, _, line) in &entries.items {
            if !COMMON_KEYS.contains(&k.as_str()) && !specific.contains(&k.as_str()) {
                let reason = if WIRES_KEYS.contains(&k.as_str()) || TRAP_KEYS.contains(&k.as_str()) {
                    format!("key `{k}` does not apply to geometry `{geometry}`")
                } else {
                    format!("unknown key `{k}`")
                };
                return Err(Error::Parse { line: *line, reason });
            }
        }

        let one_d = geometry == "wires1d";
        match &mut cfg.geometry {
            Geometry::Wires1D { wire_distance } => {
                if let Some(d) = entries.parse("wire_distance_nm")? {
                    *wire_distance = d;
                }
            }
            Geometry::Trap2D(trap) => {
                if let Some(e) = entries.parse("trap_energy_meV")? {
                    trap.omega_energy = e;
                }
                if let Some(c) = entries.vec2("trap_center_nm")? {
                    trap.center = c;
                }
            }
        }

        let name: Option<String> = entries.parse("material")?;
        let mass: Option<f64> = entries.parse("effective_mass")?;
        let eps: Option<f64> = entries.parse("relative_permittivity")?;
        if name.is_some() || mass.is_some() || eps.is_some() {
            let base = match name.as_deref() {
                Some("Si") => Material::silicon(),
                Some("GaAs") => Material::gallium_arsenide(),
                _ => cfg.material.clone(),
            };
            cfg.material = Material::new(
                name.unwrap_or_else(|| base.name().to_string()),
                mass.unwrap_or(base.effective_mass()),
                eps.unwrap_or(base.relative_permittivity()),
            )?;
        }

        let axis = |entries: &mut Entries, name: &str, g: Grid1D| -> Result<Grid1D> {
            let n = entries.parse(&format!("grid_{name}_points"))?.unwrap_or(g.len());
            let lo = entries.parse(&format!("grid_{name}_min_nm"))?.unwrap_or(g.x_min());
            let hi = entries.parse(&format!("grid_{name}_max_nm"))?.unwrap_or(g.x_max());
            Grid1D::new(n, lo, hi).map_err(|e| match e {
                Error::InvalidConfig { reason, .. } => Error::config(format!("grid_{name}"), reason),
                e => e,
            })
        };
        cfg.grid = match cfg.grid {
            GridSpec::OneD(g) => GridSpec::OneD(axis(&mut entries, "x", g)?),
            GridSpec::TwoD(g) => {
                let x = axis(&mut entries, "x", g.x)?;
                let y = axis(&mut entries, "y", g.y)?;
                GridSpec::TwoD(Grid2D::new(x, y))
            }
        };

        for (name, p) in ["packet_a", "packet_b"].iter().zip(cfg.packets.iter_mut()) {
            if one_d {
                if let Some(c) = entries.parse(&format!("{name}_center_nm"))? {
                    p.center = Vec2::new(c, 0.0);
                }
                if let Some(d) = entries.parse(&format!("{name}_direction"))? {
                    p.direction = Vec2::new(d, 0.0);
                }
            } else {
                if let Some(c) = entries.vec2(&format!("{name}_center_nm"))? {
                    p.center = c;
                }
                if let Some(d) = entries.vec2(&format!("{name}_direction"))? {
                    p.direction = d;
                }
            }
            if let Some(s) = entries.parse(&format!("{name}_sigma_nm"))? {
                p.sigma = s;
            }
            if let Some(e) = entries.parse(&format!("{name}_energy_meV"))? {
                p.kinetic_energy = e;
            }
        }

        if let Some(s) = entries.parse("spin")? {
            cfg.spin = s;
        }
        if let Some(v) = entries.parse("dt_fs")? {
            cfg.dt = v;
        }
        if let Some(v) = entries.parse("t_end_fs")? {
            cfg.t_end = v;
        }
        if let Some(v) = entries.parse("entropy_stride")? {
            cfg.entropy_stride = v;
        }
        if let Some(Flag(v)) = entries.parse("coulomb")? {
            cfg.coulomb_enabled = v;
        }
        if let Some(v) = entries.parse("solver")? {
            cfg.solver = v;
        }
        if let Some(v) = entries.parse("coulomb_softening_nm")? {
            cfg.coulomb_softening = v;
        }
        if let Some(v) = entries.parse("cm_refine")? {
            cfg.cm_refine = v;
        }
        if let Some(v) = entries.parse("rel_refine")? {
            cfg.rel_refine = v;
        }
        if let Some(v) = entries.parse("plateau_window_fs")? {
            cfg.plateau_window = v;
        }
        if let Some(v) = entries.parse("plateau_tol_nats")? {
            cfg.plateau_tol = v;
        }
        if let Some(Flag(v)) = entries.parse("checkpoint")? {
            cfg.output.checkpoint = v;
        }
        if let Some(v) = entries.parse("checkpoint_precision")? {
            cfg.output.checkpoint_precision = v;
        }
        if let Some(Flag(v)) = entries.parse("distinguishable")? {
            cfg.output.distinguishable = v;
        }
        debug_assert!(entries.items.is_empty(), "unconsumed keys: {:?}", entries.items);

        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SimulationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
