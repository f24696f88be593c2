//! Initial single- and two-particle wavefunctions.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64 as C64;

use crate::config::Trap;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, Vec2};
use crate::units::{oscillator_length, Material};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    /// Packet centre (1D packets use only `x`).
    pub center: Vec2,
    /// Position spread σ in nm.
    pub sigma: f64,
    /// Kinetic energy E_k in meV.
    pub kinetic_energy: f64,
    /// Unit propagation direction; `(±1, 0)` in 1D.
    pub direction: Vec2,
}

impl WavepacketSpec {
    pub fn new(center: Vec2, sigma: f64, kinetic_energy: f64, direction: Vec2) -> Self {
        WavepacketSpec {
            center,
            sigma,
            kinetic_energy,
            direction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config("sigma", format!("must be > 0, got {}", self.sigma)));
        }
        if !(self.kinetic_energy >= 0.0 && self.kinetic_energy.is_finite()) {
            return Err(Error::config("energy", format!("must be >= 0, got {}", self.kinetic_energy)));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::config("center", "must be finite"));
        }
        if (self.direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::config("direction", format!("must be a unit vector, got ({})", self.direction)));
        }
        Ok(())
    }

    /// Wavevector k·direction in 1/nm.
    pub fn wavevector(&self, material: &Material) -> Vec2 {
        self.direction * material.wavevector(self.kinetic_energy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1D,
    pub amp: Array1<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    /// Indexed `[ix, iy]`.
    pub amp: Array2<C64>,
}

/// Two particles on one wire-coordinate grid: `amp[[l, m]] = Φ(x_l, x_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairField1D {
    pub grid: Grid1D,
    pub amp: Array2<C64>,
}

/// Two particles in the plane stored as centre-of-mass and relative factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedField2D {
    pub cm: Field2D,
    pub rel: Field2D,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TwoParticleField {
    Pair1D(PairField1D),
    Factorized2D(FactorizedField2D),
}

pub(crate) fn sum_norm_sqr<'a>(values: impl IntoIterator<Item = &'a C64>) -> f64 {
    values.into_iter().map(|z| z.norm_sqr()).sum()
}

impl Field1D {
    pub fn norm_sqr(&self) -> f64 {
        sum_norm_sqr(&self.amp) * self.grid.spacing()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Degenerate("zero single-particle field".into()));
        }
        self.amp.mapv_inplace(|z| z / n.sqrt());
        Ok(())
    }

    /// Mean and variance of |ψ|².
    pub fn position_moments(&self) -> (f64, f64) {
        let h = self.grid.spacing();
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (i, z) in self.amp.iter().enumerate() {
            let p = z.norm_sqr() * h;
            let x = self.grid.coordinate(i);
            m0 += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / m0;
        (mean, m2 / m0 - mean * mean)
    }
}

impl Field2D {
    pub fn norm_sqr(&self) -> f64 {
        sum_norm_sqr(&self.amp) * self.grid.cell_area()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Degenerate("zero single-particle field".into()));
        }
        self.amp.mapv_inplace(|z| z / n.sqrt());
        Ok(())
    }

    /// Mean position and per-axis variances of |ψ|².
    pub fn position_moments(&self) -> (Vec2, Vec2) {
        let (mut m0, mut mx, mut my, mut mxx, mut myy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((i, j), z) in self.amp.indexed_iter() {
            let p = z.norm_sqr();
            let r = self.grid.point(i, j);
            m0 += p;
            mx += p * r.x;
            my += p * r.y;
            mxx += p * r.x * r.x;
            myy += p * r.y * r.y;
        }
        let mean = Vec2::new(mx / m0, my / m0);
        (mean, Vec2::new(mxx / m0 - mean.x * mean.x, myy / m0 - mean.y * mean.y))
    }
}

impl PairField1D {
    pub fn norm_sqr(&self) -> f64 {
        let h = self.grid.spacing();
        sum_norm_sqr(&self.amp) * h * h
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Degenerate("zero pair amplitude".into()));
        }
        self.amp.mapv_inplace(|z| z / n.sqrt());
        Ok(())
    }
}

impl TwoParticleField {
    /// Norm (squared) of the pair amplitude, or the product of both factor
    /// norms in the factorized case.
    pub fn norm_sqr(&self) -> f64 {
        match self {
            TwoParticleField::Pair1D(p) => p.norm_sqr(),
            TwoParticleField::Factorized2D(f) => f.cm.norm_sqr() * f.rel.norm_sqr(),
        }
    }

    /// Largest deviation of any stored factor's norm from one.
    pub fn norm_drift(&self) -> f64 {
        match self {
            TwoParticleField::Pair1D(p) => (p.norm_sqr() - 1.0).abs(),
            TwoParticleField::Factorized2D(f) => (f.cm.norm_sqr() - 1.0).abs().max((f.rel.norm_sqr() - 1.0).abs()),
        }
    }
}

fn packet_value(x: f64, center: f64, sigma: f64, k: f64) -> C64 {
    let dx = x - center;
    C64::from_polar((-dx * dx / (4.0 * sigma * sigma)).exp(), k * dx)
}

fn check_resolvable(sigma: f64, spacing: f64) -> Result<()> {
    if sigma < 2.0 * spacing {
        Err(Error::UnresolvablePacket { sigma, spacing })
    } else {
        Ok(())
    }
}

/// Minimum-uncertainty packet exp(−(x−x₀)²/4σ² + ikx), unit discrete norm.
pub fn gaussian_1d(grid: &Grid1D, spec: &WavepacketSpec, material: &Material) -> Result<Field1D> {
    spec.validate()?;
    check_resolvable(spec.sigma, grid.spacing())?;
    let x0 = spec.center.x;
    if x0 - grid.x_min() < 5.0 * spec.sigma || grid.x_max() - x0 < 5.0 * spec.sigma {
        log::warn!(
            "packet at {x0} nm with sigma {} nm is closer than 5 sigma to the domain edge [{}, {}]",
            spec.sigma,
            grid.x_min(),
            grid.x_max()
        );
    }
    let k = spec.wavevector(material).x;
    let n = grid.len();
    let amp = Array1::from_shape_fn(n, |i| {
        if i == 0 || i == n - 1 {
            C64::new(0.0, 0.0)
        } else {
            packet_value(grid.coordinate(i), x0, spec.sigma, k)
        }
    });
    let mut field = Field1D { grid: *grid, amp };
    field.normalize()?;
    Ok(field)
}

/// Gaussian of spread `sigma` (per axis) with plane-wave factor `k`.
pub(crate) fn gaussian_2d_raw(grid: &Grid2D, center: Vec2, sigma: f64, k: Vec2) -> Result<Field2D> {
    check_resolvable(sigma, grid.max_spacing())?;
    let (nx, ny) = grid.shape();
    let px: Vec<C64> = (0..nx)
        .map(|i| {
            if i == 0 || i == nx - 1 {
                C64::new(0.0, 0.0)
            } else {
                packet_value(grid.x.coordinate(i), center.x, sigma, k.x)
            }
        })
        .collect();
    let py: Vec<C64> = (0..ny)
        .map(|j| {
            if j == 0 || j == ny - 1 {
                C64::new(0.0, 0.0)
            } else {
                packet_value(grid.y.coordinate(j), center.y, sigma, k.y)
            }
        })
        .collect();
    let amp = Array2::from_shape_fn((nx, ny), |(i, j)| px[i] * py[j]);
    let mut field = Field2D { grid: *grid, amp };
    field.normalize()?;
    Ok(field)
}

pub fn gaussian_2d(grid: &Grid2D, spec: &WavepacketSpec, material: &Material) -> Result<Field2D> {
    spec.validate()?;
    let c = spec.center;
    let margin = 5.0 * spec.sigma;
    if c.x - grid.x.x_min() < margin
        || grid.x.x_max() - c.x < margin
        || c.y - grid.y.x_min() < margin
        || grid.y.x_max() - c.y < margin
    {
        log::warn!("packet at ({c}) nm is closer than 5 sigma to the domain edge");
    }
    gaussian_2d_raw(grid, c, spec.sigma, spec.wavevector(material))
}

/// Ground state of the isotropic trap for a particle of mass `mass_factor`·m.
pub fn harmonic_ground_2d_mass(grid: &Grid2D, trap: &Trap, material: &Material, mass_factor: f64) -> Result<Field2D> {
    let l = oscillator_length(material, trap.omega_energy, mass_factor);
    if l < 3.0 * grid.max_spacing() {
        return Err(Error::TrapResolution(format!(
            "oscillator length {l:.3} nm is below 3 grid spacings ({:.3} nm)",
            3.0 * grid.max_spacing()
        )));
    }
    let extent = grid.x.extent().min(grid.y.extent());
    if l > extent / 8.0 {
        return Err(Error::TrapResolution(format!(
            "oscillator length {l:.3} nm exceeds 1/8 of the domain ({extent:.3} nm)"
        )));
    }
    // |ψ|² has spread l/√2 per axis.
    gaussian_2d_raw(grid, trap.center, l / std::f64::consts::SQRT_2, Vec2::default())
}

/// Ground state exp(−mω(r−r₀)²/2ħ) of the single-particle trap.
pub fn harmonic_ground_2d(grid: &Grid2D, trap: &Trap, material: &Material) -> Result<Field2D> {
    harmonic_ground_2d_mass(grid, trap, material, 1.0)
}

/// Φ(x_l, x_m) = ψ(x_l)·φ(x_m), normalized.
///
/// Warns when the initial Coulomb energy of the pair in wires `wire_distance`
/// apart is not negligible (over 1% of the kinetic energy).
pub fn assemble_pair_1d(psi: &Field1D, phi: &Field1D, material: &Material, wire_distance: f64) -> Result<PairField1D> {
    if psi.grid != phi.grid {
        return Err(Error::GridMismatch("psi and phi live on different grids".into()));
    }
    let n = psi.grid.len();
    let amp = Array2::from_shape_fn((n, n), |(l, m)| psi.amp[l] * phi.amp[m]);
    let mut pair = PairField1D { grid: psi.grid, amp };
    pair.normalize()?;

    let kinetic = kinetic_energy_1d(psi, material) + kinetic_energy_1d(phi, material);
    let coulomb = pair_coulomb_energy(&pair, material, wire_distance);
    if coulomb >= 0.01 * kinetic {
        log::warn!(
            "initial Coulomb energy {coulomb:.4} meV is not negligible against the kinetic energy {kinetic:.4} meV"
        );
    }
    Ok(pair)
}

/// ⟨T⟩ of a single-particle field with the three-point stencil, meV.
pub fn kinetic_energy_1d(field: &Field1D, material: &Material) -> f64 {
    let h = field.grid.spacing();
    let grad: f64 = field.amp.windows(2).into_iter().map(|w| (w[1] - w[0]).norm_sqr()).sum();
    material.kinetic_scale() * grad / (h * h) / sum_norm_sqr(&field.amp)
}

/// ⟨V⟩ of the inter-wire Coulomb term for a pair amplitude, meV.
pub fn pair_coulomb_energy(pair: &PairField1D, material: &Material, wire_distance: f64) -> f64 {
    let c = material.coulomb_prefactor();
    let xs = pair.grid.coordinates();
    let d2 = wire_distance * wire_distance;
    let mut acc = 0.0;
    for (l, row) in pair.amp.outer_iter().enumerate() {
        for (m, z) in row.iter().enumerate() {
            let dx = xs[l] - xs[m];
            acc += z.norm_sqr() * c / (dx * dx + d2).sqrt();
        }
    }
    acc / sum_norm_sqr(&pair.amp)
}

/// CM and relative grids aligned with a particle grid: every particle-grid
/// pair (r_i, r_j) maps onto exact nodes of both.
///
/// The CM grid spans the particle domain with spacing h/(2·cm_refine); the
/// relative grid spans ±(domain extent) with spacing h/rel_refine.
pub fn aligned_cm_rel_grids(particle: &Grid2D, cm_refine: usize, rel_refine: usize) -> Result<(Grid2D, Grid2D)> {
    let cm_axis = |g: &Grid1D| Grid1D::new((g.len() - 1) * 2 * cm_refine + 1, g.x_min(), g.x_max());
    let rel_axis = |g: &Grid1D| Grid1D::new(2 * (g.len() - 1) * rel_refine + 1, -g.extent(), g.extent());
    Ok((
        Grid2D::new(cm_axis(&particle.x)?, cm_axis(&particle.y)?),
        Grid2D::new(rel_axis(&particle.x)?, rel_axis(&particle.y)?),
    ))
}

/// Incoming packet plus trapped ground state, in CM/relative form.
///
/// With σ = sqrt(ħ/2mω) the product ψ(r_a)φ(r_b) factorizes exactly into a CM
/// Gaussian (spread σ/√2, centred at (r₁+r₀)/2, wavevector k) and a relative
/// Gaussian (spread √2σ, centred at r₁−r₀, wavevector k/2), with
/// r_a = R + r/2 and r_b = R − r/2.
pub fn assemble_cm_2d(
    incoming: &WavepacketSpec,
    trap: &Trap,
    material: &Material,
    cm_grid: &Grid2D,
    rel_grid: &Grid2D,
) -> Result<FactorizedField2D> {
    incoming.validate()?;
    let sigma0 = trap.ground_sigma(material);
    if ((incoming.sigma - sigma0) / sigma0).abs() > 1e-9 {
        return Err(Error::Factorization(format!(
            "incoming sigma {} nm must equal sqrt(hbar/2 m omega) = {sigma0} nm",
            incoming.sigma
        )));
    }
    let to_trap = trap.center - incoming.center;
    if incoming.kinetic_energy > 0.0 && to_trap.norm() > 0.0 {
        let cos = incoming.direction.dot(to_trap) / to_trap.norm();
        if cos < 1.0 - 1e-9 {
            return Err(Error::Factorization(format!(
                "incoming direction ({}) does not point at the trap centre",
                incoming.direction
            )));
        }
    }
    let k = incoming.wavevector(material);
    let sqrt2 = std::f64::consts::SQRT_2;
    let cm = gaussian_2d_raw(cm_grid, (incoming.center + trap.center) * 0.5, sigma0 / sqrt2, k)?;
    let rel = gaussian_2d_raw(rel_grid, incoming.center - trap.center, sigma0 * sqrt2, k * 0.5)?;
    Ok(FactorizedField2D { cm, rel })
}

/// Largest elementwise |a − b|.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let mut m = 0.0f64;
    Zip::from(a).and(b).for_each(|x, y| m = m.max((x - y).norm()));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_below_two_spacings_is_rejected() {
        let g = Grid1D::new(101, -100.0, 100.0).unwrap();
        let spec = WavepacketSpec::new(Vec2::default(), 3.0, 0.0, Vec2::new(1.0, 0.0));
        assert!(matches!(
            gaussian_1d(&g, &spec, &Material::silicon()),
            Err(Error::UnresolvablePacket { .. })
        ));
    }

    #[test]
    fn centred_packet_at_rest_is_even() {
        let g = Grid1D::new(201, -100.0, 100.0).unwrap();
        let spec = WavepacketSpec::new(Vec2::default(), 10.0, 0.0, Vec2::new(1.0, 0.0));
        let f = gaussian_1d(&g, &spec, &Material::silicon()).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
        let n = g.len();
        for i in 0..n {
            assert!((f.amp[i].norm() - f.amp[n - 1 - i].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn aligned_grids_hit_nodes() {
        let p = Grid2D::square(8, -10.0, 25.0).unwrap();
        let (cm, rel) = aligned_cm_rel_grids(&p, 2, 3).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let xm = 0.5 * (p.x.coordinate(i) + p.x.coordinate(j));
                let fi = cm.x.fractional_index(xm);
                assert!((fi - fi.round()).abs() < 1e-9);
                let fr = rel.x.fractional_index(p.x.coordinate(i) - p.x.coordinate(j));
                assert!((fr - fr.round()).abs() < 1e-9);
            }
        }
    }
}
