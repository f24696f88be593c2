//! Two electrons in a planar harmonic trap, propagated as CM and relative
//! fields.
//!
//! With R = (r_a + r_b)/2 and r = r_a − r_b the Hamiltonian separates into a
//! CM oscillator of mass 2m and a relative oscillator of mass m/2 carrying
//! the softened Coulomb term. The separable trap is folded into the per-axis
//! Crank–Nicolson operators; only the Coulomb term is phase-split.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::tridiag::CayleyAxis;
use super::{Diagnostics, PropagatorState};
use crate::config::Trap;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, Vec2};
use crate::states::{FactorizedField2D, Field2D, TwoParticleField};
use crate::units::{Material, HBAR};

/// Single 2D field Hamiltonian: −κ∇² + v_x(x) + v_y(y) + coupling(x, y).
#[derive(Debug, Clone)]
pub struct FieldOperator2D {
    grid: Grid2D,
    kappa: f64,
    vx: Vec<f64>,
    vy: Vec<f64>,
    coupling: Option<Array2<f64>>,
}

impl FieldOperator2D {
    pub fn new(grid: Grid2D, kappa: f64, vx: Vec<f64>, vy: Vec<f64>, coupling: Option<Array2<f64>>) -> Self {
        assert_eq!(vx.len(), grid.x.len());
        assert_eq!(vy.len(), grid.y.len());
        FieldOperator2D {
            grid,
            kappa,
            vx,
            vy,
            coupling,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coupling(&self) -> Option<&Array2<f64>> {
        self.coupling.as_ref()
    }

    /// (kinetic, separable potential, coupling) expectation values.
    pub fn energies(&self, amp: &Array2<C64>) -> (f64, f64, f64) {
        let (nx, ny) = self.grid.shape();
        let (hx, hy) = (self.grid.x.spacing(), self.grid.y.spacing());
        let (mut gx, mut gy, mut sep, mut cpl, mut norm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..nx {
            for j in 0..ny {
                let z = amp[[i, j]];
                let p = z.norm_sqr();
                norm += p;
                sep += p * (self.vx[i] + self.vy[j]);
                if let Some(c) = &self.coupling {
                    cpl += p * c[[i, j]];
                }
                if i + 1 < nx {
                    gx += (amp[[i + 1, j]] - z).norm_sqr();
                }
                if j + 1 < ny {
                    gy += (amp[[i, j + 1]] - z).norm_sqr();
                }
            }
        }
        let kinetic = self.kappa * (gx / (hx * hx) + gy / (hy * hy));
        (kinetic / norm, sep / norm, cpl / norm)
    }

    /// Lowest eigenvector of the separable part (coupling ignored), built as
    /// the product of the per-axis discrete ground states.
    pub fn separable_ground_state(&self) -> Result<Field2D> {
        let gx = axis_ground_state(&self.grid.x, self.kappa, &self.vx)?;
        let gy = axis_ground_state(&self.grid.y, self.kappa, &self.vy)?;
        let amp = Array2::from_shape_fn(self.grid.shape(), |(i, j)| C64::new(gx[i] * gy[j], 0.0));
        let mut f = Field2D { grid: self.grid, amp };
        f.normalize()?;
        Ok(f)
    }

    fn boundary_probability(&self, amp: &Array2<C64>) -> f64 {
        let (nx, ny) = self.grid.shape();
        let mut p = 0.0;
        for i in 1..nx - 1 {
            for j in 1..ny - 1 {
                if i == 1 || i == nx - 2 || j == 1 || j == ny - 2 {
                    p += amp[[i, j]].norm_sqr();
                }
            }
        }
        p * self.grid.cell_area()
    }
}

/// Ground state of the tridiagonal −κ∂² + v on the interior nodes.
fn axis_ground_state(grid: &Grid1D, kappa: f64, v: &[f64]) -> Result<Array1<f64>> {
    let n = grid.len() - 2;
    let h = grid.spacing();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * kappa / (h * h) + v[i + 1]
        } else if i.abs_diff(j) == 1 {
            -kappa / (h * h)
        } else {
            0.0
        }
    });
    let eig = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let u = eig.U();
    let sign = if u[(n / 2, 0)] < 0.0 { -1.0 } else { 1.0 };
    let mut out = Array1::zeros(n + 2);
    for i in 0..n {
        out[i + 1] = sign * u[(i, 0)];
    }
    Ok(out)
}

/// Harmonic potential (1/2)(μm)ω²(x − c)² on an axis, meV.
fn harmonic_axis(axis: &Grid1D, material: &Material, omega_energy: f64, mass_factor: f64, center: f64) -> Vec<f64> {
    // (1/2)μmω² = μ(ħω)²/(4κ) with κ = ħ²/2m.
    let coeff = mass_factor * omega_energy * omega_energy / (4.0 * material.kinetic_scale());
    axis.coordinates()
        .into_iter()
        .map(|x| coeff * (x - center) * (x - center))
        .collect()
}

/// Softened Coulomb e²/(ϵ·sqrt(r² + s²)) on the relative grid.
fn softened_coulomb(grid: &Grid2D, material: &Material, softening: f64) -> Array2<f64> {
    let c = material.coulomb_prefactor();
    let s2 = softening * softening;
    let xs = grid.x.coordinates();
    let ys = grid.y.coordinates();
    Array2::from_shape_fn(grid.shape(), |(i, j)| {
        // |x| and |y| make mirrored nodes bit-identical.
        let (x, y) = (xs[i].abs(), ys[j].abs());
        c / (x * x + y * y + s2).sqrt()
    })
}

#[derive(Debug, Clone)]
pub struct Hamiltonian2DFactors {
    material: Material,
    trap: Trap,
    softening: f64,
    coulomb_enabled: bool,
    cm: FieldOperator2D,
    rel: FieldOperator2D,
}

impl Hamiltonian2DFactors {
    pub fn new(
        material: Material,
        trap: Trap,
        softening: f64,
        coulomb_enabled: bool,
        cm_grid: Grid2D,
        rel_grid: Grid2D,
    ) -> Result<Self> {
        if !(softening > 0.0) {
            return Err(Error::config("coulomb_softening_nm", "must be > 0"));
        }
        if !(trap.omega_energy > 0.0) {
            return Err(Error::config("trap_energy_meV", "must be > 0"));
        }
        let kappa = material.kinetic_scale();
        let w = trap.omega_energy;
        let cm = FieldOperator2D::new(
            cm_grid,
            kappa / 2.0,
            harmonic_axis(&cm_grid.x, &material, w, 2.0, trap.center.x),
            harmonic_axis(&cm_grid.y, &material, w, 2.0, trap.center.y),
            None,
        );
        let rel = FieldOperator2D::new(
            rel_grid,
            2.0 * kappa,
            harmonic_axis(&rel_grid.x, &material, w, 0.5, 0.0),
            harmonic_axis(&rel_grid.y, &material, w, 0.5, 0.0),
            coulomb_enabled.then(|| softened_coulomb(&rel_grid, &material, softening)),
        );
        Ok(Hamiltonian2DFactors {
            material,
            trap,
            softening,
            coulomb_enabled,
            cm,
            rel,
        })
    }

    pub fn cm(&self) -> &FieldOperator2D {
        &self.cm
    }

    pub fn rel(&self) -> &FieldOperator2D {
        &self.rel
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn trap(&self) -> &Trap {
        &self.trap
    }

    pub fn softening(&self) -> f64 {
        self.softening
    }

    pub fn coulomb_enabled(&self) -> bool {
        self.coulomb_enabled
    }

    /// Total energy is E_cm + E_rel for a product state; the Coulomb part
    /// lives in the relative factor.
    pub fn diagnostics(&self, field: &FactorizedField2D) -> Diagnostics {
        let (tc, vc, _) = self.cm.energies(&field.cm.amp);
        let (tr, vr, coulomb) = self.rel.energies(&field.rel.amp);
        Diagnostics {
            norm: field.cm.norm_sqr() * field.rel.norm_sqr(),
            total_energy: tc + vc + tr + vr + coulomb,
            coulomb_energy: coulomb,
        }
    }

    pub fn boundary_probability(&self, field: &FactorizedField2D) -> f64 {
        self.cm.boundary_probability(&field.cm.amp) + self.rel.boundary_probability(&field.rel.amp)
    }
}

#[derive(Debug, Clone)]
pub struct FieldPropagator2D {
    x: CayleyAxis,
    y: CayleyAxis,
    half_phase: Option<Array2<C64>>,
    cols: usize,
}

impl FieldPropagator2D {
    pub fn new(op: &FieldOperator2D, dt: f64) -> Self {
        let tau = dt / (2.0 * HBAR);
        let g = &op.grid;
        let (nx, ny) = g.shape();
        let x = CayleyAxis::kinetic(op.kappa, g.x.spacing(), &op.vx[1..nx - 1], tau);
        let y = CayleyAxis::kinetic(op.kappa, g.y.spacing(), &op.vy[1..ny - 1], tau);
        let half_phase = op
            .coupling
            .as_ref()
            .map(|v| v.mapv(|v| C64::from_polar(1.0, -v * dt / (2.0 * HBAR))));
        FieldPropagator2D {
            x,
            y,
            half_phase,
            cols: ny,
        }
    }

    pub fn advance(&self, amp: &mut Array2<C64>) {
        if let Some(p) = &self.half_phase {
            *amp *= p;
        }
        let data = amp.as_slice_mut().expect("standard layout");
        let mut prev = Vec::new();
        self.x.apply_columns(data, self.cols, &mut prev, None);
        self.y.apply_rows(data, self.cols);
        if let Some(p) = &self.half_phase {
            *amp *= p;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Propagator2D {
    ham: Hamiltonian2DFactors,
    dt: f64,
    cm: FieldPropagator2D,
    rel: FieldPropagator2D,
}

impl Propagator2D {
    pub fn new(ham: Hamiltonian2DFactors, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::config("dt_fs", "must be > 0"));
        }
        let cm = FieldPropagator2D::new(&ham.cm, dt);
        let rel = FieldPropagator2D::new(&ham.rel, dt);
        Ok(Propagator2D { ham, dt, cm, rel })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian2DFactors {
        &self.ham
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn advance(&self, field: &mut FactorizedField2D) {
        self.cm.advance(&mut field.cm.amp);
        self.rel.advance(&mut field.rel.amp);
    }

    pub fn check_accuracy(&self, field: &FactorizedField2D) -> bool {
        let d = self.ham.diagnostics(field);
        let vmax = self.ham.rel.coupling.as_ref().map_or(0.0, |c| c.iter().cloned().fold(0.0, f64::max));
        let e_max = d.total_energy.abs() + vmax;
        let ok = self.dt <= HBAR / (4.0 * e_max);
        if !ok {
            log::warn!(
                "dt = {} fs exceeds the accuracy guard hbar/(4 E_max) = {:.4} fs",
                self.dt,
                HBAR / (4.0 * e_max)
            );
        }
        ok
    }
}

/// One step of both factors.
pub fn step_2d(state: &mut PropagatorState, prop: &Propagator2D) -> Result<()> {
    let field = match &mut state.field {
        TwoParticleField::Factorized2D(f) => f,
        _ => return Err(Error::GridMismatch("step_2d needs a factorized 2D field".into())),
    };
    if field.cm.grid != prop.ham.cm.grid || field.rel.grid != prop.ham.rel.grid {
        return Err(Error::GridMismatch("state grids differ from the Hamiltonian grids".into()));
    }
    prop.advance(field);
    state.step_count += 1;
    state.t = state.step_count as f64 * prop.dt;
    let (ncm, nrel) = (field.cm.norm_sqr(), field.rel.norm_sqr());
    state.diagnostics.norm = ncm * nrel;
    state.check_norm_factors(ncm, nrel)
}

/// Linear interpolation stencil on one axis: base node and weight of the
/// next node. Positions within 1e-9 cells of a node snap to it.
fn stencil(axis: &Grid1D, x: f64, y_for_error: f64) -> Result<(usize, f64)> {
    let f = axis.fractional_index(x);
    let r = f.round();
    let last = (axis.len() - 1) as f64;
    if (f - r).abs() < 1e-9 && r >= 0.0 && r <= last {
        return Ok((r as usize, 0.0));
    }
    if f < 0.0 || f > last {
        return Err(Error::OutsideGrid { x, y: y_for_error });
    }
    let i0 = f.floor();
    Ok((i0 as usize, f - i0))
}

fn bilinear(amp: &Array2<C64>, (i, wx): (usize, f64), (j, wy): (usize, f64)) -> C64 {
    if wx == 0.0 && wy == 0.0 {
        return amp[[i, j]];
    }
    let mut acc = amp[[i, j]] * ((1.0 - wx) * (1.0 - wy));
    if wx > 0.0 {
        acc += amp[[i + 1, j]] * (wx * (1.0 - wy));
    }
    if wy > 0.0 {
        acc += amp[[i, j + 1]] * ((1.0 - wx) * wy);
    }
    if wx > 0.0 && wy > 0.0 {
        acc += amp[[i + 1, j + 1]] * (wx * wy);
    }
    acc
}

impl FactorizedField2D {
    /// Φ(r_a, r_b) = cm((r_a + r_b)/2)·rel(r_a − r_b), bilinear in each factor.
    pub fn amplitude_at(&self, ra: Vec2, rb: Vec2) -> Result<C64> {
        let big_r = (ra + rb) * 0.5;
        let r = ra - rb;
        let cx = stencil(&self.cm.grid.x, big_r.x, big_r.y)?;
        let cy = stencil(&self.cm.grid.y, big_r.y, big_r.x).map_err(|_| Error::OutsideGrid { x: big_r.x, y: big_r.y })?;
        let rx = stencil(&self.rel.grid.x, r.x, r.y)?;
        let ry = stencil(&self.rel.grid.y, r.y, r.x).map_err(|_| Error::OutsideGrid { x: r.x, y: r.y })?;
        Ok(bilinear(&self.cm.amp, cx, cy) * bilinear(&self.rel.amp, rx, ry))
    }
}

/// Interpolation tables for every (i, j) pair of particle-grid nodes on one
/// axis: CM stencil at (x_i + x_j)/2 and relative stencil at x_i − x_j.
fn pair_tables(target: &Grid1D, cm: &Grid1D, rel: &Grid1D) -> Result<(Vec<(usize, f64)>, Vec<(usize, f64)>)> {
    let n = target.len();
    let xs = target.coordinates();
    let mut c = Vec::with_capacity(n * n);
    let mut r = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            c.push(stencil(cm, 0.5 * (xs[i] + xs[j]), 0.0)?);
            r.push(stencil(rel, xs[i] - xs[j], 0.0)?);
        }
    }
    Ok((c, r))
}

/// Materializes Φ(r_i, r_j) on the particle grid as an N²×N² matrix (row-major
/// flat index i = ix·N_y + iy), renormalized to unit discrete norm. Rows and
/// columns of wall nodes are zero.
pub fn reconstruct_pair_2d(field: &FactorizedField2D, target: &Grid2D) -> Result<Array2<C64>> {
    let (nx, ny) = target.shape();
    let (cmx, relx) = pair_tables(&target.x, &field.cm.grid.x, &field.rel.grid.x)?;
    let (cmy, rely) = pair_tables(&target.y, &field.cm.grid.y, &field.rel.grid.y)?;
    let n2 = nx * ny;
    let mut out = Array2::<C64>::zeros((n2, n2));
    let mut norm = 0.0;
    // Wall nodes of the particle grid stay zero, as in 1D.
    for ia in 1..nx - 1 {
        for ja in 1..ny - 1 {
            let a = ia * ny + ja;
            let mut row = out.row_mut(a);
            for ib in 1..nx - 1 {
                let (cx, rx) = (cmx[ia * nx + ib], relx[ia * nx + ib]);
                for jb in 1..ny - 1 {
                    let (cy, ry) = (cmy[ja * ny + jb], rely[ja * ny + jb]);
                    let v = bilinear(&field.cm.amp, cx, cy) * bilinear(&field.rel.amp, rx, ry);
                    norm += v.norm_sqr();
                    row[ib * ny + jb] = v;
                }
            }
        }
    }
    let area = target.cell_area();
    norm *= area * area;
    if !(norm > 0.0) {
        return Err(Error::Degenerate("reconstructed pair amplitude vanishes".into()));
    }
    out.mapv_inplace(|z| z / norm.sqrt());
    Ok(out)
}

/// Discrete norm of the reconstructed product before renormalization.
pub fn reconstructed_norm(field: &FactorizedField2D, target: &Grid2D) -> Result<f64> {
    let (nx, ny) = target.shape();
    let mut acc = 0.0;
    for ia in 0..nx {
        for ja in 0..ny {
            for ib in 0..nx {
                for jb in 0..ny {
                    let v = field.amplitude_at(target.point(ia, ja), target.point(ib, jb))?;
                    acc += v.norm_sqr();
                }
            }
        }
    }
    let area = target.cell_area();
    Ok(acc * area * area)
}
