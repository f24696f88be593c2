//! Two electrons in parallel wires: H = T_a + T_b + e²/(ϵ·sqrt((x_a−x_b)² + d²)).

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::tridiag::{transpose_square, transpose_square_phased, BandedLu, CayleyAxis};
use super::{Diagnostics, PropagatorState};
use crate::config::SolverMode;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::states::{sum_norm_sqr, PairField1D, TwoParticleField};
use crate::units::{Material, HBAR};

/// Largest interior grid the exact banded solver accepts.
pub const EXACT_MAX_POINTS: usize = 130;

#[derive(Debug, Clone)]
pub struct Hamiltonian1DPair {
    grid: Grid1D,
    material: Material,
    wire_distance: f64,
    coulomb_enabled: bool,
    potential: Array2<f64>,
}

impl Hamiltonian1DPair {
    pub fn new(grid: Grid1D, material: Material, wire_distance: f64, coulomb_enabled: bool) -> Result<Self> {
        if !(wire_distance > 0.0) {
            return Err(Error::config("wire_distance_nm", "must be > 0"));
        }
        let n = grid.len();
        let c = material.coulomb_prefactor();
        let d2 = wire_distance * wire_distance;
        let potential = if coulomb_enabled {
            // Built from |l − m| only, so V(l, m) = V(m, l) bit for bit.
            let h = grid.spacing();
            let by_offset: Vec<f64> = (0..n)
                .map(|k| {
                    let dx = k as f64 * h;
                    c / (dx * dx + d2).sqrt()
                })
                .collect();
            Array2::from_shape_fn((n, n), |(l, m)| by_offset[l.abs_diff(m)])
        } else {
            Array2::zeros((n, n))
        };
        Ok(Hamiltonian1DPair {
            grid,
            material,
            wire_distance,
            coulomb_enabled,
            potential,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn wire_distance(&self) -> f64 {
        self.wire_distance
    }

    pub fn coulomb_enabled(&self) -> bool {
        self.coulomb_enabled
    }

    pub fn potential(&self) -> &Array2<f64> {
        &self.potential
    }

    /// H Φ with walls held at zero.
    pub fn apply(&self, amp: &Array2<C64>) -> Array2<C64> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let k = self.material.kinetic_scale() / (h * h);
        let mut out = Array2::zeros((n, n));
        for l in 1..n - 1 {
            for m in 1..n - 1 {
                let lap = amp[[l + 1, m]] + amp[[l - 1, m]] + amp[[l, m + 1]] + amp[[l, m - 1]] - amp[[l, m]] * 4.0;
                out[[l, m]] = -lap * k + amp[[l, m]] * self.potential[[l, m]];
            }
        }
        out
    }

    /// Kinetic, Coulomb and total energy expectation of `amp`.
    pub fn energies(&self, amp: &Array2<C64>) -> Energies {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let mut grad = 0.0;
        let mut pot = 0.0;
        let mut norm = 0.0;
        for l in 0..n {
            for m in 0..n {
                let z = amp[[l, m]];
                norm += z.norm_sqr();
                pot += z.norm_sqr() * self.potential[[l, m]];
                if l + 1 < n {
                    grad += (amp[[l + 1, m]] - z).norm_sqr();
                }
                if m + 1 < n {
                    grad += (amp[[l, m + 1]] - z).norm_sqr();
                }
            }
        }
        let kinetic = self.material.kinetic_scale() * grad / (h * h) / norm;
        let coulomb = pot / norm;
        Energies {
            kinetic,
            coulomb,
            total: kinetic + coulomb,
        }
    }

    /// Probability carried by the nodes adjacent to a wall.
    pub fn boundary_probability(&self, amp: &Array2<C64>) -> f64 {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let mut p = 0.0;
        for l in 1..n - 1 {
            for m in 1..n - 1 {
                if l == 1 || l == n - 2 || m == 1 || m == n - 2 {
                    p += amp[[l, m]].norm_sqr();
                }
            }
        }
        p * h * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub kinetic: f64,
    pub coulomb: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
enum Scheme {
    /// Strang: half Coulomb phase, CN along a, CN along b, half phase.
    Adi { axis: CayleyAxis, half_phase: Option<Array2<C64>> },
    Exact { lu: BandedLu },
}

#[derive(Debug, Clone)]
pub struct Propagator1D {
    ham: Hamiltonian1DPair,
    dt: f64,
    scheme: Scheme,
}

impl Propagator1D {
    pub fn new(ham: Hamiltonian1DPair, dt: f64, solver: SolverMode) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::config("dt_fs", "must be > 0"));
        }
        let tau = dt / (2.0 * HBAR);
        let n = ham.grid.len();
        let h = ham.grid.spacing();
        let kappa = ham.material.kinetic_scale();
        let scheme = match solver {
            SolverMode::Adi => {
                let axis = CayleyAxis::kinetic(kappa, h, &vec![0.0; n - 2], tau);
                // V depends on |x_a − x_b| only, so the phase is symmetric and
                // may be applied after the final transpose.
                debug_assert!(ham.potential == ham.potential.t());
                let half_phase = ham
                    .coulomb_enabled
                    .then(|| ham.potential.mapv(|v| C64::from_polar(1.0, -v * dt / (2.0 * HBAR))));
                Scheme::Adi { axis, half_phase }
            }
            SolverMode::Exact => {
                if n > EXACT_MAX_POINTS {
                    return Err(Error::GridTooLarge(format!(
                        "exact solver limited to {EXACT_MAX_POINTS} points per axis, got {n}"
                    )));
                }
                let m = n - 2;
                let diag_t = 2.0 * kappa / (h * h);
                let off_t = -kappa / (h * h);
                let pot = &ham.potential;
                let i_tau = C64::new(0.0, tau);
                let entry = |r: usize, c: usize| -> C64 {
                    let (l, mm) = (r / m, r % m);
                    let hv = if r == c {
                        2.0 * diag_t + pot[[l + 1, mm + 1]]
                    } else if r.abs_diff(c) == m || (r.abs_diff(c) == 1 && r / m == c / m) {
                        off_t
                    } else {
                        0.0
                    };
                    let delta = if r == c { 1.0 } else { 0.0 };
                    C64::new(delta, 0.0) + i_tau * hv
                };
                let lu = BandedLu::factor(m * m, m, entry)
                    .ok_or_else(|| Error::Solve("zero pivot in banded Crank-Nicolson factorization".into()))?;
                Scheme::Exact { lu }
            }
        };
        Ok(Propagator1D { ham, dt, scheme })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian1DPair {
        &self.ham
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Warns when dt exceeds ħ/(4·E_max), E_max = ⟨T⟩ + max V for this state.
    pub fn check_accuracy(&self, amp: &Array2<C64>) -> bool {
        let e = self.ham.energies(amp);
        let vmax = self.ham.potential.iter().cloned().fold(0.0, f64::max);
        let e_max = e.kinetic + vmax;
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

    /// Advances the amplitude by one step in place; returns its new norm².
    pub fn advance(&self, amp: &mut Array2<C64>) -> f64 {
        let n = self.ham.grid.len();
        let h = self.ham.grid.spacing();
        assert_eq!(amp.dim(), (n, n));
        match &self.scheme {
            Scheme::Adi { axis, half_phase } => {
                let phase = half_phase.as_ref().map(|p| p.as_slice().expect("standard layout"));
                let data = amp.as_slice_mut().expect("standard layout");
                // The second axis is swept as columns of the transpose: the
                // recurrence then vectorises across lines. The half-phases
                // ride along with the first sweep and the last transpose.
                let mut prev = Vec::new();
                axis.apply_columns(data, n, &mut prev, phase);
                transpose_square(data, n);
                axis.apply_columns(data, n, &mut prev, None);
                let sum = match phase {
                    Some(p) => transpose_square_phased(data, n, p),
                    None => {
                        transpose_square(data, n);
                        sum_norm_sqr(data.iter())
                    }
                };
                sum * h * h
            }
            Scheme::Exact { lu } => {
                let hphi = self.ham.apply(amp);
                let tau = self.dt / (2.0 * HBAR);
                let m = n - 2;
                let mut rhs = vec![C64::new(0.0, 0.0); m * m];
                for l in 0..m {
                    for k in 0..m {
                        rhs[l * m + k] = amp[[l + 1, k + 1]] - C64::new(0.0, tau) * hphi[[l + 1, k + 1]];
                    }
                }
                lu.solve_in_place(&mut rhs);
                for l in 0..m {
                    for k in 0..m {
                        amp[[l + 1, k + 1]] = rhs[l * m + k];
                    }
                }
                sum_norm_sqr(amp.iter()) * h * h
            }
        }
    }

    pub fn diagnostics(&self, pair: &PairField1D) -> Diagnostics {
        let e = self.ham.energies(&pair.amp);
        Diagnostics {
            norm: pair.norm_sqr(),
            total_energy: e.total,
            coulomb_energy: e.coulomb,
        }
    }
}

/// One Crank–Nicolson step of a 1D pair state.
pub fn step_1d(state: &mut PropagatorState, prop: &Propagator1D) -> Result<()> {
    let pair = match &mut state.field {
        TwoParticleField::Pair1D(p) => p,
        _ => return Err(Error::GridMismatch("step_1d needs a 1D pair field".into())),
    };
    if pair.grid != prop.ham.grid {
        return Err(Error::GridMismatch("state grid differs from the Hamiltonian grid".into()));
    }
    let norm = prop.advance(&mut pair.amp);
    state.step_count += 1;
    state.t = state.step_count as f64 * prop.dt;
    state.diagnostics.norm = norm;
    state.check_norm()
}
