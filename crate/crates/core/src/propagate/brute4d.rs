//! Direct propagation of the full two-particle planar problem on a small
//! grid, used to check the CM/relative factorization.
//!
//! The kinetic operator of each (x_a, x_b) and (y_a, y_b) plane is split
//! along the diagonal (centre-of-mass) and anti-diagonal (relative) lattice
//! directions with three-point stencils, and the trap is split the same way.
//! Each line is a tridiagonal Crank–Nicolson solve; the Coulomb term is a
//! half-step phase on either side.

use ndarray::Array4;
use num_complex::Complex64 as C64;

use super::tridiag::CayleyAxis;
use crate::config::Trap;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, Vec2};
use crate::units::{Material, HBAR};

pub const BRUTE_FORCE_MAX_POINTS: usize = 16;

/// Φ(r_a, r_b) on the full product grid, indexed `[xa, ya, xb, yb]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullPair2D {
    pub grid: Grid2D,
    pub amp: Array4<C64>,
}

impl FullPair2D {
    /// Samples `f(r_a, r_b)` on the interior nodes; wall nodes are zero.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Vec2, Vec2) -> Result<C64>) -> Result<Self> {
        let (nx, ny) = grid.shape();
        let mut amp = Array4::zeros((nx, ny, nx, ny));
        for xa in 1..nx - 1 {
            for ya in 1..ny - 1 {
                for xb in 1..nx - 1 {
                    for yb in 1..ny - 1 {
                        amp[[xa, ya, xb, yb]] = f(grid.point(xa, ya), grid.point(xb, yb))?;
                    }
                }
            }
        }
        Ok(FullPair2D { grid, amp })
    }

    pub fn norm_sqr(&self) -> f64 {
        let a = self.grid.cell_area();
        crate::states::sum_norm_sqr(&self.amp) * a * a
    }
}

#[derive(Debug, Clone)]
struct Line {
    nodes: Vec<(usize, usize)>,
    cayley: CayleyAxis,
}

/// Diagonal and anti-diagonal lines of the interior of one N×N plane.
fn plane_lines(axis: &Grid1D, kappa: f64, v_cm: impl Fn(f64) -> f64, v_rel: impl Fn(f64) -> f64, tau: f64) -> Vec<Line> {
    let n = axis.len() as isize;
    let h = axis.spacing();
    let diag0 = kappa / (h * h);
    let off = -kappa / (2.0 * h * h);
    let xs = axis.coordinates();
    let mut lines = Vec::new();
    let interior = |i: isize| i >= 1 && i <= n - 2;
    // Centre-of-mass direction: a − b fixed.
    for c in -(n - 3)..=(n - 3) {
        let nodes: Vec<(usize, usize)> = (1..n - 1)
            .filter(|&b| interior(b + c))
            .map(|b| ((b + c) as usize, b as usize))
            .collect();
        let diag: Vec<f64> = nodes.iter().map(|&(a, b)| diag0 + v_cm(0.5 * (xs[a] + xs[b]))).collect();
        lines.push(Line {
            cayley: CayleyAxis::new(&diag, off, tau),
            nodes,
        });
    }
    // Relative direction: a + b fixed.
    for s in 2..=(2 * n - 4) {
        let nodes: Vec<(usize, usize)> = (1..n - 1)
            .filter(|&a| interior(s - a))
            .map(|a| (a as usize, (s - a) as usize))
            .collect();
        let diag: Vec<f64> = nodes.iter().map(|&(a, b)| diag0 + v_rel(xs[a] - xs[b])).collect();
        lines.push(Line {
            cayley: CayleyAxis::new(&diag, off, tau),
            nodes,
        });
    }
    lines
}

#[derive(Debug, Clone)]
pub struct BruteForce4D {
    grid: Grid2D,
    dt: f64,
    x_lines: Vec<Line>,
    y_lines: Vec<Line>,
    half_phase: Option<Array4<C64>>,
}

impl BruteForce4D {
    pub fn new(
        grid: Grid2D,
        material: &Material,
        trap: &Trap,
        softening: f64,
        coulomb_enabled: bool,
        dt: f64,
    ) -> Result<Self> {
        let (nx, ny) = grid.shape();
        if nx > BRUTE_FORCE_MAX_POINTS || ny > BRUTE_FORCE_MAX_POINTS {
            return Err(Error::GridTooLarge(format!(
                "brute-force 4D propagation is limited to {BRUTE_FORCE_MAX_POINTS} points per axis, got {nx}x{ny}"
            )));
        }
        let kappa = material.kinetic_scale();
        let tau = dt / (2.0 * HBAR);
        let w2 = trap.omega_energy * trap.omega_energy;
        // CM mass 2m: m ω² X²; relative mass m/2: (1/4) m ω² r²; m ω² = (ħω)²/(2κ).
        let m_w2 = w2 / (2.0 * kappa);
        let x_lines = plane_lines(
            &grid.x,
            kappa,
            |x| m_w2 * (x - trap.center.x).powi(2),
            |r| 0.25 * m_w2 * r * r,
            tau,
        );
        let y_lines = plane_lines(
            &grid.y,
            kappa,
            |y| m_w2 * (y - trap.center.y).powi(2),
            |r| 0.25 * m_w2 * r * r,
            tau,
        );
        let half_phase = coulomb_enabled.then(|| {
            let c = material.coulomb_prefactor();
            let s2 = softening * softening;
            Array4::from_shape_fn((nx, ny, nx, ny), |(xa, ya, xb, yb)| {
                let d = grid.point(xa, ya) - grid.point(xb, yb);
                let v = c / (d.x * d.x + d.y * d.y + s2).sqrt();
                C64::from_polar(1.0, -v * dt / (2.0 * HBAR))
            })
        });
        Ok(BruteForce4D {
            grid,
            dt,
            x_lines,
            y_lines,
            half_phase,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn sweep(&self, amp: &mut Array4<C64>, lines: &[Line], x_plane: bool, buf: &mut Vec<C64>) {
        let (nx, ny) = self.grid.shape();
        let outer = if x_plane { ny } else { nx };
        for line in lines {
            for p in 1..outer - 1 {
                for q in 1..outer - 1 {
                    let idx = |(a, b): (usize, usize)| if x_plane { [a, p, b, q] } else { [p, a, q, b] };
                    buf.clear();
                    buf.extend(line.nodes.iter().map(|&n| amp[idx(n)]));
                    line.cayley.apply_line(buf);
                    for (&n, v) in line.nodes.iter().zip(buf.iter()) {
                        amp[idx(n)] = *v;
                    }
                }
            }
        }
    }

    pub fn advance(&self, state: &mut FullPair2D) {
        if let Some(p) = &self.half_phase {
            state.amp *= p;
        }
        let (x_cm, x_rel) = self.x_lines.split_at(self.grid.x.len() * 2 - 5);
        let (y_cm, y_rel) = self.y_lines.split_at(self.grid.y.len() * 2 - 5);
        let mut buf = Vec::new();
        self.sweep(&mut state.amp, x_cm, true, &mut buf);
        self.sweep(&mut state.amp, y_cm, false, &mut buf);
        self.sweep(&mut state.amp, x_rel, true, &mut buf);
        self.sweep(&mut state.amp, y_rel, false, &mut buf);
        if let Some(p) = &self.half_phase {
            state.amp *= p;
        }
    }
}

/// One step of the full 4D problem; fails if the norm moves by more than
/// 1e-10 (relative) within the step.
pub fn brute_force_4d_step(state: &mut FullPair2D, prop: &BruteForce4D) -> Result<()> {
    if state.grid != prop.grid {
        return Err(Error::GridMismatch("state grid differs from the propagator grid".into()));
    }
    let before = state.norm_sqr();
    prop.advance(state);
    let after = state.norm_sqr();
    let drift = ((after - before) / before).abs();
    if drift > 1e-10 || !drift.is_finite() {
        return Err(Error::NormDrift { step: 0, drift });
    }
    Ok(())
}
