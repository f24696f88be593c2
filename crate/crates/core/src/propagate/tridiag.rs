//! Crank–Nicolson factors (1 + iτH)⁻¹(1 − iτH) for one grid axis.
//!
//! H is tridiagonal on the interior nodes with a constant off-diagonal and an
//! arbitrary real diagonal (kinetic stencil plus any separable potential).
//! The Thomas factors are computed once; the matrix 1 + iτH has identity
//! Hermitian part, so elimination without pivoting is stable.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub(crate) struct CayleyAxis {
    /// −τ·H_kk: the diagonal of 1 − iτH is 1 + i·a_k.
    a: Vec<f64>,
    /// τ·H_k,k±1: off-diagonals are −i·l (right side) and +i·l (left side).
    l: f64,
    /// Thomas: modified super-diagonal and reciprocal pivots.
    cp: Vec<C64>,
    inv: Vec<C64>,
}

impl CayleyAxis {
    /// `diag`/`off`: entries of H on the interior nodes, `tau` = dt/(2ħ).
    pub(crate) fn new(diag: &[f64], off: f64, tau: f64) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        let i_tau = C64::new(0.0, tau);
        let lhs_off = i_tau * off;
        let mut cp = vec![C64::new(0.0, 0.0); n];
        let mut inv = vec![C64::new(0.0, 0.0); n];
        let mut prev_cp = C64::new(0.0, 0.0);
        for k in 0..n {
            let pivot = C64::new(1.0, 0.0) + i_tau * diag[k] - lhs_off * prev_cp;
            inv[k] = pivot.inv();
            cp[k] = lhs_off * inv[k];
            prev_cp = cp[k];
        }
        CayleyAxis {
            a: diag.iter().map(|&d| -tau * d).collect(),
            l: tau * off,
            cp,
            inv,
        }
    }

    /// Kinetic three-point stencil −κ∂² plus potential `v` (interior nodes).
    pub(crate) fn kinetic(kappa: f64, h: f64, v: &[f64], tau: f64) -> Self {
        let diag: Vec<f64> = v.iter().map(|&vi| 2.0 * kappa / (h * h) + vi).collect();
        CayleyAxis::new(&diag, -kappa / (h * h), tau)
    }

    pub(crate) fn len(&self) -> usize {
        self.inv.len()
    }

    /// Applies the Cayley factor to one contiguous line of interior values.
    pub(crate) fn apply_line(&self, line: &mut [C64]) {
        let n = self.len();
        debug_assert_eq!(line.len(), n);
        let zero = C64::new(0.0, 0.0);
        let mut prev_y = zero;
        let mut prev_d = zero;
        for k in 0..n {
            let y = line[k];
            let next = if k + 1 < n { line[k + 1] } else { zero };
            let d = forward(y, self.a[k], self.l, prev_y + next + prev_d) * self.inv[k];
            line[k] = d;
            prev_y = y;
            prev_d = d;
        }
        for k in (0..n - 1).rev() {
            let x = line[k] - self.cp[k] * line[k + 1];
            line[k] = x;
        }
    }

    /// Applies the factor along axis 0 of a row-major `rows × cols` array
    /// whose first and last rows are zero walls. Only columns `1..cols-1`
    /// are touched; the sweep is vectorised across columns. With `phase`
    /// (same shape as `data`), the array is first multiplied by it
    /// elementwise, one row ahead of the sweep.
    pub(crate) fn apply_columns(&self, data: &mut [C64], cols: usize, prev: &mut Vec<C64>, phase: Option<&[C64]>) {
        let rows = self.len() + 2;
        debug_assert_eq!(data.len(), rows * cols);
        let (c0, c1) = (1, cols - 1);
        let scale_row = |data: &mut [C64], i: usize| {
            if let Some(p) = phase {
                let r = i * cols + c0..i * cols + c1;
                for (y, q) in data[r.clone()].iter_mut().zip(&p[r]) {
                    *y *= q;
                }
            }
        };
        prev.clear();
        prev.resize(cols, C64::new(0.0, 0.0));
        scale_row(data, 1);
        for i in 1..rows - 1 {
            let k = i - 1;
            if i + 1 < rows - 1 {
                scale_row(data, i + 1);
            }
            let (above, rest) = data.split_at_mut(i * cols);
            let (row, below) = rest.split_at_mut(cols);
            let above = &above[(i - 1) * cols + c0..(i - 1) * cols + c1];
            let next = &below[c0..c1];
            let (a, l, inv) = (self.a[k], self.l, self.inv[k]);
            for (((y, p), nx), ab) in row[c0..c1].iter_mut().zip(&mut prev[c0..c1]).zip(next).zip(above) {
                let old = *y;
                *y = forward(old, a, l, *p + *nx + *ab) * inv;
                *p = old;
            }
        }
        // Row rows-2 already holds the solution; walk back up.
        for i in (1..rows - 2).rev() {
            let cp = self.cp[i - 1];
            let (head, tail) = data.split_at_mut((i + 1) * cols);
            let row = &mut head[i * cols + c0..i * cols + c1];
            for (x, b) in row.iter_mut().zip(&tail[c0..c1]) {
                *x -= cp * *b;
            }
        }
    }

    /// Applies the factor along axis 1 (each interior row independently).
    pub(crate) fn apply_rows(&self, data: &mut [C64], cols: usize) {
        use rayon::prelude::*;
        let rows = data.len() / cols;
        debug_assert_eq!(self.len() + 2, cols);
        data.par_chunks_mut(cols)
            .enumerate()
            .filter(|(i, _)| *i > 0 && *i < rows - 1)
            .for_each(|(_, row)| self.apply_line(&mut row[1..cols - 1]));
    }
}

/// (1 − iτH)y minus the left-side coupling to the previous eliminated value,
/// with `s` = y_prev + y_next + d_prev: y + i·(a·y − l·s).
#[inline(always)]
fn forward(y: C64, a: f64, l: f64, s: C64) -> C64 {
    let re = a * y.re - l * s.re;
    let im = a * y.im - l * s.im;
    C64::new(y.re - im, y.im + re)
}

/// In-place transpose of a row-major `n × n` array, in square tiles.
pub(crate) fn transpose_square(data: &mut [C64], n: usize) {
    const TILE: usize = 16;
    debug_assert_eq!(data.len(), n * n);
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + TILE).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Transpose followed by elementwise multiplication with the symmetric
/// `phase`; returns Σ|·|² of the result.
pub(crate) fn transpose_square_phased(data: &mut [C64], n: usize, phase: &[C64]) -> f64 {
    const TILE: usize = 16;
    debug_assert_eq!(data.len(), n * n);
    debug_assert_eq!(phase.len(), n * n);
    let mut sum = 0.0;
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                let start = if bi == bj {
                    let d = i * n + i;
                    data[d] *= phase[d];
                    sum += data[d].norm_sqr();
                    i + 1
                } else {
                    bj
                };
                for j in start..(bj + TILE).min(n) {
                    let (u, l) = (i * n + j, j * n + i);
                    let q = phase[u];
                    let (a, b) = (data[u], data[l]);
                    data[u] = b * q;
                    data[l] = a * q;
                    sum += data[u].norm_sqr() + data[l].norm_sqr();
                }
            }
        }
    }
    sum
}

/// Banded LU without pivoting, band half-width `p`.
#[derive(Debug, Clone)]
pub(crate) struct BandedLu {
    n: usize,
    p: usize,
    band: Vec<C64>,
}

impl BandedLu {
    /// Factors the `n × n` matrix whose entries within the band are given by
    /// `entry(i, j)` (|i − j| ≤ p).
    pub(crate) fn factor(n: usize, p: usize, entry: impl Fn(usize, usize) -> C64) -> Option<Self> {
        let w = 2 * p + 1;
        let mut band = vec![C64::new(0.0, 0.0); n * w];
        for i in 0..n {
            for j in i.saturating_sub(p)..(i + p + 1).min(n) {
                band[i * w + j + p - i] = entry(i, j);
            }
        }
        for k in 0..n {
            let pivot = band[k * w + p];
            if pivot.norm() < 1e-300 || !pivot.is_finite() {
                return None;
            }
            let end = (k + p + 1).min(n);
            for i in k + 1..end {
                let l = band[i * w + k + p - i] / pivot;
                band[i * w + k + p - i] = l;
                for j in k + 1..end {
                    let u = band[k * w + j + p - k];
                    band[i * w + j + p - i] -= l * u;
                }
            }
        }
        Some(BandedLu { n, p, band })
    }

    pub(crate) fn solve_in_place(&self, x: &mut [C64]) {
        let (n, p, w) = (self.n, self.p, 2 * self.p + 1);
        for i in 0..n {
            let mut acc = x[i];
            for j in i.saturating_sub(p)..i {
                acc -= self.band[i * w + j + p - i] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..(i + p + 1).min(n) {
                acc -= self.band[i * w + j + p - i] * x[j];
            }
            x[i] = acc / self.band[i * w + p];
        }
    }
}
