//! Antisymmetric coefficient matrices W of the two-electron state.
//!
//! W is never stored densely: it is a small pattern of blocks, each a real
//! multiple of W_A = Φ − Φᵀ or W_S = Φ + Φᵀ, times a global scale that makes
//! Tr[W†W] = 1 on the discrete grid.
//!
//! 1D block order is (wire V₁/V₂) × (spin), spin slowest: for the same-spin
//! state the spin index is ↑/↓, for the other three states it is S₁/S₂.

use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex64 as C64;

use crate::config::SpinConfig;
use crate::error::{Error, Result};

/// Largest single-particle grid for which a dense W may be materialized.
pub const DENSE_MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedBlocks {
    /// Φ − Φᵀ
    pub w_a: Array2<C64>,
    /// Φ + Φᵀ
    pub w_s: Array2<C64>,
}

pub fn symmetrize_blocks(phi: ArrayView2<C64>) -> Result<SymmetrizedBlocks> {
    let (n, m) = phi.dim();
    if n != m {
        return Err(Error::GridMismatch(format!("pair amplitude must be square, got {n}x{m}")));
    }
    let mut w_a = Array2::zeros((n, n));
    let mut w_s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            w_a[[i, j]] = phi[[i, j]] - phi[[j, i]];
            w_s[[i, j]] = phi[[i, j]] + phi[[j, i]];
        }
    }
    Ok(SymmetrizedBlocks { w_a, w_s })
}

/// W_A = Φ − Φᵀ only.
pub fn antisymmetric_part(phi: ArrayView2<C64>) -> Result<Array2<C64>> {
    let (n, m) = phi.dim();
    if n != m {
        return Err(Error::GridMismatch(format!("pair amplitude must be square, got {n}x{m}")));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| phi[[i, j]] - phi[[j, i]]))
}

/// Coefficients of one block: `a`·W_A + `s`·W_S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTerm {
    pub a: f64,
    pub s: f64,
}

const O: BlockTerm = BlockTerm { a: 0.0, s: 0.0 };
const A: BlockTerm = BlockTerm { a: 1.0, s: 0.0 };
const NA: BlockTerm = BlockTerm { a: -1.0, s: 0.0 };
const S: BlockTerm = BlockTerm { a: 0.0, s: 1.0 };
const NS: BlockTerm = BlockTerm { a: 0.0, s: -1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockLayout {
    SameSpin1D,
    OppositeNonFactorizable1D,
    Singlet1D,
    Triplet1D,
    SameSpin2D,
    Triplet2D,
}

impl BlockLayout {
    pub fn for_1d(spin: SpinConfig) -> Self {
        match spin {
            SpinConfig::SameSpin => BlockLayout::SameSpin1D,
            SpinConfig::OppositeNonFactorizable => BlockLayout::OppositeNonFactorizable1D,
            SpinConfig::Singlet => BlockLayout::Singlet1D,
            SpinConfig::Triplet => BlockLayout::Triplet1D,
        }
    }

    pub fn for_2d(spin: SpinConfig) -> Result<Self> {
        match spin {
            SpinConfig::SameSpin => Ok(BlockLayout::SameSpin2D),
            SpinConfig::Triplet => Ok(BlockLayout::Triplet2D),
            other => Err(Error::UnsupportedSpin(other.to_string())),
        }
    }

    /// One-byte tag used in binary exports.
    pub fn tag(self) -> u8 {
        match self {
            BlockLayout::SameSpin1D => 1,
            BlockLayout::OppositeNonFactorizable1D => 2,
            BlockLayout::Singlet1D => 3,
            BlockLayout::Triplet1D => 4,
            BlockLayout::SameSpin2D => 5,
            BlockLayout::Triplet2D => 6,
        }
    }

    pub fn is_2d(self) -> bool {
        matches!(self, BlockLayout::SameSpin2D | BlockLayout::Triplet2D)
    }

    /// Analytic prefactor for continuum-normalized orbitals.
    pub fn prefactor(self) -> f64 {
        let r2 = std::f64::consts::SQRT_2;
        match self {
            BlockLayout::SameSpin1D => 1.0 / (2.0 * r2),
            BlockLayout::OppositeNonFactorizable1D => 1.0 / (4.0 * r2),
            BlockLayout::Singlet1D | BlockLayout::Triplet1D => 0.25,
            BlockLayout::SameSpin2D => 1.0 / r2,
            BlockLayout::Triplet2D => 0.5,
        }
    }

    /// Block pattern, row by row.
    pub fn pattern(self) -> Vec<Vec<BlockTerm>> {
        let rows: &[&[BlockTerm]] = match self {
            BlockLayout::SameSpin1D => &[&[A, NS, O, O], &[S, NA, O, O], &[O, O, O, O], &[O, O, O, O]],
            BlockLayout::OppositeNonFactorizable1D => {
                &[&[A, NS, NS, A], &[S, NA, NA, S], &[S, NA, NA, S], &[A, NS, NS, A]]
            }
            BlockLayout::Singlet1D => &[&[O, O, NS, A], &[O, O, NA, S], &[S, NA, O, O], &[A, NS, O, O]],
            BlockLayout::Triplet1D => &[&[A, NS, O, O], &[S, NA, O, O], &[O, O, NA, S], &[O, O, NS, A]],
            BlockLayout::SameSpin2D => &[&[A, O], &[O, O]],
            BlockLayout::Triplet2D => &[&[A, O], &[O, NA]],
        };
        rows.iter().map(|r| r.to_vec()).collect()
    }

    /// Real orthogonal change of block basis to position-wire × ↑/↓ modes.
    fn to_physical_basis(self) -> Array2<f64> {
        let h = hadamard();
        let id = Array2::<f64>::eye(2);
        match self {
            BlockLayout::SameSpin1D => kron(&id, &h),
            BlockLayout::OppositeNonFactorizable1D | BlockLayout::Singlet1D | BlockLayout::Triplet1D => kron(&h, &h),
            BlockLayout::SameSpin2D | BlockLayout::Triplet2D => id,
        }
    }
}

fn hadamard() -> Array2<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::array![[r, r], [r, -r]]
}

fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    Array2::from_shape_fn((p * q, p * q), |(i, j)| a[[i / q, j / q]] * b[[i % q, j % q]])
}

/// (|L⟩ ± |R⟩)/√2 as columns: entry (w, s) is γ_w(s), w ∈ {L, R}.
pub fn wire_basis_rotation() -> Array2<C64> {
    hadamard().mapv(|v| C64::new(v, 0.0))
}

/// (|↑⟩ ± |↓⟩)/√2 as columns: entry (u, s) is β_u(s), u ∈ {↑, ↓}.
pub fn spin_basis_rotation() -> Array2<C64> {
    hadamard().mapv(|v| C64::new(v, 0.0))
}

/// W for one spin configuration, stored as its distinct blocks.
#[derive(Debug, Clone)]
pub struct SlaterMatrix {
    layout: BlockLayout,
    w_a: Array2<C64>,
    /// Absent for the planar layouts, which use only W_A.
    w_s: Option<Array2<C64>>,
    /// Multiplies the pattern; includes the analytic prefactor.
    scale: f64,
}

fn frob2(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

fn frob_inner_re(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let mut acc = 0.0;
    Zip::from(a).and(b).for_each(|x, y| acc += (x.conj() * y).re);
    acc
}

impl SlaterMatrix {
    fn normalized(layout: BlockLayout, w_a: Array2<C64>, w_s: Option<Array2<C64>>) -> Result<Self> {
        let na = frob2(&w_a);
        let (ns, cross) = match &w_s {
            Some(s) => (frob2(s), frob_inner_re(&w_a, s)),
            None => (0.0, 0.0),
        };
        let p = layout.prefactor();
        let raw: f64 = layout
            .pattern()
            .iter()
            .flatten()
            .map(|t| t.a * t.a * na + t.s * t.s * ns + 2.0 * t.a * t.s * cross)
            .sum::<f64>()
            * p
            * p;
        if !(raw > 0.0) || !raw.is_finite() {
            return Err(Error::Degenerate(
                "antisymmetric part of the pair amplitude vanishes; W cannot be normalized".into(),
            ));
        }
        Ok(SlaterMatrix {
            layout,
            w_a,
            w_s,
            scale: p / raw.sqrt(),
        })
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout
    }

    pub fn w_a(&self) -> &Array2<C64> {
        &self.w_a
    }

    pub fn w_s(&self) -> Option<&Array2<C64>> {
        self.w_s.as_ref()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Single-particle modes per block (N or N²).
    pub fn block_size(&self) -> usize {
        self.w_a.nrows()
    }

    pub fn dimension(&self) -> usize {
        self.block_size() * self.layout.pattern().len()
    }

    /// Amplitude Φ = (W_A + W_S)/2 behind a 1D matrix.
    pub(crate) fn source_amplitude(&self) -> Option<Array2<C64>> {
        self.w_s.as_ref().map(|s| (&self.w_a + s) * 0.5)
    }

    /// Materializes W (verification only).
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let n = self.block_size();
        let limit = if self.layout.is_2d() {
            DENSE_MAX_POINTS * DENSE_MAX_POINTS
        } else {
            DENSE_MAX_POINTS
        };
        if n > limit {
            return Err(Error::GridTooLarge(format!(
                "dense W export limited to {limit} modes per block, got {n}"
            )));
        }
        let pattern = self.layout.pattern();
        let k = pattern.len();
        let mut w = Array2::zeros((k * n, k * n));
        for (bi, row) in pattern.iter().enumerate() {
            for (bj, t) in row.iter().enumerate() {
                if t.a == 0.0 && t.s == 0.0 {
                    continue;
                }
                let mut block = w.slice_mut(ndarray::s![bi * n..(bi + 1) * n, bj * n..(bj + 1) * n]);
                block.scaled_add(C64::new(t.a * self.scale, 0.0), &self.w_a);
                if let Some(s) = &self.w_s {
                    block.scaled_add(C64::new(t.s * self.scale, 0.0), s);
                }
            }
        }
        Ok(w)
    }

    /// Each block of W in the physical (position-wire × ↑/↓) basis as
    /// α·Φ + β·Φᵀ (1D) or α·W_A (2D); `None` entries vanish.
    pub(crate) fn physical_blocks(&self) -> Vec<Vec<Option<(f64, f64)>>> {
        let pattern = self.layout.pattern();
        let r = self.layout.to_physical_basis();
        let k = pattern.len();
        let mut out = vec![vec![None; k]; k];
        for i in 0..k {
            for j in 0..k {
                // W' = Rᵀ W R
                let (mut a, mut s) = (0.0, 0.0);
                for p in 0..k {
                    for q in 0..k {
                        let c = r[[p, i]] * r[[q, j]];
                        a += c * pattern[p][q].a;
                        s += c * pattern[p][q].s;
                    }
                }
                let (a, s) = (clean(a * self.scale), clean(s * self.scale));
                out[i][j] = if self.layout.is_2d() {
                    (a != 0.0).then_some((a, 0.0))
                } else {
                    // aW_A + sW_S = (a + s)Φ + (s − a)Φᵀ
                    let (alpha, beta) = (clean(a + s), clean(s - a));
                    (alpha != 0.0 || beta != 0.0).then_some((alpha, beta))
                };
            }
        }
        out
    }
}

/// Zeroes rounding residue of the exact ±1/2, ±1/√2 rotation arithmetic.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 * (1.0 + v.abs()) {
        0.0
    } else {
        v
    }
}

/// W for a 1D spin configuration from the symmetrized blocks, with the
/// analytic layout and prefactor, rescaled to Tr[W†W] = 1.
pub fn assemble_w(blocks: SymmetrizedBlocks, spin: SpinConfig) -> Result<SlaterMatrix> {
    if blocks.w_a.dim() != blocks.w_s.dim() || blocks.w_a.nrows() != blocks.w_a.ncols() {
        return Err(Error::GridMismatch("W_A and W_S must be square and equally sized".into()));
    }
    SlaterMatrix::normalized(BlockLayout::for_1d(spin), blocks.w_a, Some(blocks.w_s))
}

/// W for a planar spin configuration from the reconstructed pair amplitude
/// (N² × N²), rescaled to Tr[W†W] = 1.
pub fn assemble_w_2d(phi: ArrayView2<C64>, spin: SpinConfig) -> Result<SlaterMatrix> {
    let layout = BlockLayout::for_2d(spin)?;
    SlaterMatrix::normalized(layout, antisymmetric_part(phi)?, None)
}
