//! Reduced density matrix, Slater spectrum and von Neumann entropy.
//!
//! For the block layouts of [`crate::slater`], rotating W into the
//! position-wire × ↑/↓ basis leaves at most one nonzero block per block
//! column, each a multiple of Φ or Φᵀ (1D) or of W_A (2D). The reduced
//! density is then block diagonal with blocks ∝ M†M or ∝ conj(MM†), so the
//! spectrum needs one eigendecomposition per distinct Gram matrix instead of
//! one of the full 4N×4N (or 2N²×2N²) matrix.

mod canonical;
pub mod eigen;

pub use canonical::{slater_canonical_form, CanonicalForm, CANONICAL_MAX_DIM};

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::config::SpinConfig;
use crate::error::{Error, Result};
use crate::slater::{assemble_w, symmetrize_blocks, SlaterMatrix};

/// Eigenvalue pairs that differ by more than this are a structural error.
pub const PAIR_MISMATCH_LIMIT: f64 = 1e-6;

/// Default relative threshold for counting nonzero Slater coefficients.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

/// Entropy above ln 2 by more than this marks genuine entanglement.
///
/// Two pair weights {1/2 − δ, δ} give ε − ln 2 ≈ 2δ(1 − ln 2δ), so at the
/// default rank tolerance (δ = 5e-9) the excess is ≈ 2e-7: rank 1 and
/// non-genuine coincide down to that scale.
pub const GENUINE_TOLERANCE: f64 = 1e-6;

/// Largest full density matrix the dense fallback will diagonalize.
const DENSE_FALLBACK_MAX: usize = 4096;

#[derive(Debug, Clone)]
struct DensityBlock {
    weight: f64,
    /// conj(MM†) instead of M†M.
    transposed: bool,
}

#[derive(Debug, Clone)]
enum Parts {
    Structured {
        gram: Array2<C64>,
        gram_t: Option<Array2<C64>>,
        blocks: Vec<DensityBlock>,
    },
    Dense(Array2<C64>),
}

/// ρ = W†W / Tr[W†W], held block-diagonally in the physical basis.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    dimension: usize,
    block_size: usize,
    parts: Parts,
    /// Tr[W†W] of the stored parts; eigenvalues are divided by it.
    raw_trace: f64,
}

/// Indices whose row and column in `m` are both identically zero (walls).
fn live_modes(m: &Array2<C64>) -> Vec<usize> {
    let n = m.nrows();
    let zero = C64::new(0.0, 0.0);
    (0..n)
        .filter(|&i| m.row(i).iter().any(|z| *z != zero) || m.column(i).iter().any(|z| *z != zero))
        .collect()
}

fn restrict(m: &Array2<C64>, live: &[usize]) -> Array2<C64> {
    if live.len() == m.nrows() {
        return m.clone();
    }
    Array2::from_shape_fn((live.len(), live.len()), |(i, j)| m[[live[i], live[j]]])
}

fn trace_re(m: &Array2<C64>) -> f64 {
    m.diag().iter().map(|z| z.re).sum()
}

/// Column → (weight, transposed) for the structured form, or `None` when a
/// block column mixes terms or two columns share a row.
fn structured_blocks(w: &SlaterMatrix) -> Option<(Vec<DensityBlock>, usize)> {
    let phys = w.physical_blocks();
    let k = phys.len();
    let mut used_rows = vec![false; k];
    let mut blocks = Vec::new();
    let mut zero = 0;
    for j in 0..k {
        let nonzero: Vec<(usize, (f64, f64))> = (0..k).filter_map(|i| phys[i][j].map(|b| (i, b))).collect();
        match nonzero.as_slice() {
            [] => zero += 1,
            [(i, (alpha, beta))] => {
                if used_rows[*i] || (*alpha != 0.0 && *beta != 0.0) {
                    return None;
                }
                used_rows[*i] = true;
                blocks.push(if *beta == 0.0 {
                    DensityBlock {
                        weight: alpha * alpha,
                        transposed: false,
                    }
                } else {
                    DensityBlock {
                        weight: beta * beta,
                        transposed: true,
                    }
                });
            }
            _ => return None,
        }
    }
    Some((blocks, zero))
}

/// ρ = W†W normalized to unit trace, computed from the blocks of W.
pub fn reduced_density(w: &SlaterMatrix) -> Result<ReducedDensity> {
    let dimension = w.dimension();
    let block_size = w.block_size();
    let Some((blocks, _)) = structured_blocks(w) else {
        if dimension > DENSE_FALLBACK_MAX {
            return Err(Error::GridTooLarge(format!(
                "layout has no block-diagonal reduced density and dimension {dimension} is too large for the dense path"
            )));
        }
        let dense = w.to_dense()?;
        let rho = dense.t().mapv(|z| z.conj()).dot(&dense);
        let raw_trace = trace_re(&rho);
        return finish(ReducedDensity {
            dimension,
            block_size,
            parts: Parts::Dense(rho),
            raw_trace,
        });
    };

    let source = match w.source_amplitude() {
        Some(phi) => phi,
        None => w.w_a().clone(),
    };
    let live = live_modes(&source);
    let m = restrict(&source, &live);
    let gram = eigen::gram(m.view());
    let gram_t = blocks
        .iter()
        .any(|b| b.transposed)
        .then(|| eigen::outer_gram(m.view()));
    let raw_trace: f64 = blocks
        .iter()
        .map(|b| {
            let g = if b.transposed { gram_t.as_ref().unwrap() } else { &gram };
            b.weight * trace_re(g)
        })
        .sum();
    finish(ReducedDensity {
        dimension,
        block_size,
        parts: Parts::Structured { gram, gram_t, blocks },
        raw_trace,
    })
}

fn finish(rho: ReducedDensity) -> Result<ReducedDensity> {
    if !(rho.raw_trace > 0.0) || !rho.raw_trace.is_finite() {
        return Err(Error::Degenerate("W†W has zero trace".into()));
    }
    Ok(rho)
}

impl ReducedDensity {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Tr ρ (one up to rounding).
    pub fn trace(&self) -> f64 {
        let t = match &self.parts {
            Parts::Structured { gram, gram_t, blocks } => blocks
                .iter()
                .map(|b| {
                    let g = if b.transposed { gram_t.as_ref().unwrap() } else { gram };
                    b.weight * trace_re(g)
                })
                .sum(),
            Parts::Dense(rho) => trace_re(rho),
        };
        t / self.raw_trace
    }

    /// Full spectrum of ρ, descending (zeros for inactive modes included).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut all = match &self.parts {
            Parts::Structured { gram, gram_t, blocks } => {
                let direct = eigen::hermitian_eigenvalues(gram.view())?;
                let transposed = match gram_t {
                    Some(g) => eigen::hermitian_eigenvalues(g.view())?,
                    None => Vec::new(),
                };
                let mut out = Vec::with_capacity(self.dimension);
                for b in blocks {
                    let src = if b.transposed { &transposed } else { &direct };
                    out.extend(src.iter().map(|v| b.weight * v / self.raw_trace));
                }
                out
            }
            Parts::Dense(rho) => eigen::hermitian_eigenvalues(rho.view())?
                .into_iter()
                .map(|v| v / self.raw_trace)
                .collect(),
        };
        all.resize(self.dimension, 0.0);
        all.sort_by(|a, b| b.total_cmp(a));
        Ok(all)
    }

    /// Dense ρ in the physical basis (verification only).
    pub fn to_dense(&self) -> Array2<C64> {
        match &self.parts {
            Parts::Dense(rho) => rho.mapv(|z| z / self.raw_trace),
            Parts::Structured { gram, gram_t, blocks } => {
                let m = gram.nrows();
                let n = self.block_size;
                let mut out = Array2::zeros((self.dimension, self.dimension));
                for (k, b) in blocks.iter().enumerate() {
                    let g = if b.transposed { gram_t.as_ref().unwrap() } else { gram };
                    let mut blk = out.slice_mut(ndarray::s![k * n..k * n + m, k * n..k * n + m]);
                    blk.scaled_add(C64::new(b.weight / self.raw_trace, 0.0), g);
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    /// |z_i|², descending, one per degenerate pair.
    pub pair_weights: Vec<f64>,
    /// Largest |λ_{2i} − λ_{2i+1}| seen while pairing.
    pub max_pair_mismatch: f64,
}

impl SchmidtSpectrum {
    /// Σ 2|z_i|² (one for a normalized state).
    pub fn total(&self) -> f64 {
        2.0 * self.pair_weights.iter().sum::<f64>()
    }
}

/// Pairs a full ρ spectrum (any order) into Slater weights.
pub fn pair_eigenvalues(mut eigs: Vec<f64>) -> Result<SchmidtSpectrum> {
    eigs.sort_by(|a, b| b.total_cmp(a));
    if eigs.len() % 2 == 1 {
        eigs.push(0.0);
    }
    let mut pair_weights = Vec::with_capacity(eigs.len() / 2);
    let mut max_pair_mismatch = 0.0f64;
    for (index, p) in eigs.chunks_exact(2).enumerate() {
        let mismatch = (p[0] - p[1]).abs();
        if mismatch > PAIR_MISMATCH_LIMIT || !mismatch.is_finite() {
            return Err(Error::Pairing { index, mismatch });
        }
        max_pair_mismatch = max_pair_mismatch.max(mismatch);
        pair_weights.push((0.5 * (p[0] + p[1])).max(0.0));
    }
    Ok(SchmidtSpectrum {
        pair_weights,
        max_pair_mismatch,
    })
}

pub fn schmidt_spectrum(rho: &ReducedDensity) -> Result<SchmidtSpectrum> {
    pair_eigenvalues(rho.eigenvalues()?)
}

/// Same, for an explicit Hermitian ρ (normalized here to unit trace).
pub fn schmidt_spectrum_dense(rho: ArrayView2<C64>) -> Result<SchmidtSpectrum> {
    let t = trace_re(&rho.to_owned());
    if !(t > 0.0) {
        return Err(Error::Degenerate("density matrix has zero trace".into()));
    }
    let eigs = eigen::hermitian_eigenvalues(rho)?;
    pair_eigenvalues(eigs.into_iter().map(|v| v / t).collect())
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// ε = ln 2 − 2 Σ |z_i|² ln(2|z_i|²), with 0·ln 0 = 0.
pub fn von_neumann_entropy(spec: &SchmidtSpectrum) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    ln2 - 2.0 * spec.pair_weights.iter().map(|&w| xlnx(2.0 * w) / 2.0).sum::<f64>()
}

/// Number of weights above `tol` times the largest weight.
pub fn slater_rank(spec: &SchmidtSpectrum, tol: f64) -> usize {
    let max = spec.pair_weights.iter().cloned().fold(0.0, f64::max);
    spec.pair_weights.iter().filter(|&&w| w > tol * max).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    /// nats
    pub entropy: f64,
    pub slater_rank: usize,
    pub spectrum: SchmidtSpectrum,
    /// ε > ln 2 + [`GENUINE_TOLERANCE`].
    pub genuine: bool,
}

impl EntropyResult {
    pub fn from_spectrum(spectrum: SchmidtSpectrum) -> Self {
        let entropy = von_neumann_entropy(&spectrum);
        EntropyResult {
            entropy,
            slater_rank: slater_rank(&spectrum, DEFAULT_RANK_TOLERANCE),
            genuine: entropy > std::f64::consts::LN_2 + GENUINE_TOLERANCE,
            spectrum,
        }
    }
}

pub fn evaluate(w: &SlaterMatrix) -> Result<EntropyResult> {
    let rho = reduced_density(w)?;
    Ok(EntropyResult::from_spectrum(schmidt_spectrum(&rho)?))
}

/// Entropies of several 1D spin configurations sharing one pair amplitude.
///
/// The Gram eigenproblems are solved once and reused by every layout.
pub fn evaluate_spins_1d(phi: ArrayView2<C64>, spins: &[SpinConfig]) -> Result<Vec<EntropyResult>> {
    let phi_owned = phi.to_owned();
    let m = restrict(&phi_owned, &live_modes(&phi_owned));
    // The transposed block's Gram is conj((Φᵀ)†Φᵀ) = ΦΦ†.
    let [(direct, tr_d), (transposed, tr_t)] = eigen::gram_spectra(m.view())?;
    spins
        .iter()
        .map(|&spin| {
            let w = assemble_w(symmetrize_blocks(phi)?, spin)?;
            let (blocks, _) = structured_blocks(&w).ok_or_else(|| {
                Error::Degenerate(format!("layout for {spin} is not block diagonal"))
            })?;
            let raw: f64 = blocks
                .iter()
                .map(|b| b.weight * if b.transposed { tr_t } else { tr_d })
                .sum();
            let mut eigs = Vec::with_capacity(w.dimension());
            for b in &blocks {
                let src = if b.transposed { &transposed } else { &direct };
                eigs.extend(src.iter().map(|v| b.weight * v / raw));
            }
            eigs.resize(w.dimension(), 0.0);
            Ok(EntropyResult::from_spectrum(pair_eigenvalues(eigs)?))
        })
        .collect()
}

/// Schmidt entropy −Σ s_k² ln s_k² of Φ treated as two distinguishable
/// particles (singular values normalized so Σ s_k² = 1).
pub fn distinguishable_entropy(phi: ArrayView2<C64>) -> Result<f64> {
    let s = eigen::singular_values(phi)?;
    let total: f64 = s.iter().map(|v| v * v).sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("zero pair amplitude".into()));
    }
    Ok(-s.iter().map(|v| xlnx(v * v / total)).sum::<f64>())
}
