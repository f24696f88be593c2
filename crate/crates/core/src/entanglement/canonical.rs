//! Slater canonical form W = U Z Uᵀ of a complex antisymmetric matrix.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;

use super::eigen::hermitian_eigen;
use crate::error::{Error, Result};

/// Largest W handled (the form is built from a dense eigendecomposition).
pub const CANONICAL_MAX_DIM: usize = 256;

const RECONSTRUCTION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Unitary; columns 2i, 2i+1 span the i-th Slater pair.
    pub u: Array2<C64>,
    /// z_i ≥ 0, descending. Z has blocks [[0, z_i], [−z_i, 0]].
    pub z: Vec<f64>,
}

impl CanonicalForm {
    pub fn z_matrix(&self) -> Array2<C64> {
        let n = self.u.nrows();
        let mut zm = Array2::zeros((n, n));
        for (i, &z) in self.z.iter().enumerate() {
            zm[[2 * i, 2 * i + 1]] = C64::new(z, 0.0);
            zm[[2 * i + 1, 2 * i]] = C64::new(-z, 0.0);
        }
        zm
    }

    pub fn reconstruct(&self) -> Array2<C64> {
        self.u.dot(&self.z_matrix()).dot(&self.u.t())
    }
}

fn orthogonalize(v: &mut Array1<C64>, basis: &[Array1<C64>]) {
    // two passes for stability
    for _ in 0..2 {
        for b in basis {
            let c: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            v.scaled_add(-c, b);
        }
    }
}

fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Picks the column of `space` with the largest component outside `chosen`.
fn next_vector(space: &[Array1<C64>], chosen: &[Array1<C64>]) -> Option<Array1<C64>> {
    space
        .iter()
        .map(|c| {
            let mut v = c.clone();
            orthogonalize(&mut v, chosen);
            let n = norm(&v);
            (n, v)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .filter(|(n, _)| *n > 1e-6)
        .map(|(n, v)| v.mapv(|z| z / n))
}

/// Unitary U and z_i ≥ 0 with W = U Z Uᵀ.
pub fn slater_canonical_form(w: ArrayView2<C64>) -> Result<CanonicalForm> {
    let n = w.nrows();
    if n != w.ncols() || n == 0 {
        return Err(Error::Degenerate(format!("W must be square, got {:?}", w.dim())));
    }
    if n > CANONICAL_MAX_DIM {
        return Err(Error::GridTooLarge(format!(
            "canonical form limited to dimension {CANONICAL_MAX_DIM}, got {n}"
        )));
    }
    let skew = w
        .iter()
        .zip(w.t().iter())
        .map(|(a, b)| (a + b).norm())
        .fold(0.0, f64::max);
    let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if skew > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Degenerate(format!("W is not antisymmetric (|W + Wᵀ| = {skew:e})")));
    }

    let wwh = w.dot(&w.t().mapv(|z| z.conj()));
    let (vals, vecs) = hermitian_eigen(wwh.view())?;
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    // Eigenvalues of WW† below the rounding floor carry no information:
    // z there is only known to ~sqrt(ε·λmax).
    let null_cut = 16.0 * f64::EPSILON * n as f64 * lmax;
    let cluster_tol = 1e-9 * lmax;

    let mut cols: Vec<Array1<C64>> = Vec::with_capacity(n);
    let mut z = Vec::new();
    // clusters in descending order
    let mut hi = n;
    while hi > 0 && vals[hi - 1] > null_cut {
        let mut lo = hi - 1;
        while lo > 0 && vals[lo - 1] > null_cut && vals[hi - 1] - vals[lo - 1] <= cluster_tol {
            lo -= 1;
        }
        let space: Vec<Array1<C64>> = (lo..hi).map(|k| vecs.column(k).to_owned()).collect();
        let zval = (vals[lo..hi].iter().sum::<f64>() / (hi - lo) as f64).sqrt();
        for _ in 0..(hi - lo) / 2 {
            let Some(u1) = next_vector(&space, &cols) else {
                break;
            };
            let mut u2 = w.dot(&u1.mapv(|c| c.conj())).mapv(|c| -c / zval);
            let mut prior = cols.clone();
            prior.push(u1.clone());
            orthogonalize(&mut u2, &prior);
            let n2 = norm(&u2);
            u2.mapv_inplace(|c| c / n2);
            cols.push(u1);
            cols.push(u2);
            z.push(zval);
        }
        hi = lo;
    }
    // null space: remaining eigenvectors, paired with z = 0
    let null: Vec<Array1<C64>> = (0..n).map(|k| vecs.column(k).to_owned()).collect();
    while cols.len() < n {
        let Some(v) = next_vector(&null, &cols) else {
            return Err(Error::Reconstruction(f64::NAN));
        };
        cols.push(v);
        if cols.len() % 2 == 0 {
            z.push(0.0);
        }
    }

    let mut u = Array2::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        u.column_mut(j).assign(c);
    }
    let form = CanonicalForm { u, z };
    let residual = (&form.reconstruct() - &w)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if residual > RECONSTRUCTION_LIMIT * scale.max(1.0) {
        return Err(Error::Reconstruction(residual));
    }
    Ok(form)
}
