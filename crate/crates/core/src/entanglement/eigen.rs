//! Thin bridge from ndarray to the dense Hermitian eigensolver.

use faer::linalg::matmul::triangular::{matmul, BlockStructure};
use faer::{Accum, Mat, MatRef, Par, Side};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

fn as_faer<'a>(a: &'a ArrayView2<'a, C64>) -> Option<MatRef<'a, C64>> {
    a.as_slice().map(|s| MatRef::from_row_major_slice(s, a.nrows(), a.ncols()))
}

fn with_faer<T>(a: ArrayView2<C64>, f: impl FnOnce(MatRef<'_, C64>) -> T) -> T {
    match as_faer(&a) {
        Some(m) => f(m),
        None => {
            let owned = a.as_standard_layout().into_owned();
            let view = owned.view();
            f(as_faer(&view).expect("standard layout"))
        }
    }
}

/// Eigenvalues of a Hermitian matrix (lower triangle read), ascending.
pub fn hermitian_eigenvalues(a: ArrayView2<C64>) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Eigen(format!("matrix is not square: {:?}", a.dim())));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    with_faer(a, |m| {
        m.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))
    })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
pub fn hermitian_eigen(a: ArrayView2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = a.nrows();
    with_faer(a, |m| {
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = evd.S();
        let u = evd.U();
        let values = (0..n).map(|i| s[i].re).collect();
        let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
        Ok((values, vectors))
    })
}

/// M†M.
pub fn gram(m: ArrayView2<C64>) -> Array2<C64> {
    let n = m.ncols();
    with_faer(m, |mf| {
        let g = mf.adjoint() * mf;
        Array2::from_shape_fn((n, n), |(i, j)| g[(i, j)])
    })
}

/// MM†.
pub fn outer_gram(m: ArrayView2<C64>) -> Array2<C64> {
    let n = m.nrows();
    with_faer(m, |mf| {
        let g = mf * mf.adjoint();
        Array2::from_shape_fn((n, n), |(i, j)| g[(i, j)])
    })
}

/// Eigenvalues (ascending) and traces of M†M and MM†, each from its own
/// product and eigensolve. Only the lower triangles are formed.
pub fn gram_spectra(m: ArrayView2<C64>) -> Result<[(Vec<f64>, f64); 2]> {
    fn spectrum(g: &Mat<C64>) -> Result<(Vec<f64>, f64)> {
        let trace = (0..g.nrows()).map(|i| g[(i, i)].re).sum();
        if g.nrows() == 0 {
            return Ok((Vec::new(), trace));
        }
        let eigs = g
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok((eigs, trace))
    }
    let one = C64::new(1.0, 0.0);
    let (lower, full) = (BlockStructure::TriangularLower, BlockStructure::Rectangular);
    with_faer(m, |mf| {
        let mut direct = Mat::<C64>::zeros(mf.ncols(), mf.ncols());
        matmul(direct.as_mut(), lower, Accum::Replace, mf.adjoint(), full, mf, full, one, Par::Seq);
        let mut outer = Mat::<C64>::zeros(mf.nrows(), mf.nrows());
        matmul(outer.as_mut(), lower, Accum::Replace, mf, full, mf.adjoint(), full, one, Par::Seq);
        Ok([spectrum(&direct)?, spectrum(&outer)?])
    })
}

/// Singular values, descending.
pub fn singular_values(m: ArrayView2<C64>) -> Result<Vec<f64>> {
    with_faer(m, |mf| mf.singular_values().map_err(|e| Error::Eigen(format!("{e:?}"))))
}
