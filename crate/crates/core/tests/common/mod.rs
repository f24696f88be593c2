#![allow(dead_code)]

use fermiscat_core::config::{SolverMode, Trap};
use fermiscat_core::grid::{Grid1D, Grid2D, Vec2};
use fermiscat_core::propagate::*;
use fermiscat_core::states::*;
use fermiscat_core::units::{Material, HBAR};
use nalgebra::DMatrix;
use ndarray::{Array2, Array4};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, m), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
    let a = random_matrix(rng, n, n);
    &a - &a.t()
}

pub fn to_na(a: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn from_na(a: &DMatrix<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Squared singular values of `w`, normalized to unit sum, descending.
pub fn normalized_sv2(w: &Array2<C64>) -> Vec<f64> {
    let s = to_na(w).singular_values();
    let mut v: Vec<f64> = s.iter().map(|x| x * x).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigs(a: &Array2<C64>) -> Vec<f64> {
    let e = to_na(a).symmetric_eigen();
    let mut v: Vec<f64> = e.eigenvalues.iter().cloned().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Random unitary from the QR factor of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
    let q = to_na(&random_matrix(rng, n, n)).qr().q();
    from_na(&q)
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// −Σ λ ln λ.
pub fn shannon(values: &[f64]) -> f64 {
    -values.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// Variance of the first particle's marginal density.
pub fn marginal_variance(pair: &PairField1D) -> f64 {
    let n = pair.grid.len();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p: f64 = pair.amp.row(i).iter().map(|z| z.norm_sqr()).sum();
        let x = pair.grid.coordinate(i);
        m0 += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    let mean = m1 / m0;
    m2 / m0 - mean * mean
}

/// Largest relative deviation of a free GaAs packet's width from
/// σ(t) = σ sqrt(1 + (ħt/2mσ²)²) over 200 fs.
pub fn free_spreading_error() -> f64 {
    let gaas = Material::gallium_arsenide();
    let grid = Grid1D::new(384, -160.0, 160.0).unwrap();
    let sigma = 10.0;
    let spec = WavepacketSpec::new(Vec2::new(0.0, 0.0), sigma, 0.0, Vec2::new(1.0, 0.0));
    let psi = gaussian_1d(&grid, &spec, &gaas).unwrap();
    let pair = assemble_pair_1d(&psi, &psi, &gaas, 100.0).unwrap();
    let ham = Hamiltonian1DPair::new(grid, gaas.clone(), 100.0, false).unwrap();
    let dt = 0.5;
    let prop = Propagator1D::new(ham, dt, SolverMode::Adi).unwrap();
    let mut state = PropagatorState::new(TwoParticleField::Pair1D(pair));
    let kappa = gaas.kinetic_scale();
    let mut worst = 0.0f64;
    for step in 1..=400 {
        step_1d(&mut state, &prop).unwrap();
        if step % 100 == 0 {
            let t = step as f64 * dt;
            let TwoParticleField::Pair1D(p) = &state.field else { unreachable!() };
            let s = marginal_variance(p).sqrt();
            // ħ/2m = κ/ħ
            let expected = sigma * (1.0 + (kappa * t / (HBAR * sigma * sigma)).powi(2)).sqrt();
            worst = worst.max(((s - expected) / expected).abs());
        }
    }
    worst
}

/// Departure of the discrete trap ground state from stationarity after
/// 500 fs: max of |1 − |⟨ψ₀|ψ(t)⟩|| and the relative density change.
pub fn ground_state_drift() -> f64 {
    let gaas = Material::gallium_arsenide();
    let trap = Trap {
        omega_energy: 2.0,
        center: Vec2::new(0.0, 0.0),
    };
    let grid = Grid2D::square(64, -120.0, 120.0).unwrap();
    let ham = Hamiltonian2DFactors::new(gaas, trap, 2.0, false, grid, grid).unwrap();
    let ground = ham.cm().separable_ground_state().unwrap();
    let prop = FieldPropagator2D::new(ham.cm(), 1.0);
    let mut amp = ground.amp.clone();
    for _ in 0..500 {
        prop.advance(&mut amp);
    }
    let overlap: C64 = ground.amp.iter().zip(amp.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() * grid.cell_area();
    let dens = amp
        .iter()
        .zip(ground.amp.iter())
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let peak = ground.amp.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    (overlap.norm() - 1.0).abs().max(dens / peak)
}

/// Gaussian exp(−(x−c)²/4s² + ikx) sampled on interior nodes; walls are zero.
pub fn raw_gaussian(grid: &Grid2D, c: Vec2, s: f64, k: Vec2) -> Array2<C64> {
    let (nx, ny) = grid.shape();
    Array2::from_shape_fn((nx, ny), |(i, j)| {
        if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
            return C64::new(0.0, 0.0);
        }
        let p = grid.point(i, j) - c;
        C64::from_polar((-(p.x * p.x + p.y * p.y) / (4.0 * s * s)).exp(), k.x * p.x + k.y * p.y)
    })
}

/// Largest |factorized − brute force| / max|brute force| after `steps` steps
/// of the full planar problem on a 16×16 particle grid.
pub fn brute_force_mismatch(steps: usize) -> f64 {
    const N: usize = 16;
    // Factor grids reach M nodes beyond the particle domain so that their
    // walls never cut the region the full grid can represent.
    const M: isize = 2;
    let gaas = Material::gallium_arsenide();
    let trap = Trap {
        omega_energy: 2.0,
        center: Vec2::new(0.0, 0.0),
    };
    let sigma = trap.ground_sigma(&gaas);
    let half = 10.0 * sigma;
    let particle = Grid2D::square(N, -half, half).unwrap();
    let h = particle.x.spacing();
    let x0 = -half;
    let softening = 5.0;
    let dt = 1.0;

    // Incoming packet 1.5σ from the trapped electron, moving toward it.
    let r1 = Vec2::new(-1.5 * sigma, 0.0);
    let k = Vec2::new(gaas.wavevector(2.0), 0.0);
    let cm_c = (r1 + trap.center) * 0.5;
    let rel_c = r1 - trap.center;
    let sqrt2 = std::f64::consts::SQRT_2;

    // One factorized run per parity sublattice (a+b even/odd on each axis).
    let kk = N as isize / 2 + M;
    let cm_axis = |p: isize| Grid1D::with_spacing(N + 2 * M as usize, x0 + p as f64 * h / 2.0 - M as f64 * h, h).unwrap();
    let rel_axis = |p: isize| Grid1D::with_spacing(2 * kk as usize + 1, p as f64 * h - 2.0 * h * kk as f64, 2.0 * h).unwrap();
    let mut runs = Vec::new();
    for px in 0..2isize {
        for py in 0..2isize {
            let cm_grid = Grid2D::new(cm_axis(px), cm_axis(py));
            let rel_grid = Grid2D::new(rel_axis(px), rel_axis(py));
            let field = FactorizedField2D {
                cm: Field2D {
                    grid: cm_grid,
                    amp: raw_gaussian(&cm_grid, cm_c, sigma / sqrt2, k),
                },
                rel: Field2D {
                    grid: rel_grid,
                    amp: raw_gaussian(&rel_grid, rel_c, sigma * sqrt2, k * 0.5),
                },
            };
            let ham = Hamiltonian2DFactors::new(gaas.clone(), trap, softening, true, cm_grid, rel_grid).unwrap();
            runs.push((field, Propagator2D::new(ham, dt).unwrap()));
        }
    }
    // Node (a, b) on one axis ↦ (sublattice parity, CM index, relative index).
    let locate = |a: usize, b: usize| {
        let (s, c) = ((a + b) as isize, a as isize - b as isize);
        let p = s.rem_euclid(2);
        (p, ((s - p) / 2 + M) as usize, ((c - p) / 2 + kk) as usize)
    };
    let factor_value = |runs: &Vec<(FactorizedField2D, Propagator2D)>, idx: [usize; 4]| {
        let (px, cx, rx) = locate(idx[0], idx[2]);
        let (py, cy, ry) = locate(idx[1], idx[3]);
        let f = &runs[(2 * px + py) as usize].0;
        f.cm.amp[[cx, cy]] * f.rel.amp[[rx, ry]]
    };

    let mut full = FullPair2D {
        grid: particle,
        amp: Array4::zeros((N, N, N, N)),
    };
    for ((xa, ya, xb, yb), v) in full.amp.indexed_iter_mut() {
        let interior = |i: usize| i >= 1 && i <= N - 2;
        if interior(xa) && interior(ya) && interior(xb) && interior(yb) {
            *v = factor_value(&runs, [xa, ya, xb, yb]);
        }
    }
    // Sanity: the sampled product is the physical product state.
    let direct = |ra: Vec2, rb: Vec2| {
        let g = |p: Vec2, c: Vec2, k: Vec2| {
            let d = p - c;
            C64::from_polar((-(d.x * d.x + d.y * d.y) / (4.0 * sigma * sigma)).exp(), k.x * d.x + k.y * d.y)
        };
        g(ra, r1, k) * g(rb, trap.center, Vec2::default())
    };
    let (a, b) = ([5usize, 7], [9usize, 8]);
    let want = direct(particle.point(a[0], a[1]), particle.point(b[0], b[1]));
    let got = full.amp[[a[0], a[1], b[0], b[1]]];
    assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-300), "{got} vs {want}");

    let brute = BruteForce4D::new(particle, &gaas, &trap, softening, true, dt).unwrap();
    for _ in 0..steps {
        brute_force_4d_step(&mut full, &brute).unwrap();
        for (f, p) in runs.iter_mut() {
            p.advance(f);
        }
    }
    let peak = full.amp.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for ((xa, ya, xb, yb), v) in full.amp.indexed_iter() {
        let interior = |i: usize| i >= 1 && i <= N - 2;
        if interior(xa) && interior(ya) && interior(xb) && interior(yb) {
            worst = worst.max((v - factor_value(&runs, [xa, ya, xb, yb])).norm());
        }
    }
    worst / peak
}

