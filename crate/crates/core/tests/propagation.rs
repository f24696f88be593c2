mod common;

use common::{brute_force_mismatch, free_spreading_error, ground_state_drift};
use fermiscat_core::config::{SolverMode, Trap};
use fermiscat_core::grid::{Grid1D, Grid2D, Vec2};
use fermiscat_core::propagate::checkpoint::{read_state, write_state};
use fermiscat_core::propagate::*;
use fermiscat_core::states::*;
use fermiscat_core::units::Material;
use fermiscat_core::Precision;
use ndarray::Array2;
use num_complex::Complex64 as C64;

fn packet(grid: &Grid1D, x0: f64, sigma: f64, energy: f64, dir: f64, m: &Material) -> Field1D {
    gaussian_1d(grid, &WavepacketSpec::new(Vec2::new(x0, 0.0), sigma, energy, Vec2::new(dir, 0.0)), m).unwrap()
}

fn colliding_pair(n: usize, material: &Material, d: f64) -> (PropagatorState, Propagator1D) {
    let grid = Grid1D::new(n, -300.0, 300.0).unwrap();
    let psi = packet(&grid, -80.0, 20.0, 10.0, 1.0, material);
    let phi = packet(&grid, 80.0, 20.0, 10.0, -1.0, material);
    let pair = assemble_pair_1d(&psi, &phi, material, d).unwrap();
    let ham = Hamiltonian1DPair::new(grid, material.clone(), d, true).unwrap();
    let prop = Propagator1D::new(ham, 0.5, SolverMode::Adi).unwrap();
    let mut state = PropagatorState::new(TwoParticleField::Pair1D(pair));
    state.diagnostics = prop.diagnostics(match &state.field {
        TwoParticleField::Pair1D(p) => p,
        _ => unreachable!(),
    });
    (state, prop)
}

#[test]
fn crank_nicolson_conserves_norm_and_energy() {
    let si = Material::silicon();
    let (mut state, prop) = colliding_pair(256, &si, 0.5);
    let e0 = state.diagnostics.total_energy;
    let mut worst_norm = 0.0f64;
    let mut worst_energy = 0.0f64;
    for _ in 0..400 {
        step_1d(&mut state, &prop).unwrap();
        worst_norm = worst_norm.max((state.diagnostics.norm - 1.0).abs());
        let d = prop.diagnostics(match &state.field {
            TwoParticleField::Pair1D(p) => p,
            _ => unreachable!(),
        });
        worst_energy = worst_energy.max(((d.total_energy - e0) / e0).abs());
    }
    assert!(worst_norm <= 1e-8, "norm drift {worst_norm:e}");
    assert!(worst_energy <= 1e-3, "energy drift {worst_energy:e}");
}

#[test]
fn free_packet_spreads_like_the_continuum() {
    let err = free_spreading_error();
    assert!(err <= 5e-3, "relative width error {err:e}");
}

#[test]
fn adi_agrees_with_the_unsplit_scheme() {
    let si = Material::silicon();
    let grid = Grid1D::new(96, -150.0, 150.0).unwrap();
    let psi = packet(&grid, -40.0, 12.0, 5.0, 1.0, &si);
    let phi = packet(&grid, 40.0, 12.0, 5.0, -1.0, &si);
    let pair = assemble_pair_1d(&psi, &phi, &si, 1.0).unwrap();
    let ham = Hamiltonian1DPair::new(grid, si.clone(), 1.0, true).unwrap();
    let adi = Propagator1D::new(ham.clone(), 0.5, SolverMode::Adi).unwrap();
    let exact = Propagator1D::new(ham, 0.5, SolverMode::Exact).unwrap();
    let (mut a, mut b) = (pair.amp.clone(), pair.amp.clone());
    for _ in 0..100 {
        adi.advance(&mut a);
        exact.advance(&mut b);
    }
    let peak = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = max_abs_diff(&a, &b) / peak;
    assert!(diff <= 1e-3, "ADI vs exact: {diff:e}");
    assert!(matches!(
        Propagator1D::new(
            Hamiltonian1DPair::new(Grid1D::new(EXACT_MAX_POINTS + 1, 0.0, 100.0).unwrap(), si, 1.0, true).unwrap(),
            0.5,
            SolverMode::Exact
        ),
        Err(fermiscat_core::Error::GridTooLarge(_))
    ));
}

#[test]
fn trap_ground_state_is_stationary() {
    let drift = ground_state_drift();
    assert!(drift <= 1e-8, "drift {drift:e}");
}

#[test]
fn checkpoint_round_trip() {
    let si = Material::silicon();
    let (mut state, prop) = colliding_pair(64, &si, 1.0);
    for _ in 0..3 {
        step_1d(&mut state, &prop).unwrap();
    }
    let mut buf = Vec::new();
    write_state(&mut buf, &state, Precision::Complex128).unwrap();
    assert_eq!(read_state(&mut buf.as_slice()).unwrap(), state);

    let mut buf32 = Vec::new();
    write_state(&mut buf32, &state, Precision::Complex64).unwrap();
    let back = read_state(&mut buf32.as_slice()).unwrap();
    let (TwoParticleField::Pair1D(a), TwoParticleField::Pair1D(b)) = (&back.field, &state.field) else {
        unreachable!()
    };
    assert!(max_abs_diff(&a.amp, &b.amp) <= 1e-6 * b.amp.iter().map(|z| z.norm()).fold(0.0, f64::max));
    assert_eq!(back.t, state.t);

    buf[0] = b'X';
    assert!(matches!(read_state(&mut buf.as_slice()), Err(fermiscat_core::Error::Format(_))));
}

#[test]
fn factorized_initial_state_is_the_product_state() {
    let gaas = Material::gallium_arsenide();
    let trap = Trap {
        omega_energy: 2.0,
        center: Vec2::new(20.0, 0.0),
    };
    let sigma = trap.ground_sigma(&gaas);
    let particle = Grid2D::new(Grid1D::new(32, -80.0, 120.0).unwrap(), Grid1D::new(32, -100.0, 100.0).unwrap());
    let incoming = WavepacketSpec::new(Vec2::new(-10.0, 0.0), sigma, 1.0, Vec2::new(1.0, 0.0));
    let (cm_grid, rel_grid) = aligned_cm_rel_grids(&particle, 2, 2).unwrap();
    let field = assemble_cm_2d(&incoming, &trap, &gaas, &cm_grid, &rel_grid).unwrap();
    let recon = reconstruct_pair_2d(&field, &particle).unwrap();

    let psi = gaussian_2d(&particle, &incoming, &gaas).unwrap();
    let phi = harmonic_ground_2d(&particle, &trap, &gaas).unwrap();
    let psi_flat: Vec<C64> = psi.amp.iter().cloned().collect();
    let phi_flat: Vec<C64> = phi.amp.iter().cloned().collect();
    let mut direct = Array2::from_shape_fn(recon.dim(), |(i, j)| psi_flat[i] * phi_flat[j]);
    let area = particle.cell_area();
    let norm = direct.iter().map(|z| z.norm_sqr()).sum::<f64>() * area * area;
    direct.mapv_inplace(|z| z / norm.sqrt());
    let peak = direct.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(max_abs_diff(&recon, &direct) / peak <= 1e-10);

    // A sigma other than the trap's does not factorize.
    let wrong = WavepacketSpec::new(Vec2::new(-10.0, 0.0), 1.5 * sigma, 1.0, Vec2::new(1.0, 0.0));
    assert!(matches!(
        assemble_cm_2d(&wrong, &trap, &gaas, &cm_grid, &rel_grid),
        Err(fermiscat_core::Error::Factorization(_))
    ));
}

#[test]
fn factorized_propagation_matches_brute_force_4d() {
    let err = brute_force_mismatch(100);
    assert!(err <= 1e-6, "factorized vs brute force: {err:e}");
}

#[test]
fn brute_force_refuses_large_grids() {
    let grid = Grid2D::square(BRUTE_FORCE_MAX_POINTS + 1, -10.0, 10.0).unwrap();
    let trap = Trap {
        omega_energy: 2.0,
        center: Vec2::default(),
    };
    assert!(matches!(
        BruteForce4D::new(grid, &Material::gallium_arsenide(), &trap, 1.0, true, 1.0),
        Err(fermiscat_core::Error::GridTooLarge(_))
    ));
}
