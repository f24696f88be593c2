use std::f64::consts::LN_2;

use fermiscat_core::grid::{Grid2D, Vec2};
use fermiscat_core::runner::*;
use fermiscat_core::states::{FactorizedField2D, Field2D};
use fermiscat_core::{Error, Material, SimulationConfig, SpinConfig};
use ndarray::Array2;
use num_complex::Complex64 as C64;

fn small_wires(d: f64, n: usize, t_end: f64) -> SimulationConfig {
    let mut cfg = SimulationConfig::wires(Material::silicon(), d, n, 20.0, 50.0, t_end).unwrap();
    cfg.dt = 0.5;
    cfg.entropy_stride = 20;
    cfg.output.checkpoint = false;
    cfg
}

#[test]
fn without_coulomb_the_entropy_stays_at_the_floor() {
    let mut cfg = small_wires(0.5, 128, 600.0);
    cfg.coulomb_enabled = false;
    let out = run(&cfg, None).unwrap();
    assert!(out.trace().len() > 10);
    for row in out.trace().rows() {
        assert!((row.entropy - LN_2).abs() <= 1e-6, "t={} ε={}", row.t, row.entropy);
    }
}

#[test]
fn distant_wires_barely_entangle() {
    let out = run(&small_wires(50.0, 256, 1000.0), None).unwrap();
    let plateau = out.plateau();
    assert!(plateau.stationary_value <= LN_2 + 0.01, "{plateau:?}");
}

#[test]
fn spin_traces_are_shifted_copies() {
    let cfg = small_wires(0.5, 128, 900.0);
    let out = run_spins(&cfg, &SpinConfig::ALL, None).unwrap();
    let get = |s| out.for_spin(s).unwrap().trace.entropies();
    let (same, opp, singlet, triplet) = (
        get(SpinConfig::SameSpin),
        get(SpinConfig::OppositeNonFactorizable),
        get(SpinConfig::Singlet),
        get(SpinConfig::Triplet),
    );
    assert!((same[0] - LN_2).abs() <= 1e-3 && (triplet[0] - 2.0 * LN_2).abs() <= 1e-3);
    for i in 0..same.len() {
        assert!((triplet[i] - same[i] - LN_2).abs() <= 1e-9);
        assert!((singlet[i] - triplet[i]).abs() <= 1e-9);
        assert!((opp[i] - same[i]).abs() <= 1e-9);
    }
    // The collision does create entanglement at this distance.
    let peak = same.iter().cloned().fold(0.0, f64::max);
    assert!(peak > LN_2 + 0.02, "peak {peak}");
    for t in &out.traces {
        assert!(t.max_pair_mismatch <= 1e-9 && t.max_trace_error <= 1e-12);
    }
}

#[test]
fn identical_runs_write_identical_traces() {
    let cfg = small_wires(0.5, 96, 300.0);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&cfg, Some(a.path())).unwrap();
    run(&cfg, Some(b.path())).unwrap();
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let header = std::fs::read_to_string(a.path().join("trace.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), TRACE_HEADER);
}

#[test]
fn plateau_detection_is_reproducible_from_the_csv() {
    let cfg = small_wires(0.5, 128, 900.0);
    let dir = tempfile::tempdir().unwrap();
    let out = run(&cfg, Some(dir.path())).unwrap();
    let trace = EntropyTrace::read_csv(&dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.rows(), out.trace().rows());
    let again = detect_plateau(&trace, cfg.plateau_window, cfg.plateau_tol).unwrap();
    assert_eq!(&again, out.plateau());
    let written = std::fs::read_to_string(dir.path().join(PLATEAU_FILE)).unwrap();
    assert!(written.lines().nth(1).unwrap().ends_with(again.to_csv().trim_end()));
}

#[test]
fn resumed_run_matches_an_uninterrupted_one() {
    let full = small_wires(0.5, 96, 400.0);
    let mut first = full.clone();
    first.t_end = 200.0;
    first.output.checkpoint = true;

    let whole = tempfile::tempdir().unwrap();
    run(&full, Some(whole.path())).unwrap();

    let split = tempfile::tempdir().unwrap();
    run(&first, Some(split.path())).unwrap();
    let ckpt = split.path().join(CHECKPOINT_FILE);
    assert!(ckpt.exists());
    resume(&full, &ckpt, Some(split.path())).unwrap();

    let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&whole), read(&split));
}

#[test]
fn a_failed_sweep_entry_does_not_stop_the_others() {
    let base = small_wires(0.5, 64, 100.0);
    let dir = tempfile::tempdir().unwrap();
    // A plain file where the second run wants its directory.
    std::fs::write(dir.path().join("d_1"), "occupied").unwrap();
    let table = sweep(&base, SweepAxis::WireDistance, &[0.5, 1.0], &[SpinConfig::SameSpin], Some(dir.path())).unwrap();
    assert_eq!(table.failures(), 1);
    assert!(table.entries[0].outcome.is_ok());
    assert!(table.entries[1].outcome.is_err());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("d,spin,stationary_entropy_nats"));
    assert!(csv.contains(",error: "));
    assert!(sweep_configs(&base, SweepAxis::WireDistance, &[0.5]).is_err());
}

#[test]
fn sigma_sweeps_share_the_widest_grid() {
    let base = small_wires(0.5, 128, 600.0);
    let cfgs = sweep_configs(&base, SweepAxis::Sigma, &[10.0, 20.0, 30.0]).unwrap();
    let widest = [10.0, 20.0, 30.0]
        .iter()
        .map(|&s| SimulationConfig::wires(Material::silicon(), 0.5, 128, s, 50.0, 600.0).unwrap())
        .map(|c| c.grid_1d().unwrap().extent())
        .fold(0.0, f64::max);
    for (cfg, sigma) in cfgs.iter().zip([10.0, 20.0, 30.0]) {
        assert_eq!(cfg.grid, cfgs[0].grid);
        assert_eq!(cfg.grid_1d().unwrap().extent(), widest);
        assert!(cfg.packets.iter().all(|p| p.sigma == sigma));
    }
}

fn even_field(grid: Grid2D) -> FactorizedField2D {
    let gauss = |g: &Grid2D, c: Vec2, s: f64| {
        let amp = Array2::from_shape_fn(g.shape(), |(i, j)| {
            let d = g.point(i, j) - c;
            C64::new((-(d.x * d.x + d.y * d.y) / (4.0 * s * s)).exp(), 0.0)
        });
        Field2D { grid: *g, amp }
    };
    let rel = Grid2D::square(41, -100.0, 100.0).unwrap();
    FactorizedField2D {
        cm: gauss(&grid, Vec2::new(0.0, 0.0), 10.0),
        rel: gauss(&rel, Vec2::new(0.0, 0.0), 15.0),
    }
}

#[test]
fn exchange_symmetric_amplitude_has_no_antisymmetric_density() {
    let grid = Grid2D::square(21, -50.0, 50.0).unwrap();
    let field = even_field(grid);
    let dens = conditional_density(&field, &grid, Vec2::new(10.0, -5.0)).unwrap();
    assert!(dens.iter().all(|&v| v == 0.0));
    assert!(matches!(
        conditional_density(&field, &grid, Vec2::new(80.0, 0.0)),
        Err(Error::OutsideGrid { .. })
    ));
}

#[test]
fn correlation_of_proportional_fields_is_one() {
    let a = Array2::from_shape_fn((5, 7), |(i, j)| (i * j) as f64 + 0.5 * i as f64);
    assert!((cross_correlation(&a, &(&a * 3.0)).unwrap() - 1.0).abs() < 1e-12);
    assert!(cross_correlation(&a, &Array2::ones((5, 7))).is_err());
}

#[test]
fn figure_ids_parse() {
    for f in Figure::ALL {
        assert_eq!(f.id().parse::<Figure>().unwrap(), f);
    }
    assert!(matches!("fig9".parse::<Figure>(), Err(Error::UnknownFigure(_))));
}
