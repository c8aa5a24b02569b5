use qgf_core::overlap::{OverlapProblem, OverlapTable, TableMode};
use qgf_core::pauli::{build_tfim, PauliSum};
use qgf_core::scan::{axis, grid_scan, iterative_deepen, PointStatus, ScanGrid};
use qgf_core::state::{prepare_qaoa_random, StateVector};

fn problem(n: usize, seed: u64) -> OverlapProblem {
    let h = build_tfim(n, 1.0, 2.0, true).unwrap().shift_spectrum(15.0);
    OverlapProblem::new(h, prepare_qaoa_random(n, seed).unwrap()).unwrap()
}

fn table(p: &OverlapProblem) -> OverlapTable {
    p.compute(0.16, 50, &TableMode::exact()).unwrap()
}

#[test]
fn error_is_nonmonotone_in_width() {
    let p = problem(8, 0);
    let l0 = p.spectrum().unwrap().ground_energy();
    let t = table(&p);
    for mu in [-2.0, -3.0, -4.0] {
        let scan = grid_scan(&t, &ScanGrid::new(vec![mu], axis((0.1, 3.0, 0.1)).unwrap()).unwrap()).unwrap();
        let errs: Vec<f64> = scan.points.iter().map(|q| (q.energy - l0).abs()).collect();
        let arg = (0..errs.len()).min_by(|&a, &b| errs[a].total_cmp(&errs[b])).unwrap();
        assert!(arg > 0 && arg + 1 < errs.len(), "mu {mu}: minimum at edge {arg}");
    }
}

#[test]
fn exact_energies_are_variational() {
    let p = problem(6, 3);
    let l0 = p.spectrum().unwrap().ground_energy();
    let scan = grid_scan(&table(&p), &ScanGrid::from_ranges((l0 + 2.0, l0 - 3.0, 0.25), (0.1, 3.0, 0.3)).unwrap()).unwrap();
    for q in scan.points.iter().filter(|q| q.energy.is_finite()) {
        // rounding in D_k is amplified by 1/|den| for filters far off the spectrum
        let slack = 1e-9f64.max(1e-13 / q.denominator_magnitude);
        assert!(q.energy >= l0 - slack, "{q:?}");
    }
}

#[test]
fn finer_grid_never_worse_and_order_free() {
    let p = problem(6, 1);
    let l0 = p.spectrum().unwrap().ground_energy();
    let t = table(&p);
    let coarse = ScanGrid::from_ranges((l0, l0 - 1.0, 0.2), (0.2, 3.0, 0.4)).unwrap();
    let fine = ScanGrid::from_ranges((l0, l0 - 1.0, 0.1), (0.2, 3.0, 0.2)).unwrap();
    let a = grid_scan(&t, &coarse).unwrap().best;
    let b = grid_scan(&t, &fine).unwrap().best;
    assert!(b.energy <= a.energy);
    let mut mu = fine.mu_values().to_vec();
    let mut inv = fine.inv_sigma_sq_values().to_vec();
    mu.reverse();
    inv.rotate_left(3);
    let c = grid_scan(&t, &ScanGrid::new(mu, inv).unwrap()).unwrap().best;
    assert_eq!(b.energy, c.energy);
}

#[test]
fn staged_and_direct_runs_agree() {
    let p = problem(6, 2);
    let l0 = p.spectrum().unwrap().ground_energy();
    let grid = ScanGrid::from_ranges((l0, l0 - 1.0, 0.1), (0.1, 3.0, 0.1)).unwrap();
    let (staged, t1) = iterative_deepen(&p, 0.08, &[30, 50], &grid, &TableMode::exact()).unwrap();
    let (direct, t2) = iterative_deepen(&p, 0.08, &[50], &grid, &TableMode::exact()).unwrap();
    assert!((staged[1].energy - direct[0].energy).abs() < 1e-12);
    assert_eq!(t1.len(), t2.len());
    assert!((staged[0].phi_m - 2.4).abs() < 1e-12 && (staged[1].phi_m - 4.0).abs() < 1e-12);
}

#[test]
fn degenerate_points_are_flagged() {
    let h = PauliSum::new(1, [(1.0, "Z".parse().unwrap())], 0.0).unwrap();
    let p = OverlapProblem::new(h, StateVector::zero(1).unwrap()).unwrap();
    let t = p.compute(0.1, 200, &TableMode::exact()).unwrap();
    // the only eigenvalue is 1; a narrow filter at -3 weighs it by e^{-64}
    let scan = grid_scan(&t, &ScanGrid::new(vec![-3.0, 1.0], vec![4.0]).unwrap()).unwrap();
    assert!(scan.points[0].energy.is_nan());
    assert_eq!(scan.points[0].status, PointStatus::Degenerate);
    assert_eq!(scan.best.mu, 1.0);
    assert!((scan.best.energy - 1.0).abs() < 1e-12);
    let mut csv = Vec::new();
    scan.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("mu,inv_sigma_sq,energy,denom_magnitude,status\n"));
    assert!(text.contains("DEGENERATE"));
    assert!(matches!(
        grid_scan(&t, &ScanGrid::new(vec![-3.0], vec![4.0]).unwrap()),
        Err(qgf_core::QgfError::AllDegenerate)
    ));
}
