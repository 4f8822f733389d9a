use std::f64::consts::PI;

use nsh_core::equilibria::constant_solutions;
use nsh_core::functionals::{energy_e, fibration_classify, relative_gradient_residual, Classification};
use nsh_core::nehari::{minimize_ridge, verify_solution, NehariOptions, StartStatus};
use nsh_core::tiling::{periodic_cell, tiling_report, torus_shift};
use nsh_core::{Basis, DomainSpec, Params};

fn small_box() -> std::sync::Arc<Basis> {
    Basis::new(DomainSpec::neumann_box(&[2.0 * PI, 2.0 * PI], 1.0).unwrap(), 8).unwrap()
}

#[test]
fn ridge_minimizer_is_a_nehari_critical_point() {
    let basis = small_box();
    let p = Params::new(-0.5, 3.0).unwrap();
    let res = minimize_ridge(&basis, &p, &NehariOptions::default()).unwrap();
    assert!(res.converged);
    assert!(res.l_value.abs() <= 1e-8 * res.q);
    assert!(res.h_value < 0.0);
    assert!(relative_gradient_residual(&res.u, &p) <= 1e-6);
    let fib = fibration_classify(&res.u, &p).unwrap();
    assert_eq!(fib.classification, Classification::NonMonotonous);
    assert!((fib.ridge_t.unwrap() - 1.0).abs() < 1e-8);
    assert!(verify_solution(&res.u, &p, None, 1e-8).all_passed);

    let cs = constant_solutions(&p, basis.domain()).unwrap();
    assert!(res.energy < cs.e_minus);
    for start in res.starts.iter().filter(|s| s.status == StartStatus::Converged) {
        if let Some(e) = start.energy {
            assert!(res.energy <= e + 1e-12);
        }
    }
}

#[test]
fn reflected_solution_solves_the_torus_problem() {
    let p = Params::new(-0.5, 3.0).unwrap();
    let res = minimize_ridge(&small_box(), &p, &NehariOptions::default()).unwrap();
    let (_, cell, report) = tiling_report(&res.u, &p, &[2, 2]).unwrap();
    assert!(report.cell_residual.relative <= 1e-6);
    assert!(report.evenness_error <= 1e-12);
    assert!(report.additivity_error <= 1e-10);
    assert!((energy_e(&cell, &p) / (4.0 * res.energy) - 1.0).abs() <= 1e-10);
    let moved = torus_shift(&cell, &[1.3, -0.4]).unwrap();
    assert!(relative_gradient_residual(&moved, &p) <= 1e-6);
    assert!(periodic_cell(&cell).is_err());
}
