use iontrap_core::model::build_h_transformed;
use iontrap_core::oracle::{
    cutoff_convergence, hermitian_eigensystem, nearest_eigenpair, validate_series_solution,
};
use iontrap_core::series::{
    case1_closed_form, case1_implied_eps, case2_closed_form, series_to_fock,
    special_case_small_eta, terminate_general, SolverOptions,
};
use iontrap_core::{Branch, Error, FockBasis, ModelParams, Verdict};

fn basis() -> FockBasis {
    FockBasis::with_spin(150).unwrap()
}

#[test]
fn case1_reference_point_is_an_eigenstate() {
    let sol = case1_closed_form(0.2, 0.0, Branch::Plus).unwrap();
    assert!((sol.rabi() - 1.959_591_8).abs() < 1e-6);
    let report = validate_series_solution(&sol, basis()).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!((report.nearest_eigenvalue - 1.0).abs() < 1e-6);
    assert!(report.overlap > 1.0 - 1e-6);
}

#[test]
fn case1_both_branches_validate() {
    for (eta, eps) in [(0.3, 0.2), (0.6, -0.3), (0.9, 0.4)] {
        for branch in Branch::BOTH {
            let Ok(sol) = case1_closed_form(eta, eps, branch) else {
                continue;
            };
            let report = validate_series_solution(&sol, basis()).unwrap();
            assert!(report.passed(), "({eta},{eps},{branch}): {report:?}");
        }
    }
}

#[test]
fn implied_detuning_reproduces_identity_energy() {
    // (Ω=0.5, η=0.1): E = 0.53625 at ε₊ = −0.46375.
    let eps = case1_implied_eps(0.5, 0.1, Branch::Plus);
    let p = ModelParams::from_eps(0.5, 0.1, eps).unwrap();
    let h = build_h_transformed(&p, basis()).unwrap();
    let s = hermitian_eigensystem(&h, false).unwrap();
    let pair = nearest_eigenpair(&s, 0.536_25).unwrap();
    assert!((pair.value - 0.536_25).abs() < 1e-6);
}

#[test]
fn case2_reference_roots_validate() {
    let sols = case2_closed_form(0.5, 0.1).unwrap();
    assert_eq!(sols.len(), 4);
    let mut energies: Vec<f64> = sols.iter().map(|s| s.energy).collect();
    energies.sort_by(f64::total_cmp);
    energies.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    assert_eq!(energies.len(), 2);
    assert!((energies[0] - 1.015_821_268_292_495).abs() < 1e-12);
    assert!((energies[1] - 1.541_053_731_707_505).abs() < 1e-12);
    for sol in &sols {
        let report = validate_series_solution(sol, basis()).unwrap();
        assert!(report.passed(), "{report:?}");
        series_to_fock(sol, basis()).unwrap();
    }
}

#[test]
fn perturbed_energy_fails_validation() {
    let mut sol = case1_closed_form(0.4, 0.1, Branch::Plus).unwrap();
    sol.energy += 1e-2;
    let report = validate_series_solution(&sol, basis()).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    assert!((report.eigen_gap - 1e-2).abs() < 1e-4);
}

#[test]
fn small_basis_is_inconclusive() {
    let sol = case1_closed_form(1.0, 0.0, Branch::Plus).unwrap();
    let report = validate_series_solution(&sol, FockBasis::with_spin(8).unwrap()).unwrap();
    assert!(matches!(report.verdict, Verdict::Inconclusive { .. }), "{report:?}");
}

#[test]
fn order_three_solution_validates() {
    let found = terminate_general(3, Branch::Plus, 0.3, None, &SolverOptions::default()).unwrap();
    let sol = &found.solution;
    let oracle = found.oracle_eigenvalue.unwrap();
    assert!((oracle - (3.0 + sol.eps())).abs() < 1e-6);
    assert!(found.jacobian_rank <= 3);
    assert!(validate_series_solution(sol, basis()).unwrap().passed());
}

#[test]
fn special_case_matches_decoupled_oracle() {
    let (rabi, eps) = (2.0, 1.0);
    let p = ModelParams::from_eps(rabi, 0.0, eps).unwrap();
    let h = build_h_transformed(&p, FockBasis::with_spin(10).unwrap()).unwrap();
    let s = hermitian_eigensystem(&h, false).unwrap();
    for sol in special_case_small_eta(rabi, eps).unwrap() {
        let pair = nearest_eigenpair(&s, sol.energy).unwrap();
        assert!((pair.value - sol.energy).abs() < 1e-12);
    }
}

#[test]
fn small_eta_case1_approaches_special_case() {
    // At η → 0 the order-one manifold passes through Ω = 2, E = 1 + ε with ε → 0.
    let sol = case1_closed_form(1e-3, 0.0, Branch::Plus).unwrap();
    assert!((sol.rabi() - 2.0).abs() < 1e-5);
    let [upper, _] = special_case_small_eta(2.0, 0.0).unwrap();
    assert!((upper.energy - 2.0).abs() < 1e-12);
}

#[test]
fn convergence_reports() {
    let sol = case1_closed_form(0.2, 0.0, Branch::Plus).unwrap();
    let r = cutoff_convergence(&sol.params, sol.energy, &[60, 80]).unwrap();
    assert!(r.converged, "{r:?}");
    assert!(r.final_error < 1e-8);

    let p = ModelParams::new(1.0, 1.0, 0.0).unwrap();
    let r = cutoff_convergence(&p, 2.0, &[4, 6]).unwrap();
    assert!(!r.converged, "{r:?}");
}

#[test]
fn solver_rejects_zero_eta() {
    let err = terminate_general(2, Branch::Minus, 0.0, None, &SolverOptions::default()).unwrap_err();
    assert_eq!(err, Error::SingularRecurrence);
}
