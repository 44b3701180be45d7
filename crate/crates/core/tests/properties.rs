use iontrap_core::linalg::displacement_elements;
use iontrap_core::model::{build_h_lab, build_h_transformed, displacement_matrix};
use iontrap_core::oracle::hermitian_eigensystem;
use iontrap_core::rwa::{excitation_number, rwa_hamiltonian, RwaScheme};
use iontrap_core::series::{
    case1_closed_form, case2_closed_form, case2_constraint_residual, case2_energies,
    energy_identity_case1,
};
use iontrap_core::states::{cat_identity_overlap, coherent_state};
use iontrap_core::{Branch, FockBasis, ModelParams, OperatorMatrix, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn energy_identity_both_branches(eta in 0.01f64..1.0, eps in -1.0f64..1.0) {
        for branch in Branch::BOTH {
            if let Ok(sol) = case1_closed_form(eta, eps, branch) {
                let want = energy_identity_case1(sol.rabi(), eta);
                prop_assert!((sol.energy - want).abs() < 1e-12);
                prop_assert!(sol.termination_residual < 1e-10);
            }
        }
    }

    #[test]
    fn case1_reflection(eta in 0.01f64..1.0, eps in -1.0f64..1.0) {
        let a = case1_closed_form(eta, eps, Branch::Plus);
        let b = case1_closed_form(eta, -eps, Branch::Minus);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a.energy - b.energy).abs() < 1e-14);
            prop_assert!((a.rabi() - b.rabi()).abs() < 1e-14);
        }
    }

    #[test]
    fn order_two_branches_give_the_same_energies(rabi in 0.0f64..4.0, eta in 0.0f64..1.5) {
        let e = case2_energies(rabi, eta);
        let (p, m) = (sorted(e.plus), sorted(e.minus));
        prop_assert_eq!(p.len(), m.len());
        for (x, y) in p.iter().zip(&m) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn case2_solutions_terminate(rabi in 0.05f64..3.5, eta in 0.05f64..1.0) {
        for sol in case2_closed_form(rabi, eta).unwrap() {
            prop_assert!(sol.termination_residual < 1e-9);
            let r = case2_constraint_residual(rabi, eta, sol.eps(), sol.branch).unwrap();
            prop_assert!(r < 1e-9);
            prop_assert!((sol.energy - 2.0 - sol.branch.sign() * sol.eps()).abs() < 1e-15);
        }
    }

    #[test]
    fn cat_identity(eta in 0.0f64..1.5) {
        let o = cat_identity_overlap(eta, FockBasis::motional(100).unwrap()).unwrap();
        prop_assert!(o > 1.0 - 1e-9);
    }

    #[test]
    fn coherent_overlap(ar in -1.5f64..1.5, ai in -1.5f64..1.5, br in -1.5f64..1.5, bi in -1.5f64..1.5) {
        let basis = FockBasis::motional(60).unwrap();
        let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
        let got = coherent_state(a, basis).unwrap().inner(&coherent_state(b, basis).unwrap()).unwrap();
        let want = (-(a.norm_sqr() + b.norm_sqr()) / 2.0 + a.conj() * b).exp();
        prop_assert!((got - want).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displacement_composition(ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0) {
        let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
        let basis = FockBasis::motional(70).unwrap();
        let lhs = displacement_matrix(a, basis).into_entries() * displacement_matrix(b, basis).into_entries();
        let phase = ((a * b.conj() - a.conj() * b) / 2.0).exp();
        let rhs = displacement_matrix(a + b, basis).into_entries() * phase;
        for i in 0..15 {
            for j in 0..15 {
                prop_assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-10);
            }
        }
        let exact = displacement_elements(a + b, 15);
        for i in 0..15 {
            for j in 0..15 {
                prop_assert!((exact[(i, j)] * phase - lhs[(i, j)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rwa_conserves_excitations(index in 1u32..4, eta in 0.0f64..1.0, m_scheme in any::<bool>()) {
        let scheme = if m_scheme { RwaScheme::M } else { RwaScheme::K };
        let basis = FockBasis::with_spin(25).unwrap();
        let h = rwa_hamiltonian(scheme, index, eta, basis).unwrap();
        let n = excitation_number(basis).unwrap();
        let comm = h.entries() * n.entries() - n.entries() * h.entries();
        prop_assert!(comm.iter().all(|z| z.norm() < 1e-12));
    }
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> OperatorMatrix {
    let raw = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let h = (&raw + raw.adjoint()) * C64::from(0.5);
    OperatorMatrix::new(FockBasis::motional(dim).unwrap(), h).unwrap()
}

#[test]
fn eigensystem_reconstructs_random_hermitian() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for dim in [2, 3, 17, 64, 300] {
        let h = random_hermitian(&mut rng, dim);
        let s = hermitian_eigensystem(&h, true).unwrap();
        let v = s.eigenvectors.unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            s.eigenvalues.iter().map(|&x| C64::from(x)),
        ));
        let err = (&v * d * v.adjoint() - h.entries()).norm() / h.entries().norm();
        assert!(err < 1e-12, "dim {dim}: {err}");
        let ortho = (v.adjoint() * &v - DMatrix::identity(dim, dim)).norm();
        assert!(ortho < 1e-11, "dim {dim}: {ortho}");
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn lab_and_transformed_spectra_agree() {
    let basis = FockBasis::with_spin(120).unwrap();
    for (rabi, eta, eps) in [(0.5, 0.1, -0.3), (3.0, 0.6, 0.25), (1.2, 1.0, 0.0)] {
        let p = ModelParams::from_eps(rabi, eta, eps).unwrap();
        let lab = hermitian_eigensystem(&build_h_lab(&p, basis).unwrap(), false).unwrap();
        let tr = hermitian_eigensystem(&build_h_transformed(&p, basis).unwrap(), false).unwrap();
        for k in 0..40 {
            let d = (lab.eigenvalues[k] - tr.eigenvalues[k]).abs();
            assert!(d < 1e-8, "({rabi},{eta},{eps}) level {k}: {d}");
        }
    }
}
