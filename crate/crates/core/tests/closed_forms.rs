use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use subharmonic::analytic;
use subharmonic::moment_solver::{self, assemble_field_system, solve_atomic_steady_state, solve_field_moments, AtomicSolution};
use subharmonic::verification::relative_error;
use subharmonic::{ModelParams, ParamError};

fn p(e: f64, k: f64, gc: f64) -> ModelParams {
    ModelParams::new(e, k, gc).unwrap()
}

#[test]
fn caption_point_reference_values() {
    let q = p(0.3, 0.8, 0.5);
    let oracle = moment_solver::solve(&q).unwrap();
    let o = oracle.observables;
    assert_abs_diff_eq!(o.mean_photon, 1.028571, epsilon = 1e-6);
    assert_abs_diff_eq!(oracle.fields.n_a, 0.458035, epsilon = 1e-6);
    assert_abs_diff_eq!(oracle.fields.n_b, 0.570536, epsilon = 1e-6);
    assert_abs_diff_eq!(o.var_plus, 1.714286, epsilon = 1e-6);
    assert_abs_diff_eq!(o.var_minus, 7.2, epsilon = 1e-12);
    assert_abs_diff_eq!((o.vacuum_level - o.var_plus) / o.vacuum_level, 0.346939, epsilon = 1e-6);

    assert_abs_diff_eq!(analytic::mean_photon_number(&q), o.mean_photon, epsilon = 1e-13);
    assert_abs_diff_eq!(analytic::uncertainty_bound(&q), 2.4, epsilon = 1e-13);
    // sqrt(1.714286 · 7.2)
    assert_abs_diff_eq!(o.uncertainty_product(), 3.513240, epsilon = 1e-6);
}

#[test]
fn atom_only_reference_points() {
    for (e, eta_a, eta_c, sigma_c) in [(0.3, 0.36, 0.64, 0.48), (0.2, 0.2, 0.8, 0.4)] {
        let a = analytic::atomic_steady_state(&p(e, 0.8, 0.5));
        let m = solve_atomic_steady_state(&p(e, 0.8, 0.5)).unwrap().moments();
        for (x, y) in [(a.eta_a, eta_a), (a.eta_c, eta_c), (a.sigma_c, sigma_c), (m.eta_a, eta_a), (m.sigma_c.re, sigma_c)] {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        assert_eq!(a.eta_b, 0.0);
        assert_abs_diff_eq!(m.eta_b, 0.0, epsilon = 1e-14);
        assert!(m.sigma_a.norm() < 1e-14 && m.sigma_b.norm() < 1e-14);
    }
    assert!(matches!(
        solve_atomic_steady_state(&p(0.0, 0.8, 0.5)).unwrap(),
        AtomicSolution::DegeneratePump(m) if m.eta_c == 1.0
    ));
}

#[test]
fn bare_parametric_values() {
    let q = p(0.3, 0.8, 0.0);
    assert_abs_diff_eq!(analytic::mean_photon_number(&q), 1.285714, epsilon = 1e-6);
    let (na, nb) = analytic::mode_occupations(&q);
    assert_abs_diff_eq!(na, 0.642857, epsilon = 1e-6);
    assert_eq!(na, nb);
    let v = analytic::quadrature_variances(&q);
    assert_abs_diff_eq!(v.var_plus, 2.0 - 1.2 / 1.4, epsilon = 1e-14);
    assert_abs_diff_eq!(v.var_minus, 8.0, epsilon = 1e-13);
    assert_abs_diff_eq!(analytic::squeezing(&q), 0.428571, epsilon = 1e-6);

    let fields = solve_field_moments(&assemble_field_system(&q, &solve_atomic_steady_state(&q).unwrap().moments())).unwrap();
    assert_abs_diff_eq!(fields.n_a, 0.642857, epsilon = 1e-6);
    assert_abs_diff_eq!((fields.ab - fields.ba).norm(), 0.0, epsilon = 1e-14);
    assert_eq!(moment_solver::solve(&q).unwrap().observables.commutator, 2.0);
}

#[test]
fn unpumped_values() {
    let q = p(0.0, 0.8, 0.5);
    assert_eq!(analytic::mean_photon_number(&q), 0.0);
    assert_eq!(analytic::mode_occupations(&q), (0.0, 0.0));
    let v = analytic::quadrature_variances(&q);
    assert_eq!((v.var_plus, v.var_minus), (2.625, 2.625));
    assert_eq!(analytic::squeezing(&q), 0.0);
    assert_eq!(analytic::uncertainty_bound(&p(0.0, 1.3, 0.0)), 2.0);
    assert_abs_diff_eq!(analytic::uncertainty_bound(&p(0.2, 0.8, 0.5)), 2.5, epsilon = 1e-14);
}

#[test]
fn stability_boundary() {
    assert!(ModelParams::new(0.3, 0.8, 0.5).is_ok());
    assert!(matches!(
        ModelParams::new(0.4, 0.8, 0.5),
        Err(ParamError::StabilityViolation { .. })
    ));
    assert!(ModelParams::new(0.0, 1.0, 0.0).is_ok());
}

fn stable_point() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.0f64..0.499, 0.0f64..1.0).prop_map(|(k, frac, gc)| p(frac * k, k, gc * k))
}

proptest! {
    #[test]
    fn closed_forms_agree_with_linear_solve(q in stable_point()) {
        let oracle = moment_solver::solve(&q).unwrap();
        let o = analytic::observables(&q);
        // Near threshold both sides lose digits to the (κ − 2ε) pole.
        let margin = q.kappa() / (q.kappa() - 2.0 * q.epsilon());
        let tol = 1e-12 * margin * margin;
        prop_assert!(relative_error(o.mean_photon, oracle.observables.mean_photon) < tol);
        prop_assert!(relative_error(o.var_plus, oracle.observables.var_plus) < tol);
        prop_assert!(relative_error(o.var_minus, oracle.observables.var_minus) < tol);
        let (na, nb) = analytic::mode_occupations(&q);
        prop_assert!(relative_error(na, oracle.fields.n_a) < tol);
        prop_assert!(relative_error(nb, oracle.fields.n_b) < tol);
    }

    #[test]
    fn cross_moments_vanish(q in stable_point()) {
        let f = moment_solver::solve(&q).unwrap().fields;
        for z in [f.adag_b, f.b_adag, f.a_sq, f.b_sq] {
            prop_assert!(z.norm() < 1e-12);
        }
        if q.epsilon() > 1e-3 {
            prop_assert!(f.ab.re < 0.0 && f.ba.re < 0.0);
            prop_assert!(f.ab.im.abs() < 1e-12 && f.ba.im.abs() < 1e-12);
        }
    }

    #[test]
    fn interaction_lowers_photon_number(e_frac in 0.01f64..0.499, g1 in 0.0f64..0.5, dg in 0.01f64..0.5) {
        let k = 0.8;
        let lo = p(e_frac * k, k, g1);
        let hi = p(e_frac * k, k, g1 + dg);
        prop_assert!(analytic::mean_photon_number(&hi) < analytic::mean_photon_number(&lo));
        prop_assert!(analytic::squeezing(&hi) < analytic::squeezing(&lo));
        prop_assert!(analytic::squeezing(&hi) < analytic::bare_squeezing(&hi));
    }
}
