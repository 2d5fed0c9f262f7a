use antipt_core::params::{AptConfig, Mode, SystemParams};
use antipt_core::spectrum::build_matrix;
use antipt_core::steady::{
    cavity_cubic_coeffs, detect_bistability, kerr_steady_states, linear_steady_state, magnon_cubic_coeffs,
    solve_response_cubic, Regime, ResponseCubic,
};
use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

/// Damped fixed-point iteration on the Kerr-mode occupation; converges for
/// weak nonlinearity and serves only as an independent check.
fn fixed_point_occupation(p: &SystemParams, mode: Mode) -> f64 {
    let h = build_matrix(p).entries;
    let k = mode.index();
    let u = p.kerr(mode);
    let rhs = Vector3::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, -p.omega), Complex64::new(0.0, 0.0));
    let mut n = 0.0;
    for _ in 0..2000 {
        let mut m = h;
        m[(k, k)] -= Complex64::new(2.0 * u * n, 0.0);
        let v = m.lu().solve(&rhs).unwrap();
        let next = v[k].norm_sqr();
        if (next - n).abs() <= 1e-14 * next {
            return next;
        }
        n = 0.5 * n + 0.5 * next;
    }
    n
}

#[test]
fn general_solver_matches_fixed_point_with_coherent_coupling() {
    for &(d, g, mode) in &[(0.0, 0.03, Mode::Cavity), (0.4, 0.03, Mode::Cavity), (0.2, -0.05, Mode::Magnon1)] {
        let p = AptConfig::new(d, 1.6, 1.0).with_g(g).expand(0.05).with_kerr(mode, 0.002).with_omega(0.6);
        let set = kerr_steady_states(&p, mode).unwrap();
        assert_eq!(set.roots.len(), 1);
        let expect = fixed_point_occupation(&p, mode);
        let got = set.roots[0].response;
        assert!((got - expect).abs() <= 1e-10 * expect, "{got} {expect}");
    }
}

#[test]
fn scaling_law_at_suppression() {
    let apt = AptConfig::new(0.0, SQRT_2, 1.0);
    for &(i, u) in &[(0.5, 1e-3), (4.9675e5, 1e-13), (3.0, 0.02)] {
        let x1 = solve_response_cubic(&cavity_cubic_coeffs(&apt, 0.0, u).unwrap(), i).unwrap().roots[0].response;
        let x10 = solve_response_cubic(&cavity_cubic_coeffs(&apt, 0.0, 10.0 * u).unwrap(), i).unwrap().roots[0].response;
        assert!((x1 - x10 * 10f64.powf(2.0 / 3.0)).abs() <= 1e-9 * x1);
    }
}

#[test]
fn bistable_roots_confirmed_by_monotonicity_scan() {
    let cubic = cavity_cubic_coeffs(&AptConfig::new(0.0, SQRT_2, 1.0), 0.3, 0.01).unwrap();
    let set = solve_response_cubic(&cubic, 0.1).unwrap();
    assert_eq!(set.regime, Regime::Bistable);
    let xs: Vec<f64> = (0..=20000).map(|k| 30.0 * k as f64 / 20000.0).collect();
    let changes = xs
        .windows(3)
        .filter(|w| {
            let a = cubic.intensity_at(w[1]) - cubic.intensity_at(w[0]);
            let b = cubic.intensity_at(w[2]) - cubic.intensity_at(w[1]);
            a.signum() != b.signum()
        })
        .count();
    assert_eq!(changes, 2);
    let tp = detect_bistability(&cubic).turning_points;
    assert!((tp[0] - 5.0).abs() < 1e-12 && (tp[1] - 15.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cubic_paths_reproduce_linear(delta in -2.0f64..2.0, gamma in 1.0f64..2.0, omega in 0.01f64..3.0) {
        let apt = AptConfig::new(delta, gamma, 1.0);
        prop_assume!(apt.ep_condition().abs() > 1e-3);
        let lin = linear_steady_state(&apt, omega).unwrap();
        let i = omega * omega;
        let x = solve_response_cubic(&cavity_cubic_coeffs(&apt, 0.0, 0.0).unwrap(), i).unwrap().roots[0].response;
        let y = solve_response_cubic(&magnon_cubic_coeffs(&apt, 0.0).unwrap(), i).unwrap().roots[0].response;
        prop_assert!((x - lin.x).abs() <= 1e-10 * lin.x);
        prop_assert!((y - lin.y).abs() <= 1e-10 * lin.y);
        let general = kerr_steady_states(&apt.expand(0.05).with_omega(omega), Mode::Cavity).unwrap();
        prop_assert!((general.roots[0].response - lin.x).abs() <= 1e-10 * lin.x);
    }

    #[test]
    fn conjugate_symmetry(delta in -2.0f64..2.0, gamma in 1.0f64..2.0, omega in 0.01f64..3.0) {
        let a = AptConfig::new(delta, gamma, 1.0);
        prop_assume!(a.ep_condition().abs() > 1e-3);
        let plus = linear_steady_state(&a, omega).unwrap();
        let minus = linear_steady_state(&a.with_delta(-delta), omega).unwrap();
        prop_assert!((plus.beta1.norm() - minus.beta2.norm()).abs() <= 1e-12 * plus.beta1.norm());
    }

    #[test]
    fn resonant_cubic_is_monostable(c1 in 0.0f64..10.0, c3 in 1e-12f64..10.0) {
        prop_assert_eq!(detect_bistability(&ResponseCubic::new(c3, 0.0, c1)).regime, Regime::Monostable);
    }

    #[test]
    fn roots_have_small_residual(
        c3 in 1e-6f64..1.0, c2 in -1.0f64..1.0, c1 in 0.0f64..1.0, i in 1e-6f64..10.0,
    ) {
        let cubic = ResponseCubic::new(c3, c2, c1);
        let set = solve_response_cubic(&cubic, i).unwrap();
        prop_assert!(!set.roots.is_empty() && set.roots.len() <= 3);
        for w in set.roots.windows(2) {
            prop_assert!(w[0].response < w[1].response);
        }
        for r in &set.roots {
            let x = r.response;
            prop_assert!(x >= 0.0);
            let res = (cubic.intensity_at(x) - i).abs();
            prop_assert!(res <= 1e-10 * i.max(c1 * x).max(c3 * x * x * x), "{res:e}");
        }
    }

    #[test]
    fn kerr_amplitudes_solve_the_cubic(
        delta in -1.0f64..1.0, gamma in 1.0f64..2.0, da in -0.3f64..0.3, u in 1e-4f64..0.05, omega in 0.05f64..1.0,
    ) {
        let p = AptConfig::new(delta, gamma, 1.0).expand(0.05).with_delta_a(da).with_kerr(Mode::Cavity, u).with_omega(omega);
        let set = kerr_steady_states(&p, Mode::Cavity).unwrap();
        for r in &set.roots {
            let s = r.state.unwrap();
            prop_assert!((s.x - r.response).abs() <= 1e-9 * r.response.max(1e-300));
        }
    }
}
