use antipt_core::dynamics::{check_root, default_step, integrate_to_steady, integrate_with_step, norm, perturbed_start};
use antipt_core::params::{AptConfig, Mode};
use antipt_core::stability::{classified_steady_states, StabilityClass};
use rand::{Rng, SeedableRng};
use std::f64::consts::SQRT_2;

#[test]
fn stable_roots_attract() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut checked = 0;
    let mut nonlinear = 0;
    while checked < 24 {
        let delta = rng.random_range(-1.2..1.2);
        let gamma = rng.random_range(1.45..2.0);
        let apt = AptConfig::new(delta, gamma, 1.0);
        if apt.ep_condition() < 0.2 {
            continue;
        }
        let mode = if rng.random_bool(0.5) { Mode::Cavity } else { Mode::Magnon1 };
        let u = if checked % 4 == 0 { 0.0 } else { rng.random_range(1e-3..0.03) };
        let p = apt
            .expand(0.05)
            .with_delta_a(if mode == Mode::Cavity { rng.random_range(-0.2..0.2) } else { 0.0 })
            .with_kerr(mode, u)
            .with_omega(rng.random_range(0.1..0.8));
        let set = classified_steady_states(&p, mode).unwrap();
        for root in set.roots.iter().filter(|r| r.stability == Some(StabilityClass::Stable)) {
            let check = check_root(&p, &root.state.unwrap(), checked as u64, 1e4, 1e-10);
            assert!(check.returned(1e-6), "{p:?}: {check:?}");
            checked += 1;
            if u > 0.0 {
                nonlinear += 1;
            }
        }
    }
    assert!(nonlinear >= 10);
}

#[test]
fn bistable_middle_root_is_repelling() {
    let p = AptConfig::new(0.0, SQRT_2, 1.0)
        .expand(0.05)
        .with_delta_a(0.3)
        .with_kerr(Mode::Cavity, 0.01)
        .with_omega(0.1f64.sqrt());
    let set = classified_steady_states(&p, Mode::Cavity).unwrap();
    assert_eq!(set.roots.len(), 3);
    let middle = set.roots[1].state.unwrap();
    let check = check_root(&p, &middle, 11, 1e4, 1e-10);
    assert!(!check.returned(1e-3), "{check:?}");
    let settled = check.outcome.state().expect("settles on an outer branch");
    let outer = [set.roots[0].response, set.roots[2].response];
    assert!(outer.iter().any(|x| (settled.x - x).abs() <= 1e-6 * x));
    for idx in [0, 2] {
        assert!(check_root(&p, &set.roots[idx].state.unwrap(), 3, 1e4, 1e-10).returned(1e-6));
    }
}

#[test]
fn step_halving_is_consistent() {
    let p = AptConfig::new(0.3, 1.6, 1.0).expand(0.05).with_kerr(Mode::Cavity, 0.01).with_delta_a(0.1).with_omega(0.5);
    let v0 = perturbed_start(&[Default::default(); 3], 0.0, 1);
    let h = default_step(&p, &v0);
    let a = integrate_with_step(&p, v0, 1e4, 1e-12, h).state().unwrap().amplitudes();
    let b = integrate_with_step(&p, v0, 1e4, 1e-12, 0.5 * h).state().unwrap().amplitudes();
    let diff: [num_complex::Complex64; 3] = std::array::from_fn(|i| a[i] - b[i]);
    assert!(norm(&diff) <= 1e-8 * norm(&a));
}

#[test]
fn marginal_point_does_not_converge() {
    let p = AptConfig::new(0.0, SQRT_2, 1.0).expand(0.05).with_omega(0.1);
    let out = integrate_to_steady(&p, [Default::default(); 3], 200.0, 1e-10);
    assert_eq!(out.label(), "NOT_CONVERGED");
}
