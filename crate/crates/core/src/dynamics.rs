//! Time integration of the mean-field equations
//! dv/dt = −iHv + 2iRv + Ω e_a, R = diag(U_b1|β₁|², U_a|α|², U_b2|β₂|²).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::params::SystemParams;
use crate::spectrum::build_matrix;
use crate::steady::SteadyState;

pub type Amplitudes = [Complex64; 3];

/// Relative perturbation used when checking that a root attracts.
pub const PERTURBATION: f64 = 1e-3;
/// Divergence threshold relative to the initial scale.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
/// The residual criterion must hold for this many 1/Γ.
pub const SETTLE_TIME: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub amplitudes: Amplitudes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationOutcome {
    Converged { state: SteadyState, t: f64 },
    Diverged { t: f64 },
    NotConverged { state: SteadyState, residual: f64 },
}

impl IntegrationOutcome {
    pub fn state(&self) -> Option<SteadyState> {
        match self {
            IntegrationOutcome::Converged { state, .. } => Some(*state),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntegrationOutcome::Converged { .. } => "CONVERGED",
            IntegrationOutcome::Diverged { .. } => "DIVERGED",
            IntegrationOutcome::NotConverged { .. } => "NOT_CONVERGED",
        }
    }
}

/// Precomputed right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct MeanField {
    h: [[Complex64; 3]; 3],
    kerr: [f64; 3],
    omega: f64,
}

impl MeanField {
    pub fn new(p: &SystemParams) -> Self {
        let m = build_matrix(p).entries;
        let h = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        MeanField { h, kerr: p.kerr_vector(), omega: p.omega }
    }

    pub fn eval(&self, v: &Amplitudes) -> Amplitudes {
        let mi = Complex64::new(0.0, -1.0);
        std::array::from_fn(|i| {
            let hv = self.h[i][0] * v[0] + self.h[i][1] * v[1] + self.h[i][2] * v[2];
            let kerr = Complex64::new(0.0, 2.0 * self.kerr[i] * v[i].norm_sqr()) * v[i];
            let drive = if i == 1 { self.omega } else { 0.0 };
            mi * hv + kerr + drive
        })
    }

    /// Fastest rate for amplitudes of size `scale`.
    pub fn max_rate(&self, scale: f64) -> f64 {
        let linear = self.h.iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        let u = self.kerr.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        linear + 8.0 * u * scale * scale
    }

    fn rk4_step(&self, v: &Amplitudes, h: f64) -> Amplitudes {
        let add = |a: &Amplitudes, b: &Amplitudes, s: f64| -> Amplitudes { std::array::from_fn(|i| a[i] + b[i] * s) };
        let k1 = self.eval(v);
        let k2 = self.eval(&add(v, &k1, 0.5 * h));
        let k3 = self.eval(&add(v, &k2, 0.5 * h));
        let k4 = self.eval(&add(v, &k3, h));
        std::array::from_fn(|i| v[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
    }
}

/// −iHv + 2iRv + Ω e_a.
pub fn rhs(p: &SystemParams, v: &Amplitudes) -> Amplitudes {
    MeanField::new(p).eval(v)
}

pub fn norm(v: &Amplitudes) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn amplitude_scale(p: &SystemParams, v0: &Amplitudes) -> f64 {
    norm(v0).max(p.omega.abs() / p.gamma_wg)
}

/// Default step: 0.01 over the fastest rate.
pub fn default_step(p: &SystemParams, v0: &Amplitudes) -> f64 {
    0.01 / MeanField::new(p).max_rate(amplitude_scale(p, v0))
}

/// RK4 with the default step until ‖rhs‖ ≤ tol·Γ·‖v‖ has held for 10/Γ.
pub fn integrate_to_steady(p: &SystemParams, v0: Amplitudes, t_max: f64, tol: f64) -> IntegrationOutcome {
    integrate_with_step(p, v0, t_max, tol, default_step(p, &v0))
}

pub fn integrate_with_step(p: &SystemParams, v0: Amplitudes, t_max: f64, tol: f64, h: f64) -> IntegrationOutcome {
    let f = MeanField::new(p);
    let scale = amplitude_scale(p, &v0);
    // an undriven system relaxes to zero, so the residual is measured
    // against a floor well below the initial size
    let floor = if p.omega != 0.0 { 1e-3 * p.omega.abs() / p.gamma_wg } else { 1e-12 * norm(&v0) };
    let settle = SETTLE_TIME / p.gamma_wg;
    let mut v = v0;
    let mut t = 0.0;
    let mut settled_since: Option<f64> = None;
    let mut residual = f64::INFINITY;
    while t < t_max {
        v = f.rk4_step(&v, h);
        t += h;
        let size = norm(&v);
        if !size.is_finite() || size > DIVERGENCE_FACTOR * scale.max(f64::MIN_POSITIVE) {
            return IntegrationOutcome::Diverged { t };
        }
        residual = norm(&f.eval(&v));
        if residual <= tol * p.gamma_wg * size.max(floor) {
            let since = *settled_since.get_or_insert(t);
            if t - since >= settle {
                return IntegrationOutcome::Converged { state: SteadyState::from_amplitudes(v), t };
            }
        } else {
            settled_since = None;
        }
    }
    IntegrationOutcome::NotConverged { state: SteadyState::from_amplitudes(v), residual }
}

/// Samples the trajectory every `stride` steps of size `h`.
pub fn trajectory(p: &SystemParams, v0: Amplitudes, t_max: f64, h: f64, stride: usize) -> Vec<TrajectoryState> {
    let f = MeanField::new(p);
    let stride = stride.max(1);
    let mut out = vec![TrajectoryState { t: 0.0, amplitudes: v0 }];
    let mut v = v0;
    let steps = (t_max / h).ceil() as usize;
    for k in 1..=steps {
        v = f.rk4_step(&v, h);
        if v.iter().any(|z| !z.is_finite()) {
            break;
        }
        if k % stride == 0 || k == steps {
            out.push(TrajectoryState { t: k as f64 * h, amplitudes: v });
        }
    }
    out
}

/// `root` displaced by `relative`·‖root‖ in a seeded random complex direction.
pub fn perturbed_start(root: &Amplitudes, relative: f64, seed: u64) -> Amplitudes {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let dir: Amplitudes =
        std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let size = relative * norm(root).max(f64::MIN_POSITIVE) / norm(&dir);
    std::array::from_fn(|i| root[i] + dir[i] * size)
}

/// Result of releasing the system next to a candidate root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCheck {
    pub outcome: IntegrationOutcome,
    /// ‖v_final − root‖ / ‖root‖ when the run converged.
    pub distance: Option<f64>,
}

impl RootCheck {
    pub fn returned(&self, rel_tol: f64) -> bool {
        self.distance.is_some_and(|d| d <= rel_tol)
    }
}

/// Integrates from a 1e−3 perturbation of `root` and measures where the
/// trajectory settles.
pub fn check_root(p: &SystemParams, root: &SteadyState, seed: u64, t_max: f64, tol: f64) -> RootCheck {
    let r = root.amplitudes();
    let start = perturbed_start(&r, PERTURBATION, seed);
    let outcome = integrate_to_steady(p, start, t_max, tol);
    let distance = outcome.state().map(|s| {
        let v = s.amplitudes();
        norm(&std::array::from_fn(|i| v[i] - r[i])) / norm(&r)
    });
    RootCheck { outcome, distance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::AptConfig;
    use crate::steady::linear_steady_state;

    fn zero() -> Amplitudes {
        [Complex64::new(0.0, 0.0); 3]
    }

    #[test]
    fn rhs_examples() {
        let p = AptConfig::new(0.3, 1.5, 1.0).expand(0.05).with_omega(0.7);
        let d = rhs(&p, &zero());
        assert_eq!(d[1], Complex64::new(0.7, 0.0));
        assert_eq!(d[0], Complex64::new(0.0, 0.0));
        let d2 = rhs(&p.with_omega(1.4), &zero());
        assert_eq!(d2[1], d[1] * 2.0);

        let s = linear_steady_state(&AptConfig::new(0.3, 1.5, 1.0), 0.7).unwrap();
        let r = rhs(&p, &s.amplitudes());
        assert!(norm(&r) <= 1e-9 * norm(&s.amplitudes()));
    }

    #[test]
    fn converges_to_linear_state() {
        let apt = AptConfig::new(0.0, 1.5, 1.0);
        let p = apt.expand(0.05).with_omega(1.0);
        let expect = linear_steady_state(&apt, 1.0).unwrap();
        let out = integrate_to_steady(&p, zero(), 2000.0, 1e-10);
        let s = out.state().expect("converged");
        assert!((s.alpha - expect.alpha).norm() <= 1e-6 * expect.alpha.norm());
        assert!((s.beta1 - expect.beta1).norm() <= 1e-6 * expect.alpha.norm());
    }

    #[test]
    fn undriven_decays_to_zero() {
        let p = AptConfig::new(0.2, 1.8, 1.0).expand(0.05);
        let v0 = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.0), Complex64::new(0.0, 0.4)];
        let s = integrate_to_steady(&p, v0, 2000.0, 1e-6).state().expect("converged");
        assert!(norm(&s.amplitudes()) < 1e-10);
    }

    #[test]
    fn unstable_point_diverges() {
        let p = AptConfig::new(0.0, 1.2, 1.0).expand(0.05).with_omega(1.0);
        let out = integrate_to_steady(&p, zero(), 2000.0, 1e-10);
        assert!(matches!(out, IntegrationOutcome::Diverged { .. }), "{out:?}");
    }

    #[test]
    fn perturbation_is_seeded() {
        let r = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 1.0)];
        let a = perturbed_start(&r, 1e-3, 5);
        assert_eq!(a, perturbed_start(&r, 1e-3, 5));
        let d: Amplitudes = std::array::from_fn(|i| a[i] - r[i]);
        assert!((norm(&d) / norm(&r) - 1e-3).abs() < 1e-15);
    }
}
