//! Sensitivity observables: response ratios η between two Kerr strengths,
//! finite-difference derivatives ∂x/∂U and their power-law exponent.

use crate::error::{ModelError, Result};
use crate::params::{AptConfig, Mode, SystemParams};
use crate::stability::{classified_steady_states, StabilityClass};
use crate::steady::{BranchSet, Regime, SteadyState};

/// Relative central-difference step.
pub const FD_STEP: f64 = 1e-3;
/// Agreement required between the δU and δU/2 estimates.
pub const FD_RICHARDSON_TOL: f64 = 1e-4;
pub const MIN_FIT_POINTS: usize = 8;

/// Which mode carries the Kerr term; the response is that mode's occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// Kerr cavity, response x = |α|².
    Cavity,
    /// Kerr magnon b₁, response y = |β₁|².
    Magnon,
}

impl Observable {
    pub fn mode(self) -> Mode {
        match self {
            Observable::Cavity => Mode::Cavity,
            Observable::Magnon => Mode::Magnon1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Observable::Cavity => "cavity",
            Observable::Magnon => "magnon",
        }
    }
}

/// Operating point at which the Kerr strength is varied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingPoint {
    pub apt: AptConfig,
    pub delta_a: f64,
    /// Drive intensity I = Ω².
    pub intensity: f64,
    pub observable: Observable,
    /// Cavity loss; only γₐ enters the dynamics.
    pub kappa_minus: f64,
}

/// Response on the selected branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedResponse {
    pub value: f64,
    pub regime: Regime,
    pub stability: Option<StabilityClass>,
    pub state: SteadyState,
}

impl SensingPoint {
    pub fn new(apt: AptConfig, delta_a: f64, intensity: f64, observable: Observable) -> Self {
        SensingPoint { apt, delta_a, intensity, observable, kappa_minus: 0.05 * apt.gamma_wg }
    }

    pub fn with_delta_a(mut self, delta_a: f64) -> Self {
        self.delta_a = delta_a;
        self
    }

    pub fn params(&self, u: f64) -> SystemParams {
        self.apt
            .expand(self.kappa_minus)
            .with_delta_a(self.delta_a)
            .with_kerr(self.observable.mode(), u)
            .with_omega(self.intensity.sqrt())
    }

    /// All steady states at Kerr strength `u`, stability assigned.
    pub fn branches(&self, u: f64) -> Result<BranchSet> {
        classified_steady_states(&self.params(u), self.observable.mode())
    }

    /// Branch nearest `previous`, or the smallest stable root.
    pub fn response(&self, u: f64, previous: Option<f64>) -> Result<TrackedResponse> {
        let set = self.branches(u)?;
        let idx = set.select(previous).ok_or(ModelError::NoStableBranch)?;
        let root = set.roots[idx];
        let state = root.state.ok_or(ModelError::NoStableBranch)?;
        Ok(TrackedResponse { value: root.response, regime: set.regime, stability: root.stability, state })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    /// η = response(U_small) / response(U_large).
    pub eta: f64,
    pub small: TrackedResponse,
    pub large: TrackedResponse,
}

impl RatioReport {
    /// Either endpoint lies inside a bistable window.
    pub fn in_bistable_window(&self) -> bool {
        self.small.regime == Regime::Bistable || self.large.regime == Regime::Bistable
    }
}

fn check_pair(u_small: f64, u_large: f64) -> Result<()> {
    if !(u_small > 0.0) || !(u_large > 0.0) || u_small > u_large {
        return Err(ModelError::InvalidParameter {
            name: "U",
            reason: format!("need 0 < U_small <= U_large, got {u_small:e}, {u_large:e}"),
        });
    }
    Ok(())
}

/// η at a single operating point, each response on its smallest stable root.
pub fn response_ratio(point: &SensingPoint, u_small: f64, u_large: f64) -> Result<RatioReport> {
    check_pair(u_small, u_large)?;
    let small = point.response(u_small, None)?;
    let large = point.response(u_large, None)?;
    Ok(RatioReport { eta: small.value / large.value, small, large })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPoint {
    pub delta_a: f64,
    pub report: RatioReport,
}

/// η over a grid of cavity detunings. Both responses are tracked outward
/// from the grid point nearest Δₐ = 0: upward for Δₐ above it, downward
/// below it. Output is in ascending Δₐ.
pub fn eta_sweep(point: &SensingPoint, delta_a_grid: &[f64], u_small: f64, u_large: f64) -> Result<Vec<EtaPoint>> {
    check_pair(u_small, u_large)?;
    let mut grid = delta_a_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let start = (0..grid.len()).min_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs())).unwrap();
    let mut out: Vec<Option<EtaPoint>> = vec![None; grid.len()];
    let mut run = |indices: &mut dyn Iterator<Item = usize>, seed: Option<(f64, f64)>| -> Result<Option<(f64, f64)>> {
        let mut prev = seed;
        let mut first = None;
        for i in indices {
            let p = point.with_delta_a(grid[i]);
            let small = p.response(u_small, prev.map(|v| v.0))?;
            let large = p.response(u_large, prev.map(|v| v.1))?;
            prev = Some((small.value, large.value));
            first.get_or_insert((small.value, large.value));
            out[i] = Some(EtaPoint { delta_a: grid[i], report: RatioReport { eta: small.value / large.value, small, large } });
        }
        Ok(first)
    };
    let origin = run(&mut (start..grid.len()), None)?;
    run(&mut (0..start).rev(), origin)?;
    Ok(out.into_iter().map(|p| p.expect("every grid point visited")).collect())
}

fn central_difference(point: &SensingPoint, u: f64, du: f64, base: &TrackedResponse) -> Result<f64> {
    let plus = point.response(u + du, Some(base.value))?;
    let minus = point.response(u - du, Some(base.value))?;
    if plus.regime != base.regime || minus.regime != base.regime {
        return Err(ModelError::BranchStraddle { u });
    }
    Ok((plus.value - minus.value) / (2.0 * du))
}

/// ∂(response)/∂U by central differences with δU = 1e−3·U, checked
/// against δU/2.
pub fn sensitivity_fd(point: &SensingPoint, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(ModelError::InvalidParameter { name: "U", reason: format!("must be > 0, got {u:e}") });
    }
    let base = point.response(u, None)?;
    let coarse = central_difference(point, u, FD_STEP * u, &base)?;
    let fine = central_difference(point, u, 0.5 * FD_STEP * u, &base)?;
    if (coarse - fine).abs() > FD_RICHARDSON_TOL * fine.abs() {
        return Err(ModelError::FiniteDifferenceMismatch { coarse, fine });
    }
    Ok(coarse)
}

/// Least-squares slope of ln y against ln x over the positive finite pairs.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(ModelError::TooFewPoints { needed: 2, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(ModelError::TooFewPoints { needed: 2, got: 1 });
    }
    Ok(sxy / sxx)
}

/// Exponent of |∂response/∂U| ∝ U^k over `u_grid`; points whose finite
/// difference fails are skipped, and at least 8 must remain.
pub fn fit_scaling_exponent(point: &SensingPoint, u_grid: &[f64]) -> Result<f64> {
    let (us, ds): (Vec<f64>, Vec<f64>) = u_grid
        .iter()
        .filter_map(|&u| sensitivity_fd(point, u).ok().map(|d| (u, d.abs())))
        .filter(|(_, d)| *d > 0.0 && d.is_finite())
        .unzip();
    if us.len() < MIN_FIT_POINTS {
        return Err(ModelError::TooFewPoints { needed: MIN_FIT_POINTS, got: us.len() });
    }
    fit_loglog_slope(&us, &ds)
}

/// Logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub eta: f64,
    /// ∂response/∂U at U_small.
    pub dresponse_du: f64,
    pub scaling_exponent: f64,
    pub regime_tags: Vec<Regime>,
}

/// η for the pair, the derivative at U_small and the exponent over `u_grid`.
pub fn sensitivity_report(point: &SensingPoint, u_small: f64, u_large: f64, u_grid: &[f64]) -> Result<SensitivityReport> {
    let ratio = response_ratio(point, u_small, u_large)?;
    let dresponse_du = sensitivity_fd(point, u_small)?;
    let scaling_exponent = fit_scaling_exponent(point, u_grid)?;
    let regime_tags = u_grid.iter().map(|&u| point.branches(u).map(|b| b.regime)).collect::<Result<Vec<_>>>()?;
    Ok(SensitivityReport { eta: ratio.eta, dresponse_du, scaling_exponent, regime_tags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn suppression(obs: Observable) -> SensingPoint {
        SensingPoint::new(AptConfig::new(0.0, SQRT_2, 1.0), 0.0, 0.5, obs)
    }

    #[test]
    fn eta_at_suppression() {
        for obs in [Observable::Cavity, Observable::Magnon] {
            let r = response_ratio(&suppression(obs), 1e-3, 1e-2).unwrap();
            assert_relative_eq!(r.eta, 10f64.powf(2.0 / 3.0), max_relative = 1e-9);
            assert!(!r.in_bistable_window());
        }
        let r = response_ratio(&suppression(Observable::Cavity), 1e-3, 1e-3).unwrap();
        assert_eq!(r.eta, 1.0);
        assert!(response_ratio(&suppression(Observable::Cavity), 1e-2, 1e-3).is_err());
    }

    #[test]
    fn fd_matches_analytic_derivative() {
        let (i, u) = (0.5f64, 2e-3f64);
        let d = sensitivity_fd(&suppression(Observable::Cavity), u).unwrap();
        let exact = -(2.0 / 3.0) * (i / 4.0).cbrt() * u.powf(-5.0 / 3.0);
        assert_relative_eq!(d, exact, max_relative = 1e-4);
        let d2 = sensitivity_fd(&suppression(Observable::Cavity), 2.0 * u).unwrap();
        assert_relative_eq!(d2 / d, 2f64.powf(-5.0 / 3.0), max_relative = 1e-3);
    }

    #[test]
    fn fd_finite_away_from_suppression() {
        // first order in U: x ≈ x₀ − 4U²x₀³/c1, so ∂x/∂U ≈ −8U x₀³/c1
        let apt = AptConfig::new(0.3, 1.6, 1.0);
        let p = SensingPoint::new(apt, 0.0, 0.5, Observable::Cavity);
        let c1 = crate::steady::cavity_cubic_coeffs(&apt, 0.0, 0.0).unwrap().c1;
        let x0 = 0.5 / c1;
        for u in [1e-4, 1e-3] {
            let d = sensitivity_fd(&p, u).unwrap();
            assert_relative_eq!(d, -8.0 * u * x0.powi(3) / c1, max_relative = 1e-2);
        }
    }

    #[test]
    fn loglog_fit() {
        let xs = log_grid(0.01, 1.0, 9);
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(-2)).collect();
        assert_relative_eq!(fit_loglog_slope(&xs, &ys).unwrap(), -2.0, max_relative = 1e-12);
        assert!(fit_scaling_exponent(&suppression(Observable::Cavity), &log_grid(1e-3, 1e-2, 5)).is_err());
    }

    #[test]
    fn sweep_is_ascending_and_tracked() {
        let p = SensingPoint::new(AptConfig::new(0.0, SQRT_2, 1.0), 0.0, 0.1, Observable::Cavity);
        let grid: Vec<f64> = (0..11).map(|k| -0.1 + 0.02 * k as f64).collect();
        let sweep = eta_sweep(&p, &grid, 0.001, 0.01).unwrap();
        assert_eq!(sweep.len(), 11);
        assert!(sweep.windows(2).all(|w| w[0].delta_a < w[1].delta_a));
        let zero = sweep.iter().find(|e| e.delta_a.abs() < 1e-12).unwrap();
        assert_relative_eq!(zero.report.eta, 10f64.powf(2.0 / 3.0), max_relative = 1e-9);
    }
}
