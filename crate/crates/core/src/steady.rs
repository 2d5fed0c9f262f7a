//! Driven steady states: the linear solution, the Kerr response cubics and
//! their branch structure.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::params::{AptConfig, Mode, SystemParams};
use crate::roots::{real_cubic_roots, real_quadratic_roots};
use crate::spectrum::build_matrix;
use crate::stability::StabilityClass;

/// |E_p| below this (relative to Γ²) makes the linear response singular.
pub const NEAR_SINGULAR_TOL: f64 = 1e-9;
/// Response roots closer than this (relative) are merged.
pub const ROOT_MERGE_TOL: f64 = 1e-12;

/// Mean-field amplitudes of the three modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub beta1: Complex64,
    pub alpha: Complex64,
    pub beta2: Complex64,
    /// Cavity response |α|².
    pub x: f64,
    /// Spin-current response |β₁|².
    pub y: f64,
}

impl SteadyState {
    pub fn from_amplitudes(v: [Complex64; 3]) -> Self {
        SteadyState { beta1: v[0], alpha: v[1], beta2: v[2], x: v[1].norm_sqr(), y: v[0].norm_sqr() }
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [self.beta1, self.alpha, self.beta2]
    }

    /// |v_k|² of `mode`.
    pub fn occupation(&self, mode: Mode) -> f64 {
        self.amplitudes()[mode.index()].norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Monostable,
    Bistable,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Monostable => "MONOSTABLE",
            Regime::Bistable => "BISTABLE",
        }
    }
}

/// Drive intensity as a cubic in the response: I = c3·x³ + c2·x² + c1·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
}

impl ResponseCubic {
    pub fn new(c3: f64, c2: f64, c1: f64) -> Self {
        ResponseCubic { c3, c2, c1 }
    }

    pub fn intensity_at(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x
    }

    /// dI/dx.
    pub fn slope_at(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }
}

/// One real non-negative root of a response cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRoot {
    pub response: f64,
    pub state: Option<SteadyState>,
    /// Set by the stability module.
    pub stability: Option<StabilityClass>,
    /// Diagnostic only: dI/dx > 0 at the root.
    pub positive_slope: bool,
}

impl BranchRoot {
    pub fn is_stable(&self) -> bool {
        self.stability == Some(StabilityClass::Stable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet {
    /// Ascending in response.
    pub roots: Vec<BranchRoot>,
    pub regime: Regime,
}

impl BranchSet {
    /// Root nearest to `previous`; without history the smallest stable root
    /// (or the smallest root when stability is unassigned or nothing is
    /// stable).
    pub fn select(&self, previous: Option<f64>) -> Option<usize> {
        if self.roots.is_empty() {
            return None;
        }
        match previous {
            Some(prev) => (0..self.roots.len())
                .min_by(|&a, &b| {
                    (self.roots[a].response - prev).abs().total_cmp(&(self.roots[b].response - prev).abs())
                }),
            None => self.roots.iter().position(|r| r.is_stable()).or(Some(0)),
        }
    }
}

/// Turning points of I(x).
#[derive(Debug, Clone, PartialEq)]
pub struct Bistability {
    pub regime: Regime,
    pub turning_points: Vec<f64>,
}

fn require_uncoupled(apt: &AptConfig) -> Result<()> {
    if apt.g != 0.0 {
        return Err(ModelError::CoherentCouplingPresent { g: apt.g });
    }
    Ok(())
}

/// Closed-form linear amplitudes of the anti-PT configuration:
/// β₁ = −Γ(−iΔ+γ)Ω/(E_pγ), α = (Δ²+γ²)Ω/(E_pγ), β₂ = −Γ(iΔ+γ)Ω/(E_pγ).
pub fn linear_steady_state(apt: &AptConfig, omega: f64) -> Result<SteadyState> {
    require_uncoupled(apt)?;
    let ep = apt.ep_condition();
    if ep.abs() < NEAR_SINGULAR_TOL * apt.gamma_wg * apt.gamma_wg {
        return Err(ModelError::NearSingular { ep });
    }
    let (d, g, gw) = (apt.delta, apt.gamma, apt.gamma_wg);
    let denom = ep * g;
    let beta1 = -gw * Complex64::new(g, -d) * omega / denom;
    let alpha = Complex64::new((d * d + g * g) * omega / denom, 0.0);
    let beta2 = -gw * Complex64::new(g, d) * omega / denom;
    Ok(SteadyState::from_amplitudes([beta1, alpha, beta2]))
}

/// Solves (H − 2·diag(shift))v = −iΩ e_a for the amplitudes.
fn solve_amplitudes(h: &Matrix3<Complex64>, omega: f64, kerr_shift: Option<(usize, f64)>, n: f64) -> Result<SteadyState> {
    let mut m = *h;
    if let Some((k, shift)) = kerr_shift {
        m[(k, k)] -= Complex64::new(shift, 0.0);
    }
    let rhs = Vector3::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, -omega), Complex64::new(0.0, 0.0));
    let v = m.lu().solve(&rhs).ok_or(ModelError::SingularAmplitudeSystem { n })?;
    if v.iter().any(|z| !z.is_finite()) {
        return Err(ModelError::SingularAmplitudeSystem { n });
    }
    Ok(SteadyState::from_amplitudes([v[0], v[1], v[2]]))
}

/// Linear steady state of an arbitrary parameter set (Kerr terms ignored).
pub fn linear_steady_state_general(p: &SystemParams) -> Result<SteadyState> {
    solve_amplitudes(&build_matrix(p).entries, p.omega, None, 0.0)
}

/// Response cubic of a Kerr cavity in the anti-PT configuration:
/// c3 = 4U², c2 = −4UΔₐ, c1 = γ²E_p²/(Δ²+γ²)² + Δₐ².
pub fn cavity_cubic_coeffs(apt: &AptConfig, delta_a: f64, u_a: f64) -> Result<ResponseCubic> {
    require_uncoupled(apt)?;
    let (d, g) = (apt.delta, apt.gamma);
    let ep = apt.ep_condition();
    let s = d * d + g * g;
    Ok(ResponseCubic::new(4.0 * u_a * u_a, -4.0 * u_a * delta_a, g * g * ep * ep / (s * s) + delta_a * delta_a))
}

/// Response cubic in y = |β₁|² for a Kerr magnon b₁ (Δₐ = 0):
/// I·Γ²(Δ²+γ²) = 4U²[(γ²−Γ²)²+γ²Δ²]y³ − 4UΔγ²E_p y² + γ²E_p² y.
pub fn magnon_cubic_coeffs(apt: &AptConfig, u_b1: f64) -> Result<ResponseCubic> {
    require_uncoupled(apt)?;
    let (d, g, gw) = (apt.delta, apt.gamma, apt.gamma_wg);
    let ep = apt.ep_condition();
    let norm = gw * gw * (d * d + g * g);
    let a = g * g - gw * gw;
    Ok(ResponseCubic::new(
        4.0 * u_b1 * u_b1 * (a * a + g * g * d * d) / norm,
        -4.0 * u_b1 * d * g * g * ep / norm,
        g * g * ep * ep / norm,
    ))
}

/// Real non-negative roots of c3x³ + c2x² + c1x − I.
pub fn solve_response_cubic(cubic: &ResponseCubic, intensity: f64) -> Result<BranchSet> {
    if !(intensity >= 0.0) {
        return Err(ModelError::InvalidParameter { name: "I", reason: format!("must be >= 0, got {intensity}") });
    }
    let ResponseCubic { c3, c2, c1 } = *cubic;
    if c3 == 0.0 && c2 == 0.0 && c1 == 0.0 {
        if intensity > 0.0 {
            return Err(ModelError::SingularDrive { intensity });
        }
        return Ok(BranchSet {
            roots: vec![BranchRoot { response: 0.0, state: None, stability: None, positive_slope: false }],
            regime: Regime::Monostable,
        });
    }
    let mut xs: Vec<f64> = if intensity == 0.0 {
        let mut v = vec![0.0];
        v.extend(real_quadratic_roots(c3, c2, c1).into_iter().filter(|&x| x > 0.0));
        v
    } else {
        real_cubic_roots(c3, c2, c1, -intensity).into_iter().filter(|&x| x > 0.0).collect()
    };
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MERGE_TOL * a.abs().max(b.abs()).max(1.0));
    let regime = if xs.iter().filter(|&&x| x > 0.0).count() == 3 { Regime::Bistable } else { Regime::Monostable };
    let roots = xs
        .into_iter()
        .map(|x| BranchRoot { response: x, state: None, stability: None, positive_slope: cubic.slope_at(x) > 0.0 })
        .collect();
    Ok(BranchSet { roots, regime })
}

/// Monostable unless dI/dx = 0 has two distinct positive roots.
pub fn detect_bistability(cubic: &ResponseCubic) -> Bistability {
    let tp: Vec<f64> = real_quadratic_roots(3.0 * cubic.c3, 2.0 * cubic.c2, cubic.c1);
    let positive: Vec<f64> = tp.into_iter().filter(|&x| x > 0.0).collect();
    if positive.len() == 2 && positive[0] != positive[1] {
        Bistability { regime: Regime::Bistable, turning_points: positive }
    } else {
        Bistability { regime: Regime::Monostable, turning_points: Vec::new() }
    }
}

/// Cavity response with a Kerr magnon b₁ at spin-current response y:
/// x = I / |Γ²/(−i(Δ − 2U y) − γ) + γ + Γ²/(iΔ − γ)|².
pub fn cavity_response_with_magnon_kerr(apt: &AptConfig, u_b1: f64, y: f64, intensity: f64) -> Result<f64> {
    let (d, g, gw) = (apt.delta, apt.gamma, apt.gamma_wg);
    let i = Complex64::new(0.0, 1.0);
    let shifted = d - 2.0 * u_b1 * y;
    let den = gw * gw / (-i * shifted - g) + g + gw * gw / (i * d - g);
    if den.norm() < 1e-12 * gw {
        return Err(ModelError::NearSingular { ep: den.norm_sqr() });
    }
    Ok(intensity / den.norm_sqr())
}

/// Exact reduction of the single-Kerr-mode steady state to a cubic in the
/// Kerr-mode occupation n = |v_k|².
///
/// With H' = H − 2U n E_kk, det H' = d0 − 2U d1 n and Cramer's rule gives
/// v_k = −iΩ C / det H' where C is the n-independent cofactor of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrReduction {
    pub mode: Mode,
    pub u: f64,
    pub d0: Complex64,
    pub d1: Complex64,
    pub cofactor: Complex64,
    pub cubic: ResponseCubic,
}

fn det2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    a * d - b * c
}

fn minor(m: &Matrix3<Complex64>, row: usize, col: usize) -> Complex64 {
    let rows: Vec<usize> = (0..3).filter(|&r| r != row).collect();
    let cols: Vec<usize> = (0..3).filter(|&c| c != col).collect();
    det2(m[(rows[0], cols[0])], m[(rows[0], cols[1])], m[(rows[1], cols[0])], m[(rows[1], cols[1])])
}

/// Builds the reduction for `mode`; every other Kerr coefficient must vanish.
pub fn kerr_reduction(p: &SystemParams, mode: Mode) -> Result<KerrReduction> {
    match p.kerr_mode()? {
        Some(m) if m != mode => {
            return Err(ModelError::MultipleKerrModes(format!("{} requested, {} active", mode.label(), m.label())))
        }
        _ => {}
    }
    let h = build_matrix(p).entries;
    let k = mode.index();
    let d0 = h.determinant();
    let d1 = minor(&h, k, k);
    let sign = if (1 + k) % 2 == 0 { 1.0 } else { -1.0 };
    let cofactor = minor(&h, 1, k) * sign;
    let c2norm = cofactor.norm_sqr();
    if !(c2norm > 0.0) {
        return Err(ModelError::SingularAmplitudeSystem { n: 0.0 });
    }
    let u = p.kerr(mode);
    let cubic = ResponseCubic::new(
        4.0 * u * u * d1.norm_sqr() / c2norm,
        -4.0 * u * (d0.conj() * d1).re / c2norm,
        d0.norm_sqr() / c2norm,
    );
    Ok(KerrReduction { mode, u, d0, d1, cofactor, cubic })
}

/// All steady states of a parameter set with at most one Kerr mode; the
/// branch response is the occupation of `mode`. Stability is unassigned.
pub fn kerr_steady_states(p: &SystemParams, mode: Mode) -> Result<BranchSet> {
    let red = kerr_reduction(p, mode)?;
    let mut set = solve_response_cubic(&red.cubic, p.intensity())?;
    let h = build_matrix(p).entries;
    let k = mode.index();
    for root in &mut set.roots {
        let shift = 2.0 * red.u * root.response;
        root.state = Some(solve_amplitudes(&h, p.omega, Some((k, shift)), root.response)?);
    }
    Ok(set)
}
