//! Linear coupling matrix, its complex spectrum and the anti-PT phase
//! structure (exceptional points, linewidth-suppression points).

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::params::{AptConfig, SystemParams};
use crate::roots::{complex_cubic_roots, DepressedCubic};

/// Tolerance (relative to Γ²) on the square-root argument for calling a
/// closed-form point exceptional.
pub const EP_ARGUMENT_TOL: f64 = 1e-12;
/// Eigenvalues closer than this (relative to Γ) are coalesced.
pub const COALESCENCE_TOL: f64 = 1e-8;
/// Real parts below this (relative to Γ) count as zero for phase labels.
pub const ZERO_REAL_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Symmetry phase of the three-mode spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryPhase {
    /// Unbroken anti-PT phase: purely imaginary eigenvalues.
    Apt,
    /// Broken phase: a pair with opposite nonzero real parts.
    Aptb,
    /// Exceptional point: eigenvalues coalesce.
    Ep,
}

impl SymmetryPhase {
    pub fn label(self) -> &'static str {
        match self {
            SymmetryPhase::Apt => "APT",
            SymmetryPhase::Aptb => "APTB",
            SymmetryPhase::Ep => "EP",
        }
    }
}

/// Non-Hermitian coupling matrix in the (b₁, a, b₂) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub entries: Matrix3<Complex64>,
    /// Rate scale used for tolerances (Γ when built from parameters).
    pub scale: f64,
}

impl CouplingMatrix {
    pub fn from_entries(entries: Matrix3<Complex64>) -> Self {
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        CouplingMatrix { entries, scale }
    }

    /// Coefficients (a, b, c) of det(λI − M) = λ³ + aλ² + bλ + c.
    pub fn characteristic_coefficients(&self) -> (Complex64, Complex64, Complex64) {
        let m = &self.entries;
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
            - m[(0, 2)] * m[(2, 0)]
            + m[(1, 1)] * m[(2, 2)]
            - m[(1, 2)] * m[(2, 1)];
        let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        (-trace, minors, -det)
    }

    pub fn characteristic_cubic(&self) -> DepressedCubic {
        let (a, b, c) = self.characteristic_coefficients();
        DepressedCubic::from_monic(a, b, c)
    }

    /// (PT) M (PT)⁻¹ with P exchanging b₁ ↔ b₂ and T complex conjugation.
    pub fn pt_transform(&self) -> Matrix3<Complex64> {
        let perm = [2usize, 1, 0];
        Matrix3::from_fn(|i, j| self.entries[(perm[i], perm[j])].conj())
    }
}

/// Three eigenvalues with their phase label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSpectrum {
    pub lambdas: [Complex64; 3],
    pub phase: SymmetryPhase,
    /// min over eigenvalues of max(|Re λ|, |Im λ|): zero at linewidth suppression.
    pub suppression_gap: f64,
}

impl ComplexSpectrum {
    fn new(mut lambdas: [Complex64; 3], phase: SymmetryPhase, scale: f64) -> Self {
        sort_eigenvalues(&mut lambdas, scale);
        let suppression_gap = lambdas.iter().map(|z| z.re.abs().max(z.im.abs())).fold(f64::INFINITY, f64::min);
        ComplexSpectrum { lambdas, phase, suppression_gap }
    }

    /// Largest imaginary part: the narrowest linewidth (with sign).
    pub fn top_linewidth(&self) -> f64 {
        self.lambdas.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Descending real part, ties (within round-off of `scale`) broken by
/// descending imaginary part.
pub fn sort_eigenvalues(lambdas: &mut [Complex64; 3], scale: f64) {
    let tol = 1e-12 * scale;
    let snap = |x: f64| if x.abs() <= tol { 0.0 } else { x };
    lambdas.sort_by(|a, b| snap(b.re).total_cmp(&snap(a.re)).then(b.im.total_cmp(&a.im)));
}

/// Coupling matrix: diagonal (Δ₁ − i(γ_b1 + Γ), Δₐ − i(γₐ + 2Γ), Δ₂ − i(γ_b2 + Γ)),
/// off-diagonal gⱼ − iΓ on the (bⱼ, a) links.
pub fn build_matrix(p: &SystemParams) -> CouplingMatrix {
    let gw = p.gamma_wg;
    let d1 = cx(p.delta1, -p.gamma_b1) - I * gw;
    let da = cx(p.delta_a, 0.0) - I * (p.gamma_a() + 2.0 * gw);
    let d2 = cx(p.delta2, -p.gamma_b2) - I * gw;
    let k1 = cx(p.g1, -gw);
    let k2 = cx(p.g2, -gw);
    let zero = cx(0.0, 0.0);
    let entries = Matrix3::new(d1, k1, zero, k1, da, k2, zero, k2, d2);
    CouplingMatrix { entries, scale: gw }
}

/// Square-root argument 2Γ² + 4igΓ − 2g² − Δ² of the closed-form spectrum.
pub fn closed_form_argument(apt: &AptConfig) -> Complex64 {
    let (gw, g, d) = (apt.gamma_wg, apt.g, apt.delta);
    cx(2.0 * gw * gw - 2.0 * g * g - d * d, 4.0 * g * gw)
}

/// λ₁,₃ = −i(γ ∓ √(2Γ² + 4igΓ − 2g² − Δ²)), λ₂ = −iγ.
pub fn eigenvalues_closed_form(apt: &AptConfig) -> ComplexSpectrum {
    let arg = closed_form_argument(apt);
    let root = arg.sqrt();
    let gamma = cx(apt.gamma, 0.0);
    let l1 = -I * (gamma - root);
    let l2 = -I * gamma;
    let l3 = -I * (gamma + root);
    let gw2 = apt.gamma_wg * apt.gamma_wg;
    let phase = if arg.norm() <= EP_ARGUMENT_TOL * gw2 {
        SymmetryPhase::Ep
    } else if apt.g == 0.0 {
        if arg.re > 0.0 {
            SymmetryPhase::Apt
        } else {
            SymmetryPhase::Aptb
        }
    } else if arg.im.abs() <= EP_ARGUMENT_TOL * gw2 && arg.re > 0.0 {
        SymmetryPhase::Apt
    } else {
        SymmetryPhase::Aptb
    };
    ComplexSpectrum::new([l1, l2, l3], phase, apt.gamma_wg)
}

/// Eigenvalues of an arbitrary 3×3 coupling matrix from its characteristic
/// cubic.
pub fn eigenvalues_numeric(m: &CouplingMatrix) -> ComplexSpectrum {
    let (a, b, c) = m.characteristic_coefficients();
    let lambdas = complex_cubic_roots(a, b, c);
    let scale = m.scale;
    let d01 = (lambdas[0] - lambdas[1]).norm();
    let d02 = (lambdas[0] - lambdas[2]).norm();
    let d12 = (lambdas[1] - lambdas[2]).norm();
    let closest = d01.min(d02).min(d12);
    let product = d01 * d02 * d12;
    let phase = if closest <= COALESCENCE_TOL * scale && product <= COALESCENCE_TOL * scale.powi(3) {
        SymmetryPhase::Ep
    } else if lambdas.iter().all(|z| z.re.abs() <= ZERO_REAL_TOL * scale) {
        SymmetryPhase::Apt
    } else {
        SymmetryPhase::Aptb
    };
    ComplexSpectrum::new(lambdas, phase, scale)
}

/// Detunings ±√(Γ² − γ_b² − 2Γγ_b) at which a linewidth vanishes; one value
/// (0) at γ_b = (√2 − 1)Γ, none outside 0 ≤ γ_b ≤ (√2 − 1)Γ.
pub fn suppression_detunings(gamma_b: f64, gamma_wg: f64) -> Vec<f64> {
    if gamma_b < 0.0 || !(gamma_wg > 0.0) {
        return Vec::new();
    }
    let arg = gamma_wg * gamma_wg - gamma_b * gamma_b - 2.0 * gamma_wg * gamma_b;
    let tol = EP_ARGUMENT_TOL * gamma_wg * gamma_wg;
    if arg.abs() <= tol {
        vec![0.0]
    } else if arg > 0.0 {
        let d = arg.sqrt();
        vec![-d, d]
    } else {
        Vec::new()
    }
}

/// Phase of the uncoupled (g = 0) anti-PT configuration.
pub fn classify_phase(apt: &AptConfig) -> Result<SymmetryPhase> {
    if apt.g != 0.0 {
        return Err(ModelError::CoherentCouplingPresent { g: apt.g });
    }
    let gw2 = 2.0 * apt.gamma_wg * apt.gamma_wg;
    let d2 = apt.delta * apt.delta;
    Ok(if (d2 - gw2).abs() <= EP_ARGUMENT_TOL * gw2 {
        SymmetryPhase::Ep
    } else if d2 < gw2 {
        SymmetryPhase::Apt
    } else {
        SymmetryPhase::Aptb
    })
}

/// Reorders `current` so each eigenvalue continues the nearest branch of
/// `previous` (minimum total displacement over the six permutations).
pub fn follow_branches(previous: &[Complex64; 3], current: [Complex64; 3]) -> [Complex64; 3] {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let cost = |perm: &[usize; 3]| -> f64 { (0..3).map(|k| (current[perm[k]] - previous[k]).norm()).sum() };
    let best = PERMS.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).unwrap();
    [current[best[0]], current[best[1]], current[best[2]]]
}

fn numeric_at(apt: &AptConfig, delta: f64) -> CouplingMatrix {
    build_matrix(&apt.with_delta(delta).expand(0.0))
}

/// Detuning in [lo, hi] where the numeric spectrum of the anti-PT family
/// coalesces, found by bisection on the real part of the depressed-cubic
/// invariant p = −½ Σ(λᵢ − λ̄)². `None` when p does not change sign.
pub fn locate_exceptional_point(apt: &AptConfig, lo: f64, hi: f64) -> Option<f64> {
    let f = |d: f64| numeric_at(apt, d).characteristic_cubic().p.re;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Detunings in [−delta_max, delta_max] where the narrowest numeric
/// linewidth max Im λ crosses or touches zero. Crossings are bracketed on a
/// uniform grid of `samples` points and refined by bisection; a grid
/// maximum within 1e−10 Γ of zero without a bracketing sign change counts as
/// a tangential zero.
pub fn linewidth_zero_crossings(apt: &AptConfig, delta_max: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(3);
    let f = |d: f64| eigenvalues_numeric(&numeric_at(apt, d)).top_linewidth();
    let grid: Vec<f64> =
        (0..samples).map(|k| -delta_max + 2.0 * delta_max * k as f64 / (samples - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&d| f(d)).collect();
    let tangent_tol = 1e-10 * apt.gamma_wg;
    let mut zeros = Vec::new();

    for k in 0..samples - 1 {
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            continue;
        }
        if fa.signum() != fb.signum() {
            if fb == 0.0 {
                continue;
            }
            let mut fa = fa;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            zeros.push(0.5 * (a + b));
        }
    }
    for k in 0..samples {
        if values[k] == 0.0 {
            zeros.push(grid[k]);
            continue;
        }
        let left = if k > 0 { values[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < samples { values[k + 1] } else { f64::NEG_INFINITY };
        let local_max = values[k] >= left && values[k] >= right;
        let bracketed = (k > 0 && left.signum() != values[k].signum())
            || (k + 1 < samples && right.signum() != values[k].signum());
        if local_max && !bracketed && values[k].abs() <= tangent_tol {
            zeros.push(grid[k]);
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * apt.gamma_wg);
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn apt(delta: f64, gamma: f64) -> AptConfig {
        AptConfig::new(delta, gamma, 1.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn same_multiset(a: &[Complex64; 3], b: &[Complex64; 3], tol: f64) -> bool {
        let mut used = [false; 3];
        a.iter().all(|x| {
            match (0..3).filter(|&j| !used[j]).find(|&j| close(*x, b[j], tol)) {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }

    #[test]
    fn matrix_matches_reduced_form_at_suppression() {
        let m = build_matrix(&apt(0.0, SQRT_2).expand(0.05));
        for k in 0..3 {
            assert!(close(m.entries[(k, k)], cx(0.0, -SQRT_2), 1e-15));
        }
        assert_eq!(m.entries[(0, 1)], cx(0.0, -1.0));
        assert_eq!(m.entries[(1, 2)], cx(0.0, -1.0));
        assert_eq!(m.entries[(0, 2)], cx(0.0, 0.0));
    }

    #[test]
    fn matrix_with_coherent_coupling() {
        let m = build_matrix(&apt(0.3, 1.2).with_g(0.03).expand(0.05));
        assert_eq!(m.entries[(0, 1)], cx(0.03, -1.0));
        assert_eq!(m.entries[(2, 1)], cx(0.03, -1.0));
        let diff = m.entries[(0, 0)] - m.entries[(2, 2)];
        assert!((diff.re - 0.6).abs() < 1e-15);
        assert!(diff.im.abs() < 1e-15);
    }

    #[test]
    fn anti_pt_relation() {
        for &(d, g) in &[(0.0, SQRT_2), (0.7, 1.1), (2.5, 1.9)] {
            let m = build_matrix(&apt(d, g).expand(0.05));
            let t = m.pt_transform();
            let worst = (t + m.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst <= 1e-12, "{worst}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = eigenvalues_closed_form(&apt(SQRT_2, SQRT_2));
        assert_eq!(s.phase, SymmetryPhase::Ep);
        for l in s.lambdas {
            assert!(close(l, cx(0.0, -SQRT_2), 1e-7));
        }

        let s = eigenvalues_closed_form(&apt(0.0, SQRT_2));
        assert_eq!(s.phase, SymmetryPhase::Apt);
        assert!(s.lambdas.iter().any(|l| l.norm() < 1e-15));
        assert!(s.suppression_gap < 1e-15);
        assert!(s.lambdas.iter().all(|l| l.re == 0.0));

        // Δ = Γ, γ = √2Γ: λ₁ = −i(√2 − 1)
        let s = eigenvalues_closed_form(&apt(1.0, SQRT_2));
        assert!(close(s.lambdas[0], cx(0.0, -(SQRT_2 - 1.0)), 1e-15));
        let numeric = eigenvalues_numeric(&build_matrix(&apt(1.0, SQRT_2).expand(0.05)));
        assert!(same_multiset(&numeric.lambdas, &s.lambdas, 1e-12));
    }

    #[test]
    fn numeric_examples() {
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(cx(1.0, 2.0), cx(-0.5, 0.0), cx(3.0, -1.0)));
        let s = eigenvalues_numeric(&CouplingMatrix::from_entries(d));
        assert!(same_multiset(&s.lambdas, &[cx(1.0, 2.0), cx(-0.5, 0.0), cx(3.0, -1.0)], 1e-13));

        let a = apt(0.5, SQRT_2);
        let numeric = eigenvalues_numeric(&build_matrix(&a.expand(0.05)));
        let closed = eigenvalues_closed_form(&a);
        assert!(same_multiset(&numeric.lambdas, &closed.lambdas, 1e-9));
        assert_eq!(numeric.phase, SymmetryPhase::Apt);
    }

    #[test]
    fn numeric_residual_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let m = Matrix3::from_fn(|_, _| cx(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
            let cm = CouplingMatrix::from_entries(m);
            let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for l in eigenvalues_numeric(&cm).lambdas {
                let det = (m - Matrix3::from_diagonal_element(l)).determinant();
                assert!(det.norm() <= 1e-8 * norm.powi(3), "{}", det.norm());
            }
        }
    }

    #[test]
    fn suppression_detuning_examples() {
        assert_eq!(suppression_detunings(0.0, 1.0), vec![-1.0, 1.0]);
        assert_eq!(suppression_detunings(SQRT_2 - 1.0, 1.0), vec![0.0]);
        assert!(suppression_detunings(0.5, 1.0).is_empty());
        for gb in [0.0, 0.1, 0.2, 0.3, 0.4] {
            for d in suppression_detunings(gb, 1.0) {
                let e = apt(d, gb + 1.0).ep_condition();
                assert!(e.abs() <= 1e-10, "{e}");
            }
        }
    }

    #[test]
    fn phase_classification() {
        assert_eq!(classify_phase(&apt(0.0, 1.3)).unwrap(), SymmetryPhase::Apt);
        assert_eq!(classify_phase(&apt(2.0, 1.3)).unwrap(), SymmetryPhase::Aptb);
        assert_eq!(classify_phase(&apt(SQRT_2, 1.3)).unwrap(), SymmetryPhase::Ep);
        assert!(classify_phase(&apt(0.0, 1.3).with_g(0.03)).is_err());

        let broken = eigenvalues_numeric(&build_matrix(&apt(2.0, 1.3).expand(0.0)));
        let reals: Vec<f64> = broken.lambdas.iter().map(|z| z.re).collect();
        assert!(reals[0] > 0.1 && reals[2] < -0.1 && (reals[0] + reals[2]).abs() < 1e-12);
    }

    #[test]
    fn middle_eigenvalue_fixed() {
        for &(d, g) in &[(0.0, 0.0), (0.8, 0.03), (-2.2, 0.1)] {
            let a = apt(d, 1.37).with_g(g);
            let s = eigenvalues_numeric(&build_matrix(&a.expand(0.05)));
            assert!(s.lambdas.iter().any(|l| close(*l, cx(0.0, -1.37), 1e-10)));
        }
    }

    #[test]
    fn branch_following_keeps_labels() {
        let prev = [cx(1.0, 0.0), cx(0.0, -1.0), cx(-1.0, 0.0)];
        let cur = [cx(-1.01, 0.0), cx(1.02, 0.0), cx(0.0, -1.01)];
        let out = follow_branches(&prev, cur);
        assert_eq!(out, [cx(1.02, 0.0), cx(0.0, -1.01), cx(-1.01, 0.0)]);
    }

    #[test]
    fn ep_locator_and_zero_crossings() {
        let d = locate_exceptional_point(&apt(0.0, 1.5), 1.0, 2.0).unwrap();
        assert!((d - SQRT_2).abs() < 1e-12);
        assert!(locate_exceptional_point(&apt(0.0, 1.5), 0.0, 1.0).is_none());

        let z = linewidth_zero_crossings(&apt(0.0, 1.0), 3.0, 301);
        assert_eq!(z.len(), 2);
        assert!((z[0] + 1.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
        let z = linewidth_zero_crossings(&apt(0.0, SQRT_2), 3.0, 301);
        assert_eq!(z, vec![0.0]);
    }
}
