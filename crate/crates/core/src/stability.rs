//! Linear stability of steady states through the 6×6 real fluctuation
//! matrix in the quadrature basis (δq_b1, δp_b1, δq_a, δp_a, δq_b2, δp_b2).

use nalgebra::{DMatrix, SMatrix, Schur};
use rand::{Rng, SeedableRng};
use num_complex::Complex64;

use crate::error::Result;
use crate::params::{AptConfig, Mode, SystemParams};
use crate::spectrum::build_matrix;
use crate::steady::{BranchSet, SteadyState};

pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Largest real parts below this (relative to Γ) are marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Kerr auxiliaries Λ = U(α² − α*²), Ξ = U(α² + α*²), Σ = 4U|α|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrAux {
    pub lambda: Complex64,
    pub xi: f64,
    pub sigma: f64,
}

impl KerrAux {
    pub fn new(u: f64, amp: Complex64) -> Self {
        let sq = amp * amp;
        KerrAux { lambda: (sq - sq.conj()) * u, xi: u * 2.0 * sq.re, sigma: 4.0 * u * amp.norm_sqr() }
    }

    /// iΛ, which is real.
    pub fn i_lambda(&self) -> f64 {
        (Complex64::new(0.0, 1.0) * self.lambda).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationMatrix {
    pub entries: Matrix6,
    pub aux: KerrAux,
    /// Γ, the scale for tolerances.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityClass {
    Stable,
    Unstable,
    /// Within the floating-point band around the stability boundary.
    Marginal,
}

impl StabilityClass {
    pub fn label(self) -> &'static str {
        match self {
            StabilityClass::Stable => "STABLE",
            StabilityClass::Unstable => "UNSTABLE",
            StabilityClass::Marginal => "MARGINAL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub class: StabilityClass,
    /// max Re λ < 0.
    pub stable: bool,
    /// From the eigenvalues of the matrix itself (rad/s).
    pub max_real_part: f64,
    /// From the companion-matrix roots of the characteristic polynomial.
    pub companion_max_real_part: f64,
    pub routh_stable: bool,
    /// Routh–Hurwitz and companion roots give the same verdict.
    pub method_agreement: bool,
}

/// Quadrature form of −i·h acting on one amplitude.
fn rotation_block(h: Complex64) -> [[f64; 2]; 2] {
    [[h.im, h.re], [-h.re, h.im]]
}

fn set_block(m: &mut Matrix6, i: usize, j: usize, b: [[f64; 2]; 2]) {
    for r in 0..2 {
        for c in 0..2 {
            m[(2 * i + r, 2 * j + c)] = b[r][c];
        }
    }
}

/// Fluctuation matrix of the anti-PT configuration with a Kerr cavity:
/// magnon blocks (−γ, ±Δ), cavity block (−γ + iΛ, −Σ + Ξ; Σ + Ξ, −γ − iΛ),
/// couplings −Γ (and ±g for coherent coupling).
pub fn build_fluctuation_matrix(apt: &AptConfig, u_a: f64, alpha: Complex64) -> FluctuationMatrix {
    let (d, g, gw) = (apt.delta, apt.gamma, apt.gamma_wg);
    let aux = KerrAux::new(u_a, alpha);
    let il = aux.i_lambda();
    let mut m = Matrix6::zeros();
    set_block(&mut m, 0, 0, [[-g, d], [-d, -g]]);
    set_block(&mut m, 1, 1, [[-g + il, -aux.sigma + aux.xi], [aux.sigma + aux.xi, -g - il]]);
    set_block(&mut m, 2, 2, [[-g, -d], [d, -g]]);
    let link = [[-gw, apt.g], [-apt.g, -gw]];
    for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
        set_block(&mut m, i, j, link);
    }
    FluctuationMatrix { entries: m, aux, scale: gw }
}

/// Jacobian of the mean-field equations at `state` for any parameter set
/// with a single Kerr mode.
pub fn jacobian(p: &SystemParams, state: &SteadyState) -> Result<FluctuationMatrix> {
    let h = build_matrix(p).entries;
    let mut m = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            set_block(&mut m, i, j, rotation_block(h[(i, j)]));
        }
    }
    let amps = state.amplitudes();
    let mut aux = KerrAux::new(0.0, Complex64::new(0.0, 0.0));
    if let Some(mode) = p.kerr_mode()? {
        let k = mode.index();
        let u = p.kerr(mode);
        let (a, b) = (amps[k].re, amps[k].im);
        // d/d(a, b) of 2iU(a² + b²)(a + ib)
        let kerr = [[-4.0 * u * a * b, -2.0 * u * (a * a + 3.0 * b * b)], [2.0 * u * (3.0 * a * a + b * b), 4.0 * u * a * b]];
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * k + r, 2 * k + c)] += kerr[r][c];
            }
        }
        aux = KerrAux::new(u, amps[k]);
    }
    Ok(FluctuationMatrix { entries: m, aux, scale: p.gamma_wg })
}

/// Characteristic polynomial det(λI − A) by the Leverrier–Faddeev
/// recursion; coefficients in ascending powers, leading coefficient 1.
pub fn leverrier_faddeev(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let id = DMatrix::<f64>::identity(n, n);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &mk).trace() / k as f64;
    }
    coeffs
}

/// Routh array summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RouthColumn {
    pub first_column: Vec<f64>,
    /// A zero pivot or zero row was met: roots on (or symmetric about) the
    /// imaginary axis.
    pub degenerate: bool,
}

/// First column of the Routh array of a polynomial given in ascending
/// powers. Zero pivots are replaced by a small ε; an all-zero row is
/// replaced by the derivative of the auxiliary polynomial.
pub fn routh_first_column(coeffs: &[f64]) -> RouthColumn {
    let n = coeffs.len() - 1;
    let width = n / 2 + 1;
    let mag = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    let zero = 1e-13 * mag;
    let eps = 1e-10 * mag;
    let row_from = |start: usize| -> Vec<f64> {
        (0..width).map(|j| if start >= 2 * j { coeffs[start - 2 * j] } else { 0.0 }).collect()
    };
    let mut rows: Vec<Vec<f64>> = vec![row_from(n)];
    if n >= 1 {
        rows.push(row_from(n - 1));
    }
    let mut degenerate = false;
    for i in 2..=n {
        let prev2 = rows[i - 2].clone();
        let mut pivot_row = rows[i - 1].clone();
        if pivot_row.iter().all(|v| v.abs() <= zero) {
            let order = n - (i - 2);
            pivot_row = (0..width)
                .map(|j| if order >= 2 * j { (order - 2 * j) as f64 * prev2[j] } else { 0.0 })
                .collect();
            rows[i - 1] = pivot_row.clone();
            degenerate = true;
        }
        if pivot_row[0].abs() <= zero {
            degenerate = true;
            pivot_row[0] = eps;
            rows[i - 1][0] = eps;
        }
        let p0 = pivot_row[0];
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev2.get(j + 1).copied().unwrap_or(0.0);
                let b = pivot_row.get(j + 1).copied().unwrap_or(0.0);
                (p0 * a - prev2[0] * b) / p0
            })
            .collect();
        rows.push(next);
    }
    if rows[n][0].abs() <= zero {
        degenerate = true;
    }
    RouthColumn { first_column: rows.iter().map(|r| r[0]).collect(), degenerate }
}

/// All first-column entries strictly positive and no degeneracy.
pub fn routh_hurwitz(coeffs: &[f64]) -> bool {
    let col = routh_first_column(coeffs);
    !col.degenerate && col.first_column.iter().all(|&v| v > 0.0)
}

/// Roots of a monic polynomial (ascending coefficients) as eigenvalues of
/// its companion matrix.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -coeffs[i] / lead;
    }
    eigenvalues_of(c)
}

/// Eigenvalues of a real square matrix through a capped real Schur
/// iteration. If the QR sweep stalls the matrix is rotated by a seeded
/// random orthogonal similarity and retried.
pub fn eigenvalues_of(m: DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut a = m.clone();
    for attempt in 0..8 {
        let eps = if attempt < 6 { f64::EPSILON } else { 1e-12 };
        if let Some(schur) = Schur::try_new(a.clone(), eps, 2000 * n) {
            return schur.complex_eigenvalues().iter().copied().collect();
        }
        let q = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        a = q.transpose() * &m * q;
    }
    vec![Complex64::new(f64::NAN, f64::NAN); n]
}

impl FluctuationMatrix {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        eigenvalues_of(DMatrix::from_iterator(6, 6, self.entries.iter().copied()))
    }

    /// Characteristic polynomial of the matrix in units of Γ.
    pub fn characteristic_polynomial(&self) -> Vec<f64> {
        let a = DMatrix::from_iterator(6, 6, self.entries.iter().map(|v| v / self.scale));
        leverrier_faddeev(&a)
    }
}

fn max_re(zs: &[Complex64]) -> f64 {
    zs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Routh–Hurwitz verdict with an eigenvalue cross-check.
pub fn routh_hurwitz_stable(m: &FluctuationMatrix) -> StabilityVerdict {
    let poly = m.characteristic_polynomial();
    let routh_stable = routh_hurwitz(&poly);
    let companion_max_real_part = max_re(&companion_roots(&poly)) * m.scale;
    let max_real_part = max_re(&m.eigenvalues());
    let class = if max_real_part.abs() < MARGINAL_TOL * m.scale {
        StabilityClass::Marginal
    } else if max_real_part < 0.0 {
        StabilityClass::Stable
    } else {
        StabilityClass::Unstable
    };
    StabilityVerdict {
        class,
        stable: max_real_part < 0.0,
        max_real_part,
        companion_max_real_part,
        routh_stable,
        method_agreement: routh_stable == (companion_max_real_part < 0.0),
    }
}

/// Verdict for one steady state of `p`.
pub fn steady_state_stability(p: &SystemParams, state: &SteadyState) -> Result<StabilityVerdict> {
    Ok(routh_hurwitz_stable(&jacobian(p, state)?))
}

/// Assigns every root's stability from its fluctuation matrix.
pub fn classify_branch_stability(mut set: BranchSet, p: &SystemParams) -> Result<BranchSet> {
    for root in &mut set.roots {
        if let Some(state) = &root.state {
            root.stability = Some(steady_state_stability(p, state)?.class);
        }
    }
    Ok(set)
}

/// Steady states of `p` with stability assigned.
pub fn classified_steady_states(p: &SystemParams, mode: Mode) -> Result<BranchSet> {
    classify_branch_stability(crate::steady::kerr_steady_states(p, mode)?, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::eigenvalues_closed_form;
    use crate::steady::linear_steady_state;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn zero_state() -> SteadyState {
        SteadyState::from_amplitudes([Complex64::new(0.0, 0.0); 3])
    }

    #[test]
    fn diagonal_matrix_is_stable() {
        let m = FluctuationMatrix {
            entries: Matrix6::from_diagonal(&nalgebra::Vector6::new(-1.0, -2.0, -3.0, -4.0, -5.0, -6.0)),
            aux: KerrAux::new(0.0, Complex64::new(0.0, 0.0)),
            scale: 1.0,
        };
        let v = routh_hurwitz_stable(&m);
        assert_eq!(v.class, StabilityClass::Stable);
        assert!(v.routh_stable && v.method_agreement);
        assert_relative_eq!(v.max_real_part, -1.0, max_relative = 1e-12);
        assert_relative_eq!(v.companion_max_real_part, -1.0, max_relative = 1e-9);
    }

    #[test]
    fn leverrier_matches_known_polynomial() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(leverrier_faddeev(&a), vec![-2.0, -5.0, 1.0]);
    }

    #[test]
    fn routh_examples() {
        // (s + 1)(s + 2)(s + 3)
        assert!(routh_hurwitz(&[6.0, 11.0, 6.0, 1.0]));
        // (s − 1)(s + 2)(s + 3)
        assert!(!routh_hurwitz(&[-6.0, 1.0, 4.0, 1.0]));
        // s⁴ + 2s³ + 3s² + 4s + 5: two sign changes
        let col = routh_first_column(&[5.0, 4.0, 3.0, 2.0, 1.0]).first_column;
        assert_eq!(col.iter().filter(|v| **v < 0.0).count(), 1);
        // (s² + 1)(s + 1): zero row handled, not strictly stable
        assert!(!routh_hurwitz(&[1.0, 1.0, 1.0, 1.0]));
    }

    #[test]
    fn apt_matrix_structure() {
        let m = build_fluctuation_matrix(&AptConfig::new(0.5, 1.3, 1.0), 0.0, Complex64::new(0.7, -0.2));
        assert_eq!(m.entries[(2, 2)], -1.3);
        assert_eq!(m.entries[(0, 2)], -1.0);
        assert_eq!(m.entries[(3, 5)], -1.0);
        assert_eq!(m.entries[(3, 4)], 0.0);
        assert_eq!(m.entries[(0, 1)], 0.5);
        assert_eq!(m.entries[(5, 4)], 0.5);

        let aux = KerrAux::new(0.3, Complex64::new(1.2, 0.0));
        assert_eq!(aux.lambda, Complex64::new(0.0, 0.0));
        assert_relative_eq!(aux.xi, 2.0 * 0.3 * 1.44, max_relative = 1e-15);
        assert_relative_eq!(aux.sigma, 4.0 * 0.3 * 1.44, max_relative = 1e-15);

        let aux = KerrAux::new(0.3, Complex64::new(1.2, -0.4));
        assert!(aux.lambda.re.abs() <= 1e-14 * aux.lambda.norm());
    }

    #[test]
    fn apt_form_equals_jacobian() {
        let apt = AptConfig::new(0.5, 1.3, 1.0);
        let u = 1e-6;
        let alpha = linear_steady_state(&apt, 2.0).unwrap().alpha + Complex64::new(0.0, 0.4);
        let mut state = zero_state();
        state.alpha = alpha;
        let p = apt.expand(0.05).with_kerr(Mode::Cavity, u);
        let j = jacobian(&p, &state).unwrap();
        let a = build_fluctuation_matrix(&apt, u, alpha);
        assert!((j.entries - a.entries).amax() < 1e-14);
        assert_relative_eq!(j.aux.sigma, a.aux.sigma, max_relative = 1e-15);
    }

    #[test]
    fn verdict_examples() {
        let m = build_fluctuation_matrix(&AptConfig::new(0.0, SQRT_2, 1.0), 0.0, Complex64::new(0.0, 0.0));
        assert_eq!(routh_hurwitz_stable(&m).class, StabilityClass::Marginal);

        let m = build_fluctuation_matrix(&AptConfig::new(0.0, 1.5, 1.0), 0.0, Complex64::new(0.0, 0.0));
        let v = routh_hurwitz_stable(&m);
        assert_eq!(v.class, StabilityClass::Stable);
        assert!(v.method_agreement);
        assert_relative_eq!(v.max_real_part, -(1.5 - SQRT_2), max_relative = 1e-10);

        let m = build_fluctuation_matrix(&AptConfig::new(0.0, 1.2, 1.0), 0.0, Complex64::new(0.0, 0.0));
        let v = routh_hurwitz_stable(&m);
        assert_eq!(v.class, StabilityClass::Unstable);
        assert!(!v.routh_stable && v.method_agreement);
    }

    #[test]
    fn linear_real_parts_match_spectrum() {
        for &(d, g) in &[(0.3, 1.2), (1.7, 1.5), (-0.8, 1.9)] {
            let apt = AptConfig::new(d, g, 1.0);
            let m = build_fluctuation_matrix(&apt, 0.0, Complex64::new(0.0, 0.0));
            let mut re: Vec<f64> = m.eigenvalues().iter().map(|z| z.re).collect();
            let mut expect: Vec<f64> =
                eigenvalues_closed_form(&apt).lambdas.iter().flat_map(|l| [l.im, l.im]).collect();
            re.sort_by(f64::total_cmp);
            expect.sort_by(f64::total_cmp);
            for (a, b) in re.iter().zip(&expect) {
                assert!((a - b).abs() <= 1e-9, "{a} {b}");
            }
        }
    }

    #[test]
    fn bistable_middle_root_is_unstable() {
        let p = AptConfig::new(0.0, SQRT_2, 1.0)
            .expand(0.05)
            .with_delta_a(0.3)
            .with_kerr(Mode::Cavity, 0.01)
            .with_omega(0.1f64.sqrt());
        let set = classified_steady_states(&p, Mode::Cavity).unwrap();
        let classes: Vec<_> = set.roots.iter().map(|r| r.stability.unwrap()).collect();
        assert_eq!(classes, vec![StabilityClass::Stable, StabilityClass::Unstable, StabilityClass::Stable]);
    }
}
