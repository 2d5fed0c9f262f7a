//! Parameter space of the three-mode model and the quantities derived from it.
//!
//! Rates are angular (rad/s) at the boundary. Every solver in this crate is
//! homogeneous in the rates, so after [`SystemParams::normalize`] the same
//! code runs in units of the dissipative coupling Γ.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{ModelError, Result};

/// Planck constant (J s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts an ordinary frequency `f` (Hz) to an angular rate `2πf` (rad/s).
pub fn hz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Mode ordering used for vectors and matrices throughout: (b₁, a, b₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Magnon1,
    Cavity,
    Magnon2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Magnon1, Mode::Cavity, Mode::Magnon2];

    pub fn index(self) -> usize {
        match self {
            Mode::Magnon1 => 0,
            Mode::Cavity => 1,
            Mode::Magnon2 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Magnon1 => "b1",
            Mode::Cavity => "a",
            Mode::Magnon2 => "b2",
        }
    }
}

/// Full parameter set of the cavity–magnon–waveguide model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Waveguide-mediated dissipative coupling Γ (the unit scale).
    pub gamma_wg: f64,
    /// Intrinsic magnon decay rates.
    pub gamma_b1: f64,
    pub gamma_b2: f64,
    /// Cavity loss κ₋ and incoherent gain κ₊.
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    /// Detunings from the drive: Δ₁, Δ₂ (magnons) and Δₐ (cavity).
    pub delta1: f64,
    pub delta2: f64,
    pub delta_a: f64,
    /// Coherent cavity–magnon couplings.
    pub g1: f64,
    pub g2: f64,
    /// Kerr coefficients (rate per excitation).
    pub u_a: f64,
    pub u_b1: f64,
    pub u_b2: f64,
    /// Drive amplitude Ω; the drive intensity is I = Ω².
    pub omega: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, strict: bool| -> Result<()> {
            if !v.is_finite() {
                return Err(ModelError::InvalidParameter { name, reason: format!("not finite: {v}") });
            }
            if (strict && v <= 0.0) || (!strict && v < 0.0) {
                let bound = if strict { "> 0" } else { ">= 0" };
                return Err(ModelError::InvalidParameter { name, reason: format!("must be {bound}, got {v}") });
            }
            Ok(())
        };
        check("Gamma", self.gamma_wg, true)?;
        check("kappa_minus", self.kappa_minus, false)?;
        check("kappa_plus", self.kappa_plus, false)?;
        check("gamma_b1", self.gamma_b1, false)?;
        check("gamma_b2", self.gamma_b2, false)?;
        for (name, v) in [
            ("Delta1", self.delta1),
            ("Delta2", self.delta2),
            ("Delta_a", self.delta_a),
            ("g1", self.g1),
            ("g2", self.g2),
            ("U_a", self.u_a),
            ("U_b1", self.u_b1),
            ("U_b2", self.u_b2),
            ("Omega", self.omega),
        ] {
            if !v.is_finite() {
                return Err(ModelError::InvalidParameter { name, reason: format!("not finite: {v}") });
            }
        }
        Ok(())
    }

    /// Net cavity damping γₐ = κ₋ − κ₊ (negative means net gain).
    pub fn gamma_a(&self) -> f64 {
        derived_gamma_a(self)
    }

    pub fn intensity(&self) -> f64 {
        self.omega * self.omega
    }

    /// Kerr coefficient of `mode`.
    pub fn kerr(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Magnon1 => self.u_b1,
            Mode::Cavity => self.u_a,
            Mode::Magnon2 => self.u_b2,
        }
    }

    pub fn kerr_vector(&self) -> [f64; 3] {
        [self.u_b1, self.u_a, self.u_b2]
    }

    /// The single nonlinear mode, or `None` for the linear model.
    pub fn kerr_mode(&self) -> Result<Option<Mode>> {
        let active: Vec<Mode> = Mode::ALL.into_iter().filter(|&m| self.kerr(m) != 0.0).collect();
        match active.as_slice() {
            [] => Ok(None),
            [m] => Ok(Some(*m)),
            many => Err(ModelError::MultipleKerrModes(
                many.iter().map(|m| m.label()).collect::<Vec<_>>().join(", "),
            )),
        }
    }

    /// Same parameters with `mode`'s Kerr coefficient replaced.
    pub fn with_kerr(mut self, mode: Mode, u: f64) -> Self {
        match mode {
            Mode::Magnon1 => self.u_b1 = u,
            Mode::Cavity => self.u_a = u,
            Mode::Magnon2 => self.u_b2 = u,
        }
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_delta_a(mut self, delta_a: f64) -> Self {
        self.delta_a = delta_a;
        self
    }

    /// Expresses every rate in units of Γ (Γ becomes 1).
    pub fn normalize(&self) -> Result<SystemParams> {
        if !(self.gamma_wg > 0.0) || !self.gamma_wg.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "Gamma",
                reason: format!("must be > 0 to normalize, got {}", self.gamma_wg),
            });
        }
        Ok(self.map_rates(|v| v / self.gamma_wg))
    }

    /// Inverse of [`normalize`](Self::normalize) for a physical Γ = `gamma_wg`.
    pub fn denormalize(&self, gamma_wg: f64) -> SystemParams {
        let scale = gamma_wg / self.gamma_wg;
        self.map_rates(|v| v * scale)
    }

    fn map_rates(&self, f: impl Fn(f64) -> f64) -> SystemParams {
        SystemParams {
            gamma_wg: f(self.gamma_wg),
            gamma_b1: f(self.gamma_b1),
            gamma_b2: f(self.gamma_b2),
            kappa_minus: f(self.kappa_minus),
            kappa_plus: f(self.kappa_plus),
            delta1: f(self.delta1),
            delta2: f(self.delta2),
            delta_a: f(self.delta_a),
            g1: f(self.g1),
            g2: f(self.g2),
            u_a: f(self.u_a),
            u_b1: f(self.u_b1),
            u_b2: f(self.u_b2),
            omega: f(self.omega),
        }
    }
}

/// Symmetric anti-PT operating point: Δₐ = 0, Δ = Δ₁ = −Δ₂ and
/// γ = γ_b + Γ = γₐ + 2Γ, with equal coherent couplings g₁ = g₂ = g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AptConfig {
    pub delta: f64,
    pub gamma: f64,
    pub gamma_wg: f64,
    pub g: f64,
}

impl AptConfig {
    pub fn new(delta: f64, gamma: f64, gamma_wg: f64) -> Self {
        AptConfig { delta, gamma, gamma_wg, g: 0.0 }
    }

    /// Operating point from the magnon decay rate: γ = γ_b + Γ.
    pub fn from_magnon_decay(delta: f64, gamma_b: f64, gamma_wg: f64) -> Self {
        AptConfig::new(delta, gamma_b + gamma_wg, gamma_wg)
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Magnon intrinsic decay γ_b = γ − Γ.
    pub fn magnon_decay(&self) -> f64 {
        self.gamma - self.gamma_wg
    }

    /// Net cavity damping γₐ = γ − 2Γ.
    pub fn cavity_damping(&self) -> f64 {
        self.gamma - 2.0 * self.gamma_wg
    }

    /// Optical gain −γₐ = 2Γ − γ implied by the constraint set.
    pub fn implied_gain(&self) -> f64 {
        2.0 * self.gamma_wg - self.gamma
    }

    pub fn ep_condition(&self) -> f64 {
        ep_condition(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_wg > 0.0) || !self.gamma_wg.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "Gamma",
                reason: format!("must be > 0, got {}", self.gamma_wg),
            });
        }
        if self.gamma < self.gamma_wg {
            return Err(ModelError::InvalidParameter {
                name: "gamma",
                reason: format!(
                    "gamma = {} < Gamma = {} implies a negative magnon decay rate",
                    self.gamma, self.gamma_wg
                ),
            });
        }
        if !self.delta.is_finite() || !self.g.is_finite() {
            return Err(ModelError::InvalidParameter { name: "Delta", reason: "not finite".into() });
        }
        Ok(())
    }

    /// Expands to the full parameter set with cavity loss `kappa_minus`; the
    /// incoherent gain is chosen so that γₐ = γ − 2Γ. Kerr terms and drive
    /// are zero.
    pub fn expand(&self, kappa_minus: f64) -> SystemParams {
        let gamma_b = self.magnon_decay();
        SystemParams {
            gamma_wg: self.gamma_wg,
            gamma_b1: gamma_b,
            gamma_b2: gamma_b,
            kappa_minus,
            kappa_plus: kappa_minus - self.cavity_damping(),
            delta1: self.delta,
            delta2: -self.delta,
            delta_a: 0.0,
            g1: self.g,
            g2: self.g,
            u_a: 0.0,
            u_b1: 0.0,
            u_b2: 0.0,
            omega: 0.0,
        }
    }
}

/// Laser drive specification in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Input power (W).
    pub power: f64,
    /// Drive wavelength (m).
    pub wavelength: f64,
    /// Cavity loss κ₋ (rad/s).
    pub kappa_minus: f64,
}

/// γₐ = κ₋ − κ₊.
pub fn derived_gamma_a(p: &SystemParams) -> f64 {
    p.kappa_minus - p.kappa_plus
}

/// Linewidth-suppression condition E_p = Δ² + γ² − 2Γ².
pub fn ep_condition(apt: &AptConfig) -> f64 {
    apt.delta * apt.delta + apt.gamma * apt.gamma - 2.0 * apt.gamma_wg * apt.gamma_wg
}

/// Drive amplitude Ω = √(P κ₋ / ħω_d) with ω_d = 2πc/λ, in rad/s.
pub fn drive_amplitude(d: &DriveSpec) -> Result<f64> {
    if !(d.power >= 0.0) || !d.power.is_finite() {
        return Err(ModelError::InvalidParameter { name: "power", reason: format!("must be >= 0, got {}", d.power) });
    }
    if !(d.wavelength > 0.0) || !d.wavelength.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "wavelength",
            reason: format!("must be > 0, got {}", d.wavelength),
        });
    }
    if !(d.kappa_minus >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "kappa_minus",
            reason: format!("must be >= 0, got {}", d.kappa_minus),
        });
    }
    // ħω_d = h c / λ
    let photon_energy = PLANCK * SPEED_OF_LIGHT / d.wavelength;
    Ok((d.power * d.kappa_minus / photon_energy).sqrt())
}

/// γ at which a single suppression point sits at Δ = 0: γ = √2 Γ.
pub fn single_suppression_gamma(gamma_wg: f64) -> f64 {
    SQRT_2 * gamma_wg
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gamma_unit() -> f64 {
        hz(1e6)
    }

    #[test]
    fn gamma_a_examples() {
        let mut p = AptConfig::new(0.0, SQRT_2, 1.0).expand(0.05);
        p.kappa_plus = 0.0;
        assert_eq!(derived_gamma_a(&p), 0.05);

        p.kappa_plus = (2.0 - SQRT_2) + 0.05;
        assert_relative_eq!(derived_gamma_a(&p), -(2.0 - SQRT_2), max_relative = 1e-14);
        assert_relative_eq!(derived_gamma_a(&p), -0.585_786_437_626_905, max_relative = 1e-12);

        p.kappa_plus = p.kappa_minus;
        assert_eq!(derived_gamma_a(&p), 0.0);
    }

    #[test]
    fn ep_condition_examples() {
        assert_eq!(ep_condition(&AptConfig::new(1.0, 1.0, 1.0)), 0.0);
        assert!(ep_condition(&AptConfig::new(0.0, SQRT_2, 1.0)).abs() < 1e-15);
        assert_eq!(ep_condition(&AptConfig::new(0.0, 1.0, 1.0)), -1.0);
    }

    #[test]
    fn drive_amplitude_examples() {
        let kappa = 0.05 * gamma_unit();
        let zero = DriveSpec { power: 0.0, wavelength: 1550e-9, kappa_minus: kappa };
        assert_eq!(drive_amplitude(&zero).unwrap(), 0.0);

        // sqrt(P κ λ / (h c)) evaluated at 40 digits
        let d = DriveSpec { power: 8e-6, wavelength: 1550e-9, kappa_minus: kappa };
        assert_relative_eq!(drive_amplitude(&d).unwrap(), 4_428_405_818.816_121_5, max_relative = 1e-13);

        let d100 = DriveSpec { power: 8e-4, ..d };
        assert_relative_eq!(
            drive_amplitude(&d100).unwrap(),
            10.0 * drive_amplitude(&d).unwrap(),
            max_relative = 1e-14
        );

        let neg = DriveSpec { power: -1.0, ..d };
        assert!(matches!(drive_amplitude(&neg), Err(ModelError::InvalidParameter { name: "power", .. })));
    }

    #[test]
    fn normalize_examples() {
        let gw = gamma_unit();
        let mut p = AptConfig::new(gw, SQRT_2 * gw, gw).expand(0.05 * gw);
        p.u_a = hz(1e-9);
        let n = p.normalize().unwrap();
        assert_relative_eq!(n.delta1, 1.0, max_relative = 1e-15);
        assert_relative_eq!(n.u_a, 1e-15, max_relative = 1e-15);
        assert_eq!(n.gamma_wg, 1.0);
        assert_eq!(n.normalize().unwrap(), n);

        let mut bad = p;
        bad.gamma_wg = 0.0;
        assert!(bad.normalize().is_err());
    }

    #[test]
    fn kerr_mode_detection() {
        let p = AptConfig::new(0.0, 1.5, 1.0).expand(0.05);
        assert_eq!(p.kerr_mode().unwrap(), None);
        assert_eq!(p.with_kerr(Mode::Magnon1, 1e-3).kerr_mode().unwrap(), Some(Mode::Magnon1));
        let both = p.with_kerr(Mode::Magnon1, 1e-3).with_kerr(Mode::Cavity, 1e-3);
        assert!(matches!(both.kerr_mode(), Err(ModelError::MultipleKerrModes(_))));
    }

    #[test]
    fn apt_expansion_reports_gain() {
        let apt = AptConfig::new(0.0, SQRT_2, 1.0);
        let p = apt.expand(0.05);
        assert_relative_eq!(apt.implied_gain(), 2.0 - SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(-p.gamma_a(), 2.0 - SQRT_2, max_relative = 1e-14);
        assert_eq!(p.gamma_b1, p.gamma_b2);
        assert!(AptConfig::new(0.0, 0.5, 1.0).validate().is_err());
    }
}
