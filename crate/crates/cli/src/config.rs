//! Line-oriented `key = value` run configuration with unit suffixes.
//!
//! ```text
//! [params]
//! Gamma = 1 MHz          # stored as 2π·10⁶ rad/s
//! gamma = 1.4142 Gamma   # relative to Γ
//! U_a = 1 nHz
//! power = 8 uW
//! wavelength = 1550 nm
//!
//! [sensing]
//! U_small = 0.1 nHz
//! U_large = 1 nHz
//! observable = cavity
//!
//! [axes]
//! axis1.name = Delta
//! axis1.start = -3 Gamma
//! axis1.stop = 3 Gamma
//! axis1.points = 601
//!
//! [output]
//! observables = eigenvalues, x, y, stability
//! format = csv
//! ```

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use antipt_core::params::{drive_amplitude, AptConfig, DriveSpec, SystemParams};
use antipt_core::sensing::Observable;
use thiserror::Error;

use crate::table::{format_float, Format};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Rate,
    Power,
    Length,
}

/// Physical parameters in SI units (rates in rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub gamma_wg: f64,
    pub gamma: f64,
    pub delta: f64,
    pub g: f64,
    pub delta_a: f64,
    pub kappa_minus: f64,
    pub u_a: f64,
    pub u_b1: f64,
    pub u_b2: f64,
    pub power: f64,
    /// Second drive power for two-power figures.
    pub power_high: f64,
    pub wavelength: f64,
}

const PARAM_KEYS: [(&str, Kind); 12] = [
    ("Gamma", Kind::Rate),
    ("gamma", Kind::Rate),
    ("Delta", Kind::Rate),
    ("g", Kind::Rate),
    ("Delta_a", Kind::Rate),
    ("kappa_minus", Kind::Rate),
    ("U_a", Kind::Rate),
    ("U_b1", Kind::Rate),
    ("U_b2", Kind::Rate),
    ("power", Kind::Power),
    ("power_high", Kind::Power),
    ("wavelength", Kind::Length),
];

/// Defaults defined relative to Γ; they follow a change of Γ.
const RELATIVE_RATES: [&str; 5] = ["gamma", "Delta", "g", "Delta_a", "kappa_minus"];

pub fn param_names() -> impl Iterator<Item = &'static str> {
    PARAM_KEYS.iter().map(|(k, _)| *k)
}

fn param_kind(name: &str) -> Option<Kind> {
    PARAM_KEYS.iter().find(|(k, _)| *k == name).map(|(_, kind)| *kind)
}

impl Default for ParamSet {
    /// Reference operating point: Γ/2π = 1 MHz, κ₋ = 0.05Γ, U_a/2π = 1 nHz,
    /// P = 8 μW, λ = 1550 nm, operating at the suppression point.
    fn default() -> Self {
        let gw = 2.0 * PI * 1e6;
        ParamSet {
            gamma_wg: gw,
            gamma: SQRT_2 * gw,
            delta: 0.0,
            g: 0.0,
            delta_a: 0.0,
            kappa_minus: 0.05 * gw,
            u_a: 2.0 * PI * 1e-9,
            u_b1: 0.0,
            u_b2: 0.0,
            power: 8e-6,
            power_high: 8e-3,
            wavelength: 1550e-9,
        }
    }
}

impl ParamSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "Gamma" => self.gamma_wg,
            "gamma" => self.gamma,
            "Delta" => self.delta,
            "g" => self.g,
            "Delta_a" => self.delta_a,
            "kappa_minus" => self.kappa_minus,
            "U_a" => self.u_a,
            "U_b1" => self.u_b1,
            "U_b2" => self.u_b2,
            "power" => self.power,
            "power_high" => self.power_high,
            "wavelength" => self.wavelength,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<(), ConfigError> {
        let slot = match name {
            "Gamma" => &mut self.gamma_wg,
            "gamma" => &mut self.gamma,
            "Delta" => &mut self.delta,
            "g" => &mut self.g,
            "Delta_a" => &mut self.delta_a,
            "kappa_minus" => &mut self.kappa_minus,
            "U_a" => &mut self.u_a,
            "U_b1" => &mut self.u_b1,
            "U_b2" => &mut self.u_b2,
            "power" => &mut self.power,
            "power_high" => &mut self.power_high,
            "wavelength" => &mut self.wavelength,
            _ => return Err(ConfigError::Invalid(format!("unknown parameter `{name}`"))),
        };
        *slot = v;
        Ok(())
    }

    pub fn with(mut self, name: &str, v: f64) -> Result<Self, ConfigError> {
        self.set(name, v)?;
        Ok(self)
    }

    /// Drive amplitude Ω (rad/s) at `power`.
    pub fn omega_at(&self, power: f64) -> antipt_core::Result<f64> {
        drive_amplitude(&DriveSpec { power, wavelength: self.wavelength, kappa_minus: self.kappa_minus })
    }

    /// Operating point in units of Γ.
    pub fn apt(&self) -> AptConfig {
        let gw = self.gamma_wg;
        AptConfig::new(self.delta / gw, self.gamma / gw, 1.0).with_g(self.g / gw)
    }

    /// Full parameter set in units of Γ at drive `power`.
    pub fn normalized_at(&self, power: f64) -> antipt_core::Result<SystemParams> {
        let gw = self.gamma_wg;
        let mut p = self.apt().expand(self.kappa_minus / gw).with_delta_a(self.delta_a / gw);
        p.u_a = self.u_a / gw;
        p.u_b1 = self.u_b1 / gw;
        p.u_b2 = self.u_b2 / gw;
        p.omega = self.omega_at(power)? / gw;
        p.validate()?;
        Ok(p)
    }

    pub fn normalized(&self) -> antipt_core::Result<SystemParams> {
        self.normalized_at(self.power)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, _) in PARAM_KEYS {
            let v = self.get(name).unwrap();
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("`{name}` is not finite")));
            }
        }
        if self.gamma_wg <= 0.0 {
            return Err(ConfigError::Invalid("`Gamma` must be > 0".into()));
        }
        if self.wavelength <= 0.0 {
            return Err(ConfigError::Invalid("`wavelength` must be > 0".into()));
        }
        if self.power < 0.0 || self.power_high < 0.0 {
            return Err(ConfigError::Invalid("power must be >= 0".into()));
        }
        if self.kappa_minus < 0.0 {
            return Err(ConfigError::Invalid("`kappa_minus` must be >= 0".into()));
        }
        self.apt().validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingSpec {
    /// Kerr pair (rad/s), U_small < U_large.
    pub u_small: f64,
    pub u_large: f64,
    pub observable: Observable,
}

impl Default for SensingSpec {
    fn default() -> Self {
        SensingSpec { u_small: 2.0 * PI * 1e-10, u_large: 2.0 * PI * 1e-9, observable: Observable::Cavity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    /// SI values.
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: AxisScale,
}

impl Axis {
    pub fn linear(name: &str, start: f64, stop: f64, points: usize) -> Self {
        Axis { name: name.into(), start, stop, points, scale: AxisScale::Linear }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.start];
        }
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    self.stop
                } else if k == 0 {
                    self.start
                } else {
                    match self.scale {
                        AxisScale::Linear => self.start + (self.stop - self.start) * t,
                        AxisScale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                    }
                }
            })
            .collect()
    }
}

/// Quantities a generic sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantity {
    Eigenvalues,
    X,
    Y,
    Eta,
    Stability,
    Regime,
}

impl Quantity {
    pub const ALL: [Quantity; 6] =
        [Quantity::Eigenvalues, Quantity::X, Quantity::Y, Quantity::Eta, Quantity::Stability, Quantity::Regime];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Eigenvalues => "eigenvalues",
            Quantity::X => "x",
            Quantity::Y => "y",
            Quantity::Eta => "eta",
            Quantity::Stability => "stability",
            Quantity::Regime => "regime",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Quantity::ALL.into_iter().find(|q| q.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub quantities: Vec<Quantity>,
    pub format: Format,
    pub path: Option<String>,
    pub seed: u64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { quantities: Quantity::ALL.to_vec(), format: Format::Csv, path: None, seed: 1 }
    }
}

/// A fully resolved run: parameters, sensing pair, sweep axes and output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepSpec {
    pub params: ParamSet,
    pub sensing: SensingSpec,
    pub axes: Vec<Axis>,
    pub output: OutputSpec,
}

/// Splits "8 mW", "8mW" or "-3 Gamma" into number and unit.
fn split_value(s: &str) -> (&str, &str) {
    let s = s.trim();
    if let Some((num, unit)) = s.split_once(char::is_whitespace) {
        return (num.trim(), unit.trim());
    }
    let bytes: Vec<char> = s.chars().collect();
    let mut cut = bytes.len();
    while cut > 0 && (bytes[cut - 1].is_alphabetic() || bytes[cut - 1] == '/') {
        cut -= 1;
    }
    let byte_cut = s.char_indices().nth(cut).map_or(s.len(), |(i, _)| i);
    (&s[..byte_cut], &s[byte_cut..])
}

fn parse_number(s: &str, line: usize) -> Result<f64, ConfigError> {
    let v: f64 = s.parse().map_err(|_| at(line, format!("malformed number `{s}`")))?;
    if !v.is_finite() {
        return Err(at(line, format!("number `{s}` is not finite")));
    }
    Ok(v)
}

/// A value with its unit, resolved once Γ is known.
#[derive(Debug, Clone, Copy)]
struct Raw {
    value: f64,
    factor: f64,
    relative_to_gamma: bool,
    line: usize,
}

fn parse_quantity(text: &str, kind: Kind, line: usize) -> Result<Raw, ConfigError> {
    let (num, unit) = split_value(text);
    if num.is_empty() {
        return Err(at(line, format!("missing value in `{text}`")));
    }
    let value = parse_number(num, line)?;
    let two_pi = 2.0 * PI;
    let factor = match (kind, unit) {
        (Kind::Rate, "Gamma") => return Ok(Raw { value, factor: 1.0, relative_to_gamma: true, line }),
        (Kind::Rate, "rad/s") => 1.0,
        (Kind::Rate, "Hz") => two_pi,
        (Kind::Rate, "kHz") => two_pi * 1e3,
        (Kind::Rate, "MHz") => two_pi * 1e6,
        (Kind::Rate, "GHz") => two_pi * 1e9,
        (Kind::Rate, "mHz") => two_pi * 1e-3,
        (Kind::Rate, "uHz" | "µHz") => two_pi * 1e-6,
        (Kind::Rate, "nHz") => two_pi * 1e-9,
        (Kind::Power, "W") => 1.0,
        (Kind::Power, "mW") => 1e-3,
        (Kind::Power, "uW" | "µW") => 1e-6,
        (Kind::Power, "nW") => 1e-9,
        (Kind::Length, "m") => 1.0,
        (Kind::Length, "mm") => 1e-3,
        (Kind::Length, "um" | "µm") => 1e-6,
        (Kind::Length, "nm") => 1e-9,
        (_, "") => return Err(at(line, format!("missing unit in `{text}`"))),
        (_, other) => return Err(at(line, format!("unknown unit `{other}`"))),
    };
    Ok(Raw { value, factor, relative_to_gamma: false, line })
}

#[derive(Debug, Default)]
struct AxisDraft {
    name: Option<(String, usize)>,
    start: Option<(String, usize)>,
    stop: Option<(String, usize)>,
    points: Option<(usize, usize)>,
    scale: Option<AxisScale>,
}

/// Parses `text` on top of the default operating point.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    parse_config_onto(text, SweepSpec::default())
}

/// Parses `text`, overriding `base`. An `[axes]` section replaces the base
/// axes and must define at least one axis.
pub fn parse_config_onto(text: &str, base: SweepSpec) -> Result<SweepSpec, ConfigError> {
    let mut spec = base;
    let mut section: Option<String> = None;
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut raw_params: Vec<(String, Raw)> = Vec::new();
    let mut raw_sensing: Vec<(String, Raw)> = Vec::new();
    let mut axes_header: Option<usize> = None;
    let mut drafts: BTreeMap<usize, AxisDraft> = BTreeMap::new();

    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            let name = content
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| at(line, format!("malformed section header `{content}`")))?
                .trim();
            match name {
                "params" | "sensing" | "output" => {}
                "axes" => axes_header = Some(line),
                other => return Err(at(line, format!("unknown section `[{other}]`"))),
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) =
            content.split_once('=').ok_or_else(|| at(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.clone().ok_or_else(|| at(line, format!("`{key}` outside of any section")))?;
        if let Some(prev) = seen.insert((sec.clone(), key.to_string()), line) {
            return Err(at(line, format!("duplicate key `{key}` (first set on line {prev})")));
        }
        match sec.as_str() {
            "params" => {
                let kind = param_kind(key).ok_or_else(|| at(line, format!("unknown key `{key}` in [params]")))?;
                if key == "Gamma" && value.ends_with("Gamma") {
                    return Err(at(line, "`Gamma` cannot be given relative to itself"));
                }
                raw_params.push((key.to_string(), parse_quantity(value, kind, line)?));
            }
            "sensing" => match key {
                "U_small" | "U_large" => raw_sensing.push((key.to_string(), parse_quantity(value, Kind::Rate, line)?)),
                "observable" => {
                    spec.sensing.observable = match value {
                        "cavity" => Observable::Cavity,
                        "magnon" => Observable::Magnon,
                        other => return Err(at(line, format!("unknown observable `{other}` (cavity or magnon)"))),
                    }
                }
                _ => return Err(at(line, format!("unknown key `{key}` in [sensing]"))),
            },
            "axes" => {
                let (axis, field) = key
                    .strip_prefix("axis")
                    .and_then(|k| k.split_once('.'))
                    .ok_or_else(|| at(line, format!("unknown key `{key}` in [axes]")))?;
                let n: usize = axis.parse().map_err(|_| at(line, format!("unknown key `{key}` in [axes]")))?;
                if n != 1 && n != 2 {
                    return Err(at(line, format!("only axis1 and axis2 are supported, got `{key}`")));
                }
                let d = drafts.entry(n).or_default();
                match field {
                    "name" => {
                        if param_kind(value).is_none() {
                            return Err(at(line, format!("unknown sweep parameter `{value}`")));
                        }
                        d.name = Some((value.to_string(), line));
                    }
                    "start" => d.start = Some((value.to_string(), line)),
                    "stop" => d.stop = Some((value.to_string(), line)),
                    "points" => {
                        let p: usize =
                            value.parse().map_err(|_| at(line, format!("malformed point count `{value}`")))?;
                        if p < 2 {
                            return Err(at(line, format!("point count must be >= 2, got {p}")));
                        }
                        d.points = Some((p, line));
                    }
                    "scale" => {
                        d.scale = Some(match value {
                            "linear" => AxisScale::Linear,
                            "log" => AxisScale::Log,
                            other => return Err(at(line, format!("unknown scale `{other}` (linear or log)"))),
                        })
                    }
                    _ => return Err(at(line, format!("unknown key `{key}` in [axes]"))),
                }
            }
            "output" => match key {
                "observables" => {
                    let mut qs = Vec::new();
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        qs.push(Quantity::parse(item).ok_or_else(|| at(line, format!("unknown observable `{item}`")))?);
                    }
                    if qs.is_empty() {
                        return Err(at(line, "empty observable list"));
                    }
                    spec.output.quantities = qs;
                }
                "format" => spec.output.format = value.parse().map_err(|e: String| at(line, e))?,
                "path" => spec.output.path = Some(value.to_string()),
                "seed" => spec.output.seed = value.parse().map_err(|_| at(line, format!("malformed seed `{value}`")))?,
                _ => return Err(at(line, format!("unknown key `{key}` in [output]"))),
            },
            _ => unreachable!(),
        }
    }

    // Γ first: every other rate may be relative to it
    if let Some((_, raw)) = raw_params.iter().find(|(k, _)| k == "Gamma") {
        let new = raw.value * raw.factor;
        let ratio = new / spec.params.gamma_wg;
        // rates not given explicitly keep their value in units of Γ
        for k in RELATIVE_RATES {
            if !raw_params.iter().any(|(n, _)| n == k) {
                let v = spec.params.get(k).unwrap();
                spec.params.set(k, v * ratio).map_err(|e| at(raw.line, e.to_string()))?;
            }
        }
        spec.params.gamma_wg = new;
    }
    let gw = spec.params.gamma_wg;
    if !(gw > 0.0) {
        return Err(ConfigError::Invalid("`Gamma` must be > 0".into()));
    }
    let resolve = |raw: &Raw| if raw.relative_to_gamma { raw.value * gw } else { raw.value * raw.factor };
    for (k, raw) in raw_params.iter().filter(|(k, _)| k != "Gamma") {
        spec.params.set(k, resolve(raw)).map_err(|e| at(raw.line, e.to_string()))?;
    }
    for (k, raw) in &raw_sensing {
        let v = resolve(raw);
        if k == "U_small" {
            spec.sensing.u_small = v;
        } else {
            spec.sensing.u_large = v;
        }
    }

    if let Some(header) = axes_header {
        if drafts.is_empty() {
            return Err(at(header, "no sweep axis"));
        }
        if drafts.contains_key(&2) && !drafts.contains_key(&1) {
            return Err(at(header, "axis2 given without axis1"));
        }
        let mut axes = Vec::new();
        for (n, d) in drafts {
            let missing = |what: &str| at(header, format!("axis{n}.{what} is required"));
            let (name, _) = d.name.ok_or_else(|| missing("name"))?;
            let kind = param_kind(&name).unwrap();
            let (start_s, sl) = d.start.ok_or_else(|| missing("start"))?;
            let (stop_s, tl) = d.stop.ok_or_else(|| missing("stop"))?;
            let (points, _) = d.points.ok_or_else(|| missing("points"))?;
            let start = resolve(&parse_quantity(&start_s, kind, sl)?);
            let stop = resolve(&parse_quantity(&stop_s, kind, tl)?);
            let scale = d.scale.unwrap_or(AxisScale::Linear);
            if scale == AxisScale::Log && !(start > 0.0 && stop > 0.0) {
                return Err(at(sl, format!("log axis{n} needs positive bounds")));
            }
            axes.push(Axis { name, start, stop, points, scale });
        }
        spec.axes = axes;
    }

    spec.params.validate()?;
    let s = &spec.sensing;
    if !(s.u_small > 0.0 && s.u_large > 0.0 && s.u_small <= s.u_large) {
        return Err(ConfigError::Invalid("sensing pair needs 0 < U_small <= U_large".into()));
    }
    Ok(spec)
}

fn unit_of(kind: Kind) -> &'static str {
    match kind {
        Kind::Rate => "rad/s",
        Kind::Power => "W",
        Kind::Length => "m",
    }
}

impl SweepSpec {
    /// Resolved configuration in rad/s, W and m; parses back to `self`.
    pub fn to_config_text(&self) -> String {
        let mut out = String::from("[params]\n");
        for (k, kind) in PARAM_KEYS {
            out += &format!("{k} = {} {}\n", format_float(self.params.get(k).unwrap()), unit_of(kind));
        }
        out += "\n[sensing]\n";
        out += &format!("U_small = {} rad/s\n", format_float(self.sensing.u_small));
        out += &format!("U_large = {} rad/s\n", format_float(self.sensing.u_large));
        out += &format!("observable = {}\n", self.sensing.observable.label());
        if !self.axes.is_empty() {
            out += "\n[axes]\n";
            for (i, a) in self.axes.iter().enumerate() {
                let unit = unit_of(param_kind(&a.name).unwrap_or(Kind::Rate));
                let n = i + 1;
                out += &format!("axis{n}.name = {}\n", a.name);
                out += &format!("axis{n}.start = {} {unit}\n", format_float(a.start));
                out += &format!("axis{n}.stop = {} {unit}\n", format_float(a.stop));
                out += &format!("axis{n}.points = {}\n", a.points);
                let scale = if a.scale == AxisScale::Log { "log" } else { "linear" };
                out += &format!("axis{n}.scale = {scale}\n");
            }
        }
        out += "\n[output]\n";
        let qs: Vec<&str> = self.output.quantities.iter().map(|q| q.label()).collect();
        out += &format!("observables = {}\n", qs.join(", "));
        out += &format!("format = {}\n", self.output.format.label());
        if let Some(p) = &self.output.path {
            out += &format!("path = {p}\n");
        }
        out += &format!("seed = {}\n", self.output.seed);
        out
    }

    /// Flat key/value listing for table metadata.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut m: Vec<(String, String)> = PARAM_KEYS
            .iter()
            .map(|(k, kind)| (format!("{k} ({})", unit_of(*kind)), format_float(self.params.get(k).unwrap())))
            .collect();
        m.push(("U_small (rad/s)".into(), format_float(self.sensing.u_small)));
        m.push(("U_large (rad/s)".into(), format_float(self.sensing.u_large)));
        m.push(("observable".into(), self.sensing.observable.label().into()));
        m.push(("seed".into(), self.output.seed.to_string()));
        m.push(("config".into(), self.to_config_text().replace('\n', "; ")));
        m
    }

    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hz_quantities_are_angular() {
        let spec = parse_config("[params]\nU_a = 1 nHz\n").unwrap();
        assert_eq!(spec.params.u_a, 2.0 * PI * 1e-9);
        let spec = parse_config("[params]\nGamma = 2 MHz\nDelta = 0.5 Gamma\npower = 8mW\n").unwrap();
        assert_eq!(spec.params.delta, 0.5 * 2.0 * PI * 2e6);
        assert_eq!(spec.params.power, 8e-3);
        assert_eq!(spec.params.gamma, SQRT_2 * 2.0 * PI * 2e6);
        assert_eq!(spec.params.u_a, 2.0 * PI * 1e-9);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[params]\nU_a = 1 parsec\n", 2, "unknown unit"),
            ("[params]\n\nDelta = 1..2 Gamma\n", 3, "malformed number"),
            ("[params]\nfoo = 1 Hz\n", 2, "unknown key"),
            ("[params]\nDelta = 1\n", 2, "missing unit"),
            ("[axes]\n", 1, "no sweep axis"),
            ("[params]\nDelta = 1 Gamma\nDelta = 2 Gamma\n", 3, "duplicate"),
            ("[axes]\naxis1.name = Delta\naxis1.start = 0 Gamma\naxis1.stop = 1 Gamma\naxis1.points = 1\n", 5, ">= 2"),
        ];
        for (text, line, needle) in cases {
            match parse_config(text) {
                Err(ConfigError::Line { line: l, message }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = "[params]\nGamma = 1.3 MHz\ngamma = 1.5 Gamma\nU_b1 = 0.1 uHz\nU_a = 0 Hz\n\n[sensing]\nobservable = magnon\n\n[axes]\naxis1.name = Delta\naxis1.start = -2 Gamma\naxis1.stop = 2 Gamma\naxis1.points = 11\naxis2.name = power\naxis2.start = 1 uW\naxis2.stop = 1 mW\naxis2.points = 4\naxis2.scale = log\n\n[output]\nobservables = x, eta\nformat = json\nseed = 9\n";
        let spec = parse_config(text).unwrap();
        let again = parse_config(&spec.to_config_text()).unwrap();
        assert_eq!(again, spec);
        assert_eq!(spec.axes[1].values()[3], 1e-3);
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::linear("Delta", -3.0, 3.0, 601);
        let v = a.values();
        assert_eq!(v[0], -3.0);
        assert_eq!(v[300], 0.0);
        assert_eq!(v[600], 3.0);
    }
}
