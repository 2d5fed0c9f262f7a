//! Figure tables: spectra (fig2), the stability map (fig3a), response
//! curves (fig3b, fig4, fig5a) and response-ratio sweeps (fig3c, fig5b).

use std::f64::consts::PI;

use antipt_core::params::{AptConfig, Mode};
use antipt_core::sensing::{Observable, SensingPoint, TrackedResponse};
use antipt_core::spectrum::{
    eigenvalues_closed_form, follow_branches, linewidth_zero_crossings, locate_exceptional_point,
    suppression_detunings,
};
use antipt_core::stability::{classified_steady_states, StabilityClass};
use antipt_core::steady::Regime;
use rayon::prelude::*;

use crate::config::{Axis, SweepSpec};
use crate::eval::{add_legend, error_tag, pick_stable, track_outward};
use crate::table::{format_float, Cell, Column, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4,
    Fig5a,
    Fig5b,
}

/// Upper end of the detuning window searched for the best monostable η.
pub const ETA_WINDOW: f64 = 0.08;

impl Figure {
    pub const ALL: [Figure; 7] =
        [Figure::Fig2, Figure::Fig3a, Figure::Fig3b, Figure::Fig3c, Figure::Fig4, Figure::Fig5a, Figure::Fig5b];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
        }
    }

    /// Default parameters and axes of the figure; a config file overrides
    /// them key by key.
    pub fn base_spec(self) -> SweepSpec {
        let mut s = SweepSpec::default();
        let gw = s.params.gamma_wg;
        let micro = 2.0 * PI * 1e-6;
        match self {
            Figure::Fig2 => s.axes = vec![Axis::linear("Delta", -3.0 * gw, 3.0 * gw, 601)],
            Figure::Fig3a => {
                s.axes = vec![Axis::linear("Delta", -2.0 * gw, 2.0 * gw, 81), Axis::linear("gamma", gw, 2.0 * gw, 51)]
            }
            Figure::Fig3b | Figure::Fig5a | Figure::Fig4 => {
                s.axes = vec![Axis::linear("Delta", -0.5 * gw, 0.5 * gw, 1001)];
            }
            Figure::Fig3c | Figure::Fig5b => {
                s.axes = vec![Axis::linear("Delta_a", -0.1 * gw, 0.15 * gw, 251)];
                s.params.power = 8e-3;
                s.sensing.u_small = 0.1 * micro;
                s.sensing.u_large = micro;
            }
        }
        if self == Figure::Fig4 {
            s.params.g = 0.03 * gw;
            s.sensing.u_small = 0.1 * micro;
            s.sensing.u_large = micro;
        }
        if matches!(self, Figure::Fig5a | Figure::Fig5b) {
            s.sensing.observable = Observable::Magnon;
        }
        s
    }

    pub fn run(self, spec: &SweepSpec) -> antipt_core::Result<Table> {
        let mut t = match self {
            Figure::Fig2 => run_fig2(spec),
            Figure::Fig3a => run_fig3a(spec)?,
            Figure::Fig3b | Figure::Fig4 | Figure::Fig5a => run_response_curves(spec)?,
            Figure::Fig3c | Figure::Fig5b => run_eta_sweep(spec)?,
        };
        t.meta("figure", self.name());
        for (k, v) in spec.metadata() {
            t.meta(&k, v);
        }
        t.meta("tool", concat!("antipt ", env!("CARGO_PKG_VERSION")));
        add_legend(&mut t);
        Ok(t)
    }
}

fn axis_or<'a>(spec: &'a SweepSpec, name: &str, fallback: &'a Axis) -> &'a Axis {
    spec.axis(name).unwrap_or(fallback)
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(" ")
}

fn nearest_index(grid: &[f64], v: f64) -> usize {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - v).abs().total_cmp(&(grid[b] - v).abs())).unwrap_or(0)
}

/// Eigenvalues over Δ with g = 0, branch-followed, with EP and
/// zero-linewidth abscissas marked.
pub fn run_fig2(spec: &SweepSpec) -> Table {
    let gw = spec.params.gamma_wg;
    let fallback = Axis::linear("Delta", -3.0 * gw, 3.0 * gw, 601);
    let deltas: Vec<f64> = axis_or(spec, "Delta", &fallback).values().iter().map(|d| d / gw).collect();
    let gamma = spec.params.gamma / gw;
    let apt = AptConfig::new(0.0, gamma, 1.0);
    let (lo, hi) = (deltas.iter().cloned().fold(f64::INFINITY, f64::min), deltas.iter().cloned().fold(f64::NEG_INFINITY, f64::max));

    let mut eps: Vec<f64> = Vec::new();
    for (a, b) in [(lo, 0.0), (0.0, hi)] {
        if a < b {
            if let Some(d) = locate_exceptional_point(&apt, a, b) {
                eps.push(d);
            }
        }
    }
    let zeros = linewidth_zero_crossings(&apt, lo.abs().max(hi.abs()), 2 * deltas.len() + 1)
        .into_iter()
        .filter(|z| *z >= lo && *z <= hi)
        .collect::<Vec<_>>();
    let ep_rows: Vec<usize> = eps.iter().map(|&d| nearest_index(&deltas, d)).collect();
    let zero_rows: Vec<usize> = zeros.iter().map(|&d| nearest_index(&deltas, d)).collect();

    let mut cols = vec![Column::new("Delta", "Gamma")];
    for k in 1..=3 {
        cols.push(Column::new(&format!("Re lambda{k}"), "Gamma"));
        cols.push(Column::new(&format!("Im lambda{k}"), "Gamma"));
    }
    cols.extend([Column::new("phase", ""), Column::new("ep", ""), Column::new("zero_linewidth", ""), Column::new("status", "")]);
    let mut t = Table::new(cols);
    let mut prev = None;
    for (i, &d) in deltas.iter().enumerate() {
        let s = eigenvalues_closed_form(&apt.with_delta(d));
        let lambdas = match prev {
            Some(p) => follow_branches(&p, s.lambdas),
            None => s.lambdas,
        };
        prev = Some(lambdas);
        let mut row: Vec<Cell> = vec![d.into()];
        for l in lambdas {
            row.push(l.re.into());
            row.push(l.im.into());
        }
        row.push(s.phase.label().into());
        row.push(ep_rows.contains(&i).into());
        row.push(zero_rows.contains(&i).into());
        row.push("OK".into());
        t.push(row);
    }
    t.meta("gamma (Gamma)", format_float(gamma));
    t.meta("ep_detunings (Gamma)", list(&eps));
    t.meta("zero_linewidth_detunings (Gamma)", list(&zeros));
    t.meta("suppression_detunings (Gamma)", list(&suppression_detunings(gamma - 1.0, 1.0)));
    t
}

struct MapPoint {
    log10_x: Option<f64>,
    class: StabilityClass,
    max_re: Option<f64>,
    status: String,
}

/// Cavity response log₁₀x and stability over (Δ, γ).
pub fn run_fig3a(spec: &SweepSpec) -> antipt_core::Result<Table> {
    let gw = spec.params.gamma_wg;
    let fd = Axis::linear("Delta", -2.0 * gw, 2.0 * gw, 81);
    let fg = Axis::linear("gamma", gw, 2.0 * gw, 51);
    let deltas: Vec<f64> = axis_or(spec, "Delta", &fd).values().iter().map(|v| v / gw).collect();
    let gammas: Vec<f64> = axis_or(spec, "gamma", &fg).values().iter().map(|v| v / gw).collect();
    let base = spec.params.normalized()?;

    let grid: Vec<Vec<MapPoint>> = gammas
        .par_iter()
        .map(|&gamma| {
            track_outward(&deltas, 0.0, |d, prev| {
                let mut p = AptConfig::new(d, gamma, 1.0).with_g(base.g1).expand(base.kappa_minus).with_delta_a(base.delta_a);
                p.u_a = base.u_a;
                p.omega = base.omega;
                match classified_steady_states(&p, Mode::Cavity) {
                    Ok(set) => {
                        let (idx, class) = pick_stable(&set, prev);
                        let state = idx.map(|i| set.roots[i].state.unwrap());
                        let max_re = idx
                            .or(if set.roots.is_empty() { None } else { Some(0) })
                            .and_then(|i| set.roots[i].state)
                            .and_then(|s| antipt_core::stability::steady_state_stability(&p, &s).ok())
                            .map(|v| v.max_real_part);
                        let status = match class {
                            StabilityClass::Stable if set.regime == Regime::Bistable => "BISTABLE",
                            StabilityClass::Stable => "OK",
                            StabilityClass::Marginal => "MARGINAL",
                            StabilityClass::Unstable => "UNSTABLE",
                        };
                        let resp = idx.map(|i| set.roots[i].response);
                        (MapPoint { log10_x: state.map(|s| s.x.log10()), class, max_re, status: status.into() }, resp)
                    }
                    Err(e) => (
                        MapPoint { log10_x: None, class: StabilityClass::Unstable, max_re: None, status: error_tag(&e).into() },
                        None,
                    ),
                }
            })
        })
        .collect();

    let stable = |j: usize, i: usize| grid[j][i].class == StabilityClass::Stable;
    let ep = |j: usize, i: usize| deltas[i] * deltas[i] + gammas[j] * gammas[j] - 2.0;
    let mut t = Table::new(vec![
        Column::new("Delta", "Gamma"),
        Column::new("gamma", "Gamma"),
        Column::new("Ep", "Gamma^2"),
        Column::new("log10_x", ""),
        Column::new("stability", ""),
        Column::new("max_real_part", "Gamma"),
        Column::new("on_boundary", ""),
        Column::new("grid_tolerance", "Gamma^2"),
        Column::new("status", ""),
    ]);
    for (j, &gamma) in gammas.iter().enumerate() {
        for (i, &d) in deltas.iter().enumerate() {
            let mut neighbours = Vec::new();
            if i > 0 {
                neighbours.push((j, i - 1));
            }
            if i + 1 < deltas.len() {
                neighbours.push((j, i + 1));
            }
            if j > 0 {
                neighbours.push((j - 1, i));
            }
            if j + 1 < gammas.len() {
                neighbours.push((j + 1, i));
            }
            let on_boundary = grid[j][i].class == StabilityClass::Marginal
                || neighbours.iter().any(|&(b, a)| stable(b, a) != stable(j, i));
            // spacing to the neighbours plus the rounding error of Ep itself
            let rounding = 8.0 * f64::EPSILON * (d * d + gamma * gamma + 2.0);
            let tol = neighbours.iter().map(|&(b, a)| (ep(b, a) - ep(j, i)).abs()).fold(0.0, f64::max) + rounding;
            let pt = &grid[j][i];
            t.push(vec![
                d.into(),
                gamma.into(),
                ep(j, i).into(),
                pt.log10_x.into(),
                pt.class.label().into(),
                pt.max_re.into(),
                on_boundary.into(),
                tol.into(),
                pt.status.clone().into(),
            ]);
        }
    }
    Ok(t)
}

/// Sensing point of `spec` at detunings (Δ, Δₐ) in units of Γ.
pub fn sensing_point(spec: &SweepSpec, delta: f64, delta_a: f64, power: f64) -> antipt_core::Result<SensingPoint> {
    let gw = spec.params.gamma_wg;
    let omega = spec.params.omega_at(power)? / gw;
    let apt = AptConfig::new(delta, spec.params.gamma / gw, 1.0).with_g(spec.params.g / gw);
    let mut point = SensingPoint::new(apt, delta_a, omega * omega, spec.sensing.observable);
    point.kappa_minus = spec.params.kappa_minus / gw;
    Ok(point)
}

type Tracked = Result<TrackedResponse, &'static str>;

fn track_curve(values: &[f64], origin: f64, u: f64, at: impl Fn(f64) -> antipt_core::Result<SensingPoint>) -> Vec<Tracked> {
    track_outward(values, origin, |v, prev| match at(v).and_then(|p| p.response(u, prev)) {
        Ok(r) => (Ok(r), Some(r.value)),
        Err(e) => (Err(error_tag(&e)), None),
    })
}

/// Full width at half maximum around the largest sample, linearly
/// interpolated; NaN when the curve does not fall to half inside the grid.
pub fn fwhm(xs: &[f64], ys: &[f64]) -> f64 {
    let Some(peak) = (0..ys.len()).filter(|&i| ys[i].is_finite()).max_by(|&a, &b| ys[a].total_cmp(&ys[b])) else {
        return f64::NAN;
    };
    let half = 0.5 * ys[peak];
    let cross = |i: usize, j: usize| xs[i] + (half - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i]);
    let left = (0..peak).rev().find(|&i| ys[i] < half).map(|i| cross(i, i + 1));
    let right = (peak + 1..ys.len()).find(|&i| ys[i] < half).map(|i| cross(i - 1, i));
    match (left, right) {
        (Some(l), Some(r)) => r - l,
        _ => f64::NAN,
    }
}

/// Response of a tracked point; unstable points report only the verdict.
fn value_of(r: &Tracked) -> Option<f64> {
    r.as_ref().ok().filter(|r| r.stability != Some(StabilityClass::Unstable)).map(|r| r.value)
}

/// Responses against Δ for both Kerr strengths and both powers.
pub fn run_response_curves(spec: &SweepSpec) -> antipt_core::Result<Table> {
    let gw = spec.params.gamma_wg;
    let fallback = Axis::linear("Delta", -0.5 * gw, 0.5 * gw, 1001);
    let deltas: Vec<f64> = axis_or(spec, "Delta", &fallback).values().iter().map(|v| v / gw).collect();
    let delta_a = spec.params.delta_a / gw;
    let sym = match spec.sensing.observable {
        Observable::Cavity => "x",
        Observable::Magnon => "y",
    };
    let powers = [("low", spec.params.power), ("high", spec.params.power_high)];
    let us = [("small", spec.sensing.u_small / gw), ("large", spec.sensing.u_large / gw)];
    let jobs: Vec<(usize, usize)> = (0..2).flat_map(|p| (0..2).map(move |u| (p, u))).collect();
    let curves: Vec<Vec<Tracked>> = jobs
        .par_iter()
        .map(|&(pi, ui)| track_curve(&deltas, 0.0, us[ui].1, |d| sensing_point(spec, d, delta_a, powers[pi].1)))
        .collect();

    let mut cols = vec![Column::new("Delta", "Gamma")];
    for &(pi, ui) in &jobs {
        cols.push(Column::new(&format!("{sym}_{}_{}", us[ui].0, powers[pi].0), "excitations"));
    }
    cols.extend([Column::new("eta_low", ""), Column::new("eta_high", ""), Column::new("status", "")]);
    let mut t = Table::new(cols);
    for (i, &d) in deltas.iter().enumerate() {
        let mut row: Vec<Cell> = vec![d.into()];
        let vals: Vec<Option<f64>> = curves.iter().map(|c| value_of(&c[i])).collect();
        row.extend(vals.iter().map(|v| Cell::from(*v)));
        for p in 0..2 {
            row.push(match (vals[2 * p], vals[2 * p + 1]) {
                (Some(a), Some(b)) => Cell::Num(a / b),
                _ => Cell::Empty,
            });
        }
        let class = |c: &Vec<Tracked>| c[i].as_ref().ok().and_then(|r| r.stability);
        let status = if let Some(tag) = curves.iter().find_map(|c| c[i].as_ref().err()) {
            *tag
        } else if curves.iter().any(|c| class(c) == Some(StabilityClass::Unstable)) {
            "UNSTABLE"
        } else if curves.iter().any(|c| class(c) == Some(StabilityClass::Marginal)) {
            "MARGINAL"
        } else if curves.iter().any(|c| c[i].as_ref().is_ok_and(|r| r.regime == Regime::Bistable)) {
            "BISTABLE"
        } else {
            "OK"
        };
        row.push(status.into());
        t.push(row);
    }

    let zero = nearest_index(&deltas, 0.0);
    for (p, (label, power)) in powers.iter().enumerate() {
        let a = value_of(&curves[2 * p][zero]);
        let b = value_of(&curves[2 * p + 1][zero]);
        t.meta(&format!("power_{label} (W)"), format_float(*power));
        t.meta(
            &format!("eta_at_zero_{label}"),
            a.zip(b).map_or("NaN".into(), |(a, b)| format_float(a / b)),
        );
    }
    for (k, &(pi, ui)) in jobs.iter().enumerate() {
        let ys: Vec<f64> = curves[k].iter().map(|r| value_of(r).unwrap_or(f64::NAN)).collect();
        t.meta(&format!("fwhm_{sym}_{}_{} (Gamma)", us[ui].0, powers[pi].0), format_float(fwhm(&deltas, &ys)));
    }
    t.meta("Delta_a (Gamma)", format_float(delta_a));
    Ok(t)
}

/// η against the cavity detuning Δₐ, tracked outward from Δₐ = 0.
pub fn run_eta_sweep(spec: &SweepSpec) -> antipt_core::Result<Table> {
    let gw = spec.params.gamma_wg;
    let fallback = Axis::linear("Delta_a", -0.1 * gw, 0.15 * gw, 251);
    let das: Vec<f64> = axis_or(spec, "Delta_a", &fallback).values().iter().map(|v| v / gw).collect();
    let delta = spec.params.delta / gw;
    let power = spec.params.power;
    let us = [spec.sensing.u_small / gw, spec.sensing.u_large / gw];
    let curves: Vec<Vec<Tracked>> =
        us.par_iter().map(|&u| track_curve(&das, 0.0, u, |da| sensing_point(spec, delta, da, power))).collect();

    let mut t = Table::new(vec![
        Column::new("Delta_a", "Gamma"),
        Column::new("eta", ""),
        Column::new("response_small", "excitations"),
        Column::new("response_large", "excitations"),
        Column::new("regime_small", ""),
        Column::new("regime_large", ""),
        Column::new("stability_small", ""),
        Column::new("stability_large", ""),
        Column::new("monostable", ""),
        Column::new("status", ""),
    ]);
    let mut best: Option<(f64, f64)> = None;
    for (i, &da) in das.iter().enumerate() {
        let (s, l) = (&curves[0][i], &curves[1][i]);
        let row = match (s, l) {
            (Ok(s), Ok(l)) => {
                let shown = value_of(&curves[0][i]).zip(value_of(&curves[1][i]));
                let eta = shown.map(|(a, b)| a / b);
                let mono = s.regime == Regime::Monostable && l.regime == Regime::Monostable;
                if let Some(eta) = eta.filter(|_| mono && da > 0.0 && da <= ETA_WINDOW + 1e-12) {
                    if best.is_none_or(|b| eta > b.0) {
                        best = Some((eta, da));
                    }
                }
                let label = |r: &TrackedResponse| r.stability.map_or("", |c| c.label());
                let status = if !mono {
                    "BISTABLE"
                } else if s.stability != Some(StabilityClass::Stable) || l.stability != Some(StabilityClass::Stable) {
                    match (s.stability, l.stability) {
                        (Some(StabilityClass::Marginal), _) | (_, Some(StabilityClass::Marginal)) => "MARGINAL",
                        _ => "UNSTABLE",
                    }
                } else {
                    "OK"
                };
                vec![
                    da.into(),
                    eta.into(),
                    value_of(&curves[0][i]).into(),
                    value_of(&curves[1][i]).into(),
                    s.regime.label().into(),
                    l.regime.label().into(),
                    label(s).into(),
                    label(l).into(),
                    mono.into(),
                    status.into(),
                ]
            }
            _ => {
                let tag = s.as_ref().err().or(l.as_ref().err()).copied().unwrap_or("ERROR");
                let mut row = vec![Cell::from(da)];
                row.extend((0..8).map(|_| Cell::Empty));
                row.push(tag.into());
                row
            }
        };
        t.push(row);
    }
    let zero = nearest_index(&das, 0.0);
    let eta0 = value_of(&curves[0][zero]).zip(value_of(&curves[1][zero])).map(|(a, b)| a / b);
    t.meta("eta_at_zero", eta0.map_or("NaN".into(), format_float));
    t.meta("max_monostable_eta", best.map_or("NaN".into(), |b| format_float(b.0)));
    t.meta("max_monostable_Delta_a (Gamma)", best.map_or("NaN".into(), |b| format_float(b.1)));
    t.meta("eta_window (Gamma)", format!("(0, {}]", format_float(ETA_WINDOW)));
    t.meta("Delta (Gamma)", format_float(delta));
    t.meta("gamma (Gamma)", format_float(spec.params.gamma / gw));
    Ok(t)
}
