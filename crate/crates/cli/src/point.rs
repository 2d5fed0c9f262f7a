//! Single-point evaluation shared by the point commands and the generic
//! sweep.

use antipt_core::dynamics::{check_root, trajectory, default_step, perturbed_start, IntegrationOutcome};
use antipt_core::params::Mode;
use antipt_core::sensing::{Observable, SensingPoint};
use antipt_core::spectrum::{build_matrix, eigenvalues_closed_form, eigenvalues_numeric, ComplexSpectrum};
use antipt_core::stability::{classified_steady_states, steady_state_stability, StabilityClass};
use antipt_core::steady::{BranchSet, Regime, NEAR_SINGULAR_TOL};
use antipt_core::{ModelError, SystemParams};

use crate::config::{ParamSet, SensingSpec};
use crate::eval::{error_tag, pick_stable};
use crate::table::{format_float, Cell, Column, Table};

/// Integration horizon and residual tolerance of the ODE oracle (Γ units).
pub const ORACLE_T_MAX: f64 = 1e4;
pub const ORACLE_TOL: f64 = 1e-10;
/// Relative distance within which a perturbed trajectory counts as returned.
pub const ORACLE_RETURN_TOL: f64 = 1e-6;

/// Responses carried between neighbouring sweep points.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Previous {
    pub response: Option<f64>,
    pub small: Option<f64>,
    pub large: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub spectrum: ComplexSpectrum,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub eta: Option<f64>,
    pub stability: Option<StabilityClass>,
    pub max_real_part: Option<f64>,
    pub regime: Option<Regime>,
    pub status: &'static str,
    pub next: Previous,
}

/// The single Kerr mode of `p`, or the cavity when there is none.
pub fn solved_mode(p: &SystemParams) -> antipt_core::Result<Mode> {
    Ok(p.kerr_mode()?.unwrap_or(Mode::Cavity))
}

/// Steady states of `p` with stability. Without any Kerr term the anti-PT
/// configuration has no finite response on the E_p = 0 ellipse.
pub fn branches(p: &SystemParams) -> antipt_core::Result<BranchSet> {
    let linear_apt = p.kerr_mode()?.is_none() && p.g1 == 0.0 && p.g2 == 0.0 && p.delta_a == 0.0;
    if linear_apt {
        let gamma = p.gamma_b1 + p.gamma_wg;
        let ep = p.delta1 * p.delta1 + gamma * gamma - 2.0 * p.gamma_wg * p.gamma_wg;
        if ep.abs() < NEAR_SINGULAR_TOL * p.gamma_wg * p.gamma_wg {
            return Err(ModelError::NearSingular { ep });
        }
    }
    classified_steady_states(p, solved_mode(p)?)
}

fn sensing_point(params: &ParamSet, sensing: &SensingSpec) -> antipt_core::Result<SensingPoint> {
    let gw = params.gamma_wg;
    let omega = params.omega_at(params.power)? / gw;
    let mut sp = SensingPoint::new(params.apt(), params.delta_a / gw, omega * omega, sensing.observable);
    sp.kappa_minus = params.kappa_minus / gw;
    Ok(sp)
}

/// Spectrum, tracked stable response, verdict and η at one parameter set.
pub fn evaluate(params: &ParamSet, sensing: &SensingSpec, prev: Previous) -> PointResult {
    let mut out = PointResult {
        spectrum: eigenvalues_closed_form(&params.apt()),
        x: None,
        y: None,
        eta: None,
        stability: None,
        max_real_part: None,
        regime: None,
        status: "OK",
        next: prev,
    };
    let p = match params.normalized() {
        Ok(p) => p,
        Err(e) => {
            out.status = error_tag(&e);
            return out;
        }
    };

    let mut errors: Vec<&'static str> = Vec::new();
    match branches(&p) {
        Ok(set) => {
            let (idx, class) = pick_stable(&set, prev.response);
            out.stability = Some(class);
            out.regime = Some(set.regime);
            let reported = idx.or(if set.roots.is_empty() { None } else { Some(0) });
            if let Some(state) = reported.and_then(|i| set.roots[i].state) {
                out.max_real_part = steady_state_stability(&p, &state).ok().map(|v| v.max_real_part);
            }
            if let Some(i) = idx {
                let state = set.roots[i].state.expect("classified roots carry states");
                out.x = Some(state.x);
                out.y = Some(state.y);
                out.next.response = Some(set.roots[i].response);
            }
        }
        Err(e) => errors.push(error_tag(&e)),
    }

    match sensing_point(params, sensing) {
        Ok(sp) => {
            let small = sp.response(sensing.u_small / params.gamma_wg, prev.small);
            let large = sp.response(sensing.u_large / params.gamma_wg, prev.large);
            match (small, large) {
                (Ok(s), Ok(l)) => {
                    let stable = |c: Option<StabilityClass>| c != Some(StabilityClass::Unstable);
                    if stable(s.stability) && stable(l.stability) {
                        out.eta = Some(s.value / l.value);
                    }
                    out.next.small = Some(s.value);
                    out.next.large = Some(l.value);
                }
                (Err(e), _) | (_, Err(e)) => {
                    if !matches!(e, ModelError::NoStableBranch) {
                        errors.push(error_tag(&e));
                    }
                }
            }
        }
        Err(e) => errors.push(error_tag(&e)),
    }

    out.status = if let Some(tag) = errors.first() {
        tag
    } else {
        match (out.stability, out.regime) {
            (Some(StabilityClass::Unstable), _) => "UNSTABLE",
            (Some(StabilityClass::Marginal), _) => "MARGINAL",
            (_, Some(Regime::Bistable)) => "BISTABLE",
            _ => "OK",
        }
    };
    out
}

/// Closed-form and numeric eigenvalues at one point.
pub fn spectrum_table(params: &ParamSet) -> antipt_core::Result<Table> {
    let p = params.normalized()?;
    let closed = eigenvalues_closed_form(&params.apt());
    let numeric = eigenvalues_numeric(&build_matrix(&p));
    let mut t = Table::new(vec![
        Column::new("k", ""),
        Column::new("Re lambda", "Gamma"),
        Column::new("Im lambda", "Gamma"),
        Column::new("Re lambda numeric", "Gamma"),
        Column::new("Im lambda numeric", "Gamma"),
        Column::new("status", ""),
    ]);
    let matched = antipt_core::spectrum::follow_branches(&closed.lambdas, numeric.lambdas);
    for k in 0..3 {
        t.push(vec![
            ((k + 1) as f64).into(),
            closed.lambdas[k].re.into(),
            closed.lambdas[k].im.into(),
            matched[k].re.into(),
            matched[k].im.into(),
            "OK".into(),
        ]);
    }
    let apt = params.apt();
    t.meta("phase", closed.phase.label());
    t.meta("Ep (Gamma^2)", format_float(apt.ep_condition()));
    t.meta("suppression_gap (Gamma)", format_float(closed.suppression_gap));
    Ok(t)
}

fn branch_table(params: &ParamSet, with_verdict: bool) -> antipt_core::Result<Table> {
    let p = params.normalized()?;
    let set = branches(&p)?;
    let mode = solved_mode(&p)?;
    let mut cols = vec![
        Column::new("root", ""),
        Column::new("response", "excitations"),
        Column::new("x", "excitations"),
        Column::new("y", "excitations"),
        Column::new("positive_slope", ""),
        Column::new("stability", ""),
    ];
    if with_verdict {
        cols.extend([
            Column::new("max_real_part", "Gamma"),
            Column::new("companion_max_real_part", "Gamma"),
            Column::new("routh_stable", ""),
            Column::new("method_agreement", ""),
        ]);
    }
    cols.push(Column::new("status", ""));
    let mut t = Table::new(cols);
    for (i, root) in set.roots.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            ((i + 1) as f64).into(),
            root.response.into(),
            root.state.map(|s| s.x).into(),
            root.state.map(|s| s.y).into(),
            root.positive_slope.into(),
            root.stability.map(|c| c.label()).into(),
        ];
        let mut status = match root.stability {
            Some(StabilityClass::Stable) if set.regime == Regime::Bistable => "BISTABLE",
            Some(StabilityClass::Stable) => "OK",
            Some(StabilityClass::Marginal) => "MARGINAL",
            _ => "UNSTABLE",
        };
        if with_verdict {
            match root.state.map(|s| steady_state_stability(&p, &s)) {
                Some(Ok(v)) => row.extend([
                    v.max_real_part.into(),
                    v.companion_max_real_part.into(),
                    v.routh_stable.into(),
                    v.method_agreement.into(),
                ]),
                Some(Err(e)) => {
                    status = error_tag(&e);
                    row.extend((0..4).map(|_| Cell::Empty));
                }
                None => row.extend((0..4).map(|_| Cell::Empty)),
            }
        }
        row.push(status.into());
        t.push(row);
    }
    t.meta("kerr_mode", mode.label());
    t.meta("regime", set.regime.label());
    t.meta("intensity (Gamma^2)", format_float(p.intensity()));
    Ok(t)
}

/// Every steady state at one point.
pub fn steady_table(params: &ParamSet) -> antipt_core::Result<Table> {
    branch_table(params, false)
}

/// Every steady state with its Routh–Hurwitz and eigenvalue verdicts.
pub fn stability_table(params: &ParamSet) -> antipt_core::Result<Table> {
    branch_table(params, true)
}

/// ODE oracle: each steady state is perturbed (direction from `seed`) and
/// integrated until it settles or diverges.
pub fn dynamics_table(params: &ParamSet, seed: u64) -> antipt_core::Result<Table> {
    let p = params.normalized()?;
    let set = branches(&p)?;
    let mut t = Table::new(vec![
        Column::new("root", ""),
        Column::new("response", "excitations"),
        Column::new("stability", ""),
        Column::new("outcome", ""),
        Column::new("time", "1/Gamma"),
        Column::new("distance", "relative"),
        Column::new("returned", ""),
        Column::new("status", ""),
    ]);
    for (i, root) in set.roots.iter().enumerate() {
        let Some(state) = root.state else { continue };
        let check = check_root(&p, &state, seed.wrapping_add(i as u64), ORACLE_T_MAX, ORACLE_TOL);
        let returned = check.returned(ORACLE_RETURN_TOL);
        let time = match check.outcome {
            IntegrationOutcome::Converged { t, .. } | IntegrationOutcome::Diverged { t } => Some(t),
            IntegrationOutcome::NotConverged { .. } => None,
        };
        let status = match (root.stability, &check.outcome) {
            (_, IntegrationOutcome::NotConverged { .. }) => "NOT_CONVERGED",
            (Some(StabilityClass::Stable), _) if !returned => "NOT_CONVERGED",
            (Some(StabilityClass::Stable), _) => "OK",
            (Some(StabilityClass::Marginal), _) => "MARGINAL",
            _ => "UNSTABLE",
        };
        t.push(vec![
            ((i + 1) as f64).into(),
            root.response.into(),
            root.stability.map(|c| c.label()).into(),
            check.outcome.label().into(),
            time.into(),
            check.distance.into(),
            returned.into(),
            status.into(),
        ]);
    }
    t.meta("regime", set.regime.label());
    t.meta("perturbation", format_float(antipt_core::dynamics::PERTURBATION));
    t.meta("t_max (1/Gamma)", format_float(ORACLE_T_MAX));
    t.meta("tolerance", format_float(ORACLE_TOL));
    Ok(t)
}

/// Sampled trajectory from a perturbation of the first stable root (or of
/// the lowest root when none is stable).
pub fn trajectory_table(params: &ParamSet, seed: u64, t_max: f64, samples: usize) -> antipt_core::Result<Table> {
    let p = params.normalized()?;
    let set = branches(&p)?;
    let (idx, _) = pick_stable(&set, None);
    let root = idx
        .or(if set.roots.is_empty() { None } else { Some(0) })
        .and_then(|i| set.roots[i].state)
        .ok_or(ModelError::NoStableBranch)?;
    let v0 = perturbed_start(&root.amplitudes(), antipt_core::dynamics::PERTURBATION, seed);
    let h = default_step(&p, &v0);
    let steps = (t_max / h).ceil().max(1.0) as usize;
    let stride = (steps / samples.max(1)).max(1);
    let mut t = Table::new(vec![
        Column::new("t", "1/Gamma"),
        Column::new("Re beta1", "sqrt(excitations)"),
        Column::new("Im beta1", "sqrt(excitations)"),
        Column::new("Re alpha", "sqrt(excitations)"),
        Column::new("Im alpha", "sqrt(excitations)"),
        Column::new("Re beta2", "sqrt(excitations)"),
        Column::new("Im beta2", "sqrt(excitations)"),
        Column::new("status", ""),
    ]);
    for s in trajectory(&p, v0, t_max, h, stride) {
        let mut row: Vec<Cell> = vec![s.t.into()];
        for a in s.amplitudes {
            row.push(a.re.into());
            row.push(a.im.into());
        }
        row.push("OK".into());
        t.push(row);
    }
    t.meta("step (1/Gamma)", format_float(h));
    Ok(t)
}

/// Label of the scenario's observable response column.
pub fn observable_symbol(o: Observable) -> &'static str {
    match o {
        Observable::Cavity => "x",
        Observable::Magnon => "y",
    }
}
