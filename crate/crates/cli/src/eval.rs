//! Shared evaluation helpers: status tags, stable-branch selection and
//! outward tracking along a sweep axis.

use antipt_core::stability::StabilityClass;
use antipt_core::steady::BranchSet;
use antipt_core::ModelError;

use crate::table::{Cell, Table};

/// Verdict tags: informational, never an error.
pub const VERDICT_TAGS: [(&str, &str); 4] = [
    ("OK", "evaluated without caveats"),
    ("MARGINAL", "on the stability boundary: max Re of the fluctuation spectrum within 1e-9 Gamma of zero"),
    ("UNSTABLE", "no stable steady state; the verdict is reported instead of a response"),
    ("BISTABLE", "inside a bistable window; the hysteresis-tracked branch is reported"),
];

/// Numerical failure tags; any of these makes the run exit with code 3.
pub const ERROR_TAGS: [(&str, &str); 7] = [
    ("NEAR_SINGULAR", "linear response diverges at this operating point"),
    ("SINGULAR_DRIVE", "response cubic has no x-dependence"),
    ("SINGULAR_AMPLITUDES", "steady-state amplitude system is singular"),
    ("BRANCH_STRADDLE", "finite-difference step crosses a branch boundary"),
    ("FD_MISMATCH", "finite-difference estimate did not converge"),
    ("NOT_CONVERGED", "time integration did not settle"),
    ("ERROR", "invalid parameters for this point"),
];

pub fn error_tag(e: &ModelError) -> &'static str {
    match e {
        ModelError::NearSingular { .. } => "NEAR_SINGULAR",
        ModelError::SingularDrive { .. } => "SINGULAR_DRIVE",
        ModelError::SingularAmplitudeSystem { .. } => "SINGULAR_AMPLITUDES",
        ModelError::BranchStraddle { .. } => "BRANCH_STRADDLE",
        ModelError::FiniteDifferenceMismatch { .. } => "FD_MISMATCH",
        ModelError::NoStableBranch => "UNSTABLE",
        _ => "ERROR",
    }
}

pub fn is_error_tag(tag: &str) -> bool {
    ERROR_TAGS.iter().any(|(t, _)| *t == tag)
}

pub fn is_known_tag(tag: &str) -> bool {
    is_error_tag(tag) || VERDICT_TAGS.iter().any(|(t, _)| *t == tag)
}

/// Records the tag legend in the table metadata.
pub fn add_legend(t: &mut Table) {
    for (tag, text) in VERDICT_TAGS.iter().chain(ERROR_TAGS.iter()) {
        t.meta(&format!("tag {tag}"), text);
    }
}

/// True when the `status` column holds any error tag.
pub fn has_error_tags(t: &Table) -> bool {
    t.column("status").is_some_and(|col| col.iter().any(|c| matches!(c, Cell::Text(s) if is_error_tag(s))))
}

/// Stable root nearest `previous` (or the smallest stable root); when
/// nothing is stable, `None` and the verdict of the lowest root.
pub fn pick_stable(set: &BranchSet, previous: Option<f64>) -> (Option<usize>, StabilityClass) {
    let stable: Vec<usize> = (0..set.roots.len()).filter(|&i| set.roots[i].is_stable()).collect();
    if stable.is_empty() {
        let class = set.roots.first().and_then(|r| r.stability).unwrap_or(StabilityClass::Unstable);
        return (None, class);
    }
    let idx = match previous {
        Some(p) => *stable
            .iter()
            .min_by(|&&a, &&b| (set.roots[a].response - p).abs().total_cmp(&(set.roots[b].response - p).abs()))
            .unwrap(),
        None => stable[0],
    };
    (Some(idx), StabilityClass::Stable)
}

/// Visits `values` starting at the entry nearest `origin`, first upward
/// then downward, threading the previous response through `eval`.
/// Results come back in the order of `values`.
pub fn track_outward<T, P: Clone>(
    values: &[f64],
    origin: f64,
    mut eval: impl FnMut(f64, Option<P>) -> (T, Option<P>),
) -> Vec<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let Some(start) = (0..n).min_by(|&a, &b| (values[order[a]] - origin).abs().total_cmp(&(values[order[b]] - origin).abs()))
    else {
        return Vec::new();
    };
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let mut prev = None;
    let mut at_origin = None;
    for &i in &order[start..] {
        let (item, resp) = eval(values[i], prev.clone());
        prev = resp.or(prev);
        if at_origin.is_none() {
            at_origin = Some(prev.clone());
        }
        out[i] = Some(item);
    }
    prev = at_origin.flatten();
    for &i in order[..start].iter().rev() {
        let (item, resp) = eval(values[i], prev.clone());
        prev = resp.or(prev);
        out[i] = Some(item);
    }
    out.into_iter().map(|v| v.expect("visited")).collect()
}
