//! Generic one- and two-axis parameter sweeps.

use rayon::prelude::*;

use crate::config::{Quantity, SweepSpec};
use crate::eval::{add_legend, track_outward};
use crate::point::{evaluate, PointResult, Previous};
use crate::table::{Cell, Column, Table};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("no sweep axis")]
    NoAxis,
    #[error("axis `{0}` is swept twice")]
    DuplicateAxis(String),
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
}

fn axis_unit(name: &str) -> &'static str {
    match name {
        "power" | "power_high" => "W",
        "wavelength" => "m",
        _ => "rad/s",
    }
}

/// Evaluates `spec` over its axes. Rows run over axis1 fastest; rows of
/// axis2 are evaluated in parallel, each tracked along axis1 outward from
/// the value nearest zero.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table, SweepError> {
    let a1 = spec.axes.first().ok_or(SweepError::NoAxis)?;
    let a2 = spec.axes.get(1);
    if a2.is_some_and(|a| a.name == a1.name) {
        return Err(SweepError::DuplicateAxis(a1.name.clone()));
    }
    let v1 = a1.values();
    let v2: Vec<Option<f64>> = match a2 {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };

    let rows: Vec<Result<Vec<PointResult>, SweepError>> = v2
        .par_iter()
        .map(|&outer| {
            let mut base = spec.params;
            if let (Some(a), Some(v)) = (a2, outer) {
                base.set(&a.name, v)?;
            }
            let mut failure = None;
            let results = track_outward(&v1, 0.0, |v, prev: Option<Previous>| {
                let mut params = base;
                if let Err(e) = params.set(&a1.name, v) {
                    failure = Some(e);
                }
                let r = evaluate(&params, &spec.sensing, prev.unwrap_or_default());
                let next = r.next;
                (r, Some(next))
            });
            match failure {
                Some(e) => Err(e.into()),
                None => Ok(results),
            }
        })
        .collect();

    let mut cols = vec![Column::new(&a1.name, axis_unit(&a1.name))];
    if let Some(a) = a2 {
        cols.push(Column::new(&a.name, axis_unit(&a.name)));
    }
    let qs = &spec.output.quantities;
    for q in qs {
        match q {
            Quantity::Eigenvalues => {
                for k in 1..=3 {
                    cols.push(Column::new(&format!("Re lambda{k}"), "Gamma"));
                    cols.push(Column::new(&format!("Im lambda{k}"), "Gamma"));
                }
                cols.push(Column::new("phase", ""));
            }
            Quantity::X => cols.push(Column::new("x", "excitations")),
            Quantity::Y => cols.push(Column::new("y", "excitations")),
            Quantity::Eta => cols.push(Column::new("eta", "")),
            Quantity::Stability => {
                cols.push(Column::new("stability", ""));
                cols.push(Column::new("max_real_part", "Gamma"));
            }
            Quantity::Regime => cols.push(Column::new("regime", "")),
        }
    }
    cols.push(Column::new("status", ""));
    let mut t = Table::new(cols);

    for (row, outer) in rows.into_iter().zip(&v2) {
        for (r, &inner) in row?.iter().zip(&v1) {
            let mut cells: Vec<Cell> = vec![inner.into()];
            if let Some(v) = outer {
                cells.push((*v).into());
            }
            for q in qs {
                match q {
                    Quantity::Eigenvalues => {
                        for l in r.spectrum.lambdas {
                            cells.push(l.re.into());
                            cells.push(l.im.into());
                        }
                        cells.push(r.spectrum.phase.label().into());
                    }
                    Quantity::X => cells.push(r.x.into()),
                    Quantity::Y => cells.push(r.y.into()),
                    Quantity::Eta => cells.push(r.eta.into()),
                    Quantity::Stability => {
                        cells.push(r.stability.map(|c| c.label()).into());
                        cells.push(r.max_real_part.into());
                    }
                    Quantity::Regime => cells.push(r.regime.map(|g| g.label()).into()),
                }
            }
            cells.push(r.status.into());
            t.push(cells);
        }
    }
    for (k, v) in spec.metadata() {
        t.meta(&k, v);
    }
    t.meta("tool", concat!("antipt ", env!("CARGO_PKG_VERSION")));
    add_legend(&mut t);
    Ok(t)
}
