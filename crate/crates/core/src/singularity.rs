//! Punctured Dirichlet problems: the same data solved with and without one
//! interior node. The punctured problem has no equation and no value at
//! the node; fluxes into it use a value extrapolated linearly from the
//! opposite side, so affine solutions are unaffected.

use crate::field::{Point, ScalarField};
use crate::grid::GridDomain;
use crate::model::MetricModel;
use crate::solver::{solve_dirichlet, SolveConfig, SolveReport};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PunctureRow {
    pub spacing: f64,
    pub puncture: Point,
    /// `max |u_full − u_punctured|` over the nodes of the punctured problem.
    pub difference: f64,
    pub full_converged: bool,
    pub punctured_converged: bool,
}

#[derive(Debug, Clone)]
pub struct PunctureRun {
    pub row: PunctureRow,
    pub full: SolveReport,
    pub punctured: SolveReport,
}

/// Solves on `dom` and on `dom` with the node at `p` removed.
pub fn removable_singularity(
    m: &MetricModel,
    dom: &GridDomain,
    p: Point,
    h: &ScalarField,
    cfg: &SolveConfig,
) -> Result<PunctureRun> {
    let idx = dom
        .locate(p)
        .ok_or_else(|| Error::Invalid(format!("({}, {}) is not a grid node", p.x, p.y)))?;
    let punct_dom = dom.clone().with_puncture(idx)?;
    let (full, punctured) = rayon::join(
        || solve_dirichlet(m, dom, h, cfg, None),
        || solve_dirichlet(m, &punct_dom, h, cfg, None),
    );
    let (full, punctured) = (full?, punctured?);
    let difference = full
        .solution
        .max_abs_diff(&punctured.solution, punct_dom.interior_nodes());
    Ok(PunctureRun {
        row: PunctureRow {
            spacing: dom.spacing(),
            puncture: dom.position(idx),
            difference,
            full_converged: full.converged,
            punctured_converged: punctured.converged,
        },
        full,
        punctured,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PunctureStudy {
    pub rows: Vec<PunctureRow>,
    /// Differences strictly decrease along the domains in the order given.
    pub monotone_decay: bool,
}

/// Runs [`removable_singularity`] on each domain, normally a refinement
/// sequence.
pub fn removable_singularity_study(
    m: &MetricModel,
    domains: &[GridDomain],
    p: Point,
    h: &ScalarField,
    cfg: &SolveConfig,
) -> Result<PunctureStudy> {
    let rows: Vec<PunctureRow> = domains
        .iter()
        .map(|d| removable_singularity(m, d, p, h, cfg).map(|r| r.row))
        .collect::<Result<_>>()?;
    let monotone_decay = rows.windows(2).all(|w| w[1].difference < w[0].difference);
    Ok(PunctureStudy { rows, monotone_decay })
}
