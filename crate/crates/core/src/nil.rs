//! Heisenberg space `Nil₃(τ)` in the symmetric gauge `a = −τy`, `b = τx`:
//! ambient isometries acting on graphs, the invariant minimal graphs
//! `M + τx(y − c)`, and truncated strip experiments.
//!
//! The strip experiment clamps the truncation arcs at `±K` where the
//! uniqueness argument uses barriers tending to `±∞`; it is numerical
//! evidence for uniqueness over strips, not a proof.

use crate::field::{Point, ScalarField};
use crate::grid::{GridDomain, NodeKind, ScalarGrid};
use crate::model::{builtin_model, Preset};
use crate::solver::{solve_dirichlet, strip_truncation, SolveConfig};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Generators of the isometry group, acting on `(x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum NilIsometry {
    /// `(x + c, y, z + cτy)`.
    Phi1(f64),
    /// `(x, y + c, z − cτx)`.
    Phi2(f64),
    /// `(x, y, z + c)`.
    Phi3(f64),
    /// Rotation by `θ` about the `z`-axis. The symmetric gauge is
    /// rotation invariant, so no gauge change is involved.
    Phi4(f64),
    /// `(x, −y, −z)`.
    Phi5,
    /// Applies the listed maps in order.
    Compose(Vec<NilIsometry>),
}

impl NilIsometry {
    pub fn then(self, next: NilIsometry) -> NilIsometry {
        match self {
            NilIsometry::Compose(mut v) => {
                v.push(next);
                NilIsometry::Compose(v)
            }
            first => NilIsometry::Compose(vec![first, next]),
        }
    }

    /// Image of `(x, y, z)`.
    pub fn apply(&self, tau: f64, (x, y, z): (f64, f64, f64)) -> (f64, f64, f64) {
        match *self {
            NilIsometry::Phi1(c) => (x + c, y, z + c * tau * y),
            NilIsometry::Phi2(c) => (x, y + c, z - c * tau * x),
            NilIsometry::Phi3(c) => (x, y, z + c),
            NilIsometry::Phi4(t) => (x * t.cos() - y * t.sin(), x * t.sin() + y * t.cos(), z),
            NilIsometry::Phi5 => (x, -y, -z),
            NilIsometry::Compose(ref v) => v.iter().fold((x, y, z), |q, g| g.apply(tau, q)),
        }
    }

    pub fn inverse(&self) -> NilIsometry {
        match *self {
            NilIsometry::Phi1(c) => NilIsometry::Phi1(-c),
            NilIsometry::Phi2(c) => NilIsometry::Phi2(-c),
            NilIsometry::Phi3(c) => NilIsometry::Phi3(-c),
            NilIsometry::Phi4(t) => NilIsometry::Phi4(-t),
            NilIsometry::Phi5 => NilIsometry::Phi5,
            NilIsometry::Compose(ref v) => NilIsometry::Compose(v.iter().rev().map(|g| g.inverse()).collect()),
        }
    }

    // The horizontal part never depends on z.
    fn base_inverse(&self, tau: f64, q: Point) -> Point {
        let (x, y, _) = self.inverse().apply(tau, (q.x, q.y, 0.0));
        Point::new(x, y)
    }
}

/// Pushes the graph of `u` (on `src`) forward by `iso` and samples it on the
/// non-excluded nodes of `target` by bilinear interpolation.
pub fn apply_isometry_to_graph(
    iso: &NilIsometry,
    tau: f64,
    src: &GridDomain,
    u: &ScalarGrid,
    target: &GridDomain,
) -> Result<ScalarGrid> {
    let values = (0..target.len())
        .into_par_iter()
        .map(|idx| {
            if target.kind(idx) == NodeKind::Excluded {
                return Ok(f64::NAN);
            }
            let q = target.position(idx);
            let p = iso.base_inverse(tau, q);
            let z = u.interpolate(src, p).ok_or_else(|| {
                Error::Invalid(format!(
                    "target node ({}, {}) pulls back to ({}, {}) outside the source grid",
                    q.x, q.y, p.x, p.y
                ))
            })?;
            Ok(iso.apply(tau, (p.x, p.y, z)).2)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScalarGrid { values })
}

/// The minimal graph `M + τx(y − c)`, invariant under `φ₁`.
pub fn invariant_barrier(tau: f64, c: f64, m: f64) -> ScalarField {
    ScalarField::analytic(
        "M + tau*x*(y - c)",
        move |p| m + tau * p.x * (p.y - c),
        move |p| (tau * (p.y - c), tau * p.x),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripRow {
    pub n: f64,
    pub k: f64,
    /// `max |u|` over nodes with `|x| ≤ w`.
    pub core_sup: f64,
    /// `K + τnw + τw²`, the bound on the core implied by the barriers
    /// `±(K + τnw) + τxy`.
    pub barrier_bound: f64,
    /// Largest amount by which `u` leaves the barrier envelope anywhere.
    pub barrier_violation: f64,
    pub converged: bool,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripReport {
    pub tau: f64,
    pub w: f64,
    pub rows: Vec<StripRow>,
    /// Per clamp `K`: whether the core sup strictly decreases along the
    /// truncation lengths in the order given.
    pub strictly_decreasing: Vec<(f64, bool)>,
}

/// Solves minimal graphs in `Nil₃(τ)` over `[−n, n] × [−w, w]` with zero
/// data on the long edges, `+K` on `x = −n` and `−K` on `x = n`, for every
/// `n` and `K`, at `cells` cells per unit length.
pub fn strip_uniqueness_experiment(
    tau: f64,
    w: f64,
    n_list: &[f64],
    k_list: &[f64],
    cells: usize,
    cfg: &SolveConfig,
) -> Result<StripReport> {
    if !(w > 0.0) || !tau.is_finite() {
        return Err(Error::Invalid(format!(
            "need w > 0 and finite tau, got w = {w}, tau = {tau}"
        )));
    }
    if (2.0 * w * cells as f64) < 16.0 {
        return Err(Error::Invalid(format!(
            "{cells} cells per unit resolve the width 2w = {} with fewer than 16 cells",
            2.0 * w
        )));
    }
    if let Some(n) = n_list.iter().find(|&&n| !(n >= w)) {
        return Err(Error::Invalid(format!(
            "truncation length {n} is shorter than the half-width {w}"
        )));
    }
    let model = builtin_model(&Preset::Nil3 { tau })?;
    let zero = ScalarField::zero();
    let jobs: Vec<(f64, f64)> = k_list
        .iter()
        .flat_map(|&k| n_list.iter().map(move |&n| (n, k)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, k)| -> Result<StripRow> {
            let dom = strip_truncation(w, n, cells, &zero, k, -k)?;
            let rep = solve_dirichlet(&model, &dom, &zero, cfg, None)?;
            let big_m = k.abs() + tau.abs() * n * w;
            let mut core_sup: f64 = 0.0;
            let mut violation: f64 = 0.0;
            for idx in 0..dom.len() {
                if dom.kind(idx) == NodeKind::Excluded {
                    continue;
                }
                let p = dom.position(idx);
                let u = rep.solution.get(idx);
                if p.x.abs() <= w + 1e-12 {
                    core_sup = core_sup.max(u.abs());
                }
                let inv = tau * p.x * p.y;
                violation = violation.max(u - (big_m + inv)).max(-big_m + inv - u);
            }
            Ok(StripRow {
                n,
                k,
                core_sup,
                barrier_bound: big_m + tau.abs() * w * w,
                barrier_violation: violation.max(0.0),
                converged: rep.converged,
                newton_steps: rep.newton_steps(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = k_list
        .iter()
        .map(|&k| {
            let sups: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.core_sup).collect();
            (k, sups.windows(2).all(|s| s[1] < s[0]))
        })
        .collect();
    Ok(StripReport {
        tau,
        w,
        rows,
        strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundarySpec;

    #[test]
    fn isometries_round_trip() {
        let g = NilIsometry::Phi1(0.7)
            .then(NilIsometry::Phi4(0.3))
            .then(NilIsometry::Phi2(-1.1))
            .then(NilIsometry::Phi5)
            .then(NilIsometry::Phi3(2.0));
        let q = (0.4, -0.9, 1.3);
        let back = g.inverse().apply(0.5, g.apply(0.5, q));
        assert!((back.0 - q.0).abs() + (back.1 - q.1).abs() + (back.2 - q.2).abs() < 1e-14);
    }

    #[test]
    fn invariant_graph_is_fixed() {
        let tau = 0.5;
        let d = GridDomain::rectangle(
            (-2.0, 2.0, -1.0, 1.0),
            32,
            16,
            &BoundarySpec::uniform(ScalarField::zero()),
        )
        .unwrap();
        let u = ScalarGrid::from_field(&d, &invariant_barrier(tau, 0.0, 0.0)).unwrap();
        let small = GridDomain::rectangle(
            (-1.0, 1.0, -0.5, 0.5),
            16,
            8,
            &BoundarySpec::uniform(ScalarField::zero()),
        )
        .unwrap();
        let want = ScalarGrid::from_field(&small, &invariant_barrier(tau, 0.0, 0.0)).unwrap();
        for iso in [NilIsometry::Phi1(0.37), NilIsometry::Phi5] {
            let v = apply_isometry_to_graph(&iso, tau, &d, &u, &small).unwrap();
            assert!(v.max_abs_diff(&want, 0..small.len()) < 1e-12);
        }
        let lifted = apply_isometry_to_graph(
            &NilIsometry::Phi3(2.0),
            tau,
            &d,
            &ScalarGrid::with_boundary_data(&d, 0.0),
            &small,
        )
        .unwrap();
        assert!(lifted.values.iter().all(|&v| v == 2.0));
        let out = apply_isometry_to_graph(&NilIsometry::Phi1(5.0), tau, &d, &u, &small);
        assert!(out.is_err());
    }

    #[test]
    fn barrier_shift() {
        let (b0, b1) = (invariant_barrier(0.5, 0.3, 0.0), invariant_barrier(0.5, 0.3, 2.5));
        let p = Point::new(1.3, -0.2);
        assert!((b1.value(p).unwrap() - b0.value(p).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn zero_clamp_gives_zero() {
        let r = strip_uniqueness_experiment(0.5, 1.0, &[1.0, 2.0], &[0.0], 8, &SolveConfig::default()).unwrap();
        // Zero is minimal, but only solves the discrete equations up to
        // truncation error when τ ≠ 0.
        assert!(r.rows.iter().all(|row| row.core_sup < 1e-5 && row.converged));
        let flat = strip_uniqueness_experiment(0.0, 1.0, &[1.0, 2.0], &[0.0], 8, &SolveConfig::default()).unwrap();
        assert!(flat.rows.iter().all(|row| row.core_sup == 0.0));
        assert!(strip_uniqueness_experiment(0.5, 1.0, &[2.0], &[1.0], 4, &SolveConfig::default()).is_err());
    }
}
