//! Subcommands and named experiments.

use std::f64::consts::FRAC_PI_4;

use killing_graph::dyadic::{DyadicReport, Verdict};
use killing_graph::growth::{
    collin_krust_experiment, e1tau_growth, g_of_r, iterated_log, iterated_log_windows, sol3_wedge_bound,
    sol3_wedge_windows, DomainKind, GrowthError,
};
use killing_graph::nil::strip_uniqueness_experiment;
use killing_graph::operator::{angle_function, area_element, mean_curvature_residual};
use killing_graph::radial::{boundedness_classify, radial_profile, RadialError};
use killing_graph::singularity::removable_singularity_study;
use killing_graph::{solve_dirichlet, Error, GridDomain, NodeKind, Point};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{boundary_spec, parse_field, BoundarySection, Config, Shape};
use crate::output::Outputs;
use crate::CliError;

pub const EXPERIMENTS: [&str; 6] = [
    "nil-strip",
    "removable-singularity",
    "collin-krust-fit",
    "sol3-wedge",
    "e1tau-growth",
    "iterated-log",
];

/// Staged outputs plus whether every solve converged.
pub struct RunResult {
    pub outputs: Outputs,
    pub converged: bool,
    pub summary: String,
}

fn lib_err(e: Error) -> CliError {
    match e {
        Error::Linalg(e) => CliError::NonConvergence(e.to_string()),
        Error::Radial(e) => radial_err(e),
        Error::Growth(e) => growth_err(e),
        other => CliError::Config(other.to_string()),
    }
}

fn radial_err(e: RadialError) -> CliError {
    match e {
        RadialError::Quadrature { .. } => CliError::NonConvergence(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn growth_err(e: GrowthError) -> CliError {
    match e {
        GrowthError::Radial(r) => radial_err(r),
        other => CliError::Config(other.to_string()),
    }
}

fn windows_json(w: &DyadicReport) -> serde_json::Value {
    serde_json::to_value(w).unwrap_or_default()
}

pub fn solve(cfg: &Config) -> Result<RunResult, CliError> {
    let m = cfg.model()?;
    let dom = cfg.domain()?;
    let h = cfg.h()?;
    let scfg = cfg.solver()?;
    let rep = solve_dirichlet(&m, &dom, &h, &scfg, None).map_err(lib_err)?;
    let res = mean_curvature_residual(&m, &dom, &rep.solution, &h).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rows = Vec::new();
    let mut max_residual: f64 = 0.0;
    for idx in 0..dom.len() {
        if dom.kind(idx) == NodeKind::Excluded {
            continue;
        }
        let p = dom.position(idx);
        let eval = |e: killing_graph::EvalError| CliError::Config(e.to_string());
        let w = area_element(&m, &dom, &rep.solution, idx).map_err(eval)?;
        let nu = angle_function(&m, &dom, &rep.solution, idx).map_err(eval)?;
        let r = dom.is_interior(idx).then(|| res.get(idx));
        if let Some(r) = r {
            max_residual = max_residual.max(r.abs());
        }
        rows.push(vec![
            p.x.into(),
            p.y.into(),
            rep.solution.get(idx).into(),
            w.into(),
            nu.into(),
            r.into(),
        ]);
    }
    let mut out = Outputs::default();
    out.csv("solution.csv", &["x", "y", "u", "W", "nu", "residual"], rows)?;
    out.json(
        "report.json",
        &json!({
            "command": "solve",
            "model": m.preset.as_ref().map(|p| p.to_string()),
            "converged": rep.converged,
            "iterations": rep.iterations,
            "newton_steps": rep.newton_steps(),
            "residual": rep.residual,
            "max_residual": max_residual,
            "tolerance": rep.tolerance,
            "message": rep.message,
            "history": rep.history,
            "nodes": dom.len(),
            "interior_nodes": dom.interior_nodes().count(),
        }),
    )?;
    let summary = match &rep.message {
        Some(msg) if !rep.converged => format!("not converged after {} iterations: {msg}", rep.iterations),
        _ => format!(
            "converged in {} iterations, residual {:e}",
            rep.iterations, rep.residual
        ),
    };
    Ok(RunResult {
        outputs: out,
        converged: rep.converged,
        summary,
    })
}

pub fn radial(cfg: &Config) -> Result<RunResult, CliError> {
    let sec = cfg
        .radial
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"radial\" section".into()))?;
    let mu = parse_field("radial.mu", &sec.mu)?;
    if sec.c.is_empty() {
        return Err(CliError::Config("radial: list at least one c".into()));
    }
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    for &c in &sec.c {
        let p = radial_profile(c, &mu, sec.r0, sec.r1, sec.n_samples).map_err(radial_err)?;
        for &(r, u) in &p.samples {
            rows.push(vec![c.into(), r.into(), u.into()]);
        }
        let bounded = match sec.r_max {
            Some(r_max) => Some(boundedness_classify(&mu, c, sec.r0, r_max).map_err(radial_err)?),
            None => None,
        };
        profiles.push(json!({
            "c": c,
            "u_r1": p.samples.last().map(|s| s.1),
            "sup": p.sup,
            "boundedness": bounded.as_ref().map(|b| b.verdict.as_str()),
            "windows": bounded.as_ref().map(|b| windows_json(&b.windows)),
        }));
    }
    let mut out = Outputs::default();
    out.csv("radial.csv", &["c", "r", "u"], rows)?;
    out.json(
        "report.json",
        &json!({"command": "radial", "mu": sec.mu, "r0": sec.r0, "r1": sec.r1, "profiles": profiles}),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: true,
        summary: format!("{} profile(s) on [{}, {}]", sec.c.len(), sec.r0, sec.r1),
    })
}

pub fn growth(cfg: &Config) -> Result<RunResult, CliError> {
    let m = cfg.model()?;
    let g = cfg.growth()?;
    let p = g_of_r(&m, &g).map_err(growth_err)?;
    let rows = (0..p.radii.len())
        .map(|i| {
            vec![
                p.radii[i].into(),
                p.l_plain[i].into(),
                p.l_weighted[i].into(),
                p.g[i].into(),
            ]
        })
        .collect();
    let mut out = Outputs::default();
    out.csv("growth.csv", &["r", "l_plain", "l_weighted", "g"], rows)?;
    out.json(
        "report.json",
        &json!({
            "command": "growth",
            "variant": p.variant,
            "r0": p.r0(),
            "r_max": p.radii.last(),
            "g_final": p.g.last(),
            "verdict": p.verdict(),
            "windows": windows_json(&p.windows),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: true,
        summary: format!("g {} ({} radii)", p.verdict(), p.radii.len()),
    })
}

pub fn experiment(name: &str, cfg: &Config) -> Result<RunResult, CliError> {
    match name {
        "nil-strip" => nil_strip(cfg),
        "removable-singularity" => puncture(cfg),
        "collin-krust-fit" => collin_krust(cfg),
        "sol3-wedge" => wedge(cfg),
        "e1tau-growth" => e1tau(cfg),
        "iterated-log" => iterated(cfg),
        other => Err(CliError::Config(format!(
            "unknown experiment {other:?}; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct StripParams {
    tau: f64,
    half_width: f64,
    lengths: Vec<f64>,
    clamps: Vec<f64>,
    cells_per_unit: usize,
}

impl Default for StripParams {
    fn default() -> Self {
        StripParams {
            tau: 0.5,
            half_width: 1.0,
            lengths: vec![2.0, 4.0, 8.0],
            clamps: vec![5.0],
            cells_per_unit: 8,
        }
    }
}

fn nil_strip(cfg: &Config) -> Result<RunResult, CliError> {
    let p: StripParams = cfg.experiment()?;
    let scfg = cfg.solver()?;
    let r = strip_uniqueness_experiment(p.tau, p.half_width, &p.lengths, &p.clamps, p.cells_per_unit, &scfg)
        .map_err(lib_err)?;
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.n.into(),
                row.k.into(),
                row.core_sup.into(),
                row.barrier_bound.into(),
                row.barrier_violation.into(),
                row.converged.into(),
                row.newton_steps.into(),
            ]
        })
        .collect();
    let converged = r.rows.iter().all(|row| row.converged);
    let mut out = Outputs::default();
    out.csv(
        "strip.csv",
        &[
            "n",
            "k",
            "core_sup",
            "barrier_bound",
            "barrier_violation",
            "converged",
            "newton_steps",
        ],
        rows,
    )?;
    out.json(
        "report.json",
        &json!({
            "experiment": "nil-strip",
            "tau": r.tau,
            "half_width": r.w,
            "strictly_decreasing": r.strictly_decreasing,
            "note": "Truncations clamp the arcs at finite heights; a decreasing core sup supports uniqueness but does not prove it.",
        }),
    )?;
    let dec = r.strictly_decreasing.iter().all(|d| d.1);
    Ok(RunResult {
        outputs: out,
        converged,
        summary: format!("core sup strictly decreasing: {dec}"),
    })
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PunctureParams {
    /// Number of grids, each with twice the resolution of the previous.
    levels: usize,
}

impl Default for PunctureParams {
    fn default() -> Self {
        PunctureParams { levels: 3 }
    }
}

fn refine(shape: &Shape, factor: usize) -> Shape {
    let mut s = shape.clone();
    match &mut s {
        Shape::Rectangle { cells, .. } | Shape::Masked { cells, .. } => {
            cells[0] *= factor;
            cells[1] *= factor;
        }
        Shape::Annulus { n_r, ntheta, .. } => {
            *n_r *= factor;
            *ntheta *= factor;
        }
        Shape::Strip { cells_per_unit, .. } => *cells_per_unit *= factor,
        Shape::Wedge { cells, .. } => *cells *= factor,
    }
    s
}

fn puncture(cfg: &Config) -> Result<RunResult, CliError> {
    let p: PunctureParams = cfg.experiment()?;
    if p.levels == 0 || p.levels > 8 {
        return Err(CliError::Config("experiment.levels must be between 1 and 8".into()));
    }
    let sec = cfg
        .domain
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"domain\" section".into()))?;
    let [px, py] = sec
        .puncture
        .ok_or_else(|| CliError::Config("domain.puncture is required for this experiment".into()))?;
    let m = cfg.model()?;
    let spec = cfg.boundary()?;
    let mut domains = Vec::new();
    for level in 0..p.levels {
        let mut c = cfg.clone();
        if let Some(d) = c.domain.as_mut() {
            d.shape = refine(&sec.shape, 1 << level);
            d.puncture = None;
        }
        let dom: GridDomain = c.domain_with(&spec)?;
        domains.push(dom);
    }
    let study =
        removable_singularity_study(&m, &domains, Point::new(px, py), &cfg.h()?, &cfg.solver()?).map_err(lib_err)?;
    let rows = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.spacing.into(),
                r.puncture.x.into(),
                r.puncture.y.into(),
                r.difference.into(),
                r.full_converged.into(),
                r.punctured_converged.into(),
            ]
        })
        .collect();
    let converged = study.rows.iter().all(|r| r.full_converged && r.punctured_converged);
    let mut out = Outputs::default();
    out.csv(
        "puncture.csv",
        &[
            "spacing",
            "x",
            "y",
            "difference",
            "full_converged",
            "punctured_converged",
        ],
        rows,
    )?;
    out.json(
        "report.json",
        &json!({
            "experiment": "removable-singularity",
            "monotone_decay": study.monotone_decay,
            "differences": study.rows.iter().map(|r| r.difference).collect::<Vec<_>>(),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged,
        summary: format!("difference decays monotonically: {}", study.monotone_decay),
    })
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PairParams {
    /// Boundary data of the second solution.
    boundary_v: Option<BoundarySection>,
}

fn collin_krust(cfg: &Config) -> Result<RunResult, CliError> {
    let p: PairParams = cfg.experiment()?;
    let v_sec = p
        .boundary_v
        .ok_or_else(|| CliError::Config("experiment.boundary_v is required for this experiment".into()))?;
    let m = cfg.model()?;
    let du = cfg.domain()?;
    let dv = cfg.domain_with(&boundary_spec(&v_sec)?)?;
    let g = cfg.growth()?;
    let e = collin_krust_experiment(&m, &du, &dv, &cfg.h()?, &cfg.solver()?, &g).map_err(lib_err)?;
    let rows = (0..e.profile.radii.len())
        .map(|i| vec![e.profile.radii[i].into(), e.profile.g[i].into(), e.fit.m[i].into()])
        .collect();
    let mut out = Outputs::default();
    out.csv("fit.csv", &["r", "g", "m"], rows)?;
    out.json(
        "report.json",
        &json!({
            "experiment": "collin-krust-fit",
            "slope": e.fit.slope,
            "intercept": e.fit.intercept,
            "positive": e.fit.positive,
            "u_converged": e.u.converged,
            "v_converged": e.v.converged,
            "g_verdict": e.profile.verdict(),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: e.u.converged && e.v.converged,
        summary: format!("slope of M against g: {:e}", e.fit.slope),
    })
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct WedgeParams {
    theta1: f64,
    theta2: f64,
    rho0: f64,
    rho_max: f64,
    n_samples: usize,
}

impl Default for WedgeParams {
    fn default() -> Self {
        WedgeParams {
            theta1: FRAC_PI_4,
            theta2: FRAC_PI_4,
            rho0: 1.0,
            rho_max: 30.0,
            n_samples: 59,
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn wedge(cfg: &Config) -> Result<RunResult, CliError> {
    let p: WedgeParams = cfg.experiment()?;
    let mut rows = Vec::new();
    for rho in linspace(p.rho0, p.rho_max, p.n_samples) {
        let b = sol3_wedge_bound(p.theta1, p.theta2, rho).map_err(growth_err)?;
        rows.push(vec![rho.into(), b.t.into(), b.length_bound.into(), b.integrand.into()]);
    }
    let w = sol3_wedge_windows(p.theta1, p.theta2, p.rho0, p.rho_max).map_err(growth_err)?;
    let mut out = Outputs::default();
    out.csv("wedge.csv", &["rho", "t", "length_bound", "integrand"], rows)?;
    out.json(
        "report.json",
        &json!({
            "experiment": "sol3-wedge",
            "theta1": p.theta1,
            "theta2": p.theta2,
            "verdict": w.verdict,
            "windows": windows_json(&w),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: true,
        summary: format!("lower bound for g {}", w.verdict),
    })
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KindName {
    #[default]
    BoundedWidth,
    Exterior,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct E1TauParams {
    h: f64,
    tau: f64,
    kind: KindName,
    r0: f64,
    r_max: f64,
    n_samples: usize,
}

impl Default for E1TauParams {
    fn default() -> Self {
        E1TauParams {
            h: 0.5,
            tau: 0.0,
            kind: KindName::BoundedWidth,
            r0: 0.0,
            r_max: 30.0,
            n_samples: 31,
        }
    }
}

fn e1tau(cfg: &Config) -> Result<RunResult, CliError> {
    let p: E1TauParams = cfg.experiment()?;
    let kind = match p.kind {
        KindName::BoundedWidth => DomainKind::BoundedWidth,
        KindName::Exterior => DomainKind::Exterior,
    };
    let mut rows = Vec::new();
    let mut last = None;
    for r in linspace(p.r0, p.r_max, p.n_samples) {
        let s = e1tau_growth(p.h, p.tau, kind, p.r0, r).map_err(growth_err)?;
        rows.push(vec![
            s.r.into(),
            s.g.into(),
            s.g_prime.into(),
            s.coefficient.into(),
            s.bound_coefficient.into(),
            s.asymptote.into(),
        ]);
        last = Some(s);
    }
    let last = last.ok_or_else(|| CliError::Config("experiment.n_samples must be positive".into()))?;
    let mut out = Outputs::default();
    out.csv(
        "e1tau.csv",
        &["r", "g", "g_prime", "coefficient", "bound_coefficient", "asymptote"],
        rows,
    )?;
    out.json(
        "report.json",
        &json!({
            "experiment": "e1tau-growth",
            "h": p.h,
            "tau": p.tau,
            "kind": p.kind,
            "final": last,
            "ratio_to_asymptote": (last.asymptote > 0.0).then(|| last.g / last.asymptote),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: true,
        summary: format!("g({}) = {:e}", last.r, last.g),
    })
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IteratedParams {
    n: u32,
    x0: f64,
    x_max: f64,
    /// Table rows at `10^k` for `k = 1..=decades`.
    decades: u32,
}

impl Default for IteratedParams {
    fn default() -> Self {
        IteratedParams {
            n: 2,
            x0: 1.0,
            x_max: 1e300,
            decades: 30,
        }
    }
}

fn iterated(cfg: &Config) -> Result<RunResult, CliError> {
    let p: IteratedParams = cfg.experiment()?;
    if p.n > 4 {
        return Err(CliError::Config("experiment.n must be at most 4".into()));
    }
    let mut rows = Vec::new();
    for k in 1..=p.decades.min(300) {
        let x = 10f64.powi(k as i32);
        let a = iterated_log(p.n, x).map_err(growth_err)?;
        let b = iterated_log(p.n + 1, x).map_err(growth_err)?;
        rows.push(vec![x.into(), a.f.into(), a.g.into(), (b.f / a.f).into()]);
    }
    let w = iterated_log_windows(p.n, p.x0, p.x_max).map_err(growth_err)?;
    let mut out = Outputs::default();
    out.csv("iterated_log.csv", &["x", "f", "g", "next_ratio"], rows)?;
    out.json(
        "report.json",
        &json!({
            "experiment": "iterated-log",
            "n": p.n,
            "verdict": w.verdict,
            "diverges": w.verdict == Verdict::Diverges,
            "windows": windows_json(&w),
        }),
    )?;
    Ok(RunResult {
        outputs: out,
        converged: true,
        summary: format!("g_{} {}", p.n, w.verdict),
    })
}
