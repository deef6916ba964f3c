//! Dirichlet solver for the discrete mean-curvature operator: damped Newton
//! with Armijo backtracking and a frozen-coefficient (Picard) fallback.

use serde::Serialize;

use crate::field::ScalarField;
use crate::grid::{BoundaryArc, BoundarySpec, GridDomain, NodeKind, ScalarGrid};
use crate::linalg::{solve_refined, LinalgError};
use crate::model::MetricModel;
use crate::operator::DiscreteOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveConfig {
    pub max_iterations: usize,
    /// Converged when `‖F‖∞ ≤ tolerance · (1 + ‖2μH‖∞)`.
    pub tolerance: f64,
    pub armijo: f64,
    pub min_step: f64,
    pub linear_tolerance: f64,
    /// Consecutive rejected Newton steps before switching to Picard only.
    pub picard_after: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iterations: 60,
            tolerance: 1e-10,
            armijo: 1e-4,
            min_step: 2f64.powi(-20),
            linear_tolerance: 1e-12,
            picard_after: 5,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.tolerance > 0.0
            && self.armijo > 0.0
            && self.armijo < 0.5
            && self.min_step > 0.0
            && self.min_step <= 1.0
            && self.linear_tolerance > 0.0
            && self.picard_after > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("solver configuration out of range: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Newton,
    Picard,
}

/// One accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub kind: StepKind,
    /// Accepted damping factor (1 for Picard steps).
    pub step: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: ScalarGrid,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub history: Vec<StepRecord>,
    /// Why the run stopped early, when it did.
    pub message: Option<String>,
}

impl SolveReport {
    pub fn newton_steps(&self) -> usize {
        self.history.iter().filter(|s| s.kind == StepKind::Newton).count()
    }
}

fn inf_norm(op: &DiscreteOperator, f: &[f64]) -> f64 {
    op.order.iter().map(|&i| f[i].abs()).fold(0.0, f64::max)
}

fn half_sq(op: &DiscreteOperator, f: &[f64]) -> f64 {
    0.5 * op.order.iter().map(|&i| f[i] * f[i]).sum::<f64>()
}

fn picard_step(op: &DiscreteOperator, u: &[f64], w: &[f64], lin_tol: f64) -> Result<Vec<f64>> {
    let (mat, rhs) = op.picard_system(u, w);
    let (x, _) = solve_refined(&mat, &rhs, lin_tol)?;
    let mut out = u.to_vec();
    for (k, &idx) in op.order.iter().enumerate() {
        out[idx] = x[k];
    }
    Ok(out)
}

/// Initial iterate: one Picard solve with `W` frozen at the zero-section
/// value `√(1 + μ²(a² + b²))`.
pub fn picard_initial_guess(op: &DiscreteOperator, dom: &GridDomain, lin_tol: f64) -> Result<ScalarGrid> {
    let u0 = ScalarGrid::with_boundary_data(dom, 0.0);
    let w0 = op.zero_section_w();
    Ok(ScalarGrid {
        values: picard_step(op, &u0.values, &w0, lin_tol)?,
    })
}

/// Solves `F(u) = 0` with the domain's Dirichlet data.
pub fn solve_dirichlet(
    m: &MetricModel,
    dom: &GridDomain,
    h: &ScalarField,
    cfg: &SolveConfig,
    init: Option<&ScalarGrid>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let op = DiscreteOperator::new(m, dom, h)?;
    let src = op.order.iter().map(|&i| op.source[i].abs()).fold(0.0, f64::max);
    let tol = cfg.tolerance * (1.0 + src);
    let mut u = match init {
        Some(g) => {
            if g.values.len() != dom.len() {
                return Err(Error::Invalid("initial guess does not match the domain".into()));
            }
            let mut g = g.clone();
            g.impose_boundary(dom);
            if dom.interior_nodes().any(|i| !g.values[i].is_finite()) {
                return Err(Error::Invalid("initial guess is not finite".into()));
            }
            g.values
        }
        None => picard_initial_guess(&op, dom, cfg.linear_tolerance)?.values,
    };
    let mut f = op.residual(&u);
    let mut res = inf_norm(&op, &f);
    let mut history = Vec::new();
    let mut rejections = 0usize;
    let mut picard_only = false;
    let mut message = None;
    let mut iterations = 0;
    while res > tol && iterations < cfg.max_iterations {
        iterations += 1;
        let mut accepted = None;
        if !picard_only {
            match newton_step(&op, &u, &f, cfg) {
                Ok(Some((un, fn_, t))) => accepted = Some((un, fn_, t)),
                Ok(None) => {}
                Err(Error::Linalg(LinalgError::Singular(_))) => {
                    message = Some("singular Jacobian; used Picard step".into());
                }
                Err(e) => return Err(e),
            }
        }
        let (un, fn_, record) = match accepted {
            Some((un, fn_, t)) => {
                rejections = 0;
                (
                    un,
                    fn_,
                    StepRecord {
                        kind: StepKind::Newton,
                        step: t,
                        residual: 0.0,
                    },
                )
            }
            None => {
                rejections += 1;
                if rejections >= cfg.picard_after {
                    picard_only = true;
                }
                let w: Vec<f64> = op.fluxes(&u).iter().map(|e| e.w).collect();
                let un = picard_step(&op, &u, &w, cfg.linear_tolerance)?;
                let fn_ = op.residual(&un);
                (
                    un,
                    fn_,
                    StepRecord {
                        kind: StepKind::Picard,
                        step: 1.0,
                        residual: 0.0,
                    },
                )
            }
        };
        u = un;
        f = fn_;
        res = inf_norm(&op, &f);
        if !res.is_finite() {
            message = Some("residual became non-finite".into());
            history.push(StepRecord {
                residual: res,
                ..record
            });
            break;
        }
        history.push(StepRecord {
            residual: res,
            ..record
        });
    }
    let converged = res <= tol;
    if !converged && message.is_none() {
        message = Some(format!(
            "residual {res:e} above tolerance {tol:e} after {iterations} iterations"
        ));
    }
    Ok(SolveReport {
        solution: ScalarGrid { values: u },
        converged,
        iterations,
        residual: res,
        tolerance: tol,
        history,
        message: if converged { None } else { message },
    })
}

type Accepted = (Vec<f64>, Vec<f64>, f64);

fn newton_step(op: &DiscreteOperator, u: &[f64], f: &[f64], cfg: &SolveConfig) -> Result<Option<Accepted>> {
    let jac = op.jacobian(u);
    let rhs: Vec<f64> = op.order.iter().map(|&i| -f[i]).collect();
    let (delta, _) = solve_refined(&jac, &rhs, cfg.linear_tolerance)?;
    let phi0 = half_sq(op, f);
    let mut t = 1.0;
    while t >= cfg.min_step {
        let mut ut = u.to_vec();
        for (k, &idx) in op.order.iter().enumerate() {
            ut[idx] += t * delta[k];
        }
        let ft = op.residual(&ut);
        let phi = half_sq(op, &ft);
        if phi.is_finite() && phi <= (1.0 - 2.0 * cfg.armijo * t) * phi0 {
            return Ok(Some((ut, ft, t)));
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Comparison of two solutions on the same domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPrincipleVerdict {
    pub pass: bool,
    /// `min (v − u)` over the interior.
    pub worst: f64,
    pub node: usize,
    pub tolerance: f64,
}

/// Checks `u ≤ v` on the interior up to `tol` (normally ten times the
/// Newton tolerance), given `u ≤ v` on the boundary.
pub fn check_max_principle(
    dom: &GridDomain,
    u: &SolveReport,
    v: &SolveReport,
    tol: f64,
) -> Result<MaxPrincipleVerdict> {
    let (us, vs) = (&u.solution.values, &v.solution.values);
    if us.len() != dom.len() || vs.len() != dom.len() {
        return Err(Error::Invalid("solutions do not match the domain".into()));
    }
    for idx in 0..dom.len() {
        if dom.kind(idx) == NodeKind::Boundary && us[idx] > vs[idx] {
            return Err(Error::Invalid(format!("boundary data not ordered at node {idx}")));
        }
    }
    let (mut worst, mut node) = (f64::INFINITY, 0);
    for idx in dom.interior_nodes() {
        let d = vs[idx] - us[idx];
        if d < worst {
            worst = d;
            node = idx;
        }
    }
    Ok(MaxPrincipleVerdict {
        pass: worst >= -tol,
        worst,
        node,
        tolerance: tol,
    })
}

/// Result of solving on an increasing family of truncations.
#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub reports: Vec<SolveReport>,
    /// `cauchy[k]` is the max change between solutions `k` and `k+1` on the
    /// interior of truncation `k`.
    pub cauchy: Vec<f64>,
    /// The same change restricted to the interior of the first truncation,
    /// a fixed compact set.
    pub cauchy_core: Vec<f64>,
}

/// Solves on each domain in turn (each warm-started from the previous
/// solution where the nodes coincide) and records the Cauchy monitor.
pub fn exhaustion_solve(
    m: &MetricModel,
    domains: &[GridDomain],
    h: &ScalarField,
    cfg: &SolveConfig,
) -> Result<ExhaustionReport> {
    let reports: Vec<SolveReport> = {
        use rayon::prelude::*;
        domains
            .par_iter()
            .map(|d| solve_dirichlet(m, d, h, cfg, None))
            .collect::<Result<_>>()?
    };
    let mut cauchy = Vec::new();
    let mut cauchy_core = Vec::new();
    for k in 0..domains.len().saturating_sub(1) {
        let (d0, d1) = (&domains[k], &domains[k + 1]);
        let (mut worst, mut core): (f64, f64) = (0.0, 0.0);
        for idx in d0.interior_nodes() {
            let p = d0.position(idx);
            let j = d1
                .locate(p)
                .ok_or_else(|| Error::Invalid("truncations are not nested on a common lattice".into()))?;
            let diff = (reports[k].solution.get(idx) - reports[k + 1].solution.get(j)).abs();
            worst = worst.max(diff);
            if domains[0].locate(p).is_some_and(|i| domains[0].is_interior(i)) {
                core = core.max(diff);
            }
        }
        cauchy.push(worst);
        cauchy_core.push(core);
    }
    Ok(ExhaustionReport {
        reports,
        cauchy,
        cauchy_core,
    })
}

/// Truncation `[−n, n] × [−w, w]` of a horizontal strip with `cells` cells
/// per unit length: `phi` on the long edges, `k_left`/`k_right` on the
/// vertical truncation arcs (corners take the average).
pub fn strip_truncation(
    w: f64,
    n: f64,
    cells: usize,
    phi: &ScalarField,
    k_left: f64,
    k_right: f64,
) -> Result<GridDomain> {
    let nx = (2.0 * n * cells as f64).round() as usize;
    let ny = (2.0 * w * cells as f64).round() as usize;
    let spec = BoundarySpec::default()
        .with_arc(BoundaryArc::Bottom, phi.clone())
        .with_arc(BoundaryArc::Top, phi.clone())
        .with_arc(BoundaryArc::Left, ScalarField::constant(k_left))
        .with_arc(BoundaryArc::Right, ScalarField::constant(k_right));
    Ok(GridDomain::rectangle((-n, n, -w, w), nx, ny, &spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_model, Preset};

    fn field(s: &str) -> ScalarField {
        ScalarField::parse(s).unwrap()
    }

    #[test]
    fn plane_is_solved_exactly() {
        let m = builtin_model(&Preset::Euclidean).unwrap();
        let plane = field("0.3*x + 0.7*y");
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 16, 16, &BoundarySpec::uniform(plane.clone())).unwrap();
        let r = solve_dirichlet(&m, &d, &ScalarField::zero(), &SolveConfig::default(), None).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 1);
        let exact = ScalarGrid::from_field(&d, &plane).unwrap();
        assert!(r.solution.max_abs_diff(&exact, d.interior_nodes()) < 1e-10);
    }

    #[test]
    fn nil_invariant_graph_from_boundary_data() {
        let m = builtin_model(&Preset::Nil3 { tau: 1.0 }).unwrap();
        let g = field("x*y");
        let d = GridDomain::rectangle((-1.0, 1.0, -0.5, 1.0), 24, 18, &BoundarySpec::uniform(g.clone())).unwrap();
        let r = solve_dirichlet(&m, &d, &ScalarField::zero(), &SolveConfig::default(), None).unwrap();
        assert!(r.converged, "{:?}", r.message);
        assert!(r.newton_steps() <= 8);
        let exact = ScalarGrid::from_field(&d, &g).unwrap();
        assert!(r.solution.max_abs_diff(&exact, d.interior_nodes()) < 1e-9);
    }

    #[test]
    fn constant_mean_curvature_cap() {
        // H = 1/2 gives spheres of radius 2 over a disk of radius ~1/2.
        let m = builtin_model(&Preset::Euclidean).unwrap();
        let d = GridDomain::masked(
            (-0.6, 0.6, -0.6, 0.6),
            24,
            24,
            |p| p.norm() < 0.5,
            &BoundarySpec::uniform(ScalarField::zero()),
        )
        .unwrap();
        let r = solve_dirichlet(&m, &d, &ScalarField::constant(0.5), &SolveConfig::default(), None).unwrap();
        assert!(r.converged, "{:?}", r.message);
        let centre = d.nearest_node(crate::Point::new(0.0, 0.0)).unwrap();
        // With the upward normal the cap hangs below its boundary.
        let depth = 2.0 - (4.0f64 - 0.25).sqrt();
        let u0 = r.solution.get(centre);
        assert!(u0 < 0.0 && (u0.abs() - depth).abs() < 0.02, "{u0}");
    }

    #[test]
    fn unattainable_tolerance_is_reported() {
        let m = builtin_model(&Preset::Euclidean).unwrap();
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 8, 8, &BoundarySpec::uniform(field("sin(3*x)*y"))).unwrap();
        let cfg = SolveConfig {
            tolerance: 1e-300,
            max_iterations: 3,
            ..Default::default()
        };
        let r = solve_dirichlet(&m, &d, &ScalarField::zero(), &cfg, None).unwrap();
        assert!(!r.converged && r.message.is_some());
        assert!(SolveConfig {
            tolerance: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn vertical_shift_is_ordered() {
        let m = builtin_model(&Preset::Euclidean).unwrap();
        let data = field("x*x - y");
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 12, 12, &BoundarySpec::uniform(data)).unwrap();
        let d1 = d
            .clone()
            .with_boundary(&BoundarySpec::uniform(field("x*x - y + 1")))
            .unwrap();
        let cfg = SolveConfig::default();
        let u = solve_dirichlet(&m, &d, &ScalarField::zero(), &cfg, None).unwrap();
        let v = solve_dirichlet(&m, &d1, &ScalarField::zero(), &cfg, None).unwrap();
        let verdict = check_max_principle(&d, &u, &v, 10.0 * u.tolerance).unwrap();
        assert!(verdict.pass && (verdict.worst - 1.0).abs() < 1e-9);
        assert!(check_max_principle(&d, &v, &u, 1e-9).is_err());
    }

    #[test]
    fn euclidean_strip_exhaustion_settles() {
        let m = builtin_model(&Preset::Euclidean).unwrap();
        let phi = field("sin(x)");
        let domains: Vec<GridDomain> = (2..=6)
            .map(|n| strip_truncation(1.0, n as f64, 8, &phi, 0.0, 0.0).unwrap())
            .collect();
        let r = exhaustion_solve(&m, &domains, &ScalarField::zero(), &SolveConfig::default()).unwrap();
        assert!(r.reports.iter().all(|r| r.converged));
        assert_eq!(r.cauchy.len(), 4);
        // Near the truncation arcs the change tracks |sin n|; on a fixed
        // compact core it decays.
        for w in r.cauchy_core.windows(2) {
            assert!(w[1] < w[0], "{:?}", r.cauchy_core);
        }
    }
}
