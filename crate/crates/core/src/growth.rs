//! Growth-rate functionals of Collin–Krust type.
//!
//! For a base point `p` and a domain `Ω`, `Λ(r)` is the part of the geodesic
//! circle of radius `r` about `p` (base metric `λ²(dx² + dy²)`) inside `Ω`.
//! The expansion rate is `L(r) = ∫_{Λ(r)} μ²` (plain) or
//! `∫_{Λ(r)} 2μ²/√(1 + μ²(a² + b²))` (weighted), and the growth rate is
//! `g(r) = ∫_{r₀}^r ds/L(s)`. Arc length on `Λ(r)` is measured in the base
//! metric, not the `μ`-weighted one.

use crate::dyadic::{self, DyadicReport};
use crate::expr::EvalError;
use crate::field::{Point, ScalarField};
use crate::grid::{GridDomain, ScalarGrid};
use crate::model::{MetricModel, Preset};
use crate::quadrature::gk15_adaptive;
use crate::radial::{penafiel_h, RadialError};
use crate::solver::{solve_dirichlet, SolveConfig, SolveReport};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Minimum number of samples of a circle inside the region for it to count.
pub const MIN_ARC_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("geodesic circle of radius {r} leaves the chart near ({}, {})", at.x, at.y)]
    ExitsChart { r: f64, at: Point },
    #[error("circle of radius {r} does not meet the domain")]
    EmptyArc { r: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Radial(#[from] RadialError),
}

type Result<T, E = GrowthError> = std::result::Result<T, E>;

/// The domain `Ω` that circles are intersected with.
#[derive(Debug, Clone)]
pub enum Region {
    Full,
    /// `nx·x + ny·y > offset`.
    HalfPlane {
        nx: f64,
        ny: f64,
        offset: f64,
    },
    /// Points at polar angle in `[from, from + width]` about `apex`.
    Wedge {
        apex: Point,
        from: f64,
        width: f64,
    },
    /// `|q − center| ≥ radius`.
    Exterior {
        center: Point,
        radius: f64,
    },
    /// `|y| ≤ half_width`.
    Strip {
        half_width: f64,
    },
    /// Points where the field is nonnegative.
    Field(ScalarField),
}

impl Region {
    pub fn contains(&self, q: Point) -> Result<bool, EvalError> {
        Ok(match self {
            Region::Full => true,
            Region::HalfPlane { nx, ny, offset } => nx * q.x + ny * q.y > *offset,
            Region::Wedge { apex, from, width } => {
                let th = (q.y - apex.y).atan2(q.x - apex.x);
                (th - from).rem_euclid(TAU) <= *width
            }
            Region::Exterior { center, radius } => (q.x - center.x).hypot(q.y - center.y) >= *radius,
            Region::Strip { half_width } => q.y.abs() <= *half_width,
            Region::Field(f) => f.value(q)? >= 0.0,
        })
    }
}

/// Samples of `Λ(r)` with base-metric arc-length weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arc {
    pub r: f64,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl Arc {
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn midpoint_angle(j: usize, n: usize) -> f64 {
    TAU * (j as f64 + 0.5) / n as f64
}

// Closed-form circle as (points, weights), if the model has one.
fn closed_form_circle(m: &MetricModel, p: Point, r: f64, n: usize) -> Option<(Vec<Point>, Vec<f64>)> {
    let uniform = |rad: f64, cx: f64, cy: f64, w: f64| {
        let pts = (0..n)
            .map(|j| {
                let a = midpoint_angle(j, n);
                Point::new(cx + rad * a.cos(), cy + rad * a.sin())
            })
            .collect();
        (pts, vec![w / n as f64; n])
    };
    if m.lambda.as_constant() == Some(1.0) {
        return Some(uniform(r, p.x, p.y, TAU * r));
    }
    match m.preset {
        Some(ref pr) if pr.is_hyperbolic_disk() && p.x == 0.0 && p.y == 0.0 => {
            Some(uniform((0.5 * r).tanh(), 0.0, 0.0, TAU * r.sinh()))
        }
        Some(Preset::Sol3HalfPlane) => {
            // Hyperbolic circle: euclidean centre (x₀, y₀ cosh r), radius y₀ sinh r.
            let (cy, rad) = (p.y * r.cosh(), p.y * r.sinh());
            let step = TAU / n as f64;
            let pts: Vec<Point> = (0..n)
                .map(|j| {
                    let a = midpoint_angle(j, n);
                    Point::new(p.x + rad * a.cos(), cy + rad * a.sin())
                })
                .collect();
            let w = pts.iter().map(|q| rad * step / q.y).collect();
            Some((pts, w))
        }
        _ => None,
    }
}

// Unit-speed geodesic of λ²(dx² + dy²) from p in direction `angle`, RK4.
fn trace_geodesic(m: &MetricModel, p: Point, angle: f64, r: f64, steps: usize) -> Result<Point> {
    let accel = |x: f64, y: f64, vx: f64, vy: f64| -> Result<(f64, f64)> {
        let q = Point::new(x, y);
        let l = m.lambda.value(q)?;
        let (lx, ly) = m.lambda.gradient(q)?;
        let (px, py) = (lx / l, ly / l);
        let dot = px * vx + py * vy;
        let v2 = vx * vx + vy * vy;
        Ok((-2.0 * dot * vx + v2 * px, -2.0 * dot * vy + v2 * py))
    };
    let l0 = m.lambda.value(p)?;
    let mut s = [p.x, p.y, angle.cos() / l0, angle.sin() / l0];
    let h = r / steps as f64;
    let deriv = |s: [f64; 4]| -> Result<[f64; 4]> {
        let (ax, ay) = accel(s[0], s[1], s[2], s[3])?;
        Ok([s[2], s[3], ax, ay])
    };
    let add = |s: [f64; 4], k: [f64; 4], f: f64| [s[0] + f * k[0], s[1] + f * k[1], s[2] + f * k[2], s[3] + f * k[3]];
    for _ in 0..steps {
        let k1 = deriv(s)?;
        let k2 = deriv(add(s, k1, 0.5 * h))?;
        let k3 = deriv(add(s, k2, 0.5 * h))?;
        let k4 = deriv(add(s, k3, h))?;
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let q = Point::new(s[0], s[1]);
        if !m.chart.contains(q, 0.0) {
            return Err(GrowthError::ExitsChart { r, at: q });
        }
    }
    Ok(Point::new(s[0], s[1]))
}

fn traced_circle(m: &MetricModel, p: Point, r: f64, n: usize) -> Result<(Vec<Point>, Vec<f64>)> {
    let steps = 256;
    let pts: Vec<Point> = (0..n)
        .into_par_iter()
        .map(|j| trace_geodesic(m, p, midpoint_angle(j, n), r, steps))
        .collect::<Result<_>>()?;
    let seg = |a: Point, b: Point| -> Result<f64> {
        let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        Ok(m.lambda.value(mid)? * (b.x - a.x).hypot(b.y - a.y))
    };
    let lens: Vec<f64> = (0..n).map(|j| seg(pts[j], pts[(j + 1) % n])).collect::<Result<_>>()?;
    let w = (0..n).map(|j| 0.5 * (lens[(j + n - 1) % n] + lens[j])).collect();
    Ok((pts, w))
}

/// Samples the geodesic circle of base radius `r` about `p` at `n_samples`
/// equally spaced directions and keeps the samples inside `region`.
///
/// Euclidean bases, the Poincaré disk about its origin and the hyperbolic
/// half-plane use closed forms; other bases are traced with RK4 (256 steps).
/// Cut-locus collisions are not detected.
pub fn geodesic_circle(m: &MetricModel, p: Point, r: f64, n_samples: usize, region: &Region) -> Result<Arc> {
    if !(r > 0.0) || !r.is_finite() || n_samples < 4 {
        return Err(GrowthError::Invalid(format!(
            "need r > 0 and at least 4 samples, got r = {r}, n = {n_samples}"
        )));
    }
    let (pts, w) = match closed_form_circle(m, p, r, n_samples) {
        Some(c) => c,
        None if !m.chart.contains(p, 0.0) => return Err(GrowthError::ExitsChart { r: 0.0, at: p }),
        None => traced_circle(m, p, r, n_samples)?,
    };
    if let Some(q) = pts.iter().find(|q| !m.chart.contains(**q, 1e-12 * (1.0 + r))) {
        return Err(GrowthError::ExitsChart { r, at: *q });
    }
    let mut arc = Arc {
        r,
        points: Vec::with_capacity(pts.len()),
        weights: Vec::with_capacity(pts.len()),
    };
    for (q, wq) in pts.into_iter().zip(w) {
        if region.contains(q)? {
            arc.points.push(q);
            arc.weights.push(wq);
        }
    }
    Ok(arc)
}

/// `∫_Λ μ²`.
pub fn l_plain(m: &MetricModel, arc: &Arc) -> Result<f64> {
    if arc.is_empty() {
        return Err(GrowthError::EmptyArc { r: arc.r });
    }
    let mut s = 0.0;
    for (q, w) in arc.points.iter().zip(&arc.weights) {
        let mu = m.mu.value(*q)?;
        s += w * mu * mu;
    }
    Ok(s)
}

/// `∫_Λ 2μ²/√(1 + μ²(a² + b²))`.
pub fn l_weighted(m: &MetricModel, arc: &Arc) -> Result<f64> {
    if arc.is_empty() {
        return Err(GrowthError::EmptyArc { r: arc.r });
    }
    let mut s = 0.0;
    for (q, w) in arc.points.iter().zip(&arc.weights) {
        let v = m.values(*q)?;
        let m2 = v.mu * v.mu;
        s += w * 2.0 * m2 / (1.0 + m2 * (v.a * v.a + v.b * v.b)).sqrt();
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Weighted,
}

#[derive(Debug, Clone)]
pub struct GrowthConfig {
    pub center: Point,
    /// Smallest radius tried; the profile starts at the first radius whose
    /// circle keeps [`MIN_ARC_SAMPLES`] samples in the region.
    pub r0: f64,
    pub r_max: f64,
    /// Radii, geometrically spaced.
    pub n_radii: usize,
    pub n_samples: usize,
    pub variant: Variant,
    pub region: Region,
}

impl GrowthConfig {
    pub fn new(r0: f64, r_max: f64) -> Self {
        GrowthConfig {
            center: Point::new(0.0, 0.0),
            r0,
            r_max,
            n_radii: 200,
            n_samples: 512,
            variant: Variant::Plain,
            region: Region::Full,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub center: Point,
    pub variant: Variant,
    pub radii: Vec<f64>,
    #[serde(skip)]
    pub arcs: Vec<Arc>,
    pub l_plain: Vec<f64>,
    pub l_weighted: Vec<f64>,
    /// `g(r_i)`, with `g(r_0) = 0`.
    pub g: Vec<f64>,
    /// `sup_{Λ(r_i)} |u − v|` when a solution pair was attached.
    pub m: Option<Vec<f64>>,
    pub windows: DyadicReport,
}

impl GrowthProfile {
    pub fn r0(&self) -> f64 {
        self.radii[0]
    }

    /// `g` interpolated linearly in `ln r`; `None` outside the sampled range.
    pub fn g_at(&self, r: f64) -> Option<f64> {
        interp_log(&self.radii, &self.g, r)
    }

    pub fn verdict(&self) -> dyadic::Verdict {
        self.windows.verdict
    }
}

fn interp_log(radii: &[f64], vals: &[f64], r: f64) -> Option<f64> {
    let (first, last) = (radii[0], radii[radii.len() - 1]);
    if !(r >= first * (1.0 - 1e-12) && r <= last * (1.0 + 1e-12)) {
        return None;
    }
    let i = radii.partition_point(|&q| q <= r).clamp(1, radii.len() - 1) - 1;
    let t = ((r / radii[i]).ln() / (radii[i + 1] / radii[i]).ln()).clamp(0.0, 1.0);
    Some(vals[i] + t * (vals[i + 1] - vals[i]))
}

/// Samples `L` on geometrically spaced radii and integrates `g` with the
/// trapezoid rule in `ln r`; classifies `g` by its dyadic-window increments.
pub fn g_of_r(m: &MetricModel, cfg: &GrowthConfig) -> Result<GrowthProfile> {
    if !(cfg.r0 > 0.0 && cfg.r_max > cfg.r0) || cfg.n_radii < 2 {
        return Err(GrowthError::Invalid(format!(
            "need 0 < r0 < r_max and two radii, got r0 = {}, r_max = {}, n = {}",
            cfg.r0, cfg.r_max, cfg.n_radii
        )));
    }
    let n = cfg.n_radii;
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                cfg.r_max
            } else {
                cfg.r0 * (cfg.r_max / cfg.r0).powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    let arcs: Vec<Arc> = radii
        .par_iter()
        .map(|&r| geodesic_circle(m, cfg.center, r, cfg.n_samples, &cfg.region))
        .collect::<Result<_>>()?;
    let start = arcs
        .iter()
        .position(|a| a.points.len() >= MIN_ARC_SAMPLES)
        .ok_or(GrowthError::EmptyArc { r: cfg.r_max })?;
    let (radii, arcs) = (radii[start..].to_vec(), arcs[start..].to_vec());
    if radii.len() < 2 {
        return Err(GrowthError::Invalid("fewer than two radii meet the region".into()));
    }
    let ls: Vec<(f64, f64)> = arcs
        .par_iter()
        .map(|a| Ok((l_plain(m, a)?, l_weighted(m, a)?)))
        .collect::<Result<_>>()?;
    let (l_plain_v, l_weighted_v): (Vec<f64>, Vec<f64>) = ls.into_iter().unzip();
    let l = match cfg.variant {
        Variant::Plain => &l_plain_v,
        Variant::Weighted => &l_weighted_v,
    };
    let mut g = Vec::with_capacity(radii.len());
    g.push(0.0);
    for i in 1..radii.len() {
        let f0 = radii[i - 1] / l[i - 1];
        let f1 = radii[i] / l[i];
        g.push(g[i - 1] + 0.5 * (f0 + f1) * (radii[i] / radii[i - 1]).ln());
    }
    let edges = dyadic::window_edges(radii[0], cfg.r_max);
    let at = |r: f64| interp_log(&radii, &g, r).unwrap_or(f64::NAN);
    let increments = edges.windows(2).map(|w| at(w[1]) - at(w[0])).collect();
    let windows = dyadic::classify(radii[0], increments);
    Ok(GrowthProfile {
        center: cfg.center,
        variant: cfg.variant,
        radii,
        arcs,
        l_plain: l_plain_v,
        l_weighted: l_weighted_v,
        g,
        m: None,
        windows,
    })
}

/// Least-squares fit of `M(r) = sup_Λ(r) |u − v|` against `g(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollinKrustFit {
    /// `M` per profile radius; NaN where the circle misses the grid.
    pub m: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Slope positive and bounded away from zero.
    pub positive: bool,
}

const SLOPE_FLOOR: f64 = 1e-8;

/// Evaluates `M` on the arcs of `profile` by interpolating two solutions on
/// `dom`, then fits `M ≈ slope·g + intercept`.
pub fn collin_krust_rate(
    dom: &GridDomain,
    u: &ScalarGrid,
    v: &ScalarGrid,
    profile: &GrowthProfile,
) -> Result<CollinKrustFit> {
    let m: Vec<f64> = profile
        .arcs
        .iter()
        .map(|arc| {
            arc.points
                .iter()
                .filter_map(|&q| Some((u.interpolate(dom, q)? - v.interpolate(dom, q)?).abs()))
                .fold(f64::NAN, f64::max)
        })
        .collect();
    let pts: Vec<(f64, f64)> = profile
        .g
        .iter()
        .zip(&m)
        .filter(|(_, mi)| !mi.is_nan())
        .map(|(g, mi)| (*g, *mi))
        .collect();
    if pts.len() < 2 {
        return Err(GrowthError::Invalid(
            "fewer than two circles meet the solution grid".into(),
        ));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let scale = pts.iter().fold(1.0f64, |a, p| a.max(p.1.abs()));
    Ok(CollinKrustFit {
        m,
        slope,
        intercept: my - slope * mx,
        positive: slope > SLOPE_FLOOR * scale,
    })
}

/// Output of [`collin_krust_experiment`].
#[derive(Debug, Clone)]
pub struct PairExperiment {
    pub u: SolveReport,
    pub v: SolveReport,
    pub profile: GrowthProfile,
    pub fit: CollinKrustFit,
}

/// Solves the same equation for two boundary data on one lattice and fits
/// `sup_Λ(r) |u − v|` against `g(r)`.
pub fn collin_krust_experiment(
    m: &MetricModel,
    dom_u: &GridDomain,
    dom_v: &GridDomain,
    h: &ScalarField,
    solve: &SolveConfig,
    growth: &GrowthConfig,
) -> crate::Result<PairExperiment> {
    if dom_u.lattice != dom_v.lattice || dom_u.kinds != dom_v.kinds {
        return Err(crate::Error::Invalid("solution pair must share a grid".into()));
    }
    let (u, v) = rayon::join(
        || solve_dirichlet(m, dom_u, h, solve, None),
        || solve_dirichlet(m, dom_v, h, solve, None),
    );
    let (u, v) = (u?, v?);
    let mut profile = g_of_r(m, growth)?;
    let fit = collin_krust_rate(dom_u, &u.solution, &v.solution, &profile)?;
    profile.m = Some(fit.m.clone());
    Ok(PairExperiment { u, v, profile, fit })
}

/// Translation terms `x_t⁰ = 0`, `x_tⁱ = exp(x_t^{i−1})`.
pub fn translation(n: u32) -> f64 {
    (0..n).fold(0.0, |t, _| f64::exp(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IteratedLog {
    /// `f_n(x) = Π_{i≤n} a_i(x + x_tⁿ)`, `a_0 = id`, `a_i = log a_{i−1}`.
    pub f: f64,
    /// Antiderivative of `1/f_n`: the `(n+1)`-fold logarithm of `x + x_tⁿ`.
    pub g: f64,
}

pub fn iterated_log(n: u32, x: f64) -> Result<IteratedLog> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GrowthError::Invalid(format!("iterated log needs x > 0, got {x}")));
    }
    let mut a = x + translation(n);
    let mut f = 1.0;
    for i in 0..=n {
        if i > 0 {
            a = a.ln();
        }
        if !(a > 0.0) {
            return Err(EvalError::domain("iterated log", Point::new(x, 0.0)).into());
        }
        f *= a;
    }
    Ok(IteratedLog { f, g: a.ln() })
}

/// Dyadic-window verdict for `∫ dx/f_n` on `[x0, x_max]`.
pub fn iterated_log_windows(n: u32, x0: f64, x_max: f64) -> Result<DyadicReport> {
    let edges = dyadic::window_edges(x0, x_max);
    let g: Vec<f64> = edges
        .iter()
        .map(|&x| Ok(iterated_log(n, x)?.g))
        .collect::<Result<_>>()?;
    Ok(dyadic::classify(x0, g.windows(2).map(|w| w[1] - w[0]).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeBound {
    /// `sup_Λ(ρ) μ` on the `Sol₃` disk model.
    pub t: f64,
    /// `[2π − (θ₁ + θ₂)] sinh ρ`.
    pub length_bound: f64,
    /// `1/(T² · length_bound)`, a lower bound for `g′(ρ)`.
    pub integrand: f64,
}

/// Bounds for the `Sol₃` wedge of half-angles `θ₁, θ₂` about the boundary
/// point where `μ` blows up, at hyperbolic radius `ρ`.
pub fn sol3_wedge_bound(theta1: f64, theta2: f64, rho: f64) -> Result<WedgeBound> {
    let ok = |t: f64| t > 0.0 && t < PI;
    if !ok(theta1) || !ok(theta2) || !(rho > 0.0) || !rho.is_finite() {
        return Err(GrowthError::Invalid(format!(
            "need angles in (0, π) and ρ > 0, got θ1 = {theta1}, θ2 = {theta2}, ρ = {rho}"
        )));
    }
    let th = theta1.min(theta2);
    let t = rho.tanh();
    let big_t = (1.0 - t * t) / (1.0 + t * t - 2.0 * t * th.cos());
    let length_bound = (TAU - (theta1 + theta2)) * rho.sinh();
    Ok(WedgeBound {
        t: big_t,
        length_bound,
        integrand: 1.0 / (big_t * big_t * length_bound),
    })
}

/// Dyadic-window verdict for the lower-bound integrand on `[ρ₀, ρ_max]`.
pub fn sol3_wedge_windows(theta1: f64, theta2: f64, rho0: f64, rho_max: f64) -> Result<DyadicReport> {
    let edges = dyadic::window_edges(rho0, rho_max);
    let f = |r: f64| sol3_wedge_bound(theta1, theta2, r).map(|b| b.integrand);
    let mut inc = Vec::with_capacity(edges.len());
    for w in edges.windows(2) {
        inc.push(gk15_adaptive(f, w[0], w[1], 0.0, 1e-12, 2000)?.value);
    }
    Ok(dyadic::classify(rho0, inc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// `Λ(r)` of bounded length, normalized to 1.
    BoundedWidth,
    /// Full circles, `Length(Λ(r)) = 2π sinh r`.
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct E1TauSample {
    pub r: f64,
    /// `∫_{r₀}^r g′`.
    pub g: f64,
    /// `√(1 + h(r)) / (2 Length(Λ(r)))`.
    pub g_prime: f64,
    /// Exact leading coefficient of `g` for bounded width: `½√((1+4τ²)/(1−4H²))`
    /// of `r` when `H < ½`, `√(1+4τ²)/2` of `e^{r/2}` when `H = ½`. Zero for
    /// exterior domains, where `g` converges.
    pub coefficient: f64,
    /// The simpler upper bound `½ + √((H²+τ²)/(1−4H²))` for `H < ½`; equal to
    /// `coefficient` otherwise.
    pub bound_coefficient: f64,
    /// `coefficient · r` or `coefficient · e^{r/2}`.
    pub asymptote: f64,
}

/// Growth rate of the difference of two `H`-graphs over `𝔼(−1, τ)` measured
/// against the rotational entire `H`-graph.
pub fn e1tau_growth(h: f64, tau: f64, kind: DomainKind, r0: f64, r: f64) -> Result<E1TauSample> {
    if !(0.0..=0.5).contains(&h) {
        return Err(GrowthError::Invalid(format!("H = {h} must lie in [0, 1/2]")));
    }
    if !(r0 >= 0.0 && r >= r0) || !r.is_finite() {
        return Err(GrowthError::Invalid(format!("need 0 ≤ r0 ≤ r, got r0 = {r0}, r = {r}")));
    }
    let gp = |s: f64| -> Result<f64, RadialError> {
        let hh = if s > 0.0 { penafiel_h(h, tau, s)? } else { 0.0 };
        let len = match kind {
            DomainKind::BoundedWidth => 1.0,
            DomainKind::Exterior => TAU * s.sinh(),
        };
        Ok((1.0 + hh).sqrt() / (2.0 * len))
    };
    let g = if r > r0 {
        gk15_adaptive(gp, r0, r, 0.0, 1e-12, 4000)?.value
    } else {
        0.0
    };
    let (coefficient, bound_coefficient, asymptote) = match kind {
        DomainKind::Exterior => (0.0, 0.0, 0.0),
        DomainKind::BoundedWidth if h < 0.5 => {
            let d = 1.0 - 4.0 * h * h;
            let c = 0.5 * ((1.0 + 4.0 * tau * tau) / d).sqrt();
            (c, 0.5 + ((h * h + tau * tau) / d).sqrt(), c * r)
        }
        DomainKind::BoundedWidth => {
            let c = 0.5 * (1.0 + 4.0 * tau * tau).sqrt();
            (c, c, c * (0.5 * r).exp())
        }
    };
    Ok(E1TauSample {
        r,
        g,
        g_prime: gp(r)?,
        coefficient,
        bound_coefficient,
        asymptote,
    })
}
