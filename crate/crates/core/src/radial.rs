//! Rotational minimal graphs over the exterior of the unit disk in a warped
//! plane `ℝ² ×_μ ℝ` with radial fiber length `μ(r)`, and the rotational
//! constant mean curvature profile of `𝔼(−1, τ)`.
//!
//! The radial family is `u_c(r) = ∫_{r₀}^r ds / √(c s² μ(s)⁴ − μ(s)²)` for
//! `c ≥ 1`. Radial fields are evaluated at `(r, 0)`.

use crate::dyadic::{self, DyadicReport, Verdict};
use crate::expr::EvalError;
use crate::field::{Point, ScalarField};
use crate::quadrature::gk15_adaptive;
use serde::Serialize;
use thiserror::Error;

pub const ABS_TOL: f64 = 1e-10;
// Per-segment tolerance, so that the accumulated profile stays within ABS_TOL.
const SEGMENT_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadialError {
    #[error("slope is vertical at r = {r} (radicand {radicand:e})")]
    Vertical { r: f64, radicand: f64 },
    #[error("c = {c} is invalid: radicand is negative at r = {r}")]
    InvalidC { c: f64, r: f64 },
    #[error("invalid range: {0}")]
    Range(String),
    #[error("quadrature did not reach tolerance on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn mu_at(mu: &ScalarField, r: f64) -> Result<f64, EvalError> {
    mu.value(Point::new(r, 0.0))
}

/// `c r² μ⁴ − μ²`, factored to limit cancellation near the vertical point.
fn radicand(c: f64, r: f64, mu: &ScalarField) -> Result<f64, EvalError> {
    let m = mu_at(mu, r)?;
    let m2 = m * m;
    Ok(m2 * (c * r * r * m2 - 1.0))
}

/// `du/dr` of the increasing branch.
pub fn radial_slope(c: f64, r: f64, mu: &ScalarField) -> Result<f64, RadialError> {
    let q = radicand(c, r, mu)?;
    if q > 0.0 {
        Ok(1.0 / q.sqrt())
    } else {
        Err(RadialError::Vertical { r, radicand: q })
    }
}

/// Sampled profile `u_c` on `[r₀, r₁]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub c: f64,
    pub r0: f64,
    /// `(r_i, u(r_i))`, starting with `(r₀, 0)`.
    pub samples: Vec<(f64, f64)>,
    /// `sup u = u(∞)` when the tail integral settles, `None` otherwise.
    pub sup: Option<f64>,
}

fn check_params(c: f64, r0: f64, mu: &ScalarField) -> Result<(), RadialError> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(RadialError::InvalidC { c, r: r0 });
    }
    if !(r0 >= 1.0) || !r0.is_finite() {
        return Err(RadialError::Range(format!("r0 = {r0} must be at least 1")));
    }
    let q = radicand(c, r0, mu)?;
    let m = mu_at(mu, r0)?;
    if q < -1e-12 * (m * m).max(1.0) {
        return Err(RadialError::InvalidC { c, r: r0 });
    }
    Ok(())
}

// Integrand of ∫ ds/√R after s = r₀ + t². Close to r₀ the radicand is
// dominated by rounding, so it is replaced by the secant through r₀ + η.
fn substituted(c: f64, r0: f64, mu: &ScalarField, t: f64) -> Result<f64, RadialError> {
    let s = r0 + t * t;
    let q = radicand(c, s, mu)?;
    let eta = 1e-7 * r0;
    if t * t < eta {
        let q0 = radicand(c, r0, mu)?;
        let qe = radicand(c, r0 + eta, mu)?;
        let slope = (qe - q0) / eta;
        let model = q0 + slope * t * t;
        if model > 0.0 {
            return Ok(2.0 * t / model.sqrt());
        }
    }
    if q > 0.0 {
        Ok(2.0 * t / q.sqrt())
    } else {
        Err(RadialError::InvalidC { c, r: s })
    }
}

/// `∫_{a}^{b} ds/√R(s)` for `r₀ ≤ a < b`, in the variable `t = √(s − r₀)`.
fn segment(c: f64, r0: f64, mu: &ScalarField, a: f64, b: f64) -> Result<f64, RadialError> {
    let (ta, tb) = ((a - r0).max(0.0).sqrt(), (b - r0).sqrt());
    let q = gk15_adaptive(|t| substituted(c, r0, mu, t), ta, tb, SEGMENT_TOL, 1e-14, MAX_PANELS)?;
    if !q.converged && q.error > ABS_TOL * 1e-2 {
        return Err(RadialError::Quadrature { a, b });
    }
    Ok(q.value)
}

/// `∫_{r}^{∞} ds/√R(s)` via `s = r/v`; `None` when the tail does not settle.
fn tail(c: f64, mu: &ScalarField, r: f64) -> Result<Option<f64>, RadialError> {
    let f = |v: f64| -> Result<f64, RadialError> {
        let s = r / v;
        let q = radicand(c, s, mu)?;
        if q.is_infinite() {
            return Ok(0.0);
        }
        if q > 0.0 {
            Ok(r / (v * v) / q.sqrt())
        } else {
            Err(RadialError::InvalidC { c, r: s })
        }
    };
    let q = gk15_adaptive(f, 0.0, 1.0, SEGMENT_TOL, 1e-13, 400)?;
    Ok((q.converged && q.value.is_finite()).then_some(q.value))
}

/// `u_c(r)` for a single radius.
pub fn radial_value(c: f64, mu: &ScalarField, r0: f64, r: f64) -> Result<f64, RadialError> {
    check_params(c, r0, mu)?;
    if r < r0 {
        return Err(RadialError::Range(format!("r = {r} lies below r0 = {r0}")));
    }
    if r == r0 {
        return Ok(0.0);
    }
    segment(c, r0, mu, r0, r)
}

/// Integrates `u_c` on `n_samples` equally spaced radii of `[r₀, r₁]`, with
/// `u(r₀) = 0`, and estimates `sup u` from the tail beyond `r₁`.
pub fn radial_profile(
    c: f64,
    mu: &ScalarField,
    r0: f64,
    r1: f64,
    n_samples: usize,
) -> Result<RadialProfile, RadialError> {
    check_params(c, r0, mu)?;
    if !(r1 > r0) || !r1.is_finite() {
        return Err(RadialError::Range(format!("need r1 > r0, got [{r0}, {r1}]")));
    }
    if n_samples < 2 {
        return Err(RadialError::Range("need at least two samples".into()));
    }
    let radii: Vec<f64> = (0..n_samples)
        .map(|i| {
            if i + 1 == n_samples {
                r1
            } else {
                r0 + (r1 - r0) * i as f64 / (n_samples - 1) as f64
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(n_samples);
    samples.push((r0, 0.0));
    let mut u = 0.0;
    for w in radii.windows(2) {
        u += segment(c, r0, mu, w[0], w[1])?;
        samples.push((w[1], u));
    }
    let sup = tail(c, mu, r1)?.map(|t| u + t);
    Ok(RadialProfile { c, r0, samples, sup })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl Boundedness {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundedness::Bounded => "bounded",
            Boundedness::Unbounded => "unbounded",
            Boundedness::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub verdict: Boundedness,
    /// Increments of `u` over the dyadic windows of `[r₀, r_max]`.
    pub windows: DyadicReport,
    /// Increments of the comparison integrand `1/(r μ² √c)` on the same windows.
    pub comparison: Vec<f64>,
}

/// Decides heuristically whether `u_c` stays bounded as `r → ∞` from its
/// growth over dyadic windows up to `r_max`.
pub fn boundedness_classify(mu: &ScalarField, c: f64, r0: f64, r_max: f64) -> Result<BoundednessReport, RadialError> {
    check_params(c, r0, mu)?;
    let edges = dyadic::window_edges(r0, r_max);
    if edges.len() < 2 {
        return Err(RadialError::Range(format!(
            "r_max = {r_max} leaves no window above r0 = {r0}"
        )));
    }
    let mut increments = Vec::with_capacity(edges.len() - 1);
    let mut comparison = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        increments.push(segment(c, r0, mu, w[0], w[1])?);
        let g = |r: f64| -> Result<f64, EvalError> {
            let m = mu_at(mu, r)?;
            Ok(1.0 / (r * m * m * c.sqrt()))
        };
        comparison.push(gk15_adaptive(g, w[0], w[1], 1e-14, 1e-12, MAX_PANELS)?.value);
    }
    let windows = dyadic::classify(r0, increments);
    let verdict = match windows.verdict {
        Verdict::Converges => Boundedness::Bounded,
        Verdict::Diverges => Boundedness::Unbounded,
        Verdict::Inconclusive => Boundedness::Inconclusive,
    };
    Ok(BoundednessReport {
        verdict,
        windows,
        comparison,
    })
}

fn check_penafiel(h: f64, tau: f64, rho: f64) -> Result<(), RadialError> {
    if !(0.0..=0.5).contains(&h) {
        return Err(RadialError::Range(format!("H = {h} must lie in [0, 1/2]")));
    }
    if !tau.is_finite() || !(rho > 0.0) || !rho.is_finite() {
        return Err(RadialError::Range(format!(
            "need finite tau and rho > 0, got tau = {tau}, rho = {rho}"
        )));
    }
    Ok(())
}

/// Slope `u′(ρ)` of the entire rotational graph of constant mean curvature
/// `H ∈ [0, ½]` in `𝔼(−1, τ)`, parametrized over the hyperbolic radius `ρ`.
pub fn penafiel_slope(h: f64, tau: f64, rho: f64) -> Result<f64, RadialError> {
    check_penafiel(h, tau, rho)?;
    let a = 2.0 * h * (rho.cosh() - 1.0);
    let t = (0.5 * rho).tanh();
    // sinh²ρ − a² = (cosh ρ − 1)[(1 − 4H²) cosh ρ + 1 + 4H²], free of cancellation.
    let cm1 = 2.0 * (0.5 * rho).sinh().powi(2);
    let q = cm1 * ((1.0 - 4.0 * h * h) * rho.cosh() + 1.0 + 4.0 * h * h);
    if !(q > 0.0) {
        return Err(RadialError::Vertical { r: rho, radicand: q });
    }
    Ok(a * (1.0 + 4.0 * tau * tau * t * t).sqrt() / q.sqrt())
}

/// `h(ρ) = 4(H² + τ²) tanh²(ρ/2) / (1 − 4H² tanh²(ρ/2))`, the squared norm of
/// the connection along the rotational profile.
pub fn penafiel_h(h: f64, tau: f64, rho: f64) -> Result<f64, RadialError> {
    check_penafiel(h, tau, rho)?;
    let t2 = (0.5 * rho).tanh().powi(2);
    let sech2 = (0.5 * rho).cosh().powi(-2);
    Ok(4.0 * (h * h + tau * tau) * t2 / (1.0 - 4.0 * h * h + 4.0 * h * h * sech2))
}
