//! Local model of a Killing submersion,
//! `ds² = λ²(dx² + dy²) + μ²[dz − λ(a dx + b dy)]²`,
//! with the built-in presets, bundle curvature, gauge changes and μ-lengths.

use std::fmt;

use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::field::{GaugeShifted, Point, ScalarField};
use crate::quadrature::gl5_adaptive;

/// Distance kept from singular loci of the built-in charts.
pub const CHART_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("bad parameters for `{preset}`: {message}")]
    BadParams { preset: String, message: String },
    #[error("degenerate chart: {0}")]
    DegenerateChart(String),
    #[error("{field} is not positive at ({x}, {y})", x = .at.x, y = .at.y)]
    NotPositive { field: &'static str, at: Point },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid polyline: {0}")]
    BadPolyline(String),
}

/// Coordinate chart of a model. Disks and annuli are centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chart {
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
}

impl Chart {
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Chart::Rectangle { x0, x1, y0, y1 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            Chart::Rectangle { x0, x1, y0, y1 } => x1 > x0 && y1 > y0,
            Chart::Disk { radius } => radius > 0.0,
            Chart::Annulus { r_in, r_out } => r_in >= 0.0 && r_out > r_in,
        };
        let finite = match *self {
            Chart::Rectangle { x0, x1, y0, y1 } => [x0, x1, y0, y1].iter().all(|v| v.is_finite()),
            Chart::Disk { radius } => radius.is_finite(),
            Chart::Annulus { r_in, r_out } => r_in.is_finite() && r_out.is_finite(),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(ModelError::DegenerateChart(format!("{self:?}")))
        }
    }

    /// Closed-chart membership with tolerance `slack`.
    pub fn contains(&self, p: Point, slack: f64) -> bool {
        match *self {
            Chart::Rectangle { x0, x1, y0, y1 } => {
                p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack
            }
            Chart::Disk { radius } => p.norm() <= radius + slack,
            Chart::Annulus { r_in, r_out } => {
                let r = p.norm();
                r >= r_in - slack && r <= r_out + slack
            }
        }
    }

    /// A 17x17 (or polar 17x32) sample of the chart shrunk by the margin.
    pub fn samples(&self) -> Vec<Point> {
        let n = 16;
        let mut out = Vec::new();
        match *self {
            Chart::Rectangle { x0, x1, y0, y1 } => {
                let (x0, x1) = shrink(x0, x1);
                let (y0, y1) = shrink(y0, y1);
                for j in 0..=n {
                    for i in 0..=n {
                        let s = i as f64 / n as f64;
                        let t = j as f64 / n as f64;
                        out.push(Point::new(x0 + s * (x1 - x0), y0 + t * (y1 - y0)));
                    }
                }
            }
            Chart::Disk { .. } | Chart::Annulus { .. } => {
                let (r_in, r_out) = match *self {
                    Chart::Disk { radius } => (0.0, radius),
                    Chart::Annulus { r_in, r_out } => (r_in, r_out),
                    Chart::Rectangle { .. } => unreachable!(),
                };
                let (lo, hi) = shrink(r_in, r_out);
                let lo = if r_in == 0.0 { 0.0 } else { lo };
                for i in 0..=n {
                    let r = lo + (hi - lo) * i as f64 / n as f64;
                    for k in 0..32 {
                        let th = std::f64::consts::TAU * k as f64 / 32.0;
                        out.push(Point::new(r * th.cos(), r * th.sin()));
                    }
                }
            }
        }
        out
    }
}

fn shrink(lo: f64, hi: f64) -> (f64, f64) {
    let m = CHART_MARGIN * (1.0 + lo.abs().max(hi.abs()));
    (lo + m, hi - m)
}

/// Built-in ambient geometries.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Euclidean,
    Nil3 {
        tau: f64,
    },
    Sol3HalfPlane,
    Sol3Disk,
    EMinus1Tau {
        tau: f64,
    },
    /// Radial Killing length given as an expression (normally in `r`).
    WarpedPlane {
        mu: String,
    },
}

impl Preset {
    /// Looks a preset up by its config name.
    pub fn from_name(name: &str, params: &[f64], mu: Option<&str>) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::BadParams {
            preset: name.to_string(),
            message: m.to_string(),
        };
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("expected {n} parameter(s), got {}", params.len())))
            }
        };
        let tau = || {
            want(1)?;
            if params[0].is_finite() {
                Ok(params[0])
            } else {
                Err(bad("tau must be finite"))
            }
        };
        match name {
            "euclidean" => want(0).map(|_| Preset::Euclidean),
            "nil3" => Ok(Preset::Nil3 { tau: tau()? }),
            "sol3-halfplane" => want(0).map(|_| Preset::Sol3HalfPlane),
            "sol3-disk" => want(0).map(|_| Preset::Sol3Disk),
            "e-minus1-tau" => Ok(Preset::EMinus1Tau { tau: tau()? }),
            "warped-plane" => {
                want(0)?;
                let mu = mu.ok_or_else(|| bad("missing mu expression"))?;
                Ok(Preset::WarpedPlane { mu: mu.to_string() })
            }
            other => Err(ModelError::UnknownPreset(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Euclidean => "euclidean",
            Preset::Nil3 { .. } => "nil3",
            Preset::Sol3HalfPlane => "sol3-halfplane",
            Preset::Sol3Disk => "sol3-disk",
            Preset::EMinus1Tau { .. } => "e-minus1-tau",
            Preset::WarpedPlane { .. } => "warped-plane",
        }
    }

    /// Chart used when none is given: the whole (truncated) plane, the
    /// upper half-plane, the unit disk minus the margin, or `r ≥ 1` for
    /// warped planes (radial profiles start at `r = 1`).
    pub fn default_chart(&self) -> Chart {
        const BIG: f64 = 1e6;
        match self {
            Preset::Euclidean | Preset::Nil3 { .. } => Chart::rectangle(-BIG, BIG, -BIG, BIG),
            Preset::WarpedPlane { .. } => Chart::Annulus { r_in: 1.0, r_out: BIG },
            Preset::Sol3HalfPlane => Chart::rectangle(-BIG, BIG, CHART_MARGIN, BIG),
            Preset::Sol3Disk | Preset::EMinus1Tau { .. } => Chart::Disk {
                radius: 1.0 - CHART_MARGIN,
            },
        }
    }

    /// Whether the base is the Poincaré disk `λ = 2/(1 − r²)`.
    pub fn is_hyperbolic_disk(&self) -> bool {
        matches!(self, Preset::Sol3Disk | Preset::EMinus1Tau { .. })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Nil3 { tau } | Preset::EMinus1Tau { tau } => write!(f, "{}({tau})", self.name()),
            Preset::WarpedPlane { mu } => write!(f, "warped-plane({mu})"),
            _ => f.write_str(self.name()),
        }
    }
}

/// The data (λ, μ, a, b) on a chart.
#[derive(Debug, Clone)]
pub struct MetricModel {
    pub chart: Chart,
    pub lambda: ScalarField,
    pub mu: ScalarField,
    pub a: ScalarField,
    pub b: ScalarField,
    /// Set for built-in models; closed-form geodesics are keyed off it.
    pub preset: Option<Preset>,
}

/// The four model fields evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelValues {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
}

impl MetricModel {
    /// Builds a model after checking the chart and sampling λ, μ > 0.
    pub fn new(
        chart: Chart,
        lambda: ScalarField,
        mu: ScalarField,
        a: ScalarField,
        b: ScalarField,
    ) -> Result<Self, ModelError> {
        let m = MetricModel {
            chart,
            lambda,
            mu,
            a,
            b,
            preset: None,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), ModelError> {
        self.chart.validate()?;
        for p in self.chart.samples() {
            let v = self.values(p)?;
            if !(v.lambda > 0.0) {
                return Err(ModelError::NotPositive { field: "lambda", at: p });
            }
            if !(v.mu > 0.0) {
                return Err(ModelError::NotPositive { field: "mu", at: p });
            }
        }
        Ok(())
    }

    pub fn values(&self, p: Point) -> Result<ModelValues, EvalError> {
        Ok(ModelValues {
            lambda: self.lambda.value(p)?,
            mu: self.mu.value(p)?,
            a: self.a.value(p)?,
            b: self.b.value(p)?,
        })
    }

    /// Replaces the chart, re-running the positivity check.
    pub fn with_chart(mut self, chart: Chart) -> Result<Self, ModelError> {
        check_chart_for_preset(self.preset.as_ref(), &chart)?;
        self.chart = chart;
        self.validate()?;
        Ok(self)
    }

    /// Whether (a, b) vanish identically (known only for constant fields).
    pub fn connection_is_zero(&self) -> bool {
        self.a.as_constant() == Some(0.0) && self.b.as_constant() == Some(0.0)
    }
}

fn check_chart_for_preset(preset: Option<&Preset>, chart: &Chart) -> Result<(), ModelError> {
    let Some(preset) = preset else {
        return Ok(());
    };
    let bad = |m: String| ModelError::BadParams {
        preset: preset.name().to_string(),
        message: m,
    };
    match preset {
        Preset::Sol3HalfPlane => {
            let y_min = match *chart {
                Chart::Rectangle { y0, .. } => y0,
                _ => -1.0,
            };
            if y_min <= 0.0 {
                return Err(bad("chart must lie in the upper half-plane y > 0".into()));
            }
        }
        Preset::Sol3Disk | Preset::EMinus1Tau { .. } => {
            let reach = match *chart {
                Chart::Rectangle { x0, x1, y0, y1 } => x0.abs().max(x1.abs()).hypot(y0.abs().max(y1.abs())),
                Chart::Disk { radius } => radius,
                Chart::Annulus { r_out, .. } => r_out,
            };
            if reach >= 1.0 {
                return Err(bad(format!("chart reaches radius {reach}, outside the unit disk")));
            }
        }
        _ => {}
    }
    Ok(())
}

fn disk_lambda() -> ScalarField {
    ScalarField::analytic(
        "2/(1-r^2)",
        |p| 2.0 / (1.0 - p.x * p.x - p.y * p.y),
        |p| {
            let l = 2.0 / (1.0 - p.x * p.x - p.y * p.y);
            (l * l * p.x, l * l * p.y)
        },
    )
}

fn linear(name: &'static str, cx: f64, cy: f64) -> ScalarField {
    ScalarField::analytic(name, move |p| cx * p.x + cy * p.y, move |_| (cx, cy))
}

/// Builds a preset on its default chart.
pub fn builtin_model(preset: &Preset) -> Result<MetricModel, ModelError> {
    builtin_model_on(preset, preset.default_chart())
}

/// Builds a preset on `chart`.
pub fn builtin_model_on(preset: &Preset, chart: Chart) -> Result<MetricModel, ModelError> {
    check_chart_for_preset(Some(preset), &chart)?;
    let one = ScalarField::constant(1.0);
    let zero = ScalarField::zero();
    let (lambda, mu, a, b) = match preset {
        Preset::Euclidean => (one.clone(), one, zero.clone(), zero),
        Preset::Nil3 { tau } => (
            one.clone(),
            one,
            linear("-tau*y", 0.0, -tau),
            linear("tau*x", *tau, 0.0),
        ),
        Preset::Sol3HalfPlane => (
            ScalarField::analytic("1/y", |p| 1.0 / p.y, |p| (0.0, -1.0 / (p.y * p.y))),
            ScalarField::analytic("y", |p| p.y, |_| (0.0, 1.0)),
            zero.clone(),
            zero,
        ),
        Preset::Sol3Disk => (
            disk_lambda(),
            ScalarField::analytic(
                "(1-r^2)/((x-1)^2+y^2)",
                |p| (1.0 - p.x * p.x - p.y * p.y) / ((p.x - 1.0).powi(2) + p.y * p.y),
                |p| {
                    let n = 1.0 - p.x * p.x - p.y * p.y;
                    let d = (p.x - 1.0).powi(2) + p.y * p.y;
                    let d2 = d * d;
                    (
                        (-2.0 * p.x * d - n * 2.0 * (p.x - 1.0)) / d2,
                        (-2.0 * p.y * d - n * 2.0 * p.y) / d2,
                    )
                },
            ),
            zero.clone(),
            zero,
        ),
        Preset::EMinus1Tau { tau } => (
            disk_lambda(),
            one,
            linear("-2*tau*y", 0.0, -2.0 * tau),
            linear("2*tau*x", 2.0 * tau, 0.0),
        ),
        Preset::WarpedPlane { mu } => (one, ScalarField::parse(mu)?, zero.clone(), zero),
    };
    let mut m = MetricModel::new(chart, lambda, mu, a, b)?;
    m.preset = Some(preset.clone());
    Ok(m)
}

/// Bundle curvature `τ = (μ / 2λ²)[(λb)_x − (λa)_y]` at `p`.
pub fn tau_of_model(m: &MetricModel, p: Point) -> Result<f64, EvalError> {
    let v = m.values(p)?;
    let (lx, ly) = m.lambda.gradient(p)?;
    let (_, ay) = m.a.gradient(p)?;
    let (bx, _) = m.b.gradient(p)?;
    let curl = lx * v.b + v.lambda * bx - ly * v.a - v.lambda * ay;
    Ok(v.mu / (2.0 * v.lambda * v.lambda) * curl)
}

/// Changes the zero section by `d`: `ã = a + d_x/λ`, `b̃ = b + d_y/λ`.
pub fn gauge_change(m: &MetricModel, d: &ScalarField) -> MetricModel {
    if d.as_constant().is_some() {
        return m.clone();
    }
    let shift = |base: &ScalarField, along_x| {
        ScalarField::new(GaugeShifted {
            base: base.clone(),
            d: d.clone(),
            lambda: m.lambda.clone(),
            along_x,
        })
    };
    MetricModel {
        chart: m.chart,
        lambda: m.lambda.clone(),
        mu: m.mu.clone(),
        a: shift(&m.a, true),
        b: shift(&m.b, false),
        preset: None,
    }
}

/// Ordered chart points, optionally closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Point>, closed: bool) -> Result<Self, ModelError> {
        if points.len() < 2 {
            return Err(ModelError::BadPolyline("need at least 2 points".into()));
        }
        let n = points.len();
        let pairs = if closed { n } else { n - 1 };
        for k in 0..pairs {
            if points[k] == points[(k + 1) % n] {
                return Err(ModelError::BadPolyline(format!("repeated point at index {k}")));
            }
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ModelError::BadPolyline("non-finite coordinate".into()));
        }
        Ok(Polyline { points, closed })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Polyline {
            points,
            closed: self.closed,
        }
    }
}

/// μ-length of one straight segment.
pub fn segment_mu_length(m: &MetricModel, p: Point, q: Point) -> Result<f64, EvalError> {
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let speed = dx.hypot(dy);
    gl5_adaptive(
        |t| {
            let z = Point::new(p.x + t * dx, p.y + t * dy);
            Ok(m.mu.value(z)? * m.lambda.value(z)? * speed)
        },
        0.0,
        1.0,
        1e-10,
    )
}

/// Length of `c` in the metric `μ² λ² |dz|²`.
pub fn mu_length(m: &MetricModel, c: &Polyline) -> Result<f64, EvalError> {
    c.segments().map(|(p, q)| segment_mu_length(m, p, q)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    A,
    B,
    N,
}

/// Closed polygon with one label per edge (edge `k` joins vertex `k` to `k+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct JsPolygon {
    polyline: Polyline,
    labels: Vec<EdgeLabel>,
}

impl JsPolygon {
    pub fn new(vertices: Vec<Point>, labels: Vec<EdgeLabel>) -> Result<Self, ModelError> {
        let polyline = Polyline::new(vertices, true)?;
        if polyline.points.len() < 3 {
            return Err(ModelError::BadPolyline("polygon needs at least 3 vertices".into()));
        }
        if labels.len() != polyline.points.len() {
            return Err(ModelError::BadPolyline(format!(
                "{} labels for {} edges",
                labels.len(),
                polyline.points.len()
            )));
        }
        Ok(JsPolygon { polyline, labels })
    }

    pub fn polyline(&self) -> &Polyline {
        &self.polyline
    }

    pub fn labels(&self) -> &[EdgeLabel] {
        &self.labels
    }
}

/// Outcome of the length condition `2α < γ` and `2β < γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsVerdict {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub pass: bool,
}

pub fn js_check(m: &MetricModel, poly: &JsPolygon) -> Result<JsVerdict, EvalError> {
    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
    for ((p, q), label) in poly.polyline.segments().zip(&poly.labels) {
        let len = segment_mu_length(m, p, q)?;
        gamma += len;
        match label {
            EdgeLabel::A => alpha += len,
            EdgeLabel::B => beta += len,
            EdgeLabel::N => {}
        }
    }
    Ok(JsVerdict {
        alpha,
        beta,
        gamma,
        pass: 2.0 * alpha < gamma && 2.0 * beta < gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p: Preset) -> MetricModel {
        builtin_model(&p).unwrap()
    }

    #[test]
    fn preset_values() {
        let m = model(Preset::Nil3 { tau: 0.5 });
        let v = m.values(Point::new(1.0, 1.0)).unwrap();
        assert_eq!((v.lambda, v.mu, v.a, v.b), (1.0, 1.0, -0.5, 0.5));
        let v = model(Preset::Sol3HalfPlane).values(Point::new(0.0, 2.0)).unwrap();
        assert_eq!((v.lambda, v.mu), (0.5, 2.0));
        let v = model(Preset::Euclidean).values(Point::new(3.0, -7.0)).unwrap();
        assert_eq!((v.lambda, v.mu, v.a, v.b), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn preset_lookup_errors() {
        assert!(matches!(
            Preset::from_name("hyperbolic", &[], None),
            Err(ModelError::UnknownPreset(_))
        ));
        assert!(Preset::from_name("nil3", &[], None).is_err());
        assert!(Preset::from_name("warped-plane", &[], None).is_err());
        let disk = Preset::Sol3Disk;
        assert!(builtin_model_on(&disk, Chart::rectangle(-0.9, 0.9, -0.9, 0.9)).is_err());
        assert!(builtin_model_on(&disk, Chart::rectangle(-0.5, 0.5, -0.5, 0.5)).is_ok());
        assert!(builtin_model_on(&Preset::Sol3HalfPlane, Chart::rectangle(0.0, 1.0, -1.0, 1.0)).is_err());
    }

    #[test]
    fn warped_plane_needs_positive_mu() {
        let p = Preset::WarpedPlane { mu: "r".into() };
        let whole = Chart::rectangle(-1.0, 1.0, -1.0, 1.0);
        assert!(matches!(
            builtin_model_on(&p, whole),
            Err(ModelError::NotPositive { field: "mu", .. })
        ));
        assert!(builtin_model(&p).is_ok());
        assert!(builtin_model_on(&p, Chart::Annulus { r_in: 1.0, r_out: 2.0 }).is_ok());
    }

    #[test]
    fn disk_partials_match_differences() {
        for preset in [Preset::Sol3Disk, Preset::EMinus1Tau { tau: 0.3 }] {
            let m = model(preset);
            for p in [Point::new(0.3, -0.2), Point::new(-0.5, 0.4)] {
                for f in [&m.lambda, &m.mu] {
                    let g = f.gradient(p).unwrap();
                    let h = 1e-6;
                    let fx = (f.value(Point::new(p.x + h, p.y)).unwrap() - f.value(Point::new(p.x - h, p.y)).unwrap())
                        / (2.0 * h);
                    let fy = (f.value(Point::new(p.x, p.y + h)).unwrap() - f.value(Point::new(p.x, p.y - h)).unwrap())
                        / (2.0 * h);
                    assert!((g.0 - fx).abs() < 1e-6 * (1.0 + fx.abs()));
                    assert!((g.1 - fy).abs() < 1e-6 * (1.0 + fy.abs()));
                }
            }
        }
    }

    #[test]
    fn tau_examples() {
        let p = Point::new(0.5, 0.0);
        assert!((tau_of_model(&model(Preset::Nil3 { tau: 0.5 }), p).unwrap() - 0.5).abs() < 1e-6);
        assert!((tau_of_model(&model(Preset::EMinus1Tau { tau: 1.0 }), p).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(tau_of_model(&model(Preset::Sol3Disk), p).unwrap(), 0.0);
    }

    #[test]
    fn gauge_examples() {
        let e = model(Preset::Euclidean);
        let g = gauge_change(&e, &ScalarField::parse("x*y").unwrap());
        let p = Point::new(0.7, -1.1);
        let v = g.values(p).unwrap();
        assert!((v.a - p.y).abs() < 1e-8 && (v.b - p.x).abs() < 1e-8);

        let n = model(Preset::Nil3 { tau: 0.5 });
        let g = gauge_change(&n, &ScalarField::parse("-0.5*x*y").unwrap());
        let v = g.values(p).unwrap();
        assert!((v.a - (-2.0 * 0.5 * p.y)).abs() < 1e-8 && v.b.abs() < 1e-8);
        assert!((tau_of_model(&g, p).unwrap() - 0.5).abs() < 1e-6);

        let same = gauge_change(&n, &ScalarField::zero());
        assert_eq!(same.values(p).unwrap(), n.values(p).unwrap());
    }

    #[test]
    fn mu_length_examples() {
        let e = model(Preset::Euclidean);
        let seg = Polyline::new(vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0)], false).unwrap();
        assert!((mu_length(&e, &seg).unwrap() - 1.0).abs() < 1e-12);
        let s = model(Preset::Sol3HalfPlane);
        let seg = Polyline::new(vec![Point::new(0.0, 1.0), Point::new(0.0, 2.0)], false).unwrap();
        assert!((mu_length(&s, &seg).unwrap() - 1.0).abs() < 1e-12);
        let sq = Polyline::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            true,
        )
        .unwrap();
        assert!((mu_length(&model(Preset::Nil3 { tau: 0.8 }), &sq).unwrap() - 4.0).abs() < 1e-12);
        assert!(Polyline::new(vec![Point::new(0.0, 0.0)], false).is_err());
        assert!(Polyline::new(vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0)], false).is_err());
    }

    #[test]
    fn js_examples() {
        let e = model(Preset::Euclidean);
        let sq = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        use EdgeLabel::*;
        let v = js_check(&e, &JsPolygon::new(sq.clone(), vec![A, N, N, N]).unwrap()).unwrap();
        assert!(v.pass && (v.alpha - 1.0).abs() < 1e-12 && (v.gamma - 4.0).abs() < 1e-12);
        let v = js_check(&e, &JsPolygon::new(sq.clone(), vec![A, N, A, N]).unwrap()).unwrap();
        assert!(!v.pass && (v.alpha - 2.0).abs() < 1e-12);
        let v = js_check(&e, &JsPolygon::new(sq.clone(), vec![N; 4]).unwrap()).unwrap();
        assert!(v.pass && v.alpha == 0.0 && v.beta == 0.0);
        assert!(JsPolygon::new(sq, vec![N; 3]).is_err());
    }
}
