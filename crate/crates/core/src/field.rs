//! Scalar fields on a chart: constants, parsed expressions, closed forms
//! with hand-coded partials, and bilinear samples on a grid.

use std::fmt;
use std::sync::Arc;

use crate::expr::{fd4, parse_expr, EvalError, Expr, ParseError};

/// A point of the coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Symmetric Hessian stored as `[f_xx, f_xy, f_yy]`.
pub type Hessian = [f64; 3];

/// Anything that can be evaluated as a scalar function of chart points.
///
/// Derivatives default to fourth-order central differences; implementors
/// with closed-form partials should override them.
pub trait Field: Send + Sync + fmt::Debug {
    fn value(&self, p: Point) -> Result<f64, EvalError>;

    fn gradient(&self, p: Point) -> Result<(f64, f64), EvalError> {
        let h = crate::expr::default_step(p);
        let f = |q: Point| self.value(q);
        Ok((fd4(&f, p, (1.0, 0.0), h)?, fd4(&f, p, (0.0, 1.0), h)?))
    }

    fn hessian(&self, p: Point) -> Result<Hessian, EvalError> {
        let h = 1e-3 * (1.0 + p.norm());
        let f = |q: Point| self.value(q);
        let second = |dir: (f64, f64)| -> Result<f64, EvalError> {
            let at = |k: f64| f(Point::new(p.x + k * h * dir.0, p.y + k * h * dir.1));
            Ok((-at(2.0)? + 16.0 * at(1.0)? - 30.0 * at(0.0)? + 16.0 * at(-1.0)? - at(-2.0)?) / (12.0 * h * h))
        };
        let fy = |q: Point| fd4(&f, q, (0.0, 1.0), h);
        let fxy = fd4(&fy, p, (1.0, 0.0), h)?;
        Ok([second((1.0, 0.0))?, fxy, second((0.0, 1.0))?])
    }

    fn constant_value(&self) -> Option<f64> {
        None
    }
}

/// Shared, immutable handle to a [`Field`].
#[derive(Clone)]
pub struct ScalarField(Arc<dyn Field>);

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl ScalarField {
    pub fn new(f: impl Field + 'static) -> Self {
        ScalarField(Arc::new(f))
    }

    pub fn constant(v: f64) -> Self {
        Self::new(Constant(v))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn from_expr(e: Expr) -> Self {
        Self::new(ExprField(e))
    }

    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(Self::from_expr(parse_expr(source)?))
    }

    /// Closed form with analytic first partials; the Hessian falls back to
    /// differences of `grad`.
    pub fn analytic(
        name: &'static str,
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self::new(Analytic {
            name,
            value: Box::new(value),
            grad: Box::new(grad),
        })
    }

    pub fn value(&self, p: Point) -> Result<f64, EvalError> {
        self.0.value(p)
    }

    pub fn gradient(&self, p: Point) -> Result<(f64, f64), EvalError> {
        self.0.gradient(p)
    }

    pub fn hessian(&self, p: Point) -> Result<Hessian, EvalError> {
        self.0.hessian(p)
    }

    /// Returns `Some(v)` if the field is a known constant.
    pub fn as_constant(&self) -> Option<f64> {
        self.0.constant_value()
    }
}

#[derive(Debug, Clone, Copy)]
struct Constant(f64);

impl Field for Constant {
    fn value(&self, _: Point) -> Result<f64, EvalError> {
        Ok(self.0)
    }
    fn gradient(&self, _: Point) -> Result<(f64, f64), EvalError> {
        Ok((0.0, 0.0))
    }
    fn hessian(&self, _: Point) -> Result<Hessian, EvalError> {
        Ok([0.0; 3])
    }
    fn constant_value(&self) -> Option<f64> {
        Some(self.0)
    }
}

#[derive(Debug, Clone)]
struct ExprField(Expr);

impl Field for ExprField {
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        self.0.eval(p)
    }
}

type ValueFn = Box<dyn Fn(Point) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(Point) -> (f64, f64) + Send + Sync>;

struct Analytic {
    name: &'static str,
    value: ValueFn,
    grad: GradFn,
}

impl fmt::Debug for Analytic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Analytic({})", self.name)
    }
}

fn finite(v: f64, what: &str, p: Point) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::domain(what, p))
    }
}

impl Field for Analytic {
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        finite((self.value)(p), self.name, p)
    }

    fn gradient(&self, p: Point) -> Result<(f64, f64), EvalError> {
        let (gx, gy) = (self.grad)(p);
        Ok((finite(gx, self.name, p)?, finite(gy, self.name, p)?))
    }

    fn hessian(&self, p: Point) -> Result<Hessian, EvalError> {
        let h = 1e-4 * (1.0 + p.norm());
        let gx = |q: Point| self.gradient(q).map(|g| g.0);
        let gy = |q: Point| self.gradient(q).map(|g| g.1);
        let xx = fd4(&gx, p, (1.0, 0.0), h)?;
        let yy = fd4(&gy, p, (0.0, 1.0), h)?;
        let xy = 0.5 * (fd4(&gx, p, (0.0, 1.0), h)? + fd4(&gy, p, (1.0, 0.0), h)?);
        Ok([xx, xy, yy])
    }
}

/// Bilinear interpolant of values on a uniform Cartesian lattice.
///
/// NaN samples mark holes; evaluating in a cell touching a hole, or outside
/// the lattice, is a domain error.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major with x fastest: `values[j * nx + i]`.
    pub values: Vec<f64>,
}

impl SampledField {
    fn cell(&self, p: Point) -> Result<(usize, usize, f64, f64), EvalError> {
        let fx = (p.x - self.x0) / self.hx;
        let fy = (p.y - self.y0) / self.hy;
        let slack = 1e-9;
        let maxx = (self.nx - 1) as f64;
        let maxy = (self.ny - 1) as f64;
        if !(fx >= -slack && fy >= -slack && fx <= maxx + slack && fy <= maxy + slack) {
            return Err(EvalError::domain("sample outside grid", p));
        }
        let fx = fx.clamp(0.0, maxx);
        let fy = fy.clamp(0.0, maxy);
        let i = (fx.floor() as usize).min(self.nx.saturating_sub(2));
        let j = (fy.floor() as usize).min(self.ny.saturating_sub(2));
        Ok((i, j, fx - i as f64, fy - j as f64))
    }

    fn corners(&self, p: Point, i: usize, j: usize) -> Result<[f64; 4], EvalError> {
        let at = |ii: usize, jj: usize| self.values[jj * self.nx + ii];
        let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
        if c.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::domain("sample in excluded cell", p));
        }
        Ok(c)
    }
}

impl Field for SampledField {
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        let (i, j, s, t) = self.cell(p)?;
        let [c00, c10, c01, c11] = self.corners(p, i, j)?;
        Ok((1.0 - t) * ((1.0 - s) * c00 + s * c10) + t * ((1.0 - s) * c01 + s * c11))
    }

    fn gradient(&self, p: Point) -> Result<(f64, f64), EvalError> {
        let (i, j, s, t) = self.cell(p)?;
        let [c00, c10, c01, c11] = self.corners(p, i, j)?;
        let gx = ((1.0 - t) * (c10 - c00) + t * (c11 - c01)) / self.hx;
        let gy = ((1.0 - s) * (c01 - c00) + s * (c11 - c10)) / self.hy;
        Ok((gx, gy))
    }
}

/// Connection component after a change of zero section:
/// `base + (∂d/∂x_k) / λ` with `k` the chosen coordinate.
#[derive(Debug, Clone)]
pub(crate) struct GaugeShifted {
    pub base: ScalarField,
    pub d: ScalarField,
    pub lambda: ScalarField,
    pub along_x: bool,
}

impl Field for GaugeShifted {
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        let (dx, dy) = self.d.gradient(p)?;
        let dk = if self.along_x { dx } else { dy };
        finite(self.base.value(p)? + dk / self.lambda.value(p)?, "gauge", p)
    }

    fn gradient(&self, p: Point) -> Result<(f64, f64), EvalError> {
        let (bx, by) = self.base.gradient(p)?;
        let (dx, dy) = self.d.gradient(p)?;
        let [dxx, dxy, dyy] = self.d.hessian(p)?;
        let l = self.lambda.value(p)?;
        let (lx, ly) = self.lambda.gradient(p)?;
        let (dk, dkx, dky) = if self.along_x { (dx, dxx, dxy) } else { (dy, dxy, dyy) };
        Ok((bx + dkx / l - dk * lx / (l * l), by + dky / l - dk * ly / (l * l)))
    }
}
