//! Prescribed mean curvature Killing graphs over two-dimensional bases.
//!
//! A Killing submersion is described in local coordinates by a metric
//! `ds² = λ²(dx² + dy²) + μ²[dz − λ(a dx + b dy)]²` ([`model`]). A graph
//! `z = u(x, y)` has mean curvature
//! `H = (1/2μ) div(μ² Gu / W)` with `Gu = (u_x/λ − a, u_y/λ − b)` and
//! `W = √(1 + μ²|Gu|²)`; [`solver`] solves the Dirichlet problem for this
//! operator on grids, [`radial`] integrates rotational families, and
//! [`growth`] evaluates the growth-rate functionals used in height
//! estimates.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dyadic;
pub mod expr;
pub mod field;
pub mod grid;
pub mod growth;
pub mod linalg;
pub mod model;
pub mod nil;
pub mod operator;
pub mod quadrature;
pub mod radial;
pub mod singularity;
pub mod solver;

use thiserror::Error;

pub use expr::{eval_field, grad_field, parse_expr, EvalError, Expr, ParseError};
pub use field::{Point, ScalarField};
pub use grid::{BoundaryArc, BoundarySpec, GridDomain, JumpRule, NodeKind, RadialGrading, ScalarGrid};
pub use model::{builtin_model, builtin_model_on, gauge_change, tau_of_model, Chart, MetricModel, Preset};
pub use solver::{solve_dirichlet, SolveConfig, SolveReport};

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Grid(#[from] grid::GridError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Radial(#[from] radial::RadialError),
    #[error(transparent)]
    Growth(#[from] growth::GrowthError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
