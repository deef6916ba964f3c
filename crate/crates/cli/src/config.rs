//! JSON run configuration and its translation into library objects.

use std::collections::BTreeMap;
use std::path::PathBuf;

use killing_graph::growth::{GrowthConfig, Region, Variant};
use killing_graph::{
    builtin_model_on, BoundaryArc, BoundarySpec, Chart, GridDomain, JumpRule, MetricModel, Point, Preset,
    RadialGrading, ScalarField, SolveConfig,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Option<ModelSection>,
    pub domain: Option<DomainSection>,
    pub boundary: Option<BoundarySection>,
    /// Prescribed mean curvature, an expression in x, y, r.
    #[serde(default = "zero_expr")]
    pub h: String,
    #[serde(default)]
    pub solver: SolverSection,
    pub growth: Option<GrowthSection>,
    pub radial: Option<RadialSection>,
    /// Parameters of the selected experiment; shape depends on its name.
    pub experiment: Option<serde_json::Value>,
    /// Output directory, overridden by `--out`.
    pub out: Option<PathBuf>,
}

fn zero_expr() -> String {
    "0".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub preset: Option<String>,
    #[serde(default)]
    pub params: Vec<f64>,
    pub mu: Option<String>,
    pub lambda: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub chart: Option<ChartSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ChartSection {
    Rectangle([f64; 4]),
    Disk(f64),
    Annulus([f64; 2]),
}

impl From<ChartSection> for Chart {
    fn from(c: ChartSection) -> Chart {
        match c {
            ChartSection::Rectangle([x0, x1, y0, y1]) => Chart::rectangle(x0, x1, y0, y1),
            ChartSection::Disk(radius) => Chart::Disk { radius },
            ChartSection::Annulus([r_in, r_out]) => Chart::Annulus { r_in, r_out },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct DomainSection {
    #[serde(flatten)]
    pub shape: Shape,
    /// Node removed from the problem.
    pub puncture: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Rectangle {
        bounds: [f64; 4],
        cells: [usize; 2],
    },
    Annulus {
        r_in: f64,
        r_out: f64,
        n_r: usize,
        ntheta: usize,
        #[serde(default)]
        grading: Grading,
    },
    /// `[−length, length] × [−half_width, half_width]`.
    Strip {
        half_width: f64,
        length: f64,
        cells_per_unit: usize,
    },
    /// Sector of `radius` about `apex` between the angles `from` and
    /// `from + width`, on a square lattice of `cells` per side.
    Wedge {
        apex: [f64; 2],
        from: f64,
        width: f64,
        radius: f64,
        cells: usize,
    },
    /// Nodes of the lattice where `inside` is positive.
    Masked {
        bounds: [f64; 4],
        cells: [usize; 2],
        inside: String,
    },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Uniform,
    #[default]
    Quadratic,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub default: Option<String>,
    #[serde(default)]
    pub arcs: BTreeMap<String, String>,
    /// Arc whose data wins at shared corner nodes; averaged otherwise.
    pub prefer: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub armijo: Option<f64>,
    pub min_step: Option<f64>,
    pub linear_tolerance: Option<f64>,
    pub picard_after: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    #[serde(default)]
    pub center: [f64; 2],
    pub r0: f64,
    pub r_max: f64,
    pub n_radii: Option<usize>,
    pub n_samples: Option<usize>,
    #[serde(default)]
    pub variant: VariantName,
    pub region: Option<RegionSection>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantName {
    #[default]
    Plain,
    Weighted,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSection {
    Full,
    HalfPlane {
        normal: [f64; 2],
        offset: f64,
    },
    Wedge {
        apex: [f64; 2],
        from: f64,
        width: f64,
    },
    Exterior {
        center: [f64; 2],
        radius: f64,
    },
    Strip {
        half_width: f64,
    },
    /// Points where the expression is nonnegative.
    Field {
        expr: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSection {
    pub mu: String,
    pub c: Vec<f64>,
    #[serde(default = "one")]
    pub r0: f64,
    pub r1: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    /// When set, also classify boundedness on `[r0, r_max]`.
    pub r_max: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    101
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_field(what: &str, src: &str) -> Result<ScalarField, CliError> {
    ScalarField::parse(src).map_err(|e| cfg_err(format!("{what}: cannot parse {src:?}: {e}")))
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| cfg_err(format!("malformed config: {e}")))
    }

    pub fn model(&self) -> Result<MetricModel, CliError> {
        let sec = self
            .model
            .as_ref()
            .ok_or_else(|| cfg_err("missing \"model\" section"))?;
        let chart = sec.chart.map(Chart::from);
        if let Some(name) = &sec.preset {
            if sec.lambda.is_some() || sec.a.is_some() || sec.b.is_some() {
                return Err(cfg_err(
                    "model: give either a preset or explicit lambda/mu/a/b, not both",
                ));
            }
            let preset =
                Preset::from_name(name, &sec.params, sec.mu.as_deref()).map_err(|e| cfg_err(format!("model: {e}")))?;
            let chart = chart.unwrap_or_else(|| preset.default_chart());
            return builtin_model_on(&preset, chart).map_err(|e| cfg_err(format!("model: {e}")));
        }
        let get = |name: &str, v: &Option<String>| -> Result<ScalarField, CliError> {
            parse_field(
                &format!("model.{name}"),
                v.as_deref().ok_or_else(|| cfg_err(format!("model: missing {name}")))?,
            )
        };
        let chart = chart.ok_or_else(|| cfg_err("model: explicit models need a chart"))?;
        MetricModel::new(
            chart,
            get("lambda", &sec.lambda)?,
            get("mu", &sec.mu)?,
            get("a", &sec.a)?,
            get("b", &sec.b)?,
        )
        .map_err(|e| cfg_err(format!("model: {e}")))
    }

    pub fn h(&self) -> Result<ScalarField, CliError> {
        parse_field("h", &self.h)
    }

    pub fn boundary(&self) -> Result<BoundarySpec, CliError> {
        let sec = self
            .boundary
            .as_ref()
            .ok_or_else(|| cfg_err("missing \"boundary\" section"))?;
        boundary_spec(sec)
    }

    /// The domain with the configured boundary data and puncture.
    pub fn domain(&self) -> Result<GridDomain, CliError> {
        self.domain_with(&self.boundary()?)
    }

    pub fn domain_with(&self, spec: &BoundarySpec) -> Result<GridDomain, CliError> {
        let sec = self
            .domain
            .as_ref()
            .ok_or_else(|| cfg_err("missing \"domain\" section"))?;
        let dom = build_shape(&sec.shape, spec)?;
        match sec.puncture {
            None => Ok(dom),
            Some([x, y]) => {
                let idx = dom
                    .locate(Point::new(x, y))
                    .ok_or_else(|| cfg_err(format!("domain: puncture ({x}, {y}) is not a grid node")))?;
                dom.with_puncture(idx).map_err(|e| cfg_err(format!("domain: {e}")))
            }
        }
    }

    pub fn solver(&self) -> Result<SolveConfig, CliError> {
        let s = &self.solver;
        let d = SolveConfig::default();
        let cfg = SolveConfig {
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            tolerance: s.tolerance.unwrap_or(d.tolerance),
            armijo: s.armijo.unwrap_or(d.armijo),
            min_step: s.min_step.unwrap_or(d.min_step),
            linear_tolerance: s.linear_tolerance.unwrap_or(d.linear_tolerance),
            picard_after: s.picard_after.unwrap_or(d.picard_after),
        };
        cfg.validate().map_err(|e| cfg_err(format!("solver: {e}")))?;
        Ok(cfg)
    }

    pub fn growth(&self) -> Result<GrowthConfig, CliError> {
        let sec = self
            .growth
            .as_ref()
            .ok_or_else(|| cfg_err("missing \"growth\" section"))?;
        let mut g = GrowthConfig::new(sec.r0, sec.r_max);
        g.center = Point::new(sec.center[0], sec.center[1]);
        if let Some(n) = sec.n_radii {
            g.n_radii = n;
        }
        if let Some(n) = sec.n_samples {
            g.n_samples = n;
        }
        g.variant = match sec.variant {
            VariantName::Plain => Variant::Plain,
            VariantName::Weighted => Variant::Weighted,
        };
        g.region = match &sec.region {
            None | Some(RegionSection::Full) => Region::Full,
            Some(RegionSection::HalfPlane { normal, offset }) => Region::HalfPlane {
                nx: normal[0],
                ny: normal[1],
                offset: *offset,
            },
            Some(RegionSection::Wedge { apex, from, width }) => Region::Wedge {
                apex: Point::new(apex[0], apex[1]),
                from: *from,
                width: *width,
            },
            Some(RegionSection::Exterior { center, radius }) => Region::Exterior {
                center: Point::new(center[0], center[1]),
                radius: *radius,
            },
            Some(RegionSection::Strip { half_width }) => Region::Strip {
                half_width: *half_width,
            },
            Some(RegionSection::Field { expr }) => Region::Field(parse_field("growth.region", expr)?),
        };
        Ok(g)
    }

    /// Parameters of an experiment, with defaults for a missing section.
    pub fn experiment<T: serde::de::DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.experiment {
            None => Ok(T::default()),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| cfg_err(format!("experiment: {e}"))),
        }
    }
}

pub fn boundary_spec(sec: &BoundarySection) -> Result<BoundarySpec, CliError> {
    let arc =
        |name: &str| BoundaryArc::from_name(name).ok_or_else(|| cfg_err(format!("boundary: unknown arc {name:?}")));
    let mut spec = BoundarySpec::default();
    if let Some(d) = &sec.default {
        spec.default = Some(parse_field("boundary.default", d)?);
    }
    for (name, src) in &sec.arcs {
        spec = spec.with_arc(arc(name)?, parse_field(&format!("boundary.arcs.{name}"), src)?);
    }
    if let Some(p) = &sec.prefer {
        spec.jump = JumpRule::Prefer(arc(p)?);
    }
    Ok(spec)
}

fn build_shape(shape: &Shape, spec: &BoundarySpec) -> Result<GridDomain, CliError> {
    let grid = |r: Result<GridDomain, killing_graph::grid::GridError>| r.map_err(|e| cfg_err(format!("domain: {e}")));
    let bounds = |b: &[f64; 4]| (b[0], b[1], b[2], b[3]);
    match shape {
        Shape::Rectangle { bounds: b, cells } => grid(GridDomain::rectangle(bounds(b), cells[0], cells[1], spec)),
        Shape::Annulus {
            r_in,
            r_out,
            n_r,
            ntheta,
            grading,
        } => {
            let g = match grading {
                Grading::Uniform => RadialGrading::Uniform,
                Grading::Quadratic => RadialGrading::Quadratic,
            };
            grid(GridDomain::annulus(*r_in, *r_out, *n_r, *ntheta, g, spec))
        }
        Shape::Strip {
            half_width,
            length,
            cells_per_unit,
        } => {
            let nx = (2.0 * length * *cells_per_unit as f64).round() as usize;
            let ny = (2.0 * half_width * *cells_per_unit as f64).round() as usize;
            grid(GridDomain::rectangle(
                (-length, *length, -half_width, *half_width),
                nx,
                ny,
                spec,
            ))
        }
        Shape::Wedge {
            apex,
            from,
            width,
            radius,
            cells,
        } => {
            let region = Region::Wedge {
                apex: Point::new(apex[0], apex[1]),
                from: *from,
                width: *width,
            };
            let (ax, ay, rad) = (apex[0], apex[1], *radius);
            let b = (ax - rad, ax + rad, ay - rad, ay + rad);
            grid(GridDomain::masked(
                b,
                *cells,
                *cells,
                |p| (p.x - ax).hypot(p.y - ay) < rad && region.contains(p).unwrap_or(false),
                spec,
            ))
        }
        Shape::Masked {
            bounds: b,
            cells,
            inside,
        } => {
            let f = parse_field("domain.inside", inside)?;
            grid(GridDomain::masked(
                bounds(b),
                cells[0],
                cells[1],
                |p| f.value(p).is_ok_and(|v| v > 0.0),
                spec,
            ))
        }
    }
}
