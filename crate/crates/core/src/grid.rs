//! Lattices, node masks, Dirichlet data and grid functions.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::expr::EvalError;
use crate::field::{Point, ScalarField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("domain has no interior nodes")]
    NoInterior,
    #[error("interior node {node} at ({x}, {y}) has only {count} usable neighbours", x = .at.x, y = .at.y)]
    Degenerate { node: usize, at: Point, count: usize },
    #[error("boundary node {node} at ({x}, {y}) has no data", x = .at.x, y = .at.y)]
    MissingData { node: usize, at: Point },
    #[error("node {0} is not interior")]
    NotInterior(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialGrading {
    Uniform,
    /// `r_i = r_in + (r_out − r_in)(i/N)²`, clustering rings at the inner
    /// circle where radial profiles may have a vertical tangent.
    Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lattice {
    /// Nodes `(x0 + i hx, y0 + j hy)`, `i < nx`, `j < ny`, index `j * nx + i`.
    Cartesian {
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        nx: usize,
        ny: usize,
    },
    /// Rings `radii[i]` times angles `2πk/ntheta`, index `i * ntheta + k`;
    /// periodic in the angle.
    Polar { radii: Vec<f64>, ntheta: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryArc {
    Bottom,
    Right,
    Top,
    Left,
    Inner,
    Outer,
    /// Boundary of a masked domain.
    Mask,
}

impl BoundaryArc {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryArc::Bottom => "bottom",
            BoundaryArc::Right => "right",
            BoundaryArc::Top => "top",
            BoundaryArc::Left => "left",
            BoundaryArc::Inner => "inner",
            BoundaryArc::Outer => "outer",
            BoundaryArc::Mask => "mask",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            BoundaryArc::Bottom,
            BoundaryArc::Right,
            BoundaryArc::Top,
            BoundaryArc::Left,
            BoundaryArc::Inner,
            BoundaryArc::Outer,
            BoundaryArc::Mask,
        ]
        .into_iter()
        .find(|a| a.name() == s)
    }
}

/// Value taken at a node shared by two arcs (a rectangle corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JumpRule {
    #[default]
    Average,
    Prefer(BoundaryArc),
}

/// Dirichlet data: one field per arc, with a fallback for unlisted arcs.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub default: Option<ScalarField>,
    pub arcs: Vec<(BoundaryArc, ScalarField)>,
    pub jump: JumpRule,
}

impl BoundarySpec {
    pub fn uniform(f: ScalarField) -> Self {
        BoundarySpec {
            default: Some(f),
            ..Default::default()
        }
    }

    pub fn with_arc(mut self, arc: BoundaryArc, f: ScalarField) -> Self {
        self.arcs.push((arc, f));
        self
    }

    fn field_for(&self, arc: BoundaryArc) -> Option<&ScalarField> {
        self.arcs
            .iter()
            .find(|(a, _)| *a == arc)
            .map(|(_, f)| f)
            .or(self.default.as_ref())
    }

    fn value_at(&self, arcs: &[BoundaryArc], p: Point) -> Result<Option<f64>, EvalError> {
        if let JumpRule::Prefer(pref) = self.jump {
            if arcs.contains(&pref) {
                if let Some(f) = self.field_for(pref) {
                    return f.value(p).map(Some);
                }
            }
        }
        let mut sum = 0.0;
        let mut n = 0;
        for &arc in arcs {
            if let Some(f) = self.field_for(arc) {
                sum += f.value(p)?;
                n += 1;
            }
        }
        Ok((n > 0).then(|| sum / n as f64))
    }
}

/// A lattice with node classification and Dirichlet values.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub lattice: Lattice,
    pub kinds: Vec<NodeKind>,
    /// Dirichlet value at boundary nodes, NaN elsewhere.
    pub boundary_values: Vec<f64>,
    /// Arc labels of boundary nodes (two at rectangle corners).
    pub arcs: Vec<Vec<BoundaryArc>>,
    /// Excluded nodes removed from the interior by [`GridDomain::with_puncture`].
    pub punctures: Vec<usize>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        match self {
            Lattice::Cartesian { nx, ny, .. } => nx * ny,
            Lattice::Polar { radii, ntheta } => radii.len() * ntheta,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, idx: usize) -> Point {
        match *self {
            Lattice::Cartesian { x0, y0, hx, hy, nx, .. } => {
                Point::new(x0 + (idx % nx) as f64 * hx, y0 + (idx / nx) as f64 * hy)
            }
            Lattice::Polar { ref radii, ntheta } => {
                let r = radii[idx / ntheta];
                let th = self.theta(idx % ntheta);
                Point::new(r * th.cos(), r * th.sin())
            }
        }
    }

    pub fn theta(&self, k: usize) -> f64 {
        match self {
            Lattice::Polar { ntheta, .. } => TAU * k as f64 / *ntheta as f64,
            Lattice::Cartesian { .. } => 0.0,
        }
    }

    /// Lattice neighbours in the order east/outward, west/inward,
    /// north/counter-clockwise, south/clockwise.
    pub fn neighbours(&self, idx: usize) -> [Option<usize>; 4] {
        match *self {
            Lattice::Cartesian { nx, ny, .. } => {
                let (i, j) = (idx % nx, idx / nx);
                [
                    (i + 1 < nx).then(|| idx + 1),
                    (i > 0).then(|| idx - 1),
                    (j + 1 < ny).then(|| idx + nx),
                    (j > 0).then(|| idx - nx),
                ]
            }
            Lattice::Polar { ref radii, ntheta } => {
                let (i, k) = (idx / ntheta, idx % ntheta);
                let ring = i * ntheta;
                [
                    (i + 1 < radii.len()).then(|| idx + ntheta),
                    (i > 0).then(|| idx - ntheta),
                    Some(ring + (k + 1) % ntheta),
                    Some(ring + (k + ntheta - 1) % ntheta),
                ]
            }
        }
    }

    fn validate(&self) -> Result<(), GridError> {
        let bad = |m: &str| Err(GridError::Lattice(m.to_string()));
        match self {
            Lattice::Cartesian { x0, y0, hx, hy, nx, ny } => {
                if *nx < 3 || *ny < 3 {
                    return bad("need at least 3 nodes per direction");
                }
                if !(hx > &0.0 && hy > &0.0) || ![x0, y0, hx, hy].iter().all(|v| v.is_finite()) {
                    return bad("spacings must be positive and finite");
                }
            }
            Lattice::Polar { radii, ntheta } => {
                if radii.len() < 3 || *ntheta < 4 {
                    return bad("need at least 3 rings and 4 angles");
                }
                if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("radii must be positive and strictly increasing");
                }
                if !radii.iter().all(|r| r.is_finite()) {
                    return bad("radii must be finite");
                }
            }
        }
        Ok(())
    }
}

impl GridDomain {
    /// Rectangle `[x0,x1]×[y0,y1]` with `nx_cells × ny_cells` cells; the
    /// outer ring of nodes carries Dirichlet data.
    pub fn rectangle(
        (x0, x1, y0, y1): (f64, f64, f64, f64),
        nx_cells: usize,
        ny_cells: usize,
        spec: &BoundarySpec,
    ) -> Result<Self, GridError> {
        if nx_cells == 0 || ny_cells == 0 || !(x1 > x0) || !(y1 > y0) {
            return Err(GridError::Lattice("empty rectangle".into()));
        }
        let (nx, ny) = (nx_cells + 1, ny_cells + 1);
        let lattice = Lattice::Cartesian {
            x0,
            y0,
            hx: (x1 - x0) / nx_cells as f64,
            hy: (y1 - y0) / ny_cells as f64,
            nx,
            ny,
        };
        lattice.validate()?;
        let mut kinds = vec![NodeKind::Interior; nx * ny];
        let mut arcs = vec![Vec::new(); nx * ny];
        for idx in 0..nx * ny {
            let (i, j) = (idx % nx, idx / nx);
            let a = &mut arcs[idx];
            if j == 0 {
                a.push(BoundaryArc::Bottom);
            }
            if i == nx - 1 {
                a.push(BoundaryArc::Right);
            }
            if j == ny - 1 {
                a.push(BoundaryArc::Top);
            }
            if i == 0 {
                a.push(BoundaryArc::Left);
            }
            if !a.is_empty() {
                kinds[idx] = NodeKind::Boundary;
            }
        }
        Self::finish(lattice, kinds, arcs, spec)
    }

    /// Annulus `r_in ≤ r ≤ r_out` with `n_r` radial cells and `ntheta` angles.
    pub fn annulus(
        r_in: f64,
        r_out: f64,
        n_r: usize,
        ntheta: usize,
        grading: RadialGrading,
        spec: &BoundarySpec,
    ) -> Result<Self, GridError> {
        if n_r == 0 || !(r_out > r_in) {
            return Err(GridError::Lattice("empty annulus".into()));
        }
        let radii: Vec<f64> = (0..=n_r)
            .map(|i| {
                let s = i as f64 / n_r as f64;
                let s = match grading {
                    RadialGrading::Uniform => s,
                    RadialGrading::Quadratic => s * s,
                };
                if i == n_r {
                    r_out
                } else {
                    r_in + (r_out - r_in) * s
                }
            })
            .collect();
        Self::polar(radii, ntheta, spec)
    }

    /// Polar lattice on explicit rings; first ring is `Inner`, last `Outer`.
    pub fn polar(radii: Vec<f64>, ntheta: usize, spec: &BoundarySpec) -> Result<Self, GridError> {
        let n_rings = radii.len();
        let lattice = Lattice::Polar { radii, ntheta };
        lattice.validate()?;
        let n = lattice.len();
        let mut kinds = vec![NodeKind::Interior; n];
        let mut arcs = vec![Vec::new(); n];
        for idx in 0..n {
            let i = idx / ntheta;
            if i == 0 {
                arcs[idx].push(BoundaryArc::Inner);
            } else if i == n_rings - 1 {
                arcs[idx].push(BoundaryArc::Outer);
            } else {
                continue;
            }
            kinds[idx] = NodeKind::Boundary;
        }
        Self::finish(lattice, kinds, arcs, spec)
    }

    /// Cartesian lattice over `[x0,x1]×[y0,y1]` restricted to `inside`:
    /// nodes inside whose four neighbours exist are interior, the remaining
    /// nodes touching an interior node carry data (`Mask` arc), the rest are
    /// excluded.
    pub fn masked(
        (x0, x1, y0, y1): (f64, f64, f64, f64),
        nx_cells: usize,
        ny_cells: usize,
        inside: impl Fn(Point) -> bool,
        spec: &BoundarySpec,
    ) -> Result<Self, GridError> {
        if nx_cells == 0 || ny_cells == 0 || !(x1 > x0) || !(y1 > y0) {
            return Err(GridError::Lattice("empty rectangle".into()));
        }
        let (nx, ny) = (nx_cells + 1, ny_cells + 1);
        let lattice = Lattice::Cartesian {
            x0,
            y0,
            hx: (x1 - x0) / nx_cells as f64,
            hy: (y1 - y0) / ny_cells as f64,
            nx,
            ny,
        };
        lattice.validate()?;
        let n = lattice.len();
        let mut kinds = vec![NodeKind::Excluded; n];
        for (idx, kind) in kinds.iter_mut().enumerate() {
            let full = lattice.neighbours(idx).iter().all(Option::is_some);
            if full && inside(lattice.position(idx)) {
                *kind = NodeKind::Interior;
            }
        }
        let mut arcs = vec![Vec::new(); n];
        for idx in 0..n {
            if kinds[idx] != NodeKind::Excluded {
                continue;
            }
            let touches = lattice
                .neighbours(idx)
                .iter()
                .flatten()
                .any(|&q| kinds[q] == NodeKind::Interior);
            if touches {
                kinds[idx] = NodeKind::Boundary;
                arcs[idx].push(BoundaryArc::Mask);
            }
        }
        Self::finish(lattice, kinds, arcs, spec)
    }

    fn finish(
        lattice: Lattice,
        kinds: Vec<NodeKind>,
        arcs: Vec<Vec<BoundaryArc>>,
        spec: &BoundarySpec,
    ) -> Result<Self, GridError> {
        let mut boundary_values = vec![f64::NAN; kinds.len()];
        for idx in 0..kinds.len() {
            if kinds[idx] != NodeKind::Boundary {
                continue;
            }
            let p = lattice.position(idx);
            match spec.value_at(&arcs[idx], p)? {
                Some(v) => boundary_values[idx] = v,
                None => return Err(GridError::MissingData { node: idx, at: p }),
            }
        }
        let dom = GridDomain {
            lattice,
            kinds,
            boundary_values,
            arcs,
            punctures: Vec::new(),
        };
        dom.validate()?;
        Ok(dom)
    }

    /// Checks the mask and data invariants.
    pub fn validate(&self) -> Result<(), GridError> {
        let mut any = false;
        for idx in 0..self.len() {
            match self.kinds[idx] {
                NodeKind::Interior => {
                    any = true;
                    let count = self.usable_neighbours(idx).count();
                    if count < 2 {
                        return Err(GridError::Degenerate {
                            node: idx,
                            at: self.position(idx),
                            count,
                        });
                    }
                }
                NodeKind::Boundary => {
                    if !self.boundary_values[idx].is_finite() {
                        return Err(GridError::MissingData {
                            node: idx,
                            at: self.position(idx),
                        });
                    }
                }
                NodeKind::Excluded => {}
            }
        }
        if any {
            Ok(())
        } else {
            Err(GridError::NoInterior)
        }
    }

    /// Removes interior node `idx` from the problem (no equation, no data).
    pub fn with_puncture(mut self, idx: usize) -> Result<Self, GridError> {
        if self.kinds.get(idx) != Some(&NodeKind::Interior) {
            return Err(GridError::NotInterior(idx));
        }
        self.kinds[idx] = NodeKind::Excluded;
        self.punctures.push(idx);
        self.validate()?;
        Ok(self)
    }

    /// Replaces the Dirichlet values from a new spec, keeping the mask.
    pub fn with_boundary(mut self, spec: &BoundarySpec) -> Result<Self, GridError> {
        for idx in 0..self.len() {
            if self.kinds[idx] == NodeKind::Boundary {
                let p = self.position(idx);
                self.boundary_values[idx] = spec
                    .value_at(&self.arcs[idx], p)?
                    .ok_or(GridError::MissingData { node: idx, at: p })?;
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn position(&self, idx: usize) -> Point {
        self.lattice.position(idx)
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.kinds[idx] == NodeKind::Interior
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_interior(i))
    }

    /// Lattice neighbours that are not excluded.
    pub fn usable_neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.lattice
            .neighbours(idx)
            .into_iter()
            .flatten()
            .filter(|&q| self.kinds[q] != NodeKind::Excluded)
    }

    /// Index of the non-excluded node nearest to `p`.
    pub fn nearest_node(&self, p: Point) -> Option<usize> {
        (0..self.len())
            .filter(|&i| self.kinds[i] != NodeKind::Excluded)
            .min_by(|&a, &b| {
                let da = dist2(self.position(a), p);
                let db = dist2(self.position(b), p);
                da.total_cmp(&db)
            })
    }

    /// Non-excluded node sitting at `p` (to within a small fraction of the
    /// spacing), if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let idx = match self.lattice {
            Lattice::Cartesian { x0, y0, hx, hy, nx, ny } => {
                let fi = ((p.x - x0) / hx).round();
                let fj = ((p.y - y0) / hy).round();
                if fi < 0.0 || fj < 0.0 || fi >= nx as f64 || fj >= ny as f64 {
                    return None;
                }
                fj as usize * nx + fi as usize
            }
            Lattice::Polar { ref radii, ntheta } => {
                let r = p.norm();
                let i = (0..radii.len()).min_by(|&a, &b| (radii[a] - r).abs().total_cmp(&(radii[b] - r).abs()))?;
                let th = p.y.atan2(p.x).rem_euclid(TAU);
                let k = (th / (TAU / ntheta as f64)).round() as usize % ntheta;
                i * ntheta + k
            }
        };
        let q = self.position(idx);
        let close = dist2(p, q).sqrt() <= 1e-6 * self.spacing();
        (close && self.kinds[idx] != NodeKind::Excluded).then_some(idx)
    }

    /// Representative spacing: `max(hx, hy)` or the largest radial step.
    pub fn spacing(&self) -> f64 {
        match &self.lattice {
            Lattice::Cartesian { hx, hy, .. } => hx.max(*hy),
            Lattice::Polar { radii, .. } => radii.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max),
        }
    }
}

fn dist2(a: Point, b: Point) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

/// One real per lattice node; NaN at excluded nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub values: Vec<f64>,
}

impl ScalarGrid {
    /// Samples `f` at every non-excluded node.
    pub fn from_field(dom: &GridDomain, f: &ScalarField) -> Result<Self, EvalError> {
        let mut values = vec![f64::NAN; dom.len()];
        for (idx, v) in values.iter_mut().enumerate() {
            if dom.kinds[idx] != NodeKind::Excluded {
                *v = f.value(dom.position(idx))?;
            }
        }
        Ok(ScalarGrid { values })
    }

    /// Interior nodes take `interior`, boundary nodes their Dirichlet data.
    pub fn with_boundary_data(dom: &GridDomain, interior: f64) -> Self {
        let values = (0..dom.len())
            .map(|idx| match dom.kinds[idx] {
                NodeKind::Interior => interior,
                NodeKind::Boundary => dom.boundary_values[idx],
                NodeKind::Excluded => f64::NAN,
            })
            .collect();
        ScalarGrid { values }
    }

    /// Overwrites boundary nodes with the domain's Dirichlet data.
    pub fn impose_boundary(&mut self, dom: &GridDomain) {
        for idx in 0..dom.len() {
            match dom.kinds[idx] {
                NodeKind::Boundary => self.values[idx] = dom.boundary_values[idx],
                NodeKind::Excluded => self.values[idx] = f64::NAN,
                NodeKind::Interior => {}
            }
        }
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarGrid {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Bilinear interpolation, in `(r, θ)` on polar lattices. `None` outside
    /// the lattice or when a surrounding node carries no value.
    pub fn interpolate(&self, dom: &GridDomain, p: Point) -> Option<f64> {
        const SLACK: f64 = 1e-9;
        let (corners, s, t) = match dom.lattice {
            Lattice::Cartesian { x0, y0, hx, hy, nx, ny } => {
                let fi = (p.x - x0) / hx;
                let fj = (p.y - y0) / hy;
                let inside = |f: f64, n: usize| f >= -SLACK && f <= (n - 1) as f64 + SLACK;
                if !inside(fi, nx) || !inside(fj, ny) {
                    return None;
                }
                let i = (fi.floor().max(0.0) as usize).min(nx - 2);
                let j = (fj.floor().max(0.0) as usize).min(ny - 2);
                let c = j * nx + i;
                ([c, c + 1, c + nx, c + nx + 1], fi - i as f64, fj - j as f64)
            }
            Lattice::Polar { ref radii, ntheta } => {
                let r = p.norm();
                let (first, last) = (radii[0], radii[radii.len() - 1]);
                if r < first * (1.0 - SLACK) || r > last * (1.0 + SLACK) {
                    return None;
                }
                let i = radii.partition_point(|&q| q <= r).clamp(1, radii.len() - 1) - 1;
                let s = ((r - radii[i]) / (radii[i + 1] - radii[i])).clamp(0.0, 1.0);
                let ft = p.y.atan2(p.x).rem_euclid(TAU) / (TAU / ntheta as f64);
                let k = (ft.floor() as usize).min(ntheta - 1);
                let k1 = (k + 1) % ntheta;
                let (a, b) = (i * ntheta, (i + 1) * ntheta);
                ([a + k, b + k, a + k1, b + k1], s, ft - k as f64)
            }
        };
        let v: Vec<f64> = corners.iter().map(|&c| self.values[c]).collect();
        if v.iter().any(|x| x.is_nan()) {
            return None;
        }
        let (s, t) = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
        Some((1.0 - t) * ((1.0 - s) * v[0] + s * v[1]) + t * ((1.0 - s) * v[2] + s * v[3]))
    }

    /// Max `|self − other|` over the given nodes.
    pub fn max_abs_diff(&self, other: &ScalarGrid, nodes: impl Iterator<Item = usize>) -> f64 {
        nodes
            .map(|i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: &str) -> BoundarySpec {
        BoundarySpec::uniform(ScalarField::parse(f).unwrap())
    }

    #[test]
    fn interpolation_reproduces_bilinear_data() {
        let d = GridDomain::rectangle((-1.0, 1.0, 0.0, 2.0), 8, 8, &spec("0")).unwrap();
        let g = ScalarGrid::from_field(&d, &ScalarField::parse("1 + 2*x - y + x*y").unwrap()).unwrap();
        for &(x, y) in &[(0.3, 0.7), (-1.0, 0.0), (1.0, 2.0), (0.9999, 1.1)] {
            let v = g.interpolate(&d, Point::new(x, y)).unwrap();
            assert!((v - (1.0 + 2.0 * x - y + x * y)).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(&d, Point::new(1.5, 0.0)), None);

        let a = GridDomain::annulus(1.0, 3.0, 8, 16, RadialGrading::Quadratic, &spec("r")).unwrap();
        let g = ScalarGrid::from_field(&a, &ScalarField::parse("r").unwrap()).unwrap();
        for th in [0.0, 1.0, 3.0, 6.2] {
            let p = Point::new(2.2 * f64::cos(th), 2.2 * f64::sin(th));
            assert!((g.interpolate(&a, p).unwrap() - 2.2).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(&a, Point::new(0.5, 0.0)), None);
    }

    #[test]
    fn rectangle_layout() {
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 2.0), 4, 8, &spec("x + y")).unwrap();
        assert_eq!(d.len(), 5 * 9);
        assert_eq!(d.interior_nodes().count(), 3 * 7);
        let corner = 4;
        assert_eq!(d.arcs[corner], vec![BoundaryArc::Bottom, BoundaryArc::Right]);
        assert_eq!(d.position(5 * 9 - 1), Point::new(1.0, 2.0));
        assert_eq!(d.boundary_values[5 * 9 - 1], 3.0);
    }

    #[test]
    fn jump_rules_at_corners() {
        let s = BoundarySpec::default()
            .with_arc(BoundaryArc::Bottom, ScalarField::constant(0.0))
            .with_arc(BoundaryArc::Left, ScalarField::constant(1.0))
            .with_arc(BoundaryArc::Right, ScalarField::constant(1.0))
            .with_arc(BoundaryArc::Top, ScalarField::constant(1.0));
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 4, 4, &s).unwrap();
        assert_eq!(d.boundary_values[0], 0.5);
        assert_eq!(d.boundary_values[2], 0.0);
        let s = BoundarySpec {
            jump: JumpRule::Prefer(BoundaryArc::Bottom),
            ..s
        };
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 4, 4, &s).unwrap();
        assert_eq!(d.boundary_values[0], 0.0);
        let missing = BoundarySpec::default().with_arc(BoundaryArc::Bottom, ScalarField::zero());
        assert!(matches!(
            GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 4, 4, &missing),
            Err(GridError::MissingData { .. })
        ));
    }

    #[test]
    fn annulus_layout_and_grading() {
        let d = GridDomain::annulus(1.0, 2.0, 4, 8, RadialGrading::Quadratic, &spec("0")).unwrap();
        let Lattice::Polar { radii, ntheta } = &d.lattice else {
            panic!()
        };
        assert_eq!(*ntheta, 8);
        assert_eq!(radii, &vec![1.0, 1.0625, 1.25, 1.5625, 2.0]);
        assert_eq!(d.interior_nodes().count(), 3 * 8);
        let nb = d.lattice.neighbours(8);
        assert_eq!(nb, [Some(16), Some(0), Some(9), Some(15)]);
        let p = d.position(2 * 8 + 2);
        assert!((p.x).abs() < 1e-15 && (p.y - 1.25).abs() < 1e-15);
    }

    #[test]
    fn masked_disk() {
        let d = GridDomain::masked((-1.25, 1.25, -1.25, 1.25), 20, 20, |p| p.norm() < 1.0, &spec("x")).unwrap();
        for idx in d.interior_nodes() {
            assert!(d.position(idx).norm() < 1.0);
            for q in d.lattice.neighbours(idx).into_iter().flatten() {
                assert_ne!(d.kind(q), NodeKind::Excluded);
            }
        }
        let excluded = d.kinds.iter().filter(|k| **k == NodeKind::Excluded).count();
        assert!(excluded > 0);
    }

    #[test]
    fn puncture_and_degeneracy() {
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 4, 4, &spec("0")).unwrap();
        let mid = 2 * 5 + 2;
        let p = d.clone().with_puncture(mid).unwrap();
        assert_eq!(p.kind(mid), NodeKind::Excluded);
        assert!(matches!(d.clone().with_puncture(0), Err(GridError::NotInterior(0))));
        // Node 7 keeps only its boundary neighbour once 6, 8 and 12 are gone.
        let p = p.with_puncture(6).unwrap();
        assert!(matches!(p.with_puncture(8), Err(GridError::Degenerate { node: 7, .. })));
    }

    #[test]
    fn grids_sample_fields() {
        let d = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 2, 2, &spec("1")).unwrap();
        let g = ScalarGrid::from_field(&d, &ScalarField::parse("x*y").unwrap()).unwrap();
        assert_eq!(g.get(8), 1.0);
        let b = ScalarGrid::with_boundary_data(&d, 7.0);
        assert_eq!(b.get(4), 7.0);
        assert_eq!(b.get(0), 1.0);
    }
}
