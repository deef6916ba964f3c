//! Killing-graph geometry on grids: generalized gradient, area element,
//! angle function, and the conservative mean-curvature residual
//!
//! `F(u) = (1/λ²) div(μ² (∇u − λ(a, b)) / W) − 2μH`,
//!
//! discretized as a flux balance over the dual cell of each interior node.
//! Every lattice edge carries one flux `V = μ²(p − λ a_n)/W`, where `p` is
//! the difference quotient across the edge and `W` uses half-node averages
//! of λ, μ, a, b plus a tangential derivative averaged from the endpoints.

use rayon::prelude::*;

use crate::expr::EvalError;
use crate::field::ScalarField;
use crate::grid::{GridDomain, Lattice, NodeKind, ScalarGrid};
use crate::linalg::BandMatrix;
use crate::model::{MetricModel, ModelValues};

/// Linear stencil `Σ w_j u_j`.
pub type Stencil = Vec<(usize, f64)>;

/// Geometry of one lattice edge `a → b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Unit normal of the dual face, pointing from `a` to `b`.
    pub normal: (f64, f64),
    /// Lattice distance between `a` and `b`.
    pub normal_len: f64,
    /// Normal difference quotient; `(u_b − u_a)/normal_len` except on edges
    /// into a puncture, where it is extrapolated from the interior side.
    pub difference: Stencil,
    /// Length of the dual face crossed by the edge.
    pub face_len: f64,
    /// Derivative along `t = (−n_y, n_x)`, averaged over the endpoints.
    pub tangential: Stencil,
}

/// Edge list, dual-cell areas and incidence of a [`GridDomain`].
#[derive(Debug, Clone)]
pub struct Discretization {
    pub edges: Vec<Edge>,
    /// Dual-cell area per node (zero for non-interior nodes).
    pub cell_area: Vec<f64>,
    /// For each node, incident edges with sign +1 (node is `a`) or −1.
    pub incidence: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    /// Cartesian x or polar r.
    First,
    /// Cartesian y or polar arc length in θ.
    Second,
}

/// Derivative stencil at `idx` along a native lattice axis; central when
/// both neighbours are usable, one-sided with one, `None` with neither.
fn axis_stencil(dom: &GridDomain, idx: usize, axis: Axis) -> Option<Stencil> {
    let nb = dom.lattice.neighbours(idx);
    let usable = |q: Option<usize>| q.filter(|&q| dom.kind(q) != NodeKind::Excluded);
    let (fwd, bwd) = match axis {
        Axis::First => (usable(nb[0]), usable(nb[1])),
        Axis::Second => (usable(nb[2]), usable(nb[3])),
    };
    match (&dom.lattice, axis) {
        (Lattice::Cartesian { hx, hy, .. }, _) => {
            let h = if axis == Axis::First { *hx } else { *hy };
            match (fwd, bwd) {
                (Some(f), Some(b)) => Some(vec![(f, 0.5 / h), (b, -0.5 / h)]),
                (Some(f), None) => Some(vec![(f, 1.0 / h), (idx, -1.0 / h)]),
                (None, Some(b)) => Some(vec![(idx, 1.0 / h), (b, -1.0 / h)]),
                (None, None) => None,
            }
        }
        (Lattice::Polar { radii, ntheta }, Axis::First) => {
            let i = idx / ntheta;
            let r = |q: usize| radii[q / ntheta];
            match (fwd, bwd) {
                (Some(f), Some(b)) => {
                    let (h1, h2) = (radii[i] - r(b), r(f) - radii[i]);
                    Some(vec![
                        (b, -h2 / (h1 * (h1 + h2))),
                        (idx, (h2 - h1) / (h1 * h2)),
                        (f, h1 / (h2 * (h1 + h2))),
                    ])
                }
                (Some(f), None) => {
                    let h = r(f) - radii[i];
                    Some(vec![(f, 1.0 / h), (idx, -1.0 / h)])
                }
                (None, Some(b)) => {
                    let h = radii[i] - r(b);
                    Some(vec![(idx, 1.0 / h), (b, -1.0 / h)])
                }
                (None, None) => None,
            }
        }
        (Lattice::Polar { radii, ntheta }, Axis::Second) => {
            let h = radii[idx / ntheta] * std::f64::consts::TAU / *ntheta as f64;
            match (fwd, bwd) {
                (Some(f), Some(b)) => Some(vec![(f, 0.5 / h), (b, -0.5 / h)]),
                (Some(f), None) => Some(vec![(f, 1.0 / h), (idx, -1.0 / h)]),
                (None, Some(b)) => Some(vec![(idx, 1.0 / h), (b, -1.0 / h)]),
                (None, None) => None,
            }
        }
    }
}

fn apply(st: &Stencil, u: &[f64]) -> f64 {
    st.iter().map(|&(j, w)| w * u[j]).sum()
}

impl Discretization {
    pub fn new(dom: &GridDomain) -> Self {
        let n = dom.len();
        let mut edges = Vec::new();
        let mut cell_area = vec![0.0; n];
        let lat = &dom.lattice;
        for idx in 0..n {
            if dom.kind(idx) == NodeKind::Interior {
                cell_area[idx] = match lat {
                    Lattice::Cartesian { hx, hy, .. } => hx * hy,
                    Lattice::Polar { radii, ntheta } => {
                        let i = idx / ntheta;
                        let (lo, hi) = (0.5 * (radii[i - 1] + radii[i]), 0.5 * (radii[i] + radii[i + 1]));
                        0.5 * (hi * hi - lo * lo) * std::f64::consts::TAU / *ntheta as f64
                    }
                };
            }
            if dom.kind(idx) == NodeKind::Excluded {
                continue;
            }
            let nb = lat.neighbours(idx);
            for (slot, axis) in [(0usize, Axis::First), (2usize, Axis::Second)] {
                let Some(j) = nb[slot] else { continue };
                if dom.kind(j) == NodeKind::Excluded {
                    continue;
                }
                if dom.kind(idx) != NodeKind::Interior && dom.kind(j) != NodeKind::Interior {
                    continue;
                }
                edges.push(Self::edge(dom, idx, j, axis));
            }
        }
        for &p in &dom.punctures {
            edges.extend(Self::ghost_edges(dom, p));
        }
        let mut incidence = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            for (end, sign) in [(edge.a, 1.0), (edge.b, -1.0)] {
                if dom.kind(end) != NodeKind::Excluded {
                    incidence[end].push((e, sign));
                }
            }
        }
        Discretization {
            edges,
            cell_area,
            incidence,
        }
    }

    /// Edges from the interior neighbours of puncture `p` into `p`. The
    /// puncture value is replaced by linear extrapolation from the far
    /// side, so affine data sees no hole.
    fn ghost_edges(dom: &GridDomain, p: usize) -> Vec<Edge> {
        let lat = &dom.lattice;
        let nb = lat.neighbours(p);
        let mut out = Vec::new();
        // (neighbour slot of p, axis, p is the edge's `a` end)
        for (slot, axis, p_is_a) in [
            (0usize, Axis::First, true),
            (1, Axis::First, false),
            (2, Axis::Second, true),
            (3, Axis::Second, false),
        ] {
            let Some(q) = nb[slot] else { continue };
            if dom.kind(q) != NodeKind::Interior {
                continue;
            }
            // q's neighbour away from p: same direction as p → q.
            let Some(far) = lat.neighbours(q)[slot] else { continue };
            if dom.kind(far) == NodeKind::Excluded {
                continue;
            }
            let (a, b) = if p_is_a { (p, q) } else { (q, p) };
            let mut edge = Self::edge(dom, a, b, axis);
            let d = match lat {
                Lattice::Polar { radii, ntheta } if axis == Axis::First => {
                    (radii[far / ntheta] - radii[q / ntheta]).abs()
                }
                _ => edge.normal_len,
            };
            edge.difference = if p_is_a {
                vec![(far, 1.0 / d), (q, -1.0 / d)]
            } else {
                vec![(q, 1.0 / d), (far, -1.0 / d)]
            };
            let punctured = |j: usize| dom.kind(j) == NodeKind::Excluded;
            if edge.tangential.iter().any(|&(j, _)| punctured(j)) {
                edge.tangential = axis_stencil(dom, q, if axis == Axis::First { Axis::Second } else { Axis::First })
                    .map(|st| {
                        let sign = if axis == Axis::First { 1.0 } else { -1.0 };
                        st.into_iter().map(|(j, w)| (j, sign * w)).collect()
                    })
                    .unwrap_or_default();
            }
            out.push(edge);
        }
        out
    }

    fn edge(dom: &GridDomain, a: usize, b: usize, axis: Axis) -> Edge {
        // Tangent of First-axis edges is the Second axis and vice versa;
        // t = (−n_y, n_x) makes the Second-axis edge tangent point backwards.
        let (t_axis, t_sign) = match axis {
            Axis::First => (Axis::Second, 1.0),
            Axis::Second => (Axis::First, -1.0),
        };
        let ends: Vec<Stencil> = [a, b].iter().filter_map(|&p| axis_stencil(dom, p, t_axis)).collect();
        let mut tangential: Stencil = Vec::new();
        let w = t_sign / ends.len().max(1) as f64;
        for st in &ends {
            for &(j, c) in st {
                match tangential.iter_mut().find(|(k, _)| *k == j) {
                    Some(slot) => slot.1 += w * c,
                    None => tangential.push((j, w * c)),
                }
            }
        }
        let (normal, normal_len, face_len) = match (&dom.lattice, axis) {
            (Lattice::Cartesian { hx, hy, .. }, Axis::First) => ((1.0, 0.0), *hx, *hy),
            (Lattice::Cartesian { hx, hy, .. }, Axis::Second) => ((0.0, 1.0), *hy, *hx),
            (Lattice::Polar { radii, ntheta }, Axis::First) => {
                let (i, k) = (a / ntheta, a % ntheta);
                let th = dom.lattice.theta(k);
                let dth = std::f64::consts::TAU / *ntheta as f64;
                (
                    (th.cos(), th.sin()),
                    radii[i + 1] - radii[i],
                    0.5 * (radii[i] + radii[i + 1]) * dth,
                )
            }
            (Lattice::Polar { radii, ntheta }, Axis::Second) => {
                let (i, k) = (a / ntheta, a % ntheta);
                let dth = std::f64::consts::TAU / *ntheta as f64;
                let th = (k as f64 + 0.5) * dth;
                let lo = if i > 0 {
                    0.5 * (radii[i - 1] + radii[i])
                } else {
                    radii[i]
                };
                let hi = if i + 1 < radii.len() {
                    0.5 * (radii[i] + radii[i + 1])
                } else {
                    radii[i]
                };
                ((-th.sin(), th.cos()), radii[i] * dth, hi - lo)
            }
        };
        Edge {
            a,
            b,
            normal,
            normal_len,
            difference: vec![(a, -1.0 / normal_len), (b, 1.0 / normal_len)],
            face_len,
            tangential,
        }
    }
}

/// Half-node data of an edge in its own frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoefficients {
    pub lambda: f64,
    pub mu: f64,
    /// Normal and tangential components of (a, b).
    pub a_n: f64,
    pub a_t: f64,
}

/// Flux through an edge and its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFlux {
    pub v: f64,
    pub dv_dp: f64,
    pub dv_dq: f64,
    pub w: f64,
}

/// `V = μ²(p − λ a_n)/W` with `W = √(1 + μ²(g_n² + g_t²))`,
/// `g_n = p/λ − a_n`, `g_t = q/λ − a_t`.
pub fn edge_flux(c: &EdgeCoefficients, p: f64, q: f64) -> EdgeFlux {
    let gn = p / c.lambda - c.a_n;
    let gt = q / c.lambda - c.a_t;
    let mu2 = c.mu * c.mu;
    let w = (1.0 + mu2 * (gn * gn + gt * gt)).sqrt();
    let w3 = w * w * w;
    EdgeFlux {
        v: mu2 * c.lambda * gn / w,
        dv_dp: mu2 * (1.0 + mu2 * gt * gt) / w3,
        dv_dq: -mu2 * mu2 * gn * gt / w3,
        w,
    }
}

/// A model, prescribed curvature and domain frozen into per-node and
/// per-edge coefficients.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub disc: Discretization,
    pub nodes: Vec<Option<ModelValues>>,
    /// `2μH` at interior nodes.
    pub source: Vec<f64>,
    pub edge_coef: Vec<EdgeCoefficients>,
    /// Unknown ordering: `order[k]` is the node solved for in slot `k`.
    pub order: Vec<usize>,
    pub slot: Vec<Option<usize>>,
    kinds: Vec<NodeKind>,
}

impl DiscreteOperator {
    pub fn new(m: &MetricModel, dom: &GridDomain, h: &ScalarField) -> Result<Self, EvalError> {
        let disc = Discretization::new(dom);
        let n = dom.len();
        let nodes: Vec<Option<ModelValues>> = (0..n)
            .into_par_iter()
            .map(|idx| {
                if dom.kind(idx) == NodeKind::Excluded && !dom.punctures.contains(&idx) {
                    Ok(None)
                } else {
                    m.values(dom.position(idx)).map(Some)
                }
            })
            .collect::<Result<_, _>>()?;
        let source: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|idx| match (dom.kind(idx), nodes[idx]) {
                (NodeKind::Interior, Some(v)) => Ok(2.0 * v.mu * h.value(dom.position(idx))?),
                _ => Ok(0.0),
            })
            .collect::<Result<_, EvalError>>()?;
        let edge_coef = disc
            .edges
            .iter()
            .map(|e| {
                let (va, vb) = (nodes[e.a].expect("edge end"), nodes[e.b].expect("edge end"));
                let a = 0.5 * (va.a + vb.a);
                let b = 0.5 * (va.b + vb.b);
                let (nx, ny) = e.normal;
                EdgeCoefficients {
                    lambda: 0.5 * (va.lambda + vb.lambda),
                    mu: 0.5 * (va.mu + vb.mu),
                    a_n: a * nx + b * ny,
                    a_t: -a * ny + b * nx,
                }
            })
            .collect();
        let order = unknown_order(dom);
        let mut slot = vec![None; n];
        for (k, &idx) in order.iter().enumerate() {
            slot[idx] = Some(k);
        }
        Ok(DiscreteOperator {
            disc,
            nodes,
            source,
            edge_coef,
            order,
            slot,
            kinds: dom.kinds.clone(),
        })
    }

    pub fn n_unknowns(&self) -> usize {
        self.order.len()
    }

    fn pq(&self, e: usize, u: &[f64]) -> (f64, f64) {
        let edge = &self.disc.edges[e];
        (apply(&edge.difference, u), apply(&edge.tangential, u))
    }

    /// Flux of every edge, in edge order.
    pub fn fluxes(&self, u: &[f64]) -> Vec<EdgeFlux> {
        (0..self.disc.edges.len())
            .into_par_iter()
            .map(|e| {
                let (p, q) = self.pq(e, u);
                edge_flux(&self.edge_coef[e], p, q)
            })
            .collect()
    }

    fn scale(&self, idx: usize) -> f64 {
        let l = self.nodes[idx].expect("interior node").lambda;
        1.0 / (l * l * self.disc.cell_area[idx])
    }

    /// `F(u)` at every node (zero off the interior).
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let fl = self.fluxes(u);
        let mut f = vec![0.0; u.len()];
        for idx in 0..u.len() {
            if self.kinds[idx] != NodeKind::Interior {
                continue;
            }
            let mut s = 0.0;
            for &(e, sign) in &self.disc.incidence[idx] {
                s += sign * self.disc.edges[e].face_len * fl[e].v;
            }
            f[idx] = s * self.scale(idx) - self.source[idx];
        }
        f
    }

    /// Band widths of the Jacobian under the unknown ordering.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0usize, 0usize);
        for edge in &self.disc.edges {
            let cols = edge
                .difference
                .iter()
                .chain(&edge.tangential)
                .map(|t| t.0)
                .filter_map(|j| self.slot[j]);
            let rows: Vec<usize> = [edge.a, edge.b].into_iter().filter_map(|j| self.slot[j]).collect();
            for c in cols {
                for &r in &rows {
                    if r > c {
                        kl = kl.max(r - c);
                    } else {
                        ku = ku.max(c - r);
                    }
                }
            }
        }
        (kl, ku)
    }

    /// Exact Jacobian of [`residual`](Self::residual) with respect to the
    /// interior values, in unknown order.
    pub fn jacobian(&self, u: &[f64]) -> BandMatrix {
        let fl = self.fluxes(u);
        self.assemble(|e| {
            let edge = &self.disc.edges[e];
            let mut terms: Stencil = edge.difference.iter().map(|&(j, w)| (j, fl[e].dv_dp * w)).collect();
            terms.extend(edge.tangential.iter().map(|&(j, w)| (j, fl[e].dv_dq * w)));
            terms
        })
    }

    /// Frozen-coefficient (Picard) system: `V ≈ μ²(p − λ a_n)/W_e` with the
    /// given per-edge `W_e`. Returns the matrix and the right-hand side that
    /// moves the boundary and source terms across.
    pub fn picard_system(&self, u: &[f64], w: &[f64]) -> (BandMatrix, Vec<f64>) {
        let mat = self.assemble(|e| {
            let edge = &self.disc.edges[e];
            let c = &self.edge_coef[e];
            let k = c.mu * c.mu / w[e];
            edge.difference.iter().map(|&(j, d)| (j, k * d)).collect()
        });
        let mut rhs = vec![0.0; self.n_unknowns()];
        for (k, &idx) in self.order.iter().enumerate() {
            let mut s = 0.0;
            for &(e, sign) in &self.disc.incidence[idx] {
                let edge = &self.disc.edges[e];
                let c = &self.edge_coef[e];
                let mu2w = c.mu * c.mu / w[e];
                let mut v = -mu2w * c.lambda * c.a_n;
                for &(j, d) in &edge.difference {
                    if self.slot[j].is_none() {
                        v += mu2w * d * u[j];
                    }
                }
                s += sign * edge.face_len * v;
            }
            rhs[k] = self.source[idx] - s * self.scale(idx);
        }
        (mat, rhs)
    }

    /// Area element of the zero section per edge, `√(1 + μ²(a_n² + a_t²))`.
    pub fn zero_section_w(&self) -> Vec<f64> {
        self.edge_coef
            .iter()
            .map(|c| (1.0 + c.mu * c.mu * (c.a_n * c.a_n + c.a_t * c.a_t)).sqrt())
            .collect()
    }

    fn assemble(&self, terms: impl Fn(usize) -> Stencil + Sync) -> BandMatrix {
        let (kl, ku) = self.bandwidths();
        let mut mat = BandMatrix::zeros(self.n_unknowns(), kl, ku);
        let per_edge: Vec<Stencil> = (0..self.disc.edges.len()).into_par_iter().map(&terms).collect();
        for (k, &idx) in self.order.iter().enumerate() {
            let sc = self.scale(idx);
            for &(e, sign) in &self.disc.incidence[idx] {
                let face = self.disc.edges[e].face_len;
                for &(j, d) in &per_edge[e] {
                    if let Some(col) = self.slot[j] {
                        mat.add(k, col, sign * face * sc * d)
                            .expect("entry inside computed band");
                    }
                }
            }
        }
        mat
    }

    /// Σ over interior nodes of `λ² |cell| (F + 2μH)`.
    pub fn weighted_divergence_sum(&self, u: &[f64]) -> f64 {
        let f = self.residual(u);
        self.order
            .iter()
            .map(|&idx| (f[idx] + self.source[idx]) / self.scale(idx))
            .sum()
    }

    /// Net outward flux through the edges joining interior and boundary
    /// nodes.
    pub fn boundary_flux_sum(&self, u: &[f64]) -> f64 {
        let fl = self.fluxes(u);
        let mut s = 0.0;
        for (e, edge) in self.disc.edges.iter().enumerate() {
            let (ia, ib) = (self.kinds[edge.a], self.kinds[edge.b]);
            let sign = match (ia, ib) {
                (NodeKind::Interior, NodeKind::Boundary) => 1.0,
                (NodeKind::Boundary, NodeKind::Interior) => -1.0,
                _ => continue,
            };
            s += sign * edge.face_len * fl[e].v;
        }
        s
    }
}

/// Interior nodes ordered with the shorter lattice direction running
/// fastest (the angle for polar lattices), which keeps the band narrow.
fn unknown_order(dom: &GridDomain) -> Vec<usize> {
    let mut order: Vec<usize> = dom.interior_nodes().collect();
    if let Lattice::Cartesian { nx, ny, .. } = dom.lattice {
        if nx > ny {
            order.sort_by_key(|&idx| (idx % nx, idx / nx));
        }
    }
    order
}

/// Mean-curvature residual `F(u)` on the interior (NaN elsewhere).
pub fn mean_curvature_residual(
    m: &MetricModel,
    dom: &GridDomain,
    u: &ScalarGrid,
    h: &ScalarField,
) -> Result<ScalarGrid, EvalError> {
    let op = DiscreteOperator::new(m, dom, h)?;
    let f = op.residual(&u.values);
    Ok(ScalarGrid {
        values: f
            .iter()
            .enumerate()
            .map(|(i, &v)| if dom.is_interior(i) { v } else { f64::NAN })
            .collect(),
    })
}

/// Discrete `(u_x, u_y)` at a node from central (or one-sided) differences.
pub fn discrete_gradient(dom: &GridDomain, u: &ScalarGrid, node: usize) -> (f64, f64) {
    let d = |axis| axis_stencil(dom, node, axis).map_or(0.0, |st| apply(&st, &u.values));
    let (d1, d2) = (d(Axis::First), d(Axis::Second));
    match dom.lattice {
        Lattice::Cartesian { .. } => (d1, d2),
        Lattice::Polar { ntheta, .. } => {
            let th = dom.lattice.theta(node % ntheta);
            let (s, c) = th.sin_cos();
            (c * d1 - s * d2, s * d1 + c * d2)
        }
    }
}

/// Orthonormal-frame components of `Gu = (u_x/λ − a, u_y/λ − b)`.
pub fn generalized_gradient(
    m: &MetricModel,
    dom: &GridDomain,
    u: &ScalarGrid,
    node: usize,
) -> Result<(f64, f64), EvalError> {
    let v = m.values(dom.position(node))?;
    let (ux, uy) = discrete_gradient(dom, u, node);
    Ok((ux / v.lambda - v.a, uy / v.lambda - v.b))
}

/// `W = √(1 + μ²‖Gu‖²)`.
pub fn area_element(m: &MetricModel, dom: &GridDomain, u: &ScalarGrid, node: usize) -> Result<f64, EvalError> {
    let (g1, g2) = generalized_gradient(m, dom, u, node)?;
    let mu = m.mu.value(dom.position(node))?;
    Ok((1.0 + mu * mu * (g1 * g1 + g2 * g2)).sqrt())
}

/// `ν = μ/W`.
pub fn angle_function(m: &MetricModel, dom: &GridDomain, u: &ScalarGrid, node: usize) -> Result<f64, EvalError> {
    let mu = m.mu.value(dom.position(node))?;
    Ok(mu / area_element(m, dom, u, node)?)
}

/// Pointwise data entering the factorization identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTerms {
    /// `⟨Gu/W_u − Gv/W_v, Gu − Gv⟩`.
    pub gap: f64,
    /// `(W_u + W_v)/(2μ²) ‖N_u − N_v‖²`.
    pub normal_form: f64,
}

fn gap_terms(mu: f64, gu: (f64, f64), gv: (f64, f64)) -> GapTerms {
    let wu = (1.0 + mu * mu * (gu.0 * gu.0 + gu.1 * gu.1)).sqrt();
    let wv = (1.0 + mu * mu * (gv.0 * gv.0 + gv.1 * gv.1)).sqrt();
    // Written in terms of A = Gu − Gv so that nearly equal gradients give a
    // gap of order |A|² rather than rounding noise.
    let a = (gu.0 - gv.0, gu.1 - gv.1);
    let k = -mu * mu * (a.0 * (gu.0 + gv.0) + a.1 * (gu.1 + gv.1)) / (wu * wv * (wu + wv));
    let d = (a.0 / wu + k * gv.0, a.1 / wu + k * gv.1);
    let gap = d.0 * a.0 + d.1 * a.1;
    // Unit normals in the frame (e1, e2, ξ/μ): N = (−μ Gu, 1)/W.
    let dn = mu * mu * (d.0 * d.0 + d.1 * d.1) + k * k;
    GapTerms {
        gap,
        normal_form: (wu + wv) / (2.0 * mu * mu) * dn,
    }
}

/// Left-hand side of the factorization identity at `node`, together with
/// the normal-vector form it equals.
pub fn factorization_gap(
    m: &MetricModel,
    dom: &GridDomain,
    u: &ScalarGrid,
    v: &ScalarGrid,
    node: usize,
) -> Result<GapTerms, EvalError> {
    let mu = m.mu.value(dom.position(node))?;
    let gu = generalized_gradient(m, dom, u, node)?;
    let gv = generalized_gradient(m, dom, v, node)?;
    Ok(gap_terms(mu, gu, gv))
}
