use std::collections::HashMap;

use log::warn;

use super::graph::{incidence_matrix, DirectedGraph};
use crate::error::{Error, Result};

/// The flow polytope `{ f : M_G f = d, l <= f <= u }` over a directed graph.
///
/// When `homogenized` is set, lattice points are reported with an extra
/// leading coordinate fixed to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPolytopeSpec {
    graph: DirectedGraph,
    demand: Vec<i64>,
    lower: Vec<i64>,
    upper: Vec<i64>,
    homogenized: bool,
}

impl FlowPolytopeSpec {
    pub fn new(graph: DirectedGraph, demand: Vec<i64>, lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if demand.len() != graph.vertex_count() {
            return Err(Error::spec(format!(
                "demand has {} entries for {} vertices",
                demand.len(),
                graph.vertex_count()
            )));
        }
        if lower.len() != graph.arc_count() || upper.len() != graph.arc_count() {
            return Err(Error::spec("bounds must have one entry per arc"));
        }
        for (a, (&l, &u)) in graph.arcs().iter().zip(lower.iter().zip(&upper)) {
            if l < 0 {
                return Err(Error::spec(format!("arc {:?} has negative lower bound {l}", a.id)));
            }
            if l > u {
                return Err(Error::spec(format!("arc {:?} has lower bound {l} above upper bound {u}", a.id)));
            }
        }
        let total: i64 = demand.iter().sum();
        if total != 0 {
            return Err(Error::spec(format!("demands sum to {total}, not 0")));
        }
        if let Some(a) = graph.arcs().iter().find(|a| a.is_loop()) {
            warn!("arc {:?} is a loop; it adds a free coordinate", a.id);
        }
        Ok(Self { graph, demand, lower, upper, homogenized: false })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn demand(&self) -> &[i64] {
        &self.demand
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn is_homogenized(&self) -> bool {
        self.homogenized
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arc_count()
    }

    pub fn incidence_matrix(&self) -> Vec<Vec<i64>> {
        incidence_matrix(&self.graph)
    }

    /// Same graph and demands with new bounds.
    pub fn with_bounds(&self, lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        let mut s = Self::new(self.graph.clone(), self.demand.clone(), lower, upper)?;
        s.homogenized = self.homogenized;
        Ok(s)
    }

    /// Same graph with new demands and bounds.
    pub fn with_demand_and_bounds(&self, demand: Vec<i64>, lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        let mut s = Self::new(self.graph.clone(), demand, lower, upper)?;
        s.homogenized = self.homogenized;
        Ok(s)
    }

    /// Whether arc values satisfy conservation and bounds.
    pub fn contains(&self, values: &[i64]) -> bool {
        self.violation(values).is_none()
    }

    /// Describe the first violated constraint, if any.
    pub fn violation(&self, values: &[i64]) -> Option<String> {
        if values.len() != self.arc_count() {
            return Some(format!("expected {} arc values, found {}", self.arc_count(), values.len()));
        }
        for (i, (&x, (&l, &u))) in values.iter().zip(self.lower.iter().zip(&self.upper)).enumerate() {
            if x < l || x > u {
                return Some(format!("arc {:?} carries {x} outside [{l}, {u}]", self.graph.arcs()[i].id));
            }
        }
        let net = self.graph.net_inflow(values);
        for (v, (&n, &d)) in net.iter().zip(&self.demand).enumerate() {
            if n != d {
                return Some(format!(
                    "vertex {:?} has net inflow {n}, demand {d}",
                    self.graph.vertices()[v]
                ));
            }
        }
        None
    }

    /// The coordinates of a flow as a lattice point (leading 1 when
    /// homogenized).
    pub fn embed(&self, flow: &[i64]) -> Vec<i64> {
        if self.homogenized {
            std::iter::once(1).chain(flow.iter().copied()).collect()
        } else {
            flow.to_vec()
        }
    }

    /// Arc values of a lattice point produced by [`embed`](Self::embed).
    pub fn flow_part<'a>(&self, point: &'a [i64]) -> &'a [i64] {
        if self.homogenized {
            &point[1..]
        } else {
            point
        }
    }

    /// Whether `F` lies on an affine hyperplane missing the origin without
    /// an extra coordinate: some vertex with nonzero demand has a nonzero
    /// incidence row.
    pub fn is_homogeneous_as_is(&self) -> bool {
        let m = self.incidence_matrix();
        self.demand
            .iter()
            .zip(&m)
            .any(|(&d, row)| d != 0 && row.iter().any(|&x| x != 0))
    }
}

/// Return the spec unchanged if it already lies on an affine hyperplane off
/// the origin; otherwise flag it so that points gain a leading coordinate 1.
pub fn homogenize(spec: &FlowPolytopeSpec) -> FlowPolytopeSpec {
    let mut out = spec.clone();
    if !spec.is_homogeneous_as_is() {
        out.homogenized = true;
    }
    out
}

/// An integral flow, validated against its spec at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerFlow(Vec<i64>);

impl IntegerFlow {
    pub fn new(spec: &FlowPolytopeSpec, values: Vec<i64>) -> Result<Self> {
        match spec.violation(&values) {
            Some(msg) => Err(Error::OutsidePolytope(msg)),
            None => Ok(Self(values)),
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<i64> {
        self.0
    }
}

/// The transportation polytope `T(r, c)` of nonnegative `m x n` tables with
/// row sums `r` and column sums `c`, optionally with entrywise bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportationSpec {
    rows: Vec<i64>,
    cols: Vec<i64>,
    lower: Option<Vec<Vec<i64>>>,
    upper: Option<Vec<Vec<i64>>>,
}

impl TransportationSpec {
    pub fn new(rows: Vec<i64>, cols: Vec<i64>) -> Result<Self> {
        Self::with_bounds(rows, cols, None, None)
    }

    pub fn with_bounds(
        rows: Vec<i64>,
        cols: Vec<i64>,
        lower: Option<Vec<Vec<i64>>>,
        upper: Option<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::spec("need at least one row and one column"));
        }
        if rows.iter().chain(&cols).any(|&x| x < 1) {
            return Err(Error::spec("margins must be positive"));
        }
        let (rs, cs): (i64, i64) = (rows.iter().sum(), cols.iter().sum());
        if rs != cs {
            return Err(Error::spec(format!("row sums {rs} and column sums {cs} differ")));
        }
        for b in lower.iter().chain(upper.iter()) {
            if b.len() != rows.len() || b.iter().any(|r| r.len() != cols.len()) {
                return Err(Error::spec("entry bounds must be m x n"));
            }
        }
        Ok(Self { rows, cols, lower, upper })
    }

    /// The Birkhoff polytope `B_n`.
    pub fn birkhoff(n: usize) -> Result<Self> {
        Self::new(vec![1; n], vec![1; n])
    }

    pub fn rows(&self) -> &[i64] {
        &self.rows
    }

    pub fn cols(&self) -> &[i64] {
        &self.cols
    }

    pub fn lower_bounds(&self) -> Option<&Vec<Vec<i64>>> {
        self.lower.as_ref()
    }

    pub fn upper_bounds(&self) -> Option<&Vec<Vec<i64>>> {
        self.upper.as_ref()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// Total `s = Σ r_i = Σ c_j`.
    pub fn total(&self) -> i64 {
        self.rows.iter().sum()
    }

    /// The bipartite flow encoding: supply vertices `r1..rm` with demand
    /// `-r_i`, demand vertices `c1..cn` with demand `c_j`, and one arc
    /// `x{i}_{j}` per entry in row-major order. Flows and row-major tables
    /// coincide.
    pub fn to_flow(&self) -> FlowPolytopeSpec {
        let (m, n) = (self.m(), self.n());
        let vertices: Vec<String> = (1..=m)
            .map(|i| format!("r{i}"))
            .chain((1..=n).map(|j| format!("c{j}")))
            .collect();
        let mut arcs = Vec::with_capacity(m * n);
        let mut lower = Vec::with_capacity(m * n);
        let mut upper = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                arcs.push((format!("x{}_{}", i + 1, j + 1), vertices[i].clone(), vertices[m + j].clone()));
                lower.push(self.lower.as_ref().map_or(0, |b| b[i][j]));
                upper.push(
                    self.upper
                        .as_ref()
                        .map_or(self.rows[i].min(self.cols[j]), |b| b[i][j]),
                );
            }
        }
        let graph = DirectedGraph::new(vertices, arcs).expect("bipartite encoding is well formed");
        let demand = self.rows.iter().map(|r| -r).chain(self.cols.iter().copied()).collect();
        FlowPolytopeSpec::new(graph, demand, lower, upper).expect("margins were validated")
    }

    /// Split a row-major point into an `m x n` matrix.
    pub fn to_matrix(&self, point: &[i64]) -> Vec<Vec<i64>> {
        point.chunks(self.n()).map(<[i64]>::to_vec).collect()
    }
}

/// An ordered list of distinct lattice points. The order fixes the variable
/// order of every term order built on top of it.
#[derive(Debug, Clone, Default)]
pub struct PointList {
    points: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl PartialEq for PointList {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for PointList {}

impl PointList {
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(points.len());
        let width = points.first().map(Vec::len);
        for (i, p) in points.iter().enumerate() {
            if Some(p.len()) != width {
                return Err(Error::spec("points have different dimensions"));
            }
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::spec(format!("duplicate point {p:?}")));
            }
        }
        Ok(Self { points, index })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &[i64] {
        &self.points[i]
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.points.iter()
    }

    /// The sub-list at the given positions, in that order.
    pub fn select(&self, positions: &[usize]) -> PointList {
        PointList::new(positions.iter().map(|&i| self.points[i].clone()).collect())
            .expect("a selection of distinct points is distinct")
    }

    pub fn into_points(self) -> Vec<Vec<i64>> {
        self.points
    }
}

impl std::ops::Index<usize> for PointList {
    type Output = Vec<i64>;

    fn index(&self, i: usize) -> &Vec<i64> {
        &self.points[i]
    }
}
