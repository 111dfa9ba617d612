//! Integral flow feasibility and the generalized Birkhoff–von Neumann
//! decomposition of a point of `k·F` into `k` lattice points of `F`.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::flowcore::{FlowPolytopeSpec, IntegerFlow};

/// A vertex set whose required net inflow cannot be met by the arcs
/// crossing its boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatedCut {
    pub vertices: Vec<String>,
    /// `Σ d_v` over the set.
    pub required_inflow: i64,
    /// `Σ l(in) - Σ u(out)`.
    pub min_inflow: i64,
    /// `Σ u(in) - Σ l(out)`.
    pub max_inflow: i64,
}

impl fmt::Display for ViolatedCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vertex set {:?} needs net inflow {} but the boundary allows [{}, {}]",
            self.vertices, self.required_inflow, self.min_inflow, self.max_inflow
        )
    }
}

/// Check the cut condition for one vertex set.
pub fn cut_condition(spec: &FlowPolytopeSpec, in_set: &[bool]) -> ViolatedCut {
    let g = spec.graph();
    let (mut lo, mut hi) = (0, 0);
    for (a, arc) in g.arcs().iter().enumerate() {
        let (t, h) = (in_set[arc.tail], in_set[arc.head]);
        if h && !t {
            lo += spec.lower()[a];
            hi += spec.upper()[a];
        } else if t && !h {
            lo -= spec.upper()[a];
            hi -= spec.lower()[a];
        }
    }
    let required = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|(v, _)| in_set[*v])
        .map(|(v, _)| spec.demand()[v])
        .sum();
    ViolatedCut {
        vertices: g
            .vertices()
            .iter()
            .enumerate()
            .filter(|(v, _)| in_set[*v])
            .map(|(_, id)| id.clone())
            .collect(),
        required_inflow: required,
        min_inflow: lo,
        max_inflow: hi,
    }
}

impl ViolatedCut {
    pub fn is_violated(&self) -> bool {
        self.required_inflow < self.min_inflow || self.required_inflow > self.max_inflow
    }
}

struct Edge {
    to: usize,
    cap: i64,
}

/// Residual network for Edmonds–Karp; edges are stored in pairs so that
/// `e ^ 1` is the reverse of `e`.
struct Network {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Breadth-first search over arcs in insertion order; returns the
    /// predecessor edge of every reached node.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut pred = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.edges[e].to;
                if self.edges[e].cap > 0 && !seen[w] {
                    seen[w] = true;
                    pred[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        pred
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let pred = self.bfs(s);
        (0..self.adj.len()).map(|v| v == s || pred[v].is_some()).collect()
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let pred = self.bfs(s);
            if pred[t].is_none() {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while let Some(e) = pred[v] {
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while let Some(e) = pred[v] {
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}

/// Find an integral flow meeting demands and bounds, or report a vertex set
/// whose cut condition fails.
///
/// Lower bounds are shifted out (`f = l + g`), and the remaining
/// circulation-with-demands problem is solved as a max-flow from a super
/// source feeding the supply vertices to a super sink draining the demand
/// vertices.
pub fn feasible_integral_flow(spec: &FlowPolytopeSpec) -> std::result::Result<IntegerFlow, ViolatedCut> {
    let g = spec.graph();
    let nv = g.vertex_count();
    let (s, t) = (nv, nv + 1);
    let mut net = Network::new(nv + 2);
    let shifted = g.net_inflow(spec.lower());
    let residual_demand: Vec<i64> = spec.demand().iter().zip(&shifted).map(|(d, x)| d - x).collect();
    let arc_edges: Vec<usize> = g
        .arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| net.add_edge(arc.tail, arc.head, spec.upper()[a] - spec.lower()[a]))
        .collect();
    let mut need = 0;
    for (v, &d) in residual_demand.iter().enumerate() {
        if d < 0 {
            net.add_edge(s, v, -d);
        } else if d > 0 {
            net.add_edge(v, t, d);
            need += d;
        }
    }
    let value = net.max_flow(s, t);
    if value == need {
        let values = g
            .arcs()
            .iter()
            .enumerate()
            .map(|(a, arc)| {
                let e = arc_edges[a];
                // Loops never carry augmenting flow; keep them at the lower bound.
                let pushed = if arc.is_loop() { 0 } else { net.edges[e ^ 1].cap };
                spec.lower()[a] + pushed
            })
            .collect();
        return Ok(IntegerFlow::new(spec, values).expect("max-flow solution satisfies the spec"));
    }
    let reach = net.reachable(s);
    let in_set: Vec<bool> = reach[..nv].to_vec();
    let cut = cut_condition(spec, &in_set);
    debug_assert!(cut.is_violated(), "min cut must certify infeasibility: {cut}");
    Err(cut)
}

/// Parts of a decomposition, all lattice points of one polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: Vec<IntegerFlow>,
}

impl Decomposition {
    pub fn sum(&self) -> Vec<i64> {
        let mut total = vec![0; self.parts.first().map_or(0, |p| p.values().len())];
        for p in &self.parts {
            for (t, x) in total.iter_mut().zip(p.values()) {
                *t += x;
            }
        }
        total
    }
}

fn check_in_dilate(spec: &FlowPolytopeSpec, f: &[i64], k: i64) -> Result<()> {
    if f.len() != spec.arc_count() {
        return Err(Error::IndexMismatch { expected: spec.arc_count(), found: f.len() });
    }
    for (a, &x) in f.iter().enumerate() {
        let (l, u) = (k * spec.lower()[a], k * spec.upper()[a]);
        if x < l || x > u {
            return Err(Error::pre(format!(
                "arc {:?} carries {x} outside [{l}, {u}] = {k}·[l, u]",
                spec.graph().arcs()[a].id
            )));
        }
    }
    let net = spec.graph().net_inflow(f);
    for (v, (&n, &d)) in net.iter().zip(spec.demand()).enumerate() {
        if n != k * d {
            return Err(Error::pre(format!(
                "vertex {:?} has net inflow {n}, expected {k}·{d}",
                spec.graph().vertices()[v]
            )));
        }
    }
    Ok(())
}

/// Write `f ∈ k·F ∩ Z^A` as a sum of `k` lattice points of `F`.
///
/// Each part is a feasible flow in the window
/// `[max(l, f - (r-1)u), min(u, f - (r-1)l)]`, where `r` parts remain, which
/// keeps the residual inside `(r-1)·F`.
pub fn bvn_decompose(spec: &FlowPolytopeSpec, f: &[i64], k: usize) -> Result<Decomposition> {
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    check_in_dilate(spec, f, k as i64)?;
    let mut residual = f.to_vec();
    let mut parts = Vec::with_capacity(k);
    for remaining in (1..=k as i64).rev() {
        let rest = remaining - 1;
        let lower: Vec<i64> = residual
            .iter()
            .zip(spec.lower().iter().zip(spec.upper()))
            .map(|(&x, (&l, &u))| l.max(x - rest * u))
            .collect();
        let upper: Vec<i64> = residual
            .iter()
            .zip(spec.lower().iter().zip(spec.upper()))
            .map(|(&x, (&l, &u))| u.min(x - rest * l))
            .collect();
        let window = spec.with_bounds(lower, upper).map_err(|e| {
            Error::IdentityFailure(format!("empty extraction window with {remaining} parts left: {e}"))
        })?;
        let part = feasible_integral_flow(&window)
            .map_err(|cut| Error::IdentityFailure(format!("extraction window infeasible: {cut}")))?;
        for (r, x) in residual.iter_mut().zip(part.values()) {
            *r -= x;
        }
        debug_assert!(check_in_dilate(spec, &residual, rest).is_ok());
        parts.push(IntegerFlow::new(spec, part.into_values())?);
    }
    Ok(Decomposition { parts })
}
