use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// An arc between two vertices, referenced by vertex position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A directed multigraph. Parallel arcs and loops are allowed; arcs are
/// distinguished by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
}

impl DirectedGraph {
    /// Build a graph from vertex ids and `(arc id, tail id, head id)` triples.
    pub fn new<V, A>(vertices: V, arcs: A) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut position = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if position.insert(v.clone(), i).is_some() {
                return Err(Error::spec(format!("duplicate vertex id {v:?}")));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (id, tail, head) in arcs {
            if !seen.insert(id.clone()) {
                return Err(Error::spec(format!("duplicate arc id {id:?}")));
            }
            let lookup = |v: &str| {
                position
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::spec(format!("arc {id:?} uses undeclared vertex {v:?}")))
            };
            let (tail, head) = (lookup(&tail)?, lookup(&head)?);
            out.push(Arc { id, tail, head });
        }
        Ok(Self { vertices, arcs: out })
    }

    /// Build from vertex count and index pairs; vertices are named `v0, v1, …`
    /// and arcs `a0, a1, …`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let arcs = edges
            .iter()
            .enumerate()
            .map(|(k, &(t, h))| {
                let name = |i: usize| vertices.get(i).cloned().unwrap_or_else(|| format!("v{i}"));
                (format!("a{k}"), name(t), name(h))
            })
            .collect::<Vec<_>>();
        Self::new(vertices.clone(), arcs)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    /// Net inflow `inflow - outflow` at every vertex for the given arc values.
    pub fn net_inflow(&self, values: &[i64]) -> Vec<i64> {
        let mut net = vec![0; self.vertices.len()];
        for (arc, &x) in self.arcs.iter().zip(values) {
            net[arc.head] += x;
            net[arc.tail] -= x;
        }
        net
    }
}

/// The vertex-arc incidence matrix: the column of arc `t -> h` has `-1` at
/// `t` and `+1` at `h`; loop columns are zero.
pub fn incidence_matrix(g: &DirectedGraph) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; g.arc_count()]; g.vertex_count()];
    for (j, arc) in g.arcs.iter().enumerate() {
        m[arc.tail][j] -= 1;
        m[arc.head][j] += 1;
    }
    m
}
