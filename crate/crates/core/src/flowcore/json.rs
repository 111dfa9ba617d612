//! JSON encodings of graphs, flow polytopes and transportation polytopes.
//!
//! Graph format:
//! `{"vertices":[ids], "arcs":[{"id","tail","head","lower","upper"}], "demand":{vertex:int}}`.
//! Transportation format:
//! `{"rows":[r], "cols":[c], "lower":null|matrix, "upper":null|matrix}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::DirectedGraph;
use super::spec::{FlowPolytopeSpec, TransportationSpec};
use crate::error::{Error, Result};

/// Vertex and arc ids may be given as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Int(i64),
    Str(String),
}

impl From<Id> for String {
    fn from(id: Id) -> String {
        match id {
            Id::Int(i) => i.to_string(),
            Id::Str(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcJson {
    pub id: Id,
    pub tail: Id,
    pub head: Id,
    #[serde(default)]
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpecJson {
    pub vertices: Vec<Id>,
    pub arcs: Vec<ArcJson>,
    #[serde(default)]
    pub demand: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportationJson {
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
    #[serde(default)]
    pub lower: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub upper: Option<Vec<Vec<i64>>>,
}

/// Either input format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeJson {
    Transportation(TransportationJson),
    Graph(GraphSpecJson),
}

/// A parsed polytope: transportation inputs keep their table shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Polytope {
    Flow(FlowPolytopeSpec),
    Transportation(TransportationSpec),
}

impl Polytope {
    pub fn flow_spec(&self) -> FlowPolytopeSpec {
        match self {
            Polytope::Flow(f) => f.clone(),
            Polytope::Transportation(t) => t.to_flow(),
        }
    }

    pub fn as_transportation(&self) -> Option<&TransportationSpec> {
        match self {
            Polytope::Transportation(t) => Some(t),
            Polytope::Flow(_) => None,
        }
    }
}

impl TryFrom<GraphSpecJson> for FlowPolytopeSpec {
    type Error = Error;

    fn try_from(j: GraphSpecJson) -> Result<Self> {
        let vertices: Vec<String> = j.vertices.into_iter().map(String::from).collect();
        let mut lower = Vec::with_capacity(j.arcs.len());
        let mut upper = Vec::with_capacity(j.arcs.len());
        let arcs: Vec<(String, String, String)> = j
            .arcs
            .into_iter()
            .map(|a| {
                lower.push(a.lower);
                upper.push(a.upper);
                (a.id.into(), a.tail.into(), a.head.into())
            })
            .collect();
        let graph = DirectedGraph::new(vertices, arcs)?;
        let mut demand = vec![0; graph.vertex_count()];
        for (v, d) in j.demand {
            let i = graph
                .vertex_index(&v)
                .ok_or_else(|| Error::spec(format!("demand given for unknown vertex {v:?}")))?;
            demand[i] = d;
        }
        FlowPolytopeSpec::new(graph, demand, lower, upper)
    }
}

impl From<&FlowPolytopeSpec> for GraphSpecJson {
    fn from(s: &FlowPolytopeSpec) -> Self {
        let g = s.graph();
        GraphSpecJson {
            vertices: g.vertices().iter().cloned().map(Id::Str).collect(),
            arcs: g
                .arcs()
                .iter()
                .enumerate()
                .map(|(i, a)| ArcJson {
                    id: Id::Str(a.id.clone()),
                    tail: Id::Str(g.vertices()[a.tail].clone()),
                    head: Id::Str(g.vertices()[a.head].clone()),
                    lower: s.lower()[i],
                    upper: s.upper()[i],
                })
                .collect(),
            demand: g
                .vertices()
                .iter()
                .cloned()
                .zip(s.demand().iter().copied())
                .collect(),
        }
    }
}

impl TryFrom<TransportationJson> for TransportationSpec {
    type Error = Error;

    fn try_from(j: TransportationJson) -> Result<Self> {
        TransportationSpec::with_bounds(j.rows, j.cols, j.lower, j.upper)
    }
}

impl From<&TransportationSpec> for TransportationJson {
    fn from(t: &TransportationSpec) -> Self {
        TransportationJson {
            rows: t.rows().to_vec(),
            cols: t.cols().to_vec(),
            lower: t.lower_bounds().cloned(),
            upper: t.upper_bounds().cloned(),
        }
    }
}

/// Parse either input format from a JSON string.
pub fn parse_polytope(text: &str) -> Result<Polytope> {
    let j: PolytopeJson =
        serde_json::from_str(text).map_err(|e| Error::spec(format!("malformed polytope JSON: {e}")))?;
    match j {
        PolytopeJson::Transportation(t) => Ok(Polytope::Transportation(t.try_into()?)),
        PolytopeJson::Graph(g) => Ok(Polytope::Flow(g.try_into()?)),
    }
}
