//! Graphs, flow and transportation polytopes, lattice-point enumeration and
//! the unit-cell subdivision.

mod cell;
mod enumerate;
mod graph;
pub mod json;
mod spec;

pub use cell::{cell_of, complement_cell, enumerate_nonempty_cells, maximal_cells, Cell};
pub use enumerate::{enumerate_flows, enumerate_lattice_points, DEFAULT_POINT_CAP};
pub use graph::{incidence_matrix, Arc, DirectedGraph};
pub use spec::{homogenize, FlowPolytopeSpec, IntegerFlow, PointList, TransportationSpec};
