//! Toric ideals of flow and transportation polytopes.
//!
//! The crate enumerates lattice points of flow polytopes, slices them into
//! unit cells, builds subdivide-and-pull term orders and pulling
//! triangulations, computes reduced binomial Gröbner bases, generates the
//! degree-2/3 Markov moves and checks fiber connectivity, and constructs the
//! high-degree Gröbner families for Birkhoff and transportation polytopes.

pub mod error;
pub mod flowcore;
pub mod linalg;
pub mod markov;
pub mod netflow;
pub mod order;
pub mod polyhedra;
pub mod toric;
pub mod transform;
pub mod triangulate;
pub mod verify;
pub mod worstcase;

pub use error::{Error, Result};
pub use flowcore::{
    Cell, DirectedGraph, FlowPolytopeSpec, IntegerFlow, PointList, TransportationSpec,
    DEFAULT_POINT_CAP,
};
pub use order::TermOrder;
pub use toric::{Binomial, ExponentVector, GroebnerBasis};
