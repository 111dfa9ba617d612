//! A lazy Metropolis walk on a fiber, driven by a move set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MoveIndex, MoveSet};
use crate::error::{Error, Result};
use crate::flowcore::{FlowPolytopeSpec, PointList};
use crate::netflow::bvn_decompose;
use crate::toric::ExponentVector;

/// Seeded random walk whose stationary law is uniform on the connected
/// component of the start. Each step stays put with probability 1/2;
/// otherwise it proposes a uniformly chosen applicable (move, direction)
/// and accepts with probability `min(1, |A(u)| / |A(u')|)`.
#[derive(Debug, Clone)]
pub struct FiberWalk<'a> {
    points: &'a PointList,
    index: MoveIndex,
    state: ExponentVector,
    image: Vec<i64>,
    rng: ChaCha8Rng,
}

impl<'a> FiberWalk<'a> {
    pub fn new(points: &'a PointList, moves: &MoveSet, start: ExponentVector, seed: u64) -> Self {
        let image = start.image(points);
        Self { points, index: MoveIndex::new(moves), state: start, image, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn state(&self) -> &ExponentVector {
        &self.state
    }

    /// Neighbours reachable by one applicable (move, direction), listed
    /// with multiplicity.
    pub fn applicable(&self, u: &ExponentVector) -> Vec<ExponentVector> {
        self.index.neighbours(u)
    }

    pub fn step(&mut self) -> &ExponentVector {
        if self.rng.gen_bool(0.5) {
            return &self.state;
        }
        let here = self.applicable(&self.state);
        if here.is_empty() {
            return &self.state;
        }
        let next = here[self.rng.gen_range(0..here.len())].clone();
        let there = self.applicable(&next).len();
        let accept = (here.len() as f64 / there as f64).min(1.0);
        if self.rng.gen::<f64>() < accept {
            assert_eq!(next.image(self.points), self.image, "move left the fiber");
            assert_eq!(next.degree(), self.state.degree());
            self.state = next;
        }
        &self.state
    }
}

/// A fiber element over `target` (in point coordinates) obtained by
/// decomposing it into `k` lattice points.
pub fn fiber_start(spec: &FlowPolytopeSpec, points: &PointList, target: &[i64], k: usize) -> Result<ExponentVector> {
    if target.len() != points.dimension() {
        return Err(Error::IndexMismatch { expected: points.dimension(), found: target.len() });
    }
    if spec.is_homogenized() && target[0] != k as i64 {
        return Err(Error::OutsidePolytope(format!("leading coordinate {} differs from k = {k}", target[0])));
    }
    let parts = bvn_decompose(spec, spec.flow_part(target), k)?;
    parts
        .parts
        .iter()
        .map(|f| points.index_of(&spec.embed(f.values())).ok_or_else(|| Error::pre("point list is not the spec's")))
        .collect::<Result<Vec<_>>>()
        .map(ExponentVector::from_indices)
}

/// Run the walk for `steps` steps from a decomposition of `target` and
/// return the final state.
pub fn sample_fiber(
    spec: &FlowPolytopeSpec,
    points: &PointList,
    target: &[i64],
    k: usize,
    moves: &MoveSet,
    steps: usize,
    seed: u64,
) -> Result<ExponentVector> {
    let start = fiber_start(spec, points, target, k)?;
    let mut walk = FiberWalk::new(points, moves, start, seed);
    for _ in 0..steps {
        walk.step();
    }
    Ok(walk.state().clone())
}
