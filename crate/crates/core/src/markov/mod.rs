//! Degree-2/3 moves, fibers and their connectivity, the distance-reducing
//! rewrite on cells of transportation polytopes, and a fiber random walk.

mod pattern;
mod walk;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcore::{maximal_cells, FlowPolytopeSpec, PointList};
use crate::toric::{Binomial, ExponentVector};

pub use pattern::{distance_reduce, forbidden_pattern, hamming, support_distance, PatternVariant, Reduction, Side, Witness};
pub use walk::{fiber_start, sample_fiber, FiberWalk};

/// Default cap on fiber sizes.
pub const DEFAULT_FIBER_CAP: usize = 20_000;

/// A plain set of moves `x^u - x^v` with disjoint supports. Moves are
/// stored with `lead > trail` in the lexicographic order of exponent maps,
/// which is only a canonical orientation, not a term order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    pub moves: Vec<Binomial>,
}

fn oriented(a: ExponentVector, b: ExponentVector) -> Binomial {
    if a > b {
        Binomial { lead: a, trail: b }
    } else {
        Binomial { lead: b, trail: a }
    }
}

impl MoveSet {
    pub fn new(moves: impl IntoIterator<Item = Binomial>) -> Self {
        let set: BTreeSet<(ExponentVector, ExponentVector)> = moves
            .into_iter()
            .map(|b| {
                let o = oriented(b.lead, b.trail);
                (o.lead, o.trail)
            })
            .collect();
        Self { moves: set.into_iter().map(|(lead, trail)| Binomial { lead, trail }).collect() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn of_degree(&self, d: u32) -> MoveSet {
        Self { moves: self.moves.iter().filter(|b| b.degree() == d).cloned().collect() }
    }

    pub fn count_of_degree(&self, d: u32) -> usize {
        self.moves.iter().filter(|b| b.degree() == d).count()
    }

    /// Side → opposite sides, for both orientations of every move.
    pub(crate) fn side_index(&self) -> HashMap<ExponentVector, Vec<ExponentVector>> {
        let mut index: HashMap<ExponentVector, Vec<ExponentVector>> = HashMap::new();
        for b in &self.moves {
            index.entry(b.lead.clone()).or_default().push(b.trail.clone());
            index.entry(b.trail.clone()).or_default().push(b.lead.clone());
        }
        index
    }
}

/// All multisets of size `k` over `indices`, in lexicographic order.
pub(crate) fn multisets(indices: &[usize], k: usize) -> Vec<ExponentVector> {
    fn go(ix: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<ExponentVector>) {
        if cur.len() == k {
            out.push(ExponentVector::from_indices(cur.iter().copied()));
            return;
        }
        for s in start..ix.len() {
            cur.push(ix[s]);
            go(ix, k, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(indices, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `k` over `indices`, grouped by image; groups in order
/// of first appearance.
pub(crate) fn group_by_image(points: &PointList, indices: &[usize], k: usize, cap: usize) -> Result<Vec<Fiber>> {
    let mut slot: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut groups: Vec<Fiber> = Vec::new();
    let mut total = 0usize;
    for u in multisets(indices, k) {
        total += 1;
        if total > cap {
            return Err(Error::CapExceeded { what: "multiset count", cap });
        }
        let img = u.image(points);
        let at = *slot.entry(img.clone()).or_insert_with(|| {
            groups.push(Fiber { target: img, degree: k, elements: Vec::new() });
            groups.len() - 1
        });
        groups[at].elements.push(u);
    }
    Ok(groups)
}

/// All relations `u - v` of degree `k` with disjoint supports among the
/// given points.
fn relations_within(points: &PointList, indices: &[usize], k: usize, cap: usize) -> Result<Vec<Binomial>> {
    let mut out = Vec::new();
    for g in group_by_image(points, indices, k, cap)? {
        for (i, a) in g.elements.iter().enumerate() {
            for b in &g.elements[i + 1..] {
                if a.is_coprime(b) {
                    out.push(oriented(a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// The generating moves: every degree-2 relation with disjoint supports on
/// all lattice points, and every degree-3 relation with disjoint supports
/// inside one maximal cell. `points` must be the lattice points of `spec`
/// as produced by [`FlowPolytopeSpec::lattice_points`].
pub fn generate_moves_deg23(spec: &FlowPolytopeSpec, points: &PointList, cap: usize) -> Result<MoveSet> {
    let all: Vec<usize> = (0..points.len()).collect();
    let mut moves = relations_within(points, &all, 2, cap)?;
    for cell in maximal_cells(spec, cap)? {
        let members: Vec<usize> = cell
            .flows(cap)?
            .iter()
            .map(|f| points.index_of(&spec.embed(f)).ok_or_else(|| Error::pre("point list is not the spec's")))
            .collect::<Result<_>>()?;
        moves.extend(relations_within(points, &members, 3, cap)?);
    }
    Ok(MoveSet::new(moves))
}

/// All degree-`k` relations with disjoint supports on the whole point set
/// (the exhaustive kernel census used as an oracle).
pub fn relation_census(points: &PointList, k: usize, cap: usize) -> Result<Vec<Binomial>> {
    let all: Vec<usize> = (0..points.len()).collect();
    let mut r = relations_within(points, &all, k, cap)?;
    r.sort_by(|a, b| (&a.lead, &a.trail).cmp(&(&b.lead, &b.trail)));
    Ok(r)
}

/// All degree-`k` multisets with image `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fiber {
    pub target: Vec<i64>,
    pub degree: usize,
    pub elements: Vec<ExponentVector>,
}

impl Fiber {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Enumerate the fiber over `target` in degree `k` by backtracking over
/// point indices with coordinate-range pruning.
pub fn enumerate_fiber(points: &PointList, target: &[i64], k: usize, cap: usize) -> Result<Fiber> {
    if k == 0 {
        return Err(Error::pre("fiber degree must be positive"));
    }
    if target.len() != points.dimension() {
        return Err(Error::IndexMismatch { expected: points.dimension(), found: target.len() });
    }
    let dim = target.len();
    let lo: Vec<i64> = (0..dim).map(|c| points.iter().map(|p| p[c]).min().unwrap_or(0)).collect();
    let hi: Vec<i64> = (0..dim).map(|c| points.iter().map(|p| p[c]).max().unwrap_or(0)).collect();
    struct Search<'a> {
        points: &'a PointList,
        lo: Vec<i64>,
        hi: Vec<i64>,
        rest: Vec<i64>,
        cur: Vec<usize>,
        out: Vec<ExponentVector>,
        cap: usize,
    }
    impl Search<'_> {
        fn run(&mut self, start: usize, left: usize) -> Result<()> {
            if left == 0 {
                if self.rest.iter().all(|&x| x == 0) {
                    if self.out.len() == self.cap {
                        return Err(Error::CapExceeded { what: "fiber size", cap: self.cap });
                    }
                    self.out.push(ExponentVector::from_indices(self.cur.iter().copied()));
                }
                return Ok(());
            }
            let l = left as i64;
            let feasible = self
                .rest
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&r, (&a, &b))| l * a <= r && r <= l * b);
            if !feasible {
                return Ok(());
            }
            for i in start..self.points.len() {
                let p = self.points.get(i);
                self.rest.iter_mut().zip(p).for_each(|(r, x)| *r -= x);
                self.cur.push(i);
                self.run(i, left - 1)?;
                self.cur.pop();
                self.rest.iter_mut().zip(p).for_each(|(r, x)| *r += x);
            }
            Ok(())
        }
    }
    let mut s = Search { points, lo, hi, rest: target.to_vec(), cur: Vec::new(), out: Vec::new(), cap };
    s.run(0, k)?;
    Ok(Fiber { target: target.to_vec(), degree: k, elements: s.out })
}

/// Every nonempty fiber of degree `k`.
pub fn all_fibers(points: &PointList, k: usize, cap: usize) -> Result<Vec<Fiber>> {
    let all: Vec<usize> = (0..points.len()).collect();
    group_by_image(points, &all, k, cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    /// Element indices per component; components ordered by their least
    /// element.
    pub components: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Sub-multisets of `u` with exactly `k` elements.
fn sub_multisets(u: &ExponentVector, k: usize) -> Vec<ExponentVector> {
    let pairs: Vec<(usize, u32)> = u.iter().collect();
    let mut out = Vec::new();
    fn go(pairs: &[(usize, u32)], at: usize, left: usize, cur: &mut Vec<(usize, u32)>, out: &mut Vec<ExponentVector>) {
        if left == 0 {
            out.push(ExponentVector::from_pairs(cur.iter().copied()));
            return;
        }
        if at == pairs.len() {
            return;
        }
        let (i, m) = pairs[at];
        for take in (0..=(m as usize).min(left)).rev() {
            if take > 0 {
                cur.push((i, take as u32));
            }
            go(pairs, at + 1, left - take, cur, out);
            if take > 0 {
                cur.pop();
            }
        }
    }
    go(&pairs, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Move sides indexed for repeated connectivity checks.
#[derive(Debug, Clone)]
pub struct MoveIndex {
    index: HashMap<ExponentVector, Vec<ExponentVector>>,
    sizes: Vec<usize>,
}

impl MoveIndex {
    pub fn new(moves: &MoveSet) -> Self {
        let index = moves.side_index();
        let sizes: BTreeSet<usize> = index.keys().map(|s| s.degree() as usize).collect();
        Self { index, sizes: sizes.into_iter().collect() }
    }

    /// Every element reachable from `u` by one move application, with
    /// multiplicity.
    pub fn neighbours(&self, u: &ExponentVector) -> Vec<ExponentVector> {
        let mut out = Vec::new();
        for &k in &self.sizes {
            if k > u.degree() as usize {
                continue;
            }
            for side in sub_multisets(u, k) {
                let Some(others) = self.index.get(&side) else { continue };
                let rest = u.div(&side).expect("sub-multiset divides");
                out.extend(others.iter().map(|o| rest.mul(o)));
            }
        }
        out
    }

    pub fn components(&self, fiber: &Fiber) -> Connectivity {
        let position: HashMap<&ExponentVector, usize> =
            fiber.elements.iter().enumerate().map(|(i, u)| (u, i)).collect();
        let n = fiber.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for (i, u) in fiber.elements.iter().enumerate() {
            for w in self.neighbours(u) {
                if let Some(&j) = position.get(&w) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().push(i);
        }
        let mut components: Vec<Vec<usize>> = comps.into_values().collect();
        components.sort();
        Connectivity { connected: components.len() <= 1, components }
    }
}

/// Components of the fiber graph: two elements are adjacent when a move
/// times a monomial carries one to the other.
pub fn fiber_connected(fiber: &Fiber, moves: &MoveSet) -> Connectivity {
    MoveIndex::new(moves).components(fiber)
}

#[cfg(test)]
mod tests;
