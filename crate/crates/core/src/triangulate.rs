//! Pulling triangulations of cells, unimodularity, minimal non-faces and
//! the cross-cell check for the global subdivide-and-pull triangulation.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcore::{maximal_cells, FlowPolytopeSpec, PointList};
use crate::linalg;
use crate::polyhedra;

/// Maximal simplices over a point list, each a sorted list of indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangulation {
    #[serde(skip)]
    pub points: PointList,
    pub dimension: usize,
    pub simplices: Vec<Vec<usize>>,
}

fn check_ranking(ranking: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut pos = vec![usize::MAX; n];
    if ranking.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    for (k, &r) in ranking.iter().enumerate() {
        if r >= n || pos[r] != usize::MAX {
            return Err(Error::NotAPermutation(n));
        }
        pos[r] = k;
    }
    Ok(pos)
}

fn pull(points: &[Vec<i64>], subset: &[usize], pos: &[usize]) -> Vec<Vec<usize>> {
    let sub: Vec<Vec<i64>> = subset.iter().map(|&i| points[i].clone()).collect();
    let dim = linalg::affine_dimension(&sub).unwrap_or(0);
    if subset.len() == dim + 1 {
        return vec![subset.to_vec()];
    }
    // The ranking-minimal point (latest in the ranking) is pulled first.
    let v = *subset.iter().max_by_key(|&&i| pos[i]).expect("nonempty subset");
    let mut out = Vec::new();
    for facet in polyhedra::facets(&sub) {
        let members: Vec<usize> = facet.iter().map(|&k| subset[k]).collect();
        if members.contains(&v) {
            continue;
        }
        for mut s in pull(points, &members, pos) {
            s.push(v);
            s.sort_unstable();
            out.push(s);
        }
    }
    out
}

/// The pulling triangulation: pull the ranking-minimal point, cone over the
/// pulling triangulations of the facets that miss it, recursively.
/// `pull_ranking` lists points from most expensive to minimal.
pub fn pulling_triangulation(points: &PointList, pull_ranking: &[usize]) -> Result<Triangulation> {
    let pos = check_ranking(pull_ranking, points.len())?;
    if points.is_empty() {
        return Ok(Triangulation { points: points.clone(), dimension: 0, simplices: Vec::new() });
    }
    let all: Vec<usize> = (0..points.len()).collect();
    let dimension = linalg::affine_dimension(points.points()).unwrap_or(0);
    let mut simplices = pull(points.points(), &all, &pos);
    simplices.sort();
    Ok(Triangulation { points: points.clone(), dimension, simplices })
}

impl Triangulation {
    fn edges(&self, s: &[usize]) -> Vec<Vec<i64>> {
        let pts: Vec<Vec<i64>> = s.iter().map(|&i| self.points[i].clone()).collect();
        linalg::differences(&pts)
    }

    /// Normalized volume of a simplex relative to the lattice of the affine
    /// span of the whole point set.
    pub fn normalized_volume(&self, simplex: &[usize]) -> u128 {
        linalg::maximal_minor_gcd(&self.edges(simplex)).unsigned_abs()
    }

    /// Whether the simplex's vertices are affinely independent.
    pub fn is_full_simplex(&self, simplex: &[usize]) -> bool {
        simplex.len() == self.dimension + 1 && linalg::rank(&self.edges(simplex)) == self.dimension
    }

    /// Points used as vertices by some simplex.
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.simplices.iter().flatten().copied().collect()
    }
}

/// Every maximal simplex has normalized volume 1.
pub fn is_unimodular(t: &Triangulation) -> bool {
    t.simplices.iter().all(|s| t.is_full_simplex(s) && t.normalized_volume(s) == 1)
}

fn faces_of(simplices: &[Vec<usize>]) -> HashSet<Vec<usize>> {
    let mut faces = HashSet::new();
    for s in simplices {
        for mask in 0u64..(1 << s.len()) {
            faces.insert((0..s.len()).filter(|&k| mask >> k & 1 == 1).map(|k| s[k]).collect::<Vec<_>>());
        }
    }
    faces
}

/// Inclusion-minimal vertex sets of size at most `max_size` that span no
/// simplex, found by increasing size.
pub fn minimal_nonfaces_of(n: usize, simplices: &[Vec<usize>], max_size: usize) -> Vec<Vec<usize>> {
    let faces = faces_of(simplices);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for size in 1..=max_size {
        let mut next = Vec::new();
        for f in &layer {
            let start = f.last().map_or(0, |&x| x + 1);
            for p in start..n {
                let mut s = f.clone();
                s.push(p);
                if faces.contains(&s) {
                    next.push(s);
                } else if (0..size).all(|skip| {
                    let sub: Vec<usize> = s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &x)| x).collect();
                    faces.contains(&sub)
                }) {
                    out.push(s);
                }
            }
        }
        layer = next;
    }
    out
}

/// Minimal non-faces of a triangulation up to `max_size` (at least 2).
pub fn minimal_nonfaces(t: &Triangulation, max_size: usize) -> Result<Vec<Vec<usize>>> {
    if max_size < 2 {
        return Err(Error::pre("max_size must be at least 2"));
    }
    Ok(minimal_nonfaces_of(t.points.len(), &t.simplices, max_size))
}

/// The global subdivide-and-pull triangulation of a flow polytope: the
/// union of the pulling triangulations of its maximal cells under one
/// global ranking. Simplices index into `points`.
pub fn global_triangulation(
    spec: &FlowPolytopeSpec,
    points: &PointList,
    pull_ranking: &[usize],
    cap: usize,
) -> Result<(Triangulation, Vec<Vec<usize>>)> {
    let pos = check_ranking(pull_ranking, points.len())?;
    let mut cells_idx = Vec::new();
    let mut simplices = BTreeSet::new();
    for cell in maximal_cells(spec, cap)? {
        let members: Vec<usize> = cell
            .flows(cap)?
            .iter()
            .map(|f| {
                points
                    .index_of(&spec.embed(f))
                    .ok_or_else(|| Error::pre("point list does not contain every lattice point"))
            })
            .collect::<Result<_>>()?;
        let sub = points.select(&members);
        let mut local: Vec<usize> = (0..members.len()).collect();
        local.sort_by_key(|&k| pos[members[k]]);
        let t = pulling_triangulation(&sub, &local)?;
        for s in t.simplices {
            let mut g: Vec<usize> = s.iter().map(|&k| members[k]).collect();
            g.sort_unstable();
            simplices.insert(g);
        }
        let mut m = members;
        m.sort_unstable();
        cells_idx.push(m);
    }
    let dimension = linalg::affine_dimension(points.points()).unwrap_or(0);
    Ok((
        Triangulation { points: points.clone(), dimension, simplices: simplices.into_iter().collect() },
        cells_idx,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCellReport {
    pub cells: usize,
    pub simplices: usize,
    pub minimal_nonfaces: usize,
    pub cross_cell_nonfaces: usize,
    /// Cross-cell minimal non-faces whose size is not 2.
    pub counterexamples: Vec<Vec<usize>>,
    pub ok: bool,
}

/// Every minimal non-face of the global triangulation that is not inside a
/// single cell has exactly two elements. Non-faces are searched up to
/// `max_size`.
pub fn cross_cell_nonface_check(
    spec: &FlowPolytopeSpec,
    points: &PointList,
    pull_ranking: &[usize],
    max_size: usize,
    cap: usize,
) -> Result<CrossCellReport> {
    let (t, cells) = global_triangulation(spec, points, pull_ranking, cap)?;
    let nonfaces = minimal_nonfaces(&t, max_size.max(2))?;
    let cell_sets: Vec<HashSet<usize>> = cells.iter().map(|c| c.iter().copied().collect()).collect();
    let cross: Vec<&Vec<usize>> = nonfaces
        .iter()
        .filter(|s| !cell_sets.iter().any(|c| s.iter().all(|i| c.contains(i))))
        .collect();
    let counterexamples: Vec<Vec<usize>> = cross.iter().filter(|s| s.len() != 2).map(|s| (*s).clone()).collect();
    Ok(CrossCellReport {
        cells: cells.len(),
        simplices: t.simplices.len(),
        minimal_nonfaces: nonfaces.len(),
        cross_cell_nonfaces: cross.len(),
        ok: counterexamples.is_empty(),
        counterexamples,
    })
}
