//! Splitting every vertex of a flow network into a source copy and a sink
//! copy, which turns any flow polytope into one on a bipartite graph with
//! all arcs pointing the same way, without changing its lattice points.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcore::{enumerate_flows, DirectedGraph, FlowPolytopeSpec, PointList};
use crate::markov::{all_fibers, relation_census};
use crate::toric::ExponentVector;

#[derive(Debug, Clone)]
pub struct BipartizeResult {
    /// The original network.
    pub source: FlowPolytopeSpec,
    /// The split network: arcs `(v', w'')` inherit the original arcs in
    /// order, followed by one slack arc `(v', v'')` per vertex.
    pub spec: FlowPolytopeSpec,
    /// The capacity constant; also the (finite) upper bound of every slack
    /// arc.
    pub capacity: i64,
}

/// Split `spec`'s graph. `N` is the largest total upper bound on the
/// arcs leaving or entering a single vertex.
pub fn bipartize(spec: &FlowPolytopeSpec) -> Result<BipartizeResult> {
    let g = spec.graph();
    let nv = g.vertex_count();
    let mut out_cap = vec![0i64; nv];
    let mut in_cap = vec![0i64; nv];
    for (a, &u) in g.arcs().iter().zip(spec.upper()) {
        out_cap[a.tail] = out_cap[a.tail].checked_add(u).ok_or_else(|| Error::spec("capacity overflow"))?;
        in_cap[a.head] = in_cap[a.head].checked_add(u).ok_or_else(|| Error::spec("capacity overflow"))?;
    }
    let capacity = out_cap.iter().chain(&in_cap).copied().max().unwrap_or(0);
    let tail = |v: &str| format!("{v}'");
    let head = |v: &str| format!("{v}''");
    let vertices: Vec<String> = g.vertices().iter().map(|v| tail(v)).chain(g.vertices().iter().map(|v| head(v))).collect();
    let mut arcs: Vec<(String, String, String)> = g
        .arcs()
        .iter()
        .map(|a| (a.id.clone(), tail(&g.vertices()[a.tail]), head(&g.vertices()[a.head])))
        .collect();
    let mut lower = spec.lower().to_vec();
    let mut upper = spec.upper().to_vec();
    for v in g.vertices() {
        let mut id = format!("slack:{v}");
        while arcs.iter().any(|a| a.0 == id) {
            id.push('_');
        }
        arcs.push((id, tail(v), head(v)));
        lower.push(0);
        upper.push(capacity);
    }
    let demand: Vec<i64> = std::iter::repeat_n(-capacity, nv).chain(spec.demand().iter().map(|d| capacity + d)).collect();
    let graph = DirectedGraph::new(vertices, arcs)?;
    let split = FlowPolytopeSpec::new(graph, demand, lower, upper)?;
    Ok(BipartizeResult { source: spec.clone(), spec: split, capacity })
}

impl BipartizeResult {
    fn outflow(&self, f: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.source.graph().vertex_count()];
        for (a, &x) in self.source.graph().arcs().iter().zip(f) {
            out[a.tail] += x;
        }
        out
    }

    /// `φ` on a sum of `k` flows: the arc values followed by the slacks
    /// `kN − outflow(v)`.
    pub fn phi_k(&self, f: &[i64], k: i64) -> Vec<i64> {
        let slack = self.outflow(f).into_iter().map(|o| k * self.capacity - o);
        f.iter().copied().chain(slack).collect()
    }

    pub fn phi(&self, f: &[i64]) -> Vec<i64> {
        self.phi_k(f, 1)
    }

    /// Drop the slack coordinates.
    pub fn phi_inv(&self, g: &[i64]) -> Vec<i64> {
        g[..self.source.arc_count()].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCensus {
    pub degree: usize,
    pub fibers: usize,
    pub fibers_prime: usize,
    pub relations: usize,
    pub relations_prime: usize,
    /// Fibers and relations coincide under the point relabeling.
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub points: usize,
    pub points_prime: usize,
    pub capacity: i64,
    /// `φ` maps the points bijectively onto the split polytope's points
    /// and `φ⁻¹ ∘ φ` is the identity.
    pub bijective: bool,
    /// Slack coordinates equal `N − outflow` on every point.
    pub slack_exact: bool,
    pub additive_pairs_checked: usize,
    pub additive: bool,
    pub degrees: Vec<DegreeCensus>,
    pub passed: bool,
}

fn canonical_fibers(fibers: Vec<crate::markov::Fiber>, relabel: impl Fn(&ExponentVector) -> ExponentVector) -> Vec<Vec<ExponentVector>> {
    let mut out: Vec<Vec<ExponentVector>> = fibers
        .into_iter()
        .map(|f| {
            let mut e: Vec<ExponentVector> = f.elements.iter().map(&relabel).collect();
            e.sort();
            e
        })
        .collect();
    out.sort();
    out
}

/// Check that `φ` identifies the two point configurations as semigroups up
/// to degree `k_max`: same fibers and the same relations after relabeling.
pub fn verify_semigroup_iso(result: &BipartizeResult, k_max: usize, cap: usize) -> Result<IsoReport> {
    let flows = enumerate_flows(&result.source, cap)?;
    let flows_prime = enumerate_flows(&result.spec, cap)?;
    let images: Vec<Vec<i64>> = flows.iter().map(|f| result.phi(f)).collect();
    let position: HashMap<&Vec<i64>, usize> = flows_prime.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let relabel_ix: Option<Vec<usize>> = images.iter().map(|g| position.get(g).copied()).collect();
    let bijective = flows.len() == flows_prime.len()
        && relabel_ix.as_ref().is_some_and(|r| {
            let mut s = r.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == r.len()
        })
        && images.iter().zip(&flows).all(|(g, f)| result.phi_inv(g) == *f);
    let nv = result.source.graph().vertex_count();
    let slack_exact = images.iter().all(|g| {
        let mut out = vec![0i64; nv];
        for (a, &x) in result.source.graph().arcs().iter().zip(&g[..result.source.arc_count()]) {
            out[a.tail] += x;
        }
        g[result.source.arc_count()..].iter().zip(&out).all(|(s, o)| *s == result.capacity - o)
    }) && images.iter().all(|g| result.spec.contains(g));

    // Additivity on sampled pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let pairs = if flows.is_empty() { 0 } else { 200.min(flows.len() * flows.len()) };
    let mut additive = true;
    for _ in 0..pairs {
        let (a, b) = (rng.gen_range(0..flows.len()), rng.gen_range(0..flows.len()));
        let sum: Vec<i64> = flows[a].iter().zip(&flows[b]).map(|(x, y)| x + y).collect();
        let lhs: Vec<i64> = images[a].iter().zip(&images[b]).map(|(x, y)| x + y).collect();
        additive &= lhs == result.phi_k(&sum, 2);
    }

    let mut degrees = Vec::new();
    if bijective && !flows.is_empty() {
        let relabel_ix = relabel_ix.expect("bijective");
        let relabel = |u: &ExponentVector| ExponentVector::from_pairs(u.iter().map(|(i, m)| (relabel_ix[i], m)));
        let points = PointList::new(flows.iter().map(|f| result.source.embed(f)).collect())?;
        let points_prime = PointList::new(flows_prime.iter().map(|g| result.spec.embed(g)).collect())?;
        for k in 1..=k_max {
            let fib = all_fibers(&points, k, cap)?;
            let fib_prime = all_fibers(&points_prime, k, cap)?;
            let (nf, nf_prime) = (fib.len(), fib_prime.len());
            let same_fibers = canonical_fibers(fib, relabel) == canonical_fibers(fib_prime, |u| u.clone());
            let rel = relation_census(&points, k, cap)?;
            let rel_prime = relation_census(&points_prime, k, cap)?;
            let canon = |a: &ExponentVector, b: &ExponentVector| if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            let mut mapped: Vec<_> = rel.iter().map(|r| canon(&relabel(&r.lead), &relabel(&r.trail))).collect();
            let mut theirs: Vec<_> = rel_prime.iter().map(|r| canon(&r.lead, &r.trail)).collect();
            mapped.sort();
            theirs.sort();
            degrees.push(DegreeCensus {
                degree: k,
                fibers: nf,
                fibers_prime: nf_prime,
                relations: rel.len(),
                relations_prime: rel_prime.len(),
                matches: same_fibers && mapped == theirs,
            });
        }
    }
    let passed = bijective && slack_exact && additive && degrees.iter().all(|d| d.matches);
    Ok(IsoReport {
        points: flows.len(),
        points_prime: flows_prime.len(),
        capacity: result.capacity,
        bijective,
        slack_exact,
        additive_pairs_checked: pairs,
        additive,
        degrees,
        passed,
    })
}

/// The `φ` table: each original flow next to its image.
pub fn phi_table(result: &BipartizeResult, cap: usize) -> Result<BTreeMap<String, Vec<i64>>> {
    Ok(enumerate_flows(&result.source, cap)?
        .into_iter()
        .map(|f| (format!("{f:?}"), result.phi(&f)))
        .collect())
}
