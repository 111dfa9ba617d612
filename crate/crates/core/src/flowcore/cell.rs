use std::collections::BTreeSet;

use super::enumerate::enumerate_flows;
use super::spec::FlowPolytopeSpec;
use crate::error::{Error, Result};

/// The cell `Z_F(k) = { f in F : k <= f <= k + 1 }`, stored as its offset
/// and the tightened flow polytope with bounds `max(l, k)` and `min(u, k+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    offset: Vec<i64>,
    spec: FlowPolytopeSpec,
}

impl Cell {
    /// The closed cell of `parent` at offset `k`.
    pub fn new(parent: &FlowPolytopeSpec, offset: Vec<i64>) -> Result<Self> {
        if offset.len() != parent.arc_count() {
            return Err(Error::IndexMismatch { expected: parent.arc_count(), found: offset.len() });
        }
        let lower: Vec<i64> = parent.lower().iter().zip(&offset).map(|(&l, &k)| l.max(k)).collect();
        let upper: Vec<i64> = parent.upper().iter().zip(&offset).map(|(&u, &k)| u.min(k + 1)).collect();
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::pre(format!("offset {offset:?} does not meet the bounds of the polytope")));
        }
        let spec = parent.with_bounds(lower, upper)?;
        Ok(Self { offset, spec })
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    /// The tightened flow polytope whose lattice points are the cell's.
    pub fn spec(&self) -> &FlowPolytopeSpec {
        &self.spec
    }

    pub fn contains(&self, flow: &[i64]) -> bool {
        self.spec.contains(flow)
    }

    /// Lattice points of the closed cell as arc-value vectors.
    pub fn flows(&self, cap: usize) -> Result<Vec<Vec<i64>>> {
        enumerate_flows(&self.spec, cap)
    }

    /// The cell translated by `-k`: a flow polytope with 0/1 bounds and
    /// demand `d - M k`.
    pub fn translated_spec(&self) -> FlowPolytopeSpec {
        let g = self.spec.graph();
        let mk = g.net_inflow(&self.offset);
        let demand = self.spec.demand().iter().zip(&mk).map(|(d, x)| d - x).collect();
        let lower = self.spec.lower().iter().zip(&self.offset).map(|(l, k)| l - k).collect();
        let upper = self.spec.upper().iter().zip(&self.offset).map(|(u, k)| u - k).collect();
        self.spec
            .with_demand_and_bounds(demand, lower, upper)
            .expect("translation preserves validity")
    }

    /// Translate a flow of this cell into `{0,1}^A`.
    pub fn translate(&self, flow: &[i64]) -> Vec<i64> {
        flow.iter().zip(&self.offset).map(|(f, k)| f - k).collect()
    }
}

/// Canonical offset of a flow: `k_a = f_a` unless `f_a` sits on the upper
/// bound, in which case `k_a = f_a - 1`.
fn canonical_offset(spec: &FlowPolytopeSpec, flow: &[i64]) -> Vec<i64> {
    flow.iter()
        .zip(spec.upper())
        .map(|(&f, &u)| if f < u { f } else { f - 1 })
        .collect()
}

/// The canonical cell of a lattice point.
pub fn cell_of(spec: &FlowPolytopeSpec, flow: &[i64]) -> Result<Cell> {
    if let Some(msg) = spec.violation(flow) {
        return Err(Error::OutsidePolytope(msg));
    }
    Cell::new(spec, canonical_offset(spec, flow))
}

/// Every cell that is canonical for at least one lattice point, each once,
/// in order of the first point that selects it. These cells partition the
/// lattice points.
pub fn enumerate_nonempty_cells(spec: &FlowPolytopeSpec, cap: usize) -> Result<Vec<Cell>> {
    let mut seen = BTreeSet::new();
    let mut cells = Vec::new();
    for f in enumerate_flows(spec, cap)? {
        let k = canonical_offset(spec, &f);
        if seen.insert(k.clone()) {
            cells.push(Cell::new(spec, k)?);
        }
    }
    Ok(cells)
}

/// The inclusion-maximal closed cells: the maximal faces of the hyperplane
/// subdivision. Sorted by offset.
pub fn maximal_cells(spec: &FlowPolytopeSpec, cap: usize) -> Result<Vec<Cell>> {
    let flows = enumerate_flows(spec, cap)?;
    let (l, u) = (spec.lower(), spec.upper());
    let mut offsets = BTreeSet::new();
    for f in &flows {
        // Per arc, only the slabs that are not strictly contained in another
        // slab through f can give a maximal cell.
        let choices: Vec<Vec<i64>> = f
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let mut c = Vec::with_capacity(2);
                if x > l[a] {
                    c.push(x - 1);
                }
                if x < u[a] || c.is_empty() {
                    c.push(x);
                }
                c
            })
            .collect();
        let mut idx = vec![0usize; choices.len()];
        loop {
            offsets.insert(idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect::<Vec<i64>>());
            let mut a = choices.len();
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < choices[a].len() {
                    break;
                }
                idx[a] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    let mut candidates: Vec<(Vec<i64>, BTreeSet<usize>)> = offsets
        .into_iter()
        .map(|k| {
            let members = flows
                .iter()
                .enumerate()
                .filter(|(_, f)| f.iter().zip(&k).all(|(&x, &o)| o <= x && x <= o + 1))
                .map(|(i, _)| i)
                .collect();
            (k, members)
        })
        .collect();
    // Larger point sets first so containment checks only look backwards.
    candidates.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));
    let mut kept: Vec<(Vec<i64>, BTreeSet<usize>)> = Vec::new();
    for (k, members) in candidates {
        if kept.iter().any(|(_, big)| members.is_subset(big)) {
            continue;
        }
        kept.push((k, members));
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    kept.into_iter().map(|(k, _)| Cell::new(spec, k)).collect()
}

/// Exchange zeroes and ones in a cell: the result is the offset-0 cell of
/// the flow polytope with demand `M 1 - d'`, where `d'` is the translated
/// demand, and bounds `1 - u'`, `1 - l'`.
pub fn complement_cell(z: &Cell) -> Result<Cell> {
    let t = z.translated_spec();
    let na = t.arc_count();
    let ones = vec![1; na];
    let m1 = t.graph().net_inflow(&ones);
    let demand = m1.iter().zip(t.demand()).map(|(a, d)| a - d).collect();
    let lower = t.upper().iter().map(|u| 1 - u).collect();
    let upper = t.lower().iter().map(|l| 1 - l).collect();
    let spec = t.with_demand_and_bounds(demand, lower, upper)?;
    Ok(Cell { offset: vec![0; na], spec })
}
