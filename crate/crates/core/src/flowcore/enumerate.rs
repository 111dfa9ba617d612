use super::spec::{FlowPolytopeSpec, PointList};
use crate::error::{Error, Result};

/// Default cap on the number of enumerated lattice points.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

struct Search<'a> {
    spec: &'a FlowPolytopeSpec,
    // rem_min[i][v] / rem_max[i][v]: extreme net inflow at v from arcs i..
    rem_min: Vec<Vec<i64>>,
    rem_max: Vec<Vec<i64>>,
    net: Vec<i64>,
    current: Vec<i64>,
    out: Vec<Vec<i64>>,
    cap: usize,
}

impl Search<'_> {
    fn feasible_at(&self, v: usize, i: usize) -> bool {
        let need = self.spec.demand()[v] - self.net[v];
        self.rem_min[i][v] <= need && need <= self.rem_max[i][v]
    }

    fn run(&mut self, i: usize) -> Result<()> {
        let arcs = self.spec.graph().arcs();
        if i == arcs.len() {
            if self.out.len() == self.cap {
                return Err(Error::CapExceeded { what: "lattice point count", cap: self.cap });
            }
            self.out.push(self.current.clone());
            return Ok(());
        }
        let arc = &arcs[i];
        let (t, h) = (arc.tail, arc.head);
        for x in self.spec.lower()[i]..=self.spec.upper()[i] {
            self.net[h] += x;
            self.net[t] -= x;
            self.current.push(x);
            if self.feasible_at(t, i + 1) && self.feasible_at(h, i + 1) {
                self.run(i + 1)?;
            }
            self.current.pop();
            self.net[h] -= x;
            self.net[t] += x;
        }
        Ok(())
    }
}

/// All integral flows of the polytope as arc-value vectors, in
/// lexicographic order of the arc values (arcs in declaration order).
pub fn enumerate_flows(spec: &FlowPolytopeSpec, cap: usize) -> Result<Vec<Vec<i64>>> {
    let g = spec.graph();
    let (nv, na) = (g.vertex_count(), g.arc_count());
    let mut rem_min = vec![vec![0; nv]; na + 1];
    let mut rem_max = vec![vec![0; nv]; na + 1];
    for i in (0..na).rev() {
        let mut lo = rem_min[i + 1].clone();
        let mut hi = rem_max[i + 1].clone();
        let arc = &g.arcs()[i];
        if !arc.is_loop() {
            let (l, u) = (spec.lower()[i], spec.upper()[i]);
            lo[arc.head] += l;
            hi[arc.head] += u;
            lo[arc.tail] -= u;
            hi[arc.tail] -= l;
        }
        rem_min[i] = lo;
        rem_max[i] = hi;
    }
    let mut search = Search {
        spec,
        rem_min,
        rem_max,
        net: vec![0; nv],
        current: Vec::with_capacity(na),
        out: Vec::new(),
        cap,
    };
    if (0..nv).all(|v| search.feasible_at(v, 0)) {
        search.run(0)?;
    }
    Ok(search.out)
}

/// The lattice points of the polytope as a [`PointList`], each once, in
/// lexicographic order. Homogenized specs report a leading coordinate 1.
pub fn enumerate_lattice_points(spec: &FlowPolytopeSpec, cap: usize) -> Result<PointList> {
    let flows = enumerate_flows(spec, cap)?;
    PointList::new(flows.iter().map(|f| spec.embed(f)).collect())
}

impl FlowPolytopeSpec {
    pub fn lattice_points(&self, cap: usize) -> Result<PointList> {
        enumerate_lattice_points(self, cap)
    }
}

impl super::spec::TransportationSpec {
    /// Lattice points as row-major tables.
    pub fn lattice_points(&self, cap: usize) -> Result<PointList> {
        enumerate_lattice_points(&self.to_flow(), cap)
    }
}
