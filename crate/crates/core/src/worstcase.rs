//! Explicit relations forcing high-degree reduced Gröbner bases: a degree-2n
//! relation on the Birkhoff polytope `B_{2n}` and a degree-m(n−2)/2 relation
//! on `m × n` transportation polytopes, with the shift to smooth margins.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcore::{PointList, TransportationSpec};
use crate::netflow::bvn_decompose;
use crate::order::{revlex_from_ranking, TermOrder};
use crate::toric::{Binomial, ExponentVector};

pub type Matrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Named {
    pub name: String,
    pub matrix: Matrix,
}

fn named(name: impl Into<String>, matrix: Matrix) -> Named {
    Named { name: name.into(), matrix }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub name: String,
    pub multiplicity: u32,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Birkhoff { n: usize },
    Transportation { m: usize, n: usize, smooth: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseInstance {
    pub family: Family,
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
    /// The building blocks as displayed (`M^i`, `S_n`, `C`, …).
    pub blocks: Vec<Named>,
    /// The family side, in ranking order.
    pub members: Vec<Named>,
    /// The element ranked last.
    pub minimal: Named,
    pub lead: Vec<Term>,
    pub trail: Vec<Term>,
    /// Common total of both sides.
    pub total: Matrix,
}

fn zeros(r: usize, c: usize) -> Matrix {
    vec![vec![0; c]; r]
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// `[[a, b], [c, d]]` from four equally sized blocks.
fn blocks2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    let top = a.iter().zip(b).map(|(x, y)| x.iter().chain(y).copied().collect());
    let bottom = c.iter().zip(d).map(|(x, y)| x.iter().chain(y).copied().collect());
    top.chain(bottom).collect()
}

fn add(a: &Matrix, b: &Matrix, k: i64) -> Matrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + k * q).collect()).collect()
}

fn flat(m: &Matrix) -> Vec<i64> {
    m.iter().flatten().copied().collect()
}

fn sum_terms(terms: &[Term], r: usize, c: usize) -> Matrix {
    terms.iter().fold(zeros(r, c), |acc, t| add(&acc, &t.matrix, i64::from(t.multiplicity)))
}

fn margins(m: &Matrix) -> (Vec<i64>, Vec<i64>) {
    let rows = m.iter().map(|r| r.iter().sum()).collect();
    let cols = (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).sum()).collect();
    (rows, cols)
}

/// The `B_{2n}` family. Blocks use 1-based names with the cyclic convention
/// `n + 1 := 1`.
pub fn birkhoff_family(n: usize) -> Result<WorstCaseInstance> {
    if n < 2 {
        return Err(Error::pre("the Birkhoff family needs n >= 2"));
    }
    let mut blocks = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let next = (i + 1) % n;
        let mut m = zeros(n, n);
        m[i][i] = 1;
        let mut mt = zeros(n, n);
        mt[next][i] = 1;
        let mut nn = identity(n);
        nn[i][i] = 0;
        // Delete column i and row i+1; what remains is an identity.
        let kept_rows: Vec<usize> = (0..n).filter(|&r| r != next).collect();
        let kept_cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let mut nt = zeros(n, n);
        for (r, c) in kept_rows.iter().zip(&kept_cols) {
            nt[*r][*c] = 1;
        }
        a.push(named(format!("A_{}", i + 1), blocks2(&m, &nn, &nt, &mt)));
        b.push(named(format!("B_{}", i + 1), blocks2(&mt, &nt, &nn, &m)));
        blocks.extend([
            named(format!("M^{}", i + 1), m),
            named(format!("M~^{}", i + 1), mt),
            named(format!("N^{}", i + 1), nn),
            named(format!("N~^{}", i + 1), nt),
        ]);
    }
    let s = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 if i == 0 || i == n - 1 => 2 * n as i64 - 3,
                    0 => 2 * n as i64 - 4,
                    1 => 1,
                    _ => 0,
                })
                .collect()
        })
        .collect::<Matrix>();
    let j = (0..n)
        .map(|r| (0..n).map(|c| i64::from(r == c || r == (c + 1) % n)).collect())
        .collect::<Matrix>();
    let total = blocks2(&j, &s, &s, &j);
    blocks.extend([named("S_n", s), named("J_n", j)]);

    let size = 2 * n;
    let members: Vec<Named> = a.into_iter().chain(b).collect();
    for mem in &members {
        let (r, c) = margins(&mem.matrix);
        if r.iter().chain(&c).any(|&x| x != 1) {
            return Err(Error::IdentityFailure(format!("{} is not a permutation matrix", mem.name)));
        }
    }
    let lead: Vec<Term> =
        members.iter().map(|m| Term { name: m.name.clone(), multiplicity: 1, matrix: m.matrix.clone() }).collect();
    if sum_terms(&lead, size, size) != total {
        return Err(Error::IdentityFailure("the family does not sum to [[J_n, S_n], [S_n, J_n]]".into()));
    }
    let t = TransportationSpec::birkhoff(size)?;
    let ident = identity(size);
    let rest = flat(&add(&total, &ident, -1));
    let parts = bvn_decompose(&t.to_flow(), &rest, size - 1)?;
    let minimal = named(format!("I_{size}"), ident);
    let mut trail = vec![Term { name: minimal.name.clone(), multiplicity: 1, matrix: minimal.matrix.clone() }];
    trail.extend(collect_terms(parts.parts.iter().map(|p| t.to_matrix(p.values())), "M_"));
    finish(Family::Birkhoff { n }, t, blocks, members, minimal, lead, trail, total)
}

/// Group equal matrices into terms named `prefix1, prefix2, …` in order of
/// first appearance.
fn collect_terms(mats: impl Iterator<Item = Matrix>, prefix: &str) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for m in mats {
        match out.iter_mut().find(|t| t.matrix == m) {
            Some(t) => t.multiplicity += 1,
            None => out.push(Term { name: format!("{prefix}{}", out.len() + 1), multiplicity: 1, matrix: m }),
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn finish(
    family: Family,
    t: TransportationSpec,
    blocks: Vec<Named>,
    members: Vec<Named>,
    minimal: Named,
    lead: Vec<Term>,
    trail: Vec<Term>,
    total: Matrix,
) -> Result<WorstCaseInstance> {
    let inst = WorstCaseInstance {
        family,
        rows: t.rows().to_vec(),
        cols: t.cols().to_vec(),
        blocks,
        members,
        minimal,
        lead,
        trail,
        total,
    };
    inst.verify()?;
    Ok(inst)
}

/// The `m × n` transportation family on margins `(n/2, …)`, `(m/2, …)`.
pub fn transport_family(m: usize, n: usize) -> Result<WorstCaseInstance> {
    if m < 2 || n < 4 || !m.is_multiple_of(2) || !n.is_multiple_of(2) {
        return Err(Error::pre("the transportation family needs even m >= 2 and even n >= 4"));
    }
    let (h, w) = (m / 2, n / 2);
    let ones = vec![vec![1; w]; h];
    let nothing = zeros(h, w);
    let unit = |i: usize, j: usize| {
        let mut e = zeros(h, w);
        e[i][j] = 1;
        e
    };
    let hole = |i: usize, j: usize| add(&ones, &unit(i, j), -1);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..h {
        for j in 1..w {
            a.push(named(format!("A_{}{}", i + 1, j + 1), blocks2(&unit(i, 0), &hole(i, j), &hole(i, 0), &unit(i, j))));
            b.push(named(format!("B_{}{}", i + 1, j + 1), blocks2(&unit(i, j), &hole(i, 0), &hole(i, j), &unit(i, 0))));
        }
    }
    let e = blocks2(&ones, &nothing, &nothing, &ones);
    let d = blocks2(&nothing, &ones, &ones, &nothing);
    let first_col: Matrix = (0..h).map(|_| (0..w).map(|c| i64::from(c == 0)).collect()).collect();
    let rest_cols = add(&ones, &first_col, -1);
    let c = blocks2(&first_col, &rest_cols, &rest_cols, &first_col);

    let members: Vec<Named> = a.into_iter().chain(b).collect();
    let lead: Vec<Term> =
        members.iter().map(|x| Term { name: x.name.clone(), multiplicity: 1, matrix: x.matrix.clone() }).collect();
    let (mi, ni) = (m as i64, n as i64);
    let c_mult = ni / 2 - 2;
    let d_mult = (mi * (ni - 2) - ni) / 2 + 1;
    let mut trail = Vec::new();
    if c_mult > 0 {
        trail.push(Term { name: "C".into(), multiplicity: c_mult as u32, matrix: c.clone() });
    }
    trail.push(Term { name: "D".into(), multiplicity: d_mult as u32, matrix: d.clone() });
    trail.push(Term { name: "E".into(), multiplicity: 1, matrix: e.clone() });
    let total = sum_terms(&lead, m, n);
    let t = TransportationSpec::new(vec![ni / 2; m], vec![mi / 2; n])?;
    let blocks = vec![named("C", c), named("D", d), named("E", e.clone())];
    finish(Family::Transportation { m, n, smooth: false }, t, blocks, members, named("E", e), lead, trail, total)
}

/// Add `mn` to the last column of every matrix of a transportation
/// instance, moving the relation into a polytope with smooth margins.
pub fn smooth_shift(inst: &WorstCaseInstance) -> Result<WorstCaseInstance> {
    let Family::Transportation { m, n, smooth: false } = inst.family else {
        return Err(Error::pre("smooth_shift applies to an unshifted transportation instance"));
    };
    let shift = (m * n) as i64;
    let bump = |x: &Matrix| -> Matrix {
        x.iter().map(|r| r.iter().enumerate().map(|(j, &v)| if j == n - 1 { v + shift } else { v }).collect()).collect()
    };
    let bump_named = |x: &Named| named(x.name.clone(), bump(&x.matrix));
    let bump_term = |x: &Term| Term { name: x.name.clone(), multiplicity: x.multiplicity, matrix: bump(&x.matrix) };
    let lead: Vec<Term> = inst.lead.iter().map(bump_term).collect();
    let total = sum_terms(&lead, m, n);
    let mut rows = inst.rows.clone();
    rows.iter_mut().for_each(|r| *r += shift);
    let mut cols = inst.cols.clone();
    cols[n - 1] += m as i64 * shift;
    let t = TransportationSpec::new(rows, cols)?;
    finish(
        Family::Transportation { m, n, smooth: true },
        t,
        inst.blocks.iter().map(bump_named).collect(),
        inst.members.iter().map(bump_named).collect(),
        bump_named(&inst.minimal),
        lead,
        inst.trail.iter().map(bump_term).collect(),
        total,
    )
}

impl WorstCaseInstance {
    pub fn spec(&self) -> Result<TransportationSpec> {
        TransportationSpec::new(self.rows.clone(), self.cols.clone())
    }

    pub fn degree(&self) -> u32 {
        self.lead.iter().map(|t| t.multiplicity).sum()
    }

    pub fn trail_degree(&self) -> u32 {
        self.trail.iter().map(|t| t.multiplicity).sum()
    }

    /// The degree the construction is meant to reach.
    pub fn claimed_degree(&self) -> u32 {
        match self.family {
            Family::Birkhoff { n } => 2 * n as u32,
            Family::Transportation { m, n, .. } => (m * (n - 2) / 2) as u32,
        }
    }

    /// Entrywise identity of both sides, margins of every matrix, and the
    /// degree count.
    pub fn verify(&self) -> Result<()> {
        let (r, c) = (self.rows.len(), self.cols.len());
        let t = self.spec()?;
        let flow = t.to_flow();
        let all = self
            .members
            .iter()
            .map(|x| (&x.name, &x.matrix))
            .chain(self.lead.iter().chain(&self.trail).map(|x| (&x.name, &x.matrix)))
            .chain(std::iter::once((&self.minimal.name, &self.minimal.matrix)));
        for (name, mat) in all {
            if let Some(why) = flow.violation(&flat(mat)) {
                return Err(Error::IdentityFailure(format!("{name} is not a lattice point: {why}")));
            }
        }
        if sum_terms(&self.lead, r, c) != self.total || sum_terms(&self.trail, r, c) != self.total {
            return Err(Error::IdentityFailure("the two sides do not sum to the same matrix".into()));
        }
        if self.degree() != self.trail_degree() || self.degree() != self.claimed_degree() {
            return Err(Error::IdentityFailure(format!(
                "degrees {} / {} differ from {}",
                self.degree(),
                self.trail_degree(),
                self.claimed_degree()
            )));
        }
        Ok(())
    }

    fn index(&self, points: &PointList, m: &Matrix) -> Result<usize> {
        points.index_of(&flat(m)).ok_or_else(|| Error::pre("matrix is not in the point list"))
    }

    /// Ranking from most expensive to cheapest: all other points in list
    /// order, then the family members, then the minimal element.
    pub fn ranking_on(&self, points: &PointList) -> Result<Vec<usize>> {
        let special: Vec<usize> = self
            .members
            .iter()
            .map(|x| self.index(points, &x.matrix))
            .chain(std::iter::once(self.index(points, &self.minimal.matrix)))
            .collect::<Result<_>>()?;
        let mut ranking: Vec<usize> = (0..points.len()).filter(|i| !special.contains(i)).collect();
        ranking.extend(special);
        Ok(ranking)
    }

    pub fn term_order(&self, points: &PointList) -> Result<TermOrder> {
        revlex_from_ranking(points, &self.ranking_on(points)?)
    }

    fn side(&self, points: &PointList, terms: &[Term]) -> Result<ExponentVector> {
        let mut u = ExponentVector::new();
        for t in terms {
            u.add_var(self.index(points, &t.matrix)?, t.multiplicity);
        }
        Ok(u)
    }

    /// The relation as a binomial over `points`, family side first.
    pub fn relation_on(&self, points: &PointList) -> Result<Binomial> {
        Ok(Binomial { lead: self.side(points, &self.lead)?, trail: self.side(points, &self.trail)? })
    }

    /// Compare the two sides under the revlex order of the ranking without
    /// enumerating the polytope: only the ranked positions of the matrices
    /// involved matter.
    pub fn lead_is_initial(&self) -> bool {
        // Positions from the cheap end: minimal = 0, members 1.., others after.
        let rank_of = |m: &Matrix| -> usize {
            if *m == self.minimal.matrix {
                0
            } else if let Some(p) = self.members.iter().position(|x| x.matrix == *m) {
                self.members.len() - p
            } else {
                usize::MAX
            }
        };
        let count = |terms: &[Term], r: usize| -> u32 {
            terms.iter().filter(|t| rank_of(&t.matrix) == r).map(|t| t.multiplicity).sum()
        };
        let others = |terms: &[Term]| terms.iter().any(|t| rank_of(&t.matrix) == usize::MAX);
        // Revlex on equal degree: scanning from the cheapest variable, the
        // first difference decides, and more of it means smaller.
        for r in 0..=self.members.len() {
            match count(&self.lead, r).cmp(&count(&self.trail, r)) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        // Only unranked matrices remain; they are ordered by the point list.
        !others(&self.lead) && !others(&self.trail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringReport {
    /// The members together cover every one of the minimal element.
    pub covers_all: bool,
    /// Per member: some one of the minimal element is covered by it alone.
    pub necessary: Vec<bool>,
    /// Per member: some one of it is covered by no other member.
    pub private: Vec<bool>,
    pub passed: bool,
}

/// The two covering facts behind minimality of the family side in the
/// initial ideal.
pub fn covering_certificate(inst: &WorstCaseInstance) -> CoveringReport {
    let mem = &inst.members;
    let low = &inst.minimal.matrix;
    let cells: Vec<(usize, usize)> = (0..low.len())
        .flat_map(|i| (0..low[i].len()).map(move |j| (i, j)))
        .collect();
    let on = |m: &Matrix, i: usize, j: usize| m[i][j] > base_of(inst, j);
    let covered_by = |i: usize, j: usize, skip: usize| mem.iter().enumerate().any(|(k, x)| k != skip && on(&x.matrix, i, j));
    let low_ones: Vec<(usize, usize)> = cells.iter().copied().filter(|&(i, j)| on(low, i, j)).collect();
    let covers_all = low_ones.iter().all(|&(i, j)| covered_by(i, j, usize::MAX));
    let necessary: Vec<bool> = (0..mem.len())
        .map(|k| low_ones.iter().any(|&(i, j)| !covered_by(i, j, k)))
        .collect();
    let private: Vec<bool> = (0..mem.len())
        .map(|k| cells.iter().any(|&(i, j)| on(&mem[k].matrix, i, j) && !covered_by(i, j, k)))
        .collect();
    let passed = covers_all && necessary.iter().all(|&x| x) && private.iter().all(|&x| x);
    CoveringReport { covers_all, necessary, private, passed }
}

/// Entry offset of a shifted instance: everything sits on top of `mn` in
/// the last column.
fn base_of(inst: &WorstCaseInstance, j: usize) -> i64 {
    match inst.family {
        Family::Transportation { m, n, smooth: true } if j == n - 1 => (m * n) as i64,
        _ => 0,
    }
}
