//! Hamming distances between tables and the forbidden 2×2 pattern rewrite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcore::{PointList, TransportationSpec};
use crate::netflow::bvn_decompose;
use crate::toric::ExponentVector;

/// Number of positions where two equally shaped tables differ.
pub fn hamming(a: &[i64], b: &[i64]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::IndexMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Least Hamming distance between a point of `supp(u)` and a point of
/// `supp(v)`, with the first realizing pair of point indices.
pub fn support_distance(points: &PointList, u: &ExponentVector, v: &ExponentVector) -> Result<(usize, usize, usize)> {
    if u.is_one() || v.is_one() {
        return Err(Error::pre("support distance of an empty support"));
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for a in u.support() {
        for b in v.support() {
            let d = hamming(points.get(a), points.get(b))?;
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, a, b));
            }
        }
    }
    Ok(best.expect("nonempty supports"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternVariant {
    /// `M` shows `[[1,0],[0,1]]` and `N` shows `[[0,1],[1,0]]`.
    Exact,
    /// As `Exact`, with one zero of `N`'s block turned into a one.
    TargetFlipped,
    /// As `Exact`, with one zero of `M`'s block turned into a one.
    SourceFlipped,
}

/// Rows `i1 < i2` and columns `j1 != j2` (0-based) of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
    pub variant: PatternVariant,
}

fn block(t: &[Vec<i64>], i1: usize, i2: usize, j1: usize, j2: usize) -> [i64; 4] {
    [t[i1][j1], t[i1][j2], t[i2][j1], t[i2][j2]]
}

const DIAG: [i64; 4] = [1, 0, 0, 1];
const ANTI: [i64; 4] = [0, 1, 1, 0];

fn one_zero_raised(b: [i64; 4], base: [i64; 4]) -> bool {
    let raised: Vec<usize> = (0..4).filter(|&k| b[k] != base[k]).collect();
    raised.len() == 1 && base[raised[0]] == 0 && b[raised[0]] == 1
}

/// Find the forbidden pattern between 0/1 tables `m` and `n`; exact
/// occurrences are preferred over flipped ones, and within a variant the
/// first quadruple in row-then-column order wins.
pub fn forbidden_pattern(m: &[Vec<i64>], n: &[Vec<i64>]) -> Option<Witness> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if n.len() != rows || n.iter().any(|r| r.len() != cols) {
        return None;
    }
    let variants = [PatternVariant::Exact, PatternVariant::TargetFlipped, PatternVariant::SourceFlipped];
    for variant in variants {
        for i1 in 0..rows {
            for i2 in i1 + 1..rows {
                for j1 in 0..cols {
                    for j2 in (0..cols).filter(|&j| j != j1) {
                        let (bm, bn) = (block(m, i1, i2, j1, j2), block(n, i1, i2, j1, j2));
                        let hit = match variant {
                            PatternVariant::Exact => bm == DIAG && bn == ANTI,
                            PatternVariant::TargetFlipped => bm == DIAG && one_zero_raised(bn, ANTI),
                            PatternVariant::SourceFlipped => bn == ANTI && one_zero_raised(bm, DIAG),
                        };
                        if hit {
                            return Some(Witness { i1, i2, j1, j2, variant });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Which side of the relation a reduction rewrote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    /// The side that was rewritten; a pattern flipped on the source side is
    /// handled by rewriting `v` towards `u`.
    pub side: Side,
    pub rewritten: ExponentVector,
    pub witness: Witness,
    pub distance_before: usize,
    pub distance_after: usize,
    /// The degree-3 move `M¹ M² M³ → M̃ A² A³` as point indices.
    pub removed: [usize; 3],
    pub added: [usize; 3],
}

/// One distance-reducing degree-3 rewrite of the relation `u − v` whose
/// supports lie in a common cell of `t`: pick a pair of support points at
/// distance `d̄(u, v)` showing a forbidden pattern, swap the 2×2 block of the
/// source table to get `M̃`, and complete with two more support points whose
/// sum minus the swap splits into two tables.
pub fn distance_reduce(
    t: &TransportationSpec,
    points: &PointList,
    u: &ExponentVector,
    v: &ExponentVector,
) -> Result<Reduction> {
    if u.degree() != v.degree() {
        return Err(Error::pre("u and v have different degrees"));
    }
    if u.image(points) != v.image(points) {
        return Err(Error::pre("u and v lie in different fibers"));
    }
    if u.degree() < 3 {
        return Err(Error::pre("no reducible pattern: degree below 3"));
    }
    let width = t.m() * t.n();
    if points.dimension() != width {
        return Err(Error::IndexMismatch { expected: width, found: points.dimension() });
    }
    let support: Vec<usize> = u.support().chain(v.support()).collect();
    let lo: Vec<i64> = (0..width).map(|c| support.iter().map(|&i| points.get(i)[c]).min().unwrap()).collect();
    if support.iter().any(|&i| points.get(i).iter().zip(&lo).any(|(x, l)| x - l > 1)) {
        return Err(Error::pre("supports do not lie in one cell"));
    }
    let local = |i: usize| -> Vec<Vec<i64>> {
        let p: Vec<i64> = points.get(i).iter().zip(&lo).map(|(x, l)| x - l).collect();
        t.to_matrix(&p)
    };
    let (dbar, _, _) = support_distance(points, u, v)?;
    let flow = t.to_flow();
    for a in u.support() {
        for b in v.support() {
            if hamming(points.get(a), points.get(b))? != dbar {
                continue;
            }
            let Some(w) = forbidden_pattern(&local(a), &local(b)) else { continue };
            let (side, src, from, to) = match w.variant {
                PatternVariant::SourceFlipped => (Side::V, b, v, u),
                _ => (Side::U, a, u, v),
            };
            if let Some(r) = rewrite(t, &flow, points, from, src, &w, side == Side::V)? {
                let rewritten = r.0;
                let after = support_distance(points, &rewritten, to)?.0;
                return Ok(Reduction {
                    side,
                    rewritten,
                    witness: w,
                    distance_before: dbar,
                    distance_after: after,
                    removed: r.1,
                    added: r.2,
                });
            }
        }
    }
    Err(Error::pre("no reducible pattern"))
}

type Rewrite = (ExponentVector, [usize; 3], [usize; 3]);

fn rewrite(
    t: &TransportationSpec,
    flow: &crate::flowcore::FlowPolytopeSpec,
    points: &PointList,
    from: &ExponentVector,
    src: usize,
    w: &Witness,
    reverse: bool,
) -> Result<Option<Rewrite>> {
    let n = t.n();
    let at = |i: usize, j: usize| i * n + j;
    // The rewritten table carries the unflipped block, so the swap stays
    // within the cell; on the v side that block is the anti-diagonal one.
    let s = if reverse { -1 } else { 1 };
    let mut swap = vec![0i64; t.m() * n];
    swap[at(w.i1, w.j1)] = -s;
    swap[at(w.i2, w.j2)] = -s;
    swap[at(w.i1, w.j2)] = s;
    swap[at(w.i2, w.j1)] = s;
    let tilde: Vec<i64> = points.get(src).iter().zip(&swap).map(|(x, s)| x + s).collect();
    let Some(tilde_ix) = points.index_of(&tilde) else {
        return Ok(None);
    };
    let rest = {
        let mut r = from.clone();
        r.remove_var(src, 1);
        r
    };
    let candidates: Vec<usize> = rest.support().collect();
    for (x, &p2) in candidates.iter().enumerate() {
        for &p3 in &candidates[x..] {
            if p2 == p3 && rest.get(p2) < 2 {
                continue;
            }
            let target: Vec<i64> = points
                .get(p2)
                .iter()
                .zip(points.get(p3))
                .zip(&swap)
                .map(|((a, b), s)| a + b - s)
                .collect();
            if target.iter().any(|&e| e < 0) {
                continue;
            }
            let Ok(parts) = bvn_decompose(flow, &target, 2) else { continue };
            let a2 = points.index_of(parts.parts[0].values()).ok_or_else(|| Error::pre("point list is not the spec's"))?;
            let a3 = points.index_of(parts.parts[1].values()).ok_or_else(|| Error::pre("point list is not the spec's"))?;
            let mut out = rest.clone();
            out.remove_var(p2, 1);
            out.remove_var(p3, 1);
            out.add_var(tilde_ix, 1);
            out.add_var(a2, 1);
            out.add_var(a3, 1);
            assert_eq!(out.image(points), from.image(points), "rewrite left the fiber");
            return Ok(Some((out, [src, p2, p3], [tilde_ix, a2, a3])));
        }
    }
    Ok(None)
}
