//! The acceptance checks, one report per criterion. Shared by the test suite
//! and the `verify-all` command.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::flowcore::{homogenize, maximal_cells, DirectedGraph, FlowPolytopeSpec, PointList, TransportationSpec};
use crate::linalg;
use crate::markov::{all_fibers, enumerate_fiber, fiber_connected, generate_moves_deg23, relation_census, MoveIndex};
use crate::netflow::bvn_decompose;
use crate::order::{revlex_from_ranking, subdivide_and_pull_order};
use crate::toric::{buchberger, initial_ideal_minimal_generators, max_degree, BuchbergerOptions, ExponentVector, Status};
use crate::transform::{bipartize, verify_semigroup_iso};
use crate::triangulate::{cross_cell_nonface_check, is_unimodular, minimal_nonfaces, pulling_triangulation};
use crate::worstcase::{birkhoff_family, covering_certificate, smooth_shift, transport_family, Matrix};

const CAP: usize = 2_000_000;
const FIBER_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2}. {} — {} ({:.1}s)", self.id, self.name, self.detail, self.seconds)
    }
}

fn run(id: u8, name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport { id, name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Transportation margins `(r, c)` with `m` rows, `n` columns and entries
/// in `1..=max`.
pub fn all_margins(m: usize, n: usize, max: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    let vectors = |len: usize| -> Vec<Vec<i64>> {
        let base = max as usize;
        (0..base.pow(len as u32))
            .map(|code| (0..len).map(|i| (code / base.pow(i as u32) % base) as i64 + 1).collect())
            .collect()
    };
    let (rows, cols) = (vectors(m), vectors(n));
    let mut out = Vec::new();
    for r in &rows {
        for c in &cols {
            if r.iter().sum::<i64>() == c.iter().sum::<i64>() {
                out.push((r.clone(), c.clone()));
            }
        }
    }
    out
}

/// Random margins with entries in `1..=max` and equal totals.
pub fn random_margins(rng: &mut impl Rng, m: usize, n: usize, max: i64) -> (Vec<i64>, Vec<i64>) {
    loop {
        let r: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=max)).collect();
        let total: i64 = r.iter().sum();
        if total < n as i64 || total > n as i64 * max {
            continue;
        }
        let mut c = vec![1i64; n];
        let mut left = total - n as i64;
        while left > 0 {
            let j = rng.gen_range(0..n);
            if c[j] < max {
                c[j] += 1;
                left -= 1;
            }
        }
        return (r, c);
    }
}

/// A random feasible network on 3–4 vertices with small bounds; demands
/// are read off a random flow inside the bounds.
pub fn random_flow_spec(rng: &mut impl Rng, max_arcs: usize, max_width: i64) -> FlowPolytopeSpec {
    let nv = rng.gen_range(3..=4);
    let na = rng.gen_range(3..=max_arcs);
    let edges: Vec<(usize, usize)> = (0..na)
        .map(|_| {
            let t = rng.gen_range(0..nv);
            let h = (t + rng.gen_range(1..nv)) % nv;
            (t, h)
        })
        .collect();
    let lower: Vec<i64> = (0..na).map(|_| rng.gen_range(0..=1)).collect();
    let upper: Vec<i64> = lower.iter().map(|l| l + rng.gen_range(1..=max_width)).collect();
    let x: Vec<i64> = lower.iter().zip(&upper).map(|(&l, &u)| rng.gen_range(l..=u)).collect();
    let g = DirectedGraph::from_edges(nv, &edges).expect("valid edges");
    let demand = g.net_inflow(&x);
    FlowPolytopeSpec::new(g, demand, lower, upper).expect("feasible by construction")
}

fn transport_points(r: &[i64], c: &[i64]) -> Result<(FlowPolytopeSpec, PointList)> {
    let t = TransportationSpec::new(r.to_vec(), c.to_vec())?;
    Ok((t.to_flow(), t.lattice_points(CAP)?))
}

/// Whether the point configuration looks like `B_3`: six points spanning
/// four dimensions whose only primitive relation is a degree-3 one with
/// disjoint supports and no degree-2 relation.
pub fn is_birkhoff3_like(points: &PointList) -> Result<bool> {
    if points.len() != 6 || linalg::affine_dimension(points.points()) != Some(4) {
        return Ok(false);
    }
    Ok(relation_census(points, 2, CAP)?.is_empty() && relation_census(points, 3, CAP)?.len() == 1)
}

struct FiberSweep {
    specs: usize,
    fibers: usize,
    skipped: usize,
    failures: Vec<String>,
}

fn sweep(
    specs: &[(Vec<i64>, Vec<i64>)],
    k_max: usize,
    moves_for: impl Fn(&FlowPolytopeSpec, &PointList) -> Result<MoveIndex>,
) -> Result<FiberSweep> {
    let mut out = FiberSweep { specs: 0, fibers: 0, skipped: 0, failures: Vec::new() };
    for (r, c) in specs {
        let (spec, points) = transport_points(r, c)?;
        let index = moves_for(&spec, &points)?;
        out.specs += 1;
        for k in 1..=k_max {
            for f in all_fibers(&points, k, CAP * 50)? {
                if f.len() > FIBER_LIMIT {
                    out.skipped += 1;
                    continue;
                }
                out.fibers += 1;
                let conn = index.components(&f);
                if !conn.connected {
                    out.failures.push(format!("r={r:?} c={c:?} k={k} target={:?}: {} components", f.target, conn.components.len()));
                }
            }
        }
    }
    Ok(out)
}

/// Every fiber of degree ≤ 4 of every transportation polytope with
/// m, n ∈ {2, 3} and margins in 1..=3 is connected by degree-≤3 moves.
pub fn criterion_1() -> CriterionReport {
    run(1, "degree-3 moves connect all small transportation fibers", || {
        let specs: Vec<_> = [(2, 2), (2, 3), (3, 2), (3, 3)]
            .iter()
            .flat_map(|&(m, n)| all_margins(m, n, 3))
            .collect();
        let s = sweep(&specs, 4, |spec, points| Ok(MoveIndex::new(&generate_moves_deg23(spec, points, CAP)?)))?;
        let detail = format!(
            "{} specs, {} fibers checked, {} over the size limit, {} disconnected{}",
            s.specs,
            s.fibers,
            s.skipped,
            s.failures.len(),
            s.failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        );
        Ok((s.failures.is_empty(), detail))
    })
}

/// The `B_3` fiber over the all-ones matrix at degree 3 needs the cubic.
pub fn criterion_2() -> CriterionReport {
    run(2, "B_3 needs a degree-3 move", || {
        let (spec, points) = transport_points(&[1, 1, 1], &[1, 1, 1])?;
        let moves = generate_moves_deg23(&spec, &points, CAP)?;
        let fiber = enumerate_fiber(&points, &[1; 9], 3, CAP)?;
        let two = fiber_connected(&fiber, &moves.of_degree(2));
        let three = fiber_connected(&fiber, &moves);
        let passed = fiber.len() == 2 && !two.connected && two.components.len() == 2 && three.connected;
        Ok((
            passed,
            format!(
                "fiber size {}, degree-2 components {}, with cubic {}",
                fiber.len(),
                two.components.len(),
                three.components.len()
            ),
        ))
    })
}

fn parse(rows: &[&str]) -> Matrix {
    rows.iter().map(|r| r.split_whitespace().map(|x| x.parse().expect("digit")).collect()).collect()
}

/// The six permutation matrices and their sum shown for `B_6`.
pub fn displayed_birkhoff_six() -> (Vec<(&'static str, Matrix)>, Matrix) {
    let members = vec![
        ("A_1", parse(&["1 0 0 0 0 0", "0 0 0 0 1 0", "0 0 0 0 0 1", "0 1 0 0 0 0", "0 0 0 1 0 0", "0 0 1 0 0 0"])),
        ("A_2", parse(&["0 0 0 1 0 0", "0 1 0 0 0 0", "0 0 0 0 0 1", "1 0 0 0 0 0", "0 0 1 0 0 0", "0 0 0 0 1 0"])),
        ("A_3", parse(&["0 0 0 1 0 0", "0 0 0 0 1 0", "0 0 1 0 0 0", "0 0 0 0 0 1", "1 0 0 0 0 0", "0 1 0 0 0 0"])),
        ("B_1", parse(&["0 0 0 0 1 0", "1 0 0 0 0 0", "0 0 0 0 0 1", "0 0 0 1 0 0", "0 1 0 0 0 0", "0 0 1 0 0 0"])),
        ("B_2", parse(&["0 0 0 1 0 0", "0 0 0 0 0 1", "0 1 0 0 0 0", "1 0 0 0 0 0", "0 0 0 0 1 0", "0 0 1 0 0 0"])),
        ("B_3", parse(&["0 0 1 0 0 0", "0 0 0 1 0 0", "0 0 0 0 1 0", "1 0 0 0 0 0", "0 1 0 0 0 0", "0 0 0 0 0 1"])),
    ];
    let total = parse(&["1 0 1 3 1 0", "1 1 0 1 2 1", "0 1 1 0 1 3", "3 1 0 1 0 1", "1 2 1 1 1 0", "0 1 3 0 1 1"]);
    (members, total)
}

pub fn criterion_3() -> CriterionReport {
    run(3, "B_6 family reproduces the displayed degree-6 relation", || {
        let inst = birkhoff_family(3)?;
        let (shown, total) = displayed_birkhoff_six();
        let members_match = shown
            .iter()
            .all(|(name, m)| inst.members.iter().any(|x| x.name == *name && x.matrix == *m));
        inst.verify()?;
        let cover = covering_certificate(&inst);
        let passed = members_match
            && inst.total == total
            && inst.degree() == 6
            && inst.trail_degree() == 6
            && inst.lead_is_initial()
            && cover.passed;
        Ok((
            passed,
            format!(
                "members match: {members_match}, total matches: {}, degree {}, covering certificate: {}",
                inst.total == total,
                inst.degree(),
                cover.passed
            ),
        ))
    })
}

pub fn criterion_4() -> CriterionReport {
    run(4, "6×6 transportation family has degree 12 and shifts to smooth margins", || {
        let inst = transport_family(6, 6)?;
        inst.verify()?;
        let expected: Matrix = (0..6)
            .map(|i| if i < 3 { vec![2, 1, 1, 10, 11, 11] } else { vec![10, 11, 11, 2, 1, 1] })
            .collect();
        let shifted = smooth_shift(&inst)?;
        let margins_ok = shifted.rows == vec![39; 6] && shifted.cols == vec![3, 3, 3, 3, 3, 219];
        let (c1, c2) = (covering_certificate(&inst), covering_certificate(&shifted));
        let passed = inst.total == expected
            && inst.degree() == 12
            && inst.claimed_degree() == 12
            && margins_ok
            && inst.lead_is_initial()
            && c1.passed
            && c2.passed;
        Ok((
            passed,
            format!(
                "total pattern: {}, degree {}, smooth margins {:?}/{:?}, covering certificate: {}/{}",
                inst.total == expected,
                inst.degree(),
                shifted.rows,
                shifted.cols,
                c1.passed,
                c2.passed
            ),
        ))
    })
}

/// Points of a random maximal cell of the polytope, in the parent's
/// coordinates.
fn random_cell(rng: &mut impl Rng, spec: &FlowPolytopeSpec, max_points: usize) -> Result<Option<PointList>> {
    let cells = maximal_cells(spec, CAP)?;
    let mut candidates = Vec::new();
    for c in cells {
        let flows = c.flows(CAP)?;
        if flows.len() >= 2 && flows.len() <= max_points {
            candidates.push(flows);
        }
    }
    let Some(pick) = candidates.choose(rng) else { return Ok(None) };
    Ok(Some(PointList::new(pick.iter().map(|f| spec.embed(f)).collect())?))
}

pub fn criterion_5() -> CriterionReport {
    run(5, "subdivide-and-pull bases of 3×3 and 3×4 cells have degree ≤ ⌊mn/2⌋", || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut runs = 0;
        let mut worst = [0u32; 2];
        let mut slowest = 0f64;
        let mut failures = Vec::new();
        for (slot, (m, n)) in [(3usize, 3usize), (3, 4)].into_iter().enumerate() {
            let bound = (m * n / 2) as u32;
            let mut done = 0;
            while done < 15 {
                let (r, c) = random_margins(&mut rng, m, n, 4);
                let spec = TransportationSpec::new(r.clone(), c.clone())?.to_flow();
                let Some(points) = random_cell(&mut rng, &spec, usize::MAX)? else { continue };
                let mut ranking: Vec<usize> = (0..points.len()).collect();
                ranking.shuffle(&mut rng);
                let order = subdivide_and_pull_order(&points, &ranking)?;
                let start = Instant::now();
                let opts = BuchbergerOptions { time_cap: Some(Duration::from_secs(60)), ..Default::default() };
                let gb = buchberger(&points, &order, &opts)?;
                let secs = start.elapsed().as_secs_f64();
                slowest = slowest.max(secs);
                done += 1;
                runs += 1;
                if gb.status != Status::Complete {
                    failures.push(format!("{r:?}/{c:?}: timed out"));
                    continue;
                }
                let d = max_degree(&gb)?;
                worst[slot] = worst[slot].max(d);
                if d > bound {
                    failures.push(format!("{r:?}/{c:?}: degree {d} > {bound}"));
                }
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{runs} cells, max degree 3×3: {}, 3×4: {}, slowest run {slowest:.2}s{}",
                worst[0],
                worst[1],
                failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
            ),
        ))
    })
}

pub fn criterion_6() -> CriterionReport {
    run(6, "pulling triangulations match initial ideals; cross-cell non-faces are edges", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut cells = 0;
        let mut failures = Vec::new();
        let mut cross_checked = 0;
        let mut attempts = 0;
        while cells < 20 {
            attempts += 1;
            if attempts > 2_000 {
                failures.push("could not sample enough cells".to_string());
                break;
            }
            let spec = if cells % 2 == 0 {
                let shape = [(2, 3), (3, 3), (2, 4)][rng.gen_range(0..3)];
                let (r, c) = random_margins(&mut rng, shape.0, shape.1, 3);
                TransportationSpec::new(r, c)?.to_flow()
            } else {
                homogenize(&random_flow_spec(&mut rng, 5, 2))
            };
            let all = spec.lattice_points(CAP)?;
            if all.len() > 60 {
                continue;
            }
            let Some(points) = random_cell(&mut rng, &spec, 12)? else { continue };
            if linalg::affine_dimension(points.points()).unwrap_or(0) == 0 {
                continue;
            }
            cells += 1;
            let mut ranking: Vec<usize> = (0..points.len()).collect();
            ranking.shuffle(&mut rng);
            let t = pulling_triangulation(&points, &ranking)?;
            if !is_unimodular(&t) {
                failures.push(format!("cell {:?}: not unimodular", points.points()));
            }
            let gb = buchberger(&points, &revlex_from_ranking(&points, &ranking)?, &BuchbergerOptions::default())?;
            let mut gens = initial_ideal_minimal_generators(&gb)?;
            gens.sort();
            let mut nf: Vec<ExponentVector> =
                minimal_nonfaces(&t, points.len())?.into_iter().map(ExponentVector::from_indices).collect();
            nf.sort();
            if nf != gens {
                failures.push(format!("cell {:?}: non-faces differ from initial ideal", points.points()));
            }
            let mut global: Vec<usize> = (0..all.len()).collect();
            global.shuffle(&mut rng);
            let dim = linalg::affine_dimension(all.points()).unwrap_or(0);
            let report = cross_cell_nonface_check(&spec, &all, &global, dim + 2, CAP)?;
            cross_checked += report.cross_cell_nonfaces;
            if !report.ok {
                failures.push(format!("cross-cell non-faces of size ≠ 2: {:?}", report.counterexamples));
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{cells} cells, {cross_checked} cross-cell minimal non-faces inspected{}",
                failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
            ),
        ))
    })
}

pub fn criterion_7() -> CriterionReport {
    run(7, "every revlex basis of B_3 has degree exactly 3 with the sign relation", || {
        let (_, points) = transport_points(&[1, 1, 1], &[1, 1, 1])?;
        let sign = |p: &[i64]| {
            let perm: Vec<usize> = p.chunks(3).map(|r| r.iter().position(|&x| x == 1).unwrap_or(0)).collect();
            let inv = (0..3).flat_map(|a| (a + 1..3).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
            inv % 2 == 0
        };
        let even = ExponentVector::from_indices((0..6).filter(|&i| sign(&points[i])));
        let odd = ExponentVector::from_indices((0..6).filter(|&i| !sign(&points[i])));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = BTreeSet::new();
        let mut bad = 0;
        let trials = 120;
        for _ in 0..trials {
            let mut ranking: Vec<usize> = (0..6).collect();
            ranking.shuffle(&mut rng);
            seen.insert(ranking.clone());
            let gb = buchberger(&points, &revlex_from_ranking(&points, &ranking)?, &BuchbergerOptions::default())?;
            let has = gb.elements.iter().any(|b| {
                (b.lead == even && b.trail == odd) || (b.lead == odd && b.trail == even)
            });
            if max_degree(&gb)? != 3 || !has {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("{trials} rankings ({} distinct), {bad} violations", seen.len())))
    })
}

pub fn criterion_8() -> CriterionReport {
    run(8, "Birkhoff–von Neumann decompositions round-trip", || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut failures = 0;
        let mut done = 0;
        while done < 200 {
            let spec = if done % 2 == 0 {
                let (m, n) = (rng.gen_range(2..=3), rng.gen_range(2..=4));
                let (r, c) = random_margins(&mut rng, m, n, 3);
                TransportationSpec::new(r, c)?.to_flow()
            } else {
                random_flow_spec(&mut rng, 6, 3)
            };
            let points = spec.lattice_points(CAP)?;
            let k = rng.gen_range(1..=4);
            let mut f = vec![0i64; spec.arc_count()];
            for _ in 0..k {
                let p = &points[rng.gen_range(0..points.len())];
                f.iter_mut().zip(spec.flow_part(p)).for_each(|(a, b)| *a += b);
            }
            done += 1;
            let ok = match bvn_decompose(&spec, &f, k) {
                Ok(d) => d.parts.len() == k && d.parts.iter().all(|p| spec.contains(p.values())) && d.sum() == f,
                Err(_) => false,
            };
            if !ok {
                failures += 1;
            }
        }
        Ok((failures == 0, format!("{done} instances, {failures} failures")))
    })
}

pub fn criterion_9() -> CriterionReport {
    run(9, "bipartization preserves points, additivity and relations", || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut graphs = 0;
        let mut failures = Vec::new();
        let mut relations = 0;
        while graphs < 20 {
            let spec = random_flow_spec(&mut rng, 5, 2);
            let n = spec.lattice_points(CAP)?.len();
            if !(2..=30).contains(&n) {
                continue;
            }
            graphs += 1;
            let b = bipartize(&spec)?;
            let r = verify_semigroup_iso(&b, 3, CAP)?;
            relations += r.degrees.iter().map(|d| d.relations).sum::<usize>();
            if !r.passed {
                failures.push(format!("{r:?}"));
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{graphs} graphs, {relations} relations of degree ≤ 3 matched{}",
                failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
            ),
        ))
    })
}

pub fn criterion_10() -> CriterionReport {
    run(10, "quadrics connect 3×3 fibers except for B_3", || {
        let mut excluded = Vec::new();
        let mut specs = Vec::new();
        for (r, c) in all_margins(3, 3, 3) {
            let (_, points) = transport_points(&r, &c)?;
            if is_birkhoff3_like(&points)? {
                excluded.push(format!("{r:?}/{c:?}"));
            } else {
                specs.push((r, c));
            }
        }
        let s = sweep(&specs, 4, |spec, points| {
            Ok(MoveIndex::new(&generate_moves_deg23(spec, points, CAP)?.of_degree(2)))
        })?;
        Ok((
            s.failures.is_empty(),
            format!(
                "{} specs ({} excluded as B_3: {}), {} fibers, {} over the size limit, {} disconnected{}",
                s.specs,
                excluded.len(),
                excluded.join(", "),
                s.fibers,
                s.skipped,
                s.failures.len(),
                s.failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
            ),
        ))
    })
}

/// Every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}

/// Run one criterion by number.
pub fn run_one(id: u8) -> Option<CriterionReport> {
    let f: fn() -> CriterionReport = match id {
        1 => criterion_1,
        2 => criterion_2,
        3 => criterion_3,
        4 => criterion_4,
        5 => criterion_5,
        6 => criterion_6,
        7 => criterion_7,
        8 => criterion_8,
        9 => criterion_9,
        10 => criterion_10,
        _ => return None,
    };
    Some(f())
}
