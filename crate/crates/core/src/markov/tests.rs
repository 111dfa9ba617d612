use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::flowcore::{TransportationSpec, DEFAULT_POINT_CAP};

const CAP: usize = 200_000;

fn transport(rows: &[i64], cols: &[i64]) -> (TransportationSpec, FlowPolytopeSpec, PointList) {
    let t = TransportationSpec::new(rows.to_vec(), cols.to_vec()).unwrap();
    let points = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
    let spec = t.to_flow();
    (t, spec, points)
}

/// Brute force: every k-tuple of point indices (ordered), keep the sorted
/// ones whose column sums equal the target.
fn brute_fiber(points: &PointList, target: &[i64], k: usize) -> BTreeSet<Vec<usize>> {
    let n = points.len();
    let mut out = BTreeSet::new();
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut tuple: Vec<usize> = (0..k)
            .map(|_| {
                let d = c % n;
                c /= n;
                d
            })
            .collect();
        let sum: Vec<i64> = (0..target.len()).map(|j| tuple.iter().map(|&i| points[i][j]).sum()).collect();
        if sum == target {
            tuple.sort_unstable();
            out.insert(tuple);
        }
    }
    out
}

fn as_indices(u: &ExponentVector) -> Vec<usize> {
    u.iter().flat_map(|(i, m)| std::iter::repeat_n(i, m as usize)).collect()
}

fn sign(p: &[i64]) -> i64 {
    // 3x3 permutation matrix → sign via the permutation's inversion count.
    let perm: Vec<usize> = p.chunks(3).map(|r| r.iter().position(|&x| x == 1).unwrap()).collect();
    let inv = (0..3).flat_map(|a| (a + 1..3).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
    if inv % 2 == 0 { 1 } else { -1 }
}

#[test]
fn birkhoff_three_has_a_single_cubic_move() {
    let (_, spec, points) = transport(&[1, 1, 1], &[1, 1, 1]);
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    assert_eq!(moves.count_of_degree(2), 0);
    assert_eq!(moves.count_of_degree(3), 1);
    let m = &moves.moves[0];
    let even: BTreeSet<i64> = m.lead.support().map(|i| sign(&points[i])).collect();
    let odd: BTreeSet<i64> = m.trail.support().map(|i| sign(&points[i])).collect();
    assert_eq!(even.len(), 1);
    assert_eq!(odd.len(), 1);
    assert_ne!(even, odd);
}

#[test]
fn two_point_polytope_has_no_moves() {
    let (_, spec, points) = transport(&[1, 1], &[1, 1]);
    assert_eq!(points.len(), 2);
    assert!(generate_moves_deg23(&spec, &points, CAP).unwrap().is_empty());
}

#[test]
fn single_cell_moves_equal_kernel_census() {
    for (r, c) in [(vec![2, 1], vec![1, 2]), (vec![1, 1], vec![1, 1]), (vec![2, 1, 1], vec![1, 1, 2]), (vec![1, 1, 1], vec![1, 1, 1])] {
        let (_, spec, points) = transport(&r, &c);
        let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
        if maximal_cells(&spec, CAP).unwrap().len() != 1 {
            continue;
        }
        let mut census = relation_census(&points, 2, CAP).unwrap();
        census.extend(relation_census(&points, 3, CAP).unwrap());
        assert_eq!(moves, MoveSet::new(census), "{r:?} {c:?}");
    }
}

#[test]
fn moves_are_relations() {
    let (_, spec, points) = transport(&[2, 2, 1], &[1, 2, 2]);
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    assert!(!moves.is_empty());
    for m in &moves.moves {
        assert!(m.in_toric_ideal(&points));
        assert!(m.lead.is_coprime(&m.trail));
        assert!(matches!(m.degree(), 2 | 3));
        assert!(m.lead > m.trail);
    }
}

#[test]
fn fiber_of_degree_one() {
    let (_, _, points) = transport(&[2, 1], &[1, 2]);
    let p = points[0].clone();
    let f = enumerate_fiber(&points, &p, 1, CAP).unwrap();
    assert_eq!(f.elements, vec![ExponentVector::from_indices([0])]);
    let f = enumerate_fiber(&points, &[9, 9, 9, 9], 1, CAP).unwrap();
    assert!(f.is_empty());
}

#[test]
fn fibers_match_brute_force() {
    for (r, c) in [(vec![1, 1, 1], vec![1, 1, 1]), (vec![2, 1], vec![1, 1, 1]), (vec![2, 2], vec![1, 2, 1])] {
        let (_, _, points) = transport(&r, &c);
        for k in 1..=3 {
            let fibers = all_fibers(&points, k, CAP).unwrap();
            let covered: usize = fibers.iter().map(Fiber::len).sum();
            assert_eq!(covered, multisets(&(0..points.len()).collect::<Vec<_>>(), k).len());
            for f in fibers {
                let enumerated = enumerate_fiber(&points, &f.target, k, CAP).unwrap();
                let got: BTreeSet<Vec<usize>> = enumerated.elements.iter().map(as_indices).collect();
                assert_eq!(got.len(), enumerated.len());
                assert_eq!(got, brute_fiber(&points, &f.target, k));
                let grouped: BTreeSet<Vec<usize>> = f.elements.iter().map(as_indices).collect();
                assert_eq!(got, grouped);
            }
        }
    }
}

#[test]
fn birkhoff_fiber_over_all_ones() {
    let (_, spec, points) = transport(&[1, 1, 1], &[1, 1, 1]);
    let j = vec![1; 9];
    let fiber = enumerate_fiber(&points, &j, 3, CAP).unwrap();
    let expected = brute_fiber(&points, &j, 3);
    assert_eq!(fiber.len(), expected.len());
    assert_eq!(fiber.len(), 2);
    for u in &fiber.elements {
        let signs: BTreeSet<i64> = u.support().map(|i| sign(&points[i])).collect();
        assert_eq!(signs.len(), 1, "each element is all-even or all-odd");
    }
    // 3P contains {P, P, P}.
    let p = points[4].iter().map(|x| 3 * x).collect::<Vec<_>>();
    let f = enumerate_fiber(&points, &p, 3, CAP).unwrap();
    assert!(f.elements.contains(&ExponentVector::from_pairs([(4, 3)])));

    let all = generate_moves_deg23(&spec, &points, CAP).unwrap();
    let quad = all.of_degree(2);
    let c2 = fiber_connected(&fiber, &quad);
    assert!(!c2.connected);
    assert_eq!(c2.components.len(), 2);
    assert!(fiber_connected(&fiber, &all).connected);
}

#[test]
fn fiber_enumeration_respects_cap() {
    let (_, _, points) = transport(&[1, 1, 1], &[1, 1, 1]);
    assert!(matches!(enumerate_fiber(&points, &[1; 9], 3, 1), Err(Error::CapExceeded { .. })));
}

#[test]
fn singleton_fiber_is_connected() {
    let f = Fiber { target: vec![1], degree: 1, elements: vec![ExponentVector::from_indices([0])] };
    let c = fiber_connected(&f, &MoveSet::default());
    assert!(c.connected);
    assert_eq!(c.components, vec![vec![0]]);
}

/// Reference connectivity: explicit edges by trying every move against every
/// pair of fiber elements, then depth-first search.
fn oracle_components(fiber: &Fiber, moves: &MoveSet) -> usize {
    let n = fiber.len();
    let adj = |a: &ExponentVector, b: &ExponentVector| {
        moves.moves.iter().any(|m| {
            [(&m.lead, &m.trail), (&m.trail, &m.lead)]
                .iter()
                .any(|(x, y)| a.div(x).is_some_and(|r| r.mul(y) == *b))
        })
    };
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if !seen[y] && adj(&fiber.elements[x], &fiber.elements[y]) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

#[test]
fn connectivity_matches_pairwise_oracle() {
    for (r, c) in [(vec![2, 1, 1], vec![1, 2, 1]), (vec![2, 2], vec![1, 2, 1]), (vec![1, 1, 1], vec![1, 1, 1])] {
        let (_, spec, points) = transport(&r, &c);
        let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
        for subset in [moves.clone(), moves.of_degree(2)] {
            for k in 2..=3 {
                for f in all_fibers(&points, k, CAP).unwrap() {
                    assert_eq!(fiber_connected(&f, &subset).components.len(), oracle_components(&f, &subset));
                }
            }
        }
    }
}

#[test]
fn hamming_examples() {
    assert_eq!(hamming(&[1, 0, 0, 1], &[1, 0, 0, 1]).unwrap(), 0);
    assert_eq!(hamming(&[1, 0, 0, 1], &[0, 1, 1, 0]).unwrap(), 4);
    assert!(hamming(&[1], &[1, 2]).is_err());
}

#[test]
fn disjoint_relations_are_at_distance_at_least_four() {
    for (r, c) in [(vec![2, 1, 1], vec![1, 2, 1]), (vec![1, 1, 1], vec![1, 1, 1]), (vec![2, 2, 1], vec![2, 1, 2])] {
        let (_, _, points) = transport(&r, &c);
        for k in 2..=3 {
            for b in relation_census(&points, k, CAP).unwrap() {
                let (d, a, bb) = support_distance(&points, &b.lead, &b.trail).unwrap();
                assert!(d >= 4, "{b}");
                assert_eq!(hamming(&points[a], &points[bb]).unwrap(), d);
            }
        }
    }
}

#[test]
fn displayed_pattern_is_found() {
    let m = vec![vec![1, 0], vec![0, 1]];
    let n = vec![vec![0, 1], vec![1, 0]];
    let w = forbidden_pattern(&m, &n).unwrap();
    assert_eq!((w.i1, w.i2, w.j1, w.j2), (0, 1, 0, 1));
    assert_eq!(w.variant, PatternVariant::Exact);
    assert_eq!(forbidden_pattern(&m, &m), None);
    let raised = vec![vec![0, 1], vec![1, 1]];
    assert_eq!(forbidden_pattern(&m, &raised).unwrap().variant, PatternVariant::TargetFlipped);
    // Read with the columns swapped, this is the source-flipped form.
    assert_eq!(forbidden_pattern(&raised, &m).unwrap().variant, PatternVariant::SourceFlipped);
    assert_eq!(forbidden_pattern(&[vec![1, 1], vec![1, 1]], &n), None);
    let src = vec![vec![1, 1], vec![0, 1]];
    assert_eq!(forbidden_pattern(&src, &n).unwrap().variant, PatternVariant::SourceFlipped);
}

/// Quadruple scan phrased through block sums: the diagonal and
/// anti-diagonal sums of the two blocks identify each variant.
fn oracle_patterns(m: &[Vec<i64>], n: &[Vec<i64>]) -> Vec<Witness> {
    let mut out = Vec::new();
    for i1 in 0..m.len() {
        for i2 in i1 + 1..m.len() {
            for j1 in 0..m[0].len() {
                for j2 in 0..m[0].len() {
                    if j1 == j2 {
                        continue;
                    }
                    let dm = m[i1][j1] + m[i2][j2];
                    let am = m[i1][j2] + m[i2][j1];
                    let dn = n[i1][j1] + n[i2][j2];
                    let an = n[i1][j2] + n[i2][j1];
                    let variant = match (dm, am, dn, an) {
                        (2, 0, 0, 2) => Some(PatternVariant::Exact),
                        (2, 0, 1, 2) => Some(PatternVariant::TargetFlipped),
                        (2, 1, 0, 2) => Some(PatternVariant::SourceFlipped),
                        _ => None,
                    };
                    if let Some(variant) = variant {
                        out.push(Witness { i1, i2, j1, j2, variant });
                    }
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn pattern_scan_agrees_with_oracle(
        (r, c, bits) in (2usize..5, 2usize..5).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(0i64..2, 2 * r * c)))
    ) {
        let m: Vec<Vec<i64>> = bits[..r * c].chunks(c).map(<[i64]>::to_vec).collect();
        let n: Vec<Vec<i64>> = bits[r * c..].chunks(c).map(<[i64]>::to_vec).collect();
        let all = oracle_patterns(&m, &n);
        match forbidden_pattern(&m, &n) {
            None => prop_assert!(all.is_empty()),
            Some(w) => {
                prop_assert!(all.contains(&w));
                let rank = |v: PatternVariant| v as u8;
                prop_assert_eq!(rank(w.variant), all.iter().map(|x| rank(x.variant)).min().unwrap());
            }
        }
    }
}

#[test]
fn reduction_needs_degree_three() {
    let (t, _, points) = transport(&[1, 1], &[1, 1]);
    let u = ExponentVector::from_pairs([(0, 2)]);
    let v = ExponentVector::from_pairs([(1, 2)]);
    assert!(matches!(distance_reduce(&t, &points, &u, &v), Err(Error::Precondition(_))));
}

#[test]
fn birkhoff_relation_reduces_in_one_step() {
    let (t, _, points) = transport(&[1, 1, 1], &[1, 1, 1]);
    let fiber = enumerate_fiber(&points, &[1; 9], 3, CAP).unwrap();
    let (u, v) = (&fiber.elements[0], &fiber.elements[1]);
    let r = distance_reduce(&t, &points, u, v).unwrap();
    assert_eq!(r.distance_before, 4);
    assert!(r.distance_after + 2 <= r.distance_before);
    assert_eq!(r.rewritten.image(&points), u.image(&points));
    assert_eq!(r.rewritten, *v);
}

#[test]
fn reduction_drops_distance_on_cell_relations() {
    let mut applied = 0;
    let mut by_variant: BTreeMap<String, usize> = BTreeMap::new();
    for rows in [[1, 1, 1], [2, 1, 1], [2, 2, 1], [3, 2, 1], [2, 2, 2]] {
        for cols in [[1, 1, 1], [1, 2, 1], [2, 2, 1], [1, 2, 3], [2, 2, 2]] {
            if rows.iter().sum::<i64>() != cols.iter().sum::<i64>() {
                continue;
            }
            let (t, spec, points) = transport(&rows, &cols);
            for cell in maximal_cells(&spec, CAP).unwrap() {
                let members: Vec<usize> =
                    cell.flows(CAP).unwrap().iter().map(|f| points.index_of(f).unwrap()).collect();
                for f in group_by_image(&points, &members, 3, CAP).unwrap() {
                    for (i, u) in f.elements.iter().enumerate() {
                        for v in &f.elements[i + 1..] {
                            if !u.is_coprime(v) {
                                continue;
                            }
                            let Ok(r) = distance_reduce(&t, &points, u, v) else { continue };
                            applied += 1;
                            *by_variant.entry(format!("{:?}", r.witness.variant)).or_default() += 1;
                            assert!(r.distance_after + 2 <= r.distance_before, "{u} vs {v}: {r:?}");
                            assert_eq!(r.rewritten.image(&points), u.image(&points));
                            assert_eq!(r.rewritten.degree(), 3);
                        }
                    }
                }
            }
        }
    }
    assert!(applied > 0);
    assert!(by_variant.contains_key("Exact"));
}

#[test]
fn walk_on_singleton_fiber_stays() {
    let (_, spec, points) = transport(&[1, 1], &[1, 1]);
    let target: Vec<i64> = points[0].iter().map(|x| 2 * x).collect();
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    for steps in [0, 1, 50] {
        let u = sample_fiber(&spec, &points, &target, 2, &moves, steps, 3).unwrap();
        assert_eq!(u, ExponentVector::from_pairs([(0, 2)]));
    }
}

#[test]
fn walk_rejects_targets_outside_the_dilate() {
    let (_, spec, points) = transport(&[1, 1], &[1, 1]);
    let moves = MoveSet::default();
    assert!(sample_fiber(&spec, &points, &[3, 0, 0, 0], 2, &moves, 1, 0).is_err());
}

#[test]
fn walk_is_uniform_on_birkhoff_fiber() {
    let (_, spec, points) = transport(&[1, 1, 1], &[1, 1, 1]);
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    let fiber = enumerate_fiber(&points, &[1; 9], 3, CAP).unwrap();
    let start = fiber_start(&spec, &points, &[1; 9], 3).unwrap();
    let mut walk = FiberWalk::new(&points, &moves, start, 11);
    let mut hits = [0usize; 2];
    let steps = 10_000;
    for _ in 0..steps {
        let s = walk.step().clone();
        hits[fiber.elements.iter().position(|e| *e == s).unwrap()] += 1;
    }
    for h in hits {
        let freq = h as f64 / steps as f64;
        assert!((freq - 0.5).abs() < 0.05, "{hits:?}");
    }
}

#[test]
fn walk_is_deterministic_per_seed() {
    let (_, spec, points) = transport(&[2, 2, 1], &[1, 2, 2]);
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    let target = vec![1, 1, 0, 0, 1, 1, 0, 0, 1];
    let target: Vec<i64> = target.iter().zip(&points[0]).map(|(a, b)| a + b).collect();
    let run = |seed| {
        let start = fiber_start(&spec, &points, &target, 2).unwrap();
        let mut w = FiberWalk::new(&points, &moves, start, seed);
        (0..200).map(|_| w.step().clone()).collect::<Vec<_>>()
    };
    assert_eq!(run(5), run(5));
}

#[test]
fn walk_reaches_uniformity_on_larger_fiber() {
    // Chi-square style check: every element of a connected fiber is
    // visited with frequency near 1/|fiber|.
    let (_, spec, points) = transport(&[2, 1, 1], &[1, 2, 1]);
    let moves = generate_moves_deg23(&spec, &points, CAP).unwrap();
    let fibers = all_fibers(&points, 2, CAP).unwrap();
    let f = fibers.iter().max_by_key(|f| f.len()).unwrap();
    assert!(fiber_connected(f, &moves).connected);
    let start = fiber_start(&spec, &points, &f.target, 2).unwrap();
    let mut walk = FiberWalk::new(&points, &moves, start, 99);
    let steps = 60_000;
    let mut hits = vec![0usize; f.len()];
    for _ in 0..steps {
        let s = walk.step().clone();
        hits[f.elements.iter().position(|e| *e == s).unwrap()] += 1;
    }
    let expect = steps as f64 / f.len() as f64;
    for h in hits {
        assert!((h as f64 - expect).abs() < 0.15 * expect, "{h} vs {expect}");
    }
}
