use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::flowcore::{maximal_cells, TransportationSpec, DEFAULT_POINT_CAP};
use crate::order::{identity_ranking, revlex_from_ranking, subdivide_and_pull_order};

/// All multisets of size `k` from `0..n`, as sorted index lists.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// The reduced Gröbner basis up to degree `max_deg`, by brute force: a
/// monomial is standard iff it is the minimum of its fiber; minimal
/// generators of the initial ideal are the non-standard monomials all of
/// whose divisors are standard, paired with their fiber minimum.
fn oracle_basis(points: &PointList, order: &TermOrder, max_deg: usize) -> Vec<(ExponentVector, ExponentVector)> {
    let n = points.len();
    let mut minimum: Vec<HashMap<Vec<i64>, Vec<i64>>> = vec![HashMap::new()];
    let mut out = Vec::new();
    for k in 1..=max_deg {
        let mut fibers: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let all: Vec<Vec<i64>> = multisets(n, k)
            .into_iter()
            .map(|m| ExponentVector::from_indices(m).to_dense(n))
            .collect();
        let image = |u: &Vec<i64>| ExponentVector::from_dense(u).image(points);
        for u in &all {
            let e = fibers.entry(image(u)).or_insert_with(|| u.clone());
            if order.cmp_dense(u, e) == Ordering::Less {
                *e = u.clone();
            }
        }
        let standard = |u: &Vec<i64>, level: &HashMap<Vec<i64>, Vec<i64>>| level[&image(u)] == *u;
        for u in &all {
            if standard(u, &fibers) {
                continue;
            }
            let divisors_standard = (0..n).filter(|&i| u[i] > 0).all(|i| {
                let mut d = u.clone();
                d[i] -= 1;
                k == 1 || standard(&d, &minimum[k - 1])
            });
            if divisors_standard {
                out.push((ExponentVector::from_dense(u), ExponentVector::from_dense(&fibers[&image(u)])));
            }
        }
        minimum.push(fibers);
    }
    out.sort();
    out
}

fn as_pairs(gb: &GroebnerBasis) -> Vec<(ExponentVector, ExponentVector)> {
    let mut v: Vec<_> = gb.elements.iter().map(|b| (b.lead.clone(), b.trail.clone())).collect();
    v.sort();
    v
}

fn run(points: &PointList, order: &TermOrder) -> GroebnerBasis {
    buchberger(points, order, &BuchbergerOptions::default()).unwrap()
}

fn birkhoff3() -> PointList {
    TransportationSpec::birkhoff(3).unwrap().lattice_points(DEFAULT_POINT_CAP).unwrap()
}

/// Sign of the permutation matrix given row-major.
fn det_sign(p: &[i64]) -> i64 {
    let n = (p.len() as f64).sqrt() as usize;
    let perm: Vec<usize> = (0..n).map(|i| (0..n).position(|j| p[i * n + j] == 1).unwrap()).collect();
    let mut sign = 1;
    for i in 0..n {
        for j in i + 1..n {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

#[test]
fn two_points_give_zero_ideal() {
    let pts = PointList::new(vec![vec![1, 0], vec![1, 1]]).unwrap();
    let gb = run(&pts, &revlex_from_ranking(&pts, &[0, 1]).unwrap());
    assert!(gb.is_empty());
    assert!(gb.is_complete());
    assert_eq!(max_degree(&gb).unwrap(), 0);
    assert!(initial_ideal_minimal_generators(&gb).unwrap().is_empty());
    let single = PointList::new(vec![vec![1, 5]]).unwrap();
    assert!(run(&single, &revlex_from_ranking(&single, &[0]).unwrap()).is_empty());
}

#[test]
fn birkhoff_three_is_one_cubic() {
    let pts = birkhoff3();
    let mut rankings = vec![identity_ranking(6), vec![5, 4, 3, 2, 1, 0], vec![2, 0, 5, 1, 4, 3]];
    rankings.push(vec![1, 3, 5, 0, 2, 4]);
    for r in rankings {
        let gb = run(&pts, &revlex_from_ranking(&pts, &r).unwrap());
        assert_eq!(gb.len(), 1, "ranking {r:?}");
        assert_eq!(max_degree(&gb).unwrap(), 3);
        let b = &gb.elements[0];
        let signs = |u: &ExponentVector| u.support().map(|i| det_sign(pts.get(i))).collect::<Vec<_>>();
        let (sl, st) = (signs(&b.lead), signs(&b.trail));
        assert_eq!(sl.len(), 3);
        assert_eq!(st.len(), 3);
        assert!(sl.iter().all(|&s| s == sl[0]) && st.iter().all(|&s| s == -sl[0]));
        assert_eq!(initial_ideal_minimal_generators(&gb).unwrap().len(), 1);
    }
}

#[test]
fn grid_matches_exhaustive_relations() {
    let pts = PointList::new(
        (0..2).flat_map(|i| (0..3).map(move |j| vec![1, i, j])).collect(),
    )
    .unwrap();
    for ranking in [identity_ranking(6), vec![3, 1, 4, 0, 5, 2]] {
        let order = subdivide_and_pull_order(&pts, &ranking).unwrap();
        let gb = run(&pts, &order);
        let d = max_degree(&gb).unwrap() as usize;
        assert!(d <= 3);
        assert_eq!(as_pairs(&gb), oracle_basis(&pts, &order, 4));
    }
}

#[test]
fn shuffled_runs_agree() {
    let t = TransportationSpec::new(vec![2, 1, 1], vec![1, 2, 1]).unwrap();
    let pts = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
    let order = subdivide_and_pull_order(&pts, &identity_ranking(pts.len())).unwrap();
    let base = run(&pts, &order);
    assert!(base.satisfies_buchberger_criterion());
    assert!(base.check_reduced());
    assert!(base.check_oriented());
    for seed in 0..5 {
        let opts = BuchbergerOptions { shuffle_seed: Some(seed), ..Default::default() };
        let gb = buchberger(&pts, &order, &opts).unwrap();
        assert_eq!(as_pairs(&gb), as_pairs(&base));
    }
}

#[test]
fn degree_cap_flags_truncation() {
    let pts = birkhoff3();
    let order = revlex_from_ranking(&pts, &identity_ranking(6)).unwrap();
    let opts = BuchbergerOptions { degree_cap: Some(2), ..Default::default() };
    let gb = buchberger(&pts, &order, &opts).unwrap();
    assert_eq!(gb.status, Status::Truncated { degree_cap: 2 });
    assert!(gb.is_empty());
    assert_eq!(max_degree(&gb), Err(Error::Truncated));
    assert_eq!(initial_ideal_minimal_generators(&gb), Err(Error::Truncated));
    let opts = BuchbergerOptions { degree_cap: Some(3), ..Default::default() };
    let gb3 = buchberger(&pts, &order, &opts).unwrap();
    assert_eq!(gb3.len(), 1);
}

#[test]
fn zero_time_cap_times_out() {
    let t = TransportationSpec::new(vec![2, 2], vec![1, 2, 1]).unwrap();
    let pts = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
    let order = revlex_from_ranking(&pts, &identity_ranking(pts.len())).unwrap();
    let opts = BuchbergerOptions { time_cap: Some(Duration::ZERO), ..Default::default() };
    let gb = buchberger(&pts, &order, &opts).unwrap();
    assert_eq!(gb.status, Status::TimedOut);
    assert!(max_degree(&gb).is_err());
}

#[test]
fn rejects_inhomogeneous_points() {
    let pts = PointList::new(vec![vec![0], vec![1], vec![2]]).unwrap();
    let order = revlex_from_ranking(&pts, &[0, 1, 2]).unwrap();
    assert!(matches!(buchberger(&pts, &order, &BuchbergerOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn spair_basics() {
    let pts = PointList::new((0..4).map(|j| vec![1, j]).collect()).unwrap();
    let order = revlex_from_ranking(&pts, &identity_ranking(4)).unwrap();
    let f = Binomial::new(ExponentVector::from_indices([1, 1]), ExponentVector::from_indices([0, 2]), &order)
        .unwrap()
        .unwrap();
    assert_eq!(spair_reduce(&f, &f, std::slice::from_ref(&f), &order).unwrap(), None);
    // Coprime leads reduce to zero modulo the pair itself.
    let g = Binomial::new(ExponentVector::from_indices([2, 2]), ExponentVector::from_indices([1, 3]), &order)
        .unwrap()
        .unwrap();
    assert!(f.lead.is_coprime(&g.lead));
    assert_eq!(spair_reduce(&f, &g, &[f.clone(), g.clone()], &order).unwrap(), None);
    // Overlapping leads give a new relation in the ideal.
    let h = Binomial::new(ExponentVector::from_indices([1, 2]), ExponentVector::from_indices([0, 3]), &order)
        .unwrap()
        .unwrap();
    if let Some(s) = spair_reduce(&f, &h, &[], &order).unwrap() {
        assert!(s.in_toric_ideal(&pts));
    }
}

#[test]
fn birkhoff_spairs_stay_in_ideal() {
    let pts = birkhoff3();
    let order = revlex_from_ranking(&pts, &identity_ranking(6)).unwrap();
    // All degree-3 relations among the six permutation matrices.
    let cubes = multisets(6, 3);
    let mut rels = Vec::new();
    for a in &cubes {
        for b in &cubes {
            let (u, v) = (ExponentVector::from_indices(a.clone()), ExponentVector::from_indices(b.clone()));
            if u < v && u.image(&pts) == v.image(&pts) {
                if let Some(r) = Binomial::new(u, v, &order).unwrap() {
                    rels.push(r);
                }
            }
        }
    }
    assert!(!rels.is_empty());
    for f in &rels {
        for g in &rels {
            if let Some(s) = spair_reduce(f, g, &[], &order).unwrap() {
                assert!(s.in_toric_ideal(&pts));
            }
        }
    }
}

#[test]
fn three_by_three_cells_within_bound() {
    let spec = TransportationSpec::new(vec![3, 2, 2], vec![2, 3, 2]).unwrap().to_flow();
    for cell in maximal_cells(&spec, DEFAULT_POINT_CAP).unwrap().into_iter().take(4) {
        let pts = PointList::new(cell.flows(DEFAULT_POINT_CAP).unwrap()).unwrap();
        let order = subdivide_and_pull_order(&pts, &identity_ranking(pts.len())).unwrap();
        let gb = run(&pts, &order);
        assert!(max_degree(&gb).unwrap() <= 4);
        assert!(gb.satisfies_buchberger_criterion());
    }
}

fn config_strategy() -> impl Strategy<Value = (PointList, Vec<usize>)> {
    prop::collection::btree_set((0i64..3, 0i64..3), 3..7)
        .prop_flat_map(|set| {
            let pts: Vec<Vec<i64>> = set.into_iter().map(|(a, b)| vec![1, a, b]).collect();
            let n = pts.len();
            (Just(pts), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(pts, r)| (PointList::new(pts).unwrap(), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_configurations_match_oracle((pts, ranking) in config_strategy()) {
        let order = subdivide_and_pull_order(&pts, &ranking).unwrap();
        let gb = run(&pts, &order);
        let d = max_degree(&gb).unwrap() as usize;
        prop_assert!(gb.check_reduced());
        prop_assert!(gb.satisfies_buchberger_criterion());
        prop_assert_eq!(as_pairs(&gb), oracle_basis(&pts, &order, (d + 1).min(5)));
    }
}
