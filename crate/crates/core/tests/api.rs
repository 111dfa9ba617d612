use flowtoric::flowcore::json::parse_polytope;
use flowtoric::flowcore::{maximal_cells, TransportationSpec, DEFAULT_POINT_CAP};
use flowtoric::markov::{enumerate_fiber, fiber_connected, generate_moves_deg23};
use flowtoric::netflow::bvn_decompose;
use flowtoric::order::{identity_ranking, subdivide_and_pull_order};
use flowtoric::toric::{buchberger, BuchbergerOptions};
use flowtoric::triangulate::{global_triangulation, is_unimodular};
use proptest::prelude::*;

/// Tables with the given margins, by brute force over every cell value.
fn brute_tables(rows: &[i64], cols: &[i64]) -> Vec<Vec<i64>> {
    let (m, n) = (rows.len(), cols.len());
    let bound = *rows.iter().max().unwrap();
    let mut out = Vec::new();
    let mut t = vec![0i64; m * n];
    loop {
        let row_ok = (0..m).all(|i| t[i * n..(i + 1) * n].iter().sum::<i64>() == rows[i]);
        let col_ok = (0..n).all(|j| (0..m).map(|i| t[i * n + j]).sum::<i64>() == cols[j]);
        if row_ok && col_ok {
            out.push(t.clone());
        }
        let mut i = 0;
        while i < t.len() && t[i] == bound {
            t[i] = 0;
            i += 1;
        }
        if i == t.len() {
            break;
        }
        t[i] += 1;
    }
    out.sort();
    out
}

fn margins() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(m, n)| {
        (prop::collection::vec(1i64..=2, m), prop::collection::vec(1i64..=2, n)).prop_filter_map(
            "unbalanced",
            |(r, mut c)| {
                let diff = r.iter().sum::<i64>() - c.iter().sum::<i64>();
                *c.last_mut().unwrap() += diff;
                (c.last().copied().unwrap() >= 1).then_some((r, c))
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lattice_points_match_brute_force((r, c) in margins()) {
        let t = TransportationSpec::new(r.clone(), c.clone()).unwrap();
        let pts = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
        let mut got = pts.into_points();
        got.sort();
        prop_assert_eq!(got, brute_tables(&r, &c));
    }

    #[test]
    fn decomposition_parts_have_the_margins((r, c) in margins(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=4)) {
        let t = TransportationSpec::new(r.clone(), c.clone()).unwrap();
        let pts = brute_tables(&r, &c);
        let k = picks.len();
        let mut f = vec![0i64; r.len() * c.len()];
        for p in &picks {
            for (x, y) in f.iter_mut().zip(&pts[p.index(pts.len())]) {
                *x += y;
            }
        }
        let d = bvn_decompose(&t.to_flow(), &f, k).unwrap();
        prop_assert_eq!(d.parts.len(), k);
        prop_assert_eq!(d.sum(), f);
        for part in &d.parts {
            prop_assert!(pts.binary_search(&part.values().to_vec()).is_ok());
        }
    }
}

#[test]
fn json_round_trip_gives_the_same_points() {
    let graph = r#"{"vertices":["s","a","b","t"],
        "arcs":[{"id":"sa","tail":"s","head":"a","upper":1},
                {"id":"sb","tail":"s","head":"b","upper":1},
                {"id":"at","tail":"a","head":"t","upper":1},
                {"id":"bt","tail":"b","head":"t","upper":1}],
        "demand":{"s":-1,"t":1}}"#;
    let spec = parse_polytope(graph).unwrap().flow_spec();
    let pts = spec.lattice_points(DEFAULT_POINT_CAP).unwrap();
    // Two s–t paths of unit flow.
    assert_eq!(pts.points(), &[vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
}

#[test]
fn birkhoff_three_pipeline() {
    let t = TransportationSpec::birkhoff(3).unwrap();
    let spec = t.to_flow();
    let pts = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
    assert_eq!(pts.len(), 6);
    assert_eq!(maximal_cells(&spec, DEFAULT_POINT_CAP).unwrap().len(), 1);

    let order = subdivide_and_pull_order(&pts, &identity_ranking(pts.len())).unwrap();
    let gb = buchberger(&pts, &order, &BuchbergerOptions::default()).unwrap();
    assert!(gb.is_complete() && gb.reduced);
    for b in &gb.elements {
        // Both sides add up to the same table.
        assert_eq!(b.lead.image(&pts), b.trail.image(&pts));
        assert_eq!(b.lead.degree(), 3);
    }

    let (tri, _) = global_triangulation(&spec, &pts, &identity_ranking(pts.len()), DEFAULT_POINT_CAP).unwrap();
    assert!(is_unimodular(&tri));
    // Ehrhart leading coefficient 1/8, so normalized volume 4!/8 = 3.
    let vol: u128 = tri.simplices.iter().map(|s| tri.normalized_volume(s)).sum();
    assert_eq!(vol, 3);
    assert_eq!(tri.simplices.len(), 3);

    let moves = generate_moves_deg23(&spec, &pts, DEFAULT_POINT_CAP).unwrap();
    let fiber = enumerate_fiber(&pts, &[1; 9], 3, DEFAULT_POINT_CAP).unwrap();
    assert!(fiber_connected(&fiber, &moves).connected);
    assert!(!fiber_connected(&fiber, &moves.of_degree(2)).connected);
}
