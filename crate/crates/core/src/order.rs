//! Term orders on exponent vectors indexed by a point list: a weight
//! comparison followed by graded reverse lexicographic tiebreak.
//!
//! Variables are ranked from most expensive to cheapest. The last entry of
//! the ranking is the *minimal* variable: the revlex-cheapest one, and the
//! vertex pulled first in the matching pulling triangulation.

use std::cmp::Ordering;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::flowcore::PointList;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrder {
    points: PointList,
    ranking: Vec<usize>,
    weights: Vec<Ratio<i64>>,
    // Weights scaled by the lcm of their denominators, for fast exact
    // comparisons.
    scaled: Vec<i64>,
    weighted: bool,
}

fn check_permutation(ranking: &[usize], n: usize) -> Result<()> {
    if ranking.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &r in ranking {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::NotAPermutation(n));
        }
    }
    Ok(())
}

fn lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

impl TermOrder {
    /// An ω-order with revlex tiebreak over `ranking` (most expensive first).
    pub fn new(points: PointList, ranking: Vec<usize>, weights: Vec<Ratio<i64>>) -> Result<Self> {
        check_permutation(&ranking, points.len())?;
        if weights.len() != points.len() {
            return Err(Error::IndexMismatch { expected: points.len(), found: weights.len() });
        }
        if weights.iter().any(|w| *w < Ratio::from_integer(0)) {
            // Negative weights would break well-ordering: 1 must stay minimal.
            return Err(Error::pre("term-order weights must be nonnegative"));
        }
        let denom = weights.iter().fold(1, |acc, w| lcm(acc, *w.denom()));
        let scaled: Vec<i64> = weights.iter().map(|w| (w * denom).to_integer()).collect();
        let weighted = scaled.iter().any(|&w| w != 0);
        Ok(Self { points, ranking, weights, scaled, weighted })
    }

    pub fn points(&self) -> &PointList {
        &self.points
    }

    /// Variable indices from most expensive to minimal.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn weights(&self) -> &[Ratio<i64>] {
        &self.weights
    }

    /// The revlex-cheapest variable.
    pub fn minimal(&self) -> Option<usize> {
        self.ranking.last().copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Compare dense exponent vectors indexed by point position.
    pub fn compare(&self, a: &[i64], b: &[i64]) -> Result<Ordering> {
        for v in [a, b] {
            if v.len() != self.len() {
                return Err(Error::IndexMismatch { expected: self.len(), found: v.len() });
            }
        }
        Ok(self.cmp_dense(a, b))
    }

    /// Unchecked comparison of equal-length dense vectors.
    pub fn cmp_dense<T: Copy + Into<i64>>(&self, a: &[T], b: &[T]) -> Ordering {
        if self.weighted {
            let dot = |v: &[T]| -> i128 {
                v.iter().zip(&self.scaled).map(|(&x, &w)| x.into() as i128 * w as i128).sum()
            };
            match dot(a).cmp(&dot(b)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        let deg = |v: &[T]| -> i64 { v.iter().map(|&x| x.into()).sum() };
        match deg(a).cmp(&deg(b)) {
            Ordering::Equal => {}
            o => return o,
        }
        for &var in self.ranking.iter().rev() {
            let (x, y) = (a[var].into(), b[var].into());
            if x != y {
                // More of the cheapest differing variable makes a monomial smaller.
                return y.cmp(&x);
            }
        }
        Ordering::Equal
    }
}

impl TermOrder {
    /// A key whose lexicographic order agrees with [`cmp_dense`](Self::cmp_dense).
    pub fn sort_key<T: Copy + Into<i64>>(&self, v: &[T]) -> Vec<i128> {
        let mut key = Vec::with_capacity(v.len() + 2);
        key.push(v.iter().zip(&self.scaled).map(|(&x, &w)| x.into() as i128 * w as i128).sum());
        key.push(v.iter().map(|&x| x.into() as i128).sum());
        key.extend(self.ranking.iter().rev().map(|&var| -(v[var].into() as i128)));
        key
    }
}

/// The pure graded revlex order in which `ranking` lists variables from most
/// expensive to minimal.
pub fn revlex_from_ranking(points: &PointList, ranking: &[usize]) -> Result<TermOrder> {
    TermOrder::new(points.clone(), ranking.to_vec(), vec![Ratio::from_integer(0); points.len()])
}

/// Heights `ω_p = Σ_a p_a²`.
///
/// On each unit slab `{k, k+1}` the square agrees with the affine map
/// `(2k+1)t - k(k+1)` and lies strictly above it elsewhere, so the regular
/// subdivision these heights induce is exactly the unit-cell subdivision.
pub fn squared_heights(points: &PointList) -> Vec<Ratio<i64>> {
    points
        .iter()
        .map(|p| Ratio::from_integer(p.iter().map(|x| x * x).sum()))
        .collect()
}

/// The subdivide-and-pull order: cell-inducing heights with revlex
/// tiebreak from the pulling ranking.
pub fn subdivide_and_pull_order(points: &PointList, pull_ranking: &[usize]) -> Result<TermOrder> {
    TermOrder::new(points.clone(), pull_ranking.to_vec(), squared_heights(points))
}

/// Identity ranking `0, 1, …, n-1`: the last point is minimal.
pub fn identity_ranking(n: usize) -> Vec<usize> {
    (0..n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcore::{maximal_cells, TransportationSpec, DEFAULT_POINT_CAP};
    use proptest::prelude::*;

    fn unit_points(n: usize) -> PointList {
        PointList::new((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<i64> {
        (0..n).map(|j| i64::from(i == j)).collect()
    }

    #[test]
    fn later_variables_are_smaller() {
        let o = revlex_from_ranking(&unit_points(3), &identity_ranking(3)).unwrap();
        assert_eq!(o.compare(&e(3, 1), &e(3, 0)).unwrap(), Ordering::Less);
        assert_eq!(o.compare(&e(3, 2), &e(3, 1)).unwrap(), Ordering::Less);
        assert_eq!(o.minimal(), Some(2));
    }

    #[test]
    fn graded_before_revlex() {
        let o = revlex_from_ranking(&unit_points(3), &identity_ranking(3)).unwrap();
        assert_eq!(o.compare(&[1, 0, 0], &[0, 0, 2]).unwrap(), Ordering::Less);
    }

    #[test]
    fn revlex_textbook_case() {
        // x1 x3 vs x2^2 in grevlex with x1 > x2 > x3: x1 x3 < x2^2.
        let o = revlex_from_ranking(&unit_points(3), &identity_ranking(3)).unwrap();
        assert_eq!(o.compare(&[1, 0, 1], &[0, 2, 0]).unwrap(), Ordering::Less);
    }

    #[test]
    fn ranking_last_is_minimal_variable() {
        let o = revlex_from_ranking(&unit_points(4), &[2, 0, 3, 1]).unwrap();
        for i in [0, 2, 3] {
            assert_eq!(o.compare(&e(4, 1), &e(4, i)).unwrap(), Ordering::Less);
        }
    }

    #[test]
    fn weights_dominate() {
        let pts = unit_points(2);
        let o = TermOrder::new(pts, vec![0, 1], vec![Ratio::new(1, 2), Ratio::from_integer(3)]).unwrap();
        // e_0 has weight 1/2 < 3 even though e_1 is revlex-cheaper.
        assert_eq!(o.compare(&e(2, 0), &e(2, 1)).unwrap(), Ordering::Less);
        assert_eq!(o.compare(&[5, 0], &[0, 1]).unwrap(), Ordering::Less);
        assert_eq!(o.compare(&[6, 0], &[0, 1]).unwrap(), Ordering::Greater);
    }

    #[test]
    fn rejects_bad_input() {
        let pts = unit_points(3);
        assert!(matches!(revlex_from_ranking(&pts, &[0, 0, 1]), Err(Error::NotAPermutation(3))));
        assert!(matches!(revlex_from_ranking(&pts, &[0, 1]), Err(Error::NotAPermutation(3))));
        let o = revlex_from_ranking(&pts, &[0, 1, 2]).unwrap();
        assert!(matches!(o.compare(&[1, 0], &[0, 1, 0]), Err(Error::IndexMismatch { .. })));
        let neg = vec![Ratio::from_integer(-1), Ratio::from_integer(0), Ratio::from_integer(0)];
        assert!(TermOrder::new(pts, vec![0, 1, 2], neg).is_err());
    }

    #[test]
    fn zero_one_points_have_equal_weights() {
        let pts = TransportationSpec::birkhoff(3).unwrap().lattice_points(DEFAULT_POINT_CAP).unwrap();
        let o = subdivide_and_pull_order(&pts, &identity_ranking(pts.len())).unwrap();
        assert!(o.weights().iter().all(|w| *w == Ratio::from_integer(3)));
    }

    #[test]
    fn segment_heights_and_crease() {
        let pts = PointList::new(vec![vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap();
        let w = squared_heights(&pts);
        assert_eq!(w, [1, 2, 5].map(Ratio::from_integer).to_vec());
        // Without the homogenizing coordinate: 0, 1, 4. The midpoint sits
        // strictly below the chord, so {0, 2} is not a lower face.
        assert!(w[1] * 2 < w[0] + w[2]);
    }

    /// Lower-hull oracle: for each maximal cell with offset k, the affine
    /// function h_k(p) = Σ (2k_a+1) p_a - k_a(k_a+1) is a supporting
    /// function of the lifted points whose contact set is exactly the cell.
    #[test]
    fn heights_induce_the_cell_subdivision() {
        for (r, c) in [(vec![2, 2], vec![1, 1, 2]), (vec![3, 1], vec![2, 1, 1]), (vec![2, 2], vec![2, 1, 1])] {
            let t = TransportationSpec::new(r, c).unwrap();
            let spec = t.to_flow();
            let pts = t.lattice_points(DEFAULT_POINT_CAP).unwrap();
            let w = squared_heights(&pts);
            let cells = maximal_cells(&spec, DEFAULT_POINT_CAP).unwrap();
            let mut covered = vec![false; pts.len()];
            for cell in &cells {
                let k = cell.offset();
                for (i, p) in pts.iter().enumerate() {
                    let h: i64 = p.iter().zip(k).map(|(&x, &k)| (2 * k + 1) * x - k * (k + 1)).sum();
                    let h = Ratio::from_integer(h);
                    assert!(w[i] >= h);
                    assert_eq!(w[i] == h, cell.contains(p));
                    covered[i] |= w[i] == h;
                }
            }
            assert!(covered.iter().all(|&c| c));
        }
    }

    #[test]
    fn weights_affine_on_cells() {
        // Within one cell, p + q = p' + q' implies equal height sums.
        let t = TransportationSpec::new(vec![3, 2, 2], vec![2, 3, 2]).unwrap();
        let spec = t.to_flow();
        for cell in maximal_cells(&spec, DEFAULT_POINT_CAP).unwrap() {
            let flows = cell.flows(DEFAULT_POINT_CAP).unwrap();
            let h = |p: &Vec<i64>| p.iter().map(|x| x * x).sum::<i64>();
            for a in &flows {
                for b in &flows {
                    for c in &flows {
                        let d: Vec<i64> = a.iter().zip(b).zip(c).map(|((x, y), z)| x + y - z).collect();
                        if flows.contains(&d) {
                            assert_eq!(h(a) + h(b), h(c) + h(&d));
                        }
                    }
                }
            }
        }
    }

    fn order_strategy() -> impl Strategy<Value = (TermOrder, Vec<i64>, Vec<i64>, Vec<i64>)> {
        let n = 5;
        (
            Just(identity_ranking(n)).prop_shuffle(),
            prop::collection::vec(0i64..4, n),
            prop::collection::vec(0i64..4, n),
            prop::collection::vec(0i64..4, n),
            prop::collection::vec(0i64..4, n),
        )
            .prop_map(move |(ranking, w, a, b, c)| {
                let weights = w.into_iter().map(|x| Ratio::new(x, 2)).collect();
                (TermOrder::new(unit_points(n), ranking, weights).unwrap(), a, b, c)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn compatible_with_addition((o, a, b, c) in order_strategy()) {
            let ac: Vec<i64> = a.iter().zip(&c).map(|(x, y)| x + y).collect();
            let bc: Vec<i64> = b.iter().zip(&c).map(|(x, y)| x + y).collect();
            prop_assert_eq!(o.cmp_dense(&a, &b), o.cmp_dense(&ac, &bc));
        }

        #[test]
        fn total_antisymmetric_transitive((o, a, b, c) in order_strategy()) {
            prop_assert_eq!(o.cmp_dense(&a, &b), o.cmp_dense(&b, &a).reverse());
            prop_assert_eq!(o.cmp_dense(&a, &b) == Ordering::Equal, a == b);
            if o.cmp_dense(&a, &b) != Ordering::Greater && o.cmp_dense(&b, &c) != Ordering::Greater {
                prop_assert_ne!(o.cmp_dense(&a, &c), Ordering::Greater);
            }
        }

        #[test]
        fn sort_key_agrees((o, a, b, _c) in order_strategy()) {
            prop_assert_eq!(o.sort_key(&a).cmp(&o.sort_key(&b)), o.cmp_dense(&a, &b));
        }

        #[test]
        fn zero_is_minimum((o, a, _b, _c) in order_strategy()) {
            let zero = vec![0i64; a.len()];
            if a != zero {
                prop_assert_eq!(o.cmp_dense(&zero, &a), Ordering::Less);
            }
        }
    }
}
