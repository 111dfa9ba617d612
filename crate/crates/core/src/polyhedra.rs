//! Facets of the convex hull of a small point set, by the double-description
//! method on the homogenized cone.

use crate::linalg;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone)]
struct Ray {
    y: Vec<i128>,
    // Constraints (point indices) tight at y, as a bitset.
    zero: Vec<u64>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn count(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn contains(sup: &[u64], sub: &[u64]) -> bool {
    sup.iter().zip(sub).all(|(a, b)| b & !a == 0)
}

/// Solve for the inverse-transpose columns of a square integer matrix:
/// returns `r_j` with `rows[i] · r_j = 0` for `i ≠ j` and `> 0` for `i = j`.
fn dual_basis(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = rows.len();
    (0..n)
        .map(|j| {
            // Null vector of the other rows via cofactors of the (n-1)×n minor.
            let others: Vec<&Vec<i128>> = rows.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, r)| r).collect();
            let mut y: Vec<i128> = (0..n)
                .map(|c| {
                    let minor: Vec<Vec<i64>> = others
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, &x)| x as i64).collect())
                        .collect();
                    let det = linalg::determinant(&minor);
                    if c % 2 == 0 { det } else { -det }
                })
                .collect();
            if dot(&y, &rows[j]) < 0 {
                y.iter_mut().for_each(|x| *x = -*x);
            }
            primitive(&mut y);
            y
        })
        .collect()
}

/// Facets of `conv(points)` inside its affine hull, each as the sorted list
/// of point indices lying on it. Empty for fewer than two affinely distinct
/// points.
pub fn facets(points: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let Some(dim) = linalg::affine_dimension(points) else {
        return Vec::new();
    };
    if dim == 0 {
        return Vec::new();
    }
    let chart = linalg::affine_chart(points);
    let rows: Vec<Vec<i128>> = linalg::project(points, &chart)
        .into_iter()
        .map(|p| std::iter::once(1i128).chain(p.into_iter().map(i128::from)).collect())
        .collect();
    let n = rows.len();
    let words = n.div_ceil(64);
    // Affinely independent starting points: pivot rows of the lifted matrix.
    let lifted: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let transposed: Vec<Vec<i64>> = (0..=dim).map(|c| lifted.iter().map(|r| r[c]).collect()).collect();
    let basis = linalg::pivot_columns(&transposed);
    debug_assert_eq!(basis.len(), dim + 1);
    let base_rows: Vec<Vec<i128>> = basis.iter().map(|&i| rows[i].clone()).collect();
    let mut rays: Vec<Ray> = dual_basis(&base_rows)
        .into_iter()
        .map(|y| Ray { y, zero: vec![0; words] })
        .collect();
    for r in rays.iter_mut() {
        for &i in &basis {
            if dot(&r.y, &rows[i]) == 0 {
                set_bit(&mut r.zero, i);
            }
        }
    }
    for i in (0..n).filter(|&i| !basis.contains(&i)) {
        let vals: Vec<i128> = rays.iter().map(|r| dot(&r.y, &rows[i])).collect();
        let (mut pos, mut neg, mut zer) = (Vec::new(), Vec::new(), Vec::new());
        for (k, &v) in vals.iter().enumerate() {
            match v.signum() {
                1 => pos.push(k),
                -1 => neg.push(k),
                _ => zer.push(k),
            }
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = and(&rays[p].zero, &rays[q].zero);
                if count(&common) + 2 < dim + 1 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !contains(&r.zero, &common));
                if !adjacent {
                    continue;
                }
                let (a, b) = (vals[p], -vals[q]);
                let mut y: Vec<i128> = rays[p].y.iter().zip(&rays[q].y).map(|(x, z)| b * x + a * z).collect();
                primitive(&mut y);
                let mut zero = common;
                set_bit(&mut zero, i);
                next.push(Ray { y, zero });
            }
        }
        for &k in pos.iter().chain(&zer) {
            let mut r = rays[k].clone();
            if vals[k] == 0 {
                set_bit(&mut r.zero, i);
            }
            next.push(r);
        }
        rays = next;
    }
    let mut out: Vec<Vec<usize>> = rays
        .iter()
        .map(|r| (0..n).filter(|&i| bit(&r.zero, i)).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every affinely spanning subset of size dim with all
    /// points on one side of its hyperplane.
    fn brute_facets(points: &[Vec<i64>]) -> Vec<Vec<usize>> {
        let dim = linalg::affine_dimension(points).unwrap();
        let chart = linalg::affine_chart(points);
        let pts = linalg::project(points, &chart);
        let n = pts.len();
        let mut out = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << n) {
            let sub: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let chosen: Vec<Vec<i64>> = sub.iter().map(|&i| pts[i].clone()).collect();
            if sub.len() < dim || linalg::affine_dimension(&chosen) != Some(dim - 1) {
                continue;
            }
            // Normal via the lifted rows' null space: test side-ness with determinants.
            let base: Vec<Vec<i64>> = {
                let mut b = Vec::new();
                for &i in &sub {
                    let cand: Vec<Vec<i64>> = b.iter().cloned().chain([pts[i].clone()]).collect();
                    if linalg::affine_dimension(&cand) == Some(cand.len() - 1) {
                        b = cand;
                    }
                }
                b
            };
            let side = |p: &Vec<i64>| {
                let mut m: Vec<Vec<i64>> = base.iter().map(|q| std::iter::once(1).chain(q.iter().copied()).collect()).collect();
                m.push(std::iter::once(1).chain(p.iter().copied()).collect());
                linalg::determinant(&m).signum()
            };
            let signs: Vec<i128> = pts.iter().map(side).collect();
            let on: Vec<usize> = (0..n).filter(|&i| signs[i] == 0).collect();
            if on != sub {
                continue;
            }
            if signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0) {
                out.insert(sub);
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn square_has_four_edges() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(facets(&pts), vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn segment_and_point() {
        assert_eq!(facets(&[vec![3, 3], vec![4, 4], vec![5, 5]]), vec![vec![0], vec![2]]);
        assert!(facets(&[vec![1, 2]]).is_empty());
    }

    #[test]
    fn cube_in_higher_space() {
        // The unit 3-cube embedded in R^4 on the hyperplane x4 = 1.
        let pts: Vec<Vec<i64>> = (0..8).map(|m| vec![m & 1, m >> 1 & 1, m >> 2 & 1, 1]).collect();
        let f = facets(&pts);
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|s| s.len() == 4));
    }

    #[test]
    fn matches_brute_force() {
        let configs: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]],
            vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 1], vec![2, 2], vec![1, 0]],
            // Birkhoff B_3.
            vec![
                vec![1, 0, 0, 0, 1, 0, 0, 0, 1],
                vec![1, 0, 0, 0, 0, 1, 0, 1, 0],
                vec![0, 1, 0, 1, 0, 0, 0, 0, 1],
                vec![0, 1, 0, 0, 0, 1, 1, 0, 0],
                vec![0, 0, 1, 1, 0, 0, 0, 1, 0],
                vec![0, 0, 1, 0, 1, 0, 1, 0, 0],
            ],
            // Octahedron.
            vec![vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, -1, 0], vec![0, 0, 1], vec![0, 0, -1]],
        ];
        for pts in configs {
            assert_eq!(facets(&pts), brute_facets(&pts), "{pts:?}");
        }
    }
}
