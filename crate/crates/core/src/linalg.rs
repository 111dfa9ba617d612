//! Exact integer linear algebra for the small matrices that show up here:
//! ranks, pivot coordinates, affine hulls and lattice indices.

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn normalize_row(row: &mut [i128]) {
    let g = row.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
}

/// Row-echelon form over Q, computed fraction-free. Returns the pivot
/// column of each nonzero row in order.
fn echelon(rows: &mut [Vec<i128>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let (a, b) = (rows[r][c], rows[i][c]);
                let (pivot_row, target) = if i < r {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = rows.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (t, &p) in target.iter_mut().zip(pivot_row.iter()) {
                    *t = *t * a - p * b;
                }
                normalize_row(target);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn widen(rows: &[Vec<i64>]) -> Vec<Vec<i128>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

/// Rank over Q of the matrix whose rows are given.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m = widen(rows);
    echelon(&mut m).len()
}

/// Columns that carry a basis of the column space (pivot columns of the
/// reduced row-echelon form).
pub fn pivot_columns(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut m = widen(rows);
    echelon(&mut m)
}

/// Differences `p - p0` for all points after the first.
pub fn differences(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(base) = points.first() else {
        return Vec::new();
    };
    points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect()
}

/// Dimension of the affine hull; `None` for the empty set.
pub fn affine_dimension(points: &[Vec<i64>]) -> Option<usize> {
    if points.is_empty() {
        None
    } else {
        Some(rank(&differences(points)))
    }
}

/// Coordinates onto which the affine hull of `points` projects
/// isomorphically.
pub fn affine_chart(points: &[Vec<i64>]) -> Vec<usize> {
    pivot_columns(&differences(points))
}

/// Restrict every point to the given coordinates.
pub fn project(points: &[Vec<i64>], coords: &[usize]) -> Vec<Vec<i64>> {
    points
        .iter()
        .map(|p| coords.iter().map(|&c| p[c]).collect())
        .collect()
}

/// The gcd of all maximal minors of the matrix with the given rows
/// (`rows.len() <= width`). This is the index of the lattice spanned by the
/// rows inside its saturation; zero when the rows are dependent.
pub fn maximal_minor_gcd(rows: &[Vec<i64>]) -> i128 {
    let d = rows.len();
    if d == 0 {
        return 1;
    }
    let n = rows[0].len();
    if d > n {
        return 0;
    }
    let mut m = widen(rows);
    // Unimodular column operations keep the gcd of maximal minors; reduce to
    // lower-triangular form and read off the diagonal.
    let mut det: i128 = 1;
    for i in 0..d {
        for j in (i + 1)..n {
            while m[i][j] != 0 {
                let q = m[i][i] / m[i][j];
                for row in m.iter_mut() {
                    let t = row[i] - q * row[j];
                    row[i] = row[j];
                    row[j] = t;
                }
            }
        }
        if m[i][i] == 0 {
            return 0;
        }
        det *= m[i][i];
    }
    det.abs()
}

/// Integer determinant of a square matrix (Bareiss elimination).
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    assert!(rows.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    let mut m = widen(rows);
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = ((k + 1)..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}
