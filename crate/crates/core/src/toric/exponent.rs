use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowcore::PointList;
use crate::order::TermOrder;

/// A monomial `x^u`: a multiset of point indices. Zero multiplicities are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(BTreeMap<usize, u32>);

impl ExponentVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut u = Self::new();
        for (i, m) in pairs {
            u.add_var(i, m);
        }
        u
    }

    /// `x_{i1} x_{i2} …`, repeats allowed.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self::from_pairs(indices.into_iter().map(|i| (i, 1)))
    }

    pub fn from_dense<T: Copy + Into<i64>>(dense: &[T]) -> Self {
        Self(
            dense
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| {
                    let m: i64 = m.into();
                    (m > 0).then_some((i, m as u32))
                })
                .collect(),
        )
    }

    pub fn to_dense(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        for (&i, &m) in &self.0 {
            v[i] = i64::from(m);
        }
        v
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn add_var(&mut self, i: usize, m: u32) {
        if m > 0 {
            *self.0.entry(i).or_insert(0) += m;
        }
    }

    /// Remove `m` copies of `i`; panics if fewer are present.
    pub fn remove_var(&mut self, i: usize, m: u32) {
        let e = self.0.get_mut(&i).expect("variable present");
        *e = e.checked_sub(m).expect("enough copies to remove");
        if *e == 0 {
            self.0.remove(&i);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&i, &m)| (i, m))
    }

    /// Point indices with multiplicity, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.iter().flat_map(|(i, m)| std::iter::repeat_n(i, m as usize)).collect()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.iter().all(|(i, m)| other.get(i) >= m)
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.support().all(|i| other.get(i) == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, m) in other.iter() {
            out.add_var(i, m);
        }
        out
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        let mut out = self.clone();
        for (i, m) in other.iter() {
            out.remove_var(i, m);
        }
        Some(out)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        Self(
            self.iter()
                .filter_map(|(i, m)| {
                    let k = m.min(other.get(i));
                    (k > 0).then_some((i, k))
                })
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, m) in other.iter() {
            let e = out.0.entry(i).or_insert(0);
            *e = (*e).max(m);
        }
        out
    }

    /// `π(u) = Σ u_p · p`.
    pub fn image(&self, points: &PointList) -> Vec<i64> {
        let mut out = vec![0; points.dimension()];
        for (i, m) in self.iter() {
            for (o, x) in out.iter_mut().zip(points.get(i)) {
                *o += i64::from(m) * x;
            }
        }
        out
    }

    fn check_indices(&self, n: usize) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= n => Err(Error::IndexMismatch { expected: n, found: i + 1 }),
            _ => Ok(()),
        }
    }

    /// Compare under a term order.
    pub fn compare(&self, other: &Self, order: &TermOrder) -> Result<Ordering> {
        self.check_indices(order.len())?;
        other.check_indices(order.len())?;
        let n = order.len();
        Ok(order.cmp_dense(&self.to_dense(n), &other.to_dense(n)))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(i, m)| if m == 1 { format!("x{i}") } else { format!("x{i}^{m}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A pure-difference binomial `x^lead - x^trail` with `lead ≻ trail` and no
/// common factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binomial {
    pub lead: ExponentVector,
    pub trail: ExponentVector,
}

impl Binomial {
    /// Cancel the common factor and orient by the order. Returns `None` when
    /// the two monomials coincide.
    pub fn new(a: ExponentVector, b: ExponentVector, order: &TermOrder) -> Result<Option<Self>> {
        let g = a.gcd(&b);
        let (a, b) = (a.div(&g).expect("gcd divides"), b.div(&g).expect("gcd divides"));
        Ok(match a.compare(&b, order)? {
            Ordering::Equal => None,
            Ordering::Greater => Some(Self { lead: a, trail: b }),
            Ordering::Less => Some(Self { lead: b, trail: a }),
        })
    }

    pub fn degree(&self) -> u32 {
        self.lead.degree().max(self.trail.degree())
    }

    /// Whether `π(lead) = π(trail)`, i.e. the binomial lies in the toric ideal.
    pub fn in_toric_ideal(&self, points: &PointList) -> bool {
        self.lead.image(points) == self.trail.image(points)
    }
}

impl fmt::Display for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {}", self.lead, self.trail)
    }
}
