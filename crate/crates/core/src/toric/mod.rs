//! Pure-difference binomials and reduced Gröbner bases of toric ideals.
//!
//! Coefficients are never represented: S-pairs and reductions of binomials
//! `x^u - x^v` stay pure differences, so everything is exponent-vector
//! arithmetic.

mod engine;
mod exponent;

use std::cmp::Ordering;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use exponent::{Binomial, ExponentVector};

use crate::error::{Error, Result};
use crate::flowcore::PointList;
use crate::linalg;
use crate::order::TermOrder;
use engine::{Engine, Outcome};

/// How a Buchberger run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    /// Every basis element of degree at most the cap is present; pairs of
    /// larger degree were skipped.
    Truncated { degree_cap: u32 },
    TimedOut,
}

#[derive(Debug, Clone, Default)]
pub struct BuchbergerOptions {
    pub degree_cap: Option<u32>,
    pub time_cap: Option<Duration>,
    /// Randomize generator and S-pair order; the reduced basis must not
    /// depend on it.
    pub shuffle_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub elements: Vec<Binomial>,
    pub order: TermOrder,
    pub status: Status,
    pub reduced: bool,
}

/// Points must lie on an affine hyperplane missing the origin.
pub fn is_homogeneous(points: &PointList) -> bool {
    match linalg::affine_dimension(points.points()) {
        None => true,
        Some(d) => linalg::rank(points.points()) == d + 1,
    }
}

/// Chart coordinates of the points, translated to be nonnegative.
fn lift(points: &PointList) -> Vec<Vec<i64>> {
    let chart = linalg::pivot_columns(points.points());
    let projected = linalg::project(points.points(), &chart);
    let mins: Vec<i64> = (0..chart.len())
        .map(|c| projected.iter().map(|p| p[c]).min().unwrap_or(0))
        .collect();
    projected
        .into_iter()
        .map(|p| p.iter().zip(&mins).map(|(x, m)| x - m).collect())
        .collect()
}

fn sort_elements(elements: &mut [Binomial], order: &TermOrder) {
    let n = order.len();
    elements.sort_by(|a, b| order.cmp_dense(&a.lead.to_dense(n), &b.lead.to_dense(n)));
}

/// Reduced Gröbner basis of the toric ideal of `points` under `order`.
///
/// With a degree cap the result is the truncated basis and flagged as such;
/// with a time cap an unfinished run is flagged `TimedOut`. Only a
/// `Complete` result is a Gröbner basis of the whole ideal.
pub fn buchberger(points: &PointList, order: &TermOrder, opts: &BuchbergerOptions) -> Result<GroebnerBasis> {
    if order.points() != points {
        return Err(Error::pre("term order is defined over a different point list"));
    }
    if !is_homogeneous(points) {
        return Err(Error::pre("points do not lie on an affine hyperplane off the origin"));
    }
    if points.len() <= 1 {
        return Ok(GroebnerBasis { elements: Vec::new(), order: order.clone(), status: Status::Complete, reduced: true });
    }
    let lifted = lift(points);
    let mut engine = Engine::new(order, &lifted, opts.degree_cap, opts.time_cap, opts.shuffle_seed);
    let outcome = engine.run();
    let mut elements: Vec<Binomial> = engine
        .eliminated()
        .into_iter()
        .map(|(l, t)| Binomial { lead: ExponentVector::from_dense(&l), trail: ExponentVector::from_dense(&t) })
        .collect();
    for b in &elements {
        assert!(b.in_toric_ideal(points), "basis element {b} is not in the toric ideal");
    }
    sort_elements(&mut elements, order);
    let status = match outcome {
        Outcome::Complete => Status::Complete,
        Outcome::Truncated => Status::Truncated { degree_cap: opts.degree_cap.unwrap_or(0) },
        Outcome::TimedOut => Status::TimedOut,
    };
    log::debug!("buchberger: {} elements, {:?}", elements.len(), status);
    Ok(GroebnerBasis { elements, order: order.clone(), status, reduced: outcome != Outcome::TimedOut })
}

/// Reduce a monomial to normal form modulo the leads of `reducers`.
pub fn normal_form(m: &ExponentVector, reducers: &[Binomial]) -> ExponentVector {
    let mut m = m.clone();
    while let Some(r) = reducers.iter().find(|r| r.lead.divides(&m)) {
        m = m.div(&r.lead).expect("lead divides").mul(&r.trail);
    }
    m
}

/// The S-combination of `f` and `g`, both sides reduced modulo `reducers`,
/// normalized; `None` when it reduces to zero.
pub fn spair_reduce(f: &Binomial, g: &Binomial, reducers: &[Binomial], order: &TermOrder) -> Result<Option<Binomial>> {
    let l = f.lead.lcm(&g.lead);
    let a = l.div(&f.lead).expect("lcm").mul(&f.trail);
    let b = l.div(&g.lead).expect("lcm").mul(&g.trail);
    let (a, b) = (normal_form(&a, reducers), normal_form(&b, reducers));
    Binomial::new(a, b, order)
}

impl GroebnerBasis {
    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn normal_form(&self, m: &ExponentVector) -> ExponentVector {
        normal_form(m, &self.elements)
    }

    /// Whether `x^u - x^v` lies in the ideal: equal normal forms.
    pub fn contains(&self, u: &ExponentVector, v: &ExponentVector) -> bool {
        self.normal_form(u) == self.normal_form(v)
    }

    /// Every S-pair reduces to zero modulo the basis.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let els = &self.elements;
        (0..els.len()).all(|i| {
            (i + 1..els.len()).all(|j| matches!(spair_reduce(&els[i], &els[j], els, &self.order), Ok(None)))
        })
    }

    /// No term of any element is divisible by the lead of another.
    pub fn check_reduced(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || (!b.lead.divides(&a.lead) && !b.lead.divides(&a.trail)))
        }) && self.elements.iter().all(|b| !b.lead.divides(&b.trail))
    }

    /// Whether leads exceed trails under the basis order.
    pub fn check_oriented(&self) -> bool {
        self.elements
            .iter()
            .all(|b| b.lead.compare(&b.trail, &self.order) == Ok(Ordering::Greater))
    }
}

/// The minimal generators of the initial ideal: the leads of a complete
/// reduced basis.
pub fn initial_ideal_minimal_generators(gb: &GroebnerBasis) -> Result<Vec<ExponentVector>> {
    if !gb.reduced {
        return Err(Error::NotReduced);
    }
    if !gb.is_complete() {
        return Err(Error::Truncated);
    }
    let leads: Vec<ExponentVector> = gb.elements.iter().map(|b| b.lead.clone()).collect();
    for (i, a) in leads.iter().enumerate() {
        for (j, b) in leads.iter().enumerate() {
            if i != j && a.divides(b) {
                return Err(Error::NotReduced);
            }
        }
    }
    Ok(leads)
}

/// Largest lead degree of a complete basis; 0 when empty.
pub fn max_degree(gb: &GroebnerBasis) -> Result<u32> {
    if !gb.is_complete() {
        return Err(Error::Truncated);
    }
    Ok(gb.elements.iter().map(|b| b.lead.degree()).max().unwrap_or(0))
}

#[cfg(test)]
mod tests;
