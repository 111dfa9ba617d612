//! Buchberger's algorithm for pure-difference binomials on dense exponent
//! vectors.
//!
//! The toric ideal is obtained by elimination: in `k[t0, t, x]` the ideal
//! `⟨x_p - t0·t^{p'}⟩` (with `p'` the point in a chart of nonnegative
//! coordinates) is prime, and its elements free of `t` form `I_A`. The
//! block order compares the `t`-part by graded revlex first and the
//! `x`-part by the caller's term order, so the `t`-free elements of the
//! reduced basis are the reduced basis of `I_A`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::order::TermOrder;

pub(crate) type Mono = Vec<u16>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Complete,
    Truncated,
    TimedOut,
}

struct Elem {
    lead: Mono,
    trail: Mono,
    mask: u64,
}

struct Pair {
    lcm: Mono,
}

fn mask(m: &[u16]) -> u64 {
    m.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .fold(0, |acc, (i, _)| acc | 1 << (i % 64))
}

fn divides(a: &[u16], amask: u64, b: &[u16], bmask: u64) -> bool {
    amask & !bmask == 0 && a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

pub(crate) struct Engine<'a> {
    order: &'a TermOrder,
    nt: usize,
    // Image of each variable in t-exponent space, for membership checks.
    var_images: Vec<Vec<i64>>,
    elems: Vec<Elem>,
    active: Vec<usize>,
    pending: HashMap<(usize, usize), Pair>,
    queue: BinaryHeap<Reverse<(Vec<i128>, usize, usize)>>,
    rng: Option<ChaCha8Rng>,
    degree_cap: Option<u32>,
    deadline: Option<Instant>,
    truncated: bool,
}

impl<'a> Engine<'a> {
    /// `lifted[p]` are the nonnegative chart coordinates of point `p`.
    pub(crate) fn new(
        order: &'a TermOrder,
        lifted: &[Vec<i64>],
        degree_cap: Option<u32>,
        time_cap: Option<Duration>,
        seed: Option<u64>,
    ) -> Self {
        let d = lifted.first().map_or(0, Vec::len);
        let nt = d + 1;
        let mut var_images = Vec::with_capacity(nt + lifted.len());
        for k in 0..nt {
            let mut e = vec![0; nt];
            e[k] = 1;
            var_images.push(e);
        }
        for p in lifted {
            var_images.push(std::iter::once(1).chain(p.iter().copied()).collect());
        }
        Self {
            order,
            nt,
            var_images,
            elems: Vec::new(),
            active: Vec::new(),
            pending: HashMap::new(),
            queue: BinaryHeap::new(),
            rng: seed.map(ChaCha8Rng::seed_from_u64),
            degree_cap,
            deadline: time_cap.map(|c| Instant::now() + c),
            truncated: false,
        }
    }

    fn nvars(&self) -> usize {
        self.var_images.len()
    }

    fn image(&self, m: &[u16]) -> Vec<i64> {
        let mut out = vec![0; self.nt];
        for (v, &e) in m.iter().enumerate() {
            if e > 0 {
                for (o, x) in out.iter_mut().zip(&self.var_images[v]) {
                    *o += i64::from(e) * x;
                }
            }
        }
        out
    }

    /// Degree in the grading `deg x = deg t0 = 1`, `deg t_k = 0`.
    fn grading(&self, m: &[u16]) -> u32 {
        u32::from(m[0]) + m[self.nt..].iter().map(|&e| u32::from(e)).sum::<u32>()
    }

    fn cmp(&self, a: &[u16], b: &[u16]) -> Ordering {
        let (ta, tb) = (&a[..self.nt], &b[..self.nt]);
        let deg = |t: &[u16]| t.iter().map(|&e| u32::from(e)).sum::<u32>();
        match deg(ta).cmp(&deg(tb)) {
            Ordering::Equal => {}
            o => return o,
        }
        for k in (0..self.nt).rev() {
            if ta[k] != tb[k] {
                return tb[k].cmp(&ta[k]);
            }
        }
        self.order.cmp_dense(&a[self.nt..], &b[self.nt..])
    }

    fn key(&self, m: &[u16]) -> Vec<i128> {
        let mut key = vec![i128::from(self.grading(m))];
        key.push(m[..self.nt].iter().map(|&e| i128::from(e)).sum());
        key.extend(m[..self.nt].iter().rev().map(|&e| -i128::from(e)));
        key.extend(self.order.sort_key(&m[self.nt..]));
        key
    }

    fn find_reducer(&self, m: &[u16], mmask: u64) -> Option<usize> {
        self.active
            .iter()
            .copied()
            .find(|&i| divides(&self.elems[i].lead, self.elems[i].mask, m, mmask))
    }

    /// Normal form of a monomial modulo the active elements.
    fn reduce(&self, mut m: Mono) -> Mono {
        let mut mmask = mask(&m);
        while let Some(i) = self.find_reducer(&m, mmask) {
            let e = &self.elems[i];
            for ((x, &l), &t) in m.iter_mut().zip(&e.lead).zip(&e.trail) {
                *x = *x - l + t;
            }
            mmask = mask(&m);
        }
        m
    }

    /// Reduce both sides of `a - b`, cancel the common factor and insert.
    fn insert(&mut self, a: Mono, b: Mono) {
        let (mut a, mut b) = (self.reduce(a), self.reduce(b));
        if a == b {
            return;
        }
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            let g = (*x).min(*y);
            *x -= g;
            *y -= g;
        }
        let (lead, trail) = if self.cmp(&a, &b) == Ordering::Greater { (a, b) } else { (b, a) };
        assert_eq!(self.image(&lead), self.image(&trail), "binomial left the toric ideal");
        self.update(Elem { mask: mask(&lead), lead, trail });
    }

    /// Gebauer–Möller pair update for a new element.
    fn update(&mut self, h: Elem) {
        let hn = self.elems.len();
        let cands: Vec<(usize, Mono, bool)> = self
            .active
            .iter()
            .map(|&g| {
                let gl = &self.elems[g].lead;
                (g, lcm(&h.lead, gl), coprime(&h.lead, gl))
            })
            .collect();
        let masks: Vec<u64> = cands.iter().map(|c| mask(&c.1)).collect();
        let mut alive = vec![true; cands.len()];
        for a in 0..cands.len() {
            if cands[a].2 {
                continue;
            }
            let killed = (0..cands.len()).any(|b| {
                b != a && alive[b] && divides(&cands[b].1, masks[b], &cands[a].1, masks[a])
            });
            if killed {
                alive[a] = false;
            }
        }
        // Drop old pairs whose lcm is strictly covered through h.
        self.pending.retain(|&(i, j), p| {
            let pm = mask(&p.lcm);
            if !divides(&h.lead, h.mask, &p.lcm, pm) {
                return true;
            }
            let (li, lj) = (lcm(&self.elems[i].lead, &h.lead), lcm(&self.elems[j].lead, &h.lead));
            li == p.lcm || lj == p.lcm
        });
        let mut fresh = Vec::new();
        for (k, (g, l, cop)) in cands.into_iter().enumerate() {
            if alive[k] && !cop {
                fresh.push((g, l));
            }
        }
        self.active
            .retain(|&g| !divides(&h.lead, h.mask, &self.elems[g].lead, self.elems[g].mask));
        self.active.push(hn);
        self.elems.push(h);
        for (g, l) in fresh {
            let key = match self.rng.as_mut() {
                Some(rng) => vec![i128::from(rng.gen::<u32>())],
                None => self.key(&l),
            };
            self.queue.push(Reverse((key, g, hn)));
            self.pending.insert((g, hn), Pair { lcm: l });
        }
    }

    /// Run to completion (or until a cap) from the generators
    /// `t0·t^{p'} - x_p`.
    pub(crate) fn run(&mut self) -> Outcome {
        let nv = self.nvars();
        let mut gens: Vec<(Mono, Mono)> = (0..nv - self.nt)
            .map(|p| {
                let mut t = vec![0u16; nv];
                for (k, &e) in self.var_images[self.nt + p].iter().enumerate() {
                    t[k] = u16::try_from(e).expect("chart coordinates fit in u16");
                }
                let mut x = vec![0u16; nv];
                x[self.nt + p] = 1;
                (t, x)
            })
            .collect();
        if let Some(rng) = self.rng.as_mut() {
            gens.shuffle(rng);
        }
        for (t, x) in gens {
            self.insert(t, x);
        }
        while let Some(Reverse((_, i, j))) = self.queue.pop() {
            let Some(pair) = self.pending.remove(&(i, j)) else {
                continue;
            };
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Outcome::TimedOut;
                }
            }
            if let Some(cap) = self.degree_cap {
                if self.grading(&pair.lcm) > cap {
                    self.truncated = true;
                    continue;
                }
            }
            let side = |e: &Elem| -> Mono {
                pair.lcm
                    .iter()
                    .zip(&e.lead)
                    .zip(&e.trail)
                    .map(|((&l, &a), &t)| l - a + t)
                    .collect()
            };
            let (a, b) = (side(&self.elems[i]), side(&self.elems[j]));
            self.insert(a, b);
        }
        if self.truncated {
            Outcome::Truncated
        } else {
            Outcome::Complete
        }
    }

    /// The interreduced `t`-free elements as `(lead, trail)` x-exponents.
    pub(crate) fn eliminated(&self) -> Vec<(Mono, Mono)> {
        let nt = self.nt;
        self.active
            .iter()
            .filter(|&&i| self.elems[i].lead[..nt].iter().all(|&e| e == 0))
            .map(|&i| {
                let e = &self.elems[i];
                let trail = self.reduce(e.trail.clone());
                debug_assert!(trail[..nt].iter().all(|&x| x == 0));
                (e.lead[nt..].to_vec(), trail[nt..].to_vec())
            })
            .collect()
    }
}
