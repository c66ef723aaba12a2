//! Echelon machinery shared by infinite groups and their finite frames.
//!
//! A [`PcGroup`] has coordinates `0..hirsch` with the polycyclic property:
//! `N_i = {g : g_0 = … = g_{i-1} = 0}` is a normal subgroup, coordinate `i`
//! is additive on `N_i` modulo `N_{i+1}`, and the first `k` coordinates of a
//! product depend only on the first `k` coordinates of the factors. Finite
//! frames reduce every coordinate modulo a fixed `m`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::ext_gcd;
use crate::scalar::{add, modulo, mul, neg, sub, Int};

pub trait PcGroup {
    type S: Int;

    fn hirsch(&self) -> usize;
    fn mul(&self, a: &[Self::S], b: &[Self::S]) -> Vec<Self::S>;
    fn inv(&self, a: &[Self::S]) -> Vec<Self::S>;
    /// Coordinate modulus for finite frames; `None` for the infinite group.
    fn modulus(&self) -> Option<Self::S>;

    fn identity(&self) -> Vec<Self::S> {
        vec![Self::S::zero(); self.hirsch()]
    }

    fn pow(&self, a: &[Self::S], k: &Self::S) -> Vec<Self::S> {
        let (base, mut e) = if k.is_negative() {
            (self.inv(a), neg(k))
        } else {
            (a.to_vec(), k.clone())
        };
        let two = add(&Self::S::one(), &Self::S::one());
        let mut acc = self.identity();
        let mut sq = base;
        while !e.is_zero() {
            let (q, r) = e.div_rem(&two);
            if !r.is_zero() {
                acc = self.mul(&acc, &sq);
            }
            e = q;
            if !e.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    fn comm(&self, a: &[Self::S], b: &[Self::S]) -> Vec<Self::S> {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&ab, &self.inv(&ba))
    }

    /// `a b a⁻¹`.
    fn conj(&self, a: &[Self::S], b: &[Self::S]) -> Vec<Self::S> {
        self.mul(&self.mul(a, b), &self.inv(a))
    }

    fn is_identity(&self, a: &[Self::S]) -> bool {
        a.iter().all(|x| x.is_zero())
    }
}

/// First nonzero coordinate.
pub fn depth<T: Int>(a: &[T]) -> Option<usize> {
    a.iter().position(|x| !x.is_zero())
}

/// Induced sequence: for every depth either nothing or one element whose
/// leading coordinate is positive (dividing the modulus in finite frames).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Echelon<T> {
    pub rows: Vec<Option<Vec<T>>>,
}

impl<T: Int> Echelon<T> {
    pub fn trivial(h: usize) -> Self {
        Echelon { rows: vec![None; h] }
    }

    pub fn seq(&self) -> Vec<Vec<T>> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn pivots(&self) -> Vec<(usize, T)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(d, r)| r.as_ref().map(|r| (d, r[d].clone())))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_pivot(&self, d: usize) -> bool {
        self.rows[d].is_some()
    }
}

fn normalize<G: PcGroup>(g: &G, a: Vec<G::S>) -> Vec<G::S> {
    match g.modulus() {
        Some(m) => a.iter().map(|x| modulo(x, &m)).collect(),
        None => a,
    }
}

/// Closes `gens` into an induced sequence of the subgroup they generate.
pub fn induce<G: PcGroup>(g: &G, gens: &[Vec<G::S>]) -> Echelon<G::S> {
    let mut ech = Echelon::trivial(g.hirsch());
    extend(g, &mut ech, gens);
    ech
}

/// Adds `gens` to an existing induced sequence and re-closes.
pub fn extend<G: PcGroup>(g: &G, ech: &mut Echelon<G::S>, gens: &[Vec<G::S>]) {
    let mut queue: Vec<Vec<G::S>> = gens.iter().rev().map(|x| normalize(g, x.clone())).collect();
    while let Some(x) = queue.pop() {
        insert(g, ech, x, &mut queue);
    }
    reduce(g, ech);
}

fn insert<G: PcGroup>(
    g: &G,
    ech: &mut Echelon<G::S>,
    mut x: Vec<G::S>,
    queue: &mut Vec<Vec<G::S>>,
) {
    let m = g.modulus();
    loop {
        let Some(d) = depth(&x) else { return };
        match ech.rows[d].take() {
            None => {
                let mut t = x;
                if let Some(m) = &m {
                    // make the lead divide m and record the power that sinks
                    let (gcd, u, _) = ext_gcd(&t[d], m);
                    if gcd != t[d] {
                        let k = t[d].div_floor(&gcd);
                        let root = normalize(g, g.pow(&t, &u));
                        queue.push(normalize(g, g.mul(&t, &g.pow(&root, &neg(&k)))));
                        t = root;
                    }
                    let order = m.div_floor(&t[d]);
                    queue.push(normalize(g, g.pow(&t, &order)));
                } else if t[d].is_negative() {
                    t = g.inv(&t);
                }
                push_commutators(g, ech, &t, queue);
                ech.rows[d] = Some(t);
                return;
            }
            Some(t) => {
                let (a, b) = (t[d].clone(), x[d].clone());
                if b.is_multiple_of(&a) {
                    ech.rows[d] = Some(t.clone());
                    let q = b.div_floor(&a);
                    x = normalize(g, g.mul(&x, &g.pow(&t, &neg(&q))));
                    continue;
                }
                let (gcd, u, v) = ext_gcd(&a, &b);
                let combined = normalize(g, g.mul(&g.pow(&t, &u), &g.pow(&x, &v)));
                debug_assert_eq!(combined[d], gcd);
                let rt = normalize(g, g.mul(&t, &g.pow(&combined, &neg(&a.div_floor(&gcd)))));
                let rx = normalize(g, g.mul(&x, &g.pow(&combined, &neg(&b.div_floor(&gcd)))));
                queue.push(rt);
                queue.push(rx);
                x = combined;
                // re-enter with an empty slot at depth d
            }
        }
    }
}

fn push_commutators<G: PcGroup>(
    g: &G,
    ech: &Echelon<G::S>,
    t: &[G::S],
    queue: &mut Vec<Vec<G::S>>,
) {
    let ti = g.inv(t);
    for r in ech.rows.iter().flatten() {
        for (p, q) in [(t, r.as_slice()), (r.as_slice(), t)] {
            let c = g.comm(p, q);
            if !g.is_identity(&c) {
                queue.push(normalize(g, c));
            }
        }
        let c = g.comm(&ti, r);
        if !g.is_identity(&c) {
            queue.push(normalize(g, c));
        }
        let c = g.comm(&g.inv(r), t);
        if !g.is_identity(&c) {
            queue.push(normalize(g, c));
        }
    }
}

/// Reduces entries above pivots into `[0, lead)`.
fn reduce<G: PcGroup>(g: &G, ech: &mut Echelon<G::S>) {
    let h = g.hirsch();
    for d in 0..h {
        let Some(mut t) = ech.rows[d].clone() else { continue };
        for j in (d + 1)..h {
            let Some(pj) = &ech.rows[j] else { continue };
            let q = t[j].div_floor(&pj[j]);
            if !q.is_zero() {
                t = normalize(g, g.mul(&t, &g.pow(pj, &neg(&q))));
            }
        }
        ech.rows[d] = Some(t);
    }
}

/// Sifts `x` through the sequence; returns the residue (identity iff member).
pub fn sift<G: PcGroup>(g: &G, ech: &Echelon<G::S>, x: &[G::S]) -> Vec<G::S> {
    let mut x = normalize(g, x.to_vec());
    for d in 0..g.hirsch() {
        if x[d].is_zero() {
            continue;
        }
        let Some(t) = &ech.rows[d] else { return x };
        if !x[d].is_multiple_of(&t[d]) {
            return x;
        }
        let q = x[d].div_floor(&t[d]);
        x = normalize(g, g.mul(&x, &g.pow(t, &neg(&q))));
    }
    x
}

/// Like [`sift`] but also returns the element `u` of the subgroup with
/// `residue = x·u`.
pub fn sift_with<G: PcGroup>(
    g: &G,
    ech: &Echelon<G::S>,
    x: &[G::S],
    stop: usize,
) -> (Vec<G::S>, Vec<G::S>) {
    let mut x = normalize(g, x.to_vec());
    let mut u = g.identity();
    for d in 0..stop.min(g.hirsch()) {
        if x[d].is_zero() {
            continue;
        }
        let Some(t) = &ech.rows[d] else { break };
        if !x[d].is_multiple_of(&t[d]) {
            break;
        }
        let q = x[d].div_floor(&t[d]);
        let step = normalize(g, g.pow(t, &neg(&q)));
        x = normalize(g, g.mul(&x, &step));
        u = normalize(g, g.mul(&u, &step));
    }
    (x, u)
}

pub fn contains<G: PcGroup>(g: &G, ech: &Echelon<G::S>, x: &[G::S]) -> bool {
    g.is_identity(&sift(g, ech, x))
}

/// Closure of `gens` under conjugation by `by` and their inverses.
pub fn normal_closure<G: PcGroup>(
    g: &G,
    gens: &[Vec<G::S>],
    by: &[Vec<G::S>],
) -> Echelon<G::S> {
    let mut ech = induce(g, gens);
    let by_inv: Vec<Vec<G::S>> = by.iter().map(|s| g.inv(s)).collect();
    loop {
        let mut extra = Vec::new();
        for t in ech.rows.iter().flatten() {
            for s in by.iter().chain(&by_inv) {
                let c = normalize(g, g.conj(s, t));
                if !contains(g, &ech, &c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            return ech;
        }
        extend(g, &mut ech, &extra);
    }
}

/// Whether `⟨ech⟩` is normalized by every element of `by`.
pub fn is_normalized_by<G: PcGroup>(g: &G, ech: &Echelon<G::S>, by: &[Vec<G::S>]) -> bool {
    ech.rows.iter().flatten().all(|t| {
        by.iter().all(|s| {
            contains(g, ech, &g.conj(s, t)) && contains(g, ech, &g.conj(&g.inv(s), t))
        })
    })
}

/// Order of a subgroup of a finite frame: `Π m / lead`.
pub fn finite_order<G: PcGroup>(g: &G, ech: &Echelon<G::S>) -> G::S {
    let m = g.modulus().expect("finite frame");
    ech.rows
        .iter()
        .flatten()
        .fold(G::S::one(), |acc, t| {
            let d = depth(t).unwrap();
            mul(&acc, &m.div_floor(&t[d]))
        })
}

/// `[G : ⟨ech⟩]` when every depth has a pivot, as a product of leads.
pub fn index<G: PcGroup>(g: &G, ech: &Echelon<G::S>) -> Option<G::S> {
    let mut acc = G::S::one();
    for d in 0..g.hirsch() {
        let t = ech.rows[d].as_ref()?;
        acc = mul(&acc, &t[d]);
    }
    Some(acc)
}

/// Intersection with the `i`-th series term: rows at depth ≥ `i`.
pub fn truncate_from<T: Int>(ech: &Echelon<T>, i: usize) -> Echelon<T> {
    Echelon {
        rows: ech
            .rows
            .iter()
            .enumerate()
            .map(|(d, r)| if d >= i { r.clone() } else { None })
            .collect(),
    }
}

pub fn sub_vec<T: Int>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| sub(x, y)).collect()
}
