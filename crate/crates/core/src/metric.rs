//! Word lengths, balls and geodesics by breadth-first search on the Cayley
//! graph, and the subgroup norm `∥H∥_S`.

use std::collections::{BTreeMap, HashMap};

use rustc_hash::FxHashSet;

use serde::Serialize;

use crate::group::{Element, GroupCtx};
use crate::pc::PcGroup;
use crate::scalar::Int;
use crate::subgroup::SubgroupDesc;

/// A length that may have run past its search budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bounded {
    Exact(u32),
    /// Budget exhausted: the true value exceeds the stored radius.
    Exceeds(u32),
}

impl Bounded {
    pub fn exact(self) -> Option<u32> {
        match self {
            Bounded::Exact(v) => Some(v),
            Bounded::Exceeds(_) => None,
        }
    }
}

impl std::fmt::Display for Bounded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bounded::Exact(v) => write!(f, "{}", v),
            Bounded::Exceeds(r) => write!(f, ">{}", r),
        }
    }
}

/// Symmetrized generating set: `S ∪ S⁻¹` without repeats or the identity.
pub fn symmetrize<T: Int>(g: &GroupCtx<T>, s: &[Element<T>]) -> Vec<Element<T>> {
    let mut out: Vec<Element<T>> = Vec::new();
    for x in s {
        for y in [x.clone(), g.inverse(x)] {
            if !y.is_identity() && !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

/// `B_r(S)` in BFS order with parent pointers.
#[derive(Debug, Clone)]
pub struct Ball<T: Int> {
    letters: Vec<Element<T>>,
    elements: Vec<Element<T>>,
    dist: Vec<u32>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<Element<T>, usize>,
    /// `layer_start[r]` = first index at distance `r`.
    layer_start: Vec<usize>,
    radius: u32,
}

impl<T: Int> Ball<T> {
    pub fn new(g: &GroupCtx<T>, s: &[Element<T>], radius: u32) -> Self {
        let id = g.identity();
        let mut ball = Ball {
            letters: symmetrize(g, s),
            elements: vec![id.clone()],
            dist: vec![0],
            parent: vec![None],
            index: HashMap::from([(id, 0)]),
            layer_start: vec![0, 1],
            radius: 0,
        };
        ball.grow(g, radius);
        ball
    }

    /// Extends the ball to `radius`.
    pub fn grow(&mut self, g: &GroupCtx<T>, radius: u32) {
        while self.radius < radius {
            let r = self.radius as usize;
            let (lo, hi) = (self.layer_start[r], self.layer_start[r + 1]);
            for i in lo..hi {
                for (k, s) in self.letters.iter().enumerate() {
                    let y = g.mul(&self.elements[i], s);
                    if !self.index.contains_key(&y) {
                        self.index.insert(y.clone(), self.elements.len());
                        self.elements.push(y);
                        self.dist.push(self.radius + 1);
                        self.parent.push(Some((i, k)));
                    }
                }
            }
            self.layer_start.push(self.elements.len());
            self.radius += 1;
        }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Size of `B_r` for `r ≤ radius`.
    pub fn size_at(&self, r: u32) -> usize {
        self.layer_start[(r.min(self.radius) + 1) as usize]
    }

    /// Elements of `B_r` (`r ≤ radius`) in BFS order.
    pub fn within(&self, r: u32) -> &[Element<T>] {
        &self.elements[..self.size_at(r)]
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    pub fn letters(&self) -> &[Element<T>] {
        &self.letters
    }

    pub fn length(&self, x: &Element<T>) -> Bounded {
        match self.index.get(x) {
            Some(&i) => Bounded::Exact(self.dist[i]),
            None => Bounded::Exceeds(self.radius),
        }
    }

    /// Letters (indices into [`letters`](Self::letters)) of a geodesic word.
    pub fn geodesic(&self, x: &Element<T>) -> Option<Vec<usize>> {
        let mut i = *self.index.get(x)?;
        let mut word = Vec::new();
        while let Some((p, k)) = self.parent[i] {
            word.push(k);
            i = p;
        }
        word.reverse();
        Some(word)
    }
}

/// `∥x∥_S`, or `Exceeds(r_max)` when `x ∉ B_{r_max}`.
pub fn word_length<T: Int>(g: &GroupCtx<T>, x: &Element<T>, s: &[Element<T>], r_max: u32) -> Bounded {
    let letters = symmetrize(g, s);
    let mut seen: HashMap<Element<T>, ()> = HashMap::from([(g.identity(), ())]);
    let mut frontier = vec![g.identity()];
    if x.is_identity() {
        return Bounded::Exact(0);
    }
    for r in 1..=r_max {
        let mut next = Vec::new();
        for y in &frontier {
            for l in &letters {
                let z = g.mul(y, l);
                if seen.contains_key(&z) {
                    continue;
                }
                if &z == x {
                    return Bounded::Exact(r);
                }
                seen.insert(z.clone(), ());
                next.push(z);
            }
        }
        frontier = next;
    }
    Bounded::Exceeds(r_max)
}

/// `∥H∥_S = min{r : ⟨H ∩ B_r⟩ = H}`; the trivial subgroup has norm 0.
pub fn subgroup_norm<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, s: &[Element<T>], r_max: u32) -> Bounded {
    let ball = Ball::new(g, s, 0);
    subgroup_norm_in(g, h, ball, r_max)
}

/// As [`subgroup_norm`], reusing (and growing) a ball.
pub fn subgroup_norm_in<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, mut ball: Ball<T>, r_max: u32) -> Bounded {
    if h.is_trivial() {
        return Bounded::Exact(0);
    }
    let mut inside: Vec<Element<T>> = Vec::new();
    let mut span = SubgroupDesc::trivial(g);
    for r in 1..=r_max {
        ball.grow(g, r);
        let lo = ball.size_at(r - 1);
        let hi = ball.size_at(r);
        let fresh: Vec<Element<T>> =
            ball.elements()[lo..hi].iter().filter(|x| h.contains(g, x) && !span.contains(g, x)).cloned().collect();
        if !fresh.is_empty() {
            inside.extend(fresh);
            span = SubgroupDesc::induce(g, &inside);
            if span.same(h) {
                return Bounded::Exact(r);
            }
        }
    }
    Bounded::Exceeds(r_max)
}

/// Largest Hirsch length handled by [`tail_lengths`].
pub const PACKED_MAX: usize = 8;

type Packed = [i64; PACKED_MAX];

fn pack(v: &[i64]) -> Packed {
    let mut p = [0i64; PACKED_MAX];
    p[..v.len()].copy_from_slice(v);
    p
}

/// Word lengths of the elements of the last coordinate subgroup
/// `⟨e_h⟩` inside `B_{r_max}`, keyed by exponent. The search keeps three
/// BFS layers at a time: in a Cayley graph the neighbours of layer `r`
/// lie in layers `r - 1`, `r`, `r + 1`.
pub fn tail_lengths(g: &GroupCtx<i64>, s: &[Element<i64>], r_max: u32) -> BTreeMap<i64, u32> {
    let h = g.hirsch();
    assert!(h <= PACKED_MAX && h > 0, "hirsch length outside packed range");
    let letters: Vec<Vec<i64>> = symmetrize(g, s).into_iter().map(|e| e.coords).collect();
    let mut out = BTreeMap::from([(0i64, 0u32)]);
    let mut prev: FxHashSet<Packed> = FxHashSet::default();
    let mut cur: FxHashSet<Packed> = FxHashSet::default();
    cur.insert(pack(&vec![0; h]));
    for r in 1..=r_max {
        let mut next: FxHashSet<Packed> = FxHashSet::default();
        for x in &cur {
            for l in &letters {
                let y = pack(&PcGroup::mul(g, &x[..h], l));
                if prev.contains(&y) || cur.contains(&y) || next.contains(&y) {
                    continue;
                }
                if y[..h - 1].iter().all(|c| *c == 0) {
                    out.entry(y[h - 1]).or_insert(r);
                }
                next.insert(y);
            }
        }
        prev = std::mem::replace(&mut cur, next);
    }
    out
}
