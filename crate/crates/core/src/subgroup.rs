//! Subgroups of coordinate groups: canonical induced sequences, membership,
//! isolators, centers, central series, series intersections, Schreier
//! generators and quotients by isolated normal subgroups.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{Element, GroupCtx};
use crate::lattice::{eff_bezout, integer_kernel, smith};
use crate::pc::{self, depth, Echelon, PcGroup};
use crate::scalar::{add, mul, neg, Int};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDesc<T: Int> {
    pub gens: Vec<Element<T>>,
    pub induced: Echelon<T>,
}

impl<T: Int> SubgroupDesc<T> {
    pub fn induce(g: &GroupCtx<T>, gens: &[Element<T>]) -> Self {
        let raw: Vec<Vec<T>> = gens.iter().map(|e| e.coords.clone()).collect();
        SubgroupDesc { gens: gens.to_vec(), induced: pc::induce(g, &raw) }
    }

    pub fn from_echelon(ech: Echelon<T>) -> Self {
        let gens = ech.seq().into_iter().map(Element::new).collect();
        SubgroupDesc { gens, induced: ech }
    }

    pub fn trivial(g: &GroupCtx<T>) -> Self {
        SubgroupDesc { gens: Vec::new(), induced: Echelon::trivial(g.hirsch()) }
    }

    pub fn whole(g: &GroupCtx<T>) -> Self {
        Self::induce(g, &g.basis())
    }

    pub fn induced_seq(&self) -> Vec<Element<T>> {
        self.induced.seq().into_iter().map(Element::new).collect()
    }

    /// `(depth, lead)` for every pivot.
    pub fn pivots(&self) -> Vec<(usize, T)> {
        self.induced.pivots()
    }

    pub fn is_trivial(&self) -> bool {
        self.induced.is_empty()
    }

    pub fn hirsch(&self) -> usize {
        self.induced.len()
    }

    pub fn contains(&self, g: &GroupCtx<T>, x: &Element<T>) -> bool {
        pc::contains(g, &self.induced, &x.coords)
    }

    pub fn contains_subgroup(&self, g: &GroupCtx<T>, other: &SubgroupDesc<T>) -> bool {
        other.induced.rows.iter().flatten().all(|t| pc::contains(g, &self.induced, t))
    }

    /// Same subgroup (induced sequences are canonical).
    pub fn same(&self, other: &SubgroupDesc<T>) -> bool {
        self.induced == other.induced
    }

    pub fn join(&self, g: &GroupCtx<T>, other: &SubgroupDesc<T>) -> Self {
        let mut ech = self.induced.clone();
        pc::extend(g, &mut ech, &other.induced.seq());
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        SubgroupDesc { gens, induced: ech }
    }

    /// `[G : H]`, or `None` when infinite.
    pub fn index(&self, g: &GroupCtx<T>) -> Option<T> {
        pc::index(g, &self.induced)
    }

    /// Normal in `G`: conjugates of generators by `G`'s generators stay inside.
    pub fn is_normal(&self, g: &GroupCtx<T>) -> bool {
        let by: Vec<Vec<T>> = group_gens(g);
        pc::is_normalized_by(g, &self.induced, &by)
    }

    /// `H ∩ N_i` for the coordinate series.
    pub fn truncate(&self, i: usize) -> Self {
        Self::from_echelon(pc::truncate_from(&self.induced, i))
    }
}

pub(crate) fn group_gens<T: Int>(g: &GroupCtx<T>) -> Vec<Vec<T>> {
    if g.generators().is_empty() {
        g.basis().into_iter().map(|e| e.coords).collect()
    } else {
        g.generators().iter().map(|e| e.coords.clone()).collect()
    }
}

pub fn normal_closure<T: Int>(g: &GroupCtx<T>, gens: &[Element<T>]) -> SubgroupDesc<T> {
    let raw: Vec<Vec<T>> = gens.iter().map(|e| e.coords.clone()).collect();
    SubgroupDesc { gens: gens.to_vec(), induced: pc::normal_closure(g, &raw, &group_gens(g)) }
}

/// Left-normed commutators `[s_1,[s_2,…,[s_{k-1},s_k]…]]` for `2 ≤ k ≤ c`,
/// without identities, repeats or inverses of earlier entries. Each has
/// `T`-length at most `c·2^c`.
pub fn gamma2_generators<T: Int>(g: &GroupCtx<T>, t: &[Element<T>], c: usize) -> Vec<Element<T>> {
    let mut out: Vec<Element<T>> = Vec::new();
    let mut layer: Vec<Element<T>> = t.to_vec();
    for _ in 2..=c.max(1) {
        let mut next = Vec::new();
        for s in t {
            for inner in &layer {
                let x = g.commutator(s, inner);
                if !x.is_identity() && !next.contains(&x) && !next.contains(&g.inverse(&x)) {
                    next.push(x);
                }
            }
        }
        for x in &next {
            if !out.contains(x) && !out.contains(&g.inverse(x)) {
                out.push(x.clone());
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    out
}

/// Keeps the elements that enlarge the generated subgroup, in order.
pub fn prune_generators<T: Int>(g: &GroupCtx<T>, xs: &[Element<T>]) -> Vec<Element<T>> {
    let mut ech = Echelon::trivial(g.hirsch());
    let mut kept = Vec::new();
    for x in xs {
        if !pc::contains(g, &ech, &x.coords) {
            pc::extend(g, &mut ech, &[x.coords.clone()]);
            kept.push(x.clone());
        }
    }
    kept
}

/// Exponents `q` with `x = Π t_d^{q_d}` over the induced sequence.
pub fn exponents<T: Int>(g: &GroupCtx<T>, ech: &Echelon<T>, x: &[T]) -> Option<Vec<T>> {
    let mut x = x.to_vec();
    let mut q = Vec::new();
    for d in 0..g.hirsch() {
        match &ech.rows[d] {
            Some(t) => {
                if !x[d].is_multiple_of(&t[d]) {
                    return None;
                }
                let k = x[d].div_floor(&t[d]);
                if !k.is_zero() {
                    x = PcGroup::mul(g, &x, &PcGroup::pow(g, t, &neg(&k)));
                }
                q.push(k);
            }
            None => {
                if !x[d].is_zero() {
                    return None;
                }
            }
        }
    }
    Some(q)
}

/// The map `N_i → N_i / N_{i+1} ≅ ℤ` for consecutive series terms.
#[derive(Debug, Clone)]
pub struct FactorMap<T: Int> {
    upper: Echelon<T>,
    weights: Vec<T>,
}

impl<T: Int> FactorMap<T> {
    pub fn new(g: &GroupCtx<T>, upper: &SubgroupDesc<T>, lower: &SubgroupDesc<T>) -> Result<Self> {
        let r = upper.hirsch();
        if r != lower.hirsch() + 1 {
            return Err(Error::Degenerate("consecutive terms must differ in Hirsch length by one"));
        }
        let rows: Vec<Vec<T>> = lower
            .induced
            .seq()
            .iter()
            .map(|s| exponents(g, &upper.induced, s).ok_or(Error::Degenerate("terms are not nested")))
            .collect::<Result<_>>()?;
        let ker = integer_kernel(&rows, r);
        if ker.len() != 1 {
            return Err(Error::Degenerate("factor is not infinite cyclic"));
        }
        let mut weights = ker.into_iter().next().unwrap();
        // positive on the upper pivot missing from the lower term
        let pivots: Vec<usize> = upper.pivots().iter().map(|p| p.0).collect();
        let k = pivots.iter().position(|&d| !lower.induced.has_pivot(d)).unwrap();
        if weights[k].is_negative() {
            weights = weights.iter().map(neg).collect();
        }
        Ok(FactorMap { upper: upper.induced.clone(), weights })
    }

    pub fn apply(&self, g: &GroupCtx<T>, x: &Element<T>) -> Option<T> {
        let q = exponents(g, &self.upper, &x.coords)?;
        Some(q.iter().zip(&self.weights).fold(T::zero(), |acc, (a, b)| add(&acc, &mul(a, b))))
    }
}

/// Isolator `√H = {g : g^k ∈ H for some k ≥ 1}`.
///
/// Recursion on the last (central) coordinate `M = ⟨x_h⟩`. With `R̄ = √H̄`
/// in `G/M`: if `H ∩ M ≠ 1` the isolator is the preimage of `R̄`; otherwise
/// `√H` maps isomorphically onto the kernel of the defect character
/// `δ: R̄ → ℚ/ℤ`, `δ(ȳ) = -s/k` where `y^k ∈ x_h^s H`, and each kernel
/// element lifts to `y·x_h^{-s/k}`.
pub fn isolator<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>) -> SubgroupDesc<T> {
    SubgroupDesc::from_echelon(isolator_ech(g, &h.induced))
}

fn isolator_ech<T: Int>(g: &GroupCtx<T>, ech: &Echelon<T>) -> Echelon<T> {
    let n = g.hirsch();
    if n == 0 || ech.is_empty() {
        return ech.clone();
    }
    let lift = |v: &[T]| {
        let mut out = v.to_vec();
        out.push(T::zero());
        out
    };
    let unit_last = {
        let mut e = vec![T::zero(); n];
        e[n - 1] = T::one();
        e
    };
    if n == 1 {
        return pc::induce(g, &[unit_last]);
    }
    let q = g.truncated(n - 1).expect("n - 1 < n");
    let hbar_gens: Vec<Vec<T>> = ech.seq().iter().map(|t| t[..n - 1].to_vec()).collect();
    let hbar = pc::induce(&q, &hbar_gens);
    let rbar = isolator_ech(&q, &hbar);
    if ech.has_pivot(n - 1) {
        let mut gens: Vec<Vec<T>> = rbar.seq().iter().map(|r| lift(r)).collect();
        gens.push(unit_last);
        return pc::induce(g, &gens);
    }
    let cap = index_between(&rbar, &hbar);
    // defect of a lift: (k, s) with y^k ∈ x_h^s H
    let defect = |y: &[T]| -> (T, T) {
        let ybar = &y[..n - 1];
        let mut p = ybar.to_vec();
        let mut k: u64 = 1;
        while !pc::contains(&q, &hbar, &p) {
            k += 1;
            assert!(k <= cap, "no power of an isolator element lies in the subgroup");
            p = PcGroup::mul(&q, &p, ybar);
        }
        let kk = T::from_u64(k).unwrap();
        let yk = PcGroup::pow(g, y, &kk);
        let r = pc::sift(g, ech, &yk);
        debug_assert!(r[..n - 1].iter().all(|v| v.is_zero()));
        (kk, r[n - 1].clone())
    };
    let root = |y: &[T]| -> Vec<T> {
        let (k, s) = defect(y);
        debug_assert!(s.is_multiple_of(&k));
        let mut out = y.to_vec();
        let fix = neg(&s.div_floor(&k));
        out = PcGroup::mul(g, &out, &{
            let mut e = vec![T::zero(); n];
            e[n - 1] = fix;
            e
        });
        out
    };
    let rs: Vec<Vec<T>> = rbar.seq().iter().map(|r| lift(r)).collect();
    if rs.is_empty() {
        return ech.clone();
    }
    // δ(r_i) = -s_i/k_i, on a common denominator L
    let defects: Vec<(T, T)> = rs.iter().map(|r| defect(r)).collect();
    let l = defects.iter().fold(T::one(), |acc, (k, _)| acc.lcm(k));
    let mut row: Vec<T> = defects
        .iter()
        .map(|(k, s)| neg(&mul(s, &l.div_floor(k))).mod_floor(&l))
        .collect();
    row.push(l.clone());
    let ker = integer_kernel(&[row], rs.len() + 1);
    let mut gens: Vec<Vec<T>> = ech.seq();
    for v in &ker {
        let mut y = vec![T::zero(); n];
        for (r, e) in rs.iter().zip(v) {
            if !e.is_zero() {
                y = PcGroup::mul(g, &y, &PcGroup::pow(g, r, e));
            }
        }
        if !y.iter().all(|x| x.is_zero()) {
            gens.push(root(&y));
        }
    }
    let rel: Vec<Element<T>> = rs.iter().cloned().map(Element::new).collect();
    for c in gamma2_generators(g, &rel, g.class()) {
        gens.push(root(&c.coords));
    }
    pc::induce(g, &gens)
}

/// `Π lead(R)/lead(H)` over common pivots (finite index of `H` in its isolator).
fn index_between<T: Int>(outer: &Echelon<T>, inner: &Echelon<T>) -> u64 {
    let mut acc: u64 = 1;
    for (o, i) in outer.rows.iter().zip(&inner.rows) {
        if let (Some(o), Some(i)) = (o, i) {
            let d = depth(o).unwrap();
            let ratio = i[d].div_floor(&o[d]).to_u64().unwrap_or(u64::MAX);
            acc = acc.saturating_mul(ratio.max(1));
        }
    }
    acc
}

/// Centralizer of the generating set (the center), by descending the
/// coordinate series: `C_{i+1} = ker(C_i → (N_i/N_{i+1})^S, g ↦ ([g,s])_s)`.
pub fn center<T: Int>(g: &GroupCtx<T>) -> SubgroupDesc<T> {
    let n = g.hirsch();
    let gens = group_gens(g);
    let mut c = pc::induce(g, &g.basis().into_iter().map(|e| e.coords).collect::<Vec<_>>());
    for i in 0..n {
        let seq = c.seq();
        let rows: Vec<Vec<T>> = gens
            .iter()
            .map(|s| seq.iter().map(|t| PcGroup::comm(g, t, s)[i].clone()).collect())
            .collect();
        if rows.iter().all(|r| r.iter().all(|v| v.is_zero())) {
            continue;
        }
        let ker = integer_kernel(&rows, seq.len());
        let mut next: Vec<Vec<T>> = Vec::new();
        for v in &ker {
            let mut y = vec![T::zero(); n];
            for (t, e) in seq.iter().zip(v) {
                if !e.is_zero() {
                    y = PcGroup::mul(g, &y, &PcGroup::pow(g, t, e));
                }
            }
            next.push(y);
        }
        let els: Vec<Element<T>> = seq.iter().cloned().map(Element::new).collect();
        next.extend(gamma2_generators(g, &els, g.class()).into_iter().map(|e| e.coords));
        c = pc::induce(g, &next);
    }
    SubgroupDesc::from_echelon(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralSeriesDesc<T: Int> {
    pub terms: Vec<SubgroupDesc<T>>,
    pub center_index: Option<usize>,
}

impl<T: Int> CentralSeriesDesc<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `[G, N_i] ≤ N_{i+1}`, infinite cyclic factors, trivial last term.
    pub fn verify(&self, g: &GroupCtx<T>) -> bool {
        let gens = group_gens(g);
        let h = g.hirsch();
        if self.terms.len() != h + 1 || !self.terms[h].is_trivial() {
            return false;
        }
        for i in 0..h {
            let (a, b) = (&self.terms[i], &self.terms[i + 1]);
            if a.hirsch() != h - i || b.hirsch() != h - i - 1 || !a.contains_subgroup(g, b) {
                return false;
            }
            if !isolator(g, b).same(b) {
                return false;
            }
            for t in a.induced.rows.iter().flatten() {
                for s in &gens {
                    if !pc::contains(g, &b.induced, &PcGroup::comm(g, s, t)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Coordinate series `N_i = ⟨e_i, …, e_{h-1}⟩`, or, when `center_adapted`,
/// the distinct terms of `√(Z·N_j)` followed by those of `Z ∩ N_j`.
pub fn maximal_central_series<T: Int>(g: &GroupCtx<T>, center_adapted: bool) -> CentralSeriesDesc<T> {
    let h = g.hirsch();
    let coord = |i: usize| -> SubgroupDesc<T> {
        let gens: Vec<Element<T>> = (i..h).map(|d| Element::unit(h, d)).collect();
        SubgroupDesc::induce(g, &gens)
    };
    let z = center(g);
    if !center_adapted {
        let terms: Vec<SubgroupDesc<T>> = (0..=h).map(coord).collect();
        let center_index = terms.iter().position(|t| t.same(&z));
        return CentralSeriesDesc { terms, center_index };
    }
    let mut terms: Vec<SubgroupDesc<T>> = Vec::new();
    for j in 0..=h {
        let t = isolator(g, &z.join(g, &coord(j)));
        if terms.last().map_or(true, |l| !l.same(&t)) {
            terms.push(t);
        }
    }
    let center_index = Some(terms.len() - 1);
    for j in 1..=h {
        let t = z.truncate(j);
        if !terms.last().unwrap().same(&t) {
            terms.push(t);
        }
    }
    CentralSeriesDesc { terms, center_index }
}

/// `H ∩ N_i` together with the constructive generating set.
#[derive(Debug, Clone)]
pub struct SeriesIntersection<T: Int> {
    pub subgroup: SubgroupDesc<T>,
    pub constructive: Vec<Element<T>>,
}

/// `H ∩ N_i` by descending the series: at each step a Bezout word `t₀` in
/// the current generators realizes the gcd of their images in
/// `N_j/N_{j+1} ≅ ℤ`, every generator `t` is replaced by `t·t₀^{-π(t)/π(t₀)}`,
/// and left-normed commutators of the current generators are adjoined.
pub fn intersect_series<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    series: &CentralSeriesDesc<T>,
    i: usize,
) -> Result<SeriesIntersection<T>> {
    if i >= series.terms.len() {
        return Err(Error::IndexOutOfRange { index: i, len: series.terms.len() });
    }
    let mut xs: Vec<Element<T>> = if h.gens.is_empty() { h.induced_seq() } else { h.gens.clone() };
    xs.retain(|x| !x.is_identity());
    for j in 0..i {
        let pi = FactorMap::new(g, &series.terms[j], &series.terms[j + 1])?;
        let vals: Vec<T> = xs.iter().map(|x| pi.apply(g, x).expect("generator lies in the series term")).collect();
        if vals.iter().all(|v| v.is_zero()) {
            continue;
        }
        let nz: Vec<usize> = (0..xs.len()).filter(|&k| !vals[k].is_zero()).collect();
        let nzvals: Vec<T> = nz.iter().map(|&k| vals[k].clone()).collect();
        let b = eff_bezout(&nzvals)?;
        // t₀ = Π x_k^{c_k}, positive exponents first
        let mut t0 = g.identity();
        for positive in [true, false] {
            for (&k, c) in nz.iter().zip(&b.coeffs) {
                if !c.is_zero() && c.is_positive() == positive {
                    t0 = g.mul(&t0, &g.power(&xs[k], c));
                }
            }
        }
        let d = b.gcd.clone();
        let mut next: Vec<Element<T>> = Vec::new();
        for (x, v) in xs.iter().zip(&vals) {
            let y = g.mul(x, &g.power(&t0, &neg(&v.div_floor(&d))));
            if !y.is_identity() && !next.contains(&y) {
                next.push(y);
            }
        }
        for c in gamma2_generators(g, &xs, g.class()) {
            if !next.contains(&c) {
                next.push(c);
            }
        }
        xs = prune_generators(g, &next);
    }
    let subgroup = SubgroupDesc::induce(g, &xs);
    Ok(SeriesIntersection { subgroup, constructive: xs })
}

/// Schreier generators `t·s·rep(ts)⁻¹` over a BFS transversal built with
/// the letters of `s`.
pub fn schreier_generators<T: Int>(
    g: &GroupCtx<T>,
    k: &SubgroupDesc<T>,
    s: &[Element<T>],
) -> Result<(Vec<Element<T>>, Vec<Element<T>>)> {
    let idx = k.index(g).ok_or(Error::InfiniteIndex)?;
    let idx = idx.to_u64().ok_or(Error::CapExceeded { what: "index", cap: u64::MAX })?;
    let find = |reps: &[Element<T>], x: &Element<T>| -> Option<usize> {
        reps.iter().position(|r| k.contains(g, &g.mul(&g.inverse(r), x)))
    };
    let mut reps = vec![g.identity()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for x in s {
            let ts = g.mul(&reps[t], x);
            if find(&reps, &ts).is_none() {
                reps.push(ts);
                queue.push_back(reps.len() - 1);
            }
        }
    }
    if reps.len() as u64 != idx {
        return Err(Error::Degenerate("letters do not reach every coset"));
    }
    let mut out: Vec<Element<T>> = Vec::new();
    for t in &reps {
        for x in s {
            let ts = g.mul(t, x);
            let r = &reps[find(&reps, &ts).unwrap()];
            let y = g.mul(&ts, &g.inverse(r));
            if !y.is_identity() && !out.contains(&y) {
                out.push(y);
            }
        }
    }
    Ok((out, reps))
}

#[derive(Debug, Clone)]
enum Projection<T: Int> {
    /// Linear functionals (abelian parents).
    Linear(Vec<Vec<T>>),
    /// Reduction modulo a unit-lead kernel, then the free coordinates.
    Sift(GroupCtx<T>),
}

/// A torsion-free quotient `G/K` with its projection.
#[derive(Debug, Clone)]
pub struct QuotientMap<T: Int> {
    pub group: GroupCtx<T>,
    projection: Projection<T>,
}

impl<T: Int> QuotientMap<T> {
    pub fn project(&self, x: &Element<T>) -> Element<T> {
        match &self.projection {
            Projection::Linear(rows) => Element::new(
                rows.iter()
                    .map(|r| r.iter().zip(&x.coords).fold(T::zero(), |acc, (a, b)| add(&acc, &mul(a, b))))
                    .collect(),
            ),
            Projection::Sift(q) => q.project_from_parent(x),
        }
    }
}

/// `G/H` for a normal isolated `H`.
pub fn quotient_by_isolated_normal<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>) -> Result<QuotientMap<T>> {
    if !h.is_normal(g) {
        return Err(Error::NotNormal);
    }
    if !isolator(g, h).same(h) {
        return Err(Error::NotIsolated);
    }
    let unit_leads = h.pivots().iter().all(|(_, l)| l.is_one());
    if g.is_additive() {
        // SNF: U·B·V = D with unit invariant factors; the trailing columns
        // of V give coordinates on ℤ^d / H
        let d = g.hirsch();
        let basis = h.induced.seq();
        let r = basis.len();
        let rows: Vec<Vec<T>> = if basis.is_empty() { Vec::new() } else { smith(&basis, d).right };
        let functionals: Vec<Vec<T>> = if basis.is_empty() {
            (0..d).map(|i| Element::<T>::unit(d, i).coords).collect()
        } else {
            (r..d).map(|j| (0..d).map(|i| rows[i][j].clone()).collect()).collect()
        };
        let group = GroupCtx::free_abelian(d - r)?;
        return Ok(QuotientMap { group, projection: Projection::Linear(functionals) });
    }
    if !unit_leads {
        return Err(Error::Unsupported(
            "quotient of a nonabelian group by a kernel with non-unit pivots".into(),
        ));
    }
    let q = GroupCtx::quotient_raw(g, h.induced.clone());
    if q.is_additive() {
        let keep = q.clone();
        let group = GroupCtx::free_abelian(q.hirsch())?;
        return Ok(QuotientMap { group, projection: Projection::Sift(keep) });
    }
    let group = q.clone();
    Ok(QuotientMap { group, projection: Projection::Sift(q) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type E = Element<BigInt>;

    fn e(v: &[i64]) -> E {
        Element::from_i64(v)
    }

    fn h3() -> GroupCtx<BigInt> {
        GroupCtx::heisenberg()
    }

    #[test]
    fn induce_examples() {
        let g = h3();
        let h = SubgroupDesc::induce(&g, &[e(&[0, 1, 4]), e(&[0, 2, 0])]);
        assert_eq!(h.pivots(), vec![(1, BigInt::from(1)), (2, BigInt::from(8))]);
        assert!(h.contains(&g, &e(&[0, 0, 8])));
        assert!(!h.contains(&g, &e(&[0, 0, 4])));
        assert!(h.contains(&g, &g.identity()));

        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let l = SubgroupDesc::induce(&z2, &[e(&[1, 2]), e(&[2, 0])]);
        assert_eq!(l.induced_seq(), vec![e(&[1, 2]), e(&[0, 4])]);
        assert_eq!(l.index(&z2), Some(BigInt::from(4)));
        assert!(SubgroupDesc::induce(&z2, &[]).is_trivial());
    }

    #[test]
    fn isolator_examples() {
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let r = isolator(&z2, &SubgroupDesc::induce(&z2, &[e(&[2, 4])]));
        assert_eq!(r.induced_seq(), vec![e(&[1, 2])]);

        let g = h3();
        let h = SubgroupDesc::induce(&g, &[e(&[0, 1, 4]), e(&[0, 2, 0])]);
        let r = isolator(&g, &h);
        assert!(r.same(&SubgroupDesc::induce(&g, &[e(&[0, 1, 0]), e(&[0, 0, 1])])));
        let whole = SubgroupDesc::whole(&g);
        assert!(isolator(&g, &whole).same(&whole));

        // no central pivot: ⟨a², b²⟩ has isolator ⟨a, b⟩-ish lifted by roots
        let h = SubgroupDesc::induce(&g, &[e(&[2, 0, 0])]);
        assert!(isolator(&g, &h).same(&SubgroupDesc::induce(&g, &[e(&[1, 0, 0])])));
        let h = SubgroupDesc::induce(&g, &[e(&[2, 2, 2])]);
        // (1,1,z)² = (2,2,2z+1), never (2,2,2): the isolator is ⟨(2,2,2)⟩ itself
        assert!(isolator(&g, &h).same(&h));
        let h = SubgroupDesc::induce(&g, &[e(&[2, 2, 3])]);
        assert!(isolator(&g, &h).same(&SubgroupDesc::induce(&g, &[e(&[1, 1, 1])])));
    }

    #[test]
    fn center_and_series() {
        let g = h3();
        assert!(center(&g).same(&SubgroupDesc::induce(&g, &[e(&[0, 0, 1])])));
        let s = maximal_central_series(&g, true);
        assert_eq!(s.len(), 4);
        assert_eq!(s.center_index, Some(2));
        assert!(s.terms[1].same(&SubgroupDesc::induce(&g, &[e(&[0, 1, 0]), e(&[0, 0, 1])])));
        assert!(s.verify(&g));

        let u4 = GroupCtx::<BigInt>::unitriangular(4).unwrap();
        let z = center(&u4);
        assert!(z.same(&SubgroupDesc::induce(&u4, &[Element::unit(6, 5)])));
        for adapted in [false, true] {
            let s = maximal_central_series(&u4, adapted);
            assert_eq!(s.len(), 7);
            assert!(s.verify(&u4));
        }
    }

    #[test]
    fn gamma2_examples() {
        let g = h3();
        assert_eq!(gamma2_generators(&g, &[e(&[1, 0, 0]), e(&[0, 1, 0])], 2), vec![e(&[0, 0, 1])]);
        let z3 = GroupCtx::<BigInt>::free_abelian(3).unwrap();
        assert!(gamma2_generators(&z3, &z3.basis(), 1).is_empty());
    }

    #[test]
    fn intersect_examples() {
        let g = h3();
        let h = SubgroupDesc::induce(&g, &[e(&[0, 1, 4]), e(&[0, 2, 0])]);
        let s = maximal_central_series(&g, false);
        let r = intersect_series(&g, &h, &s, 2).unwrap();
        assert!(r.subgroup.same(&SubgroupDesc::induce(&g, &[e(&[0, 0, 8])])));
        let r0 = intersect_series(&g, &h, &s, 0).unwrap();
        assert!(r0.subgroup.same(&h));

        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let hp = SubgroupDesc::induce(&z2, &[e(&[1, 2]), e(&[2, 0])]);
        let s = maximal_central_series(&z2, false);
        let r = intersect_series(&z2, &hp, &s, 1).unwrap();
        assert_eq!(r.subgroup.induced_seq(), vec![e(&[0, 4])]);
        assert!(intersect_series(&z2, &hp, &s, 3).is_err());
    }

    #[test]
    fn schreier_examples() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let k = SubgroupDesc::induce(&z, &[e(&[2])]);
        assert_eq!(schreier_generators(&z, &k, &[e(&[1])]).unwrap().0, vec![e(&[2])]);

        let g = h3();
        let k = SubgroupDesc::induce(&g, &[e(&[1, 0, 0]), e(&[0, 2, 0]), e(&[0, 0, 1])]);
        let (gens, reps) = schreier_generators(&g, &k, g.generators()).unwrap();
        assert_eq!(reps, vec![g.identity(), e(&[0, 1, 0])]);
        assert_eq!(gens, vec![e(&[1, 0, 0]), e(&[0, 0, 1]), e(&[1, 0, -1]), e(&[0, 2, 0])]);
        assert!(SubgroupDesc::induce(&g, &gens).same(&k));
        let whole = SubgroupDesc::whole(&g);
        assert_eq!(schreier_generators(&g, &whole, g.generators()).unwrap().0, g.generators().to_vec());
        let inf = SubgroupDesc::induce(&g, &[e(&[1, 0, 0])]);
        assert_eq!(schreier_generators(&g, &inf, g.generators()).unwrap_err(), Error::InfiniteIndex);
    }

    #[test]
    fn quotient_examples() {
        let g = h3();
        let zc = SubgroupDesc::induce(&g, &[e(&[0, 0, 1])]);
        let q = quotient_by_isolated_normal(&g, &zc).unwrap();
        assert_eq!(q.group.family_name(), "free_abelian(2)");
        assert_eq!(q.project(&e(&[3, -1, 7])), e(&[3, -1]));
        let n1 = SubgroupDesc::induce(&g, &[e(&[0, 1, 0]), e(&[0, 0, 1])]);
        let q = quotient_by_isolated_normal(&g, &n1).unwrap();
        assert_eq!(q.group.hirsch(), 1);
        let q = quotient_by_isolated_normal(&g, &SubgroupDesc::whole(&g)).unwrap();
        assert_eq!(q.group.hirsch(), 0);
        let c2 = SubgroupDesc::induce(&g, &[e(&[0, 0, 2])]);
        assert_eq!(quotient_by_isolated_normal(&g, &c2).unwrap_err(), Error::NotIsolated);
        let a = SubgroupDesc::induce(&g, &[e(&[1, 0, 0])]);
        assert_eq!(quotient_by_isolated_normal(&g, &a).unwrap_err(), Error::NotNormal);

        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let l = SubgroupDesc::induce(&z2, &[e(&[2, 3])]);
        let q = quotient_by_isolated_normal(&z2, &l).unwrap();
        assert_eq!(q.group.hirsch(), 1);
        assert!(q.project(&e(&[2, 3])).is_identity());
        assert!(!q.project(&e(&[1, 1])).is_identity());
    }
}
