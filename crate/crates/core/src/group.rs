//! Torsion-free finitely generated nilpotent groups in coordinates.
//!
//! Coordinate conventions:
//! * `FreeAbelian(d)`: `ℤ^d` with addition.
//! * `Unitriangular(n)`: matrix entries above the diagonal, ordered by
//!   superdiagonal and then by row. For `n = 3` this is
//!   `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y')`, with `a = (1,0,0)`,
//!   `b = (0,1,0)`, `c = (0,0,1) = [a,b]`.
//! * `Presentation`: exponents of normal words `x_1^{e_1} ⋯ x_h^{e_h}`.
//! * `Truncated` and `Quotient`: coordinates inherited from a parent group.
//!
//! In every case `N_i = {g : g_0 = … = g_{i-1} = 0}` is a central series with
//! infinite cyclic factors and the last coordinate is central.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collect::Collector;
use crate::error::{Error, Result};
use crate::pc::{self, Echelon, PcGroup};
use crate::scalar::{add, int, mul, neg, sub, Int};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element<T> {
    pub coords: Vec<T>,
}

impl<T: Int> Element<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Element { coords }
    }

    pub fn identity(h: usize) -> Self {
        Element { coords: vec![T::zero(); h] }
    }

    pub fn unit(h: usize, i: usize) -> Self {
        let mut coords = vec![T::zero(); h];
        coords[i] = T::one();
        Element { coords }
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Element { coords: v.iter().map(|&x| int(x)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl<T: Int> fmt::Display for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family<T: Int> {
    FreeAbelian,
    Unitriangular { degree: usize, positions: Vec<(usize, usize)> },
    Presentation(Arc<Collector<T>>),
    /// `parent / N_keep`: the first `keep` coordinates.
    Truncated { parent: Arc<GroupCtx<T>>, keep: usize },
    /// `parent / K` for an isolated normal `K` whose induced sequence has
    /// unit leads; coordinates are the parent coordinates without pivots.
    Quotient { parent: Arc<GroupCtx<T>>, kernel: Echelon<T>, free: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCtx<T: Int> {
    family: Family<T>,
    hirsch: usize,
    class: usize,
    gens: Vec<Element<T>>,
    letters: Vec<String>,
}

/// Positions above the diagonal ordered by superdiagonal then row.
pub fn ut_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for level in 1..n {
        for r in 0..(n - level) {
            out.push((r, r + level));
        }
    }
    out
}

fn letters(h: usize) -> Vec<String> {
    if h <= 26 {
        (0..h).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=h).map(|i| format!("x{}", i)).collect()
    }
}

fn basis<T: Int>(h: usize) -> Vec<Element<T>> {
    (0..h).map(|i| Element::unit(h, i)).collect()
}

impl<T: Int> GroupCtx<T> {
    pub fn free_abelian(d: usize) -> Result<Self> {
        Ok(GroupCtx { family: Family::FreeAbelian, hirsch: d, class: 1, gens: basis(d), letters: letters(d) })
    }

    pub fn unitriangular(n: usize) -> Result<Self> {
        if !(3..=4).contains(&n) {
            return Err(Error::Unsupported(format!("degree unsupported: {}", n)));
        }
        let positions = ut_positions(n);
        let h = positions.len();
        let mut g = GroupCtx {
            family: Family::Unitriangular { degree: n, positions },
            hirsch: h,
            class: 0,
            gens: basis(h),
            letters: letters(h),
        };
        g.class = g.compute_class();
        Ok(g)
    }

    pub fn heisenberg() -> Self {
        Self::unitriangular(3).expect("degree 3 is supported")
    }

    /// Presentation from relations `(j, i, tail)` with 0-based `j > i`.
    pub fn presentation(h: usize, tails: &[(usize, usize, Vec<T>)]) -> Result<Self> {
        let c = Collector::new(h, tails)?;
        c.check_consistency()?;
        let mut g = GroupCtx {
            family: Family::Presentation(Arc::new(c)),
            hirsch: h,
            class: 0,
            gens: basis(h),
            letters: letters(h),
        };
        g.class = g.compute_class();
        Ok(g)
    }

    /// `self / N_keep`.
    pub fn truncated(&self, keep: usize) -> Result<Self> {
        if keep > self.hirsch {
            return Err(Error::IndexOutOfRange { index: keep, len: self.hirsch });
        }
        if keep == self.hirsch {
            return Ok(self.clone());
        }
        let parent = match &self.family {
            Family::Truncated { parent, .. } => parent.clone(),
            _ => Arc::new(self.clone()),
        };
        if matches!(parent.family, Family::FreeAbelian) {
            return Self::free_abelian(keep);
        }
        let mut gens: Vec<Element<T>> = Vec::new();
        for s in &self.gens {
            let t = Element::new(s.coords[..keep].to_vec());
            if !t.is_identity() && !gens.contains(&t) {
                gens.push(t);
            }
        }
        let mut g = GroupCtx {
            family: Family::Truncated { parent, keep },
            hirsch: keep,
            class: 0,
            gens,
            letters: letters(keep),
        };
        g.class = g.compute_class();
        Ok(g)
    }

    pub(crate) fn quotient_raw(parent: &Self, kernel: Echelon<T>) -> Self {
        let free: Vec<usize> = (0..parent.hirsch).filter(|&d| !kernel.has_pivot(d)).collect();
        let h = free.len();
        let mut g = GroupCtx {
            family: Family::Quotient { parent: Arc::new(parent.clone()), kernel, free },
            hirsch: h,
            class: 0,
            gens: Vec::new(),
            letters: letters(h),
        };
        let mut gens: Vec<Element<T>> = Vec::new();
        for s in &parent.gens {
            let t = g.project_from_parent(s);
            if !t.is_identity() && !gens.contains(&t) {
                gens.push(t);
            }
        }
        g.gens = gens;
        g.class = g.compute_class();
        g
    }

    /// Image of a parent element in a `Quotient` group.
    pub(crate) fn project_from_parent(&self, x: &Element<T>) -> Element<T> {
        match &self.family {
            Family::Quotient { parent, kernel, free } => {
                let r = reduce_mod_kernel(parent, kernel, &x.coords);
                Element::new(free.iter().map(|&d| r[d].clone()).collect())
            }
            Family::Truncated { keep, .. } => Element::new(x.coords[..*keep].to_vec()),
            _ => x.clone(),
        }
    }

    /// Replaces the generating set after checking that it generates.
    pub fn with_generating_set(mut self, gens: Vec<Element<T>>) -> Result<Self> {
        for s in &gens {
            self.check(s)?;
        }
        let ech = pc::induce(&self, &gens.iter().map(|s| s.coords.clone()).collect::<Vec<_>>());
        let full = (0..self.hirsch).all(|d| ech.rows[d].as_ref().map_or(false, |r| r[d].is_one()));
        if !full {
            return Err(Error::Degenerate("generating set does not generate the group"));
        }
        self.gens = gens;
        Ok(self)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn family_name(&self) -> String {
        match &self.family {
            Family::FreeAbelian => format!("free_abelian({})", self.hirsch),
            Family::Unitriangular { degree, .. } => format!("unitriangular({})", degree),
            Family::Presentation(_) => format!("presentation(h={})", self.hirsch),
            Family::Truncated { parent, keep } => format!("{}/N_{}", parent.family_name(), keep),
            Family::Quotient { parent, .. } => format!("{}/K", parent.family_name()),
        }
    }

    pub fn hirsch(&self) -> usize {
        self.hirsch
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn is_abelian(&self) -> bool {
        self.class <= 1
    }

    pub fn generators(&self) -> &[Element<T>] {
        &self.gens
    }

    /// Names of the coordinate generators `e_0, …` used when parsing words.
    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn identity(&self) -> Element<T> {
        Element::identity(self.hirsch)
    }

    pub fn basis(&self) -> Vec<Element<T>> {
        basis(self.hirsch)
    }

    pub fn check(&self, g: &Element<T>) -> Result<()> {
        if g.len() != self.hirsch {
            return Err(Error::DimensionMismatch { expected: self.hirsch, found: g.len() });
        }
        Ok(())
    }

    pub fn multiply(&self, g: &Element<T>, h: &Element<T>) -> Result<Element<T>> {
        self.check(g)?;
        self.check(h)?;
        Ok(Element::new(self.mul_raw(&g.coords, &h.coords)))
    }

    pub fn mul(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        Element::new(self.mul_raw(&g.coords, &h.coords))
    }

    pub fn inverse(&self, g: &Element<T>) -> Element<T> {
        Element::new(self.inv_raw(&g.coords))
    }

    pub fn power(&self, g: &Element<T>, k: &T) -> Element<T> {
        Element::new(PcGroup::pow(self, &g.coords, k))
    }

    pub fn commutator(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        Element::new(PcGroup::comm(self, &g.coords, &h.coords))
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, g: &Element<T>, h: &Element<T>) -> Element<T> {
        Element::new(PcGroup::conj(self, &g.coords, &h.coords))
    }

    fn mul_raw(&self, a: &[T], b: &[T]) -> Vec<T> {
        match &self.family {
            Family::FreeAbelian => a.iter().zip(b).map(|(x, y)| add(x, y)).collect(),
            Family::Unitriangular { degree, positions } => ut_mul(*degree, positions, a, b),
            Family::Presentation(c) => c.mul(a, b),
            Family::Truncated { parent, keep } => {
                let pad = |v: &[T]| {
                    let mut out = v.to_vec();
                    out.resize(parent.hirsch, T::zero());
                    out
                };
                let mut p = parent.mul_raw(&pad(a), &pad(b));
                p.truncate(*keep);
                p
            }
            Family::Quotient { parent, kernel, free } => {
                let lift = |v: &[T]| {
                    let mut out = vec![T::zero(); parent.hirsch];
                    for (k, &d) in free.iter().enumerate() {
                        out[d] = v[k].clone();
                    }
                    out
                };
                let p = parent.mul_raw(&lift(a), &lift(b));
                let r = reduce_mod_kernel(parent, kernel, &p);
                free.iter().map(|&d| r[d].clone()).collect()
            }
        }
    }

    fn inv_raw(&self, a: &[T]) -> Vec<T> {
        match &self.family {
            Family::FreeAbelian => a.iter().map(neg).collect(),
            Family::Unitriangular { degree, positions } => ut_inv(*degree, positions, a),
            Family::Presentation(c) => c.inv(a),
            Family::Truncated { parent, keep } => {
                let mut out = a.to_vec();
                out.resize(parent.hirsch, T::zero());
                let mut p = parent.inv_raw(&out);
                p.truncate(*keep);
                p
            }
            Family::Quotient { parent, kernel, free } => {
                let mut out = vec![T::zero(); parent.hirsch];
                for (k, &d) in free.iter().enumerate() {
                    out[d] = a[k].clone();
                }
                let p = parent.inv_raw(&out);
                let r = reduce_mod_kernel(parent, kernel, &p);
                free.iter().map(|&d| r[d].clone()).collect()
            }
        }
    }

    /// Whether coordinatewise reduction mod `m` is a morphism onto a finite
    /// group (free abelian and unitriangular coordinates, and truncations).
    pub fn supports_frames(&self) -> bool {
        match &self.family {
            Family::FreeAbelian | Family::Unitriangular { .. } => true,
            Family::Truncated { parent, .. } => parent.supports_frames(),
            _ => false,
        }
    }

    /// Lower central series terms `γ_1 = G, γ_2, …` until trivial.
    pub fn lower_central_series(&self) -> Vec<Echelon<T>> {
        let all: Vec<Vec<T>> = self.basis().into_iter().map(|e| e.coords).collect();
        let gens: Vec<Vec<T>> = if self.gens.is_empty() {
            all.clone()
        } else {
            self.gens.iter().map(|e| e.coords.clone()).collect()
        };
        let mut terms = vec![pc::induce(self, &all)];
        loop {
            let last = terms.last().unwrap();
            if last.is_empty() || terms.len() > self.hirsch + 1 {
                break;
            }
            let mut comms = Vec::new();
            for t in last.rows.iter().flatten() {
                for s in &gens {
                    let c = PcGroup::comm(self, t, s);
                    if !c.iter().all(|x| x.is_zero()) {
                        comms.push(c);
                    }
                }
            }
            let next = pc::normal_closure(self, &comms, &gens);
            terms.push(next);
        }
        terms
    }

    fn compute_class(&self) -> usize {
        if self.hirsch == 0 {
            return 0;
        }
        self.lower_central_series().iter().filter(|t| !t.is_empty()).count()
    }

    /// Mal'cev exponents of a unitriangular element with respect to the
    /// elementary matrices in position order.
    pub fn malcev_exponents(&self, g: &Element<T>) -> Vec<T> {
        match &self.family {
            Family::Unitriangular { .. } => {
                let h = self.hirsch;
                let mut cur = g.coords.clone();
                let mut out = vec![T::zero(); h];
                for p in 0..h {
                    let e = cur[p].clone();
                    if e.is_zero() {
                        continue;
                    }
                    out[p] = e.clone();
                    let mut x = vec![T::zero(); h];
                    x[p] = neg(&e);
                    cur = self.mul_raw(&x, &cur);
                }
                out
            }
            _ => g.coords.clone(),
        }
    }

    /// Element with the given Mal'cev exponents (inverse of
    /// [`malcev_exponents`](Self::malcev_exponents)).
    pub fn from_malcev(&self, e: &[T]) -> Element<T> {
        match &self.family {
            Family::Unitriangular { .. } => {
                let h = self.hirsch;
                let mut acc = vec![T::zero(); h];
                for (p, x) in e.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let mut u = vec![T::zero(); h];
                    u[p] = x.clone();
                    acc = self.mul_raw(&acc, &u);
                }
                Element::new(acc)
            }
            _ => Element::new(e.to_vec()),
        }
    }

    /// Presentation relations derived from the matrix arithmetic: for
    /// `j > i`, `x_j x_i = x_i x_j · tail` in Mal'cev exponents.
    pub fn derived_presentation(&self) -> Vec<(usize, usize, Vec<T>)> {
        let h = self.hirsch;
        let mut out = Vec::new();
        for j in 0..h {
            for i in 0..j {
                let xi = Element::unit(h, i);
                let xj = Element::unit(h, j);
                // tail = x_j⁻¹ x_i⁻¹ x_j x_i
                let t = self.mul(
                    &self.mul(&self.inverse(&xj), &self.inverse(&xi)),
                    &self.mul(&xj, &xi),
                );
                if !t.is_identity() {
                    out.push((j, i, self.malcev_exponents(&t)));
                }
            }
        }
        out
    }

    /// `ℤ`-linear image of the abelianization for abelian groups.
    pub fn is_additive(&self) -> bool {
        match &self.family {
            Family::FreeAbelian => true,
            _ => {
                let b = self.basis();
                self.is_abelian()
                    && b.iter().all(|x| {
                        b.iter().all(|y| {
                            let s: Vec<T> = x.coords.iter().zip(&y.coords).map(|(p, q)| add(p, q)).collect();
                            self.mul(x, y).coords == s
                        })
                    })
            }
        }
    }
}

impl<T: Int> PcGroup for GroupCtx<T> {
    type S = T;

    fn hirsch(&self) -> usize {
        self.hirsch
    }

    fn mul(&self, a: &[T], b: &[T]) -> Vec<T> {
        self.mul_raw(a, b)
    }

    fn inv(&self, a: &[T]) -> Vec<T> {
        self.inv_raw(a)
    }

    fn modulus(&self) -> Option<T> {
        None
    }
}

/// Representative of `xK` with zeros at the pivot depths of `K`.
pub(crate) fn reduce_mod_kernel<T: Int>(g: &GroupCtx<T>, kernel: &Echelon<T>, x: &[T]) -> Vec<T> {
    let mut x = x.to_vec();
    for d in 0..g.hirsch {
        if x[d].is_zero() {
            continue;
        }
        if let Some(t) = &kernel.rows[d] {
            debug_assert!(t[d].is_one());
            x = g.mul_raw(&x, &PcGroup::pow(g, t, &neg(&x[d])));
        }
    }
    x
}

pub(crate) fn ut_mul<T: Int>(n: usize, positions: &[(usize, usize)], a: &[T], b: &[T]) -> Vec<T> {
    positions
        .iter()
        .enumerate()
        .map(|(p, &(r, s))| {
            let mut v = add(&a[p], &b[p]);
            for k in (r + 1)..s {
                v = add(&v, &mul(&a[ut_index(n, r, k)], &b[ut_index(n, k, s)]));
            }
            v
        })
        .collect()
}

pub(crate) fn ut_inv<T: Int>(n: usize, positions: &[(usize, usize)], a: &[T]) -> Vec<T> {
    let mut w = vec![T::zero(); positions.len()];
    // a·w = 1 solved by increasing superdiagonal
    for (p, &(r, s)) in positions.iter().enumerate() {
        let mut v = neg(&a[p]);
        for k in (r + 1)..s {
            v = sub(&v, &mul(&a[ut_index(n, r, k)], &w[ut_index(n, k, s)]));
        }
        w[p] = v;
    }
    w
}

/// Coordinate of entry `(r, s)`: superdiagonals in order, rows within each.
#[inline]
fn ut_index(n: usize, r: usize, s: usize) -> usize {
    let level = s - r;
    (1..level).map(|l| n - l).sum::<usize>() + r
}

/// Dense matrix of a unitriangular element (for cross-checks).
pub fn ut_matrix<T: Int>(n: usize, g: &[T]) -> Vec<Vec<T>> {
    let positions = ut_positions(n);
    let mut m: Vec<Vec<T>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    for (p, &(r, s)) in positions.iter().enumerate() {
        m[r][s] = g[p].clone();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn e(v: &[i64]) -> Element<BigInt> {
        Element::from_i64(v)
    }

    fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    }

    #[test]
    fn build_examples() {
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        assert_eq!((z2.hirsch(), z2.class()), (2, 1));
        let h3 = GroupCtx::<BigInt>::heisenberg();
        assert_eq!((h3.hirsch(), h3.class()), (3, 2));
        assert_eq!(h3.generators(), &[e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])]);
        let u4 = GroupCtx::<BigInt>::unitriangular(4).unwrap();
        assert_eq!((u4.hirsch(), u4.class()), (6, 3));
        assert!(matches!(GroupCtx::<BigInt>::unitriangular(9), Err(Error::Unsupported(_))));
    }

    #[test]
    fn heisenberg_arithmetic() {
        let h3 = GroupCtx::<BigInt>::heisenberg();
        let (a, b) = (e(&[1, 0, 0]), e(&[0, 1, 0]));
        assert_eq!(h3.mul(&a, &b), e(&[1, 1, 1]));
        assert_eq!(h3.commutator(&a, &b), e(&[0, 0, 1]));
        assert_eq!(h3.conjugate(&b, &a), e(&[1, 0, -1]));
        let g = e(&[3, -2, 7]);
        assert_eq!(h3.mul(&g, &h3.identity()), g);
        assert!(h3.mul(&g, &h3.inverse(&g)).is_identity());
        assert!(h3.multiply(&g, &e(&[1, 2])).is_err());
    }

    #[test]
    fn matrix_agreement_u4() {
        let u4 = GroupCtx::<i64>::unitriangular(4).unwrap();
        let g = [1i64, -2, 3, 4, 0, -5];
        let h = [2i64, 7, -1, 0, 3, 2];
        let prod = u4.mul(&Element::new(g.to_vec()), &Element::new(h.to_vec()));
        assert_eq!(ut_matrix(4, &prod.coords), matmul(&ut_matrix(4, &g), &ut_matrix(4, &h)));
    }

    #[test]
    fn derived_presentation_matches_matrices() {
        let u4 = GroupCtx::<i64>::unitriangular(4).unwrap();
        let pres = GroupCtx::<i64>::presentation(6, &u4.derived_presentation()).unwrap();
        assert_eq!(pres.class(), 3);
        let g = Element::new(vec![2i64, -1, 3, 0, 4, -2]);
        let h = Element::new(vec![-3i64, 5, 1, 2, -1, 6]);
        let via_pres = pres.mul(&Element::new(u4.malcev_exponents(&g)), &Element::new(u4.malcev_exponents(&h)));
        assert_eq!(u4.from_malcev(&via_pres.coords), u4.mul(&g, &h));
    }

    #[test]
    fn truncation_and_letters() {
        let h3 = GroupCtx::<BigInt>::heisenberg();
        let q = h3.truncated(2).unwrap();
        assert_eq!((q.hirsch(), q.class()), (2, 1));
        assert_eq!(h3.letters(), &["a", "b", "c"]);
        assert!(q.supports_frames());
    }

    #[test]
    fn rejects_non_generating_set() {
        let h3 = GroupCtx::<BigInt>::heisenberg();
        assert!(h3.clone().with_generating_set(vec![e(&[1, 0, 0]), e(&[0, 1, 0])]).is_ok());
        assert!(h3.with_generating_set(vec![e(&[2, 0, 0]), e(&[0, 1, 0])]).is_err());
    }
}
