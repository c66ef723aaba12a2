//! Congruence frames: coordinates of `G/N_k` reduced mod `m`, realized as
//! finite groups with `i64` coordinates, and their normal-subgroup lattices.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{ut_inv, ut_mul, ut_positions, Element, Family, GroupCtx};
use crate::pc::{self, Echelon, PcGroup};
use crate::scalar::Int;

pub const DEFAULT_CAP: u64 = 4096;
/// Largest level whose unitriangular products stay inside `i64`.
pub const MAX_LEVEL: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Arith {
    Abelian,
    Unitriangular { degree: usize, positions: Vec<(usize, usize)> },
}

/// `G/N_keep` with coordinates mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteFrame {
    arith: Arith,
    /// Hirsch length of the underlying infinite group.
    full: usize,
    keep: usize,
    m: i64,
}

impl FiniteFrame {
    /// Full frame of `G` at level `m`.
    pub fn new<T: Int>(g: &GroupCtx<T>, m: i64) -> Result<Self> {
        Self::prefix(g, m, g.hirsch())
    }

    /// Frame of `G/N_keep` at level `m`.
    pub fn prefix<T: Int>(g: &GroupCtx<T>, m: i64, keep: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Degenerate("frame level must be at least 2"));
        }
        if m > MAX_LEVEL {
            return Err(Error::Unsupported(format!("frame level {} exceeds {}", m, MAX_LEVEL)));
        }
        if keep > g.hirsch() {
            return Err(Error::IndexOutOfRange { index: keep, len: g.hirsch() });
        }
        let (arith, full) = match g.family() {
            Family::FreeAbelian => (Arith::Abelian, g.hirsch()),
            Family::Unitriangular { degree, positions } => {
                (Arith::Unitriangular { degree: *degree, positions: positions.clone() }, g.hirsch())
            }
            Family::Truncated { parent, .. } => {
                let f = Self::prefix(parent, m, keep)?;
                return Ok(f);
            }
            _ if g.is_additive() => (Arith::Abelian, g.hirsch()),
            _ => {
                return Err(Error::FrameUnsupported(format!(
                    "frame unsupported for {}: coordinate reduction is not a morphism",
                    g.family_name()
                )))
            }
        };
        Ok(FiniteFrame { arith, full, keep, m })
    }

    pub fn level(&self) -> i64 {
        self.m
    }

    pub fn keep(&self) -> usize {
        self.keep
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.m as u64).pow(self.keep as u32)
    }

    pub fn order_u64(&self) -> Option<u64> {
        (self.m as u64).checked_pow(self.keep as u32)
    }

    /// Reduction of a group element (length ≥ `keep`).
    pub fn project<T: Int>(&self, x: &Element<T>) -> Vec<i64> {
        let mt = T::from_i64(self.m).unwrap();
        x.coords[..self.keep]
            .iter()
            .map(|v| v.mod_floor(&mt).to_i64().expect("reduced coordinate fits i64"))
            .collect()
    }

    /// Images of the coordinate generators (they generate the frame).
    pub fn generators(&self) -> Vec<Vec<i64>> {
        (0..self.keep)
            .map(|i| (0..self.keep).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect()
    }

    /// All elements in lexicographic order (`order ≤ cap`).
    pub fn elements(&self, cap: u64) -> Result<Vec<Vec<i64>>> {
        let n = match self.order_u64() {
            Some(n) if n <= cap => n,
            _ => return Err(Error::CapExceeded { what: "frame order", cap }),
        };
        let mut out = Vec::with_capacity(n as usize);
        let mut v = vec![0i64; self.keep];
        for _ in 0..n {
            out.push(v.clone());
            for k in (0..self.keep).rev() {
                v[k] += 1;
                if v[k] < self.m {
                    break;
                }
                v[k] = 0;
            }
        }
        Ok(out)
    }

    /// `N_k` image: elements whose first `k` coordinates vanish.
    pub fn tail(&self, k: usize) -> Echelon<i64> {
        let gens: Vec<Vec<i64>> = (k..self.keep)
            .map(|i| (0..self.keep).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect();
        pc::induce(self, &gens)
    }

    fn pad(&self, a: &[i64]) -> Vec<i64> {
        let mut v = a.to_vec();
        v.resize(self.full, 0);
        v
    }
}

impl PcGroup for FiniteFrame {
    type S = i64;

    fn hirsch(&self) -> usize {
        self.keep
    }

    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let m = self.m;
        match &self.arith {
            Arith::Abelian => a.iter().zip(b).map(|(x, y)| (x + y).rem_euclid(m)).collect(),
            Arith::Unitriangular { degree, positions } => {
                let p = ut_mul(*degree, positions, &self.pad(a), &self.pad(b));
                p[..self.keep].iter().map(|x| x.rem_euclid(m)).collect()
            }
        }
    }

    fn inv(&self, a: &[i64]) -> Vec<i64> {
        let m = self.m;
        match &self.arith {
            Arith::Abelian => a.iter().map(|x| (-x).rem_euclid(m)).collect(),
            Arith::Unitriangular { degree, positions } => {
                let p = ut_inv(*degree, positions, &self.pad(a));
                p[..self.keep].iter().map(|x| x.rem_euclid(m)).collect()
            }
        }
    }

    fn modulus(&self) -> Option<i64> {
        Some(self.m)
    }
}

/// Frame at level `m` after spot-checking the morphism property on
/// `samples` seeded random pairs.
pub fn quotient_frame<T: Int>(g: &GroupCtx<T>, m: i64, samples: usize) -> Result<FiniteFrame> {
    let f = FiniteFrame::new(g, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
    let span = 2 * m + 1;
    for _ in 0..samples {
        let mut draw = || -> Element<T> {
            Element::new((0..g.hirsch()).map(|_| T::from_i64(rng.gen_range(-span..=span)).unwrap()).collect())
        };
        let (x, y) = (draw(), draw());
        let lhs = f.project(&g.mul(&x, &y));
        let rhs = PcGroup::mul(&f, &f.project(&x), &f.project(&y));
        if lhs != rhs {
            return Err(Error::FrameUnsupported(format!("reduction mod {} is not a morphism", m)));
        }
    }
    Ok(f)
}

/// Order of a subgroup of a frame.
pub fn subgroup_order(f: &FiniteFrame, ech: &Echelon<i64>) -> BigUint {
    ech.rows.iter().flatten().fold(BigUint::from(1u32), |acc, t| {
        let d = pc::depth(t).unwrap();
        acc * BigUint::from((f.m / t[d]) as u64)
    })
}

/// `[F : N]` as `u64`.
pub fn subgroup_index(f: &FiniteFrame, ech: &Echelon<i64>) -> u64 {
    ech.rows.iter().enumerate().fold(1u64, |acc, (d, r)| match r {
        Some(t) => acc * (t[d] as u64),
        None => acc * (f.m as u64),
    })
}

/// Normal subgroups of a frame, sorted by `(index, induced sequence)`.
#[derive(Debug, Clone)]
pub struct NormalSubgroupLattice {
    pub members: Vec<Echelon<i64>>,
}

/// All normal subgroups: normal closures of single elements, closed under
/// joins with those closures.
pub fn enumerate_normal_subgroups(f: &FiniteFrame, cap: u64) -> Result<NormalSubgroupLattice> {
    let elements = f.elements(cap)?;
    let gens = f.generators();
    let mut closures: Vec<Echelon<i64>> = Vec::new();
    let mut seen: HashSet<Echelon<i64>> = HashSet::new();
    for x in &elements {
        let n = pc::normal_closure(f, &[x.clone()], &gens);
        if seen.insert(n.clone()) {
            closures.push(n);
        }
    }
    join_closure(f, closures, seen, cap)
}

/// Coordinate vectors `v` with `0 ≤ v_d < lead_d` (lead `m` at depths
/// without a pivot): one representative per coset of `base`.
pub fn transversal(f: &FiniteFrame, base: &Echelon<i64>, cap: u64) -> Result<Vec<Vec<i64>>> {
    let bounds: Vec<i64> = (0..f.keep).map(|d| base.rows[d].as_ref().map_or(f.m, |t| t[d])).collect();
    let total = bounds.iter().try_fold(1u64, |acc, &b| acc.checked_mul(b as u64));
    match total {
        Some(n) if n <= cap => {}
        _ => return Err(Error::CapExceeded { what: "transversal size", cap }),
    }
    let mut out = vec![vec![0i64; f.keep]];
    for (d, &b) in bounds.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * b as usize);
        for v in &out {
            for x in 0..b {
                let mut w = v.clone();
                w[d] = x;
                next.push(w);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Normal subgroups containing the normal subgroup `base`, sorted as in
/// [`enumerate_normal_subgroups`].
pub fn enumerate_normal_subgroups_over(
    f: &FiniteFrame,
    base: &Echelon<i64>,
    cap: u64,
) -> Result<NormalSubgroupLattice> {
    let reps = transversal(f, base, cap)?;
    let gens = f.generators();
    let mut closures: Vec<Echelon<i64>> = Vec::new();
    let mut seen: HashSet<Echelon<i64>> = HashSet::new();
    for x in &reps {
        let mut n = base.clone();
        pc::extend(f, &mut n, &[x.clone()]);
        let n = pc::normal_closure(f, &n.seq(), &gens);
        if seen.insert(n.clone()) {
            closures.push(n);
        }
    }
    join_closure(f, closures, seen, cap)
}

fn join_closure(
    f: &FiniteFrame,
    closures: Vec<Echelon<i64>>,
    mut seen: HashSet<Echelon<i64>>,
    cap: u64,
) -> Result<NormalSubgroupLattice> {
    let mut all: Vec<Echelon<i64>> = closures.clone();
    let mut frontier: Vec<Echelon<i64>> = closures.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for c in &closures {
                if c.rows.iter().flatten().all(|t| pc::contains(f, a, t)) {
                    continue;
                }
                let mut j = a.clone();
                pc::extend(f, &mut j, &c.seq());
                if seen.insert(j.clone()) {
                    next.push(j.clone());
                    all.push(j);
                    if all.len() as u64 > cap {
                        return Err(Error::CapExceeded { what: "normal subgroups", cap });
                    }
                }
            }
        }
        frontier = next;
    }
    let mut keyed: BTreeMap<(u64, Vec<Vec<i64>>), Echelon<i64>> = BTreeMap::new();
    for n in all {
        keyed.insert((subgroup_index(f, &n), n.seq()), n);
    }
    Ok(NormalSubgroupLattice { members: keyed.into_values().collect() })
}

/// Prime-power levels `p^e` for which `F(p^e, k)` is maximal within `cap`
/// for some `k`, as `(m, k)` pairs covering every frame of order `≤ cap`.
pub fn pareto_frames(p: u64, hirsch: usize, cap: u64) -> Vec<(u64, usize)> {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for k in (1..=hirsch).rev() {
        let mut m = 1u64;
        while let Some(next) = m.checked_mul(p) {
            match next.checked_pow(k as u32) {
                Some(o) if o <= cap => m = next,
                _ => break,
            }
        }
        if m < 2 {
            continue;
        }
        // drop frames dominated by a larger prefix at the same level
        if out.iter().any(|&(m2, k2)| m2 >= m && k2 >= k) {
            continue;
        }
        out.push((m, k));
    }
    out
}

/// Unitriangular positions re-exported for frame construction in tests.
pub fn positions(n: usize) -> Vec<(usize, usize)> {
    ut_positions(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn frame_orders() {
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        assert_eq!(FiniteFrame::new(&z2, 4).unwrap().order(), BigUint::from(16u32));
        let h3 = GroupCtx::<BigInt>::heisenberg();
        assert_eq!(FiniteFrame::new(&h3, 8).unwrap().order(), BigUint::from(512u32));
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        assert_eq!(FiniteFrame::new(&z, 5).unwrap().order(), BigUint::from(5u32));
        let u4 = GroupCtx::<BigInt>::unitriangular(4).unwrap();
        assert!(quotient_frame(&u4, 6, 1000).is_ok());
        assert!(quotient_frame(&h3, 8, 1000).is_ok());
        let pres = GroupCtx::<BigInt>::presentation(3, &[(1, 0, vec![0.into(), 0.into(), (-1).into()])]).unwrap();
        assert!(matches!(FiniteFrame::new(&pres, 2), Err(Error::FrameUnsupported(_))));
    }

    #[test]
    fn morphism_spot_check() {
        let h3 = GroupCtx::<i64>::heisenberg();
        let f = FiniteFrame::new(&h3, 6).unwrap();
        for x in -3..3i64 {
            for y in -2..2i64 {
                let g = Element::new(vec![x, y, x * y - 1]);
                let h = Element::new(vec![y, 2 * x, 5]);
                let lhs = f.project(&h3.mul(&g, &h));
                let rhs = PcGroup::mul(&f, &f.project(&g), &f.project(&h));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lattice_counts() {
        let z = GroupCtx::<i64>::free_abelian(1).unwrap();
        let l = enumerate_normal_subgroups(&FiniteFrame::new(&z, 4).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(l.members.len(), 3);
        let h3 = GroupCtx::<i64>::heisenberg();
        let l = enumerate_normal_subgroups(&FiniteFrame::new(&h3, 2).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(l.members.len(), 6);
        let z2 = GroupCtx::<i64>::free_abelian(2).unwrap();
        let l = enumerate_normal_subgroups(&FiniteFrame::new(&z2, 2).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(l.members.len(), 5);
        let f = FiniteFrame::new(&h3, 32).unwrap();
        assert!(matches!(enumerate_normal_subgroups(&f, DEFAULT_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn lattice_over_base_matches_filter() {
        let h3 = GroupCtx::<i64>::heisenberg();
        let f = FiniteFrame::new(&h3, 4).unwrap();
        let base = pc::induce(&f, &[vec![0, 0, 2]]);
        let over = enumerate_normal_subgroups_over(&f, &base, DEFAULT_CAP).unwrap();
        let all = enumerate_normal_subgroups(&f, DEFAULT_CAP).unwrap();
        let filtered: Vec<_> =
            all.members.into_iter().filter(|n| base.seq().iter().all(|t| pc::contains(&f, n, t))).collect();
        assert_eq!(over.members, filtered);
        assert_eq!(transversal(&f, &base, DEFAULT_CAP).unwrap().len(), 32);
    }

    #[test]
    fn pareto_examples() {
        assert_eq!(pareto_frames(2, 3, 4096), vec![(16, 3), (64, 2), (4096, 1)]);
        assert_eq!(pareto_frames(17, 3, 4096), vec![(17, 2), (289, 1)]);
    }
}
