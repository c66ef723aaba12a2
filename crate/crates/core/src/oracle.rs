//! Brute-force depth `D_G(H, g)`: the least order of a finite quotient in
//! which `g` leaves the image of `H`.
//!
//! Abelian groups use the Smith form of `H` directly. Matrix families scan
//! congruence frames `F(p^e, k)` for prime powers and minimize `[F : N̄]`
//! over normal `N̄` with `ḡ ∉ H̄N̄`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::certificate::{CertificateKind, DepthCertificate};
use crate::error::{Error, Result};
use crate::frame::{
    enumerate_normal_subgroups, enumerate_normal_subgroups_over, pareto_frames, subgroup_index, FiniteFrame,
    NormalSubgroupLattice, DEFAULT_CAP, MAX_LEVEL,
};
use crate::group::{Element, Family, GroupCtx};
use crate::lattice::{integer_kernel, is_prime, min_nondivisor, primes_up_to, smith};
use crate::pc::{self, Echelon};
use crate::scalar::{add, modulo, mul, to_i64, to_u64, Int};
use crate::subgroup::SubgroupDesc;

pub const DEFAULT_BUDGET: u64 = 1024;

/// A depth value or the budget it exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Value(u64),
    Exceeds(u64),
}

impl Depth {
    pub fn value(self) -> Option<u64> {
        match self {
            Depth::Value(v) => Some(v),
            Depth::Exceeds(_) => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Value(v) => write!(f, "{}", v),
            Depth::Exceeds(b) => write!(f, "> {}", b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthMode {
    /// Minimum over all finite quotients.
    Exact,
    /// Minimum over quotients of congruence frames.
    Congruence,
}

impl DepthMode {
    pub fn name(self) -> &'static str {
        match self {
            DepthMode::Exact => "exact",
            DepthMode::Congruence => "congruence",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DepthResult {
    pub value: Depth,
    pub mode: DepthMode,
    /// Congruence values below 6 are exact as well: every group of order
    /// at most 5 is abelian and factors through a scanned prefix frame.
    pub provably_exact: bool,
    pub witness: Option<DepthCertificate>,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub budget: u64,
    /// Largest frame order whose normal subgroups are enumerated.
    pub cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: DEFAULT_BUDGET, cap: DEFAULT_CAP }
    }
}

type LatticeCache = Mutex<HashMap<(FiniteFrame, u64), Arc<NormalSubgroupLattice>>>;

fn lattice_cache() -> &'static LatticeCache {
    static CACHE: OnceLock<LatticeCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normal subgroups of `f`, shared across oracles.
pub fn cached_lattice(f: &FiniteFrame, cap: u64) -> Result<Arc<NormalSubgroupLattice>> {
    let key = (f.clone(), cap);
    if let Some(l) = lattice_cache().lock().unwrap().get(&key) {
        return Ok(l.clone());
    }
    let l = Arc::new(enumerate_normal_subgroups(f, cap)?);
    lattice_cache().lock().unwrap().insert(key, l.clone());
    Ok(l)
}

fn u64_of<T: Int>(x: &T) -> Result<u64> {
    to_u64(x).ok_or_else(|| Error::Unsupported(format!("integer {} exceeds 64 bits", x)))
}

/// Smallest prime power dividing `d` but not `y` (`d > 0`).
fn least_separating_power(d: u64, y: u64) -> Option<u64> {
    let mut best: Option<u64> = None;
    let mut rest = d;
    let mut p = 2u64;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        if rest % p == 0 {
            let mut q = 1u64;
            while rest % p == 0 {
                rest /= p;
                q *= p;
                if y % q != 0 {
                    best = Some(best.map_or(q, |b| b.min(q)));
                    break;
                }
            }
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    best
}

/// Exact depth in an abelian group from the Smith form of `H`, with a
/// refined certificate at the separating prime power.
pub fn abelian_depth<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    budget: u64,
) -> Result<DepthResult> {
    if !g.is_additive() {
        return Err(Error::Unsupported("abelian depth needs additive coordinates".into()));
    }
    g.check(x)?;
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    let d = g.hirsch();
    let rows = h.induced.seq();
    let (diag, v) = if rows.is_empty() {
        (Vec::new(), crate::lattice::identity_rows::<T>(d))
    } else {
        let s = smith(&rows, d);
        (s.diagonal, s.right)
    };
    let mut best: Option<(u64, usize)> = None;
    for j in 0..d {
        let y = (0..d).fold(T::zero(), |acc, i| add(&acc, &mul(&x.coords[i], &v[i][j])));
        let dj = diag.get(j).cloned().unwrap_or_else(T::zero);
        let q = if dj.is_zero() {
            if y.is_zero() {
                continue;
            }
            u64_of(&min_nondivisor(&y)?)?
        } else {
            let r = modulo(&y, &dj);
            if r.is_zero() {
                continue;
            }
            match least_separating_power(u64_of(&dj)?, u64_of(&r)?) {
                Some(q) => q,
                None => continue,
            }
        };
        if best.map_or(true, |(b, _)| q < b) {
            best = Some((q, j));
        }
    }
    let (q, j) = best.ok_or(Error::InSubgroup)?;
    if q > budget {
        return Ok(DepthResult { value: Depth::Exceeds(budget), mode: DepthMode::Exact, provably_exact: true, witness: None });
    }
    let witness = if q as i64 <= MAX_LEVEL {
        // kernel of x ↦ (x·V)_j mod q
        let qt = T::from_u64(q).unwrap();
        let mut row: Vec<T> = (0..d).map(|i| v[i][j].clone()).collect();
        row.push(qt.clone());
        let gens: Vec<Vec<i64>> = integer_kernel(&[row], d + 1)
            .into_iter()
            .map(|k| k[..d].iter().map(|c| to_i64(&modulo(c, &qt)).unwrap()).collect())
            .filter(|k: &Vec<i64>| k.iter().any(|c| *c != 0))
            .collect();
        Some(DepthCertificate::build(g, h, x, CertificateKind::Refined, q as i64, gens)?)
    } else {
        None
    };
    Ok(DepthResult { value: Depth::Value(q), mode: DepthMode::Exact, provably_exact: true, witness })
}

struct FrameData {
    frame: FiniteFrame,
    lattice: Arc<NormalSubgroupLattice>,
    indices: Vec<u64>,
    h_image: Vec<Vec<i64>>,
    joins: Vec<OnceLock<Echelon<i64>>>,
}

/// Depth oracle for a fixed `(G, H)`; frame lattices and the joins `H̄N̄`
/// are computed on demand and reused across elements.
pub struct DepthOracle<'a, T: Int> {
    g: &'a GroupCtx<T>,
    h: &'a SubgroupDesc<T>,
    config: OracleConfig,
    frames: Mutex<HashMap<u64, Arc<Vec<FrameData>>>>,
}

impl<'a, T: Int> DepthOracle<'a, T> {
    pub fn new(g: &'a GroupCtx<T>, h: &'a SubgroupDesc<T>, config: OracleConfig) -> Result<Self> {
        FiniteFrame::new(g, 2)?;
        Ok(DepthOracle { g, h, config, frames: Mutex::new(HashMap::new()) })
    }

    fn frames_for(&self, p: u64) -> Result<Arc<Vec<FrameData>>> {
        if let Some(f) = self.frames.lock().unwrap().get(&p) {
            return Ok(f.clone());
        }
        let mut out = Vec::new();
        for (m, k) in pareto_frames(p, self.g.hirsch(), self.config.cap) {
            if m as i64 > MAX_LEVEL {
                continue;
            }
            let frame = FiniteFrame::prefix(self.g, m as i64, k)?;
            let lattice = cached_lattice(&frame, self.config.cap)?;
            let indices = lattice.members.iter().map(|n| subgroup_index(&frame, n)).collect();
            let h_image = self.h.induced_seq().iter().map(|y| frame.project(y)).collect();
            let joins = (0..lattice.members.len()).map(|_| OnceLock::new()).collect();
            out.push(FrameData { frame, lattice, indices, h_image, joins });
        }
        let out = Arc::new(out);
        self.frames.lock().unwrap().insert(p, out.clone());
        Ok(out)
    }

    /// Congruence-family depth (exact for abelian `G`).
    pub fn depth(&self, x: &Element<T>) -> Result<DepthResult> {
        if self.g.is_additive() {
            return abelian_depth(self.g, self.h, x, self.config.budget);
        }
        self.frame_scan(x)
    }

    /// Minimum of `[F : N̄]` over scanned frames, ignoring the Smith shortcut.
    pub fn frame_scan(&self, x: &Element<T>) -> Result<DepthResult> {
        self.g.check(x)?;
        if self.h.contains(self.g, x) {
            return Err(Error::InSubgroup);
        }
        let budget = self.config.budget;
        let mut best: Option<(u64, FiniteFrame, Echelon<i64>)> = None;
        let limit = budget.min(self.config.cap);
        for p in primes_up_to(limit) {
            if best.as_ref().map_or(false, |(b, _, _)| p >= *b) {
                break;
            }
            for fd in self.frames_for(p)?.iter() {
                let gx = fd.frame.project(x);
                for (i, n) in fd.lattice.members.iter().enumerate() {
                    let idx = fd.indices[i];
                    if idx > budget || best.as_ref().map_or(false, |(b, _, _)| idx >= *b) {
                        break;
                    }
                    let join = fd.joins[i].get_or_init(|| {
                        let mut j = n.clone();
                        pc::extend(&fd.frame, &mut j, &fd.h_image);
                        j
                    });
                    if !pc::contains(&fd.frame, join, &gx) {
                        best = Some((idx, fd.frame.clone(), n.clone()));
                        break;
                    }
                }
            }
        }
        let mode = if self.g.is_additive() { DepthMode::Exact } else { DepthMode::Congruence };
        let Some((value, frame, n)) = best else {
            return Ok(DepthResult { value: Depth::Exceeds(budget), mode, provably_exact: false, witness: None });
        };
        let witness = Some(lift_witness(self.g, self.h, x, &frame, &n)?);
        let small = value < 6
            && matches!(self.g.family(), Family::Unitriangular { .. } | Family::FreeAbelian);
        Ok(DepthResult { value: Depth::Value(value), mode, provably_exact: small || self.g.is_additive(), witness })
    }
}

/// Certificate in the full frame for `F(m, k) / N̄`: the preimage of `N̄`
/// adds the tail generators `e_k, …`.
fn lift_witness<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    frame: &FiniteFrame,
    n: &Echelon<i64>,
) -> Result<DepthCertificate> {
    let full = g.hirsch();
    let k = frame.keep();
    let mut gens: Vec<Vec<i64>> = n
        .seq()
        .into_iter()
        .map(|mut v| {
            v.resize(full, 0);
            v
        })
        .collect();
    for i in k..full {
        gens.push((0..full).map(|j| i64::from(i == j)).collect());
    }
    let kind = if gens.is_empty() { CertificateKind::CongruenceLevel } else { CertificateKind::Refined };
    DepthCertificate::build(g, h, x, kind, frame.level(), gens)
}

/// Depth with default caps.
pub fn depth<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, x: &Element<T>, budget: u64) -> Result<DepthResult> {
    let config = OracleConfig { budget, ..OracleConfig::default() };
    if g.is_additive() {
        return abelian_depth(g, h, x, budget);
    }
    DepthOracle::new(g, h, config)?.depth(x)
}

/// Frame scan for abelian `G` over subgroups containing `H̄`: every
/// quotient of `(ℤ/p^e)^d` not factoring through level `p^{e-1}` has
/// exponent `p^e`, so levels stop once `p^e` reaches the current best.
pub fn abelian_frame_scan<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    budget: u64,
    cap: u64,
) -> Result<Depth> {
    if !g.is_additive() {
        return Err(Error::Unsupported("abelian frame scan needs additive coordinates".into()));
    }
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    let mut best: Option<u64> = None;
    for p in primes_up_to(budget) {
        let mut q = p;
        while q <= budget && best.map_or(true, |b| q < b) && q as i64 <= MAX_LEVEL {
            let f = FiniteFrame::new(g, q as i64)?;
            let hbar: Vec<Vec<i64>> = h.induced_seq().iter().map(|y| f.project(y)).collect();
            let base = pc::induce(&f, &hbar);
            let gx = f.project(x);
            let over = enumerate_normal_subgroups_over(&f, &base, cap)?;
            if let Some(k) = over.members.iter().find(|k| !pc::contains(&f, k, &gx)) {
                let idx = subgroup_index(&f, k);
                if best.map_or(true, |b| idx < b) {
                    best = Some(idx);
                }
            }
            q *= p;
        }
    }
    Ok(match best {
        Some(b) if b <= budget => Depth::Value(b),
        _ => Depth::Exceeds(budget),
    })
}

/// `min [F : K]` over normal `K ⊇ H̄` with `ḡ ∉ K`, for normal `H`: the
/// depth of `ḡ` from the identity in `G/H`, read inside the same frames.
pub fn normal_quotient_depth<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    config: OracleConfig,
) -> Result<Depth> {
    if !h.is_normal(g) {
        return Err(Error::NotNormal);
    }
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    let mut best: Option<u64> = None;
    for p in primes_up_to(config.budget.min(config.cap)) {
        if best.map_or(false, |b| p >= b) {
            break;
        }
        for (m, k) in pareto_frames(p, g.hirsch(), config.cap) {
            let f = FiniteFrame::prefix(g, m as i64, k)?;
            let hbar: Vec<Vec<i64>> = h.induced_seq().iter().map(|y| f.project(y)).collect();
            let base = pc::normal_closure(&f, &hbar, &f.generators());
            let gx = f.project(x);
            let over = enumerate_normal_subgroups_over(&f, &base, config.cap)?;
            if let Some(kk) = over.members.iter().find(|kk| !pc::contains(&f, kk, &gx)) {
                let idx = subgroup_index(&f, kk);
                if best.map_or(true, |b| idx < b) {
                    best = Some(idx);
                }
            }
        }
    }
    Ok(match best {
        Some(b) if b <= config.budget => Depth::Value(b),
        _ => Depth::Exceeds(config.budget),
    })
}

/// Whether `q` is a prime power.
pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    r == 1 && is_prime(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::validate_certificate;
    use num_bigint::BigInt;

    fn e(v: &[i64]) -> Element<BigInt> {
        Element::from_i64(v)
    }

    #[test]
    fn abelian_examples() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let r = depth(&z, &SubgroupDesc::trivial(&z), &e(&[6]), 100).unwrap();
        assert_eq!(r.value, Depth::Value(4));
        assert_eq!(r.mode, DepthMode::Exact);
        assert!(validate_certificate(&z, &SubgroupDesc::trivial(&z), &e(&[6]), r.witness.as_ref().unwrap()).valid);
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let h = SubgroupDesc::induce(&z2, &[e(&[1, 2]), e(&[2, 0])]);
        let r = depth(&z2, &h, &e(&[0, 2]), 100).unwrap();
        assert_eq!(r.value, Depth::Value(4));
        assert!(validate_certificate(&z2, &h, &e(&[0, 2]), r.witness.as_ref().unwrap()).valid);
        assert_eq!(abelian_frame_scan(&z2, &h, &e(&[0, 2]), 100, 1 << 16).unwrap(), Depth::Value(4));
        assert!(matches!(depth(&z2, &h, &e(&[1, 2]), 100), Err(Error::InSubgroup)));
        assert_eq!(depth(&z, &SubgroupDesc::trivial(&z), &e(&[720720]), 10).unwrap().value, Depth::Exceeds(10));
    }

    #[test]
    fn heisenberg_small() {
        let h3 = GroupCtx::<BigInt>::heisenberg();
        let h = SubgroupDesc::induce(&h3, &[e(&[1, 0, 0])]);
        let r = depth(&h3, &h, &e(&[0, 1, 0]), 64).unwrap();
        assert_eq!(r.value, Depth::Value(2));
        assert_eq!(r.mode, DepthMode::Congruence);
        assert!(validate_certificate(&h3, &h, &e(&[0, 1, 0]), r.witness.as_ref().unwrap()).valid);
        let h = SubgroupDesc::induce(&h3, &[e(&[0, 0, 2])]);
        let r = depth(&h3, &h, &e(&[0, 0, 1]), 64).unwrap();
        assert_eq!(r.value, Depth::Value(8));
        let n = normal_quotient_depth(&h3, &h, &e(&[0, 0, 1]), OracleConfig { budget: 64, cap: DEFAULT_CAP });
        assert_eq!(n.unwrap(), Depth::Value(8));
    }

    #[test]
    fn separating_powers() {
        assert_eq!(least_separating_power(4, 2), Some(4));
        assert_eq!(least_separating_power(12, 6), Some(4));
        assert_eq!(least_separating_power(9, 3), Some(9));
        assert_eq!(least_separating_power(30, 15), Some(2));
        assert!(is_prime_power(64) && !is_prime_power(12));
    }
}

