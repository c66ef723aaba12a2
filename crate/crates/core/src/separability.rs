//! Constructive separation: central elements by prime-power congruence
//! frames, general elements by descending the coordinate series to the
//! first quotient where they leave `H`, plus the normal-subgroup reduction
//! and the `Φ`/`ψ` registry.

use num_bigint::BigUint;
use num_traits::One;

use crate::certificate::{validate_certificate, CertificateKind, DepthCertificate};
use crate::error::{Error, Result};
use crate::frame::{FiniteFrame, MAX_LEVEL};
use crate::group::{Element, Family, GroupCtx};
use crate::lattice::primes_up_to;
use crate::oracle::{normal_quotient_depth, Depth, DepthOracle, OracleConfig};
use crate::pc::{self, PcGroup};
use crate::scalar::{valuation, Int};
use crate::subgroup::{isolator, quotient_by_isolated_normal, SubgroupDesc};

/// Primes tried by [`separate_central`] before giving up.
pub const PRIME_LIMIT: u64 = 1000;

/// `⌊log_p(c!)⌋`.
pub fn kpc_constant(p: u64, c: u32) -> u32 {
    let fact: BigUint = (1..=c as u64).fold(BigUint::one(), |acc, k| acc * k);
    let pb = BigUint::from(p);
    let mut k = 0;
    let mut q = pb.clone();
    while q <= fact {
        k += 1;
        q *= &pb;
    }
    k
}

/// Exponent bound for prime `p`: the `p`-parts of `x`'s content and of the
/// pivot leads of `H`, plus `k(p, c)` per series level, plus one. The
/// search runs to `2E + 1` to cover the level inflation `p^k ↦ p^{2k}`.
pub fn exponent_bound<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, x: &Element<T>, p: u64) -> u32 {
    let pt = T::from_u64(p).unwrap();
    let content = x.coords.iter().fold(T::zero(), |acc, c| acc.gcd(c));
    let base = if content.is_zero() { 0 } else { valuation(&content, &pt) };
    let leads: u32 = h.pivots().iter().map(|(_, l)| valuation(l, &pt)).sum();
    let kpc = kpc_constant(p, g.class().max(1) as u32);
    base + leads + g.hirsch() as u32 * kpc + 1
}

fn is_central<T: Int>(g: &GroupCtx<T>, x: &Element<T>) -> bool {
    g.basis().iter().all(|s| g.mul(s, x) == g.mul(x, s))
}

/// Smallest level `p^e` (primes ascending, then exponents) at which the
/// full frame separates the central element `x` from `H`.
pub fn separate_central<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, x: &Element<T>) -> Result<DepthCertificate> {
    g.check(x)?;
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    if !is_central(g, x) {
        return Err(Error::NotCentral);
    }
    FiniteFrame::new(g, 2)?;
    let kind = if g.is_abelian() { CertificateKind::AbelianModulus } else { CertificateKind::CongruenceLevel };
    let hs = h.induced_seq();
    for p in primes_up_to(PRIME_LIMIT) {
        let cap = 2 * exponent_bound(g, h, x, p) + 1;
        let mut m = 1i64;
        for _ in 0..cap {
            m = match m.checked_mul(p as i64) {
                Some(v) if v <= MAX_LEVEL => v,
                _ => break,
            };
            if separates(g, &hs, x, m)? {
                let cert = DepthCertificate::build(g, h, x, kind, m, Vec::new())?;
                return Ok(cert);
            }
        }
    }
    Err(Error::Exhausted(format!("no prime power level up to prime {} separates", PRIME_LIMIT)))
}

/// `x̄ ∉ H̄` in the full frame at level `m`.
pub fn separates<T: Int>(g: &GroupCtx<T>, hs: &[Element<T>], x: &Element<T>, m: i64) -> Result<bool> {
    let f = FiniteFrame::new(g, m)?;
    let hbar: Vec<Vec<i64>> = hs.iter().map(|y| f.project(y)).collect();
    let ech = pc::induce(&f, &hbar);
    Ok(!pc::contains(&f, &ech, &f.project(x)))
}

/// `(z, h)` with `z` in the last coordinate subgroup, `z ∉ H`, `h ∈ H` and
/// `g·z = h`.
pub fn central_coset_witness<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
) -> Result<(Element<T>, Element<T>)> {
    g.check(x)?;
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    let n = g.hirsch();
    let (r, u) = pc::sift_with(g, &h.induced, &x.coords, n.saturating_sub(1));
    if r[..n.saturating_sub(1)].iter().any(|c| !c.is_zero()) {
        return Err(Error::NotInCoset);
    }
    // r = x·u lies in the central tail, so x·r⁻¹ = u⁻¹ ∈ H
    let z = Element::new(PcGroup::inv(g, &r));
    let hh = Element::new(PcGroup::inv(g, &u));
    Ok((z, hh))
}

/// Smallest `k` with `x N_k ∉ H N_k`.
fn separating_prefix<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, x: &Element<T>) -> Result<usize> {
    for k in 1..=g.hirsch() {
        let q = g.truncated(k)?;
        let hq = project_subgroup(&q, h, k);
        if !hq.contains(&q, &Element::new(x.coords[..k].to_vec())) {
            return Ok(k);
        }
    }
    Err(Error::InSubgroup)
}

fn project_subgroup<T: Int>(q: &GroupCtx<T>, h: &SubgroupDesc<T>, k: usize) -> SubgroupDesc<T> {
    let gens: Vec<Element<T>> = h.induced_seq().iter().map(|y| Element::new(y.coords[..k].to_vec())).collect();
    SubgroupDesc::induce(q, &gens)
}

/// A validated certificate separating `x` from `H`, or `None` when the
/// prime search is exhausted.
pub fn separate<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>, x: &Element<T>) -> Result<Option<DepthCertificate>> {
    g.check(x)?;
    if h.contains(g, x) {
        return Err(Error::InSubgroup);
    }
    let k = separating_prefix(g, h, x)?;
    let q = g.truncated(k)?;
    let hq = project_subgroup(&q, h, k);
    let xq = Element::new(x.coords[..k].to_vec());
    let (z, _) = central_coset_witness(&q, &hq, &xq)?;
    let inner = match separate_central(&q, &hq, &z) {
        Ok(c) => c,
        Err(Error::Exhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let m = inner.level;
    let n = g.hirsch();
    let cert = if g.is_abelian() {
        DepthCertificate::build(g, h, x, CertificateKind::AbelianModulus, m, Vec::new())?
    } else if k == n {
        DepthCertificate::build(g, h, x, CertificateKind::CongruenceLevel, m, Vec::new())?
    } else {
        let tail: Vec<Vec<i64>> = (k..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        DepthCertificate::build(g, h, x, CertificateKind::Refined, m, tail)?
    };
    let v = validate_certificate(g, h, x, &cert);
    if !v.valid {
        return Err(Error::Exhausted(format!(
            "separating certificate failed validation: {}",
            v.reason.unwrap_or_default()
        )));
    }
    Ok(Some(cert))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalDepthReport {
    /// `D_G(H, g)` over the oracle's frames.
    pub depth_in_group: Depth,
    /// `D_{G/H}({1}, ḡ)` over frame quotients whose kernel contains `H̄`.
    pub depth_in_quotient: Depth,
}

impl NormalDepthReport {
    pub fn equal(&self) -> bool {
        self.depth_in_group == self.depth_in_quotient
    }
}

/// Both sides of the normal-subgroup reduction, in the same frame family.
pub fn normal_depth_reduction<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    config: OracleConfig,
) -> Result<NormalDepthReport> {
    if !h.is_normal(g) {
        return Err(Error::NotNormal);
    }
    let lhs = DepthOracle::new(g, h, config)?.frame_scan(x)?.value;
    let rhs = normal_quotient_depth(g, h, x, config)?;
    Ok(NormalDepthReport { depth_in_group: lhs, depth_in_quotient: rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Psi {
    Value(u32),
    Unregistered,
}

impl std::fmt::Display for Psi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psi::Value(v) => write!(f, "{}", v),
            Psi::Unregistered => write!(f, "unregistered"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiRegistryEntry {
    pub family: &'static str,
    pub phi: u32,
    pub note: &'static str,
}

pub fn psi_registry() -> Vec<PsiRegistryEntry> {
    vec![
        PsiRegistryEntry { family: "free_abelian", phi: 1, note: "abelian groups" },
        PsiRegistryEntry {
            family: "unitriangular(3)",
            phi: 3,
            note: "a quotient detecting a central element needs cyclic center and class 2",
        },
    ]
}

/// `Φ` of the registered family of `G`, if any.
pub fn phi_constant<T: Int>(g: &GroupCtx<T>) -> Psi {
    if g.hirsch() == 0 {
        return Psi::Unregistered;
    }
    let name = if g.is_additive() {
        "free_abelian"
    } else {
        match g.family() {
            Family::Unitriangular { degree: 3, .. } => "unitriangular(3)",
            _ => return Psi::Unregistered,
        }
    };
    psi_registry().into_iter().find(|e| e.family == name).map_or(Psi::Unregistered, |e| Psi::Value(e.phi))
}

/// `ψ(G, H) = Φ(G/√H)` for normal `H`.
pub fn psi_constant<T: Int>(g: &GroupCtx<T>, h: &SubgroupDesc<T>) -> Result<Psi> {
    if !h.is_normal(g) {
        return Err(Error::NotNormal);
    }
    let root = isolator(g, h);
    if root.is_trivial() {
        return Ok(phi_constant(g));
    }
    match quotient_by_isolated_normal(g, &root) {
        Ok(q) => Ok(phi_constant(&q.group)),
        Err(Error::Unsupported(_)) => Ok(Psi::Unregistered),
        Err(e) => Err(e),
    }
}
