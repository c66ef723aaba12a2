//! Farb and Sub profiles, lower-bound families, preset experiments and
//! log-log scaling fits.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::certificate::{validate_certificate, DepthCertificate};
use crate::error::{Error, Result};
use crate::frame::{FiniteFrame, DEFAULT_CAP};
use crate::group::{Element, GroupCtx};
use crate::lattice::{lcm_ladder, min_nondivisor};
use crate::metric::{subgroup_norm, tail_lengths, Ball, Bounded};
use crate::oracle::{abelian_depth, cached_lattice, Depth, DepthMode, DepthOracle, DepthResult, OracleConfig};
use crate::pc::{self, Echelon};
use crate::scalar::Int;
use crate::separability::separate;
use crate::subgroup::SubgroupDesc;

/// Ball size cap for profiles.
pub const BALL_CAP: usize = 100_000;
/// Distinct subgroups per radius in [`sub_profile`].
pub const SUBGROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Farb,
    Sub,
    CentralProfile,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Farb => "farb",
            ProfileKind::Sub => "sub",
            ProfileKind::CentralProfile => "central_profile",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProfileRow<T: Int> {
    pub n: u32,
    pub value: Depth,
    pub mode: DepthMode,
    pub witness: Option<Element<T>>,
    pub subgroup: Vec<Element<T>>,
    pub certificate: Option<DepthCertificate>,
}

#[derive(Debug, Clone)]
pub struct ProfileSeries<T: Int> {
    pub kind: ProfileKind,
    pub rows: Vec<ProfileRow<T>>,
    pub meta: BTreeMap<String, String>,
}

fn depth_key(d: Depth) -> (u8, u64) {
    match d {
        Depth::Value(v) => (0, v),
        Depth::Exceeds(b) => (1, b),
    }
}

fn depth_str(d: Depth) -> String {
    match d {
        Depth::Value(v) => v.to_string(),
        Depth::Exceeds(b) => format!(">{}", b),
    }
}

impl<T: Int> ProfileSeries<T> {
    fn certificate_id(&self, i: usize) -> String {
        match &self.rows[i].certificate {
            Some(_) => format!("{}-{}", self.kind.name(), self.rows[i].n),
            None => String::new(),
        }
    }

    /// CSV with header `n,value,mode,witness,certificate_id`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(format!("csv: {}", e));
        w.write_record(["n", "value", "mode", "witness", "certificate_id"]).map_err(io)?;
        for (i, r) in self.rows.iter().enumerate() {
            let witness = r.witness.as_ref().map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.n.to_string(),
                depth_str(r.value),
                r.mode.name().to_string(),
                witness,
                self.certificate_id(i),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {}", e)))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// JSON bundle with metadata and embedded certificates.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "n": r.n.to_string(),
                    "value": depth_str(r.value),
                    "mode": r.mode.name(),
                    "witness": r.witness.as_ref().map(|x| x.to_string()),
                    "subgroup": r.subgroup.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "certificate_id": self.certificate_id(i),
                    "certificate": r.certificate.as_ref().map(|c| c.to_json()),
                })
            })
            .collect();
        json!({ "kind": self.kind.name(), "meta": self.meta, "rows": rows })
    }
}

/// One parsed CSV record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvRecord {
    pub n: u32,
    pub value: Depth,
    pub mode: String,
    pub witness: String,
    pub certificate_id: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |what: &str| Error::Parse(format!("csv: {}", what));
    let header = r.headers().map_err(|e| bad(&e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["n", "value", "mode", "witness", "certificate_id"] {
        return Err(bad("unexpected header"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e.to_string()))?;
        let n = rec[0].parse().map_err(|_| bad("n"))?;
        let value = match rec[1].strip_prefix('>') {
            Some(b) => Depth::Exceeds(b.parse().map_err(|_| bad("value"))?),
            None => Depth::Value(rec[1].parse().map_err(|_| bad("value"))?),
        };
        out.push(CsvRecord {
            n,
            value,
            mode: rec[2].to_string(),
            witness: rec[3].to_string(),
            certificate_id: rec[4].to_string(),
        });
    }
    Ok(out)
}

/// Depth evaluator for a fixed `(G, H)`.
enum Evaluator<'a, T: Int> {
    Abelian(&'a GroupCtx<T>, &'a SubgroupDesc<T>, u64),
    Frames(DepthOracle<'a, T>),
}

impl<'a, T: Int> Evaluator<'a, T> {
    fn new(g: &'a GroupCtx<T>, h: &'a SubgroupDesc<T>, budget: u64) -> Result<Self> {
        if g.is_additive() {
            Ok(Evaluator::Abelian(g, h, budget))
        } else {
            let cfg = OracleConfig { budget, ..OracleConfig::default() };
            Ok(Evaluator::Frames(DepthOracle::new(g, h, cfg)?))
        }
    }

    fn depth(&self, x: &Element<T>) -> Result<DepthResult> {
        match self {
            Evaluator::Abelian(g, h, b) => abelian_depth(g, h, x, *b),
            Evaluator::Frames(o) => o.depth(x),
        }
    }
}

fn empty_row<T: Int>(n: u32, mode: DepthMode) -> ProfileRow<T> {
    ProfileRow { n, value: Depth::Value(0), mode, witness: None, subgroup: Vec::new(), certificate: None }
}

fn mode_of<T: Int>(g: &GroupCtx<T>) -> DepthMode {
    if g.is_additive() {
        DepthMode::Exact
    } else {
        DepthMode::Congruence
    }
}

fn meta(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `Farb(n) = max {D(H, g) : g ∈ B_n ∖ H}` for `n = 1..=n_max`; rows with
/// no element outside `H` report 0.
pub fn farb_profile<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    s: &[Element<T>],
    n_max: u32,
    budget: u64,
) -> Result<ProfileSeries<T>> {
    let mut series = ProfileSeries {
        kind: ProfileKind::Farb,
        rows: Vec::new(),
        meta: meta(&[
            ("group", g.family_name()),
            ("subgroup", h.induced_seq().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")),
            ("budget", budget.to_string()),
            ("n_max", n_max.to_string()),
        ]),
    };
    if n_max == 0 {
        return Ok(series);
    }
    let eval = Evaluator::new(g, h, budget)?;
    let mut ball = Ball::new(g, s, 0);
    let mut best = empty_row::<T>(0, mode_of(g));
    for n in 1..=n_max {
        ball.grow(g, n);
        if ball.len() > BALL_CAP {
            return Err(Error::CapExceeded { what: "ball size", cap: BALL_CAP as u64 });
        }
        for x in &ball.elements()[ball.size_at(n - 1)..ball.size_at(n)] {
            if h.contains(g, x) {
                continue;
            }
            let d = eval.depth(x)?;
            if best.witness.is_none() || depth_key(d.value) > depth_key(best.value) {
                best = ProfileRow {
                    n,
                    value: d.value,
                    mode: d.mode,
                    witness: Some(x.clone()),
                    subgroup: h.induced_seq(),
                    certificate: d.witness,
                };
            }
        }
        let mut row = best.clone();
        row.n = n;
        series.rows.push(row);
    }
    Ok(series)
}

/// Subgroups generated by elements of `elements`, closed under adding one
/// generator at a time, deduplicated by induced sequence.
pub fn subgroups_generated_by<T: Int>(
    g: &GroupCtx<T>,
    elements: &[Element<T>],
    start: Vec<SubgroupDesc<T>>,
    cap: usize,
) -> Result<Vec<SubgroupDesc<T>>> {
    let mut seen: HashSet<Echelon<T>> = start.iter().map(|h| h.induced.clone()).collect();
    let mut all = start;
    let mut i = 0;
    while i < all.len() {
        let base = all[i].clone();
        for x in elements {
            if base.contains(g, x) {
                continue;
            }
            let mut ech = base.induced.clone();
            pc::extend(g, &mut ech, &[x.coords.clone()]);
            if seen.insert(ech.clone()) {
                let mut gens = base.gens.clone();
                gens.push(x.clone());
                all.push(SubgroupDesc { gens, induced: ech });
                if all.len() > cap {
                    return Err(Error::CapExceeded { what: "subgroups", cap: cap as u64 });
                }
            }
        }
        i += 1;
    }
    Ok(all)
}

/// `Sub(n) = max {D(H, g) : ∥H∥ ≤ n, g ∈ B_n ∖ H}`, including the trivial
/// subgroup. A cap hit ends the series with a sentinel row.
pub fn sub_profile<T: Int>(g: &GroupCtx<T>, s: &[Element<T>], n_max: u32, budget: u64) -> Result<ProfileSeries<T>> {
    let mut series = ProfileSeries {
        kind: ProfileKind::Sub,
        rows: Vec::new(),
        meta: meta(&[
            ("group", g.family_name()),
            ("budget", budget.to_string()),
            ("n_max", n_max.to_string()),
            ("subgroup_cap", SUBGROUP_CAP.to_string()),
        ]),
    };
    let mut subgroups = vec![SubgroupDesc::trivial(g)];
    let mut ball = Ball::new(g, s, 0);
    let mut best = empty_row::<T>(0, mode_of(g));
    for n in 1..=n_max {
        ball.grow(g, n);
        let pool: Vec<Element<T>> = ball.elements().iter().filter(|x| !x.is_identity()).cloned().collect();
        let capped = ball.len() > BALL_CAP;
        let closed = if capped { None } else { subgroups_generated_by(g, &pool, subgroups.clone(), SUBGROUP_CAP).ok() };
        let Some(closed) = closed else {
            series.meta.insert("capped_at".into(), n.to_string());
            let mut row = best.clone();
            row.n = n;
            row.value = Depth::Exceeds(budget);
            series.rows.push(row);
            break;
        };
        subgroups = closed;
        for h in &subgroups {
            let eval = Evaluator::new(g, h, budget)?;
            for x in ball.elements() {
                if h.contains(g, x) {
                    continue;
                }
                let d = eval.depth(x)?;
                if best.witness.is_none() || depth_key(d.value) > depth_key(best.value) {
                    best = ProfileRow {
                        n,
                        value: d.value,
                        mode: d.mode,
                        witness: Some(x.clone()),
                        subgroup: h.induced_seq(),
                        certificate: d.witness,
                    };
                }
            }
        }
        let mut row = best.clone();
        row.n = n;
        series.rows.push(row);
    }
    Ok(series)
}

/// `max {mnd(j) : 1 ≤ j ≤ n}` without enumeration: a maximizer is
/// divisible by every integer below its value, so it suffices to test
/// `lcm(1..k) ≤ n`. Zero for `n = 0`.
pub fn farb_integers(n: u64) -> u64 {
    let mut best = 0u64;
    let mut k = 1u64;
    loop {
        let l: BigInt = lcm_ladder(k);
        if l > BigInt::from(n) {
            break;
        }
        let m = min_nondivisor(&l).expect("lcm is nonzero");
        best = best.max(u64::try_from(m).expect("small nondivisor"));
        k += 1;
    }
    best
}

/// Congruence depth of `c^j` from the identity in the Heisenberg group,
/// `mnd(j)³`.
pub fn central_depth(j: u64) -> u64 {
    let m: BigInt = min_nondivisor(&BigInt::from(j)).expect("j is nonzero");
    u64::try_from(m).unwrap().pow(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundKind {
    RfLcm,
    SubPower,
}

#[derive(Debug, Clone)]
pub struct LowerBoundRow<T: Int> {
    pub p: u64,
    pub element: Element<T>,
    pub subgroup: SubgroupDesc<T>,
    pub depth: DepthResult,
    pub holds: bool,
}

/// `rf_lcm`: `g_i = g^{lcm(1..p_i - 1)}` with `D({1}, g_i) ≥ p_i`.
/// `sub_power`: `H_i = ⟨g^{p_i}⟩` with `D(H_i, g) = p_i` in exact mode and
/// `≥ p_i` otherwise.
pub fn lower_bound_family<T: Int>(
    kind: LowerBoundKind,
    g: &GroupCtx<T>,
    base: &Element<T>,
    primes: &[u64],
    budget: u64,
) -> Result<Vec<LowerBoundRow<T>>> {
    g.check(base)?;
    if base.is_identity() {
        return Err(Error::Degenerate("lower-bound family needs a nontrivial base element"));
    }
    let mut out = Vec::new();
    for &p in primes {
        let (element, subgroup) = match kind {
            LowerBoundKind::RfLcm => {
                let k: T = lcm_ladder(p - 1);
                (g.power(base, &k), SubgroupDesc::trivial(g))
            }
            LowerBoundKind::SubPower => {
                let hp = g.power(base, &T::from_u64(p).unwrap());
                (base.clone(), SubgroupDesc::induce(g, &[hp]))
            }
        };
        let depth = Evaluator::new(g, &subgroup, budget)?.depth(&element)?;
        let exact = depth.mode == DepthMode::Exact || depth.provably_exact;
        let holds = match (kind, depth.value) {
            (LowerBoundKind::SubPower, Depth::Value(v)) if exact => v == p,
            (_, Depth::Value(v)) => v >= p,
            (_, Depth::Exceeds(b)) => b >= p,
        };
        out.push(LowerBoundRow { p, element, subgroup, depth, holds });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    PolyInN,
    PolyInLogN,
}

#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Least-squares slope of `log value` against `log n` or `log log n`.
pub fn scaling_report(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit> {
    let xs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, v)| *v > 0.0 && *n > 1.0)
        .map(|&(n, v)| {
            let x = match model {
                ScalingModel::PolyInN => n.ln(),
                ScalingModel::PolyInLogN => n.ln().ln(),
            };
            (x, v.ln())
        })
        .collect();
    if xs.len() < 4 {
        return Err(Error::InsufficientRows { need: 4, have: xs.len() });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let residuals = xs.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    Ok(ScalingFit { slope, intercept, residuals })
}

/// Non-sentinel `(n, value)` pairs of a series.
pub fn series_points<T: Int>(series: &ProfileSeries<T>) -> Vec<(f64, f64)> {
    series.rows.iter().filter_map(|r| r.value.value().map(|v| (r.n as f64, v as f64))).collect()
}

/// One assertion of a preset experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresetReport {
    pub name: String,
    pub checks: Vec<Check>,
    /// Set when a cap prevented part of the scenario from running.
    pub partial: bool,
}

impl PresetReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { label: label.into(), passed, detail: detail.into() });
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "partial": self.partial,
            "checks": self.checks.iter().map(|c| json!({
                "label": c.label, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetParams {
    pub p: u64,
    /// Radii for the central profile.
    pub n_max: u32,
}

impl Default for PresetParams {
    fn default() -> Self {
        PresetParams { p: 2, n_max: 64 }
    }
}

pub const PRESETS: [&str; 6] = ["ex6.3", "ex6.4", "prop6.1", "prop6.2", "cor1.2", "dist_check"];

fn e(v: &[i64]) -> Element<BigInt> {
    Element::from_i64(v)
}

fn show<T: Int>(h: &SubgroupDesc<T>) -> String {
    h.induced_seq().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn pow_u64(p: u64, k: u32) -> i64 {
    i64::try_from(p.pow(k)).expect("preset parameter fits i64")
}

pub fn preset_experiment(name: &str, params: PresetParams) -> Result<PresetReport> {
    let mut r = PresetReport { name: name.to_string(), checks: Vec::new(), partial: false };
    match name {
        "ex6.3" => ex63(&mut r, params.p)?,
        "ex6.4" => ex64(&mut r, params.p)?,
        "prop6.1" => prop61(&mut r, params.p)?,
        "prop6.2" => prop62(&mut r, params.n_max)?,
        "cor1.2" => cor12(&mut r)?,
        "dist_check" => dist_check(&mut r)?,
        _ => return Err(Error::Parse(format!("unknown preset {}", name))),
    }
    Ok(r)
}

fn ex63(r: &mut PresetReport, p: u64) -> Result<()> {
    let z2 = GroupCtx::<BigInt>::free_abelian(2)?;
    let s = z2.generators().to_vec();
    let pi = p as i64;
    let h = SubgroupDesc::induce(&z2, &[e(&[1, pi]), e(&[pi, 0])]);
    let radius = (p * p + 2) as u32;
    let norm = subgroup_norm(&z2, &h, &s, radius);
    r.check("norm of H is p+1", norm == Bounded::Exact(p as u32 + 1), format!("norm {}", norm));
    let inter = h.truncate(1);
    let expected = SubgroupDesc::induce(&z2, &[e(&[0, pi * pi])]);
    r.check("H ∩ <e2> = <(0,p^2)>", inter.same(&expected), show(&inter));
    let inorm = subgroup_norm(&z2, &inter, &s, radius);
    r.check("norm of H ∩ <e2> is p^2", inorm == Bounded::Exact((p * p) as u32), format!("norm {}", inorm));
    let x = e(&[0, pi]);
    let d = abelian_depth(&z2, &h, &x, p * p * 4)?;
    r.check("exact depth of (0,p) is p^2", d.value == Depth::Value(p * p), format!("D = {}", d.value));
    let cert = separate(&z2, &h, &x)?;
    let valid = cert.as_ref().map_or(false, |c| validate_certificate(&z2, &h, &x, c).valid);
    r.check("separating certificate validates", valid, cert.map(|c| c.quotient_order.to_string()).unwrap_or_default());
    Ok(())
}

fn ex64(r: &mut PresetReport, p: u64) -> Result<()> {
    let h3 = GroupCtx::<BigInt>::heisenberg();
    let (p2, p3) = (pow_u64(p, 2), pow_u64(p, 3));
    let h = SubgroupDesc::induce(&h3, &[e(&[0, 1, p2]), e(&[0, p as i64, 0])]);
    let center = h.truncate(2);
    let expected = SubgroupDesc::induce(&h3, &[e(&[0, 0, p3])]);
    r.check("H ∩ Z = <c^(p^3)>", center.same(&expected), show(&center));
    let x = e(&[0, 0, p2]);
    let cert = separate(&h3, &h, &x)?;
    let order = num_bigint::BigUint::from(p).pow(9);
    let ok = cert
        .as_ref()
        .map_or(false, |c| c.level == p3 && c.quotient_order == order && validate_certificate(&h3, &h, &x, c).valid);
    r.check(
        "valid certificate of order p^9 at level p^3",
        ok,
        cert.map(|c| format!("level {} order {}", c.level, c.quotient_order)).unwrap_or_default(),
    );
    let f = FiniteFrame::new(&h3, p3)?;
    match cached_lattice(&f, DEFAULT_CAP) {
        Ok(lattice) => {
            let hbar: Vec<Vec<i64>> = h.induced_seq().iter().map(|y| f.project(y)).collect();
            let gx = f.project(&x);
            let smaller = lattice.members.iter().find(|n| {
                let idx = crate::frame::subgroup_index(&f, n);
                let mut j = (*n).clone();
                pc::extend(&f, &mut j, &hbar);
                (idx as u128) < order_u128(p) && !pc::contains(&f, &j, &gx)
            });
            r.check(
                "no separating quotient of the level-p^3 frame below p^9",
                smaller.is_none(),
                format!("{} normal subgroups scanned", lattice.members.len()),
            );
        }
        Err(Error::CapExceeded { .. }) => r.partial = true,
        Err(e) => return Err(e),
    }
    Ok(())
}

fn order_u128(p: u64) -> u128 {
    (p as u128).pow(9)
}

fn prop61(r: &mut PresetReport, p: u64) -> Result<()> {
    let h3 = GroupCtx::<BigInt>::heisenberg();
    let s = h3.generators().to_vec();
    let h = SubgroupDesc::induce(&h3, &[e(&[1, 0, 0]), e(&[0, 0, p as i64])]);
    r.check("H ∩ Z nontrivial", !h.truncate(2).is_trivial(), show(&h.truncate(2)));
    r.check("H has infinite index", h.index(&h3).is_none(), "");
    let eval = Evaluator::new(&h3, &h, 1024)?;
    let mut coset_bound = 0u64;
    for l in 1..p as i64 {
        let d = eval.depth(&e(&[0, 0, l]))?;
        coset_bound = coset_bound.max(d.value.value().unwrap_or(u64::MAX));
    }
    let series = farb_profile(&h3, &h, &s, 5, 1024)?;
    let ratios: Vec<f64> = series
        .rows
        .iter()
        .filter(|row| row.n >= 2)
        .filter_map(|row| row.value.value().map(|v| v as f64 / (1.0 + (row.n as f64).ln())))
        .collect();
    let within = !ratios.is_empty() && ratios.iter().all(|q| (1.0 / 6.0..=6.0).contains(q));
    r.check("Farb(n)/(1 + log n) within [1/6, 6]", within, format!("{:.3?}", ratios));
    // central cosets h·c^l are separated within the bound for c^l
    let ball = Ball::new(&h3, &s, 5);
    let mut worst = 0u64;
    for x in ball.elements() {
        if h.contains(&h3, x) {
            continue;
        }
        let top = SubgroupDesc::induce(&h3, &[e(&[0, 0, 1])]).join(&h3, &h);
        if top.contains(&h3, x) {
            worst = worst.max(eval.depth(x)?.value.value().unwrap_or(u64::MAX));
        }
    }
    r.check("central coset depths bounded independently of length", worst <= coset_bound, format!("{} ≤ {}", worst, coset_bound));
    Ok(())
}

/// Central profile: `max {mnd(j)³ : ∥c^j∥ ≤ n}` for `n = 8, 16, …`.
pub fn central_profile(n_max: u32) -> Result<ProfileSeries<i64>> {
    let h3 = GroupCtx::<i64>::heisenberg();
    let lengths = tail_lengths(&h3, h3.generators(), n_max);
    let mut series = ProfileSeries {
        kind: ProfileKind::CentralProfile,
        rows: Vec::new(),
        meta: meta(&[("group", h3.family_name()), ("n_max", n_max.to_string()), ("mode", "congruence".into())]),
    };
    let mut n = 8;
    while n <= n_max {
        let best = lengths
            .iter()
            .filter(|(j, l)| **j > 0 && **l <= n)
            .map(|(j, _)| (central_depth(*j as u64), *j))
            .max_by_key(|&(d, j)| (d, std::cmp::Reverse(j)));
        if let Some((d, j)) = best {
            series.rows.push(ProfileRow {
                n,
                value: Depth::Value(d),
                mode: DepthMode::Congruence,
                witness: Some(Element::new(vec![0, 0, j])),
                subgroup: Vec::new(),
                certificate: None,
            });
        }
        n *= 2;
    }
    Ok(series)
}

fn prop62(r: &mut PresetReport, n_max: u32) -> Result<()> {
    let h3 = GroupCtx::<BigInt>::heisenberg();
    let trivial = SubgroupDesc::trivial(&h3);
    let oracle = DepthOracle::new(&h3, &trivial, OracleConfig::default())?;
    for j in 1..=6u64 {
        let d = oracle.frame_scan(&e(&[0, 0, j as i64]))?;
        r.check(
            format!("frame scan agrees with mnd(j)^3 at j={}", j),
            d.value == Depth::Value(central_depth(j)),
            format!("{} vs {}", d.value, central_depth(j)),
        );
    }
    let series = central_profile(n_max)?;
    for row in &series.rows {
        let v = row.value.value().unwrap() as f64;
        let ratio = v / (row.n as f64).ln().powi(3);
        r.check(
            format!("central depth / (log n)^3 within [1/64, 64] at n={}", row.n),
            (1.0 / 64.0..=64.0).contains(&ratio),
            format!("{} / {:.3} = {:.4}", v, (row.n as f64).ln().powi(3), ratio),
        );
    }
    Ok(())
}

/// Sample radii for the integer Farb audit.
pub const COR12_SAMPLES: [u64; 8] = [2, 10, 100, 1_000, 10_000, 100_000, 500_000, 1_000_000];

fn cor12(r: &mut PresetReport) -> Result<()> {
    let z = GroupCtx::<BigInt>::free_abelian(1)?;
    let bfs = farb_profile(&z, &SubgroupDesc::trivial(&z), z.generators(), 12, 1024)?;
    let agree = bfs.rows.iter().all(|row| row.value == Depth::Value(farb_integers(row.n as u64)));
    r.check("arithmetic Farb agrees with enumeration for n ≤ 12", agree, "");
    let z2 = GroupCtx::<BigInt>::free_abelian(2)?;
    let b = SubgroupDesc::induce(&z2, &[e(&[1, 0])]);
    let bfs2 = farb_profile(&z2, &b, z2.generators(), 8, 1024)?;
    let agree2 = bfs2.rows.iter().all(|row| row.value == Depth::Value(farb_integers(row.n as u64)));
    r.check("Farb of (Z^2, <e1>) matches the integer profile for n ≤ 8", agree2, "");
    for n in COR12_SAMPLES {
        let f = farb_integers(n) as f64;
        let ratio = f / (n as f64).ln();
        r.check(
            format!("Farb(n)/log n within [1/6, 6] at n={}", n),
            (1.0 / 6.0..=6.0).contains(&ratio),
            format!("{} / {:.3} = {:.4}", f, (n as f64).ln(), ratio),
        );
    }
    Ok(())
}

fn dist_check(r: &mut PresetReport) -> Result<()> {
    let h3 = GroupCtx::<i64>::heisenberg();
    let lengths = tail_lengths(&h3, h3.generators(), 32);
    for j in [4i64, 9, 16, 36, 64] {
        let len = lengths.get(&j).copied();
        let ratio = len.map(|l| l as f64 / (j as f64).sqrt());
        r.check(
            format!("|c^{}| / sqrt({}) within [1/8, 8]", j, j),
            ratio.map_or(false, |q| (0.125..=8.0).contains(&q)),
            format!("{:?}", len),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farb_integer_examples() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let s = farb_profile(&z, &SubgroupDesc::trivial(&z), z.generators(), 12, 1024).unwrap();
        let values: Vec<u64> = s.rows.iter().map(|r| r.value.value().unwrap()).collect();
        assert_eq!(values, vec![2, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 5]);
        let brute: Vec<u64> = (1..=12u64).map(farb_integers).collect();
        assert_eq!(values, brute);
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let b = SubgroupDesc::induce(&z2, &[e(&[1, 0])]);
        let s = farb_profile(&z2, &b, z2.generators(), 6, 1024).unwrap();
        assert_eq!(s.rows[5].value, Depth::Value(4));
        assert!(farb_profile(&z, &SubgroupDesc::trivial(&z), z.generators(), 0, 10).unwrap().rows.is_empty());
    }

    #[test]
    fn sub_integer_examples() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let s = sub_profile(&z, z.generators(), 5, 1024).unwrap();
        let values: Vec<u64> = s.rows.iter().map(|r| r.value.value().unwrap()).collect();
        assert_eq!(values[0], 2);
        assert_eq!(values[2], 3);
        assert_eq!(values[4], 5);
    }

    #[test]
    fn lower_bound_examples() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let rows = lower_bound_family(LowerBoundKind::RfLcm, &z, &e(&[1]), &[5], 1024).unwrap();
        assert_eq!(rows[0].element, e(&[12]));
        assert_eq!(rows[0].depth.value, Depth::Value(5));
        let rows = lower_bound_family(LowerBoundKind::SubPower, &z, &e(&[1]), &[7], 1024).unwrap();
        assert!(rows[0].holds && rows[0].depth.value == Depth::Value(7));
        let h3 = GroupCtx::<BigInt>::heisenberg();
        let rows = lower_bound_family(LowerBoundKind::SubPower, &h3, &e(&[1, 0, 0]), &[2], 64).unwrap();
        assert_eq!(rows[0].depth.value, Depth::Value(2));
        assert!(lower_bound_family(LowerBoundKind::RfLcm, &z, &e(&[0]), &[5], 10).is_err());
    }

    #[test]
    fn scaling_examples() {
        let pts: Vec<(f64, f64)> = (2..20).map(|n| (n as f64, (n * n) as f64)).collect();
        assert!((scaling_report(&pts, ScalingModel::PolyInN).unwrap().slope - 2.0).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = (2..20).map(|n| (n as f64, 7.0)).collect();
        assert!(scaling_report(&flat, ScalingModel::PolyInN).unwrap().slope.abs() < 1e-12);
        assert!(scaling_report(&pts[..3], ScalingModel::PolyInN).is_err());
        let farb: Vec<(f64, f64)> = (1..=6).map(|k| 10f64.powi(k)).map(|n| (n, farb_integers(n as u64) as f64)).collect();
        let s = scaling_report(&farb, ScalingModel::PolyInLogN).unwrap().slope;
        assert!((0.5..=2.0).contains(&s), "slope {}", s);
    }

    #[test]
    fn csv_round_trip() {
        let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
        let s = farb_profile(&z, &SubgroupDesc::trivial(&z), z.generators(), 4, 1024).unwrap();
        let text = s.to_csv().unwrap();
        let back = parse_csv(&text).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back[3].value, Depth::Value(3));
        assert_eq!(back[3].witness, "[2]");
    }
}
