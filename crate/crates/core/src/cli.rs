//! Command-line front end: group specs, element parsing and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::certificate::validate_certificate;
use crate::error::{Error, Result};
use crate::frame::DEFAULT_CAP;
use crate::group::{Element, Family, GroupCtx};
use crate::lattice::eff_bezout;
use crate::metric::{subgroup_norm, Bounded};
use crate::oracle::{self, DEFAULT_BUDGET};
use crate::profiler::{farb_profile, preset_experiment, sub_profile, PresetParams, PresetReport, SUBGROUP_CAP};
use crate::separability::separate;
use crate::subgroup::SubgroupDesc;

pub const DEFAULT_RADIUS: u32 = 10;

/// JSON group description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: SpecFamily,
    pub generating_set: Option<Vec<GenSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecFamily {
    FreeAbelian { rank: usize },
    Unitriangular { degree: usize },
    /// Relations with 1-based `j > i` and full-length tails.
    Presentation { hirsch: usize, relations: Vec<(usize, usize, Vec<BigInt>)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenSpec {
    Coords(Vec<BigInt>),
    Word(String),
}

fn field_err(field: &str, what: &str) -> Error {
    Error::Parse(format!("field \"{}\": {}", field, what))
}

fn json_int(v: &Value, field: &str) -> Result<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| field_err(field, "expected an integer")),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integral number")),
        _ => Err(field_err(field, "expected an integer")),
    }
}

fn json_usize(v: Option<&Value>, field: &str) -> Result<usize> {
    let v = v.ok_or_else(|| field_err(field, "missing"))?;
    usize::try_from(json_int(v, field)?).map_err(|_| field_err(field, "expected a nonnegative integer"))
}

fn json_ints(v: &Value, field: &str) -> Result<Vec<BigInt>> {
    v.as_array().ok_or_else(|| field_err(field, "expected an array"))?.iter().map(|x| json_int(x, field)).collect()
}

fn str_ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("group spec: {}", e)))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| field_err("$", "expected an object"))?;
        let family = match obj.get("family").and_then(Value::as_str) {
            Some("free_abelian") => SpecFamily::FreeAbelian { rank: json_usize(obj.get("rank"), "rank")? },
            Some("unitriangular") => SpecFamily::Unitriangular { degree: json_usize(obj.get("degree"), "degree")? },
            Some("presentation") => {
                let p = obj.get("presentation").ok_or_else(|| field_err("presentation", "missing"))?;
                let hirsch = json_usize(p.get("hirsch"), "presentation.hirsch")?;
                let rels = match p.get("relations") {
                    None => Vec::new(),
                    Some(r) => r
                        .as_array()
                        .ok_or_else(|| field_err("presentation.relations", "expected an array"))?
                        .iter()
                        .map(|rel| {
                            let j = json_usize(rel.get("j"), "presentation.relations.j")?;
                            let i = json_usize(rel.get("i"), "presentation.relations.i")?;
                            let tail = rel.get("tail").ok_or_else(|| field_err("presentation.relations.tail", "missing"))?;
                            Ok((j, i, json_ints(tail, "presentation.relations.tail")?))
                        })
                        .collect::<Result<Vec<_>>>()?,
                };
                SpecFamily::Presentation { hirsch, relations: rels }
            }
            Some(other) => return Err(field_err("family", &format!("unknown family {:?}", other))),
            None => return Err(field_err("family", "missing")),
        };
        let generating_set = match obj.get("generating_set") {
            None | Some(Value::Null) => None,
            Some(Value::Array(items)) => Some(
                items
                    .iter()
                    .map(|it| match it {
                        Value::String(s) => Ok(GenSpec::Word(s.clone())),
                        Value::Array(_) => Ok(GenSpec::Coords(json_ints(it, "generating_set")?)),
                        _ => Err(field_err("generating_set", "expected coordinate vectors or words")),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(_) => return Err(field_err("generating_set", "expected an array")),
        };
        Ok(GroupSpec { family, generating_set })
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        match &self.family {
            SpecFamily::FreeAbelian { rank } => {
                m.insert("family".into(), json!("free_abelian"));
                m.insert("rank".into(), json!(rank.to_string()));
            }
            SpecFamily::Unitriangular { degree } => {
                m.insert("family".into(), json!("unitriangular"));
                m.insert("degree".into(), json!(degree.to_string()));
            }
            SpecFamily::Presentation { hirsch, relations } => {
                m.insert("family".into(), json!("presentation"));
                let rels: Vec<Value> = relations
                    .iter()
                    .map(|(j, i, t)| json!({"j": j.to_string(), "i": i.to_string(), "tail": str_ints(t)}))
                    .collect();
                m.insert("presentation".into(), json!({"hirsch": hirsch.to_string(), "relations": rels}));
            }
        }
        if let Some(gens) = &self.generating_set {
            let items: Vec<Value> = gens
                .iter()
                .map(|g| match g {
                    GenSpec::Coords(c) => str_ints(c),
                    GenSpec::Word(w) => json!(w),
                })
                .collect();
            m.insert("generating_set".into(), Value::Array(items));
        }
        Value::Object(m)
    }

    /// Builds and validates the group.
    pub fn build(&self) -> Result<GroupCtx<BigInt>> {
        let g = match &self.family {
            SpecFamily::FreeAbelian { rank } => {
                if *rank == 0 {
                    return Err(field_err("rank", "must be positive"));
                }
                GroupCtx::free_abelian(*rank)?
            }
            SpecFamily::Unitriangular { degree } => GroupCtx::unitriangular(*degree)?,
            SpecFamily::Presentation { hirsch, relations } => {
                let mut tails = Vec::new();
                for (j, i, t) in relations {
                    if j == i {
                        return Err(Error::NotTorsionFree(format!("power relation on x{}", j)));
                    }
                    if *i == 0 || *j == 0 {
                        return Err(field_err("presentation.relations", "indices are 1-based"));
                    }
                    tails.push((j - 1, i - 1, t.clone()));
                }
                GroupCtx::presentation(*hirsch, &tails)?
            }
        };
        match &self.generating_set {
            None => Ok(g),
            Some(gens) => {
                let elems = gens
                    .iter()
                    .map(|s| match s {
                        GenSpec::Coords(c) => {
                            let e = Element::new(c.clone());
                            g.check(&e)?;
                            Ok(e)
                        }
                        GenSpec::Word(w) => parse_element(&g, w),
                    })
                    .collect::<Result<Vec<_>>>()?;
                g.with_generating_set(elems)
            }
        }
    }
}

/// Resolves `--group`: a shortcut (`z`, `z2`, `ut3`, `h3`, `ut4`), inline
/// JSON, or a path to a JSON file.
pub fn resolve_group(arg: &str) -> Result<GroupSpec> {
    let a = arg.trim();
    let shortcut = |family| Ok(GroupSpec { family, generating_set: None });
    match a {
        "h3" | "ut3" | "heisenberg" => return shortcut(SpecFamily::Unitriangular { degree: 3 }),
        "ut4" => return shortcut(SpecFamily::Unitriangular { degree: 4 }),
        "z" => return shortcut(SpecFamily::FreeAbelian { rank: 1 }),
        _ => {}
    }
    if let Some(r) = a.strip_prefix('z').and_then(|r| r.parse::<usize>().ok()) {
        return shortcut(SpecFamily::FreeAbelian { rank: r });
    }
    if let Some(d) = a.strip_prefix("ut").and_then(|r| r.parse::<usize>().ok()) {
        return shortcut(SpecFamily::Unitriangular { degree: d });
    }
    if a.starts_with('{') {
        return GroupSpec::parse(a);
    }
    let text = std::fs::read_to_string(a).map_err(|e| Error::Parse(format!("group {:?}: {}", a, e)))?;
    GroupSpec::parse(&text)
}

/// Name of generator `i` in words: `a, b, …` or `x1, x2, …` past 26.
fn generator_name(i: usize, count: usize) -> String {
    if count <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Parses `[x,y,z]` coordinates or a word such as `a b a^-1 b^-1` in the
/// group's generating set.
pub fn parse_element(g: &GroupCtx<BigInt>, text: &str) -> Result<Element<BigInt>> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| Error::Parse(format!("unterminated vector {:?}", t)))?;
        let coords = inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coordinate {:?}", s.trim()))))
            .collect::<Result<Vec<_>>>()?;
        let e = Element::new(coords);
        g.check(&e)?;
        return Ok(e);
    }
    let gens = g.generators();
    let mut acc = g.identity();
    for tok in t.split_whitespace() {
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => (n, e.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad exponent in {:?}", tok)))?),
            None => (tok, BigInt::from(1)),
        };
        let i = (0..gens.len())
            .find(|&i| generator_name(i, gens.len()) == name)
            .ok_or_else(|| Error::Parse(format!("unknown generator {:?}", name)))?;
        acc = g.mul(&acc, &g.power(&gens[i], &exp));
    }
    Ok(acc)
}

/// Splits a comma-separated list at top level (commas inside brackets
/// belong to vectors).
pub fn parse_subgroup(g: &GroupCtx<BigInt>, text: &str) -> Result<SubgroupDesc<BigInt>> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    items.push(cur);
    let gens = items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_element(g, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgroupDesc::induce(g, &gens))
}

#[derive(Debug, Parser)]
#[command(name = "nilsep", version, about = "Separability depth in torsion-free nilpotent groups")]
pub struct Cli {
    /// Emit errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective Bezout coefficients.
    Bezout {
        #[arg(required = true, allow_negative_numbers = true)]
        values: Vec<BigInt>,
    },
    /// Depth of an element relative to a subgroup.
    Depth(TargetArgs),
    /// Separating certificate for an element outside a subgroup.
    Separate(TargetArgs),
    /// Farb profile as CSV.
    Farb {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "")]
        subgroup: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        nmax: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sub profile as CSV.
    Sub {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        nmax: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Preset experiments.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        p: Option<u64>,
        /// Largest radius for the central profile.
        #[arg(long, default_value_t = 64)]
        nmax: u32,
    },
    /// Subgroup norm.
    Norm {
        #[arg(long)]
        group: String,
        #[arg(long)]
        subgroup: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: u32,
    },
}

#[derive(Debug, clap::Args)]
pub struct TargetArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "")]
    pub subgroup: String,
    #[arg(long, allow_hyphen_values = true)]
    pub element: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    #[value(name = "ex6.3")]
    Ex63,
    #[value(name = "ex6.4")]
    Ex64,
    #[value(name = "prop6.1")]
    Prop61,
    #[value(name = "prop6.2")]
    Prop62,
    #[value(name = "cor1.2")]
    Cor12,
    #[value(name = "dist_check")]
    DistCheck,
    #[value(name = "all")]
    All,
}

/// Result of a command: stdout text and exit status.
pub struct Outcome {
    pub stdout: String,
    pub status: i32,
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn ok(v: Value) -> Outcome {
    Outcome { stdout: pretty(&v), status: 0 }
}

fn target(args: &TargetArgs) -> Result<(GroupCtx<BigInt>, SubgroupDesc<BigInt>, Element<BigInt>, Value)> {
    let spec = resolve_group(&args.group)?;
    let g = spec.build()?;
    let h = parse_subgroup(&g, &args.subgroup)?;
    let x = parse_element(&g, &args.element)?;
    let meta = json!({
        "group": spec.to_json(),
        "subgroup": h.induced_seq().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "element": x.to_string(),
        "budget": args.budget.to_string(),
        "frame_cap": DEFAULT_CAP.to_string(),
    });
    Ok((g, h, x, meta))
}

fn worker_count() -> Option<usize> {
    std::env::var("NILSEP_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0)
}

/// Preset runs for a suite; `p` overrides the default primes.
pub fn suite_runs(suite: Suite, p: Option<u64>, n_max: u32) -> Vec<(&'static str, PresetParams)> {
    let with = |p| PresetParams { p, n_max };
    let primes = |d: &[u64]| -> Vec<u64> { p.map_or_else(|| d.to_vec(), |p| vec![p]) };
    let mut runs = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Ex63) {
        runs.extend(primes(&[2, 3, 5]).into_iter().map(|p| ("ex6.3", with(p))));
    }
    if want(Suite::Ex64) {
        runs.extend(primes(&[2]).into_iter().map(|p| ("ex6.4", with(p))));
    }
    if want(Suite::Prop61) {
        runs.extend(primes(&[2]).into_iter().map(|p| ("prop6.1", with(p))));
    }
    if want(Suite::Prop62) {
        runs.push(("prop6.2", with(2)));
    }
    if want(Suite::Cor12) {
        runs.push(("cor1.2", with(2)));
    }
    if want(Suite::DistCheck) {
        runs.push(("dist_check", with(2)));
    }
    runs
}

fn run_verify(suite: Suite, p: Option<u64>, n_max: u32) -> Result<Outcome> {
    if let Some(p) = p {
        if !crate::lattice::is_prime(p) || p > 7 {
            return Err(Error::Parse(format!("--p must be a prime at most 7, got {}", p)));
        }
    }
    let runs = suite_runs(suite, p, n_max);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Unsupported(format!("thread pool: {}", e)))?;
    let reports: Vec<Result<PresetReport>> = pool.install(|| {
        use rayon::prelude::*;
        runs.par_iter().map(|(name, params)| preset_experiment(name, *params)).collect()
    });
    let mut out = Vec::new();
    let mut passed = true;
    for ((name, params), r) in runs.iter().zip(reports) {
        let r = r?;
        passed &= r.passed();
        let mut v = r.to_json();
        v["params"] = json!({"p": params.p.to_string(), "nmax": params.n_max.to_string()});
        debug_assert_eq!(v["name"], json!(name));
        out.push(v);
    }
    let doc = json!({
        "suite": format!("{:?}", suite).to_lowercase(),
        "passed": passed,
        "meta": {"frame_cap": DEFAULT_CAP.to_string(), "budget": DEFAULT_BUDGET.to_string()},
        "reports": out,
    });
    Ok(Outcome { stdout: pretty(&doc), status: if passed { 0 } else { 1 } })
}

fn write_csv(out: &Option<PathBuf>, csv: &str, bundle: Value) -> Result<Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Error::Parse(format!("writing {}: {}", path.display(), e)))?;
            Ok(ok(bundle))
        }
        None => Ok(Outcome { stdout: csv.to_string(), status: 0 }),
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Bezout { values } => {
            let r = eff_bezout(values)?;
            let max = values.iter().map(|a| a.magnitude().clone()).max().unwrap_or_default();
            Ok(ok(json!({
                "input": str_ints(values),
                "gcd": r.gcd.to_string(),
                "coefficients": str_ints(&r.coeffs),
                "max_abs_input": max.to_string(),
                "verified": r.verify(values),
            })))
        }
        Command::Depth(args) => {
            let (g, h, x, meta) = target(args)?;
            let r = oracle::depth(&g, &h, &x, args.budget)?;
            Ok(ok(json!({
                "value": r.value.value().map(|v| v.to_string()),
                "exceeds": matches!(r.value, oracle::Depth::Exceeds(_)),
                "mode": r.mode.name(),
                "provably_exact": r.provably_exact,
                "certificate": r.witness.as_ref().map(|c| c.to_json()),
                "meta": meta,
            })))
        }
        Command::Separate(args) => {
            let (g, h, x, meta) = target(args)?;
            match separate(&g, &h, &x)? {
                Some(cert) => {
                    let v = validate_certificate(&g, &h, &x, &cert);
                    Ok(Outcome {
                        stdout: pretty(&json!({"certificate": cert.to_json(), "valid": v.valid, "meta": meta})),
                        status: if v.valid { 0 } else { 1 },
                    })
                }
                None => Ok(Outcome {
                    stdout: pretty(&json!({"certificate": null, "valid": false, "meta": meta})),
                    status: 1,
                }),
            }
        }
        Command::Farb { group, subgroup, nmax, budget, out } => {
            let spec = resolve_group(group)?;
            let g = spec.build()?;
            let h = parse_subgroup(&g, subgroup)?;
            let mut series = farb_profile(&g, &h, g.generators(), *nmax, *budget)?;
            series.meta.insert("frame_cap".into(), DEFAULT_CAP.to_string());
            write_csv(out, &series.to_csv()?, series.to_json())
        }
        Command::Sub { group, nmax, budget, out } => {
            let spec = resolve_group(group)?;
            let g = spec.build()?;
            let mut series = sub_profile(&g, g.generators(), *nmax, *budget)?;
            series.meta.insert("frame_cap".into(), DEFAULT_CAP.to_string());
            series.meta.insert("subgroup_cap".into(), SUBGROUP_CAP.to_string());
            write_csv(out, &series.to_csv()?, series.to_json())
        }
        Command::Verify { suite, p, nmax } => run_verify(*suite, *p, *nmax),
        Command::Norm { group, subgroup, radius } => {
            let spec = resolve_group(group)?;
            let g = spec.build()?;
            let h = parse_subgroup(&g, subgroup)?;
            let n = subgroup_norm(&g, &h, g.generators(), *radius);
            let (value, exceeds) = match n {
                Bounded::Exact(v) => (Some(v.to_string()), false),
                Bounded::Exceeds(_) => (None, true),
            };
            Ok(ok(json!({
                "norm": value,
                "exceeds": exceeds,
                "meta": {"group": spec.to_json(), "radius": radius.to_string()},
            })))
        }
    }
}

/// Exit status for an error: 2 for malformed input, 1 otherwise.
pub fn error_status(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Unsupported(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidRelation(_)
        | Error::Inconsistent(..)
        | Error::NotTorsionFree(_)
        | Error::InSubgroup
        | Error::Degenerate(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Unsupported(_) => "unsupported",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidRelation(_) => "invalid_relation",
        Error::Inconsistent(..) => "inconsistent",
        Error::NotTorsionFree(_) => "not_torsion_free",
        Error::InSubgroup => "in_subgroup",
        Error::Degenerate(_) => "degenerate",
        Error::CapExceeded { .. } => "cap_exceeded",
        _ => "error",
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I: IntoIterator<Item = String>>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let want_json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            if status == 0 {
                let _ = write!(stdout, "{}", e);
            } else if want_json {
                let _ = writeln!(stderr, "{}", json!({"error": "usage", "message": e.to_string().trim()}));
            } else {
                let _ = write!(stderr, "{}", e);
            }
            return status;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let _ = stdout.write_all(o.stdout.as_bytes());
            o.status
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(stderr, "{}", json!({"error": error_kind(&e), "message": e.to_string()}));
            } else {
                let _ = writeln!(stderr, "nilsep: {}", e);
            }
            error_status(&e)
        }
    }
}

/// Family of a built group as it appears in a spec.
pub fn spec_of(g: &GroupCtx<BigInt>) -> Option<GroupSpec> {
    let family = match g.family() {
        Family::FreeAbelian => SpecFamily::FreeAbelian { rank: g.hirsch() },
        Family::Unitriangular { degree, .. } => SpecFamily::Unitriangular { degree: *degree },
        Family::Presentation(_) => SpecFamily::Presentation {
            hirsch: g.hirsch(),
            relations: g.derived_presentation().into_iter().map(|(j, i, t)| (j + 1, i + 1, t)).collect(),
        },
        _ => return None,
    };
    Some(GroupSpec { family, generating_set: None })
}
