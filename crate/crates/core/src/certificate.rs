//! Depth certificates: a finite quotient realized inside a congruence frame
//! together with the recorded images of `g` and of `H`'s generators.

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::{subgroup_index, subgroup_order, FiniteFrame};
use crate::group::{Element, GroupCtx};
use crate::pc;
use crate::scalar::Int;
use crate::subgroup::SubgroupDesc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    /// `(ℤ/m)^d / H̄` for abelian `G`.
    AbelianModulus,
    /// The full frame `F(G, m)`.
    CongruenceLevel,
    /// `F(G, m) / N̄` for a normal subgroup `N̄` of the frame.
    Refined,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::AbelianModulus => "abelian_modulus",
            CertificateKind::CongruenceLevel => "congruence_level",
            CertificateKind::Refined => "refined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "abelian_modulus" => Some(CertificateKind::AbelianModulus),
            "congruence_level" => Some(CertificateKind::CongruenceLevel),
            "refined" => Some(CertificateKind::Refined),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthCertificate {
    pub kind: CertificateKind,
    pub level: i64,
    /// Generators of `N̄` in full-frame coordinates (refined only).
    pub normal_subgroup: Vec<Vec<i64>>,
    pub quotient_order: BigUint,
    pub g_image: Vec<i64>,
    pub h_images: Vec<Vec<i64>>,
}

fn h_generators<T: Int>(h: &SubgroupDesc<T>) -> Vec<Element<T>> {
    h.induced_seq()
}

impl DepthCertificate {
    /// Builds a certificate, recording images and the realized order.
    pub fn build<T: Int>(
        g: &GroupCtx<T>,
        h: &SubgroupDesc<T>,
        x: &Element<T>,
        kind: CertificateKind,
        level: i64,
        normal_subgroup: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let f = FiniteFrame::new(g, level)?;
        let mut cert = DepthCertificate {
            kind,
            level,
            normal_subgroup,
            quotient_order: BigUint::from(0u32),
            g_image: f.project(x),
            h_images: h_generators(h).iter().map(|y| f.project(y)).collect(),
        };
        cert.quotient_order = realized_order(&f, &cert)?;
        Ok(cert)
    }

    pub fn to_json(&self) -> Value {
        let vec = |v: &[i64]| Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect());
        json!({
            "kind": self.kind.name(),
            "level": self.level.to_string(),
            "normal_subgroup": self.normal_subgroup.iter().map(|v| vec(v)).collect::<Vec<_>>(),
            "quotient_order": self.quotient_order.to_string(),
            "witness_check": {
                "g": vec(&self.g_image),
                "h": self.h_images.iter().map(|v| vec(v)).collect::<Vec<_>>(),
            },
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("certificate: {}", what));
        let int = |x: &Value| -> Result<i64> {
            x.as_str().and_then(|s| s.parse::<i64>().ok()).ok_or_else(|| bad("integers must be decimal strings"))
        };
        let vec = |x: &Value| -> Result<Vec<i64>> {
            x.as_array().ok_or_else(|| bad("expected an array"))?.iter().map(int).collect()
        };
        let vecs = |x: &Value| -> Result<Vec<Vec<i64>>> {
            x.as_array().ok_or_else(|| bad("expected an array of arrays"))?.iter().map(vec).collect()
        };
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .and_then(CertificateKind::parse)
            .ok_or_else(|| bad("unknown kind"))?;
        let level = int(v.get("level").ok_or_else(|| bad("missing level"))?)?;
        let normal_subgroup = match v.get("normal_subgroup") {
            Some(x) => vecs(x)?,
            None => Vec::new(),
        };
        let quotient_order = v
            .get("quotient_order")
            .and_then(Value::as_str)
            .and_then(|s| s.parse::<BigUint>().ok())
            .ok_or_else(|| bad("quotient_order must be a decimal string"))?;
        let w = v.get("witness_check").ok_or_else(|| bad("missing witness_check"))?;
        let g_image = vec(w.get("g").ok_or_else(|| bad("missing witness_check.g"))?)?;
        let h_images = vecs(w.get("h").ok_or_else(|| bad("missing witness_check.h"))?)?;
        Ok(DepthCertificate { kind, level, normal_subgroup, quotient_order, g_image, h_images })
    }
}

/// `[F : K]` for the kernel `K` the certificate describes.
fn realized_order(f: &FiniteFrame, cert: &DepthCertificate) -> Result<BigUint> {
    if cert.kind == CertificateKind::CongruenceLevel {
        return Ok(f.order());
    }
    Ok(f.order() / subgroup_order(f, &kernel(f, cert)))
}

fn kernel(f: &FiniteFrame, cert: &DepthCertificate) -> pc::Echelon<i64> {
    match cert.kind {
        CertificateKind::AbelianModulus => pc::induce(f, &cert.h_images),
        CertificateKind::CongruenceLevel => pc::Echelon::trivial(f.keep()),
        CertificateKind::Refined => pc::induce(f, &cert.normal_subgroup),
    }
}

/// Outcome of [`validate_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    pub reason: Option<String>,
}

impl Validation {
    fn ok() -> Self {
        Validation { valid: true, reason: None }
    }

    fn fail(reason: impl Into<String>) -> Self {
        Validation { valid: false, reason: Some(reason.into()) }
    }
}

/// Re-projects `g` and `H` into the certified quotient and checks
/// separation, the recorded images and the stated order.
pub fn validate_certificate<T: Int>(
    g: &GroupCtx<T>,
    h: &SubgroupDesc<T>,
    x: &Element<T>,
    cert: &DepthCertificate,
) -> Validation {
    let f = match FiniteFrame::new(g, cert.level) {
        Ok(f) => f,
        Err(e) => return Validation::fail(format!("frame: {}", e)),
    };
    if x.len() != g.hirsch() {
        return Validation::fail("element has the wrong length");
    }
    let in_range = |v: &Vec<i64>| v.len() == f.keep() && v.iter().all(|c| (0..cert.level).contains(c));
    if !cert.normal_subgroup.iter().all(in_range) {
        return Validation::fail("malformed normal subgroup");
    }
    let g_image = f.project(x);
    let h_images: Vec<Vec<i64>> = h_generators(h).iter().map(|y| f.project(y)).collect();
    let k = match cert.kind {
        CertificateKind::AbelianModulus => {
            if !g.is_abelian() {
                return Validation::fail("abelian modulus certificate for a nonabelian group");
            }
            pc::induce(&f, &h_images)
        }
        CertificateKind::CongruenceLevel => pc::Echelon::trivial(f.keep()),
        CertificateKind::Refined => {
            let n = pc::induce(&f, &cert.normal_subgroup);
            if !pc::is_normalized_by(&f, &n, &f.generators()) {
                return Validation::fail("not normal");
            }
            n
        }
    };
    let mut image = k.clone();
    pc::extend(&f, &mut image, &h_images);
    if pc::contains(&f, &image, &g_image) {
        return Validation::fail("image of element lies in image of subgroup");
    }
    if g_image != cert.g_image || h_images != cert.h_images {
        return Validation::fail("witness mismatch");
    }
    let order = if cert.kind == CertificateKind::CongruenceLevel {
        f.order()
    } else {
        BigUint::from(subgroup_index(&f, &k))
    };
    if order != cert.quotient_order {
        return Validation::fail("order mismatch");
    }
    Validation::ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn e(v: &[i64]) -> Element<BigInt> {
        Element::from_i64(v)
    }

    #[test]
    fn abelian_example_round_trip() {
        let z2 = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let h = SubgroupDesc::induce(&z2, &[e(&[1, 2]), e(&[2, 0])]);
        let x = e(&[0, 2]);
        let cert = DepthCertificate::build(&z2, &h, &x, CertificateKind::AbelianModulus, 4, vec![]).unwrap();
        assert_eq!(cert.quotient_order, BigUint::from(4u32));
        assert!(validate_certificate(&z2, &h, &x, &cert).valid);
        let back = DepthCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        let bad = DepthCertificate::build(&z2, &h, &x, CertificateKind::AbelianModulus, 2, vec![]).unwrap();
        assert!(!validate_certificate(&z2, &h, &x, &bad).valid);
    }

    #[test]
    fn heisenberg_tampering() {
        let h3 = GroupCtx::<BigInt>::heisenberg();
        let h = SubgroupDesc::induce(&h3, &[e(&[0, 1, 4]), e(&[0, 2, 0])]);
        let x = e(&[0, 0, 4]);
        let cert = DepthCertificate::build(&h3, &h, &x, CertificateKind::CongruenceLevel, 8, vec![]).unwrap();
        assert_eq!(cert.quotient_order, BigUint::from(512u32));
        assert!(validate_certificate(&h3, &h, &x, &cert).valid);
        let mut lowered = cert.clone();
        lowered.level = 4;
        assert!(!validate_certificate(&h3, &h, &x, &lowered).valid);
        let mut tampered = cert.clone();
        tampered.quotient_order = BigUint::from(256u32);
        let v = validate_certificate(&h3, &h, &x, &tampered);
        assert_eq!(v.reason.as_deref(), Some("order mismatch"));
        let mut refined = cert.clone();
        refined.kind = CertificateKind::Refined;
        refined.normal_subgroup = vec![vec![1, 0, 0]];
        assert_eq!(validate_certificate(&h3, &h, &x, &refined).reason.as_deref(), Some("not normal"));
        let malformed = json!({"kind": "refined", "level": 8});
        assert!(DepthCertificate::from_json(&malformed).is_err());
    }
}
