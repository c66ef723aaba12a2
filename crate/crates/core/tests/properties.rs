use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use nilsep::certificate::validate_certificate;
use nilsep::cli::GroupSpec;
use nilsep::group::{Element, GroupCtx};
use nilsep::lattice::{eff_bezout, generator_word, hnf, hnf_saturate, min_nondivisor, IntLattice};
use nilsep::metric::{subgroup_norm, Ball, Bounded};
use nilsep::oracle::{abelian_depth, abelian_frame_scan, Depth, DepthOracle, OracleConfig};
use nilsep::profiler::{farb_profile, parse_csv, sub_profile};
use nilsep::separability::separate;
use nilsep::subgroup::{gamma2_generators, isolator, maximal_central_series, SubgroupDesc};

fn e(v: &[i64]) -> Element<BigInt> {
    Element::from_i64(v)
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn h3_elem() -> impl Strategy<Value = Element<BigInt>> {
    prop::collection::vec(-6i64..=6, 3).prop_map(|v| e(&v))
}

fn u4_elem() -> impl Strategy<Value = Element<BigInt>> {
    prop::collection::vec(-5i64..=5, 6).prop_map(|v| e(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn bezout_invariants(a in prop::collection::vec(-1_000_000i64..=1_000_000, 1..=8)) {
        prop_assume!(a.iter().any(|&x| x != 0));
        let r = eff_bezout(&big(&a)).unwrap();
        prop_assert!(r.verify(&big(&a)));
        let g = a.iter().fold(0, |acc, &x| gcd(acc, x));
        prop_assert_eq!(r.gcd, BigInt::from(g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn generator_word_is_short_and_exact(n in 1i64..=40, s in prop::collection::vec(1i64..=40, 1..=5), signs in prop::collection::vec(any::<bool>(), 5)) {
        let s: Vec<i64> = s.iter().zip(&signs).map(|(&x, &neg)| { let x = (x - 1) % n + 1; if neg { -x } else { x } }).collect();
        let w = generator_word(&big(&s), &BigInt::from(n)).unwrap();
        prop_assert!(w.len() as i64 <= n * n);
        let total: BigInt = w.iter().sum();
        prop_assert_eq!(total, BigInt::from(s.iter().fold(0, |acc, &x| gcd(acc, x))));
    }

    #[test]
    fn nondivisor_envelope(g in 1i64..=1_000_000_000) {
        let m = min_nondivisor(&BigInt::from(g)).unwrap().to_i64().unwrap();
        prop_assert!(g % m != 0 && (2..m).all(|k| g % k == 0));
        prop_assert!((m as f64) <= 2.0 * (g as f64).log2() + 2.0);
    }

    #[test]
    fn hnf_and_saturation_are_idempotent(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 1..=3)) {
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| big(r)).collect();
        let h1 = hnf(&rows);
        prop_assert_eq!(hnf(&h1), h1.clone());
        let sat = hnf_saturate(&IntLattice::new(rows.clone(), 3).unwrap()).unwrap();
        let again = hnf_saturate(&sat.saturation).unwrap();
        prop_assert_eq!(hnf(&again.saturation.basis), hnf(&sat.saturation.basis));
        for r in &rows {
            prop_assert!(sat.saturation.contains(r));
        }
    }

    #[test]
    fn associativity_h3(a in h3_elem(), b in h3_elem(), c in h3_elem()) {
        let g = GroupCtx::<BigInt>::heisenberg();
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert!(g.mul(&a, &g.inverse(&a)).is_identity());
    }

    #[test]
    fn associativity_u4_collection(a in u4_elem(), b in u4_elem(), c in u4_elem()) {
        let ut = GroupCtx::<BigInt>::unitriangular(4).unwrap();
        let p = GroupCtx::<BigInt>::presentation(6, &ut.derived_presentation()).unwrap();
        prop_assert_eq!(p.mul(&p.mul(&a, &b), &c), p.mul(&a, &p.mul(&b, &c)));
        prop_assert_eq!(ut.mul(&ut.mul(&a, &b), &c), ut.mul(&a, &ut.mul(&b, &c)));
        // Mal'cev exponents transport collection to matrix arithmetic
        let via = ut.from_malcev(&p.mul(&a, &b).coords);
        prop_assert_eq!(via, ut.mul(&ut.from_malcev(&a.coords), &ut.from_malcev(&b.coords)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn induce_is_canonical_under_shuffles(gens in prop::collection::vec(h3_elem(), 1..=4), seed in any::<u64>()) {
        let g = GroupCtx::<BigInt>::heisenberg();
        let mut shuffled = gens.clone();
        let n = shuffled.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = SubgroupDesc::induce(&g, &gens);
        let b = SubgroupDesc::induce(&g, &shuffled);
        prop_assert_eq!(a.induced_seq(), b.induced_seq());
        for x in &gens {
            prop_assert!(a.contains(&g, x));
        }
    }

    #[test]
    fn abelian_depth_matches_frame_scan(gens in prop::collection::vec(prop::collection::vec(-12i64..=12, 2), 1..=2), x in prop::collection::vec(-12i64..=12, 2)) {
        let g = GroupCtx::<BigInt>::free_abelian(2).unwrap();
        let gens: Vec<Element<BigInt>> = gens.iter().map(|v| e(v)).collect();
        let h = SubgroupDesc::induce(&g, &gens);
        let x = e(&x);
        prop_assume!(!h.contains(&g, &x));
        let exact = abelian_depth(&g, &h, &x, 1024).unwrap();
        let scan = abelian_frame_scan(&g, &h, &x, 1024, 4096).unwrap();
        prop_assert_eq!(exact.value, scan);
        if let Some(c) = &exact.witness {
            prop_assert!(validate_certificate(&g, &h, &x, c).valid);
        }
    }

    #[test]
    fn spec_round_trip(rank in 1usize..=6, degree in 3usize..=4, gens in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 0..=3)) {
        for text in [
            format!(r#"{{"family":"free_abelian","rank":{}}}"#, rank),
            format!(r#"{{"family":"unitriangular","degree":"{}"}}"#, degree),
            format!(
                r#"{{"family":"unitriangular","degree":3,"generating_set":{}}}"#,
                serde_json::to_string(&gens).unwrap()
            ),
        ] {
            let spec = GroupSpec::parse(&text).unwrap();
            let emitted = serde_json::to_string(&spec.to_json()).unwrap();
            let again = GroupSpec::parse(&emitted).unwrap();
            prop_assert_eq!(&spec, &again);
            prop_assert_eq!(emitted, serde_json::to_string(&again.to_json()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificates_validate_and_dominate(gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..=2), x in h3_elem()) {
        let g = GroupCtx::<BigInt>::heisenberg();
        let gens: Vec<Element<BigInt>> = gens.iter().map(|v| e(v)).collect();
        let h = SubgroupDesc::induce(&g, &gens);
        prop_assume!(!h.contains(&g, &x));
        let cert = separate(&g, &h, &x).unwrap().expect("desk instances separate");
        prop_assert!(validate_certificate(&g, &h, &x, &cert).valid);
        let d = DepthOracle::new(&g, &h, OracleConfig::default()).unwrap().depth(&x).unwrap();
        match d.value {
            Depth::Value(v) => prop_assert!(cert.quotient_order >= v.into()),
            Depth::Exceeds(b) => prop_assert!(cert.quotient_order > b.into()),
        }
        if let Some(w) = &d.witness {
            prop_assert!(validate_certificate(&g, &h, &x, w).valid);
        }
    }

    #[test]
    fn isolator_is_idempotent(gens in prop::collection::vec(h3_elem(), 1..=3)) {
        let g = GroupCtx::<BigInt>::heisenberg();
        let h = SubgroupDesc::induce(&g, &gens);
        let r = isolator(&g, &h);
        prop_assert!(r.contains_subgroup(&g, &h));
        prop_assert!(isolator(&g, &r).same(&r));
        if r.hirsch() == h.hirsch() {
            // finite index: {k : y^k ∈ H} = mℤ with m ≠ 0, so y^K ∈ H for a
            // K divisible by every small prime power
            let k = (1..=5000u64).fold(BigInt::one(), |acc, j| num_integer::lcm(acc, BigInt::from(j)));
            for y in r.induced_seq() {
                prop_assert!(h.contains(&g, &g.power(&y, &k)));
            }
        }
    }

    #[test]
    fn gamma2_generates_the_derived_subgroup(gens in prop::collection::vec(u4_elem(), 1..=3)) {
        let g = GroupCtx::<BigInt>::unitriangular(4).unwrap();
        let out = gamma2_generators(&g, &gens, g.class());
        // independent closure: commutators of generators, then of results with generators
        let mut layer: Vec<Element<BigInt>> = Vec::new();
        for a in &gens {
            for b in &gens {
                layer.push(g.commutator(a, b));
            }
        }
        let mut all = layer.clone();
        for _ in 1..g.class() {
            let mut next = Vec::new();
            for c in &layer {
                for a in &gens {
                    next.push(g.commutator(c, a));
                    next.push(g.commutator(a, c));
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        let expected = SubgroupDesc::induce(&g, &all);
        let got = SubgroupDesc::induce(&g, &out);
        prop_assert!(got.same(&expected));
    }
}

#[test]
fn central_series_is_central_with_cyclic_factors() {
    for g in [GroupCtx::<BigInt>::heisenberg(), GroupCtx::<BigInt>::unitriangular(4).unwrap()] {
        for adapted in [false, true] {
            let s = maximal_central_series(&g, adapted);
            assert!(s.verify(&g));
            assert_eq!(s.len(), g.hirsch() + 1);
            for (i, t) in s.terms.iter().enumerate() {
                assert_eq!(t.hirsch(), g.hirsch() - i);
                // [G, N_i] ⊆ N_{i+1}
                if i + 1 < s.terms.len() {
                    for x in g.basis() {
                        for y in t.induced_seq() {
                            assert!(s.terms[i + 1].contains(&g, &g.commutator(&x, &y)));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn heisenberg_ball_growth_is_quartic() {
    let g = GroupCtx::<i64>::heisenberg();
    let ball = Ball::new(&g, g.generators(), 16);
    for r in 4..=8 {
        let q = ball.size_at(2 * r) as f64 / ball.size_at(r) as f64;
        assert!((8.0..=32.0).contains(&q), "|B_{}|/|B_{}| = {}", 2 * r, r, q);
    }
}

#[test]
fn norms_are_comparable_across_generating_sets() {
    // S2 = {a, b}; c = [a, b] has S2-length 4, and a, b have S1-length 1
    let g = GroupCtx::<BigInt>::heisenberg();
    let s1 = g.generators().to_vec();
    let s2 = vec![e(&[1, 0, 0]), e(&[0, 1, 0])];
    let c = 4.0;
    for gens in [vec![e(&[1, 0, 0])], vec![e(&[0, 0, 1])], vec![e(&[0, 1, 4]), e(&[0, 2, 0])], vec![e(&[2, 0, 0]), e(&[0, 3, 0])]] {
        let h = SubgroupDesc::induce(&g, &gens);
        let (Bounded::Exact(n1), Bounded::Exact(n2)) = (subgroup_norm(&g, &h, &s1, 12), subgroup_norm(&g, &h, &s2, 12)) else {
            panic!("norm not reached");
        };
        let q = n2 as f64 / n1 as f64;
        assert!((1.0 / c..=c).contains(&q), "ratio {} for {:?}", q, h.induced_seq());
    }
}

#[test]
fn profiles_are_monotone_and_certified() {
    let g = GroupCtx::<BigInt>::heisenberg();
    let h = SubgroupDesc::induce(&g, &[e(&[1, 0, 0])]);
    let s = farb_profile(&g, &h, g.generators(), 5, 1024).unwrap();
    for w in s.rows.windows(2) {
        assert!(w[0].value.value().unwrap() <= w[1].value.value().unwrap());
    }
    for row in &s.rows {
        let x = row.witness.as_ref().unwrap();
        let cert = row.certificate.as_ref().unwrap();
        assert!(validate_certificate(&g, &h, x, cert).valid);
    }
    let back = parse_csv(&s.to_csv().unwrap()).unwrap();
    assert_eq!(back.len(), s.rows.len());
    for (a, b) in back.iter().zip(&s.rows) {
        assert_eq!(a.value, b.value);
        assert_eq!(a.witness, b.witness.as_ref().unwrap().to_string());
    }
    let json = s.to_json();
    let text = serde_json::to_string(&json).unwrap();
    assert_eq!(serde_json::from_str::<serde_json::Value>(&text).unwrap(), json);
}

#[test]
fn sub_profile_of_integers_is_exact_at_primes() {
    let z = GroupCtx::<BigInt>::free_abelian(1).unwrap();
    let s = sub_profile(&z, z.generators(), 97, 1024).unwrap();
    let primes: BTreeSet<u32> = (2..=97u32).filter(|&p| (2..p).all(|d| p % d != 0)).collect();
    let mut prev = 0;
    for row in &s.rows {
        let v = row.value.value().unwrap();
        assert!(v >= prev);
        prev = v;
        if primes.contains(&row.n) {
            // at n = 2 the trivial subgroup (norm 0) with g = 2 already needs ℤ/3
            let expected = if row.n == 2 { 3 } else { row.n as u64 };
            assert_eq!(v, expected, "Sub({})", row.n);
        }
        let hs: Vec<Element<BigInt>> = row.subgroup.clone();
        let h = SubgroupDesc::induce(&z, &hs);
        let x = row.witness.as_ref().unwrap();
        assert!(validate_certificate(&z, &h, x, row.certificate.as_ref().unwrap()).valid);
    }
    assert_eq!(s.rows[0].value, Depth::Value(2));
}
