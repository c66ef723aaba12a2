//! Integer scalar abstraction.
//!
//! Every exact computation in the crate is generic over [`Int`]. The default
//! instantiation is [`num_bigint::BigInt`]; fixed-width `i64`/`i128` are
//! supported for speed, with every arithmetic step checked so that overflow
//! panics instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer usable as a coordinate type.
pub trait Int:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
}

impl<T> Int for T where
    T: Integer
        + Signed
        + Clone
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + Send
        + Sync
        + 'static
{
}

#[inline]
pub fn int<T: Int>(v: i64) -> T {
    T::from_i64(v).expect("scalar cannot represent i64 value")
}

#[inline]
pub fn add<T: Int>(a: &T, b: &T) -> T {
    a.checked_add(b).expect("integer overflow in addition")
}

#[inline]
pub fn sub<T: Int>(a: &T, b: &T) -> T {
    a.checked_sub(b).expect("integer overflow in subtraction")
}

#[inline]
pub fn mul<T: Int>(a: &T, b: &T) -> T {
    a.checked_mul(b).expect("integer overflow in multiplication")
}

#[inline]
pub fn neg<T: Int>(a: &T) -> T {
    sub(&T::zero(), a)
}

/// Reduce into `[0, m)` for `m > 0`.
#[inline]
pub fn modulo<T: Int>(a: &T, m: &T) -> T {
    a.mod_floor(m)
}

/// Reduce into the symmetric range `(-m/2, m/2]` for `m > 0`.
pub fn sym_mod<T: Int>(a: &T, m: &T) -> T {
    let r = a.mod_floor(m);
    let twice = add(&r, &r);
    if twice > *m {
        sub(&r, m)
    } else {
        r
    }
}

pub fn to_i64<T: Int>(a: &T) -> Option<i64> {
    a.to_i64()
}

pub fn to_u64<T: Int>(a: &T) -> Option<u64> {
    a.to_u64()
}

/// Convert between scalar types, failing when the target cannot hold the value.
pub fn convert<A: Int, B: Int>(a: &A) -> Option<B> {
    match a.to_i128() {
        Some(v) => B::from_i128(v),
        None => {
            let s = a.to_string();
            // Only BigInt-sized values land here; go through decimal.
            parse_decimal::<B>(&s)
        }
    }
}

/// Parse a decimal string into any scalar (no overflow for BigInt).
pub fn parse_decimal<T: Int>(s: &str) -> Option<T> {
    let s = s.trim();
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ten: T = int(10);
    let mut acc = T::zero();
    for b in digits.bytes() {
        let d: T = int((b - b'0') as i64);
        acc = acc.checked_mul(&ten)?.checked_add(&d)?;
    }
    Some(if negative { neg(&acc) } else { acc })
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation<T: Int>(m: &T, p: &T) -> u32 {
    assert!(!m.is_zero(), "valuation of zero");
    let mut m = m.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

pub fn pow_u32<T: Int>(base: &T, exp: u32) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = mul(&acc, base);
    }
    acc
}
