//! Collection in a nilpotent presentation without power relations.
//!
//! Generators `x_1 … x_h` with relations `x_j x_i = x_i x_j · t_ji` for
//! `j > i`, where the tail `t_ji` is a normal word in `x_{j+1} … x_h`.
//! Elements are exponent vectors of normal words `x_1^{e_1} ⋯ x_h^{e_h}`.
//!
//! Multiplication peels the leftmost generator of the right factor:
//! `u · x_i^e v' = u_{≤i} x_i^e · φ_i^e(u_{>i}) · v'` with `φ_i(w) = x_i⁻¹ w x_i`,
//! which is an automorphism of `N_{i+1}` stored through its basis images.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::scalar::{add, int, neg, Int};

/// Entries kept in the automorphism power cache before it is flushed.
const POW_CACHE_LIMIT: usize = 1 << 14;

/// Memoized `φ_i^e`. Clones start empty and all caches compare equal.
struct PowCache<T>(Mutex<HashMap<(usize, T), Arc<Auto<T>>>>);

impl<T> Default for PowCache<T> {
    fn default() -> Self {
        PowCache(Mutex::new(HashMap::new()))
    }
}

impl<T> Clone for PowCache<T> {
    fn clone(&self) -> Self {
        PowCache::default()
    }
}

impl<T> PartialEq for PowCache<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T> Eq for PowCache<T> {}

impl<T> std::fmt::Debug for PowCache<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PowCache")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collector<T> {
    h: usize,
    /// `conj[i][j]` = `x_i⁻¹ x_j x_i` for `j > i` (entries for `j ≤ i` unused).
    conj: Vec<Vec<Vec<T>>>,
    /// `conj_inv[i][j]` = `x_i x_j x_i⁻¹`.
    conj_inv: Vec<Vec<Vec<T>>>,
    cache: PowCache<T>,
}

/// Images of `x_{i+1} … x_h` under an automorphism of `N_{i+1}`.
type Auto<T> = Vec<Vec<T>>;

impl<T: Int> Collector<T> {
    /// `tails[j][i]` for `j > i`: full-length exponent vector supported on
    /// indices `> j`. Missing tails mean the generators commute.
    pub fn new(h: usize, tails: &[(usize, usize, Vec<T>)]) -> Result<Self> {
        let unit = |j: usize| -> Vec<T> {
            (0..h).map(|k| if k == j { T::one() } else { T::zero() }).collect()
        };
        let mut conj: Vec<Vec<Vec<T>>> = (0..h).map(|_| (0..h).map(unit).collect()).collect();
        for (j, i, tail) in tails {
            let (j, i) = (*j, *i);
            if i >= h || j >= h || j <= i {
                return Err(Error::InvalidRelation(format!(
                    "relation ({}, {}) needs 1 ≤ i < j ≤ {}",
                    j + 1,
                    i + 1,
                    h
                )));
            }
            if tail.len() != h {
                return Err(Error::InvalidRelation(format!(
                    "tail of relation ({}, {}) has length {}, expected {}",
                    j + 1,
                    i + 1,
                    tail.len(),
                    h
                )));
            }
            if tail[..=j].iter().any(|v| !v.is_zero()) {
                return Err(Error::InvalidRelation(format!(
                    "tail of relation ({}, {}) must be supported on generators after x{}",
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
            // x_i⁻¹ x_j x_i = x_j · t_ji, a normal word since the tail lies beyond j
            let mut img = tail.clone();
            img[j] = T::one();
            conj[i][j] = img;
        }
        let mut c = Collector { h, conj, conj_inv: Vec::new(), cache: PowCache::default() };
        c.conj_inv = (0..h).map(|_| (0..h).map(unit).collect()).collect();
        for i in (0..h).rev() {
            for j in (i + 1)..h {
                let target = unit(j);
                let w = c.preimage(i, &target);
                c.conj_inv[i][j] = w;
            }
        }
        Ok(c)
    }

    pub fn hirsch(&self) -> usize {
        self.h
    }

    /// Solves `φ_i(w) = target` inside `N_{i+1}`; `φ_i` is unipotent so the
    /// error sinks at least one level per step.
    fn preimage(&self, i: usize, target: &[T]) -> Vec<T> {
        let tinv = self.inv(target);
        let mut w = target.to_vec();
        for _ in 0..=self.h {
            let eps = self.mul(&tinv, &self.apply(&self.conj[i], i, &w));
            if eps.iter().all(|x| x.is_zero()) {
                return w;
            }
            w = self.mul(&w, &self.inv(&eps));
        }
        panic!("automorphism inverse did not converge");
    }

    /// Evaluates an automorphism of `N_{i+1}` on `w ∈ N_{i+1}`.
    fn apply(&self, auto: &[Vec<T>], i: usize, w: &[T]) -> Vec<T> {
        let mut acc = vec![T::zero(); self.h];
        for j in (i + 1)..self.h {
            if w[j].is_zero() {
                continue;
            }
            let p = self.pow(&auto[j], &w[j]);
            acc = self.mul(&acc, &p);
        }
        acc
    }

    fn compose(&self, f: &Auto<T>, g: &Auto<T>, i: usize) -> Auto<T> {
        let mut out = f.clone();
        for j in (i + 1)..self.h {
            out[j] = self.apply(f, i, &g[j]);
        }
        out
    }

    /// `φ_i^e` for `|e| ≥ 2`, by repeated squaring.
    fn auto_pow(&self, i: usize, e: &T) -> Arc<Auto<T>> {
        let key = (i, e.clone());
        if let Some(a) = self.cache.0.lock().unwrap().get(&key) {
            return a.clone();
        }
        let base = if e.is_negative() { &self.conj_inv[i] } else { &self.conj[i] };
        let two: T = int(2);
        let mut k = e.abs();
        let mut acc: Option<Auto<T>> = None;
        let mut sq = base.clone();
        while !k.is_zero() {
            let (q, r) = k.div_rem(&two);
            if !r.is_zero() {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => self.compose(&a, &sq, i),
                });
            }
            k = q;
            if !k.is_zero() {
                sq = self.compose(&sq, &sq, i);
            }
        }
        let a = Arc::new(acc.expect("exponent is nonzero"));
        let mut cache = self.cache.0.lock().unwrap();
        if cache.len() >= POW_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, a.clone());
        a
    }

    /// `φ_i^e(w)`.
    fn conj_pow(&self, i: usize, e: &T, w: &[T]) -> Vec<T> {
        if w.iter().all(|x| x.is_zero()) || e.is_zero() {
            return w.to_vec();
        }
        if e.abs().is_one() {
            let base = if e.is_negative() { &self.conj_inv[i] } else { &self.conj[i] };
            return self.apply(base, i, w);
        }
        self.apply(&self.auto_pow(i, e), i, w)
    }

    pub fn mul(&self, u: &[T], v: &[T]) -> Vec<T> {
        let h = self.h;
        let mut w = u.to_vec();
        let mut v = v.to_vec();
        let mut i = 0;
        while i < h {
            let Some(k) = (i..h).find(|&k| !v[k].is_zero()) else { break };
            let e = v[k].clone();
            let mut rest = vec![T::zero(); h];
            rest[(k + 1)..].clone_from_slice(&w[(k + 1)..]);
            let moved = self.conj_pow(k, &e, &rest);
            w[k] = add(&w[k], &e);
            w[(k + 1)..].clone_from_slice(&moved[(k + 1)..]);
            v[k] = T::zero();
            i = k + 1;
        }
        w
    }

    pub fn inv(&self, u: &[T]) -> Vec<T> {
        let mut w = vec![T::zero(); self.h];
        for j in (0..self.h).rev() {
            if u[j].is_zero() {
                continue;
            }
            let mut x = vec![T::zero(); self.h];
            x[j] = neg(&u[j]);
            w = self.mul(&w, &x);
        }
        w
    }

    pub fn pow(&self, a: &[T], k: &T) -> Vec<T> {
        let (base, mut e) = if k.is_negative() { (self.inv(a), neg(k)) } else { (a.to_vec(), k.clone()) };
        let two: T = int(2);
        let mut acc = vec![T::zero(); self.h];
        let mut sq = base;
        while !e.is_zero() {
            let (q, r) = e.div_rem(&two);
            if !r.is_zero() {
                acc = self.mul(&acc, &sq);
            }
            e = q;
            if !e.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Associativity on all basis triples and inverse cancellation on pairs,
    /// with exponents ±1.
    pub fn check_consistency(&self) -> Result<()> {
        let h = self.h;
        let gen = |j: usize, s: i64| -> Vec<T> {
            (0..h).map(|k| if k == j { int(s) } else { T::zero() }).collect()
        };
        for k in 0..h {
            for j in 0..k {
                for s in [1, -1] {
                    for t in [1, -1] {
                        let (a, b) = (gen(k, s), gen(j, t));
                        if self.mul(&self.mul(&a, &b), &gen(j, -t)) != a
                            || self.mul(&gen(k, -s), &self.mul(&a, &b)) != b
                        {
                            return Err(Error::Inconsistent(k + 1, j + 1, j + 1));
                        }
                    }
                }
                for i in 0..j {
                    for s in [1, -1] {
                        for t in [1, -1] {
                            for r in [1, -1] {
                                let (a, b, c) = (gen(k, s), gen(j, t), gen(i, r));
                                let left = self.mul(&self.mul(&a, &b), &c);
                                let right = self.mul(&a, &self.mul(&b, &c));
                                if left != right {
                                    return Err(Error::Inconsistent(k + 1, j + 1, i + 1));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
