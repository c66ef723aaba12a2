//! Exact integer utilities: bounded Bezout coefficients, short generator
//! words for subgroups of the integers, echelon/Hermite/Smith forms and
//! lattice saturation, valuations and lcm ladders.

use crate::error::{Error, Result};
use crate::scalar::{add, int, mul, neg, sub, sym_mod, Int};

/// Bezout data: `gcd = Σ coeffs[i]·input[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutResult<T> {
    pub gcd: T,
    pub coeffs: Vec<T>,
}

impl<T: Int> BezoutResult<T> {
    /// Checks the combination, divisibility and the coefficient box.
    ///
    /// The box is `2|x_i| ≤ max(M, 2)` with `M = max|a_j|`; when every input
    /// has absolute value at most one no coefficient of size `≤ 1/2` exists,
    /// so the box degenerates to `|x_i| ≤ 1`.
    pub fn verify(&self, input: &[T]) -> bool {
        if self.coeffs.len() != input.len() || !self.gcd.is_positive() {
            return false;
        }
        let dot = input
            .iter()
            .zip(&self.coeffs)
            .fold(T::zero(), |acc, (a, x)| add(&acc, &mul(a, x)));
        if dot != self.gcd || input.iter().any(|a| !a.is_multiple_of(&self.gcd)) {
            return false;
        }
        let max = input.iter().map(|a| a.abs()).max().unwrap_or_else(T::zero);
        let two: T = int(2);
        let cap = if max < two { two } else { max };
        if input.len() == 1 {
            return self.coeffs[0].abs() == T::one();
        }
        self.coeffs.iter().all(|x| mul(&x.abs(), &int(2)) <= cap)
    }
}

/// Extended gcd of two integers: `(g, u, v)` with `u·a + v·b = g ≥ 0`.
pub fn ext_gcd<T: Int>(a: &T, b: &T) -> (T, T, T) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = sub(&old_r, &mul(&q, &r));
        old_r = std::mem::replace(&mut r, nr);
        let ns = sub(&old_s, &mul(&q, &s));
        old_s = std::mem::replace(&mut s, ns);
        let nt = sub(&old_t, &mul(&q, &t));
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (neg(&old_r), neg(&old_s), neg(&old_t))
    } else {
        (old_r, old_s, old_t)
    }
}

/// Bezout coefficients with every `|x_i| ≤ max_j |a_j| / 2`.
///
/// The largest entry absorbs one partner at a time: the pair is replaced by
/// its gcd, the shorter vector is solved recursively, and the two-variable
/// equation `x1·α1 + x2·α2 = w` is solved with `x1` reduced modulo `α2`.
/// A final pass walks pairwise syzygies while the L1 norm decreases.
pub fn eff_bezout<T: Int>(a: &[T]) -> Result<BezoutResult<T>> {
    if a.is_empty() {
        return Err(Error::Degenerate("empty input"));
    }
    let nonzero: Vec<usize> = (0..a.len()).filter(|&i| !a[i].is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::Degenerate("all entries are zero"));
    }
    let vals: Vec<T> = nonzero.iter().map(|&i| a[i].clone()).collect();
    let (g, x) = bezout_nonzero(&vals);
    let mut coeffs = vec![T::zero(); a.len()];
    for (k, &i) in nonzero.iter().enumerate() {
        coeffs[i] = x[k].clone();
    }
    shorten(a, &mut coeffs);
    Ok(BezoutResult { gcd: g, coeffs })
}

fn bezout_nonzero<T: Int>(a: &[T]) -> (T, Vec<T>) {
    if a.len() == 1 {
        let sign = if a[0].is_negative() { neg(&T::one()) } else { T::one() };
        return (a[0].abs(), vec![sign]);
    }
    let imax = (0..a.len())
        .fold(0, |best, i| if a[i].abs() > a[best].abs() { i } else { best });
    let ip = if imax == 0 { 1 } else { 0 };
    let g12 = a[ip].gcd(&a[imax]);
    let mut reduced: Vec<T> = Vec::with_capacity(a.len() - 1);
    let mut back: Vec<usize> = Vec::with_capacity(a.len() - 1);
    for i in 0..a.len() {
        if i != ip && i != imax {
            reduced.push(a[i].clone());
            back.push(i);
        }
    }
    reduced.push(g12.clone());
    let (g, y) = bezout_nonzero(&reduced);
    let w = y.last().unwrap().clone();
    let alpha1 = a[ip].div_floor(&g12);
    let alpha2 = a[imax].div_floor(&g12);
    let (_, u, _) = ext_gcd(&alpha1, &alpha2);
    let x1 = sym_mod(&mul(&w, &u), &alpha2.abs());
    let rest = sub(&w, &mul(&x1, &alpha1));
    debug_assert!(rest.is_multiple_of(&alpha2));
    let x2 = rest.div_floor(&alpha2);
    let mut x = vec![T::zero(); a.len()];
    for (k, &i) in back.iter().enumerate() {
        x[i] = y[k].clone();
    }
    x[ip] = x1;
    x[imax] = x2;
    (g, x)
}

fn shorten<T: Int>(a: &[T], x: &mut [T]) {
    let max = a.iter().map(|v| v.abs()).max().unwrap();
    let two: T = int(2);
    let cap = if max < two { two.clone() } else { max };
    let within = |v: &T| mul(&v.abs(), &two) <= cap;
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 64 {
        improved = false;
        rounds += 1;
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                if a[i].is_zero() || a[j].is_zero() {
                    continue;
                }
                let g = a[i].gcd(&a[j]);
                let di = a[j].div_floor(&g);
                let dj = neg(&a[i].div_floor(&g));
                for sign in [1i64, -1] {
                    let s: T = int(sign);
                    let xi = add(&x[i], &mul(&s, &di));
                    let xj = add(&x[j], &mul(&s, &dj));
                    if !within(&xi) || !within(&xj) {
                        continue;
                    }
                    let before = add(&x[i].abs(), &x[j].abs());
                    let after = add(&xi.abs(), &xj.abs());
                    if after < before {
                        x[i] = xi;
                        x[j] = xj;
                        improved = true;
                    }
                }
            }
        }
    }
}

/// A signed word over a subset `S ⊂ ℤ` evaluating to `gcd(S)` with length
/// at most `n²`, where `|s| ≤ n` for every `s ∈ S`.
///
/// Positive letters come first, each group in the order of `S`.
pub fn generator_word<T: Int>(s: &[T], n: &T) -> Result<Vec<T>> {
    if s.is_empty() {
        return Err(Error::Degenerate("empty generating set"));
    }
    if s.iter().any(|v| v.is_zero()) {
        return Err(Error::Degenerate("generating set contains zero"));
    }
    if s.iter().any(|v| v.abs() > *n) {
        return Err(Error::Degenerate("generator exceeds the stated bound"));
    }
    let mut distinct: Vec<T> = Vec::new();
    for v in s {
        if !distinct.contains(v) {
            distinct.push(v.clone());
        }
    }
    let b = eff_bezout(&distinct)?;
    let mut pos = Vec::new();
    let mut negs = Vec::new();
    for (v, x) in distinct.iter().zip(&b.coeffs) {
        let count = x.abs().to_u64().expect("coefficient fits in u64");
        for _ in 0..count {
            if x.is_positive() {
                pos.push(v.clone());
            } else {
                negs.push(neg(v));
            }
        }
    }
    pos.extend(negs);
    Ok(pos)
}

/// Row echelon form by unimodular row operations, pivoting only in the first
/// `pivot_cols` columns. Pivots are positive and entries above a pivot are
/// reduced into `[0, pivot)`. Zero rows sink to the bottom. Returns the
/// pivot columns.
pub fn row_echelon<T: Int>(rows: &mut Vec<Vec<T>>, pivot_cols: usize) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r >= m {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below r
            let mut best: Option<usize> = None;
            for i in r..m {
                if !rows[i][c].is_zero()
                    && best.map_or(true, |b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in (r + 1)..m {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                let pivot_row = &head[r];
                for (x, p) in tail[0].iter_mut().zip(pivot_row) {
                    *x = sub(x, &mul(&q, p));
                }
                if !tail[0][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = neg(x);
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(r);
            for (x, p) in head[i].iter_mut().zip(&tail[0]) {
                *x = sub(x, &mul(&q, p));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Hermite normal form (row style, nonzero rows only).
pub fn hnf<T: Int>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let n = first.len();
    let mut m = rows.to_vec();
    let piv = row_echelon(&mut m, n);
    m.truncate(piv.len());
    m
}

/// Basis (in HNF) of `{x ∈ ℤ^n : M·x = 0}` for an `m × n` matrix `M`.
pub fn integer_kernel<T: Int>(matrix: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    let m = matrix.len();
    let mut aug: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut row: Vec<T> = matrix.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { T::one() } else { T::zero() }));
            row
        })
        .collect();
    row_echelon(&mut aug, m);
    let kernel: Vec<Vec<T>> = aug
        .into_iter()
        .filter(|row| row[..m].iter().all(|v| v.is_zero()))
        .map(|row| row[m..].to_vec())
        .collect();
    hnf(&kernel)
}

/// Smith normal form `U·A·V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith<T> {
    /// Diagonal of `D`, length `min(rows, cols)`; trailing zeros for rank deficiency.
    pub diagonal: Vec<T>,
    pub left: Vec<Vec<T>>,
    pub right: Vec<Vec<T>>,
}

pub fn smith<T: Int>(a: &[Vec<T>], cols: usize) -> Smith<T> {
    let m = a.len();
    let n = cols;
    let mut d: Vec<Vec<T>> = a.to_vec();
    let identity = |k: usize| -> Vec<Vec<T>> {
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect()
    };
    let mut u = identity(m);
    let mut v = identity(n);
    let row_axpy = |mat: &mut Vec<Vec<T>>, dst: usize, src: usize, q: &T| {
        let src_row = mat[src].clone();
        for (x, s) in mat[dst].iter_mut().zip(&src_row) {
            *x = sub(x, &mul(q, s));
        }
    };
    let col_axpy = |mat: &mut Vec<Vec<T>>, dst: usize, src: usize, q: &T| {
        for row in mat.iter_mut() {
            let s = row[src].clone();
            row[dst] = sub(&row[dst], &mul(q, &s));
        }
    };
    let col_swap = |mat: &mut Vec<Vec<T>>, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    let k = m.min(n);
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut d, t, bj);
            col_swap(&mut v, t, bj);
            let mut clean = true;
            for i in (t + 1)..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut offender = None;
            'scan: for i in (t + 1)..m {
                for j in (t + 1)..n {
                    if !d[i][j].is_multiple_of(&d[t][t]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let minus_one = neg(&T::one());
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if t < m && d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = neg(x);
            }
            for x in u[t].iter_mut() {
                *x = neg(x);
            }
        }
    }
    let diagonal = (0..k).map(|t| d[t][t].clone()).collect();
    Smith { diagonal, left: u, right: v }
}

/// Index of a sublattice: finite, or infinite when ranks differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeIndex<T> {
    Finite(T),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice<T> {
    pub basis: Vec<Vec<T>>,
    pub ambient_rank: usize,
}

impl<T: Int> IntLattice<T> {
    pub fn new(basis: Vec<Vec<T>>, ambient_rank: usize) -> Result<Self> {
        if ambient_rank == 0 {
            return Err(Error::Degenerate("ambient rank must be positive"));
        }
        for row in &basis {
            if row.len() != ambient_rank {
                return Err(Error::DimensionMismatch { expected: ambient_rank, found: row.len() });
            }
        }
        Ok(IntLattice { basis, ambient_rank })
    }

    pub fn rank(&self) -> usize {
        hnf(&self.basis).len()
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut rows = hnf(&self.basis);
        let before = rows.len();
        rows.push(v.to_vec());
        hnf(&rows) == hnf(&self.basis) && rows.len() == before + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Saturation<T> {
    pub hnf_basis: Vec<Vec<T>>,
    pub saturation: IntLattice<T>,
    pub index: LatticeIndex<T>,
}

/// HNF, saturation `(L ⊗ ℚ) ∩ ℤⁿ`, and the index `[sat(L) : L]`.
pub fn hnf_saturate<T: Int>(lattice: &IntLattice<T>) -> Result<Saturation<T>> {
    let n = lattice.ambient_rank;
    for row in &lattice.basis {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    let basis = hnf(&lattice.basis);
    let sat = if basis.is_empty() {
        Vec::new()
    } else {
        let orth = integer_kernel(&basis, n);
        if orth.is_empty() {
            identity_rows(n)
        } else {
            integer_kernel(&orth, n)
        }
    };
    let pivot_product = |rows: &[Vec<T>]| {
        rows.iter().fold(T::one(), |acc, row| {
            let p = row.iter().find(|v| !v.is_zero()).cloned().unwrap_or_else(T::one);
            mul(&acc, &p)
        })
    };
    let index = if sat.len() == basis.len() {
        LatticeIndex::Finite(pivot_product(&basis).div_floor(&pivot_product(&sat)))
    } else {
        LatticeIndex::Infinite
    };
    Ok(Saturation {
        hnf_basis: basis,
        saturation: IntLattice { basis: sat, ambient_rank: n },
        index,
    })
}

pub fn identity_rows<T: Int>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// Smallest `m ≥ 2` that does not divide `g`.
pub fn min_nondivisor<T: Int>(g: &T) -> Result<T> {
    if g.is_zero() {
        return Err(Error::Degenerate("every integer divides zero"));
    }
    let mut m: T = int(2);
    while g.is_multiple_of(&m) {
        m = add(&m, &T::one());
    }
    Ok(m)
}

/// Largest `e` with `p^e | m`.
pub fn nu_p<T: Int>(m: &T, p: &T) -> Result<u32> {
    if m.is_zero() {
        return Err(Error::Degenerate("valuation of zero is infinite"));
    }
    if *p < int(2) {
        return Err(Error::Degenerate("valuation base must be at least 2"));
    }
    Ok(crate::scalar::valuation(m, p))
}

/// `lcm(1, …, m)`; `lcm_ladder(0) = 1`.
pub fn lcm_ladder<T: Int>(m: u64) -> T {
    let mut acc = T::one();
    for k in 1..=m {
        acc = acc.lcm(&T::from_u64(k).unwrap());
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes in ascending order, up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

/// Prime powers `p^e ≥ 2` up to `limit`, ascending.
pub fn prime_powers_up_to(limit: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        let mut q = p;
        let mut e = 1;
        while q <= limit {
            out.push((q, e, p));
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
            e += 1;
        }
    }
    out.sort_unstable();
    out
}

/// `Σ_i v_i w_i`.
pub fn dot<T: Int>(v: &[T], w: &[T]) -> T {
    v.iter().zip(w).fold(T::zero(), |acc, (a, b)| add(&acc, &mul(a, b)))
}

pub fn is_unit<T: Int>(v: &T) -> bool {
    v.abs().is_one()
}
