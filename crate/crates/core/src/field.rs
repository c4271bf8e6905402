//! Finite fields GF(p^k).
//!
//! Elements are encoded as integer codes in `[0, q)`: the base-`p` digits of a
//! code are the coefficients of the element's polynomial representative, with
//! the constant term as the least significant digit. Prime fields use plain
//! residues mod `p`. Extension fields reduce modulo the lexicographically
//! smallest monic irreducible polynomial of degree `k`.
//!
//! Fields of order at most [`TABLE_LIMIT`] carry full addition, multiplication,
//! negation and inversion tables built at construction time.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::DEFAULT_BUDGET;

/// Largest field order for which arithmetic tables are precomputed.
pub const TABLE_LIMIT: u32 = 256;

/// An element of some [`FieldSpec`], identified by its code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Caller guarantees `code` is below the order of the intended field.
    pub(crate) const fn from_code_unchecked(code: u32) -> FieldElement {
        FieldElement(code)
    }

    pub const fn code(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    // inv[0] is unused
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, coefficients constant-first; `None` for prime fields.
    modulus: Option<Vec<u32>>,
    tables: Option<Tables>,
}

/// A finite field GF(p^k). Cloning is cheap; all clones share one immutable
/// set of tables.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits a prime power `q = p^k` into `(p, k)`.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Builds GF(p^k) under the default enumeration budget.
pub fn make_field(p: u64, k: u32) -> Result<FieldSpec> {
    FieldSpec::new(p, k, DEFAULT_BUDGET)
}

/// Irreducibility over GF(p) by trial division against every monic polynomial
/// of degree at most `deg / 2`. Coefficients are given constant-first.
pub fn is_irreducible(poly: &[u32], p: u32) -> Result<bool> {
    let poly = trim(poly);
    let deg = poly.len().checked_sub(1).ok_or(Error::NotMonic)?;
    if deg == 0 || poly[deg] % p != 1 {
        return Err(if deg == 0 {
            Error::InvalidParameter("degree must be at least 1".into())
        } else {
            Error::NotMonic
        });
    }
    let poly: Vec<u32> = poly.iter().map(|&c| c % p).collect();
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = digits(code, p, d);
            divisor.push(1);
            if poly_rem(&poly, &divisor, p).iter().all(|&c| c == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn trim(poly: &[u32]) -> &[u32] {
    let mut len = poly.len();
    while len > 0 && poly[len - 1] == 0 {
        len -= 1;
    }
    &poly[..len]
}

fn digits(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`, length `deg(m)`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    for top in (dm..r.len()).rev() {
        let lead = r[top] % p64;
        if lead == 0 {
            continue;
        }
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = lead * c as u64 % p64;
            r[shift + i] = (r[shift + i] + p64 - sub) % p64;
        }
    }
    r.truncate(dm);
    r.resize(dm, 0);
    r.into_iter().map(|c| c as u32).collect()
}

impl FieldSpec {
    /// Builds GF(p^k), refusing orders above `budget`.
    pub fn new(p: u64, k: u32, budget: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::InvalidDegree(k));
        }
        let order = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if order > budget as u128 || order > u32::MAX as u128 {
            return Err(Error::BudgetExceeded {
                what: "field elements",
                required: order,
                budget,
            });
        }
        let (p, q) = (p as u32, order as u32);
        let modulus = if k == 1 {
            None
        } else {
            let tail_count = q as u64;
            let mut found = None;
            for code in 0..tail_count {
                let mut poly = digits(code, p, k as usize);
                poly.push(1);
                if is_irreducible(&poly, p)? {
                    found = Some(poly);
                    break;
                }
            }
            Some(found.expect("an irreducible polynomial exists in every degree"))
        };
        let mut field = FieldSpec(Arc::new(Inner {
            p,
            k,
            q,
            modulus,
            tables: None,
        }));
        if q <= TABLE_LIMIT {
            let tables = field.build_tables();
            Arc::get_mut(&mut field.0)
                .expect("freshly built field is uniquely owned")
                .tables = Some(tables);
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first. `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.0.modulus.as_deref()
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    pub fn element(&self, code: u64) -> Result<FieldElement> {
        if code < self.0.q as u64 {
            Ok(FieldElement(code as u32))
        } else {
            Err(Error::ElementOutOfRange { code, q: self.0.q })
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.0.q
    }

    /// All `q` elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.0.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.0.q + b.0) as usize]),
            None => FieldElement(self.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a));
        match &self.0.tables {
            Some(t) => FieldElement(t.neg[a.0 as usize]),
            None => FieldElement(self.neg_slow(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.0.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.0.q + b.0) as usize]),
            None => FieldElement(self.mul_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        debug_assert!(self.contains(a));
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => FieldElement(t.inv[a.0 as usize]),
            None => FieldElement(self.inv_slow(a.0)),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn build_tables(&self) -> Tables {
        let q = self.0.q;
        let mut add = Vec::with_capacity((q * q) as usize);
        let mut mul = Vec::with_capacity((q * q) as usize);
        for a in 0..q {
            for b in 0..q {
                add.push(self.add_slow(a, b));
                mul.push(self.mul_slow(a, b));
            }
        }
        let neg = (0..q).map(|a| self.neg_slow(a)).collect();
        let mut inv = vec![0; q as usize];
        for a in 1..q {
            // every nonzero row of the multiplication table contains 1 exactly once
            inv[a as usize] = (1..q)
                .find(|&b| mul[(a * q + b) as usize] == 1)
                .expect("nonzero elements are invertible");
        }
        Tables { add, mul, neg, inv }
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p as u64;
        if self.0.k == 1 {
            return ((a as u64 + b as u64) % p) as u32;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.0.k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let p = self.0.p as u64;
        if self.0.k == 1 {
            return ((p - a as u64) % p) as u32;
        }
        let mut a = a as u64;
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.0.k {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out as u32
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p;
        let Some(modulus) = &self.0.modulus else {
            return ((a as u64 * b as u64) % p as u64) as u32;
        };
        let k = self.0.k as usize;
        let da = digits(a as u64, p, k);
        let db = digits(b as u64, p, k);
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        let rem = poly_rem(&prod, modulus, p);
        rem.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p as u64 + c as u64) as u32
    }

    fn inv_slow(&self, a: u32) -> u32 {
        // a^(q-2) by square-and-multiply
        let mut exp = self.0.q as u64 - 2;
        let (mut base, mut acc) = (a, 1u32);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Parses a field designation: `"p^k"` or a bare prime power `"q"`.
    pub fn parse_designation(s: &str, budget: u64) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid field designation {s:?}"));
        if let Some((p, k)) = s.split_once('^') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            FieldSpec::new(p, k, budget)
        } else {
            let q: u64 = s.parse().map_err(|_| bad())?;
            let (p, k) = prime_power_parts(q).ok_or(Error::NotPrimePower(q))?;
            FieldSpec::new(p, k, budget)
        }
    }
}
