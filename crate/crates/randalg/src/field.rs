//! Exact arithmetic and uniform sampling in F_q for prime-power q.
//!
//! Elements are single integers in `[0, q)`. For prime q the value is the
//! residue itself; for q = p^e with e > 1 it encodes the coefficient
//! vector of a residue polynomial in base p (digit i is the coefficient
//! of y^i), reduced modulo a fixed monic irreducible modulus.

use rand::RngCore;

use crate::{Error, Result};

/// Largest supported prime field order; keeps products inside u64.
const MAX_PRIME_Q: u64 = 1 << 31;
/// Largest supported extension field order; bounds the modulus search.
const MAX_EXT_Q: u64 = 1 << 16;

/// An element of F_q, encoded as an integer in `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a value already known to lie in [0, q).
    #[inline]
    pub(crate) const fn from_raw(v: u64) -> FieldElement {
        FieldElement(v)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Description of a concrete finite field F_q, q = p^e.
///
/// For e > 1 the modulus is the lowest monic irreducible polynomial of
/// degree e over F_p, where candidates are ordered by the integer
/// encoding sum(c_i * p^i) of their non-leading coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    q: u64,
    p: u64,
    e: u32,
    /// Coefficients c_0..=c_e of the modulus (c_e = 1); empty when e = 1.
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Builds the field of order q, or fails if q is not a prime power.
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotAPrimePower(q));
        }
        let p = smallest_prime_factor(q);
        let mut m = q;
        let mut e = 0u32;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if m != 1 {
            return Err(Error::NotAPrimePower(q));
        }
        if e == 1 {
            if q >= MAX_PRIME_Q {
                return Err(Error::Overflow {
                    what: "prime field order",
                });
            }
            Ok(FieldSpec {
                q,
                p,
                e,
                modulus: Vec::new(),
            })
        } else {
            if q > MAX_EXT_Q {
                return Err(Error::Overflow {
                    what: "extension field order",
                });
            }
            let modulus = lowest_irreducible(p, e);
            Ok(FieldSpec { q, p, e, modulus })
        }
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    /// Modulus coefficients c_0..=c_e for e > 1, empty slice for e = 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Interprets `v mod q` as an element encoding.
    #[inline]
    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement(v % self.q)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Canonical image of an integer in the prime subfield.
    pub fn embed_int(&self, n: u64) -> FieldElement {
        FieldElement(n % self.p)
    }

    /// All q elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= self.q { s - self.q } else { s })
        } else {
            let (p, mut v, mut scale) = (self.p, 0u64, 1u64);
            let (mut x, mut y) = (a.0, b.0);
            for _ in 0..self.e {
                let d = (x % p + y % p) % p;
                v += d * scale;
                x /= p;
                y /= p;
                scale *= p;
            }
            FieldElement(v)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.e == 1 {
            FieldElement(if a.0 == 0 { 0 } else { self.q - a.0 })
        } else {
            let (p, mut v, mut scale) = (self.p, 0u64, 1u64);
            let mut x = a.0;
            for _ in 0..self.e {
                let d = x % p;
                v += (if d == 0 { 0 } else { p - d }) * scale;
                x /= p;
                scale *= p;
            }
            FieldElement(v)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            FieldElement(a.0 * b.0 % self.q)
        } else {
            self.mul_ext(a, b)
        }
    }

    fn mul_ext(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let e = self.e as usize;
        let p = self.p;
        let av = self.decode(a);
        let bv = self.decode(b);
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        // Reduce y^i (i >= e) via y^e = -sum(m_j y^j).
        for i in (e..2 * e - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..e {
                let sub = c * self.modulus[j] % p;
                prod[i - e + j] = (prod[i - e + j] + p - sub) % p;
            }
        }
        self.encode(&prod[..e])
    }

    /// Multiplicative inverse via a^(q-2); errors on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero(self.q));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Uniform element via rejection on the smallest power-of-two range
    /// covering q; every element has probability exactly 1/q.
    pub fn sample_uniform<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let mask = if self.q.is_power_of_two() {
            self.q - 1
        } else {
            (1u64 << (64 - (self.q - 1).leading_zeros())) - 1
        };
        loop {
            let v = rng.next_u64() & mask;
            if v < self.q {
                return FieldElement(v);
            }
        }
    }

    /// Base-p digits c_0..c_{e-1} of an element encoding.
    pub(crate) fn decode(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0;
        let mut out = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    pub(crate) fn encode(&self, digits: &[u64]) -> FieldElement {
        debug_assert_eq!(digits.len(), self.e as usize);
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            debug_assert!(d < self.p);
            v = v * self.p + d;
        }
        FieldElement(v)
    }
}

/// Builds F_q (alias for [`FieldSpec::new`]).
pub fn field_new(q: u64) -> Result<FieldSpec> {
    FieldSpec::new(q)
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    if n.is_multiple_of(3) {
        return 3;
    }
    let mut f = 5u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return f;
        }
        if n.is_multiple_of(f + 2) {
            return f + 2;
        }
        f += 6;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

pub fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Lowest monic irreducible of degree e over F_p: candidates are ordered
/// by the integer encoding of (c_0, ..., c_{e-1}) and tested by trial
/// division against every monic polynomial of degree at most e/2.
fn lowest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    let total = p.pow(e as u32);
    for enc in 0..total {
        let mut coeffs = Vec::with_capacity(e + 1);
        let mut v = enc;
        for _ in 0..e {
            coeffs.push(v % p);
            v /= p;
        }
        coeffs.push(1);
        if poly_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn poly_irreducible(m: &[u64], p: u64) -> bool {
    let e = m.len() - 1;
    if m[0] == 0 {
        return false; // divisible by y
    }
    for deg in 1..=e / 2 {
        let count = p.pow(deg as u32);
        for enc in 0..count {
            let mut g = Vec::with_capacity(deg + 1);
            let mut v = enc;
            for _ in 0..deg {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if poly_rem_is_zero(m, &g, p) {
                return false;
            }
        }
    }
    true
}

/// Whether monic `g` divides `m` over F_p.
fn poly_rem_is_zero(m: &[u64], g: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = m.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dg;
        if lead != 0 {
            for (j, &gj) in g.iter().enumerate() {
                let idx = shift + j;
                let sub = lead * gj % p;
                rem[idx] = (rem[idx] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// Smallest prime power q with q^exponent >= n, together with q^exponent.
///
/// The returned size n_i = q^exponent always satisfies
/// n <= n_i <= 2^exponent * n.
pub fn next_construction_size(n: u64, exponent: u32) -> (u64, u64) {
    assert!(n >= 1 && exponent >= 1);
    let mut q = integer_root(n, exponent).max(2);
    while checked_pow(q, exponent).is_some_and(|v| v < n) {
        q += 1;
    }
    loop {
        if is_prime_power(q) {
            if let Some(sz) = checked_pow(q, exponent) {
                if sz >= n {
                    return (q, sz);
                }
            }
        }
        q += 1;
    }
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Floor of the exponent-th root of n.
fn integer_root(n: u64, exponent: u32) -> u64 {
    if exponent == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / exponent as f64).round() as u64;
    while r > 1 && checked_pow(r, exponent).is_none_or(|v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, exponent).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}
