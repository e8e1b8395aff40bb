//! Dense k-variate polynomials of bounded total degree over F_q.
//!
//! A polynomial is a coefficient vector over a fixed monomial basis: all
//! exponent vectors (a_1, ..., a_k) with sum <= d, ordered by total
//! degree ascending and, within a degree, by exponent vector descending
//! lexicographically (so 1, X1, X2, X1^2, X1*X2, X2^2 for k=2, d=2).
//! The order is frozen: serialization layouts and the coin-consumption
//! order of sampling depend on it. Because grades are listed in
//! ascending order, the basis for (k, d) is a prefix of the basis for
//! (k, D) whenever d <= D, and embedding is zero-padding.

use std::sync::Arc;

use rand::RngCore;

use crate::field::{FieldElement, FieldSpec};
use crate::{Budget, Error, Result};

/// Number of monomials in k variables of total degree at most d: C(k+d, k).
pub fn monomial_count(k: usize, d: usize) -> Result<u64> {
    const OVERFLOW: Error = Error::Overflow {
        what: "monomial count",
    };
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(d as u128 + i).ok_or(OVERFLOW)? / i;
        if acc > u64::MAX as u128 {
            return Err(OVERFLOW);
        }
    }
    Ok(acc as u64)
}

/// The frozen monomial basis for (k, d).
#[derive(Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    k: usize,
    d: usize,
    r: usize,
    /// Exponent vectors, flattened with stride k, in basis order.
    exponents: Vec<u32>,
}

impl MonomialBasis {
    pub fn new(k: usize, d: usize) -> Result<Arc<Self>> {
        assert!(k >= 1, "need at least one variable");
        let r = monomial_count(k, d)?;
        if r > (usize::MAX / k.max(1)) as u64 {
            return Err(Error::Overflow {
                what: "monomial count",
            });
        }
        let r = r as usize;
        let mut exponents = Vec::with_capacity(r * k);
        let mut prefix = Vec::with_capacity(k);
        for grade in 0..=d {
            emit_grade(k, grade as u32, &mut prefix, &mut exponents);
        }
        debug_assert_eq!(exponents.len(), r * k);
        Ok(Arc::new(MonomialBasis { k, d, r, exponents }))
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Basis size r = C(k+d, k).
    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.exponents[i * self.k..(i + 1) * self.k]
    }

    /// Total degree of monomial i.
    pub fn grade(&self, i: usize) -> u32 {
        self.monomial(i).iter().sum()
    }

    pub fn index_of(&self, exponents: &[u32]) -> Option<usize> {
        (0..self.r).find(|&i| self.monomial(i) == exponents)
    }
}

fn emit_grade(vars: usize, sum: u32, prefix: &mut Vec<u32>, out: &mut Vec<u32>) {
    if vars == 1 {
        prefix.push(sum);
        out.extend_from_slice(prefix);
        prefix.pop();
        return;
    }
    for a in (0..=sum).rev() {
        prefix.push(a);
        emit_grade(vars - 1, sum - a, prefix, out);
        prefix.pop();
    }
}

/// A polynomial as a dense coefficient vector over a shared basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<FieldElement>,
}

impl MPoly {
    pub fn zero(basis: &Arc<MonomialBasis>) -> Self {
        MPoly {
            basis: Arc::clone(basis),
            coeffs: vec![FieldElement::ZERO; basis.r()],
        }
    }

    pub fn constant(basis: &Arc<MonomialBasis>, c: FieldElement) -> Self {
        let mut f = MPoly::zero(basis);
        f.coeffs[0] = c;
        f
    }

    pub fn from_coeffs(basis: &Arc<MonomialBasis>, coeffs: Vec<FieldElement>) -> Self {
        assert_eq!(coeffs.len(), basis.r());
        MPoly {
            basis: Arc::clone(basis),
            coeffs,
        }
    }

    /// Single-monomial polynomial c * X^exponents.
    pub fn monomial_term(
        basis: &Arc<MonomialBasis>,
        exponents: &[u32],
        c: FieldElement,
    ) -> Self {
        let i = basis
            .index_of(exponents)
            .expect("exponent vector not in basis");
        let mut f = MPoly::zero(basis);
        f.coeffs[i] = c;
        f
    }

    /// Uniform polynomial: the r coefficients are drawn independently and
    /// uniformly, in basis order (one field draw per coefficient).
    pub fn sample<R: RngCore + ?Sized>(
        basis: &Arc<MonomialBasis>,
        spec: &FieldSpec,
        rng: &mut R,
    ) -> Self {
        let coeffs = (0..basis.r()).map(|_| spec.sample_uniform(rng)).collect();
        MPoly {
            basis: Arc::clone(basis),
            coeffs,
        }
    }

    #[inline]
    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    #[inline]
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Total degree of the highest nonzero term, or None for zero.
    pub fn actual_degree(&self) -> Option<u32> {
        (0..self.coeffs.len())
            .rev()
            .find(|&i| !self.coeffs[i].is_zero())
            .map(|i| self.basis.grade(i))
    }

    /// Exact value at a point of F_q^k.
    pub fn evaluate(&self, spec: &FieldSpec, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.basis.k());
        // Powers of each coordinate up to d.
        let d = self.basis.d();
        let k = self.basis.k();
        let mut pows = vec![FieldElement::ONE; k * (d + 1)];
        for (j, &x) in point.iter().enumerate() {
            for a in 1..=d {
                pows[j * (d + 1) + a] = spec.mul(pows[j * (d + 1) + a - 1], x);
            }
        }
        let mut acc = FieldElement::ZERO;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c;
            for (j, &a) in self.basis.monomial(i).iter().enumerate() {
                if a > 0 {
                    term = spec.mul(term, pows[j * (d + 1) + a as usize]);
                }
            }
            acc = spec.add(acc, term);
        }
        acc
    }

    /// Re-expresses the polynomial over a higher-degree basis with the
    /// same variable count. The source basis is a prefix of the target,
    /// so this is a zero-padded copy.
    pub fn embed(&self, target: &Arc<MonomialBasis>) -> MPoly {
        assert_eq!(target.k(), self.basis.k());
        assert!(target.d() >= self.basis.d());
        debug_assert_eq!(
            &target.exponents[..self.basis.exponents.len()],
            &self.basis.exponents[..]
        );
        let mut coeffs = vec![FieldElement::ZERO; target.r()];
        coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        MPoly {
            basis: Arc::clone(target),
            coeffs,
        }
    }

    /// Coefficientwise sum over the larger of the two bases.
    pub fn add(&self, other: &MPoly, spec: &FieldSpec) -> MPoly {
        let (lo, hi) = if self.basis.d() <= other.basis.d() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = lo.embed(&hi.basis);
        for (o, &h) in out.coeffs.iter_mut().zip(&hi.coeffs) {
            *o = spec.add(*o, h);
        }
        out
    }

    /// self - other, over the larger of the two bases.
    pub fn sub(&self, other: &MPoly, spec: &FieldSpec) -> MPoly {
        assert_eq!(self.basis.k(), other.basis.k());
        let target = if self.basis.d() >= other.basis.d() {
            Arc::clone(&self.basis)
        } else {
            Arc::clone(&other.basis)
        };
        let a = self.embed(&target);
        let b = other.embed(&target);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| spec.sub(x, y))
            .collect();
        MPoly {
            basis: target,
            coeffs,
        }
    }
}

/// Number of points in F_q^k, budget-checked.
pub fn point_count(q: u64, k: usize, budget: Budget) -> Result<u64> {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(q as u128);
    }
    budget.check(acc)?;
    Ok(acc as u64)
}

/// Decodes the canonical point with the given index: points are ordered
/// lexicographically with the first coordinate most significant.
pub fn point_from_index(mut index: u64, k: usize, q: u64) -> Vec<FieldElement> {
    let mut coords = vec![FieldElement::ZERO; k];
    for j in (0..k).rev() {
        coords[j] = FieldElement::from_raw(index % q);
        index /= q;
    }
    coords
}

/// Index of a canonical point.
pub fn point_index(point: &[FieldElement], q: u64) -> u64 {
    point.iter().fold(0u64, |acc, x| acc * q + x.value())
}

/// Per-point monomial values for one basis over all of F_q^k, so that
/// evaluating many polynomials over all points is a dot product per
/// (polynomial, point) pair.
pub struct PointTable {
    spec: FieldSpec,
    r: usize,
    num_points: usize,
    /// values[point * r + mono]
    values: Vec<u64>,
}

impl PointTable {
    pub fn build(basis: &MonomialBasis, spec: &FieldSpec, budget: Budget) -> Result<Self> {
        let q = spec.q();
        let k = basis.k();
        let n = point_count(q, k, budget)? as usize;
        let r = basis.r();
        budget.check(n as u128 * r as u128)?;
        let d = basis.d();
        let values = crate::par::map_collect(n, |pi| {
            let point = point_from_index(pi as u64, k, q);
            let mut pows = vec![FieldElement::ONE; k * (d + 1)];
            for (j, &x) in point.iter().enumerate() {
                for a in 1..=d {
                    pows[j * (d + 1) + a] = spec.mul(pows[j * (d + 1) + a - 1], x);
                }
            }
            let mut row = Vec::with_capacity(r);
            for i in 0..r {
                let mut v = FieldElement::ONE;
                for (j, &a) in basis.monomial(i).iter().enumerate() {
                    if a > 0 {
                        v = spec.mul(v, pows[j * (d + 1) + a as usize]);
                    }
                }
                row.push(v.value());
            }
            row
        })
        .into_iter()
        .flatten()
        .collect();
        Ok(PointTable {
            spec: spec.clone(),
            r,
            num_points: n,
            values,
        })
    }

    #[inline]
    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Value of `f` at the point with the given canonical index.
    pub fn eval(&self, f: &MPoly, point: usize) -> FieldElement {
        debug_assert_eq!(f.basis().r(), self.r);
        let row = &self.values[point * self.r..(point + 1) * self.r];
        if self.spec.extension_degree() == 1 {
            // Fused accumulate: products are < q^2 <= 2^62, summed in u128.
            let mut acc: u128 = 0;
            for (&c, &m) in f.coeffs().iter().zip(row) {
                acc += (c.value() * m) as u128;
            }
            self.spec.element((acc % self.spec.q() as u128) as u64)
        } else {
            let mut acc = FieldElement::ZERO;
            for (&c, &m) in f.coeffs().iter().zip(row) {
                acc = self.spec.add(acc, self.spec.mul(c, self.spec.element(m)));
            }
            acc
        }
    }

    #[inline]
    pub fn vanishes(&self, f: &MPoly, point: usize) -> bool {
        self.eval(f, point).is_zero()
    }
}

/// Common zero set of the system over F_q^k, in canonical point order.
pub fn zero_set(fs: &[MPoly], spec: &FieldSpec, budget: Budget) -> Result<Vec<Vec<FieldElement>>> {
    assert!(!fs.is_empty(), "zero_set needs at least one polynomial");
    let k = fs[0].basis().k();
    assert!(fs.iter().all(|f| f.basis().k() == k));
    let n = point_count(spec.q(), k, budget)?;
    let mut out = Vec::new();
    for pi in 0..n {
        let point = point_from_index(pi, k, spec.q());
        if fs.iter().all(|f| f.evaluate(spec, &point).is_zero()) {
            out.push(point);
        }
    }
    Ok(out)
}

/// |zero_set| without materializing the points.
pub fn zero_count(fs: &[MPoly], spec: &FieldSpec, budget: Budget) -> Result<u64> {
    assert!(!fs.is_empty());
    let k = fs[0].basis().k();
    let n = point_count(spec.q(), k, budget)?;
    let mut count = 0u64;
    for pi in 0..n {
        let point = point_from_index(pi, k, spec.q());
        if fs.iter().all(|f| f.evaluate(spec, &point).is_zero()) {
            count += 1;
        }
    }
    Ok(count)
}

/// Iterator over all q^r polynomials of a basis, in coefficient-
/// lexicographic order (the first coefficient is most significant).
pub struct MPolyEnumerator {
    basis: Arc<MonomialBasis>,
    q: u64,
    digits: Vec<u64>,
    remaining: u128,
}

impl Iterator for MPolyEnumerator {
    type Item = MPoly;

    fn next(&mut self) -> Option<MPoly> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let poly = MPoly {
            basis: Arc::clone(&self.basis),
            coeffs: self
                .digits
                .iter()
                .map(|&v| FieldElement::from_raw(v))
                .collect(),
        };
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.q {
                break;
            }
            *d = 0;
        }
        Some(poly)
    }
}

/// Enumerates all q^r polynomials over the basis, budget-checked.
pub fn enumerate_all(
    basis: &Arc<MonomialBasis>,
    spec: &FieldSpec,
    budget: Budget,
) -> Result<MPolyEnumerator> {
    let total = space_size(spec.q(), basis.r());
    budget.check(total)?;
    Ok(MPolyEnumerator {
        basis: Arc::clone(basis),
        q: spec.q(),
        digits: vec![0; basis.r()],
        remaining: total,
    })
}

/// q^r as u128 (saturating; callers budget-check).
pub fn space_size(q: u64, r: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..r {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}
