//! Coloured bipartite graphs with bitset adjacency.
//!
//! The left side is partitioned into colour classes (one class means
//! uncoloured); the right side is an indexed point set, in the algebraic
//! constructions always the full F_q^k in canonical point order. Common
//! neighbourhoods are word-wise ANDs of adjacency rows, the throughput-
//! critical operation for every verifier.

use rand::{Rng, RngCore};

use crate::bits::{intersect_all, Bitset};
use crate::field::{FieldElement, FieldSpec};
use crate::mpoly::{monomial_count, MonomialBasis, MPoly, PointTable};
use crate::{Budget, Error, Result};

/// Which construction a parameter set describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Threshold,
    Panchromatic,
}

/// An exact nonnegative rational, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let g = gcd(num.max(1), den);
        let g = if num == 0 { den } else { g };
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn integer(n: u64) -> Self {
        Ratio { num: n, den: 1 }
    }

    /// count >= self, compared exactly.
    pub fn le_count(&self, count: u64) -> bool {
        (count as u128) * (self.den as u128) >= self.num as u128
    }

    /// count == self, exactly (false unless self is integral).
    pub fn eq_count(&self, count: u64) -> bool {
        self.den == 1 && self.num == count
    }

    pub fn ceil(&self) -> u64 {
        self.num.div_ceil(self.den)
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// self * n, required to be an integer.
    pub fn times_exact(&self, n: u64) -> Result<u64> {
        let prod = (self.num as u128) * (n as u128);
        if !prod.is_multiple_of(self.den as u128) {
            return Err(Error::InvalidInstance(format!(
                "{}/{} * {n} is not an integer",
                self.num, self.den
            )));
        }
        let v = prod / self.den as u128;
        if v > u64::MAX as u128 {
            return Err(Error::Overflow { what: "threshold" });
        }
        Ok(v as u64)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Completeness-fraction target. The panchromatic target 1/(scale * of!)
/// is kept symbolic; the factorial is never evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PTarget {
    One,
    InverseScaledFactorial { scale: u64, of: u64 },
}

/// Parameters a construction promises, carried with the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphParams {
    pub kind: GraphKind,
    pub q: u64,
    pub k: usize,
    pub d: u64,
    pub big_d: Option<u64>,
    pub lambda: Option<u64>,
    /// Completeness bound: every k-set needs >= t (threshold) or at most
    /// t with a p-fraction exactly t (panchromatic).
    pub t: Ratio,
    /// Soundness bound on the offending tuples.
    pub s: u64,
    pub p_target: PTarget,
    /// True when s >= |B|, in which case the soundness clause cannot fail.
    pub soundness_vacuous: bool,
}

impl GraphParams {
    /// Threshold recipe: d = (k+1)^2 + 1, t = q/2, s = d^(k+1), over
    /// B = F_q^(k+1).
    pub fn threshold(q: u64, k: usize) -> Result<Self> {
        let d = ((k as u64 + 1) * (k as u64 + 1)) + 1;
        let s = checked_pow(d, k as u32 + 1)?;
        let b = checked_pow(q, k as u32 + 1)?;
        Ok(GraphParams {
            kind: GraphKind::Threshold,
            q,
            k,
            d,
            big_d: None,
            lambda: None,
            t: Ratio::new(q, 2),
            s,
            p_target: PTarget::One,
            soundness_vacuous: s >= b,
        })
    }

    /// Panchromatic recipe: d = k^2 + 2, D = lambda * d, t = D^k,
    /// s = D^k / lambda, p-target 1/(4 * (D^k)!), over B = F_q^k.
    pub fn panchromatic(q: u64, k: usize, lambda: u64) -> Result<Self> {
        assert!(lambda > 1, "lambda must exceed 1");
        let d = (k as u64) * (k as u64) + 2;
        let big_d = lambda.checked_mul(d).ok_or(Error::Overflow { what: "D" })?;
        let dk = checked_pow(big_d, k as u32)?;
        let s = dk / lambda; // = d * D^(k-1), exact since lambda | D
        let b = checked_pow(q, k as u32)?;
        Ok(GraphParams {
            kind: GraphKind::Panchromatic,
            q,
            k,
            d,
            big_d: Some(big_d),
            lambda: Some(lambda),
            t: Ratio::integer(dk),
            s,
            p_target: PTarget::InverseScaledFactorial { scale: 4, of: dk },
            soundness_vacuous: s >= b,
        })
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::Overflow {
            what: "parameter power",
        })?;
    }
    Ok(acc)
}

/// Generating data retained with a constructed graph: the polynomial per
/// left vertex, and for panchromatic graphs also the per-class offset w_i
/// and the per-vertex low-degree residual p (vertex = w_i + p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphLabels {
    pub spec: FieldSpec,
    pub k_vars: usize,
    pub polys: Vec<MPoly>,
    pub class_offsets: Option<Vec<MPoly>>,
    pub residuals: Option<Vec<MPoly>>,
}

/// Bipartite graph with a coloured left side and bitset adjacency rows.
///
/// Left vertices are globally indexed class by class: global index
/// `class_start(i) + j` is local vertex j of class i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredBipartiteGraph {
    class_sizes: Vec<usize>,
    b_size: usize,
    rows: Vec<Bitset>,
    pub params: Option<GraphParams>,
    pub labels: Option<GraphLabels>,
}

impl ColouredBipartiteGraph {
    /// Fixture constructor from explicit adjacency rows.
    pub fn from_rows(class_sizes: Vec<usize>, b_size: usize, rows: Vec<Bitset>) -> Result<Self> {
        let total: usize = class_sizes.iter().sum();
        if rows.len() != total {
            return Err(Error::SizeMismatch(format!(
                "{} rows for {total} left vertices",
                rows.len()
            )));
        }
        if rows.iter().any(|r| r.len() != b_size) {
            return Err(Error::SizeMismatch("row width != b_size".into()));
        }
        Ok(ColouredBipartiteGraph {
            class_sizes,
            b_size,
            rows,
            params: None,
            labels: None,
        })
    }

    /// Algebraic constructor: B = F_q^k_vars in canonical point order,
    /// with an edge (f, x) exactly where f(x) = 0.
    pub fn from_polynomials(
        classes: Vec<Vec<MPoly>>,
        spec: &FieldSpec,
        k_vars: usize,
        budget: Budget,
    ) -> Result<Self> {
        let class_sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        let polys: Vec<MPoly> = classes.into_iter().flatten().collect();
        assert!(!polys.is_empty());
        let basis = polys[0].basis();
        assert!(polys
            .iter()
            .all(|f| f.basis().k() == k_vars && f.basis().d() == basis.d()));
        let table = PointTable::build(basis, spec, budget)?;
        let b_size = table.num_points();
        let rows = crate::par::map_collect(polys.len(), |v| {
            let mut row = Bitset::new(b_size);
            for pi in 0..b_size {
                if table.vanishes(&polys[v], pi) {
                    row.set(pi);
                }
            }
            row
        });
        Ok(ColouredBipartiteGraph {
            class_sizes,
            b_size,
            rows,
            params: None,
            labels: Some(GraphLabels {
                spec: spec.clone(),
                k_vars,
                polys,
                class_offsets: None,
                residuals: None,
            }),
        })
    }

    #[inline]
    pub fn classes(&self) -> usize {
        self.class_sizes.len()
    }

    #[inline]
    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    #[inline]
    pub fn total_left(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn class_start(&self, class: usize) -> usize {
        self.class_sizes[..class].iter().sum()
    }

    /// (class, local) -> global left index.
    pub fn global_index(&self, class: usize, local: usize) -> usize {
        debug_assert!(local < self.class_sizes[class]);
        self.class_start(class) + local
    }

    /// global left index -> (class, local).
    pub fn class_of(&self, global: usize) -> (usize, usize) {
        let mut rem = global;
        for (ci, &sz) in self.class_sizes.iter().enumerate() {
            if rem < sz {
                return (ci, rem);
            }
            rem -= sz;
        }
        panic!("left index {global} out of range");
    }

    #[inline]
    pub fn row(&self, global: usize) -> &Bitset {
        &self.rows[global]
    }

    pub fn degree(&self, global: usize) -> u64 {
        self.rows[global].count_ones()
    }

    /// Right-side vertices adjacent to every vertex of `s`; N(empty) = B.
    pub fn common_neighbourhood(&self, s: &[usize]) -> Bitset {
        let rows: Vec<&Bitset> = s.iter().map(|&v| &self.rows[v]).collect();
        intersect_all(self.b_size, &rows)
    }

    /// |N(s)| without materializing the bitset.
    pub fn common_neighbourhood_size(&self, s: &[usize]) -> u64 {
        match s.len() {
            0 => self.b_size as u64,
            1 => self.rows[s[0]].count_ones(),
            2 => self.rows[s[0]].and_count(&self.rows[s[1]]),
            _ => {
                let mut acc = self.rows[s[0]].clone();
                for &v in &s[1..s.len() - 1] {
                    acc.and_assign(&self.rows[v]);
                }
                acc.and_count(&self.rows[s[s.len() - 1]])
            }
        }
    }

    /// Keeps a uniformly random `n_target`-subset of each colour class
    /// (independently per class, in class order on the stream). The kept
    /// vertices are reindexed in ascending original order; B, params and
    /// surviving labels carry over.
    pub fn restrict<R: RngCore>(&self, n_target: usize, rng: &mut R) -> Result<Self> {
        let mut kept_global: Vec<usize> = Vec::new();
        let mut new_sizes = Vec::with_capacity(self.class_sizes.len());
        for (ci, &sz) in self.class_sizes.iter().enumerate() {
            if n_target > sz {
                return Err(Error::InvalidTarget {
                    class: ci,
                    class_size: sz,
                    target: n_target,
                });
            }
            let mut idx: Vec<usize> = (0..sz).collect();
            for i in 0..n_target {
                let j = i + rng.random_range(0..sz - i);
                idx.swap(i, j);
            }
            let mut keep: Vec<usize> = idx[..n_target].to_vec();
            keep.sort_unstable();
            let start = self.class_start(ci);
            kept_global.extend(keep.into_iter().map(|j| start + j));
            new_sizes.push(n_target);
        }
        let rows = kept_global.iter().map(|&g| self.rows[g].clone()).collect();
        let labels = self.labels.as_ref().map(|l| GraphLabels {
            spec: l.spec.clone(),
            k_vars: l.k_vars,
            polys: kept_global.iter().map(|&g| l.polys[g].clone()).collect(),
            class_offsets: l.class_offsets.clone(),
            residuals: l
                .residuals
                .as_ref()
                .map(|r| kept_global.iter().map(|&g| r[g].clone()).collect()),
        });
        Ok(ColouredBipartiteGraph {
            class_sizes: new_sizes,
            b_size: self.b_size,
            rows,
            params: self.params.clone(),
            labels,
        })
    }
}

// ---------------------------------------------------------------------------
// Binary graph format (version 1)
//
//   magic "RABG", u16 version, u8 flags (1 = params, 2 = labels)
//   u32 class count, u64 per class size, u64 b_size
//   [params]  kind u8, q u64, k u32, d u64, opt D, opt lambda,
//             t (u64 num, u64 den), s u64, p-target, vacuous u8
//   rows      ceil(b_size/64) little-endian u64 words per left vertex
//   [labels]  field (q, p, e, modulus), k_vars u32, basis degree u64,
//             r coefficients per vertex in basis order, optional class
//             offsets, optional residuals with their own degree
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"RABG";
const VERSION: u16 = 1;
const FLAG_PARAMS: u8 = 1;
const FLAG_LABELS: u8 = 2;

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn opt_u64(&mut self, v: Option<u64>) {
        match v {
            Some(x) => {
                self.u8(1);
                self.u64(x);
            }
            None => self.u8(0),
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::MalformedInput {
            offset: self.pos,
            what: what.to_string(),
        })
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return self.fail("truncated stream");
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }
    fn opt_u64(&mut self) -> Result<Option<u64>> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(self.u64()?)),
            _ => self.fail("bad option tag"),
        }
    }
}

impl ColouredBipartiteGraph {
    pub fn serialize(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.buf.extend_from_slice(MAGIC);
        w.u16(VERSION);
        let mut flags = 0u8;
        if self.params.is_some() {
            flags |= FLAG_PARAMS;
        }
        if self.labels.is_some() {
            flags |= FLAG_LABELS;
        }
        w.u8(flags);
        w.u32(self.class_sizes.len() as u32);
        for &sz in &self.class_sizes {
            w.u64(sz as u64);
        }
        w.u64(self.b_size as u64);
        if let Some(p) = &self.params {
            w.u8(match p.kind {
                GraphKind::Threshold => 0,
                GraphKind::Panchromatic => 1,
            });
            w.u64(p.q);
            w.u32(p.k as u32);
            w.u64(p.d);
            w.opt_u64(p.big_d);
            w.opt_u64(p.lambda);
            w.u64(p.t.num);
            w.u64(p.t.den);
            w.u64(p.s);
            match p.p_target {
                PTarget::One => w.u8(0),
                PTarget::InverseScaledFactorial { scale, of } => {
                    w.u8(1);
                    w.u64(scale);
                    w.u64(of);
                }
            }
            w.u8(p.soundness_vacuous as u8);
        }
        for row in &self.rows {
            for &word in row.words() {
                w.u64(word);
            }
        }
        if let Some(l) = &self.labels {
            w.u64(l.spec.q());
            w.u64(l.spec.characteristic());
            w.u32(l.spec.extension_degree());
            w.u32(l.spec.modulus().len() as u32);
            for &c in l.spec.modulus() {
                w.u64(c);
            }
            w.u32(l.k_vars as u32);
            let d = l.polys[0].basis().d() as u64;
            w.u64(d);
            for f in &l.polys {
                debug_assert_eq!(f.basis().d() as u64, d);
                for c in f.coeffs() {
                    w.u64(c.value());
                }
            }
            match &l.class_offsets {
                Some(offsets) => {
                    w.u8(1);
                    for f in offsets {
                        debug_assert_eq!(f.basis().d() as u64, d);
                        for c in f.coeffs() {
                            w.u64(c.value());
                        }
                    }
                }
                None => w.u8(0),
            }
            match &l.residuals {
                Some(residuals) => {
                    w.u8(1);
                    let rd = residuals[0].basis().d() as u64;
                    w.u64(rd);
                    for f in residuals {
                        for c in f.coeffs() {
                            w.u64(c.value());
                        }
                    }
                }
                None => w.u8(0),
            }
        }
        w.buf
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.bytes(4)? != MAGIC {
            return Err(Error::MalformedInput {
                offset: 0,
                what: "bad magic".into(),
            });
        }
        let version = r.u16()?;
        if version != VERSION {
            return r.fail(&format!("unsupported version {version}"));
        }
        let flags = r.u8()?;
        let k_classes = r.u32()? as usize;
        if k_classes == 0 || k_classes > 1 << 20 {
            return r.fail("implausible class count");
        }
        let mut class_sizes = Vec::new();
        for _ in 0..k_classes {
            class_sizes.push(r.u64()? as usize);
        }
        let total: usize = class_sizes.iter().sum();
        let b_size = r.u64()? as usize;
        let params = if flags & FLAG_PARAMS != 0 {
            let kind = match r.u8()? {
                0 => GraphKind::Threshold,
                1 => GraphKind::Panchromatic,
                _ => return r.fail("bad graph kind"),
            };
            let q = r.u64()?;
            let k = r.u32()? as usize;
            let d = r.u64()?;
            let big_d = r.opt_u64()?;
            let lambda = r.opt_u64()?;
            let t_num = r.u64()?;
            let t_den = r.u64()?;
            if t_den == 0 {
                return r.fail("zero threshold denominator");
            }
            let s = r.u64()?;
            let p_target = match r.u8()? {
                0 => PTarget::One,
                1 => PTarget::InverseScaledFactorial {
                    scale: r.u64()?,
                    of: r.u64()?,
                },
                _ => return r.fail("bad p-target tag"),
            };
            let soundness_vacuous = match r.u8()? {
                0 => false,
                1 => true,
                _ => return r.fail("bad flag byte"),
            };
            Some(GraphParams {
                kind,
                q,
                k,
                d,
                big_d,
                lambda,
                t: Ratio::new(t_num, t_den),
                s,
                p_target,
                soundness_vacuous,
            })
        } else {
            None
        };
        // Lengths below come from the wire; never preallocate from them,
        // so truncated or hostile headers fail on read instead of on an
        // oversized allocation.
        let words_per_row = b_size.div_ceil(64);
        let mut rows = Vec::new();
        for _ in 0..total {
            let mut words = Vec::new();
            for _ in 0..words_per_row {
                words.push(r.u64()?);
            }
            match Bitset::from_words(b_size, words) {
                Some(b) => rows.push(b),
                None => return r.fail("adjacency row has bits beyond b_size"),
            }
        }
        let labels = if flags & FLAG_LABELS != 0 {
            let q = r.u64()?;
            let p = r.u64()?;
            let e = r.u32()?;
            let modlen = r.u32()? as usize;
            let mut modulus = Vec::new();
            for _ in 0..modlen {
                modulus.push(r.u64()?);
            }
            let spec = FieldSpec::new(q).map_err(|_| Error::MalformedInput {
                offset: r.pos,
                what: format!("{q} is not a prime power"),
            })?;
            if spec.characteristic() != p
                || spec.extension_degree() != e
                || spec.modulus() != modulus.as_slice()
            {
                return r.fail("field description mismatch");
            }
            let k_vars = r.u32()? as usize;
            let d = r.u64()? as usize;
            let basis = MonomialBasis::new(k_vars, d)?;
            let rr = monomial_count(k_vars, d)? as usize;
            let read_poly = |r: &mut Reader| -> Result<MPoly> {
                let mut coeffs = Vec::new();
                for _ in 0..rr {
                    let v = r.u64()?;
                    if v >= q {
                        return r.fail("coefficient out of field range");
                    }
                    coeffs.push(FieldElement::from_raw(v));
                }
                Ok(MPoly::from_coeffs(&basis, coeffs))
            };
            let mut polys = Vec::new();
            for _ in 0..total {
                polys.push(read_poly(&mut r)?);
            }
            let class_offsets = match r.u8()? {
                0 => None,
                1 => {
                    let mut v = Vec::new();
                    for _ in 0..k_classes {
                        v.push(read_poly(&mut r)?);
                    }
                    Some(v)
                }
                _ => return r.fail("bad offsets tag"),
            };
            let residuals = match r.u8()? {
                0 => None,
                1 => {
                    let rd = r.u64()? as usize;
                    let rbasis = MonomialBasis::new(k_vars, rd)?;
                    let rrr = rbasis.r();
                    let mut v = Vec::new();
                    for _ in 0..total {
                        let mut coeffs = Vec::new();
                        for _ in 0..rrr {
                            let val = r.u64()?;
                            if val >= q {
                                return r.fail("coefficient out of field range");
                            }
                            coeffs.push(FieldElement::from_raw(val));
                        }
                        v.push(MPoly::from_coeffs(&rbasis, coeffs));
                    }
                    Some(v)
                }
                _ => return r.fail("bad residuals tag"),
            };
            Some(GraphLabels {
                spec,
                k_vars,
                polys,
                class_offsets,
                residuals,
            })
        } else {
            None
        };
        if r.pos != bytes.len() {
            return r.fail("trailing bytes after graph");
        }
        Ok(ColouredBipartiteGraph {
            class_sizes,
            b_size,
            rows,
            params,
            labels,
        })
    }
}
