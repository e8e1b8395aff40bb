//! Exhaustive and Monte Carlo certification of threshold/panchromatic
//! graph properties, and exact/sampled statistics of zero sets of random
//! polynomial systems.
//!
//! Exhaustive verification consumes no randomness and is a deterministic
//! function of the graph. Monte Carlo verification is conservative: a
//! sampled violation always fails the clause, while a clean sample only
//! passes it at the reported confidence. Sampling is batched over derived
//! substreams, so reports depend only on the seed, not the thread count.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::bigraph::{ColouredBipartiteGraph, GraphKind, GraphParams, Ratio};
use crate::bits::Bitset;
use crate::field::{FieldElement, FieldSpec};
use crate::mpoly::{
    enumerate_all, monomial_count, space_size, MonomialBasis, MPoly, PointTable,
};
use crate::rng::{indexed_stream, local_master};
use crate::{Budget, Error, Result};

/// Tuples retained as counterexamples in a report.
pub const MAX_WITNESSES: usize = 8;

const MC_BATCH: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    /// Samples per clause.
    MonteCarlo { samples: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Completeness,
    Soundness,
}

/// A violating tuple and its common-neighbourhood size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub clause: Clause,
    pub vertices: Vec<usize>,
    pub size: u64,
}

/// 95% Wilson score interval for a binomial proportion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WilsonInterval {
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson95(successes: u64, trials: u64) -> WilsonInterval {
    if trials == 0 {
        return WilsonInterval { lo: 0.0, hi: 1.0 };
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    WilsonInterval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

/// Statistics certifying or refuting the defining clauses for one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub kind: GraphKind,
    pub exhaustive: bool,
    pub completeness_tuples: u64,
    pub soundness_tuples: u64,
    pub min_complete: u64,
    pub max_complete: u64,
    /// Completeness tuples whose neighbourhood size equals t exactly
    /// (meaningful for panchromatic graphs).
    pub exact_t_count: u64,
    pub max_sound: u64,
    pub complete_violations: u64,
    pub sound_violations: u64,
    pub witnesses: Vec<Witness>,
    pub passed_completeness: bool,
    pub passed_soundness: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.passed_completeness && self.passed_soundness
    }

    /// Fraction of completeness tuples with |N| exactly t.
    pub fn frac_exact_t(&self) -> Ratio {
        if self.completeness_tuples == 0 {
            Ratio::integer(0)
        } else {
            Ratio::new(self.exact_t_count, self.completeness_tuples)
        }
    }

    pub fn frac_exact_t_wilson(&self) -> WilsonInterval {
        wilson95(self.exact_t_count, self.completeness_tuples)
    }

    /// Line-oriented key=value rendering (the report file body).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            GraphKind::Threshold => "threshold",
            GraphKind::Panchromatic => "panchromatic",
        };
        out.push_str(&format!("kind={kind}\n"));
        out.push_str(&format!(
            "mode={}\n",
            if self.exhaustive { "exhaustive" } else { "montecarlo" }
        ));
        out.push_str(&format!(
            "completeness_tuples={}\n",
            self.completeness_tuples
        ));
        out.push_str(&format!("soundness_tuples={}\n", self.soundness_tuples));
        out.push_str(&format!("min_complete={}\n", self.min_complete));
        out.push_str(&format!("max_complete={}\n", self.max_complete));
        out.push_str(&format!("exact_t_count={}\n", self.exact_t_count));
        out.push_str(&format!("frac_exact_t={}\n", self.frac_exact_t()));
        let w = self.frac_exact_t_wilson();
        out.push_str(&format!("frac_exact_t_wilson95={:.6},{:.6}\n", w.lo, w.hi));
        out.push_str(&format!("max_sound={}\n", self.max_sound));
        out.push_str(&format!(
            "complete_violations={}\n",
            self.complete_violations
        ));
        out.push_str(&format!("sound_violations={}\n", self.sound_violations));
        for wit in &self.witnesses {
            let clause = match wit.clause {
                Clause::Completeness => "completeness",
                Clause::Soundness => "soundness",
            };
            let verts: Vec<String> = wit.vertices.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!(
                "witness={clause}:{}:{}\n",
                verts.join(","),
                wit.size
            ));
        }
        out.push_str(&format!(
            "passed_completeness={}\n",
            self.passed_completeness
        ));
        out.push_str(&format!("passed_soundness={}\n", self.passed_soundness));
        out.push_str(&format!("passed={}\n", self.passed()));
        out
    }
}

/// A clause's violation predicate on a neighbourhood size.
#[derive(Clone, Copy)]
enum ViolationRule {
    /// Violated when count < bound (threshold completeness).
    Below(Ratio),
    /// Violated when count > bound (caps and soundness clauses).
    Above(u64),
}

impl ViolationRule {
    fn violated(&self, count: u64) -> bool {
        match self {
            ViolationRule::Below(t) => !t.le_count(count),
            ViolationRule::Above(s) => count > *s,
        }
    }
}

#[derive(Clone)]
struct TupleStats {
    tuples: u64,
    min: u64,
    max: u64,
    exact_t: u64,
    violations: u64,
    witnesses: Vec<Witness>,
}

impl TupleStats {
    fn new() -> Self {
        TupleStats {
            tuples: 0,
            min: u64::MAX,
            max: 0,
            exact_t: 0,
            violations: 0,
            witnesses: Vec::new(),
        }
    }

    fn record(
        &mut self,
        vertices: &[usize],
        count: u64,
        rule: ViolationRule,
        exact_target: Option<u64>,
        clause: Clause,
    ) {
        self.tuples += 1;
        self.min = self.min.min(count);
        self.max = self.max.max(count);
        if exact_target == Some(count) {
            self.exact_t += 1;
        }
        if rule.violated(count) {
            self.violations += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness {
                    clause,
                    vertices: vertices.to_vec(),
                    size: count,
                });
            }
        }
    }

    /// In-order associative merge.
    fn absorb(&mut self, other: TupleStats) {
        self.tuples += other.tuples;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        self.exact_t += other.exact_t;
        self.violations += other.violations;
        for w in other.witnesses {
            if self.witnesses.len() >= MAX_WITNESSES {
                break;
            }
            self.witnesses.push(w);
        }
    }

    fn min_or_zero(&self) -> u64 {
        if self.tuples == 0 {
            0
        } else {
            self.min
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Exhaustive scan over all `size`-subsets of the left side, partitioned
/// by first element and merged in order.
fn scan_combinations(
    g: &ColouredBipartiteGraph,
    size: usize,
    rule: ViolationRule,
    exact_target: Option<u64>,
    clause: Clause,
) -> TupleStats {
    let n = g.total_left();
    if size > n {
        return TupleStats::new();
    }
    let chunks = crate::par::map_collect(n - size + 1, |first| {
        let mut stats = TupleStats::new();
        if size == 1 {
            stats.record(&[first], g.degree(first), rule, exact_target, clause);
        } else if size == 2 {
            for j in first + 1..n {
                let cnt = g.row(first).and_count(g.row(j));
                stats.record(&[first, j], cnt, rule, exact_target, clause);
            }
        } else {
            let mut chosen = vec![first];
            descend_combinations(
                g,
                size,
                &mut chosen,
                g.row(first).clone(),
                rule,
                exact_target,
                clause,
                &mut stats,
            );
        }
        stats
    });
    let mut total = TupleStats::new();
    for c in chunks {
        total.absorb(c);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn descend_combinations(
    g: &ColouredBipartiteGraph,
    size: usize,
    chosen: &mut Vec<usize>,
    prefix: Bitset,
    rule: ViolationRule,
    exact_target: Option<u64>,
    clause: Clause,
    stats: &mut TupleStats,
) {
    if chosen.len() == size {
        stats.record(chosen, prefix.count_ones(), rule, exact_target, clause);
        return;
    }
    let need = size - chosen.len();
    let last = *chosen.last().unwrap();
    for i in last + 1..=g.total_left() - need {
        if chosen.len() + 1 == size {
            let cnt = prefix.and_count(g.row(i));
            chosen.push(i);
            stats.record(chosen, cnt, rule, exact_target, clause);
            chosen.pop();
        } else {
            let mut next = prefix.clone();
            next.and_assign(g.row(i));
            chosen.push(i);
            descend_combinations(g, size, chosen, next, rule, exact_target, clause, stats);
            chosen.pop();
        }
    }
}

/// Exhaustive scan over panchromatic tuples (one vertex per class, in
/// product order), partitioned by the first class's local index.
fn scan_products(
    g: &ColouredBipartiteGraph,
    rule: ViolationRule,
    exact_target: Option<u64>,
) -> TupleStats {
    let sizes = g.class_sizes().to_vec();
    let chunks = crate::par::map_collect(sizes[0], |i0| {
        let mut stats = TupleStats::new();
        let v0 = g.global_index(0, i0);
        if sizes.len() == 2 {
            for i1 in 0..sizes[1] {
                let v1 = g.global_index(1, i1);
                let cnt = g.row(v0).and_count(g.row(v1));
                stats.record(&[v0, v1], cnt, rule, exact_target, Clause::Completeness);
            }
        } else {
            let mut chosen = vec![v0];
            descend_products(g, &sizes, &mut chosen, g.row(v0).clone(), rule, exact_target, &mut stats);
        }
        stats
    });
    let mut total = TupleStats::new();
    for c in chunks {
        total.absorb(c);
    }
    total
}

fn descend_products(
    g: &ColouredBipartiteGraph,
    sizes: &[usize],
    chosen: &mut Vec<usize>,
    prefix: Bitset,
    rule: ViolationRule,
    exact_target: Option<u64>,
    stats: &mut TupleStats,
) {
    let class = chosen.len();
    if class == sizes.len() {
        stats.record(chosen, prefix.count_ones(), rule, exact_target, Clause::Completeness);
        return;
    }
    for i in 0..sizes[class] {
        let v = g.global_index(class, i);
        if class + 1 == sizes.len() {
            let cnt = prefix.and_count(g.row(v));
            chosen.push(v);
            stats.record(chosen, cnt, rule, exact_target, Clause::Completeness);
            chosen.pop();
        } else {
            let mut next = prefix.clone();
            next.and_assign(g.row(v));
            chosen.push(v);
            descend_products(g, sizes, chosen, next, rule, exact_target, stats);
            chosen.pop();
        }
    }
}

/// Colour signatures: how many vertices a k-subset takes from each class.
/// Soundness quantifies over signatures where some class contributes at
/// least two (equivalently, the subset misses some class).
fn repeated_colour_signatures(classes: usize, k: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; classes];
    fn rec(
        class: usize,
        remaining: usize,
        sizes: &[usize],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if class == current.len() {
            if remaining == 0 && current.iter().any(|&m| m >= 2) {
                out.push(current.clone());
            }
            return;
        }
        for m in 0..=remaining.min(sizes[class]) {
            current[class] = m;
            rec(class + 1, remaining - m, sizes, current, out);
        }
        current[class] = 0;
    }
    rec(0, k, sizes, &mut current, &mut out);
    out
}

/// Exhaustive scan over k-subsets hitting some class twice, enumerated
/// signature by signature (so no subset is visited twice), merged in
/// signature order.
fn scan_repeated_colour(g: &ColouredBipartiteGraph, k: usize, rule: ViolationRule) -> TupleStats {
    let sizes = g.class_sizes().to_vec();
    let signatures = repeated_colour_signatures(sizes.len(), k, &sizes);
    let chunks = crate::par::map_collect(signatures.len(), |si| {
        let signature = &signatures[si];
        let mut stats = TupleStats::new();
        let mut tuple: Vec<usize> = Vec::with_capacity(k);
        enumerate_signature(g, signature, 0, &mut tuple, rule, &mut stats);
        stats
    });
    let mut total = TupleStats::new();
    for c in chunks {
        total.absorb(c);
    }
    total
}

fn enumerate_signature(
    g: &ColouredBipartiteGraph,
    signature: &[usize],
    class: usize,
    tuple: &mut Vec<usize>,
    rule: ViolationRule,
    stats: &mut TupleStats,
) {
    if class == signature.len() {
        let cnt = g.common_neighbourhood_size(tuple);
        stats.record(tuple, cnt, rule, None, Clause::Soundness);
        return;
    }
    let m = signature[class];
    if m == 0 {
        enumerate_signature(g, signature, class + 1, tuple, rule, stats);
        return;
    }
    let n = g.class_sizes()[class];
    let start = g.class_start(class);
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        let len_before = tuple.len();
        tuple.extend(combo.iter().map(|&j| start + j));
        enumerate_signature(g, signature, class + 1, tuple, rule, stats);
        tuple.truncate(len_before);
        // Next m-combination of [0, n) in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] != i + n - m {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..m {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Uniform k-subset of [0, n) by Floyd's algorithm, returned sorted.
fn sample_combination<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut chosen = std::collections::BTreeSet::new();
    for j in n - k..n {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

/// Monte Carlo scan: `samples` tuples drawn by `draw`, batched over
/// derived substreams for thread-count invariance.
fn scan_sampled<F>(
    g: &ColouredBipartiteGraph,
    samples: u64,
    master: u64,
    rule: ViolationRule,
    exact_target: Option<u64>,
    clause: Clause,
    draw: F,
) -> TupleStats
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<usize> + Sync + Send,
{
    let batches = samples.div_ceil(MC_BATCH) as usize;
    let chunks = crate::par::map_collect(batches, |b| {
        let mut rng = indexed_stream(master, b as u64);
        let in_batch = MC_BATCH.min(samples - b as u64 * MC_BATCH);
        let mut stats = TupleStats::new();
        for _ in 0..in_batch {
            let tuple = draw(&mut rng);
            let cnt = g.common_neighbourhood_size(&tuple);
            stats.record(&tuple, cnt, rule, exact_target, clause);
        }
        stats
    });
    let mut total = TupleStats::new();
    for c in chunks {
        total.absorb(c);
    }
    total
}

fn build_report(
    kind: GraphKind,
    exhaustive: bool,
    complete: TupleStats,
    sound: TupleStats,
) -> VerificationReport {
    let mut witnesses = complete.witnesses.clone();
    for w in sound.witnesses.clone() {
        if witnesses.len() >= MAX_WITNESSES {
            break;
        }
        witnesses.push(w);
    }
    VerificationReport {
        kind,
        exhaustive,
        completeness_tuples: complete.tuples,
        soundness_tuples: sound.tuples,
        min_complete: complete.min_or_zero(),
        max_complete: complete.max,
        exact_t_count: complete.exact_t,
        max_sound: sound.max,
        complete_violations: complete.violations,
        sound_violations: sound.violations,
        witnesses,
        passed_completeness: complete.violations == 0,
        passed_soundness: sound.violations == 0,
    }
}

/// Checks every (or a sampled set of) k-subsets against |N| >= t and
/// (k+1)-subsets against |N| <= s.
pub fn verify_threshold<R: RngCore>(
    g: &ColouredBipartiteGraph,
    params: &GraphParams,
    mode: VerifyMode,
    budget: Budget,
    rng: &mut R,
) -> Result<VerificationReport> {
    let n = g.total_left();
    let k = params.k;
    if k == 0 || k + 1 > n {
        return Err(Error::InvalidInstance(format!(
            "threshold parameter k = {k} out of range for {n} vertices"
        )));
    }
    let complete_rule = ViolationRule::Below(params.t);
    let sound_rule = ViolationRule::Above(params.s);
    let (complete, sound) = match mode {
        VerifyMode::Exhaustive => {
            let required = binomial(n as u64, k as u64) + binomial(n as u64, k as u64 + 1);
            budget.check(required)?;
            (
                scan_combinations(g, k, complete_rule, None, Clause::Completeness),
                scan_combinations(g, k + 1, sound_rule, None, Clause::Soundness),
            )
        }
        VerifyMode::MonteCarlo { samples } => {
            // One local master per clause, drawn in a fixed order.
            let master_complete = local_master(rng);
            let master_sound = local_master(rng);
            let complete = scan_sampled(
                g,
                samples,
                master_complete,
                complete_rule,
                None,
                Clause::Completeness,
                |r| sample_combination(r, n, k),
            );
            let sound = scan_sampled(
                g,
                samples,
                master_sound,
                sound_rule,
                None,
                Clause::Soundness,
                |r| sample_combination(r, n, k + 1),
            );
            (complete, sound)
        }
    };
    Ok(build_report(
        GraphKind::Threshold,
        matches!(mode, VerifyMode::Exhaustive),
        complete,
        sound,
    ))
}

/// Checks panchromatic tuples against the cap |N| <= t (recording how
/// many hit t exactly) and repeated-colour k-subsets against |N| <= s.
pub fn verify_panchromatic<R: RngCore>(
    g: &ColouredBipartiteGraph,
    params: &GraphParams,
    mode: VerifyMode,
    budget: Budget,
    rng: &mut R,
) -> Result<VerificationReport> {
    let k = params.k;
    if g.classes() != k || k < 2 {
        return Err(Error::InvalidInstance(format!(
            "panchromatic verification needs k = {k} colour classes, graph has {}",
            g.classes()
        )));
    }
    if g.total_left() < k || g.class_sizes().iter().all(|&s| s < 2) {
        return Err(Error::InvalidInstance(
            "graph too small: no repeated-colour k-subsets exist".into(),
        ));
    }
    if !params.t.is_integer() {
        return Err(Error::InvalidInstance(
            "panchromatic t must be an integer".into(),
        ));
    }
    let t = params.t.num;
    let cap_rule = ViolationRule::Above(t);
    let sound_rule = ViolationRule::Above(params.s);
    let n_total = g.total_left();
    let (complete, sound) = match mode {
        VerifyMode::Exhaustive => {
            let transversals: u128 = g
                .class_sizes()
                .iter()
                .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
            let all_subsets = binomial(n_total as u64, k as u64);
            budget.check(transversals + all_subsets.saturating_sub(transversals))?;
            (
                scan_products(g, cap_rule, Some(t)),
                scan_repeated_colour(g, k, sound_rule),
            )
        }
        VerifyMode::MonteCarlo { samples } => {
            // One local master per clause, drawn in a fixed order.
            let master_complete = local_master(rng);
            let master_sound = local_master(rng);
            let sizes = g.class_sizes().to_vec();
            let complete = scan_sampled(
                g,
                samples,
                master_complete,
                cap_rule,
                Some(t),
                Clause::Completeness,
                |r| {
                    (0..sizes.len())
                        .map(|ci| {
                            let local = r.random_range(0..sizes[ci]);
                            sizes[..ci].iter().sum::<usize>() + local
                        })
                        .collect()
                },
            );
            let class_of: Vec<usize> = g
                .class_sizes()
                .iter()
                .enumerate()
                .flat_map(|(ci, &s)| std::iter::repeat_n(ci, s))
                .collect();
            let sound = scan_sampled(
                g,
                samples,
                master_sound,
                sound_rule,
                None,
                Clause::Soundness,
                move |r| loop {
                    let tuple = sample_combination(r, n_total, k);
                    let mut seen = vec![false; sizes.len()];
                    let mut repeated = false;
                    for &v in &tuple {
                        let c = class_of[v];
                        if seen[c] {
                            repeated = true;
                            break;
                        }
                        seen[c] = true;
                    }
                    if repeated {
                        return tuple;
                    }
                },
            );
            (complete, sound)
        }
    };
    Ok(build_report(
        GraphKind::Panchromatic,
        matches!(mode, VerifyMode::Exhaustive),
        complete,
        sound,
    ))
}

/// Dispatches on the parameter kind.
pub fn verify_graph<R: RngCore>(
    g: &ColouredBipartiteGraph,
    params: &GraphParams,
    mode: VerifyMode,
    budget: Budget,
    rng: &mut R,
) -> Result<VerificationReport> {
    match params.kind {
        GraphKind::Threshold => verify_threshold(g, params, mode, budget, rng),
        GraphKind::Panchromatic => verify_panchromatic(g, params, mode, budget, rng),
    }
}

// ---------------------------------------------------------------------------
// Zero-set statistics of random polynomial systems
// ---------------------------------------------------------------------------

/// Distribution of Z = |common zero set| over sampled or enumerated
/// systems of k random polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZHistogram {
    pub k: usize,
    pub q: u64,
    pub degrees: Vec<u64>,
    pub counts: BTreeMap<u64, u64>,
    pub trials: u64,
    pub exact: bool,
}

impl ZHistogram {
    pub fn probability_eq(&self, z: u64) -> Ratio {
        Ratio::new(*self.counts.get(&z).unwrap_or(&0), self.trials)
    }

    pub fn probability_gt(&self, z: u64) -> Ratio {
        let above: u64 = self
            .counts
            .range(z + 1..)
            .map(|(_, &c)| c)
            .sum();
        Ratio::new(above, self.trials)
    }

    pub fn count_gt(&self, z: u64) -> u64 {
        self.counts.range(z + 1..).map(|(_, &c)| c).sum()
    }

    pub fn to_text(&self) -> String {
        let degrees: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        let mut out = format!(
            "op=bezout\nmode={}\nk={}\nq={}\ndegrees={}\ntrials={}\n",
            if self.exact { "exact" } else { "montecarlo" },
            self.k,
            self.q,
            degrees.join(","),
            self.trials
        );
        for (z, c) in &self.counts {
            out.push_str(&format!("z_{z}={c}\n"));
        }
        out
    }
}

/// Per-polynomial root bitsets for one degree space, shared across trials.
struct DegreeSpace {
    basis: std::sync::Arc<MonomialBasis>,
    table: PointTable,
}

fn degree_spaces(
    k: usize,
    degrees: &[u64],
    spec: &FieldSpec,
    budget: Budget,
) -> Result<Vec<DegreeSpace>> {
    degrees
        .iter()
        .map(|&d| {
            let basis = MonomialBasis::new(k, d as usize)?;
            let table = PointTable::build(&basis, spec, budget)?;
            Ok(DegreeSpace { basis, table })
        })
        .collect()
}

fn count_common_zeros(polys: &[MPoly], spaces: &[DegreeSpace], num_points: usize) -> u64 {
    let mut count = 0u64;
    'points: for pi in 0..num_points {
        for (f, sp) in polys.iter().zip(spaces) {
            if !sp.table.vanishes(f, pi) {
                continue 'points;
            }
        }
        count += 1;
    }
    count
}

/// Monte Carlo histogram of Z over independent uniform systems.
pub fn bezout_trials<R: RngCore>(
    k: usize,
    degrees: &[u64],
    q: u64,
    trials: u64,
    budget: Budget,
    rng: &mut R,
) -> Result<ZHistogram> {
    if degrees.len() != k {
        return Err(Error::InvalidInstance(format!(
            "need {k} degrees, got {}",
            degrees.len()
        )));
    }
    let spec = FieldSpec::new(q)?;
    let spaces = degree_spaces(k, degrees, &spec, budget)?;
    let num_points = spaces[0].table.num_points();
    let master = local_master(rng);
    let batches = trials.div_ceil(MC_BATCH) as usize;
    let partial: Vec<BTreeMap<u64, u64>> = crate::par::map_collect(batches, |b| {
        let mut rng = indexed_stream(master, b as u64);
        let in_batch = MC_BATCH.min(trials - b as u64 * MC_BATCH);
        let mut counts = BTreeMap::new();
        for _ in 0..in_batch {
            let polys: Vec<MPoly> = spaces
                .iter()
                .map(|sp| MPoly::sample(&sp.basis, &spec, &mut rng))
                .collect();
            let z = count_common_zeros(&polys, &spaces, num_points);
            *counts.entry(z).or_insert(0) += 1;
        }
        counts
    });
    let mut counts = BTreeMap::new();
    for part in partial {
        for (z, c) in part {
            *counts.entry(z).or_insert(0) += c;
        }
    }
    Ok(ZHistogram {
        k,
        q,
        degrees: degrees.to_vec(),
        counts,
        trials,
        exact: false,
    })
}

/// Exact distribution of Z by enumerating every polynomial tuple in the
/// product of the k coefficient spaces.
pub fn bezout_exact(k: usize, degrees: &[u64], q: u64, budget: Budget) -> Result<ZHistogram> {
    if degrees.len() != k {
        return Err(Error::InvalidInstance(format!(
            "need {k} degrees, got {}",
            degrees.len()
        )));
    }
    let spec = FieldSpec::new(q)?;
    let mut total: u128 = 1;
    for &d in degrees {
        let r = monomial_count(k, d as usize)?;
        total = total.saturating_mul(space_size(q, r as usize));
    }
    budget.check(total)?;
    let spaces = degree_spaces(k, degrees, &spec, budget)?;
    let num_points = spaces[0].table.num_points();

    // Root bitset per polynomial per space; tuples are then AND popcounts.
    let mut root_sets: Vec<Vec<Bitset>> = Vec::with_capacity(k);
    for sp in &spaces {
        let polys: Vec<MPoly> = enumerate_all(&sp.basis, &spec, budget)?.collect();
        let sets = crate::par::map_collect(polys.len(), |i| {
            let mut b = Bitset::new(num_points);
            for pi in 0..num_points {
                if sp.table.vanishes(&polys[i], pi) {
                    b.set(pi);
                }
            }
            b
        });
        root_sets.push(sets);
    }

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut index = vec![0usize; k];
    loop {
        let mut acc = root_sets[0][index[0]].clone();
        for (space, &i) in root_sets.iter().zip(&index).skip(1) {
            acc.and_assign(&space[i]);
        }
        *counts.entry(acc.count_ones()).or_insert(0) += 1;
        let mut carried = true;
        for pos in (0..k).rev() {
            index[pos] += 1;
            if index[pos] < root_sets[pos].len() {
                carried = false;
                break;
            }
            index[pos] = 0;
        }
        if carried {
            break;
        }
    }
    Ok(ZHistogram {
        k,
        q,
        degrees: degrees.to_vec(),
        counts,
        trials: total as u64,
        exact: true,
    })
}

/// Result of the exact vanishing-probability enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishReport {
    pub m: usize,
    pub vanishing: u64,
    pub total: u64,
    pub probability: Ratio,
    /// Whether q > C(m,2) and d >= m-1 hold (reported, not enforced).
    pub hypotheses_hold: bool,
}

impl VanishReport {
    pub fn to_text(&self) -> String {
        format!(
            "m={}\nvanishing={}\ntotal={}\nprobability={}\nhypotheses_hold={}\n",
            self.m, self.vanishing, self.total, self.probability, self.hypotheses_hold
        )
    }
}

/// Exact fraction of F_q[X_1..X_k]_{<=d} vanishing at all the given
/// distinct points, by full enumeration of the q^r coefficient vectors.
pub fn vanish_probability_exact(
    k: usize,
    d: usize,
    q: u64,
    points: &[Vec<FieldElement>],
    budget: Budget,
) -> Result<VanishReport> {
    let spec = FieldSpec::new(q)?;
    for (i, p) in points.iter().enumerate() {
        if p.len() != k {
            return Err(Error::InvalidInstance(format!(
                "point {i} has {} coordinates, expected {k}",
                p.len()
            )));
        }
        if points[..i].contains(p) {
            return Err(Error::DuplicatePoints(i));
        }
    }
    let basis = MonomialBasis::new(k, d)?;
    let total_u128 = space_size(q, basis.r());
    budget.check(total_u128)?;
    let total = total_u128 as u64;
    let m = points.len();
    if m == 0 {
        return Ok(VanishReport {
            m,
            vanishing: total,
            total,
            probability: Ratio::integer(1),
            hypotheses_hold: true,
        });
    }
    // Monomial values at each target point, so the vanishing test per
    // polynomial is m dot products.
    let rows: Vec<Vec<FieldElement>> = points
        .iter()
        .map(|p| {
            (0..basis.r())
                .map(|i| {
                    let mono = basis.monomial(i);
                    let mut v = FieldElement::ONE;
                    for (j, &a) in mono.iter().enumerate() {
                        for _ in 0..a {
                            v = spec.mul(v, p[j]);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut vanishing = 0u64;
    for f in enumerate_all(&basis, &spec, budget)? {
        let all_zero = rows.iter().all(|row| {
            let mut acc = FieldElement::ZERO;
            for (&c, &mv) in f.coeffs().iter().zip(row) {
                acc = spec.add(acc, spec.mul(c, mv));
            }
            acc.is_zero()
        });
        if all_zero {
            vanishing += 1;
        }
    }
    let hypotheses_hold = q > (m as u64 * (m as u64 - 1)) / 2 && d + 1 >= m;
    Ok(VanishReport {
        m,
        vanishing,
        total,
        probability: Ratio::new(vanishing, total),
        hypotheses_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::PTarget;
    use crate::construct::{sample_panchromatic, sample_threshold};
    use crate::field::field_new;
    use crate::fixtures;
    use crate::mpoly::{point_from_index, zero_count, zero_set};

    fn fixture_with(t: u64, s: u64, k: usize) -> GraphParams {
        GraphParams {
            kind: GraphKind::Threshold,
            q: 0,
            k,
            d: 0,
            big_d: None,
            lambda: None,
            t: Ratio::integer(t),
            s,
            p_target: PTarget::One,
            soundness_vacuous: false,
        }
    }

    #[test]
    fn hand_panchromatic_fixture_statistics() {
        let g = fixtures::hand_panchromatic();
        let params = g.params.clone().unwrap();
        let mut rng = indexed_stream(0, 0);
        let rep = verify_panchromatic(
            &g,
            &params,
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rep.completeness_tuples, 4);
        assert_eq!(rep.max_complete, 2);
        assert_eq!(rep.exact_t_count, 2);
        assert_eq!(rep.frac_exact_t(), Ratio::new(1, 2));
        assert_eq!(rep.soundness_tuples, 2);
        assert_eq!(rep.max_sound, 1);
        assert!(rep.passed());
    }

    #[test]
    fn exhaustive_mode_consumes_no_randomness() {
        let g = fixtures::hand_panchromatic();
        let params = g.params.clone().unwrap();
        let mut rng = indexed_stream(77, 0);
        let before = rng.get_word_pos();
        verify_panchromatic(
            &g,
            &params,
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rng.get_word_pos(), before);
    }

    #[test]
    fn repeated_colour_enumeration_matches_subset_filter_oracle() {
        // The signature-driven soundness scan must visit exactly the
        // k-subsets hitting some class twice, each once. Brute-force
        // oracle: filter all k-subsets of the left side.
        let mut rng = indexed_stream(19, 2);
        let (g, params) = sample_panchromatic(3, 2, 2, Budget::DEFAULT, &mut rng).unwrap();
        let rep = verify_panchromatic(
            &g,
            &params,
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        let n = g.total_left();
        let k = params.k;
        let mut count = 0u64;
        let mut max_sound = 0u64;
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let mut seen = vec![0u32; g.classes()];
            for &v in &subset {
                seen[g.class_of(v).0] += 1;
            }
            if seen.iter().any(|&m| m >= 2) {
                count += 1;
                max_sound = max_sound.max(g.common_neighbourhood_size(&subset));
            }
            let mut i = k;
            loop {
                if i == 0 {
                    assert_eq!(rep.soundness_tuples, count);
                    assert_eq!(rep.max_sound, max_sound);
                    return;
                }
                i -= 1;
                if subset[i] != i + n - k {
                    break;
                }
            }
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    #[test]
    fn neighbourhood_size_bounded_by_min_degree() {
        let g = fixtures::hand_panchromatic();
        for s in [vec![0usize, 2], vec![1, 3], vec![0, 1, 2, 3]] {
            let bound = s.iter().map(|&v| g.degree(v)).min().unwrap();
            assert!(g.common_neighbourhood_size(&s) <= bound);
        }
    }

    #[test]
    fn threshold_on_complete_and_empty_graphs() {
        // Complete bipartite: every tuple sees all of B.
        let rows = vec![Bitset::all_ones(7); 5];
        let g = crate::bigraph::ColouredBipartiteGraph::from_rows(vec![5], 7, rows).unwrap();
        let mut rng = indexed_stream(0, 1);
        let pass = verify_threshold(
            &g,
            &fixture_with(7, 7, 2),
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert!(pass.passed());
        assert_eq!((pass.min_complete, pass.max_sound), (7, 7));
        let fail_t = verify_threshold(
            &g,
            &fixture_with(8, 7, 2),
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert!(!fail_t.passed_completeness && fail_t.passed_soundness);
        let fail_s = verify_threshold(
            &g,
            &fixture_with(7, 6, 2),
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert!(fail_s.passed_completeness && !fail_s.passed_soundness);
        assert!(!fail_s.witnesses.is_empty());

        let rows = vec![Bitset::new(7); 5];
        let g = crate::bigraph::ColouredBipartiteGraph::from_rows(vec![5], 7, rows).unwrap();
        let rep = verify_threshold(
            &g,
            &fixture_with(1, 7, 2),
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rep.min_complete, 0);
        assert!(!rep.passed_completeness);
    }

    #[test]
    fn threshold_report_matches_zero_set_oracle() {
        // Recompute the exhaustive statistics independently through the
        // stored polynomial labels.
        let mut rng = indexed_stream(7, 3);
        let (g, params) = sample_threshold(1, 11, Budget::DEFAULT, &mut rng).unwrap();
        let rep = verify_threshold(
            &g,
            &params,
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        let labels = g.labels.as_ref().unwrap();
        let n = g.total_left();
        let mut min_c = u64::MAX;
        let mut max_s = 0u64;
        for v in 0..n {
            let z = zero_count(
                std::slice::from_ref(&labels.polys[v]),
                &labels.spec,
                Budget::DEFAULT,
            )
            .unwrap();
            min_c = min_c.min(z);
        }
        for a in 0..n {
            for b in a + 1..n {
                let z = zero_count(
                    &[labels.polys[a].clone(), labels.polys[b].clone()],
                    &labels.spec,
                    Budget::DEFAULT,
                )
                .unwrap();
                max_s = max_s.max(z);
            }
        }
        assert_eq!(rep.min_complete, min_c);
        assert_eq!(rep.max_sound, max_s);
        assert_eq!(rep.completeness_tuples, n as u64);
        assert_eq!(rep.soundness_tuples, (n as u64) * (n as u64 - 1) / 2);
    }

    #[test]
    fn panchromatic_soundness_difference_oracle() {
        // Same-class neighbourhoods re-derived through the difference
        // structure: N({u, v}) = Z(f_u, f_v - f_u), and the difference
        // drops to degree <= d.
        let mut rng = indexed_stream(11, 4);
        let (g, params) = sample_panchromatic(2, 2, 3, Budget::DEFAULT, &mut rng).unwrap();
        let labels = g.labels.as_ref().unwrap();
        let spec = &labels.spec;
        for (u, v) in [(0usize, 1usize), (2, 5), (9, 10), (11, 15)] {
            let (cu, _) = g.class_of(u);
            let (cv, _) = g.class_of(v);
            assert_eq!(cu, cv);
            let diff = labels.polys[v].sub(&labels.polys[u], spec);
            assert!(diff.actual_degree().unwrap_or(0) <= params.d as u32);
            let zs = zero_set(
                &[labels.polys[u].clone(), diff],
                spec,
                Budget::DEFAULT,
            )
            .unwrap();
            assert_eq!(g.common_neighbourhood_size(&[u, v]), zs.len() as u64);
        }
    }

    #[test]
    fn monte_carlo_is_seed_deterministic_and_conservative() {
        let g = fixtures::hand_panchromatic();
        let params = g.params.clone().unwrap();
        let run = |seed| {
            let mut rng = indexed_stream(seed, 0);
            verify_panchromatic(
                &g,
                &params,
                VerifyMode::MonteCarlo { samples: 500 },
                Budget::DEFAULT,
                &mut rng,
            )
            .unwrap()
        };
        assert_eq!(run(3), run(3));
        let rep = run(3);
        assert_eq!(rep.completeness_tuples, 500);
        assert_eq!(rep.soundness_tuples, 500);
        assert!(rep.passed());

        // A violated bound is caught by sampling: t = 1 but half the
        // tuples have 2 common neighbours.
        let mut tight = params.clone();
        tight.t = Ratio::integer(1);
        let mut rng = indexed_stream(4, 0);
        let rep = verify_panchromatic(
            &g,
            &tight,
            VerifyMode::MonteCarlo { samples: 200 },
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        assert!(!rep.passed_completeness);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn reports_are_thread_count_invariant() {
        let mut rng = indexed_stream(13, 0);
        let (g, params) = sample_threshold(1, 7, Budget::DEFAULT, &mut rng).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut vrng = indexed_stream(13, 1);
                verify_threshold(
                    &g,
                    &params,
                    VerifyMode::MonteCarlo { samples: 3000 },
                    Budget::DEFAULT,
                    &mut vrng,
                )
                .unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn bezout_exact_linear_univariate() {
        // 25 univariate polynomials of degree <= 1 over F_5: 4 nonzero
        // constants (Z = 0), 20 with a nonzero slope (Z = 1), the zero
        // polynomial (Z = 5).
        let h = bezout_exact(1, &[1], 5, Budget::DEFAULT).unwrap();
        let expect: BTreeMap<u64, u64> = [(0, 4), (1, 20), (5, 1)].into_iter().collect();
        assert_eq!(h.counts, expect);
        assert_eq!(h.trials, 25);
        assert_eq!(h.probability_eq(1), Ratio::new(4, 5));
        assert_eq!(h.probability_gt(1), Ratio::new(1, 25));
    }

    #[test]
    fn bezout_exact_matches_direct_enumeration_oracle() {
        // Independent recomputation of the Z histogram for k = 1, d = 2,
        // q = 3 by evaluating every polynomial at every point.
        let spec = field_new(3).unwrap();
        let basis = MonomialBasis::new(1, 2).unwrap();
        let mut expect: BTreeMap<u64, u64> = BTreeMap::new();
        for f in enumerate_all(&basis, &spec, Budget::DEFAULT).unwrap() {
            let mut z = 0u64;
            for pi in 0..3u64 {
                let pt = point_from_index(pi, 1, 3);
                if f.evaluate(&spec, &pt).is_zero() {
                    z += 1;
                }
            }
            *expect.entry(z).or_insert(0) += 1;
        }
        let h = bezout_exact(1, &[2], 3, Budget::DEFAULT).unwrap();
        assert_eq!(h.counts, expect);
    }

    #[test]
    fn bezout_trials_constant_degrees_hit_zero_or_everything() {
        let mut rng = indexed_stream(5, 6);
        let h = bezout_trials(2, &[0, 0], 3, 300, Budget::DEFAULT, &mut rng).unwrap();
        for &z in h.counts.keys() {
            assert!(z == 0 || z == 9, "constants give Z in {{0, q^k}}, got {z}");
        }
        assert_eq!(h.counts.values().sum::<u64>(), 300);
    }

    #[test]
    fn bezout_trials_track_exact_law() {
        let mut rng = indexed_stream(8, 0);
        let trials = 20_000u64;
        let h = bezout_trials(1, &[1], 101, trials, Budget::DEFAULT, &mut rng).unwrap();
        let p1 = *h.counts.get(&1).unwrap_or(&0) as f64 / trials as f64;
        let exact = 1.0 - 1.0 / 101.0;
        let w = wilson95(*h.counts.get(&1).unwrap_or(&0), trials);
        assert!(w.lo <= exact && exact <= w.hi, "p1 = {p1}, wilson [{}, {}]", w.lo, w.hi);
    }

    #[test]
    fn bezout_trials_converge_to_exact_distribution() {
        // Chi-square of 10^5 sampled Z values against the exact law for
        // k = 1, d = 1, q = 5 (cells 0, 1, 5), frozen seed.
        let exact = bezout_exact(1, &[1], 5, Budget::DEFAULT).unwrap();
        let mut rng = indexed_stream(0x5EED, 0);
        let trials = 100_000u64;
        let sampled = bezout_trials(1, &[1], 5, trials, Budget::DEFAULT, &mut rng).unwrap();
        let mut chi2 = 0.0f64;
        for (&z, &count) in &exact.counts {
            let expect = trials as f64 * count as f64 / exact.trials as f64;
            let got = *sampled.counts.get(&z).unwrap_or(&0) as f64;
            chi2 += (got - expect) * (got - expect) / expect;
        }
        assert_eq!(
            sampled.counts.values().sum::<u64>(),
            trials,
            "no Z values outside the exact support"
        );
        // 2 degrees of freedom; critical value at alpha = 0.001 is 13.82.
        assert!(chi2 < 13.82, "chi2 = {chi2}");
    }

    #[test]
    fn bezout_exact_expectation_consistency() {
        // E[Z] from the histogram equals the average root count taken
        // directly over the enumerated polynomials.
        let (k, d, q) = (1usize, 2u64, 5u64);
        let h = bezout_exact(k, &[d], q, Budget::DEFAULT).unwrap();
        let hist_sum: u128 = h.counts.iter().map(|(&z, &c)| z as u128 * c as u128).sum();
        let spec = field_new(q).unwrap();
        let basis = MonomialBasis::new(k, d as usize).unwrap();
        let mut direct_sum: u128 = 0;
        for f in enumerate_all(&basis, &spec, Budget::DEFAULT).unwrap() {
            direct_sum +=
                zero_count(std::slice::from_ref(&f), &spec, Budget::DEFAULT).unwrap() as u128;
        }
        assert_eq!(hist_sum, direct_sum);
        // And both equal q^r * E[Z] with E[Z] = 1 (each point vanishes
        // with probability 1/q over q^k = q points).
        assert_eq!(hist_sum, space_size(q, basis.r()));
    }

    #[test]
    fn vanish_probability_examples() {
        let one = |v: u64| vec![FieldElement::from_raw(v)];
        // m = 0: empty condition.
        let rep = vanish_probability_exact(1, 2, 5, &[], Budget::DEFAULT).unwrap();
        assert_eq!(rep.probability, Ratio::integer(1));

        let rep =
            vanish_probability_exact(1, 2, 5, &[one(1), one(2)], Budget::DEFAULT).unwrap();
        assert_eq!(rep.probability, Ratio::new(1, 25));
        assert!(rep.hypotheses_hold);

        // Duplicates are rejected.
        assert!(matches!(
            vanish_probability_exact(1, 2, 5, &[one(1), one(1)], Budget::DEFAULT),
            Err(Error::DuplicatePoints(1))
        ));
    }

    #[test]
    fn vanish_probability_monotone_in_points() {
        let pts: Vec<Vec<FieldElement>> = (0..4).map(|v| vec![FieldElement::from_raw(v)]).collect();
        let mut last = Ratio::integer(1);
        for m in 0..=3 {
            let rep =
                vanish_probability_exact(1, 2, 5, &pts[..m], Budget::DEFAULT).unwrap();
            let p = rep.probability;
            assert!(
                (p.num as u128) * (last.den as u128) <= (last.num as u128) * (p.den as u128),
                "adding a point must not increase the probability"
            );
            last = p;
        }
    }

    #[test]
    fn wilson_interval_sanity() {
        let w = wilson95(50, 100);
        assert!(w.lo < 0.5 && 0.5 < w.hi);
        assert!(w.lo > 0.39 && w.hi < 0.61);
        let w0 = wilson95(0, 100);
        assert!(w0.lo < 1e-12);
        assert!(w0.hi < 0.05);
    }

    #[test]
    fn report_text_is_key_value() {
        let g = fixtures::hand_panchromatic();
        let params = g.params.clone().unwrap();
        let mut rng = indexed_stream(0, 0);
        let rep = verify_panchromatic(
            &g,
            &params,
            VerifyMode::Exhaustive,
            Budget::DEFAULT,
            &mut rng,
        )
        .unwrap();
        let text = rep.to_text();
        assert!(text.contains("kind=panchromatic"));
        assert!(text.contains("frac_exact_t=1/2"));
        assert!(text.contains("passed=true"));
        assert!(text.lines().all(|l| l.contains('=')));
    }
}
