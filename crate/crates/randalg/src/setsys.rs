//! Set-system instances and exhaustive ground-truth solvers.
//!
//! Instances carry one collection of sets (uncoloured) or k collections
//! (coloured/panchromatic) over an integer universe, plus the
//! completeness/soundness thresholds of the gap problem they encode.
//! The solvers enumerate the full tuple space with bitset intersections
//! and lexicographic tie-breaks, so their outputs are deterministic
//! golden values for the reduction tests.

use crate::bigraph::Ratio;
use crate::bits::Bitset;
use crate::{Budget, Error, Result};

/// A k-SetIntersection / k-MinCoverage style instance.
///
/// A set's identity is (collection, position); equal bitsets in different
/// positions stay distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystemInstance {
    pub universe_size: usize,
    pub collections: Vec<Vec<Bitset>>,
    /// Completeness threshold (c > s for intersection problems,
    /// c < s for coverage problems).
    pub c: u64,
    /// Soundness threshold.
    pub s: u64,
}

impl SetSystemInstance {
    pub fn new(
        universe_size: usize,
        collections: Vec<Vec<Bitset>>,
        c: u64,
        s: u64,
    ) -> Result<Self> {
        if collections.is_empty() {
            return Err(Error::InvalidInstance("no collections".into()));
        }
        for coll in &collections {
            for set in coll {
                if set.len() != universe_size {
                    return Err(Error::InvalidInstance(format!(
                        "set width {} != universe {universe_size}",
                        set.len()
                    )));
                }
            }
        }
        Ok(SetSystemInstance {
            universe_size,
            collections,
            c,
            s,
        })
    }

    pub fn coloured(&self) -> bool {
        self.collections.len() > 1
    }

    pub fn k(&self) -> usize {
        self.collections.len()
    }

    pub fn total_sets(&self) -> usize {
        self.collections.iter().map(|c| c.len()).sum()
    }

    fn single_collection(&self) -> Result<&[Bitset]> {
        if self.coloured() {
            return Err(Error::InvalidInstance(
                "operation needs an uncoloured instance".into(),
            ));
        }
        Ok(&self.collections[0])
    }

    /// All sets across collections, in (collection, position) order.
    pub fn flattened(&self) -> Vec<&Bitset> {
        self.collections.iter().flatten().collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
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

/// Best-(max) k-subset scan over `sets` in lexicographic order.
///
/// Returns the maximum intersection size with the lexicographically
/// smallest witness. Prunes a branch when its prefix intersection cannot
/// strictly beat the incumbent.
fn max_intersection_scan(sets: &[&Bitset], k: usize, budget: Budget) -> Result<(Vec<usize>, u64)> {
    let n = sets.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInstance(format!(
            "k = {k} out of range for {n} sets"
        )));
    }
    budget.check(binomial(n, k))?;
    let chunk_bests = crate::par::map_collect(n - k + 1, |first| {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut chosen = vec![first];
        let prefix = sets[first].clone();
        descend_max(sets, k, &mut chosen, prefix, &mut best);
        best
    });
    let mut best: Option<(u64, Vec<usize>)> = None;
    for cand in chunk_bests.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| cand.0 > b.0) {
            best = Some(cand);
        }
    }
    let (value, witness) = best.expect("at least one combination exists");
    Ok((witness, value))
}

fn descend_max(
    sets: &[&Bitset],
    k: usize,
    chosen: &mut Vec<usize>,
    prefix: Bitset,
    best: &mut Option<(u64, Vec<usize>)>,
) {
    let count = prefix.count_ones();
    if let Some((b, _)) = best {
        if count <= *b {
            // A completion can only tie, and earlier witnesses win ties.
            return;
        }
    }
    if chosen.len() == k {
        *best = Some((count, chosen.clone()));
        return;
    }
    let need = k - chosen.len();
    let last = *chosen.last().unwrap();
    for i in last + 1..=sets.len() - need {
        let mut next = prefix.clone();
        next.and_assign(sets[i]);
        chosen.push(i);
        descend_max(sets, k, chosen, next, best);
        chosen.pop();
    }
}

/// k sets (from one collection) with the largest intersection.
pub fn solve_max_intersection(
    inst: &SetSystemInstance,
    k: usize,
    budget: Budget,
) -> Result<(Vec<usize>, u64)> {
    let sets = inst.single_collection()?;
    let refs: Vec<&Bitset> = sets.iter().collect();
    max_intersection_scan(&refs, k, budget)
}

/// One set per collection maximizing the intersection.
pub fn solve_panchromatic(inst: &SetSystemInstance, budget: Budget) -> Result<(Vec<usize>, u64)> {
    if !inst.coloured() {
        return Err(Error::InvalidInstance(
            "panchromatic solving needs k >= 2 collections".into(),
        ));
    }
    let space: u128 = inst
        .collections
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if space == 0 {
        return Err(Error::InvalidInstance("empty collection".into()));
    }
    budget.check(space)?;
    let first = &inst.collections[0];
    let chunk_bests = crate::par::map_collect(first.len(), |i0| {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut chosen = vec![i0];
        descend_pan(inst, &mut chosen, first[i0].clone(), &mut best);
        best
    });
    let mut best: Option<(u64, Vec<usize>)> = None;
    for cand in chunk_bests.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| cand.0 > b.0) {
            best = Some(cand);
        }
    }
    let (value, witness) = best.expect("nonempty product");
    Ok((witness, value))
}

fn descend_pan(
    inst: &SetSystemInstance,
    chosen: &mut Vec<usize>,
    prefix: Bitset,
    best: &mut Option<(u64, Vec<usize>)>,
) {
    let count = prefix.count_ones();
    if let Some((b, _)) = best {
        if count <= *b {
            return;
        }
    }
    if chosen.len() == inst.collections.len() {
        *best = Some((count, chosen.clone()));
        return;
    }
    let next_coll = &inst.collections[chosen.len()];
    for (i, set) in next_coll.iter().enumerate() {
        let mut next = prefix.clone();
        next.and_assign(set);
        chosen.push(i);
        descend_pan(inst, chosen, next, best);
        chosen.pop();
    }
}

/// Max intersection size over arbitrary k-subsets of the union of all
/// collections (colour constraints ignored).
pub fn monochromatic_number(inst: &SetSystemInstance, k: usize, budget: Budget) -> Result<u64> {
    let flat = inst.flattened();
    let (_, value) = max_intersection_scan(&flat, k, budget)?;
    Ok(value)
}

/// k sets (from one collection) with the smallest union.
pub fn solve_min_coverage(
    inst: &SetSystemInstance,
    k: usize,
    budget: Budget,
) -> Result<(Vec<usize>, u64)> {
    let sets = inst.single_collection()?;
    let n = sets.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInstance(format!(
            "k = {k} out of range for {n} sets"
        )));
    }
    budget.check(binomial(n, k))?;
    let chunk_bests = crate::par::map_collect(n - k + 1, |first| {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut chosen = vec![first];
        descend_min(sets, k, &mut chosen, sets[first].clone(), &mut best);
        best
    });
    let mut best: Option<(u64, Vec<usize>)> = None;
    for cand in chunk_bests.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| cand.0 < b.0) {
            best = Some(cand);
        }
    }
    let (value, witness) = best.expect("at least one combination exists");
    Ok((witness, value))
}

fn descend_min(
    sets: &[Bitset],
    k: usize,
    chosen: &mut Vec<usize>,
    prefix: Bitset,
    best: &mut Option<(u64, Vec<usize>)>,
) {
    let count = prefix.count_ones();
    if let Some((b, _)) = best {
        if count >= *b {
            // Unions only grow; a completion can at best tie.
            return;
        }
    }
    if chosen.len() == k {
        *best = Some((count, chosen.clone()));
        return;
    }
    let need = k - chosen.len();
    let last = *chosen.last().unwrap();
    for i in last + 1..=sets.len() - need {
        let mut next = prefix.clone();
        next.or_assign(&sets[i]);
        chosen.push(i);
        descend_min(sets, k, chosen, next, best);
        chosen.pop();
    }
}

/// A MaxCover instance: left vertices partitioned into classes V_1..V_k,
/// right vertices partitioned into super-nodes W_1..W_l, with bipartite
/// edges stored as per-left-vertex bitsets over the right side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCoverInstance {
    left_sizes: Vec<usize>,
    right_sizes: Vec<usize>,
    adjacency: Vec<Bitset>,
}

impl MaxCoverInstance {
    pub fn new(
        left_sizes: Vec<usize>,
        right_sizes: Vec<usize>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let lt: usize = left_sizes.iter().sum();
        let rt: usize = right_sizes.iter().sum();
        if left_sizes.is_empty() || right_sizes.is_empty() {
            return Err(Error::InvalidInstance("empty partition".into()));
        }
        let mut adjacency = vec![Bitset::new(rt); lt];
        for &(v, w) in edges {
            if v >= lt || w >= rt {
                return Err(Error::InvalidInstance(format!(
                    "edge ({v}, {w}) out of range {lt} x {rt}"
                )));
            }
            adjacency[v].set(w);
        }
        Ok(MaxCoverInstance {
            left_sizes,
            right_sizes,
            adjacency,
        })
    }

    pub fn k(&self) -> usize {
        self.left_sizes.len()
    }

    pub fn ell(&self) -> usize {
        self.right_sizes.len()
    }

    pub fn left_sizes(&self) -> &[usize] {
        &self.left_sizes
    }

    pub fn right_sizes(&self) -> &[usize] {
        &self.right_sizes
    }

    pub fn left_total(&self) -> usize {
        self.adjacency.len()
    }

    pub fn right_total(&self) -> usize {
        self.right_sizes.iter().sum()
    }

    pub fn left_start(&self, class: usize) -> usize {
        self.left_sizes[..class].iter().sum()
    }

    pub fn super_node_range(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.right_sizes[..j].iter().sum();
        start..start + self.right_sizes[j]
    }

    pub fn neighbourhood(&self, left_global: usize) -> &Bitset {
        &self.adjacency[left_global]
    }

    fn labeling_space(&self) -> u128 {
        self.left_sizes
            .iter()
            .fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
    }

    fn common_of_labeling(&self, labeling: &[usize]) -> Bitset {
        let rows: Vec<&Bitset> = labeling
            .iter()
            .enumerate()
            .map(|(ci, &li)| &self.adjacency[self.left_start(ci) + li])
            .collect();
        crate::bits::intersect_all(self.right_total(), &rows)
    }

    /// Number of super-nodes covered by a labeling (one local index per
    /// left class).
    pub fn covered_count(&self, labeling: &[usize]) -> u64 {
        let common = self.common_of_labeling(labeling);
        (0..self.ell())
            .filter(|&j| common.count_in_range(self.super_node_range(j)) > 0)
            .count() as u64
    }
}

/// Labeling maximizing the covered super-node count; returns the
/// labeling, the count, and the covered fraction.
pub fn solve_maxcover(
    inst: &MaxCoverInstance,
    budget: Budget,
) -> Result<(Vec<usize>, u64, Ratio)> {
    budget.check(inst.labeling_space().saturating_mul(inst.ell() as u128))?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut labeling = vec![0usize; inst.k()];
    loop {
        let covered = inst.covered_count(&labeling);
        if best.as_ref().is_none_or(|b| covered > b.0) {
            best = Some((covered, labeling.clone()));
        }
        if !advance(&mut labeling, &inst.left_sizes) {
            break;
        }
    }
    let (covered, labeling) = best.expect("nonempty labeling space");
    Ok((labeling, covered, Ratio::new(covered, inst.ell() as u64)))
}

/// True iff every labeling has at most one common neighbour inside every
/// super-node.
pub fn is_unique_maxcover(inst: &MaxCoverInstance, budget: Budget) -> Result<bool> {
    budget.check(inst.labeling_space().saturating_mul(inst.ell() as u128))?;
    let mut labeling = vec![0usize; inst.k()];
    loop {
        let common = inst.common_of_labeling(&labeling);
        for j in 0..inst.ell() {
            if common.count_in_range(inst.super_node_range(j)) > 1 {
                return Ok(false);
            }
        }
        if !advance(&mut labeling, &inst.left_sizes) {
            break;
        }
    }
    Ok(true)
}

/// Odometer step over a mixed-radix labeling; false when wrapped.
fn advance(labeling: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..labeling.len()).rev() {
        labeling[i] += 1;
        if labeling[i] < sizes[i] {
            return true;
        }
        labeling[i] = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

impl SetSystemInstance {
    /// Line-oriented text form:
    ///
    /// ```text
    /// setsystem v1
    /// universe 6
    /// collections 2
    /// c 4
    /// s 2
    /// collection
    /// set 0 1 3
    /// set
    /// collection
    /// set 1 3 5
    /// ```
    ///
    /// `set` with no indices is the empty set; `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("setsystem v1\n");
        out.push_str(&format!("universe {}\n", self.universe_size));
        out.push_str(&format!("collections {}\n", self.collections.len()));
        out.push_str(&format!("c {}\n", self.c));
        out.push_str(&format!("s {}\n", self.s));
        for coll in &self.collections {
            out.push_str("collection\n");
            for set in coll {
                out.push_str("set");
                for i in set.iter_ones() {
                    out.push_str(&format!(" {i}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ContentLines::new(text);
        lines.expect_tag("setsystem v1")?;
        let universe = lines.expect_keyed_u64("universe")? as usize;
        let k = lines.expect_keyed_u64("collections")? as usize;
        let c = lines.expect_keyed_u64("c")?;
        let s = lines.expect_keyed_u64("s")?;
        let mut collections: Vec<Vec<Bitset>> = Vec::with_capacity(k);
        while let Some((lineno, line)) = lines.next_content() {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("collection") => collections.push(Vec::new()),
                Some("set") => {
                    let coll = collections.last_mut().ok_or(Error::ParseError {
                        line: lineno,
                        what: "set before any collection".into(),
                    })?;
                    let mut b = Bitset::new(universe);
                    for tok in parts {
                        let i: usize = tok.parse().map_err(|_| Error::ParseError {
                            line: lineno,
                            what: format!("bad element index {tok}"),
                        })?;
                        if i >= universe {
                            return Err(Error::ParseError {
                                line: lineno,
                                what: format!("element {i} outside universe {universe}"),
                            });
                        }
                        b.set(i);
                    }
                    coll.push(b);
                }
                other => {
                    return Err(Error::ParseError {
                        line: lineno,
                        what: format!("unexpected token {other:?}"),
                    })
                }
            }
        }
        if collections.len() != k {
            return Err(Error::ParseError {
                line: 0,
                what: format!("declared {k} collections, found {}", collections.len()),
            });
        }
        SetSystemInstance::new(universe, collections, c, s)
    }
}

impl MaxCoverInstance {
    /// Text form: `left`/`right` list the class and super-node sizes,
    /// each `edge` line is a (left global, right global) pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("maxcover v1\n");
        out.push_str("left");
        for &n in &self.left_sizes {
            out.push_str(&format!(" {n}"));
        }
        out.push_str("\nright");
        for &n in &self.right_sizes {
            out.push_str(&format!(" {n}"));
        }
        out.push('\n');
        for (v, row) in self.adjacency.iter().enumerate() {
            for w in row.iter_ones() {
                out.push_str(&format!("edge {v} {w}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ContentLines::new(text);
        lines.expect_tag("maxcover v1")?;
        let left_sizes = lines.expect_keyed_list("left")?;
        let right_sizes = lines.expect_keyed_list("right")?;
        let mut edges = Vec::new();
        while let Some((lineno, line)) = lines.next_content() {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("edge") {
                return Err(Error::ParseError {
                    line: lineno,
                    what: "expected edge line".into(),
                });
            }
            let mut coord = |what: &str| -> Result<usize> {
                parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::ParseError {
                        line: lineno,
                        what: format!("bad {what}"),
                    })
            };
            let v = coord("left endpoint")?;
            let w = coord("right endpoint")?;
            edges.push((v, w));
        }
        MaxCoverInstance::new(left_sizes, right_sizes, &edges)
    }
}

/// Iterator over non-comment, non-blank lines with 1-based numbering.
pub(crate) struct ContentLines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> ContentLines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        ContentLines {
            inner: text.lines().enumerate(),
        }
    }

    pub(crate) fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    pub(crate) fn expect_tag(&mut self, tag: &str) -> Result<()> {
        match self.next_content() {
            Some((_, line)) if line == tag => Ok(()),
            Some((line, got)) => Err(Error::ParseError {
                line,
                what: format!("expected `{tag}`, found `{got}`"),
            }),
            None => Err(Error::ParseError {
                line: 0,
                what: format!("missing `{tag}` header"),
            }),
        }
    }

    pub(crate) fn expect_keyed_u64(&mut self, key: &str) -> Result<u64> {
        let (lineno, line) = self.next_content().ok_or(Error::ParseError {
            line: 0,
            what: format!("missing `{key}` line"),
        })?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::ParseError {
                line: lineno,
                what: format!("expected `{key}`"),
            });
        }
        parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::ParseError {
                line: lineno,
                what: format!("bad `{key}` value"),
            })
    }

    pub(crate) fn expect_keyed_list(&mut self, key: &str) -> Result<Vec<usize>> {
        let (lineno, line) = self.next_content().ok_or(Error::ParseError {
            line: 0,
            what: format!("missing `{key}` line"),
        })?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::ParseError {
                line: lineno,
                what: format!("expected `{key}`"),
            });
        }
        let mut out = Vec::new();
        for tok in parts {
            out.push(tok.parse().map_err(|_| Error::ParseError {
                line: lineno,
                what: format!("bad `{key}` entry {tok}"),
            })?);
        }
        if out.is_empty() {
            return Err(Error::ParseError {
                line: lineno,
                what: format!("`{key}` needs at least one size"),
            });
        }
        Ok(out)
    }
}
