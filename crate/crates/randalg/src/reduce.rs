//! Gap-amplification compositions between set systems and the algebraic
//! graphs.
//!
//! - `maxcover_to_panchromatic`: a Unique MaxCover instance read as a
//!   coloured set system (universe = right nodes, one set per left
//!   vertex, thresholds scaled by the super-node count).
//! - `pgc_compose`: coloured instance x panchromatic graph -> uncoloured
//!   instance over U x B with thresholds (c*t, max(s*t, z*w)). The load-
//!   bearing identity: the composed intersection of a transversal tuple
//!   factors exactly as |intersection| * |common neighbourhood of the
//!   mapped vertices|.
//! - `tgc_compose`: MinCoverage instance x threshold graph -> gap
//!   SetIntersection instance over B; a composed set is the common
//!   neighbourhood of the images of its elements, so tuple intersections
//!   are common neighbourhoods of unions.
//! - `clique_tgc_compose`: simple graph x threshold graph -> one set per
//!   edge, queried at C(k,2).

use rand::{Rng, RngCore};

use crate::bigraph::{ColouredBipartiteGraph, Ratio};
use crate::bits::Bitset;
use crate::setsys::{monochromatic_number, MaxCoverInstance, SetSystemInstance};
use crate::{Budget, Error, Result};

/// How the per-collection injections into the graph classes are chosen.
/// `Random` is the composition as stated (uniform bijections);
/// `Canonical` uses identity maps for deterministic tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BijectionMode {
    Canonical,
    Random,
}

/// Output of the panchromatic composition.
#[derive(Clone, Debug)]
pub struct PgcOutput {
    pub instance: SetSystemInstance,
    /// Per collection: position r maps set r to class-local vertex
    /// `bijections[collection][r]`.
    pub bijections: Vec<Vec<usize>>,
    /// Monochromatic number used for the soundness threshold.
    pub z: u64,
    /// Graph completeness parameter t used for the thresholds.
    pub t: u64,
    /// Graph soundness parameter w used for the thresholds.
    pub w: u64,
}

/// Reads a MaxCover instance as a coloured set system: universe = all
/// right nodes, the set of a left vertex is its neighbourhood, and the
/// fractional promises scale to c' = c * l, s' = s * l.
pub fn maxcover_to_panchromatic(
    mc: &MaxCoverInstance,
    c: Ratio,
    s: Ratio,
) -> Result<SetSystemInstance> {
    let ell = mc.ell() as u64;
    let c_scaled = c.times_exact(ell)?;
    let s_scaled = s.times_exact(ell)?;
    let mut collections = Vec::with_capacity(mc.k());
    for class in 0..mc.k() {
        let start = mc.left_start(class);
        let sets = (0..mc.left_sizes()[class])
            .map(|i| mc.neighbourhood(start + i).clone())
            .collect();
        collections.push(sets);
    }
    SetSystemInstance::new(mc.right_total(), collections, c_scaled, s_scaled)
}

/// Panchromatic graph composition. Universe pairs are indexed as
/// u * |B| + b (frozen for serialization stability).
pub fn pgc_compose<R: RngCore>(
    inst: &SetSystemInstance,
    h: &ColouredBipartiteGraph,
    mode: BijectionMode,
    z_hint: Option<u64>,
    budget: Budget,
    rng: &mut R,
) -> Result<PgcOutput> {
    if !inst.coloured() {
        return Err(Error::InvalidInstance(
            "composition needs a coloured instance".into(),
        ));
    }
    let k = inst.k();
    if h.classes() != k {
        return Err(Error::SizeMismatch(format!(
            "instance has {k} collections, graph has {} classes",
            h.classes()
        )));
    }
    for (ci, coll) in inst.collections.iter().enumerate() {
        if coll.len() != h.class_sizes()[ci] {
            return Err(Error::SizeMismatch(format!(
                "collection {ci} has {} sets, class {ci} has {} vertices",
                coll.len(),
                h.class_sizes()[ci]
            )));
        }
    }
    let params = h.params.as_ref().ok_or(Error::InvalidInstance(
        "graph carries no parameters (t, w)".into(),
    ))?;
    if !params.t.is_integer() {
        return Err(Error::InvalidInstance(
            "panchromatic t must be an integer".into(),
        ));
    }
    let t = params.t.num;
    let w = params.s;
    let z = match z_hint {
        Some(z) => z,
        None => monochromatic_number(inst, k, budget)?,
    };
    let b_size = h.b_size();
    let universe = inst
        .universe_size
        .checked_mul(b_size)
        .ok_or(Error::Overflow {
            what: "composed universe",
        })?;
    budget.check(inst.total_sets() as u128 * universe as u128)?;
    let c_new = inst.c.checked_mul(t).ok_or(Error::Overflow {
        what: "composed completeness threshold",
    })?;
    let st = inst.s.checked_mul(t).ok_or(Error::Overflow {
        what: "composed soundness threshold",
    })?;
    let zw = z.checked_mul(w).ok_or(Error::Overflow {
        what: "composed soundness threshold",
    })?;
    let s_new = st.max(zw);

    let bijections: Vec<Vec<usize>> = inst
        .collections
        .iter()
        .map(|coll| {
            let n = coll.len();
            match mode {
                BijectionMode::Canonical => (0..n).collect(),
                BijectionMode::Random => {
                    let mut perm: Vec<usize> = (0..n).collect();
                    // Fisher-Yates, collection by collection on the stream.
                    for i in (1..n).rev() {
                        let j = rng.random_range(0..=i);
                        perm.swap(i, j);
                    }
                    perm
                }
            }
        })
        .collect();

    let mut sets = Vec::with_capacity(inst.total_sets());
    for (ci, coll) in inst.collections.iter().enumerate() {
        for (si, set) in coll.iter().enumerate() {
            let vertex = h.global_index(ci, bijections[ci][si]);
            let row = h.row(vertex);
            let mut out = Bitset::new(universe);
            for u in set.iter_ones() {
                for b in row.iter_ones() {
                    out.set(u * b_size + b);
                }
            }
            sets.push(out);
        }
    }
    let instance = SetSystemInstance::new(universe, vec![sets], c_new, s_new)?;
    Ok(PgcOutput {
        instance,
        bijections,
        z,
        t,
        w,
    })
}

/// Threshold graph composition: universe element i of the MinCoverage
/// instance maps to left vertex i of the graph (the canonical
/// injections), and a composed set is the common neighbourhood of the
/// images of its elements (the empty set maps to all of B).
pub fn tgc_compose(
    inst: &SetSystemInstance,
    h: &ColouredBipartiteGraph,
) -> Result<SetSystemInstance> {
    if inst.coloured() {
        return Err(Error::InvalidInstance(
            "threshold composition takes an uncoloured instance".into(),
        ));
    }
    if inst.universe_size != h.total_left() {
        return Err(Error::SizeMismatch(format!(
            "universe size {} != left side {}",
            inst.universe_size,
            h.total_left()
        )));
    }
    let params = h.params.as_ref().ok_or(Error::InvalidInstance(
        "graph carries no parameters (t, r)".into(),
    ))?;
    let sets: Vec<Bitset> = inst.collections[0]
        .iter()
        .map(|set| {
            let members: Vec<usize> = set.iter_ones().collect();
            h.common_neighbourhood(&members)
        })
        .collect();
    SetSystemInstance::new(h.b_size(), vec![sets], params.t.ceil(), params.s)
}

/// A simple undirected graph given by an edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at {u}")));
            }
        }
        Ok(SimpleGraph { n, edges })
    }

    /// Text form: `graph v1`, `n <count>`, then `edge u v` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph v1\nn {}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("edge {u} {v}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = crate::setsys::ContentLines::new(text);
        lines.expect_tag("graph v1")?;
        let n = lines.expect_keyed_u64("n")? as usize;
        let mut edges = Vec::new();
        while let Some((lineno, line)) = lines.next_content() {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("edge") {
                return Err(Error::ParseError {
                    line: lineno,
                    what: "expected edge line".into(),
                });
            }
            let mut coord = || -> Result<usize> {
                parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::ParseError {
                        line: lineno,
                        what: "bad endpoint".into(),
                    })
            };
            let u = coord()?;
            let v = coord()?;
            edges.push((u, v));
        }
        SimpleGraph::new(n, edges)
    }
}

fn choose2(k: u64) -> u64 {
    k * (k - 1) / 2
}

/// Clique composition: one set per edge of `g0`, containing b iff b is a
/// common neighbour of the edge's endpoints in the threshold graph.
/// Returns the instance and the query size C(k,2): a k-clique in g0
/// yields C(k,2) sets intersecting in at least t elements, while without
/// one every C(k,2) sets intersect in at most s (given the graph
/// verifies for parameter k).
pub fn clique_tgc_compose(
    g0: &SimpleGraph,
    h: &ColouredBipartiteGraph,
    k: usize,
) -> Result<(SetSystemInstance, u64)> {
    if g0.n != h.total_left() {
        return Err(Error::SizeMismatch(format!(
            "graph has {} vertices, threshold graph has {} left vertices",
            g0.n,
            h.total_left()
        )));
    }
    let params = h.params.as_ref().ok_or(Error::InvalidInstance(
        "graph carries no parameters (t, s)".into(),
    ))?;
    let sets: Vec<Bitset> = g0
        .edges
        .iter()
        .map(|&(u, v)| h.common_neighbourhood(&[u, v]))
        .collect();
    let inst = SetSystemInstance::new(h.b_size(), vec![sets], params.t.ceil(), params.s)?;
    Ok((inst, choose2(k as u64)))
}
