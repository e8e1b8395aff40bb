//! The randomized threshold and panchromatic graph constructions.
//!
//! Both constructions draw their polynomials sequentially from the
//! caller's stream (vertex by vertex, coefficients in basis order), so
//! the coin consumption per graph is a fixed, documented count:
//! n * C(k+1+d, k+1) field draws for a threshold graph and
//! k * C(k+D, k) + k * n * C(k+d, k) for a panchromatic graph. Row
//! generation afterwards is deterministic and parallelizes over left
//! vertices.

use rand::RngCore;

use crate::bigraph::{ColouredBipartiteGraph, GraphParams};
use crate::field::FieldSpec;
use crate::mpoly::{MonomialBasis, MPoly};
use crate::rng::{indexed_stream, local_master};
use crate::verify::{verify_graph, VerificationReport, VerifyMode};
use crate::{Budget, Result};

/// Threshold construction: n = q^(k+1) uniform polynomials of degree at
/// most d = (k+1)^2 + 1 in k+1 variables, against B = F_q^(k+1).
pub fn sample_threshold<R: RngCore>(
    k: usize,
    q: u64,
    budget: Budget,
    rng: &mut R,
) -> Result<(ColouredBipartiteGraph, GraphParams)> {
    let params = GraphParams::threshold(q, k)?;
    let spec = FieldSpec::new(q)?;
    let k_vars = k + 1;
    let basis = MonomialBasis::new(k_vars, params.d as usize)?;
    let n = crate::mpoly::point_count(q, k_vars, budget)? as usize;
    let polys: Vec<MPoly> = (0..n).map(|_| MPoly::sample(&basis, &spec, rng)).collect();
    let mut graph = ColouredBipartiteGraph::from_polynomials(vec![polys], &spec, k_vars, budget)?;
    graph.params = Some(params.clone());
    Ok((graph, params))
}

/// Panchromatic construction: k classes of n = q^k vertices; class i
/// holds w_i + p with w_i uniform of degree at most D = lambda * (k^2+2)
/// and a fresh uniform p of degree at most d = k^2 + 2 per vertex,
/// against B = F_q^k.
pub fn sample_panchromatic<R: RngCore>(
    k: usize,
    lambda: u64,
    q: u64,
    budget: Budget,
    rng: &mut R,
) -> Result<(ColouredBipartiteGraph, GraphParams)> {
    let params = GraphParams::panchromatic(q, k, lambda)?;
    let spec = FieldSpec::new(q)?;
    let basis_low = MonomialBasis::new(k, params.d as usize)?;
    let basis_high = MonomialBasis::new(k, params.big_d.unwrap() as usize)?;
    let n = crate::mpoly::point_count(q, k, budget)? as usize;

    let offsets: Vec<MPoly> = (0..k)
        .map(|_| MPoly::sample(&basis_high, &spec, rng))
        .collect();
    let mut residuals: Vec<MPoly> = Vec::with_capacity(k * n);
    let mut classes: Vec<Vec<MPoly>> = Vec::with_capacity(k);
    for w in &offsets {
        let mut class = Vec::with_capacity(n);
        for _ in 0..n {
            let p = MPoly::sample(&basis_low, &spec, rng);
            class.push(w.add(&p, &spec));
            residuals.push(p);
        }
        classes.push(class);
    }
    let mut graph = ColouredBipartiteGraph::from_polynomials(classes, &spec, k, budget)?;
    graph.params = Some(params.clone());
    if let Some(labels) = graph.labels.as_mut() {
        labels.class_offsets = Some(offsets);
        labels.residuals = Some(residuals);
    }
    Ok((graph, params))
}

/// Which construction a batch run samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatchKind {
    Threshold { k: usize, q: u64 },
    Panchromatic { k: usize, lambda: u64, q: u64 },
}

/// Selected graph of a batch run with its verification evidence.
#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub graph: ColouredBipartiteGraph,
    pub params: GraphParams,
    pub report: VerificationReport,
    /// Trial index the graph came from.
    pub trial: usize,
    /// Whether the selected trial passed outright (otherwise it is the
    /// best-scoring failure).
    pub passed: bool,
}

/// Samples `trials` graphs on independent derived substreams, verifies
/// each, and returns the first passing one; if none pass, the best by
/// (soundness violations, completeness violations, trial index).
pub fn batch_sample_and_select<R: RngCore>(
    kind: BatchKind,
    trials: usize,
    mode: VerifyMode,
    budget: Budget,
    rng: &mut R,
) -> Result<BatchOutcome> {
    assert!(trials >= 1);
    let master = local_master(rng);
    let results: Vec<Result<(ColouredBipartiteGraph, GraphParams, VerificationReport)>> =
        crate::par::map_collect(trials, |i| {
            let mut gen_rng = indexed_stream(master, 2 * i as u64);
            let mut verify_rng = indexed_stream(master, 2 * i as u64 + 1);
            let (graph, params) = match kind {
                BatchKind::Threshold { k, q } => sample_threshold(k, q, budget, &mut gen_rng)?,
                BatchKind::Panchromatic { k, lambda, q } => {
                    sample_panchromatic(k, lambda, q, budget, &mut gen_rng)?
                }
            };
            let report = verify_graph(&graph, &params, mode, budget, &mut verify_rng)?;
            Ok((graph, params, report))
        });
    let mut outcomes = Vec::with_capacity(trials);
    for r in results {
        outcomes.push(r?);
    }
    if let Some(i) = outcomes.iter().position(|(_, _, rep)| rep.passed()) {
        let (graph, params, report) = outcomes.swap_remove(i);
        return Ok(BatchOutcome {
            graph,
            params,
            report,
            trial: i,
            passed: true,
        });
    }
    let best = outcomes
        .iter()
        .enumerate()
        .min_by_key(|(i, (_, _, rep))| (rep.sound_violations, rep.complete_violations, *i))
        .map(|(i, _)| i)
        .expect("at least one trial");
    let (graph, params, report) = outcomes.swap_remove(best);
    Ok(BatchOutcome {
        graph,
        params,
        report,
        trial: best,
        passed: false,
    })
}
