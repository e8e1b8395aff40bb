//! Hand-built graphs and instances shared by tests, examples and the
//! acceptance suite.

use crate::bigraph::{ColouredBipartiteGraph, GraphKind, GraphParams, PTarget, Ratio};
use crate::bits::Bitset;
use crate::setsys::MaxCoverInstance;

/// Parameters for a hand fixture where only the thresholds matter.
pub fn hand_params(t: u64, s: u64) -> GraphParams {
    GraphParams {
        kind: GraphKind::Panchromatic,
        q: 0,
        k: 2,
        d: 0,
        big_d: None,
        lambda: None,
        t: Ratio::integer(t),
        s,
        p_target: PTarget::One,
        soundness_vacuous: false,
    }
}

/// The 7-vertex panchromatic fixture: classes {a1, a2} and {b1, b2} over
/// B = {x, y, z}, with a1 ~ {x,y}, a2 ~ {x,z}, b1 ~ {x,y}, b2 ~ {x,z}.
///
/// Every panchromatic pair has at most 2 common neighbours, exactly half
/// have exactly 2, and the same-class pairs meet only in x, so it is a
/// (2, 3, 2, t=2, s=1)-panchromatic graph with exact-t fraction 1/2.
pub fn hand_panchromatic() -> ColouredBipartiteGraph {
    let rows = vec![
        Bitset::from_indices(3, &[0, 1]), // a1 ~ {x, y}
        Bitset::from_indices(3, &[0, 2]), // a2 ~ {x, z}
        Bitset::from_indices(3, &[0, 1]), // b1 ~ {x, y}
        Bitset::from_indices(3, &[0, 2]), // b2 ~ {x, z}
    ];
    let mut g = ColouredBipartiteGraph::from_rows(vec![2, 2], 3, rows).unwrap();
    let mut params = hand_params(2, 1);
    params.q = 3;
    g.params = Some(params);
    g
}

/// Unique MaxCover fixture with full cover: the labeling (0, 0) covers
/// both super-nodes W1 = {0} and W2 = {1, 2}.
pub fn unique_maxcover_full() -> MaxCoverInstance {
    MaxCoverInstance::new(
        vec![2, 2],
        vec![1, 2],
        &[
            (0, 0),
            (0, 1), // v0 ~ {w0, w1}
            (1, 0),
            (1, 2), // v1 ~ {w0, w2}
            (2, 0),
            (2, 1), // v2 ~ {w0, w1}
            (3, 0),
            (3, 2), // v3 ~ {w0, w2}
        ],
    )
    .unwrap()
}

/// Unique MaxCover fixture where the optimum covers one of the two
/// super-nodes.
pub fn unique_maxcover_partial() -> MaxCoverInstance {
    MaxCoverInstance::new(
        vec![2, 2],
        vec![1, 1],
        &[(0, 0), (1, 1), (2, 0), (3, 1)],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsys::{is_unique_maxcover, solve_maxcover};
    use crate::Budget;

    #[test]
    fn hand_fixture_shape() {
        let g = hand_panchromatic();
        assert_eq!(g.classes(), 2);
        assert_eq!(g.b_size(), 3);
        assert_eq!(g.common_neighbourhood_size(&[0, 2]), 2);
        assert_eq!(g.common_neighbourhood_size(&[0, 3]), 1);
        assert_eq!(g.common_neighbourhood_size(&[0, 1]), 1);
    }

    #[test]
    fn maxcover_fixtures_are_unique_and_have_expected_optima() {
        let full = unique_maxcover_full();
        assert!(is_unique_maxcover(&full, Budget::DEFAULT).unwrap());
        let (lab, covered, _) = solve_maxcover(&full, Budget::DEFAULT).unwrap();
        assert_eq!((lab, covered), (vec![0, 0], 2));

        let partial = unique_maxcover_partial();
        assert!(is_unique_maxcover(&partial, Budget::DEFAULT).unwrap());
        let (_, covered, _) = solve_maxcover(&partial, Budget::DEFAULT).unwrap();
        assert_eq!(covered, 1);
    }
}
