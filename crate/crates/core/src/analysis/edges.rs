use serde::Serialize;

use super::AnalysisError;
use crate::tree::{DominatingSet, TreeView, VertexId};

/// Status of the arrival edge `(v, u)` under a fixed optimal set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeStatus {
    pub v: VertexId,
    pub u: VertexId,
    pub free: bool,
    pub fixed: bool,
}

/// Evaluates the free and fixed predicates for the edge where `u` arrived
/// at `v`.
pub fn edge_status(
    view: &TreeView,
    optset: &DominatingSet,
    v: VertexId,
    u: VertexId,
) -> Result<EdgeStatus, AnalysisError> {
    if !view.contains(u) || view.parent(u) != Some(v) {
        return Err(AnalysisError::NotArrivalEdge { v, u });
    }
    Ok(status(view, optset, u))
}

fn status(view: &TreeView, optset: &DominatingSet, u: VertexId) -> EdgeStatus {
    let v = view.parent(u).expect("u is not the root");
    // u's closed neighbourhood inside its own subtree is u and its children
    let u_inside = optset.contains(u) || view.children(u).iter().any(|&c| optset.contains(c));
    let v_outside = optset.contains(v)
        || view.parent(v).is_some_and(|p| optset.contains(p))
        || view.children(v).iter().any(|&c| c != u && optset.contains(c));
    let free = u_inside && v_outside;
    let fixed = free && v != VertexId::ROOT && view.degree(u) >= 3 && {
        let dv = view.degree(v);
        dv == 3 || {
            let w = view.parent(v).expect("v is not the root");
            dv == 2 && view.degree(w) >= 3 && view.degree_at(w, v).expect("v revealed") >= 3
        }
    };
    EdgeStatus { v, u, free, fixed }
}

/// Status of every arrival edge, ordered by the arriving vertex.
pub fn all_edges(view: &TreeView, optset: &DominatingSet) -> Vec<EdgeStatus> {
    view.vertices().skip(1).map(|u| status(view, optset, u)).collect()
}

/// Good triplets `(u1, u2, u3)` with `u1 < u3`, so each is listed once.
pub fn good_triplets(view: &TreeView, optset: &DominatingSet) -> Vec<[VertexId; 3]> {
    let mut out = Vec::new();
    for u2 in view.vertices().filter(|&w| view.degree(w) == 3) {
        let ends: Vec<VertexId> = view
            .neighbors(u2)
            .filter(|&w| view.degree(w) == 3 && optset.contains(w))
            .collect();
        for (i, &a) in ends.iter().enumerate() {
            for &b in &ends[i + 1..] {
                out.push([a.min(b), u2, a.max(b)]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::enumerate_optimal_sets;
    use crate::tree::OnlineTreeInput;
    use proptest::prelude::*;

    fn v(i: usize) -> VertexId {
        VertexId::new(i)
    }

    fn set(n: usize, xs: &[usize]) -> DominatingSet {
        DominatingSet::from_vertices(n, xs.iter().map(|&i| v(i)))
    }

    #[test]
    fn star_leaf_edge_is_not_free() {
        let view = OnlineTreeInput::new(vec![0, 1, 2, 2]).unwrap().view();
        let s = edge_status(&view, &set(4, &[2]), v(2), v(3)).unwrap();
        assert!(!s.free && !s.fixed);
        assert!(good_triplets(&view, &set(4, &[2])).is_empty());
    }

    #[test]
    fn two_path_edge_is_not_free() {
        let view = OnlineTreeInput::path(2).view();
        let s = edge_status(&view, &set(2, &[2]), v(1), v(2)).unwrap();
        assert!(!s.free);
        let s = edge_status(&view, &set(2, &[1]), v(1), v(2)).unwrap();
        assert!(!s.free);
    }

    #[test]
    fn rejects_non_arrival_edges() {
        let view = OnlineTreeInput::path(3).view();
        let d = set(3, &[2]);
        assert_eq!(
            edge_status(&view, &d, v(2), v(1)).unwrap_err(),
            AnalysisError::NotArrivalEdge { v: v(2), u: v(1) }
        );
        assert!(edge_status(&view, &d, v(1), v(3)).is_err());
        assert!(edge_status(&view, &d, v(3), v(9)).is_err());
    }

    #[test]
    fn seven_chain_boundaries_are_free() {
        let view = OnlineTreeInput::path(7).view();
        let sets = enumerate_optimal_sets(&view, 14).unwrap();
        let spaced = set(7, &[2, 5, 7]);
        assert!(sets.contains(&spaced));
        let free: Vec<usize> =
            all_edges(&view, &spaced).iter().filter(|e| e.free).map(|e| e.u.index()).collect();
        assert_eq!(free, vec![4, 6, 7]);
        for e in all_edges(&view, &spaced) {
            assert!(!e.fixed, "degree-2 chains have no fixed edges");
        }
    }

    #[test]
    fn fixed_needs_degree_three() {
        let input = OnlineTreeInput::new(vec![0, 1, 2, 2, 3, 3, 4, 4]).unwrap();
        let view = input.view();
        let d = set(8, &[1, 3, 4]);
        assert!(crate::opt::is_optimal(&view, &d));
        let s = edge_status(&view, &d, v(2), v(4)).unwrap();
        assert!(s.free && s.fixed);
        let s = edge_status(&view, &d, v(2), v(3)).unwrap();
        assert!(s.free && s.fixed);
        let s = edge_status(&view, &d, v(1), v(2)).unwrap();
        assert!(s.free && !s.fixed);
        let s = edge_status(&view, &d, v(4), v(7)).unwrap();
        assert!(!s.free);
    }

    #[test]
    fn spider_triplets() {
        // hub v1 with three legs of length 3
        let input = OnlineTreeInput::new(vec![0, 1, 1, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let view = input.view();
        for d in enumerate_optimal_sets(&view, 14).unwrap() {
            let found = good_triplets(&view, &d);
            assert_eq!(found, brute_triplets(&view, &d));
            assert!(found.is_empty(), "only the hub has degree 3");
        }
    }

    fn brute_triplets(view: &TreeView, d: &DominatingSet) -> Vec<[VertexId; 3]> {
        let mut out = Vec::new();
        let all: Vec<VertexId> = view.vertices().collect();
        for &b in &all {
            for &a in &all {
                for &c in &all {
                    if a < c
                        && view.adjacent(a, b)
                        && view.adjacent(b, c)
                        && [a, b, c].iter().all(|&x| view.degree(x) == 3)
                        && d.contains(a)
                        && d.contains(c)
                    {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn triplets_match_brute_scan(parents in crate::testutil::arb_parents(12)) {
            let view = OnlineTreeInput::new(parents).unwrap().view();
            for d in enumerate_optimal_sets(&view, 14).unwrap() {
                prop_assert_eq!(good_triplets(&view, &d), brute_triplets(&view, &d));
            }
        }

        #[test]
        fn free_matches_domination_sources(parents in crate::testutil::arb_parents(12)) {
            let view = OnlineTreeInput::new(parents).unwrap().view();
            let d = crate::opt::min_dominating_set_tree(&view).unwrap().witness;
            for e in all_edges(&view, &d) {
                let sub = view.descendants(e.u);
                let inside = |x: VertexId| x == e.u || sub.contains(&x);
                let dominators = |x: VertexId| {
                    std::iter::once(x).chain(view.neighbors(x)).filter(|&y| d.contains(y)).collect::<Vec<_>>()
                };
                let expect = dominators(e.u).iter().any(|&y| inside(y))
                    && dominators(e.v).iter().any(|&y| !inside(y));
                prop_assert_eq!(e.free, expect);
                prop_assert!(!e.fixed || e.free);
            }
        }
    }
}
