//! Exact offline optima: tree DP, brute force, and enumeration of all
//! minimum dominating sets.

use serde::Serialize;
use thiserror::Error;

use crate::tree::{DominatingSet, TreeView, VertexId};

pub const DEFAULT_BRUTE_CAP: usize = 20;
pub const DEFAULT_ENUM_CAP: usize = 14;
pub const DEFAULT_ENUM_LIMIT: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptError {
    #[error("n = {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("more than {limit} optimal sets")]
    TooMany { limit: usize },
    #[error("empty tree")]
    Empty,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptResult {
    pub size: usize,
    pub witness: DominatingSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all: Option<Vec<DominatingSet>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    /// Selected.
    Sel,
    /// Not selected, dominated by a child.
    Dom,
    /// Not selected, waiting for the parent.
    Need,
}

/// Minimum dominating set by the three-state tree DP. Ties are broken towards
/// leaving the current vertex unselected, which pushes selections deeper.
pub fn min_dominating_set_tree(view: &TreeView) -> Result<OptResult, OptError> {
    let n = view.len();
    if n == 0 {
        return Err(OptError::Empty);
    }
    const INF: usize = usize::MAX / 4;
    let mut sel = vec![0usize; n];
    let mut dom = vec![0usize; n];
    let mut need = vec![0usize; n];
    // child forced into Sel when the vertex itself is in Dom
    let mut forced = vec![None::<VertexId>; n];

    for v in view.vertices().rev() {
        let s = v.slot();
        let kids = view.children(v);
        sel[s] = 1 + kids
            .iter()
            .map(|c| dom[c.slot()].min(need[c.slot()]).min(sel[c.slot()]))
            .sum::<usize>();
        need[s] = kids.iter().map(|c| dom[c.slot()]).fold(0usize, |a, b| (a + b).min(INF));
        if kids.is_empty() {
            dom[s] = INF;
        } else {
            let base: usize = kids.iter().map(|c| dom[c.slot()].min(sel[c.slot()])).sum();
            let (penalty, pick) = kids
                .iter()
                .map(|c| (sel[c.slot()] - dom[c.slot()].min(sel[c.slot()]), *c))
                .min_by_key(|&(p, c)| (p, std::cmp::Reverse(c)))
                .expect("non-empty");
            dom[s] = (base + penalty).min(INF);
            forced[s] = Some(pick);
        }
    }

    let mut state = vec![State::Sel; n];
    state[0] = if dom[0] <= sel[0] { State::Dom } else { State::Sel };
    let size = sel[0].min(dom[0]);
    for v in view.vertices() {
        let s = v.slot();
        for &c in view.children(v) {
            let cs = c.slot();
            state[cs] = match state[s] {
                State::Sel => {
                    let best = dom[cs].min(need[cs]).min(sel[cs]);
                    if dom[cs] == best {
                        State::Dom
                    } else if need[cs] == best {
                        State::Need
                    } else {
                        State::Sel
                    }
                }
                State::Dom => {
                    if forced[s] == Some(c) || sel[cs] < dom[cs] {
                        State::Sel
                    } else {
                        State::Dom
                    }
                }
                State::Need => State::Dom,
            };
        }
    }
    let witness = DominatingSet::from_vertices(
        n,
        view.vertices().filter(|v| state[v.slot()] == State::Sel),
    );
    debug_assert_eq!(witness.len(), size);
    debug_assert!(witness.is_dominating(view));
    Ok(OptResult { size, witness, all: None })
}

/// `C_OPT` of a view.
pub fn opt_size(view: &TreeView) -> usize {
    min_dominating_set_tree(view).expect("non-empty tree").size
}

fn closed_masks(view: &TreeView) -> Vec<u64> {
    view.vertices()
        .map(|v| view.neighbors(v).fold(1u64 << v.slot(), |m, u| m | 1u64 << u.slot()))
        .collect()
}

/// Calls `visit` with every `k`-subset of `0..n` as sorted indices, in
/// lexicographic order, until it returns false.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive search over subsets of increasing size.
pub fn brute_force_min(view: &TreeView, cap: usize) -> Result<OptResult, OptError> {
    let n = view.len();
    if n == 0 {
        return Err(OptError::Empty);
    }
    if n > cap || n > 63 {
        return Err(OptError::TooLarge { n, cap });
    }
    let masks = closed_masks(view);
    let full = (1u64 << n) - 1;
    for k in 1..=n {
        let mut found = None;
        for_each_combination(n, k, |idx| {
            let cover = idx.iter().fold(0u64, |m, &i| m | masks[i]);
            if cover == full {
                found = Some(idx.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(idx) = found {
            let witness = DominatingSet::from_vertices(n, idx.into_iter().map(VertexId::from_slot));
            return Ok(OptResult { size: k, witness, all: None });
        }
    }
    unreachable!("the full vertex set dominates")
}

/// Every dominating set of minimum size, in lexicographic order.
pub fn enumerate_optimal_sets(view: &TreeView, cap: usize) -> Result<Vec<DominatingSet>, OptError> {
    enumerate_optimal_sets_limited(view, cap, DEFAULT_ENUM_LIMIT)
}

pub fn enumerate_optimal_sets_limited(
    view: &TreeView,
    cap: usize,
    limit: usize,
) -> Result<Vec<DominatingSet>, OptError> {
    let n = view.len();
    if n == 0 {
        return Err(OptError::Empty);
    }
    if n > cap || n > 63 {
        return Err(OptError::TooLarge { n, cap });
    }
    let k = opt_size(view);
    let masks = closed_masks(view);
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_combination(n, k, |idx| {
        let cover = idx.iter().fold(0u64, |m, &i| m | masks[i]);
        if cover == full {
            if out.len() == limit {
                overflow = true;
                return false;
            }
            out.push(DominatingSet::from_vertices(n, idx.iter().map(|&i| VertexId::from_slot(i))));
        }
        true
    });
    if overflow {
        return Err(OptError::TooMany { limit });
    }
    Ok(out)
}

/// Whether `set` dominates `view` and has optimum size.
pub fn is_optimal(view: &TreeView, set: &DominatingSet) -> bool {
    set.is_dominating(view) && set.len() == opt_size(view)
}
