//! Online tree inputs, revealed-prefix views, and the split/connect
//! transformations used by the analysis.
//!
//! An input is a parent-pointer reveal sequence: vertex `v_i` (1-based) arrives
//! at `parents[i-1]`, which must have been revealed earlier. The first entry is
//! the null marker `0`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of a vertex in the reveal order (`v_i` has index `i`, starting at 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(usize);

impl VertexId {
    pub const ROOT: VertexId = VertexId(1);

    /// Panics on `0`, which is reserved for the null marker.
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "vertex indices start at 1");
        VertexId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Zero-based slot for indexing per-vertex vectors.
    pub(crate) fn slot(self) -> usize {
        self.0 - 1
    }

    pub(crate) fn from_slot(slot: usize) -> Self {
        VertexId(slot + 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// The sequence has no vertices at all.
    Empty,
    /// `v1` must carry the null marker.
    RootHasParent { found: usize },
    /// A later vertex carries the null marker, which would disconnect the tree.
    MissingParent { index: usize },
    /// The parent has not been revealed yet (or is the vertex itself).
    ForwardReference { index: usize, parent: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "input has no vertices"),
            Violation::RootHasParent { found } => {
                write!(f, "v1 must have the null parent 0, found {found}")
            }
            Violation::MissingParent { index } => {
                write!(f, "v{index} has no parent; every vertex after v1 must arrive at a revealed vertex")
            }
            Violation::ForwardReference { index, parent } => {
                write!(f, "v{index} arrives at v{parent}, which is not revealed before it")
            }
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Set for single-vertex inputs: representable, but every ratio is one.
    pub trivial: bool,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural rule of a parent-pointer sequence and reports all
/// offending indices.
pub fn validate(parents: &[usize]) -> Validation {
    let mut violations = Vec::new();
    if parents.is_empty() {
        violations.push(Violation::Empty);
        return Validation { violations, trivial: false };
    }
    if parents[0] != 0 {
        violations.push(Violation::RootHasParent { found: parents[0] });
    }
    for (slot, &parent) in parents.iter().enumerate().skip(1) {
        let index = slot + 1;
        if parent == 0 {
            violations.push(Violation::MissingParent { index });
        } else if parent >= index {
            violations.push(Violation::ForwardReference { index, parent });
        }
    }
    Validation { violations, trivial: parents.len() == 1 }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ParentsDoc {
    Object { parents: Vec<Option<usize>> },
    Bare(Vec<Option<usize>>),
}

/// Reads `{"parents": [...]}` or a bare array without validating it. Both
/// `0` and `null` are accepted as the null marker.
pub fn parse_parents_json(text: &str) -> Result<Vec<usize>, serde_json::Error> {
    let raw = match serde_json::from_str(text)? {
        ParentsDoc::Object { parents } | ParentsDoc::Bare(parents) => parents,
    };
    Ok(raw.into_iter().map(|p| p.unwrap_or(0)).collect())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid online input: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{vertex} is not a vertex of the input (n = {n})")]
    UnknownVertex { vertex: VertexId, n: usize },
    #[error("{vertex} is revealed after {time}")]
    NotYetRevealed { vertex: VertexId, time: VertexId },
    #[error("removing the subtree of v1 leaves an empty input")]
    SplitAtRoot,
}

/// A validated reveal sequence `(V, E, S)` encoded by parent pointers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInput", into = "RawInput")]
pub struct OnlineTreeInput {
    parents: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawInput {
    parents: Vec<usize>,
}

impl TryFrom<RawInput> for OnlineTreeInput {
    type Error = TreeError;
    fn try_from(raw: RawInput) -> Result<Self, TreeError> {
        OnlineTreeInput::new(raw.parents)
    }
}

impl From<OnlineTreeInput> for RawInput {
    fn from(input: OnlineTreeInput) -> Self {
        RawInput { parents: input.parents }
    }
}

impl OnlineTreeInput {
    pub fn new(parents: Vec<usize>) -> Result<Self, TreeError> {
        let validation = validate(&parents);
        if !validation.is_ok() {
            return Err(TreeError::Invalid(validation.violations));
        }
        Ok(OnlineTreeInput { parents })
    }

    /// The one-vertex input `({u}, {}, (u))`.
    pub fn single() -> Self {
        OnlineTreeInput { parents: vec![0] }
    }

    /// A path revealed from one end.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        OnlineTreeInput { parents: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    /// Always false for a validated input; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.parents.len() == 1
    }

    /// Raw parent array with `0` as the null marker.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.parents[v.slot()] {
            0 => None,
            p => Some(VertexId(p)),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (1..=self.parents.len()).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() <= self.parents.len()
    }

    pub fn view(&self) -> TreeView {
        TreeView::from_input(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("input serializes")
    }

    fn check(&self, v: VertexId) -> Result<(), TreeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex { vertex: v, n: self.len() })
        }
    }

    /// Keeps the marked vertices in their original relative order. The kept set
    /// must induce a connected subtree whose earliest vertex is its top.
    fn induced(&self, keep: &[bool]) -> Derived {
        let mut new_id = vec![0usize; self.len()];
        let mut parents = Vec::new();
        let mut origin = Vec::new();
        for (slot, &p) in self.parents.iter().enumerate() {
            if !keep[slot] {
                continue;
            }
            let mapped = if p == 0 || !keep[p - 1] { 0 } else { new_id[p - 1] };
            parents.push(mapped);
            origin.push(VertexId::from_slot(slot));
            new_id[slot] = parents.len();
        }
        let input = OnlineTreeInput::new(parents).expect("induced subtree is connected");
        Derived { input, origin }
    }
}

impl fmt::Display for OnlineTreeInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[null")?;
        for p in &self.parents[1..] {
            write!(f, ",{p}")?;
        }
        write!(f, "]")
    }
}

/// An input produced by renumbering a subset of another input's vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derived {
    pub input: OnlineTreeInput,
    /// `origin[i - 1]` is the vertex of the source input that became `v_i`.
    pub origin: Vec<VertexId>,
}

impl Derived {
    /// New id of a source vertex, if it survived.
    pub fn new_id(&self, old: VertexId) -> Option<VertexId> {
        self.origin.iter().position(|&o| o == old).map(VertexId::from_slot)
    }

    pub fn old_id(&self, new: VertexId) -> VertexId {
        self.origin[new.slot()]
    }
}

/// `f1(σ, u)`: everything except `u` and its descendants, in the original order.
pub fn f1_split(input: &OnlineTreeInput, u: VertexId) -> Result<Derived, TreeError> {
    input.check(u)?;
    if u == VertexId::ROOT {
        return Err(TreeError::SplitAtRoot);
    }
    let inside = subtree_mask(input, u);
    let keep: Vec<bool> = inside.iter().map(|&b| !b).collect();
    Ok(input.induced(&keep))
}

/// `f2(σ, u)`: `u` and its descendants, with `u` revealed first.
pub fn f2_split(input: &OnlineTreeInput, u: VertexId) -> Result<Derived, TreeError> {
    input.check(u)?;
    let keep = subtree_mask(input, u);
    Ok(input.induced(&keep))
}

/// `f3(σ', v, σ'')`: all of `base`, then all of `attach` with its first vertex
/// arriving at `v`.
pub fn f3_connect(
    base: &OnlineTreeInput,
    v: VertexId,
    attach: &OnlineTreeInput,
) -> Result<OnlineTreeInput, TreeError> {
    base.check(v)?;
    let shift = base.len();
    let mut parents = base.parents.clone();
    parents.push(v.index());
    parents.extend(attach.parents[1..].iter().map(|&p| p + shift));
    Ok(OnlineTreeInput { parents })
}

/// Marks `u` and all its descendants. Children always follow their parent in
/// the reveal order, so one forward pass suffices.
fn subtree_mask(input: &OnlineTreeInput, u: VertexId) -> Vec<bool> {
    let mut inside = vec![false; input.len()];
    inside[u.slot()] = true;
    for slot in u.slot() + 1..input.len() {
        let p = input.parents[slot];
        if p != 0 && inside[p - 1] {
            inside[slot] = true;
        }
    }
    inside
}

/// Adjacency, depth and degree bookkeeping over a revealed prefix. Grows one
/// vertex at a time, so the same structure serves finished inputs and
/// adversaries that build their input online.
#[derive(Clone, Debug, Default)]
pub struct TreeView {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
}

impl TreeView {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_input(input: &OnlineTreeInput) -> Self {
        let mut view = TreeView {
            parent: Vec::with_capacity(input.len()),
            children: Vec::with_capacity(input.len()),
            depth: Vec::with_capacity(input.len()),
        };
        for v in input.vertices() {
            view.reveal(input.parent(v));
        }
        view
    }

    /// Reveals the next vertex. `parent` must be `None` exactly for the first
    /// vertex.
    pub fn reveal(&mut self, parent: Option<VertexId>) -> VertexId {
        let v = VertexId::from_slot(self.parent.len());
        match parent {
            None => {
                assert!(self.parent.is_empty(), "only v1 may arrive without a parent");
                self.depth.push(0);
            }
            Some(p) => {
                assert!(p < v, "{v} cannot arrive at unrevealed {p}");
                self.children[p.slot()].push(v);
                self.depth.push(self.depth[p.slot()] + 1);
            }
        }
        self.parent.push(parent);
        self.children.push(Vec::new());
        v
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator {
        (0..self.parent.len()).map(VertexId::from_slot)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() <= self.parent.len()
    }

    pub fn last(&self) -> Option<VertexId> {
        (!self.is_empty()).then(|| VertexId(self.len()))
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.slot()]
    }

    /// Vertices that arrived at `v`, in reveal order.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.slot()]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.parent(v).into_iter().chain(self.children(v).iter().copied())
    }

    /// `p(v)`: path length from `v1`.
    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v.slot()]
    }

    /// Degree in the revealed prefix (`deg(v)` once the input has ended).
    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v.slot()].len() + usize::from(self.parent[v.slot()].is_some())
    }

    /// `deg_t(v)`: degree of `v` immediately after `t` is revealed.
    pub fn degree_at(&self, v: VertexId, t: VertexId) -> Result<usize, TreeError> {
        self.check(v)?;
        self.check(t)?;
        if v > t {
            return Err(TreeError::NotYetRevealed { vertex: v, time: t });
        }
        let arrived = self.children[v.slot()].partition_point(|&c| c <= t);
        Ok(arrived + usize::from(self.parent[v.slot()].is_some()))
    }

    /// `u` and `v` adjacent.
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.parent(u) == Some(v) || self.parent(v) == Some(u)
    }

    /// All vertices below `v` in the arrival forest, in reveal order.
    pub fn descendants(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack: Vec<VertexId> = self.children(v).iter().rev().copied().collect();
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children(u).iter().rev().copied());
        }
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn to_input(&self) -> OnlineTreeInput {
        let parents = self.parent.iter().map(|p| p.map_or(0, |p| p.index())).collect();
        OnlineTreeInput { parents }
    }

    fn check(&self, v: VertexId) -> Result<(), TreeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex { vertex: v, n: self.len() })
        }
    }

    /// `p(v)` with an error for unknown vertices.
    pub fn try_depth(&self, v: VertexId) -> Result<usize, TreeError> {
        self.check(v)?;
        Ok(self.depth(v))
    }
}

/// A vertex set over a (possibly growing) tree, stored as membership flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DominatingSet {
    members: Vec<bool>,
    count: usize,
}

impl DominatingSet {
    pub fn empty(n: usize) -> Self {
        DominatingSet { members: vec![false; n], count: 0 }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut set = Self::empty(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    /// Extends the universe to `n` vertices.
    pub fn grow(&mut self, n: usize) {
        if n > self.members.len() {
            self.members.resize(n, false);
        }
    }

    /// Returns true if `v` was not already a member.
    pub fn insert(&mut self, v: VertexId) -> bool {
        self.grow(v.index());
        let fresh = !self.members[v.slot()];
        if fresh {
            self.members[v.slot()] = true;
            self.count += 1;
        }
        fresh
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.get(v.slot()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(slot, _)| VertexId::from_slot(slot))
    }

    /// `v` is a member or has a member neighbor.
    pub fn dominates_vertex(&self, view: &TreeView, v: VertexId) -> bool {
        self.contains(v) || view.neighbors(v).any(|u| self.contains(u))
    }

    pub fn undominated(&self, view: &TreeView) -> Vec<VertexId> {
        view.vertices().filter(|&v| !self.dominates_vertex(view, v)).collect()
    }

    pub fn is_dominating(&self, view: &TreeView) -> bool {
        view.vertices().all(|v| self.dominates_vertex(view, v))
    }
}

impl Serialize for DominatingSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.vertices())
    }
}

impl fmt::Display for DominatingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.vertices().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}
