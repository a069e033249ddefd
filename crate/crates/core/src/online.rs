//! Online algorithms for dominating set on revealed trees.
//!
//! An algorithm sees each newly revealed vertex together with the whole
//! revealed prefix and returns vertices to add. [`OnlineRun`] enforces the
//! contract: additions are irrevocable and the accumulated set must dominate
//! the prefix after every event.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::tree::{DominatingSet, OnlineTreeInput, TreeView, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OnlineError {
    #[error("{alg} tried to select {vertex}, which is not revealed yet")]
    UnrevealedSelection { alg: String, vertex: VertexId },
    #[error("{alg} left {vertices:?} undominated after {at} was revealed")]
    NotDominating { alg: String, at: VertexId, vertices: Vec<VertexId> },
}

/// A deterministic or internally randomized online algorithm.
pub trait OnlineAlgorithm {
    fn name(&self) -> String;

    /// Called right after `v` is revealed. `tree` is the revealed prefix
    /// (so `tree.degree(u)` is `deg_v(u)`), `selected` the set so far.
    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId>;
}

impl<T: OnlineAlgorithm + ?Sized> OnlineAlgorithm for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        (**self).on_reveal(tree, selected, v)
    }
}

/// Which of the two parity algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Arm {
    A,
    B,
}

/// Algorithms A and B. On arrival of `v` at `u`: select `u` if `u` now has
/// degree at least three, otherwise pick `u` or `v` by the parity of `p(v)`.
#[derive(Debug, Clone, Copy)]
pub struct ParityAlgorithm {
    pub arm: Arm,
}

impl ParityAlgorithm {
    pub fn a() -> Self {
        ParityAlgorithm { arm: Arm::A }
    }
    pub fn b() -> Self {
        ParityAlgorithm { arm: Arm::B }
    }
}

impl OnlineAlgorithm for ParityAlgorithm {
    fn name(&self) -> String {
        match self.arm {
            Arm::A => "a".into(),
            Arm::B => "b".into(),
        }
    }

    fn on_reveal(&mut self, tree: &TreeView, _: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        let Some(u) = tree.parent(v) else {
            return vec![v];
        };
        if tree.degree(u) >= 3 {
            return vec![u];
        }
        let even = tree.depth(v) % 2 == 0;
        let pick_parent = match self.arm {
            Arm::A => even,
            Arm::B => !even,
        };
        vec![if pick_parent { u } else { v }]
    }
}

/// Baseline: selects nothing while the new vertex is already dominated;
/// otherwise takes the parent once it branches and the new vertex before that.
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

impl OnlineAlgorithm for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        match tree.parent(v) {
            None => vec![v],
            Some(u) if selected.contains(u) => vec![],
            Some(u) if tree.degree(u) >= 3 => vec![u],
            Some(_) => vec![v],
        }
    }
}

/// Selects the new vertex whenever it arrives undominated.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysNew;

impl OnlineAlgorithm for AlwaysNew {
    fn name(&self) -> String {
        "always-new".into()
    }

    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        match tree.parent(v) {
            Some(u) if selected.contains(u) => vec![],
            _ => vec![v],
        }
    }
}

/// Selects the parent whenever the new vertex arrives undominated.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverNew;

impl OnlineAlgorithm for NeverNew {
    fn name(&self) -> String {
        "never-new".into()
    }

    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        match tree.parent(v) {
            None => vec![v],
            Some(u) if selected.contains(u) => vec![],
            Some(u) => vec![u],
        }
    }
}

/// RA as an online algorithm: one seeded coin picks A or B up front.
#[derive(Debug, Clone)]
pub struct RaSampled {
    inner: ParityAlgorithm,
}

impl RaSampled {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_coin(rng.gen_bool(0.5))
    }

    pub fn from_coin(heads: bool) -> Self {
        RaSampled { inner: if heads { ParityAlgorithm::a() } else { ParityAlgorithm::b() } }
    }

    pub fn arm(&self) -> Arm {
        self.inner.arm
    }
}

impl OnlineAlgorithm for RaSampled {
    fn name(&self) -> String {
        "ra-sample".into()
    }

    fn on_reveal(&mut self, tree: &TreeView, selected: &DominatingSet, v: VertexId) -> Vec<VertexId> {
        self.inner.on_reveal(tree, selected, v)
    }
}

/// Algorithm selector for the deterministic algorithms in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    A,
    B,
    Greedy,
    AlwaysNew,
    NeverNew,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::A,
        AlgorithmKind::B,
        AlgorithmKind::Greedy,
        AlgorithmKind::AlwaysNew,
        AlgorithmKind::NeverNew,
    ];

    pub fn build(self) -> Box<dyn OnlineAlgorithm + Send> {
        match self {
            AlgorithmKind::A => Box::new(ParityAlgorithm::a()),
            AlgorithmKind::B => Box::new(ParityAlgorithm::b()),
            AlgorithmKind::Greedy => Box::new(Greedy),
            AlgorithmKind::AlwaysNew => Box::new(AlwaysNew),
            AlgorithmKind::NeverNew => Box::new(NeverNew),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::A => "a",
            AlgorithmKind::B => "b",
            AlgorithmKind::Greedy => "greedy",
            AlgorithmKind::AlwaysNew => "always-new",
            AlgorithmKind::NeverNew => "never-new",
        }
    }
}

/// What an algorithm did over a whole input.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionTrace {
    pub algorithm: String,
    /// `additions[i]` lists vertices newly added right after `v_{i+1}`.
    pub additions: Vec<Vec<VertexId>>,
    pub selected: DominatingSet,
    pub cost: usize,
}

impl SelectionTrace {
    /// Reveal time of the event that added `v`, if it was ever added.
    pub fn added_at(&self, v: VertexId) -> Option<VertexId> {
        self.additions
            .iter()
            .position(|adds| adds.contains(&v))
            .map(|slot| VertexId::new(slot + 1))
    }

    /// Whether `v` was selected by the end of event `t`.
    pub fn selected_by(&self, v: VertexId, t: VertexId) -> bool {
        self.added_at(v).is_some_and(|at| at <= t)
    }
}

/// One online session: reveals vertices, asks the algorithm, checks the
/// contract. Adversaries drive it vertex by vertex.
pub struct OnlineRun<Alg> {
    alg: Alg,
    tree: TreeView,
    selected: DominatingSet,
    additions: Vec<Vec<VertexId>>,
}

impl<Alg: OnlineAlgorithm> OnlineRun<Alg> {
    pub fn new(alg: Alg) -> Self {
        OnlineRun { alg, tree: TreeView::new(), selected: DominatingSet::default(), additions: Vec::new() }
    }

    pub fn tree(&self) -> &TreeView {
        &self.tree
    }

    pub fn selected(&self) -> &DominatingSet {
        &self.selected
    }

    pub fn algorithm(&self) -> &Alg {
        &self.alg
    }

    /// Reveals the next vertex and returns what the algorithm newly added.
    pub fn reveal(&mut self, parent: Option<VertexId>) -> Result<&[VertexId], OnlineError> {
        let v = self.tree.reveal(parent);
        self.selected.grow(self.tree.len());
        let picks = self.alg.on_reveal(&self.tree, &self.selected, v);
        let mut fresh = Vec::new();
        for w in picks {
            if !self.tree.contains(w) {
                return Err(OnlineError::UnrevealedSelection { alg: self.alg.name(), vertex: w });
            }
            if self.selected.insert(w) {
                fresh.push(w);
            }
        }
        // Only v and its parent can have lost domination status.
        let mut missing: Vec<VertexId> = std::iter::once(v)
            .chain(parent)
            .filter(|&w| !self.selected.dominates_vertex(&self.tree, w))
            .collect();
        if !missing.is_empty() {
            missing.sort();
            return Err(OnlineError::NotDominating { alg: self.alg.name(), at: v, vertices: missing });
        }
        self.additions.push(fresh);
        Ok(self.additions.last().expect("just pushed"))
    }

    pub fn finish(self) -> SelectionTrace {
        let cost = self.selected.len();
        SelectionTrace { algorithm: self.alg.name(), additions: self.additions, selected: self.selected, cost }
    }
}

/// Runs `alg` over a complete input.
pub fn run_online<Alg: OnlineAlgorithm>(alg: Alg, input: &OnlineTreeInput) -> Result<SelectionTrace, OnlineError> {
    let mut run = OnlineRun::new(alg);
    for v in input.vertices() {
        run.reveal(input.parent(v))?;
    }
    Ok(run.finish())
}

pub fn run_algorithm_a(input: &OnlineTreeInput) -> SelectionTrace {
    run_online(ParityAlgorithm::a(), input).expect("A always dominates")
}

pub fn run_algorithm_b(input: &OnlineTreeInput) -> SelectionTrace {
    run_online(ParityAlgorithm::b(), input).expect("B always dominates")
}

pub fn run_baseline_greedy(input: &OnlineTreeInput) -> SelectionTrace {
    run_online(Greedy, input).expect("greedy always dominates")
}

/// Runs RA with one seeded coin flip.
pub fn run_ra_sampled(input: &OnlineTreeInput, seed: u64) -> SelectionTrace {
    run_online(RaSampled::new(seed), input).expect("RA always dominates")
}

/// Both arms of RA on one input, mixed with weight one half each.
#[derive(Debug, Clone, Serialize)]
pub struct RaMixture {
    pub a: SelectionTrace,
    pub b: SelectionTrace,
}

impl RaMixture {
    pub fn run(input: &OnlineTreeInput) -> Self {
        RaMixture { a: run_algorithm_a(input), b: run_algorithm_b(input) }
    }

    pub fn weight(&self) -> Rational64 {
        Rational64::new(1, 2)
    }

    pub fn expected_cost(&self) -> Rational64 {
        Rational64::new((self.a.cost + self.b.cost) as i64, 2)
    }

    /// Final selection probability of `v`.
    pub fn probability(&self, v: VertexId) -> Rational64 {
        let hits = usize::from(self.a.selected.contains(v)) + usize::from(self.b.selected.contains(v));
        Rational64::new(hits as i64, 2)
    }

    /// Probability that `v` is selected by the end of event `t`.
    pub fn probability_at(&self, v: VertexId, t: VertexId) -> Rational64 {
        let hits = usize::from(self.a.selected_by(v, t)) + usize::from(self.b.selected_by(v, t));
        Rational64::new(hits as i64, 2)
    }
}

/// Exact `E[C_RA]`.
pub fn ra_expected_cost(input: &OnlineTreeInput) -> Rational64 {
    RaMixture::run(input).expected_cost()
}

/// Final selection probability of every vertex under RA, indexed by slot.
pub fn ra_selection_probability(input: &OnlineTreeInput) -> Vec<Rational64> {
    let mix = RaMixture::run(input);
    input.vertices().map(|v| mix.probability(v)).collect()
}

/// Structural case of a vertex in the A/B membership table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipCase {
    /// `v = v1`.
    Root,
    /// `deg(v) >= 3`.
    Branch,
    /// `deg(v) = 2`, with the parity of `p(v)`.
    Inner { odd: bool },
    /// Leaf whose neighbor ends with degree at least 3 but had at most 2 when the leaf arrived.
    LeafEarly { odd: bool },
    /// Leaf that arrived at a neighbor already of degree at least 3.
    LeafLate,
    /// Leaf whose neighbor ends with degree at most 2.
    LeafLow { odd: bool },
}

impl MembershipCase {
    /// Expected `(v ∈ D_A, v ∈ D_B)`.
    pub fn expected_membership(self) -> (bool, bool) {
        match self {
            MembershipCase::Root | MembershipCase::Branch => (true, true),
            MembershipCase::Inner { odd } | MembershipCase::LeafEarly { odd } | MembershipCase::LeafLow { odd } => {
                (odd, !odd)
            }
            MembershipCase::LeafLate => (false, false),
        }
    }

    /// Expected RA cost for the vertex.
    pub fn expected_cost(self) -> Rational64 {
        let (a, b) = self.expected_membership();
        Rational64::new(i64::from(a) + i64::from(b), 2)
    }

    pub fn label(self) -> &'static str {
        match self {
            MembershipCase::Root => "1",
            MembershipCase::Branch => "2",
            MembershipCase::Inner { odd: false } => "3-e",
            MembershipCase::Inner { odd: true } => "3-o",
            MembershipCase::LeafEarly { odd: false } => "4-1-e",
            MembershipCase::LeafEarly { odd: true } => "4-1-o",
            MembershipCase::LeafLate => "4-2",
            MembershipCase::LeafLow { odd: false } => "4-3-e",
            MembershipCase::LeafLow { odd: true } => "4-3-o",
        }
    }
}

/// Classifies `v` from final degrees, `deg_v(ũ)` and parity only.
pub fn membership_case(view: &TreeView, v: VertexId) -> MembershipCase {
    let odd = view.depth(v) % 2 == 1;
    if v == VertexId::ROOT {
        return MembershipCase::Root;
    }
    match view.degree(v) {
        d if d >= 3 => MembershipCase::Branch,
        2 => MembershipCase::Inner { odd },
        _ => {
            let nb = view.parent(v).expect("non-root vertex has a parent");
            let at_arrival = view.degree_at(nb, v).expect("parent precedes child");
            if view.degree(nb) <= 2 {
                MembershipCase::LeafLow { odd }
            } else if at_arrival <= 2 {
                MembershipCase::LeafEarly { odd }
            } else {
                MembershipCase::LeafLate
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipRow {
    pub vertex: VertexId,
    pub case: MembershipCase,
    pub in_a: bool,
    pub in_b: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub rows: Vec<MembershipRow>,
}

impl MembershipReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &MembershipRow> {
        self.rows.iter().filter(|r| !r.ok)
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Checks every vertex's final membership in `D_A` and `D_B` against its case.
pub fn verify_membership_table(input: &OnlineTreeInput) -> MembershipReport {
    let view = input.view();
    let mix = RaMixture::run(input);
    verify_membership_with(&view, &mix)
}

pub fn verify_membership_with(view: &TreeView, mix: &RaMixture) -> MembershipReport {
    let rows = view
        .vertices()
        .map(|v| {
            let case = membership_case(view, v);
            let in_a = mix.a.selected.contains(v);
            let in_b = mix.b.selected.contains(v);
            MembershipRow { vertex: v, case, in_a, in_b, ok: case.expected_membership() == (in_a, in_b) }
        })
        .collect();
    MembershipReport { rows }
}

/// Structural expected cost of `v`; panics if it disagrees with the traces,
/// since that can only be an implementation bug.
pub fn expected_cost_per_vertex(input: &OnlineTreeInput, v: VertexId) -> Rational64 {
    let view = input.view();
    let mix = RaMixture::run(input);
    let value = membership_case(&view, v).expected_cost();
    assert_eq!(value, mix.probability(v), "membership case disagrees with traces at {v}");
    value
}

/// Per-vertex structural costs for the whole input, indexed by slot.
pub fn expected_costs(view: &TreeView) -> Vec<Rational64> {
    view.vertices().map(|v| membership_case(view, v).expected_cost()).collect()
}
