use num_rational::Rational64;
use serde::Serialize;

use super::AnalysisError;
use crate::harness::ser_ratio;
use crate::online::{expected_costs, ra_expected_cost};
use crate::opt::opt_size;
use crate::tree::{DominatingSet, OnlineTreeInput, TreeView, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    B1,
    B2,
    B3,
    B4,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub id: usize,
    /// In assignment order.
    pub vertices: Vec<VertexId>,
    /// `u1, u2, u3` for three-vertex kinds: `u2` in the middle, `u1` the
    /// degree-3 end of a B2 and the earlier end of a B3 or B4.
    pub path: Option<[VertexId; 3]>,
    pub kind: BlockKind,
    pub contains_root: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockAssignment {
    /// Block id of each vertex, by slot.
    pub block_of: Vec<usize>,
    pub blocks: Vec<Block>,
}

/// Groups vertices greedily: the lowest unassigned vertex, its lowest
/// unassigned neighbour, then the lowest unassigned neighbour of either.
pub fn block_routine(view: &TreeView) -> BlockAssignment {
    let n = view.len();
    let mut block_of = vec![0usize; n];
    let mut blocks = Vec::new();
    let free = |block_of: &[usize], w: VertexId| block_of[w.index() - 1] == 0;
    for first in view.vertices() {
        if !free(&block_of, first) {
            continue;
        }
        let id = blocks.len() + 1;
        let mut members = vec![first];
        block_of[first.index() - 1] = id;
        if let Some(second) = view.neighbors(first).filter(|&w| free(&block_of, w)).min() {
            members.push(second);
            block_of[second.index() - 1] = id;
            let third = view.neighbors(first).chain(view.neighbors(second)).filter(|&w| free(&block_of, w)).min();
            if let Some(third) = third {
                members.push(third);
                block_of[third.index() - 1] = id;
            }
        }
        let (kind, path) = kind_of(view, &members);
        blocks.push(Block { id, contains_root: members.contains(&VertexId::ROOT), vertices: members, path, kind });
    }
    BlockAssignment { block_of, blocks }
}

fn kind_of(view: &TreeView, members: &[VertexId]) -> (BlockKind, Option<[VertexId; 3]>) {
    match *members {
        [v] if view.degree(v) == 1 => (BlockKind::B1, None),
        [a, b, c] => {
            let mid = [a, b, c]
                .into_iter()
                .find(|&m| [a, b, c].iter().filter(|&&x| x != m).all(|&x| view.adjacent(m, x)))
                .expect("three-vertex blocks are paths");
            let mut ends: Vec<VertexId> = [a, b, c].into_iter().filter(|&x| x != mid).collect();
            ends.sort();
            let (x, y) = (ends[0], ends[1]);
            if view.degree(mid) != 3 {
                return (BlockKind::Unclassified, None);
            }
            match (view.degree(x), view.degree(y)) {
                (3, 1) => (BlockKind::B2, Some([x, mid, y])),
                (1, 3) => (BlockKind::B2, Some([y, mid, x])),
                (1, 1) => (BlockKind::B3, Some([x, mid, y])),
                (3, 3) => (BlockKind::B4, Some([x, mid, y])),
                _ => (BlockKind::Unclassified, None),
            }
        }
        _ => (BlockKind::Unclassified, None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockClass {
    pub block: usize,
    pub kind: BlockKind,
    /// For B1: the neighbour already had degree 3 when the leaf arrived.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub late_leaf: Option<bool>,
    /// OPT's choices on `u1 u2 u3` (or the single vertex), with B4 patterns
    /// mirrored so the selected end comes first.
    pub pattern: String,
    pub forbidden: bool,
    pub contains_root: bool,
}

impl BlockClass {
    pub fn label(&self) -> String {
        match (self.kind, self.late_leaf) {
            (BlockKind::B1, Some(true)) => format!("B1,0^{}", self.pattern),
            (BlockKind::B1, _) => format!("B1,1^{}", self.pattern),
            (k, _) => format!("{k:?}^{}", self.pattern),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BlockCounts {
    pub n: usize,
    pub b10: i64,
    pub b11: i64,
    pub b2: i64,
    pub b3: i64,
    pub b4_000: i64,
    pub b4_100: i64,
    pub b4_010: i64,
    /// B4 blocks with a forbidden pattern.
    pub b4_other: i64,
    pub forbidden: i64,
    /// The block holding `v1` is a B2 (`b'_2`) or a B3 (`b'_3`).
    pub b2_root: i64,
    pub b3_root: i64,
}

impl BlockCounts {
    pub fn b4(&self) -> i64 {
        self.b4_000 + self.b4_100 + self.b4_010 + self.b4_other
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockClassification {
    pub classes: Vec<BlockClass>,
    pub counts: BlockCounts,
}

const ALLOWED: [&str; 7] = ["B1,0^0", "B1,1^0", "B2^010", "B3^010", "B4^000", "B4^100", "B4^010"];

/// Sub-kinds of every block under `optset`; fails on a block outside the
/// B1 to B4 taxonomy.
pub fn classify_blocks(
    view: &TreeView,
    assignment: &BlockAssignment,
    optset: &DominatingSet,
) -> Result<BlockClassification, AnalysisError> {
    let mut classes = Vec::with_capacity(assignment.blocks.len());
    let mut counts = BlockCounts { n: view.len(), ..BlockCounts::default() };
    for b in &assignment.blocks {
        let bit = |v: VertexId| if optset.contains(v) { '1' } else { '0' };
        let (late_leaf, pattern) = match (b.kind, b.path) {
            (BlockKind::B1, _) => {
                let v = b.vertices[0];
                let u = view.neighbors(v).next().expect("degree one");
                let at_arrival = if view.parent(v) == Some(u) { view.degree_at(u, v)? } else { 1 };
                (Some(at_arrival >= 3), bit(v).to_string())
            }
            (BlockKind::Unclassified, _) | (_, None) => return Err(AnalysisError::Unclassified { block: b.id }),
            (kind, Some([u1, u2, u3])) => {
                let mut p: String = [bit(u1), bit(u2), bit(u3)].into_iter().collect();
                if kind == BlockKind::B4 && (p == "001" || p == "011") {
                    p = p.chars().rev().collect();
                }
                (None, p)
            }
        };
        let mut class =
            BlockClass { block: b.id, kind: b.kind, late_leaf, pattern, forbidden: false, contains_root: b.contains_root };
        let label = class.label();
        class.forbidden = !ALLOWED.contains(&label.as_str());
        match (b.kind, late_leaf) {
            (BlockKind::B1, Some(true)) => counts.b10 += 1,
            (BlockKind::B1, _) => counts.b11 += 1,
            (BlockKind::B2, _) => counts.b2 += 1,
            (BlockKind::B3, _) => counts.b3 += 1,
            _ => match class.pattern.as_str() {
                "000" => counts.b4_000 += 1,
                "100" => counts.b4_100 += 1,
                "010" => counts.b4_010 += 1,
                _ => counts.b4_other += 1,
            },
        }
        if class.forbidden {
            counts.forbidden += 1;
        }
        if b.contains_root {
            counts.b2_root = i64::from(b.kind == BlockKind::B2);
            counts.b3_root = i64::from(b.kind == BlockKind::B3);
        }
        classes.push(class);
    }
    Ok(BlockClassification { classes, counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    /// `b10 + b11 + b3 = b2 + 3 b4 + 2`.
    pub leaf_identity: bool,
    /// Whether the two leaf bounds apply (`n ≥ 5`).
    pub leaf_bounds_apply: bool,
    /// `b10 ≤ b2 + b4_100 + b4_010`.
    pub b10_bound: bool,
    /// `b11 ≤ b4_100`.
    pub b11_bound: bool,
}

impl CountingReport {
    pub fn ok(&self) -> bool {
        self.leaf_identity && (!self.leaf_bounds_apply || (self.b10_bound && self.b11_bound))
    }
}

pub fn check_counting_identities(c: &BlockCounts) -> CountingReport {
    CountingReport {
        leaf_identity: c.b10 + c.b11 + c.b3 == c.b2 + 3 * c.b4() + 2,
        leaf_bounds_apply: c.n >= 5,
        b10_bound: c.b10 <= c.b2 + c.b4_100 + c.b4_010,
        b11_bound: c.b11 <= c.b4_100,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockCostRow {
    pub block: usize,
    pub kind: BlockKind,
    pub contains_root: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub cost: Rational64,
    #[serde(serialize_with = "ser_opt_ratio", skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rational64>,
    pub ok: bool,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_ratio(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockCostAudit {
    pub rows: Vec<BlockCostRow>,
    pub all_ok: bool,
}

fn half(k: i64) -> Rational64 {
    Rational64::new(k, 2)
}

/// Expected RA cost of each block against its per-kind bound. Single leaves
/// must hit their value exactly.
pub fn block_cost_audit(view: &TreeView, assignment: &BlockAssignment) -> Result<BlockCostAudit, AnalysisError> {
    let costs = expected_costs(view);
    let mut rows = Vec::with_capacity(assignment.blocks.len());
    for b in &assignment.blocks {
        let cost: Rational64 = b.vertices.iter().map(|v| costs[v.index() - 1]).sum();
        let (bound, exact) = match (b.kind, b.contains_root) {
            (BlockKind::B1, false) => {
                let v = b.vertices[0];
                let u = view.parent(v).expect("non-root leaf");
                (Some(if view.degree_at(u, v)? >= 3 { half(0) } else { half(1) }), true)
            }
            (BlockKind::B2, false) => (Some(half(5)), false),
            (BlockKind::B3, false) => (Some(half(3)), false),
            (BlockKind::B4, _) => (Some(half(6)), false),
            (BlockKind::B2, true) => (Some(half(6)), false),
            (BlockKind::B3, true) => (Some(half(5)), false),
            _ => (None, false),
        };
        let ok = match bound {
            Some(x) if exact => cost == x,
            Some(x) => cost <= x,
            None => true,
        };
        rows.push(BlockCostRow { block: b.id, kind: b.kind, contains_root: b.contains_root, cost, bound, ok });
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(BlockCostAudit { rows, all_ok })
}

/// The substitution chain bounding `E[C_RA] / C_OPT` by block counts.
#[derive(Debug, Clone, Serialize)]
pub struct BoundChain {
    /// `C_OPT` read off the counts.
    pub opt: i64,
    /// Per-block cost bounds with the `v1` surcharges, over `opt`.
    #[serde(serialize_with = "ser_ratio")]
    pub e1: Rational64,
    /// Surcharge relaxed to 1.
    #[serde(serialize_with = "ser_ratio")]
    pub e1_relaxed: Rational64,
    /// `b3` eliminated with the leaf identity.
    #[serde(serialize_with = "ser_ratio")]
    pub e2: Rational64,
    /// `b11` replaced by `b4_100`.
    #[serde(serialize_with = "ser_ratio")]
    pub e3: Rational64,
    /// `b4_100` replaced using the `b10` bound.
    #[serde(serialize_with = "ser_ratio")]
    pub e4: Rational64,
    /// `e4` in factored form.
    #[serde(serialize_with = "ser_ratio")]
    pub e5: Rational64,
    pub chain_holds: bool,
    pub below_five_halves: bool,
}

fn r(x: i64) -> Rational64 {
    Rational64::from(x)
}

pub fn theorem2_bound_chain(c: &BlockCounts) -> Result<BoundChain, AnalysisError> {
    let report = check_counting_identities(c);
    if !report.leaf_identity || !report.leaf_bounds_apply || !report.b10_bound || !report.b11_bound {
        return Err(AnalysisError::Identity(format!("{report:?}")));
    }
    if !(0..=1).contains(&c.b2_root) || !(0..=1).contains(&c.b3_root) || c.b2_root + c.b3_root > 1 {
        return Err(AnalysisError::Identity("v1 block flags out of range".into()));
    }
    let b4 = c.b4();
    let opt = c.b2 + c.b3 + c.b4_100 + c.b4_010;
    let head = half(c.b11) + half(5 * c.b2) + half(3 * c.b3) + r(3 * b4);
    let d2 = -c.b10 - c.b11 + 2 * c.b2 + 3 * b4 + c.b4_100 + c.b4_010 + 2;
    let d3 = -c.b10 + 2 * c.b2 + 3 * b4 + c.b4_010 + 2;
    if opt <= 0 || d2 <= 0 || d3 <= 0 {
        return Err(AnalysisError::Identity("non-positive denominator".into()));
    }
    let e1 = (head + half(c.b2_root) + r(c.b3_root)) / r(opt);
    let e1_relaxed = (head + r(1)) / r(opt);
    let e2 = (half(-3 * c.b10) - r(c.b11) + r(4 * c.b2) + half(15 * b4) + r(4)) / r(d2);
    let e3 = (half(-3 * c.b10) + r(4 * c.b2) + half(15 * b4) - r(c.b4_100) + r(4)) / r(d3);
    let e4 = (half(-5 * c.b10) + r(5 * c.b2) + half(15 * b4) + r(c.b4_010) + r(4)) / r(d3);
    let e5 = half(5)
        * (r(-c.b10 + 2 * c.b2 + 3 * b4) + Rational64::new(2 * c.b4_010, 5) + Rational64::new(8, 5))
        / r(d3);
    let chain_holds = e1 <= e1_relaxed && e1_relaxed == e2 && e2 <= e3 && e3 <= e4 && e4 == e5;
    Ok(BoundChain { opt, e1, e1_relaxed, e2, e3, e4, e5, chain_holds, below_five_halves: e5 < half(5) })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Audit {
    pub assignment: BlockAssignment,
    pub classification: BlockClassification,
    pub counting: CountingReport,
    pub costs: BlockCostAudit,
    pub chain: BoundChain,
    #[serde(serialize_with = "ser_ratio")]
    pub measured: Rational64,
    /// The optimum equals the count-based value and the measured ratio is at
    /// most `e1`.
    pub consistent: bool,
}

/// Blocks, counts, cost bounds and the bound chain for one instance whose
/// optimal set has no forbidden block kinds.
pub fn theorem2_audit(input: &OnlineTreeInput, optset: &DominatingSet) -> Result<Theorem2Audit, AnalysisError> {
    let view = input.view();
    let assignment = block_routine(&view);
    let classification = classify_blocks(&view, &assignment, optset)?;
    if classification.counts.forbidden > 0 {
        return Err(AnalysisError::Identity("forbidden block kinds present".into()));
    }
    let counting = check_counting_identities(&classification.counts);
    let costs = block_cost_audit(&view, &assignment)?;
    let chain = theorem2_bound_chain(&classification.counts)?;
    let opt = opt_size(&view);
    let measured = crate::ratio(ra_expected_cost(input), opt);
    let consistent = chain.opt == opt as i64 && measured <= chain.e1;
    Ok(Theorem2Audit { assignment, classification, counting, costs, chain, measured, consistent })
}
