//! Adaptive adversary against deterministic online algorithms.
//!
//! `subtree_routine` grows a chain from a base vertex until the algorithm
//! selects the newest chain vertex, then hangs one sibling off the previous
//! chain vertex. `tree_routine` calls it repeatedly from a base vertex and
//! re-bases when a T2-set follows a T1-set.

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::online::{AlgorithmKind, OnlineAlgorithm, OnlineError, OnlineRun};
use crate::opt::opt_size;
use crate::tree::{DominatingSet, OnlineTreeInput, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Contract(#[from] OnlineError),
    #[error("base vertex {0} is not selected by the algorithm")]
    BaseNotSelected(VertexId),
    #[error("reveal budget of {0} exhausted")]
    Runaway(usize),
    #[error("T-set of {base} has length {length}, inconsistent with kind {kind:?}")]
    InconsistentTSet { base: VertexId, length: usize, kind: TKind },
    #[error("transcript check failed: {0}")]
    Ledger(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdversaryParams {
    pub max_length: usize,
    pub max_t0: usize,
    pub max_t1: usize,
}

impl Default for AdversaryParams {
    fn default() -> Self {
        AdversaryParams { max_length: 98, max_t0: 100, max_t1: 100 }
    }
}

impl AdversaryParams {
    pub fn new(max_length: usize, max_t0: usize, max_t1: usize) -> Result<Self, AdversaryError> {
        let p = AdversaryParams { max_length, max_t0, max_t1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        if self.max_length % 3 != 2 {
            return Err(AdversaryError::InvalidParams(format!(
                "max-length must be 2 mod 3, got {}",
                self.max_length
            )));
        }
        if self.max_length < 2 || self.max_t0 < 2 || self.max_t1 < 2 {
            return Err(AdversaryError::InvalidParams("all parameters must be at least 2".into()));
        }
        Ok(())
    }

    /// Upper bound on the number of reveals of one run.
    pub fn reveal_budget(&self) -> usize {
        self.max_t1 * (self.max_t0 + 2) * (self.max_length + 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TKind {
    T0,
    T1,
    T2,
    T3,
}

impl TKind {
    pub fn of_length(length: usize, max_length: usize) -> TKind {
        if length == max_length {
            return TKind::T3;
        }
        match length % 3 {
            0 => TKind::T0,
            1 => TKind::T1,
            _ => TKind::T2,
        }
    }
}

/// A T-set: chain `u_1 .. u_ℓ` below `base` (position 0) plus an optional
/// sibling hanging off chain position `anchor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TSet {
    pub base: VertexId,
    /// 1-based rank among the base's T-sets.
    pub rank: usize,
    pub chain: Vec<VertexId>,
    pub sibling: Option<Sibling>,
    pub kind: TKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sibling {
    pub vertex: VertexId,
    pub anchor: usize,
}

impl TSet {
    pub fn length(&self) -> usize {
        self.chain.len()
    }

    pub fn members(&self) -> Vec<VertexId> {
        let mut out = self.chain.clone();
        out.extend(self.sibling.map(|s| s.vertex));
        out
    }

    fn at(&self, position: usize) -> VertexId {
        if position == 0 {
            self.base
        } else {
            self.chain[position - 1]
        }
    }

    /// Chain positions OFF selects: every third vertex, phased by kind so
    /// that position `ℓ-1` is always taken.
    fn off_positions(&self) -> Vec<usize> {
        let l = self.length();
        let (start, lo) = match self.kind {
            TKind::T0 => (2, 2),
            TKind::T1 => (0, 0),
            TKind::T2 | TKind::T3 => (1, 1),
        };
        let mut out: Vec<usize> = if l == 0 { vec![] } else { (start..l).step_by(3).filter(|&p| p >= lo).collect() };
        if let Some(s) = self.sibling {
            if !out.contains(&s.anchor) {
                out.push(s.anchor);
            }
        }
        out
    }

    /// Sibling hangs somewhere other than `ℓ-1`; only the Case 3.3.2 split
    /// of a length-2 T2-set produces this.
    pub fn needs_repair(&self) -> bool {
        self.sibling.is_some_and(|s| s.anchor + 1 != self.length())
    }
}

/// OFF's cost for one T-set. A T1-set's cost includes its base vertex.
pub fn off_cost_for_tset(t: &TSet, max_length: usize) -> Result<usize, AdversaryError> {
    let l = t.length();
    if TKind::of_length(l, max_length) != t.kind {
        return Err(AdversaryError::InconsistentTSet { base: t.base, length: l, kind: t.kind });
    }
    let formula = match t.kind {
        TKind::T0 => l / 3,
        TKind::T1 => (l + 2) / 3,
        TKind::T2 | TKind::T3 => (l + 1) / 3,
    };
    Ok(formula + usize::from(t.needs_repair()))
}

/// ON's cost for a T-set when the algorithm selects nothing beyond what the
/// routine forces.
pub fn on_cost_for_tset(t: &TSet, max_length: usize) -> usize {
    match t.kind {
        TKind::T3 => max_length - 1,
        _ => t.length(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    #[serde(rename = "3.1.2")]
    ManyT0,
    #[serde(rename = "3.2.2")]
    SecondT1,
    #[serde(rename = "3.3.1")]
    LoneT2,
    #[serde(rename = "3.3.2")]
    Rebased,
    #[serde(rename = "3.4")]
    LongChain,
}

impl Termination {
    pub fn step_label(self) -> &'static str {
        match self {
            Termination::ManyT0 => "3.1.2",
            Termination::SecondT1 => "3.2.2",
            Termination::LoneT2 => "3.3.1",
            Termination::Rebased => "3.3.2",
            Termination::LongChain => "3.4",
        }
    }

    /// Label of the matching ratio case.
    pub fn ratio_case(self) -> &'static str {
        match self {
            Termination::SecondT1 => "2-1",
            Termination::LoneT2 => "2-2",
            Termination::LongChain => "2-3",
            Termination::ManyT0 => "2-4",
            Termination::Rebased => "2-5",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversaryTranscript {
    pub algorithm: String,
    pub params: AdversaryParams,
    pub input: OnlineTreeInput,
    pub bases: Vec<VertexId>,
    pub tsets: Vec<TSet>,
    pub termination: Termination,
    pub on_selected: DominatingSet,
    pub on_cost: usize,
    pub off_witness: DominatingSet,
    pub off_cost: usize,
    /// Bookkeeping notes, e.g. T-sets whose OFF cost needed a repair.
    pub flags: Vec<String>,
}

impl AdversaryTranscript {
    pub fn ratio(&self) -> Rational64 {
        Rational64::new(self.on_cost as i64, self.off_cost as i64)
    }

    pub fn tsets_of(&self, base: VertexId) -> impl Iterator<Item = &TSet> {
        self.tsets.iter().filter(move |t| t.base == base)
    }
}

/// Runs one SubtreeRoutine from `base`. The routine itself only looks at
/// whether the newest chain vertex is in the algorithm's set.
pub fn subtree_routine<Alg: OnlineAlgorithm>(
    run: &mut OnlineRun<Alg>,
    base: VertexId,
    rank: usize,
    params: &AdversaryParams,
) -> Result<TSet, AdversaryError> {
    if !run.selected().contains(base) {
        return Err(AdversaryError::BaseNotSelected(base));
    }
    let mut chain = Vec::new();
    let mut sibling = None;
    let mut prev = base;
    for j in 1..=params.max_length {
        run.reveal(Some(prev))?;
        let u = run.tree().last().expect("just revealed");
        chain.push(u);
        if run.selected().contains(u) {
            run.reveal(Some(prev))?;
            let s = run.tree().last().expect("just revealed");
            sibling = Some(Sibling { vertex: s, anchor: j - 1 });
            break;
        }
        prev = u;
    }
    let kind = TKind::of_length(chain.len(), params.max_length);
    Ok(TSet { base, rank, chain, sibling, kind })
}

/// Drives `alg` through the full TreeRoutine.
pub fn tree_routine<Alg: OnlineAlgorithm>(alg: Alg, params: AdversaryParams) -> Result<AdversaryTranscript, AdversaryError> {
    params.validate()?;
    let mut run = OnlineRun::new(alg);
    run.reveal(None)?;
    let mut base = VertexId::ROOT;
    let mut bases = vec![base];
    let mut tsets: Vec<TSet> = Vec::new();
    let mut count = 1;
    let budget = params.reveal_budget();
    let rank_of = |tsets: &[TSet], b: VertexId| tsets.iter().filter(|t| t.base == b).count() + 1;

    let termination = 'outer: loop {
        let mut cnt_t0 = 0;
        let mut cnt_t1 = 0;
        loop {
            if run.tree().len() > budget {
                return Err(AdversaryError::Runaway(budget));
            }
            let t = subtree_routine(&mut run, base, rank_of(&tsets, base), &params)?;
            match t.kind {
                TKind::T0 => {
                    tsets.push(t);
                    cnt_t0 += 1;
                    if cnt_t0 == params.max_t0 {
                        break 'outer Termination::ManyT0;
                    }
                }
                TKind::T1 => {
                    tsets.push(t);
                    if cnt_t1 == 0 {
                        cnt_t1 = 1;
                    } else {
                        break 'outer Termination::SecondT1;
                    }
                }
                TKind::T2 if cnt_t1 == 0 => {
                    tsets.push(t);
                    break 'outer Termination::LoneT2;
                }
                TKind::T2 => {
                    let (head, tail) = split_t2(&t, params.max_length);
                    let u2 = tail.base;
                    tsets.push(head);
                    tsets.push(tail);
                    base = u2;
                    bases.push(u2);
                    if !run.selected().contains(u2) {
                        return Err(AdversaryError::BaseNotSelected(u2));
                    }
                    if count == params.max_t1 {
                        break 'outer Termination::Rebased;
                    }
                    count += 1;
                    continue 'outer;
                }
                TKind::T3 => {
                    tsets.push(t);
                    break 'outer Termination::LongChain;
                }
            }
        }
    };

    let name = run.algorithm().name();
    let input = run.tree().to_input();
    let trace = run.finish();
    let (off_witness, flags) = off_witness(&bases, &tsets);
    let off_cost = off_witness.len();
    Ok(AdversaryTranscript {
        algorithm: name,
        params,
        input,
        bases,
        tsets,
        termination,
        on_cost: trace.cost,
        on_selected: trace.selected,
        off_witness,
        off_cost,
        flags,
    })
}

/// Runs the adversary against one of the built-in deterministic algorithms.
pub fn run_against(kind: AlgorithmKind, params: AdversaryParams) -> Result<AdversaryTranscript, AdversaryError> {
    tree_routine(kind.build(), params)
}

/// Case 3.3.2: the T2-set of `v` becomes a T1-set `{u1}` of `v` (plus the
/// sibling when it hangs off `u1`) and a T0-set of the new base `u2`.
fn split_t2(t: &TSet, max_length: usize) -> (TSet, TSet) {
    let l = t.length();
    let u2 = t.chain[1];
    let sib = t.sibling.expect("a T2-set ends with a sibling");
    let head_sibling = (sib.anchor == 1).then_some(Sibling { vertex: sib.vertex, anchor: 1 });
    let head = TSet { base: t.base, rank: t.rank, chain: vec![t.chain[0]], sibling: head_sibling, kind: TKind::T1 };
    let tail_chain: Vec<VertexId> = t.chain[2..].to_vec();
    let tail_sibling = (sib.anchor >= 3).then(|| Sibling { vertex: sib.vertex, anchor: sib.anchor - 2 });
    debug_assert_eq!(tail_chain.len(), l - 2);
    let tail = TSet {
        base: u2,
        rank: 1,
        kind: TKind::of_length(tail_chain.len(), max_length),
        chain: tail_chain,
        sibling: tail_sibling,
    };
    (head, tail)
}

fn off_witness(bases: &[VertexId], tsets: &[TSet]) -> (DominatingSet, Vec<String>) {
    let mut set = DominatingSet::default();
    let mut flags = Vec::new();
    for t in tsets {
        for p in t.off_positions() {
            set.insert(t.at(p));
        }
        if t.needs_repair() {
            flags.push(format!(
                "T1-set of {} carries sibling {} off position {}; OFF adds {}",
                t.base,
                t.sibling.map(|s| s.vertex).expect("repair implies sibling"),
                t.sibling.map(|s| s.anchor).unwrap_or_default(),
                t.at(t.sibling.map(|s| s.anchor).unwrap_or_default()),
            ));
        }
    }
    for &b in bases {
        if tsets.iter().filter(|t| t.base == b).all(|t| t.kind == TKind::T0) {
            set.insert(b);
        }
    }
    (set, flags)
}

/// Per-base cost row recomputed from the ledger.
#[derive(Debug, Clone, Serialize)]
pub struct BaseCosts {
    pub base: VertexId,
    pub kinds: Vec<TKind>,
    pub on: usize,
    pub off: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioCertificate {
    pub case: &'static str,
    pub step: &'static str,
    pub on_cost: usize,
    /// ON's cost when it selects only what the routine forces.
    pub on_ledger: usize,
    pub off_cost: usize,
    pub opt_cost: usize,
    pub per_base: Vec<BaseCosts>,
    #[serde(serialize_with = "crate::harness::ser_ratio")]
    pub ratio: Rational64,
    #[serde(serialize_with = "crate::harness::ser_ratio")]
    pub ratio_vs_opt: Rational64,
}

/// Recomputes ON and OFF per base from the ledger, checks them against the
/// trace and the witness, and certifies the ratio.
pub fn verify_ratio_cases(tr: &AdversaryTranscript) -> Result<RatioCertificate, AdversaryError> {
    let ml = tr.params.max_length;
    let view = tr.input.view();
    if !tr.off_witness.is_dominating(&view) {
        return Err(AdversaryError::Ledger(format!(
            "OFF leaves {:?} undominated",
            tr.off_witness.undominated(&view)
        )));
    }
    if tr.on_selected.len() != tr.on_cost || !tr.on_selected.is_dominating(&view) {
        return Err(AdversaryError::Ledger("ON trace is inconsistent".into()));
    }
    let covered: usize = tr.bases.len() + tr.tsets.iter().map(|t| t.members().len()).sum::<usize>();
    if covered != tr.input.len() {
        return Err(AdversaryError::Ledger(format!("ledger covers {covered} of {} vertices", tr.input.len())));
    }
    for &b in &tr.bases {
        if !tr.on_selected.contains(b) {
            return Err(AdversaryError::BaseNotSelected(b));
        }
    }

    let mut per_base = Vec::new();
    for &b in &tr.bases {
        let sets: Vec<&TSet> = tr.tsets_of(b).collect();
        let mut off = 0;
        let mut t1s = 0;
        for t in &sets {
            off += off_cost_for_tset(t, ml)?;
            t1s += usize::from(t.kind == TKind::T1);
        }
        // every T1-set counts the base; keep it once
        off -= t1s.saturating_sub(1);
        if sets.iter().all(|t| t.kind == TKind::T0) {
            off += 1;
        }
        let on = 1 + sets.iter().map(|t| on_cost_for_tset(t, ml)).sum::<usize>();
        per_base.push(BaseCosts { base: b, kinds: sets.iter().map(|t| t.kind).collect(), on, off });
    }
    let off_sum: usize = per_base.iter().map(|r| r.off).sum();
    if off_sum != tr.off_cost {
        return Err(AdversaryError::Ledger(format!("OFF ledger {off_sum} vs witness {}", tr.off_cost)));
    }
    let on_ledger: usize = per_base.iter().map(|r| r.on).sum();
    if tr.on_cost < on_ledger {
        return Err(AdversaryError::Ledger(format!("ON trace {} below forced {on_ledger}", tr.on_cost)));
    }
    let opt_cost = opt_size(&view);
    if opt_cost > tr.off_cost {
        return Err(AdversaryError::Ledger(format!("OPT {opt_cost} exceeds OFF {}", tr.off_cost)));
    }
    Ok(RatioCertificate {
        case: tr.termination.ratio_case(),
        step: tr.termination.step_label(),
        on_cost: tr.on_cost,
        on_ledger,
        off_cost: tr.off_cost,
        opt_cost,
        per_base,
        ratio: tr.ratio(),
        ratio_vs_opt: Rational64::new(tr.on_cost as i64, opt_cost as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{AlwaysNew, Greedy, NeverNew, ParityAlgorithm};

    fn small() -> AdversaryParams {
        AdversaryParams::new(8, 4, 3).unwrap()
    }

    #[test]
    fn params_enforce_mod_three() {
        assert!(AdversaryParams::new(97, 100, 100).is_err());
        assert!(AdversaryParams::new(98, 1, 100).is_err());
        assert!(AdversaryParams::default().validate().is_ok());
    }

    #[test]
    fn subtree_against_always_new_stops_at_first_selection() {
        let mut run = OnlineRun::new(AlwaysNew);
        run.reveal(None).unwrap();
        let t = subtree_routine(&mut run, VertexId::ROOT, 1, &small()).unwrap();
        // u1 lands on the selected root and stays unselected; u2 is taken
        assert_eq!(t.length(), 2);
        assert_eq!(t.kind, TKind::T2);
    }

    #[test]
    fn subtree_against_never_new_runs_to_max_length() {
        let mut run = OnlineRun::new(NeverNew);
        run.reveal(None).unwrap();
        let t = subtree_routine(&mut run, VertexId::ROOT, 1, &small()).unwrap();
        assert_eq!((t.length(), t.kind, t.sibling), (8, TKind::T3, None));
    }

    #[test]
    fn subtree_against_a_from_even_depth_gives_t1() {
        let mut run = OnlineRun::new(ParityAlgorithm::a());
        run.reveal(None).unwrap();
        let t = subtree_routine(&mut run, VertexId::ROOT, 1, &small()).unwrap();
        assert_eq!((t.length(), t.kind), (1, TKind::T1));
        assert_eq!(t.sibling.unwrap().anchor, 0);
    }

    #[test]
    fn off_cost_examples() {
        let v = VertexId::new;
        let t1 = TSet { base: v(1), rank: 1, chain: vec![v(2)], sibling: Some(Sibling { vertex: v(3), anchor: 0 }), kind: TKind::T1 };
        assert_eq!(off_cost_for_tset(&t1, 98).unwrap(), 1);
        let t0 = TSet { base: v(1), rank: 1, chain: vec![v(2), v(3), v(4)], sibling: Some(Sibling { vertex: v(5), anchor: 2 }), kind: TKind::T0 };
        assert_eq!(off_cost_for_tset(&t0, 98).unwrap(), 1);
        let t3 = TSet { base: v(1), rank: 1, chain: (2..=99).map(v).collect(), sibling: None, kind: TKind::T3 };
        assert_eq!(off_cost_for_tset(&t3, 98).unwrap(), 33);
        let bad = TSet { kind: TKind::T2, ..t0 };
        assert!(off_cost_for_tset(&bad, 98).is_err());
    }

    #[test]
    fn off_positions_match_formula() {
        let v = VertexId::new;
        for l in 1..=20 {
            let kind = TKind::of_length(l, 20);
            let t = TSet {
                base: v(1),
                rank: 1,
                chain: (2..=l + 1).map(v).collect(),
                sibling: Some(Sibling { vertex: v(l + 2), anchor: l - 1 }),
                kind,
            };
            assert_eq!(t.off_positions().len(), off_cost_for_tset(&t, 20).unwrap(), "l = {l}");
        }
    }

    #[test]
    fn always_new_ratio_three() {
        let tr = tree_routine(AlwaysNew, AdversaryParams::default()).unwrap();
        let cert = verify_ratio_cases(&tr).unwrap();
        assert_eq!((cert.on_cost, cert.off_cost), (3, 1));
        assert_eq!(cert.ratio, Rational64::from(3));
    }

    #[test]
    fn never_new_hits_long_chain() {
        let tr = tree_routine(NeverNew, AdversaryParams::default()).unwrap();
        let cert = verify_ratio_cases(&tr).unwrap();
        assert_eq!(tr.termination, Termination::LongChain);
        assert_eq!(tr.tsets[0].kind, TKind::T3);
        assert_eq!(cert.on_ledger, 1 + 97);
        assert!(cert.ratio >= Rational64::new(97, 34));
    }

    #[test]
    fn every_builtin_algorithm_is_certified() {
        for kind in AlgorithmKind::ALL {
            for params in [small(), AdversaryParams::new(11, 5, 5).unwrap()] {
                let tr = run_against(kind, params).unwrap();
                let cert = verify_ratio_cases(&tr).unwrap();
                assert!(cert.opt_cost <= cert.off_cost);
            }
        }
    }

    #[test]
    fn greedy_and_a_against_defaults() {
        let g = verify_ratio_cases(&tree_routine(Greedy, AdversaryParams::default()).unwrap()).unwrap();
        assert!(g.ratio >= Rational64::new(27, 10));
        let a = verify_ratio_cases(&tree_routine(ParityAlgorithm::a(), AdversaryParams::default()).unwrap()).unwrap();
        assert!(a.ratio >= Rational64::new(29, 10));
    }

    /// Alternates a length-1 T1-set with a T2-set of length `t2_len`, so
    /// every base ends in the re-basing split.
    struct Alternating {
        t2_len: usize,
        want_t1: bool,
        sibling_at: Option<VertexId>,
        chain: usize,
    }

    impl Alternating {
        fn new(t2_len: usize) -> Self {
            Alternating { t2_len, want_t1: true, sibling_at: None, chain: 0 }
        }
    }

    impl OnlineAlgorithm for Alternating {
        fn name(&self) -> String {
            format!("alternating-{}", self.t2_len)
        }
        fn on_reveal(&mut self, tree: &crate::tree::TreeView, sel: &DominatingSet, v: VertexId) -> Vec<VertexId> {
            let Some(u) = tree.parent(v) else { return vec![v] };
            if self.sibling_at == Some(u) {
                self.sibling_at = None;
                return if sel.contains(u) { vec![] } else { vec![u] };
            }
            if self.chain == 0 {
                if self.want_t1 {
                    self.want_t1 = false;
                    self.sibling_at = Some(u);
                    return vec![v];
                }
                self.chain = 1;
                return vec![];
            }
            self.chain += 1;
            if self.chain == self.t2_len {
                self.chain = 0;
                self.want_t1 = true;
                self.sibling_at = Some(u);
                return vec![v];
            }
            if sel.contains(u) { vec![] } else { vec![u] }
        }
    }

    #[test]
    fn rebasing_split_keeps_ledger_consistent() {
        for t2_len in [2, 5] {
            let tr = tree_routine(Alternating::new(t2_len), small()).unwrap();
            assert_eq!(tr.termination, Termination::Rebased);
            assert_eq!(tr.bases.len(), small().max_t1 + 1);
            let cert = verify_ratio_cases(&tr).unwrap();
            assert_eq!(cert.on_cost, cert.on_ledger);
            assert_eq!(tr.flags.is_empty(), t2_len != 2);
        }
    }
}
