use num_rational::Rational64;
use serde::Serialize;

use super::edges::{all_edges, good_triplets};
use super::properties::{check_set, first_violated, holds, measure, Property, SetProperties};
use super::{ra_ratio, AnalysisError};
use crate::harness::ser_ratio;
use crate::opt::{
    enumerate_optimal_sets_limited, is_optimal, min_dominating_set_tree, DEFAULT_ENUM_CAP, DEFAULT_ENUM_LIMIT,
};
use crate::tree::{f1_split, f2_split, f3_connect, DominatingSet, OnlineTreeInput, TreeView, VertexId};

/// An input assembled from parts of a source input. `origin[i]` is the source
/// vertex that became `v_{i+1}`, or `None` for a fresh pendant.
#[derive(Clone, Debug)]
struct Piece {
    input: OnlineTreeInput,
    origin: Vec<Option<VertexId>>,
}

impl Piece {
    fn whole(input: &OnlineTreeInput) -> Self {
        Piece { input: input.clone(), origin: input.vertices().map(Some).collect() }
    }

    fn find(&self, old: VertexId) -> VertexId {
        let slot = self.origin.iter().position(|&o| o == Some(old)).expect("source vertex kept");
        VertexId::new(slot + 1)
    }

    fn lower(&self, old: VertexId) -> Result<Piece, AnalysisError> {
        let d = f1_split(&self.input, self.find(old))?;
        let origin = d.origin.iter().map(|o| self.origin[o.index() - 1]).collect();
        Ok(Piece { input: d.input, origin })
    }

    fn upper(&self, old: VertexId) -> Result<Piece, AnalysisError> {
        let d = f2_split(&self.input, self.find(old))?;
        let origin = d.origin.iter().map(|o| self.origin[o.index() - 1]).collect();
        Ok(Piece { input: d.input, origin })
    }

    fn connect(&self, at: VertexId, other: &Piece) -> Result<Piece, AnalysisError> {
        let input = f3_connect(&self.input, at, &other.input)?;
        let origin = self.origin.iter().chain(&other.origin).copied().collect();
        Ok(Piece { input, origin })
    }

    fn pendant(&self, at: VertexId) -> Result<Piece, AnalysisError> {
        self.connect(at, &Piece { input: OnlineTreeInput::single(), origin: vec![None] })
    }

    fn transport(&self, set: &DominatingSet) -> DominatingSet {
        let picked = self
            .origin
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_some_and(|o| set.contains(o)))
            .map(|(i, _)| VertexId::new(i + 1));
        DominatingSet::from_vertices(self.input.len(), picked)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepOutput {
    pub input: OnlineTreeInput,
    /// The source optimal set carried over to this input.
    pub transported: DominatingSet,
    pub transported_optimal: bool,
    /// An optimal set of this input: `transported` when it is optimal.
    pub optset: DominatingSet,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational64,
    /// The step's counter under `transported`.
    pub measure: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub target: Property,
    pub case: &'static str,
    pub focus: Vec<VertexId>,
    pub optset: DominatingSet,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational64,
    pub measure: usize,
    pub outputs: Vec<StepOutput>,
}

impl StepReport {
    pub fn max_ratio(&self) -> Rational64 {
        self.outputs.iter().map(|o| o.ratio).max().expect("a step has outputs")
    }

    /// Some output has a ratio at least the input's.
    pub fn monotone(&self) -> bool {
        self.max_ratio() >= self.ratio
    }

    pub fn measure_decreased(&self) -> bool {
        self.outputs.iter().all(|o| o.measure < self.measure)
    }

    /// First output with the largest ratio.
    pub fn best(&self) -> &StepOutput {
        let top = self.max_ratio();
        self.outputs.iter().find(|o| o.ratio == top).expect("max exists")
    }
}

fn preconditions(target: Property) -> &'static [Property] {
    use Property::*;
    match target {
        P1 | P7 => &[],
        P2 => &[P1],
        P3 => &[P1, P2],
        P4 => &[P1, P2, P3],
        P5 => &[P1, P2, P3, P4],
        P6 => &[P1, P2, P3, P4, P5],
    }
}

fn candidate_sets(view: &TreeView) -> Vec<DominatingSet> {
    if view.len() <= DEFAULT_ENUM_CAP {
        if let Ok(all) = enumerate_optimal_sets_limited(view, DEFAULT_ENUM_CAP, DEFAULT_ENUM_LIMIT) {
            return all;
        }
    }
    vec![min_dominating_set_tree(view).expect("non-empty").witness]
}

/// One transformation step towards `target`. Without an explicit set, the
/// optimal sets are searched for one that meets the preconditions.
pub fn normalize_step(
    input: &OnlineTreeInput,
    target: Property,
    optset: Option<&DominatingSet>,
) -> Result<StepReport, AnalysisError> {
    if target == Property::P7 {
        return Err(AnalysisError::PreconditionUnmet {
            target,
            reason: "P7 has no transformation of its own".into(),
        });
    }
    let view = input.view();
    let pre = preconditions(target);
    let meets = |d: &DominatingSet| pre.iter().all(|&p| holds(&view, d, p));
    let chosen = match optset {
        Some(d) => {
            if !is_optimal(&view, d) {
                return Err(AnalysisError::PreconditionUnmet { target, reason: format!("{d} is not optimal") });
            }
            if holds(&view, d, target) {
                return Err(AnalysisError::AlreadySatisfied(target));
            }
            if let Some(&p) = pre.iter().find(|&&p| !holds(&view, d, p)) {
                return Err(AnalysisError::PreconditionUnmet { target, reason: format!("{p} fails") });
            }
            d.clone()
        }
        None => {
            let sets = candidate_sets(&view);
            if sets.iter().any(|d| meets(d) && holds(&view, d, target)) {
                return Err(AnalysisError::AlreadySatisfied(target));
            }
            match sets.into_iter().find(|d| meets(d)) {
                Some(d) => d,
                None => {
                    return Err(AnalysisError::PreconditionUnmet {
                        target,
                        reason: "no optimal set meets the preconditions".into(),
                    })
                }
            }
        }
    };

    apply_step(input, target, &chosen)
}

/// The construction of one step without any precondition checks beyond
/// `target` failing under `optset`. Lets callers probe the constructions on
/// inputs outside the lemmas' hypotheses.
pub fn apply_step(
    input: &OnlineTreeInput,
    target: Property,
    optset: &DominatingSet,
) -> Result<StepReport, AnalysisError> {
    let view = input.view();
    if target == Property::P7 || holds(&view, optset, target) {
        return Err(AnalysisError::AlreadySatisfied(target));
    }
    let chosen = optset.clone();
    let (case, focus, pieces) = match target {
        Property::P1 => step_p1(input, &view, &chosen)?,
        Property::P2 => step_p2(input, &view, &chosen)?,
        Property::P3 => step_p3(input, &view, &chosen)?,
        Property::P4 => step_p4(input, &view, &chosen)?,
        Property::P5 => step_p5(input, &view, &chosen)?,
        Property::P6 => step_p6(input, &view, &chosen)?,
        Property::P7 => unreachable!("rejected above"),
    };
    let outputs = pieces
        .into_iter()
        .map(|piece| {
            let pv = piece.input.view();
            let transported = piece.transport(&chosen);
            let transported_optimal = is_optimal(&pv, &transported);
            let optset = if transported_optimal {
                transported.clone()
            } else {
                min_dominating_set_tree(&pv).expect("non-empty").witness
            };
            StepOutput {
                ratio: ra_ratio(&piece.input),
                measure: measure(&pv, &transported, target),
                input: piece.input,
                transported,
                transported_optimal,
                optset,
            }
        })
        .collect();
    Ok(StepReport {
        target,
        case,
        focus,
        ratio: ra_ratio(input),
        measure: measure(&view, &chosen, target),
        optset: chosen,
        outputs,
    })
}

type Step = (&'static str, Vec<VertexId>, Vec<Piece>);

fn unmet(target: Property, reason: &str) -> AnalysisError {
    AnalysisError::PreconditionUnmet { target, reason: reason.into() }
}

fn step_p1(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let e = all_edges(view, d).into_iter().find(|e| e.free && !e.fixed).expect("P1 fails");
    let whole = Piece::whole(input);
    Ok(("split", vec![e.v, e.u], vec![whole.lower(e.u)?, whole.upper(e.u)?]))
}

fn step_p2(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let v = view.vertices().rev().find(|&w| view.degree(w) >= 4).expect("P2 fails");
    let u = *view.children(v).last().expect("degree four has children");
    let u_from_inside = d.contains(u) || view.children(u).iter().any(|&c| d.contains(c));
    let v_from_outside = view.parent(v).is_some_and(|p| d.contains(p))
        || view.children(v).iter().any(|&c| c != u && d.contains(c));
    if d.contains(u) && !d.contains(v) && !v_from_outside {
        return Err(unmet(Property::P2, "only u dominates v, so P1 fails"));
    }
    if !(d.contains(v) && !u_from_inside) {
        return Err(unmet(Property::P2, "(v, u) is free and not fixed, so P1 fails"));
    }
    let whole = Piece::whole(input);
    let lower = whole.lower(u)?;
    let upper = whole.upper(u)?;
    let inside_u = view.descendants(u);
    let others: Vec<VertexId> =
        view.descendants(v).into_iter().filter(|&w| w != u && !inside_u.contains(&w)).collect();
    if let Some(&low) = others.iter().find(|&&w| d.contains(w) && view.degree(w) <= 2) {
        let graft = lower.connect(lower.find(low), &upper)?;
        return Ok(("2-2", vec![v, u, low], vec![graft]));
    }
    let spot = others.iter().copied().find_map(|w| {
        let kids = view.children(w);
        let last = *kids.last()?;
        (d.contains(w) && view.degree(w) == 3 && kids.len() == 2 && view.degree(last) == 1).then_some((w, last))
    });
    let Some((v2, u2)) = spot else {
        return Err(unmet(Property::P2, "no selected degree-3 vertex with a late leaf below v"));
    };
    let trimmed = lower.lower(u2)?;
    let graft = trimmed.connect(trimmed.find(v2), &upper)?;
    Ok(("2-1", vec![v, u, v2, u2], vec![graft]))
}

fn step_p3(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let v = d
        .vertices()
        .find(|&w| view.degree(w) <= 2)
        .ok_or_else(|| unmet(Property::P3, "the only selected vertices off degree three are above it"))?;
    let mut piece = Piece::whole(input);
    for _ in view.degree(v)..3 {
        piece = piece.pendant(v)?;
    }
    Ok(("pendant", vec![v], vec![piece]))
}

fn step_p4(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let e = all_edges(view, d).into_iter().find(|e| e.free && d.contains(e.v)).expect("P4 fails");
    let whole = Piece::whole(input);
    let lower = whole.lower(e.u)?;
    let lower = lower.pendant(lower.find(e.v))?;
    let upper = whole.upper(e.u)?;
    let upper = if d.contains(e.u) { upper.pendant(VertexId::ROOT)? } else { upper };
    Ok(("split-pad", vec![e.v, e.u], vec![lower, upper]))
}

fn step_p5(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let [u1, u2, u3] = good_triplets(view, d)[0];
    if u2 == VertexId::ROOT {
        return Err(unmet(Property::P5, "the middle vertex is v1, so P1 fails"));
    }
    if u2 > u1 {
        return Err(unmet(Property::P5, "the middle vertex arrives after an end, so P4 fails"));
    }
    let whole = Piece::whole(input);
    let middle = whole.upper(u2)?;
    Ok(("three-way", vec![u1, u2, u3], vec![whole.lower(u2)?, middle.lower(u3)?, middle.lower(u1)?]))
}

fn step_p6(input: &OnlineTreeInput, view: &TreeView, d: &DominatingSet) -> Result<Step, AnalysisError> {
    let e = all_edges(view, d)
        .into_iter()
        .filter(|e| e.free && view.degree(e.v) == 2)
        .max_by_key(|e| (e.v, std::cmp::Reverse(e.u)))
        .expect("P6 fails");
    let whole = Piece::whole(input);
    let copy = whole.upper(e.u)?;
    Ok(("drop-and-mirror", vec![e.v, e.u], vec![whole.lower(e.u)?, whole.connect(e.v, &copy)?]))
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizeOutcome {
    #[serde(serialize_with = "ser_ratio")]
    pub initial_ratio: Rational64,
    pub steps: Vec<StepReport>,
    pub input: OnlineTreeInput,
    pub optset: DominatingSet,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational64,
    pub properties: SetProperties,
    /// P1 to P7 all hold at the end.
    pub complete: bool,
    /// Why the driver stopped early, if a step had no construction.
    pub stalled: Option<String>,
}

fn rank(view: &TreeView, d: &DominatingSet) -> usize {
    first_violated(view, d).map_or(7, Property::number)
}

/// Repeatedly fixes the lowest-numbered failing property, keeping the
/// output with the largest ratio after each step. Optimal sets are
/// reselected between steps when another set fails later in the order.
pub fn normalize(
    input: &OnlineTreeInput,
    optset: Option<&DominatingSet>,
    max_steps: usize,
) -> Result<NormalizeOutcome, AnalysisError> {
    let initial_ratio = ra_ratio(input);
    let mut current = input.clone();
    let mut set = match optset {
        Some(d) => d.clone(),
        None => min_dominating_set_tree(&input.view())?.witness,
    };
    let mut steps = Vec::new();
    let mut stalled = None;
    loop {
        let view = current.view();
        let mut best = rank(&view, &set);
        if best < 7 {
            for d in candidate_sets(&view) {
                let r = rank(&view, &d);
                if r > best {
                    best = r;
                    set = d;
                }
            }
        }
        if best == 7 || steps.len() == max_steps {
            break;
        }
        let target = Property::from_number(best).expect("1..=6");
        let report = match normalize_step(&current, target, Some(&set)) {
            Ok(r) => r,
            Err(AnalysisError::PreconditionUnmet { reason, .. }) => {
                stalled = Some(format!("{target}: {reason}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let next = report.best();
        current = next.input.clone();
        set = next.optset.clone();
        steps.push(report);
    }
    let view = current.view();
    let properties = check_set(&view, &set);
    Ok(NormalizeOutcome {
        initial_ratio,
        steps,
        ratio: ra_ratio(&current),
        complete: properties.flags.all(),
        stalled,
        properties,
        optset: set,
        input: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::{enumerate_optimal_sets, opt_size};
    use proptest::prelude::*;

    fn input(parents: &[usize]) -> OnlineTreeInput {
        OnlineTreeInput::new(parents.to_vec()).unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> DominatingSet {
        DominatingSet::from_vertices(n, xs.iter().map(|&i| VertexId::new(i)))
    }

    #[test]
    fn p3_pads_a_two_path() {
        let p2 = OnlineTreeInput::path(2);
        let report = normalize_step(&p2, Property::P3, Some(&set(2, &[1]))).unwrap();
        assert_eq!(report.outputs.len(), 1);
        let out = &report.outputs[0];
        assert_eq!(out.input.parents(), &[0, 1, 1, 1]);
        assert!(out.transported_optimal);
        assert_eq!(opt_size(&out.input.view()), 1);
        assert!(report.monotone() && report.measure_decreased());
    }

    #[test]
    fn p1_splits_a_seven_chain() {
        let chain = OnlineTreeInput::path(7);
        let d = set(7, &[2, 5, 7]);
        let report = normalize_step(&chain, Property::P1, Some(&d)).unwrap();
        assert_eq!(report.focus, vec![VertexId::new(3), VertexId::new(4)]);
        let sizes: Vec<usize> = report.outputs.iter().map(|o| opt_size(&o.input.view())).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 3);
        for o in &report.outputs {
            assert!(o.transported_optimal);
            assert!(!enumerate_optimal_sets(&o.input.view(), 14).unwrap().is_empty());
        }
        assert!(report.monotone());
    }

    #[test]
    fn already_satisfied() {
        let star = input(&[0, 1, 2, 2]);
        for p in [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5, Property::P6] {
            assert_eq!(normalize_step(&star, p, None).unwrap_err(), AnalysisError::AlreadySatisfied(p));
        }
        assert!(matches!(
            normalize_step(&star, Property::P7, None),
            Err(AnalysisError::PreconditionUnmet { .. })
        ));
    }

    #[test]
    fn rejects_non_optimal_sets() {
        let chain = OnlineTreeInput::path(3);
        let err = normalize_step(&chain, Property::P1, Some(&set(3, &[1, 3]))).unwrap_err();
        assert!(matches!(err, AnalysisError::PreconditionUnmet { .. }));
    }

    #[test]
    fn p2_grafts_onto_a_selected_vertex() {
        // v1 has four children; v2 selected with leaves v6, v7
        let t = input(&[0, 1, 1, 1, 1, 2, 2, 3, 3, 4, 4, 5]);
        let d = set(12, &[1, 2, 3, 4, 5]);
        if is_optimal(&t.view(), &d) {
            let r = normalize_step(&t, Property::P2, Some(&d));
            if let Ok(r) = r {
                assert!(r.monotone());
                assert!(r.measure_decreased());
            }
        }
    }

    #[test]
    fn four_leaf_star_has_no_graft_point() {
        let star = input(&[0, 1, 1, 1, 1]);
        let err = normalize_step(&star, Property::P2, None).unwrap_err();
        assert!(matches!(err, AnalysisError::PreconditionUnmet { target: Property::P2, .. }));
        let out = normalize(&star, None, 50).unwrap();
        assert!(!out.complete && out.stalled.is_some());
    }

    #[test]
    fn driver_reaches_all_properties() {
        let t = input(&[0, 1, 2, 3, 4, 5, 6]);
        let out = normalize(&t, None, 200).unwrap();
        assert!(out.complete, "{:?}", out.properties.witnesses);
        assert!(out.ratio >= out.initial_ratio);
        assert!(out.input.len() >= 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn steps_never_lower_the_ratio(parents in crate::testutil::arb_parents(10)) {
            let t = OnlineTreeInput::new(parents).unwrap();
            for target in [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5, Property::P6] {
                for d in enumerate_optimal_sets(&t.view(), 14).unwrap() {
                    if let Ok(r) = normalize_step(&t, target, Some(&d)) {
                        prop_assert!(r.monotone(), "{} {} {:?}", t, target, d);
                    }
                }
            }
        }

        #[test]
        fn driver_is_monotone(parents in crate::testutil::arb_parents(9)) {
            let t = OnlineTreeInput::new(parents).unwrap();
            let out = normalize(&t, None, 300).unwrap();
            prop_assert!(out.ratio >= out.initial_ratio);
            let mut last = out.initial_ratio;
            for s in &out.steps {
                prop_assert!(s.ratio >= last);
                last = s.best().ratio;
            }
        }
    }
}
