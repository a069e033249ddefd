use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::edges::{all_edges, good_triplets};
use super::AnalysisError;
use crate::opt::{is_optimal, opt_size};
use crate::tree::{f1_split, f2_split, f3_connect, Derived, DominatingSet, OnlineTreeInput, TreeView, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
}

impl Property {
    pub const ALL: [Property; 7] =
        [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5, Property::P6, Property::P7];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(k: usize) -> Option<Self> {
        Self::ALL.get(k.checked_sub(1)?).copied()
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property {0:?}, expected p1 to p7")]
pub struct ParsePropertyError(String);

impl FromStr for Property {
    type Err = ParsePropertyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix(['p', 'P'])
            .and_then(|k| k.parse().ok())
            .and_then(Property::from_number)
            .ok_or_else(|| ParsePropertyError(s.to_string()))
    }
}

/// One reason a property fails for a given optimal set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    NonFixedFreeEdge { v: VertexId, u: VertexId },
    HighDegree { v: VertexId, degree: usize },
    SelectedDegreeNotThree { v: VertexId, degree: usize },
    FreeEdgeSelectedParent { v: VertexId, u: VertexId },
    GoodTriplet { u1: VertexId, u2: VertexId, u3: VertexId },
    FreeEdgeDegreeTwo { v: VertexId, u: VertexId },
    DegreeNotOneOrThree { v: VertexId, degree: usize },
}

impl Witness {
    pub fn property(&self) -> Property {
        match self {
            Witness::NonFixedFreeEdge { .. } => Property::P1,
            Witness::HighDegree { .. } => Property::P2,
            Witness::SelectedDegreeNotThree { .. } => Property::P3,
            Witness::FreeEdgeSelectedParent { .. } => Property::P4,
            Witness::GoodTriplet { .. } => Property::P5,
            Witness::FreeEdgeDegreeTwo { .. } => Property::P6,
            Witness::DegreeNotOneOrThree { .. } => Property::P7,
        }
    }
}

/// Every violation of P1 to P7 under `optset`, grouped by property.
pub fn witnesses(view: &TreeView, optset: &DominatingSet) -> Vec<Witness> {
    let mut out = Vec::new();
    let edges = all_edges(view, optset);
    for e in edges.iter().filter(|e| e.free && !e.fixed) {
        out.push(Witness::NonFixedFreeEdge { v: e.v, u: e.u });
    }
    for v in view.vertices() {
        let degree = view.degree(v);
        if degree > 3 {
            out.push(Witness::HighDegree { v, degree });
        }
    }
    for v in optset.vertices() {
        let degree = view.degree(v);
        if degree != 3 {
            out.push(Witness::SelectedDegreeNotThree { v, degree });
        }
    }
    for e in edges.iter().filter(|e| e.free && optset.contains(e.v)) {
        out.push(Witness::FreeEdgeSelectedParent { v: e.v, u: e.u });
    }
    for [u1, u2, u3] in good_triplets(view, optset) {
        out.push(Witness::GoodTriplet { u1, u2, u3 });
    }
    for e in edges.iter().filter(|e| e.free && view.degree(e.v) == 2) {
        out.push(Witness::FreeEdgeDegreeTwo { v: e.v, u: e.u });
    }
    for v in view.vertices() {
        let degree = view.degree(v);
        if degree != 1 && degree != 3 {
            out.push(Witness::DegreeNotOneOrThree { v, degree });
        }
    }
    out
}

/// The quantity each normalization step lowers.
pub fn measure(view: &TreeView, optset: &DominatingSet, target: Property) -> usize {
    match target {
        Property::P2 => view.vertices().map(|v| view.degree(v).saturating_sub(3)).sum(),
        _ => witnesses(view, optset).iter().filter(|w| w.property() == target).count(),
    }
}

pub fn holds(view: &TreeView, optset: &DominatingSet, p: Property) -> bool {
    !witnesses(view, optset).iter().any(|w| w.property() == p)
}

/// Lowest-numbered property among P1 to P6 that fails, if any.
pub fn first_violated(view: &TreeView, optset: &DominatingSet) -> Option<Property> {
    witnesses(view, optset).iter().map(Witness::property).filter(|&p| p != Property::P7).min()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PropertyFlags {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub p4: bool,
    pub p5: bool,
    pub p6: bool,
    pub p7: bool,
}

impl PropertyFlags {
    fn from_fn(mut f: impl FnMut(Property) -> bool) -> Self {
        PropertyFlags {
            p1: f(Property::P1),
            p2: f(Property::P2),
            p3: f(Property::P3),
            p4: f(Property::P4),
            p5: f(Property::P5),
            p6: f(Property::P6),
            p7: f(Property::P7),
        }
    }

    pub fn get(&self, p: Property) -> bool {
        match p {
            Property::P1 => self.p1,
            Property::P2 => self.p2,
            Property::P3 => self.p3,
            Property::P4 => self.p4,
            Property::P5 => self.p5,
            Property::P6 => self.p6,
            Property::P7 => self.p7,
        }
    }

    pub fn all(&self) -> bool {
        Property::ALL.iter().all(|&p| self.get(p))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SetProperties {
    pub optset: DominatingSet,
    pub flags: PropertyFlags,
    pub witnesses: Vec<Witness>,
}

pub fn check_set(view: &TreeView, optset: &DominatingSet) -> SetProperties {
    let witnesses = witnesses(view, optset);
    let flags = PropertyFlags::from_fn(|p| !witnesses.iter().any(|w| w.property() == p));
    SetProperties { optset: optset.clone(), flags, witnesses }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub n: usize,
    pub per_set: Vec<SetProperties>,
    /// Some given set satisfies the property.
    pub exists: PropertyFlags,
    /// Every given set satisfies the property.
    pub forall: PropertyFlags,
    /// Some given set satisfies P1 to P7 together.
    pub exists_all: bool,
    /// `exists_all` implies at least four vertices.
    pub lemma11: bool,
}

pub fn check_properties(
    input: &OnlineTreeInput,
    optsets: &[DominatingSet],
) -> Result<PropertyReport, AnalysisError> {
    if optsets.is_empty() {
        return Err(AnalysisError::NoOptimalSets);
    }
    let view = input.view();
    let per_set: Vec<SetProperties> = optsets.iter().map(|d| check_set(&view, d)).collect();
    let exists = PropertyFlags::from_fn(|p| per_set.iter().any(|s| s.flags.get(p)));
    let forall = PropertyFlags::from_fn(|p| per_set.iter().all(|s| s.flags.get(p)));
    let exists_all = per_set.iter().any(|s| s.flags.all());
    Ok(PropertyReport { n: input.len(), per_set, exists, forall, exists_all, lemma11: !exists_all || input.len() >= 4 })
}

/// Outcome of an exhaustive lemma check on one input.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaCheck {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LemmaCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `set` restricted to the vertices of a derived input, renumbered.
pub fn restrict(derived: &Derived, set: &DominatingSet) -> DominatingSet {
    DominatingSet::from_vertices(
        derived.input.len(),
        derived.input.vertices().filter(|&w| set.contains(derived.old_id(w))),
    )
}

/// Splitting at a free edge splits every given optimal set into optimal sets
/// of the two parts.
pub fn check_lemma4(input: &OnlineTreeInput, optsets: &[DominatingSet]) -> Result<LemmaCheck, AnalysisError> {
    let view = input.view();
    let total = opt_size(&view);
    let mut out = LemmaCheck::default();
    for d in optsets {
        for e in all_edges(&view, d).into_iter().filter(|e| e.free) {
            out.checked += 1;
            let lower = f1_split(input, e.u)?;
            let upper = f2_split(input, e.u)?;
            let (d1, d2) = (restrict(&lower, d), restrict(&upper, d));
            let (v1, v2) = (lower.input.view(), upper.input.view());
            if !is_optimal(&v1, &d1) || !is_optimal(&v2, &d2) {
                out.failures.push(format!("{d} split at ({}, {}) is not optimal on both sides", e.v, e.u));
            } else if opt_size(&v1) + opt_size(&v2) != total {
                out.failures.push(format!("optima at ({}, {}) do not add up", e.v, e.u));
            }
        }
    }
    Ok(out)
}

/// A pendant attached to a selected vertex keeps every given optimal set
/// optimal.
pub fn check_lemma5(input: &OnlineTreeInput, optsets: &[DominatingSet]) -> Result<LemmaCheck, AnalysisError> {
    let total = opt_size(&input.view());
    let mut out = LemmaCheck::default();
    for d in optsets {
        for v in d.vertices() {
            out.checked += 1;
            let grown = f3_connect(input, v, &OnlineTreeInput::single())?;
            let gv = grown.view();
            let mut same = d.clone();
            same.grow(grown.len());
            if !is_optimal(&gv, &same) || opt_size(&gv) != total {
                out.failures.push(format!("{d} loses optimality with a pendant at {v}"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::enumerate_optimal_sets;
    use proptest::prelude::*;

    fn input(parents: &[usize]) -> OnlineTreeInput {
        OnlineTreeInput::new(parents.to_vec()).unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> DominatingSet {
        DominatingSet::from_vertices(n, xs.iter().map(|&i| VertexId::new(i)))
    }

    #[test]
    fn parses_names() {
        assert_eq!("p3".parse::<Property>().unwrap(), Property::P3);
        assert_eq!("P7".parse::<Property>().unwrap(), Property::P7);
        assert!("p8".parse::<Property>().is_err());
        assert!("x1".parse::<Property>().is_err());
        assert_eq!(Property::P4.to_string(), "P4");
    }

    #[test]
    fn star_properties() {
        let star = input(&[0, 1, 2, 2]);
        let report = check_properties(&star, &[set(4, &[2])]).unwrap();
        let flags = report.per_set[0].flags;
        assert!(flags.p7 && flags.p3 && flags.p2);
        assert!(report.exists_all);
        assert!(report.lemma11);
    }

    #[test]
    fn chain_of_four_fails_p7() {
        let chain = OnlineTreeInput::path(4);
        let sets = enumerate_optimal_sets(&chain.view(), 14).unwrap();
        let report = check_properties(&chain, &sets).unwrap();
        assert!(!report.exists.p7);
        let degs: Vec<usize> = report.per_set[0]
            .witnesses
            .iter()
            .filter_map(|w| match w {
                Witness::DegreeNotOneOrThree { v, .. } => Some(v.index()),
                _ => None,
            })
            .collect();
        assert_eq!(degs, vec![2, 3]);
    }

    #[test]
    fn empty_sets_rejected() {
        assert_eq!(check_properties(&OnlineTreeInput::path(3), &[]).unwrap_err(), AnalysisError::NoOptimalSets);
    }

    #[test]
    fn measures() {
        let broom = input(&[0, 1, 1, 1, 1, 2]);
        let d = set(6, &[1, 2]);
        assert_eq!(measure(&broom.view(), &d, Property::P2), 1);
        // v1 has degree 4 and v2 degree 2
        assert_eq!(measure(&broom.view(), &d, Property::P3), 2);
    }

    #[test]
    fn small_trees_never_satisfy_everything() {
        for parents in [vec![0], vec![0, 1], vec![0, 1, 1], vec![0, 1, 2]] {
            let t = input(&parents);
            let sets = enumerate_optimal_sets(&t.view(), 14).unwrap();
            let report = check_properties(&t, &sets).unwrap();
            assert!(!report.exists_all, "{parents:?}");
        }
    }

    #[test]
    fn lemma_checks_on_chain() {
        let chain = OnlineTreeInput::path(7);
        let sets = enumerate_optimal_sets(&chain.view(), 14).unwrap();
        let four = check_lemma4(&chain, &sets).unwrap();
        assert!(four.ok() && four.checked > 0);
        let five = check_lemma5(&chain, &sets).unwrap();
        assert!(five.ok() && five.checked == sets.len() * 3);
    }

    #[test]
    fn first_five_force_p6_and_all_seven_force_the_star() {
        use crate::harness::{enumerate_parents, parents_count};
        for n in 2..=9 {
            for k in 0..parents_count(n) {
                let input = enumerate_parents(n, k);
                let view = input.view();
                for d in enumerate_optimal_sets(&view, 14).unwrap() {
                    let first_five = Property::ALL[..5].iter().all(|&p| holds(&view, &d, p));
                    assert!(!first_five || holds(&view, &d, Property::P6), "{input} {d}");
                    // every vertex then sees exactly one selected vertex, and the
                    // clusters around them cannot be joined into a tree
                    let all = Property::ALL.iter().all(|&p| holds(&view, &d, p));
                    assert!(!all || input.parents() == [0, 1, 1, 1] || input.parents() == [0, 1, 2, 2], "{input} {d}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn p7_implies_p2_and_p6_degree_clause(parents in crate::testutil::arb_parents(11)) {
            let t = OnlineTreeInput::new(parents).unwrap();
            let sets = enumerate_optimal_sets(&t.view(), 14).unwrap();
            for s in check_properties(&t, &sets).unwrap().per_set {
                if s.flags.p7 {
                    prop_assert!(s.flags.p2 && s.flags.p6);
                }
            }
        }

        #[test]
        fn lemma4_and_lemma5_hold(parents in crate::testutil::arb_parents(9)) {
            let t = OnlineTreeInput::new(parents).unwrap();
            let sets = enumerate_optimal_sets(&t.view(), 14).unwrap();
            prop_assert!(check_lemma4(&t, &sets).unwrap().ok());
            prop_assert!(check_lemma5(&t, &sets).unwrap().ok());
        }
    }
}
