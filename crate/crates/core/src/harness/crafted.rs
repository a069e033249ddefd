//! Small inputs paired with an optimal set on which a given normalizing step
//! applies. Random inputs almost never satisfy the earlier properties, so
//! the later steps draw from templates: selected hubs of degree three with
//! leaves, connectors of degree two, and unselected middles carrying two
//! selected hubs.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::random_reveal;
use crate::analysis::properties::holds;
use crate::analysis::{apply_step, normalize_step, Property, StepReport};
use crate::opt::min_dominating_set_tree;
use crate::tree::{DominatingSet, OnlineTreeInput, VertexId};

#[derive(Debug, Clone, Serialize)]
pub struct CraftedInstance {
    pub input: OnlineTreeInput,
    pub optset: DominatingSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct CraftedBatch {
    pub target: Property,
    pub attempts: usize,
    pub instances: Vec<CraftedInstance>,
}

/// Which checks a candidate has to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Optimal set, target fails, every earlier property holds.
    Preconditions,
    /// As `Preconditions`, except that the named property may fail.
    Without(Property),
    /// Optimal set and target fails; earlier properties are not checked.
    TargetOnly,
}

/// Crafted inputs stay at or below this size.
pub const MAX_CRAFTED_N: usize = 40;

#[derive(Default)]
struct Template {
    adj: Vec<Vec<usize>>,
    selected: Vec<bool>,
}

#[derive(Clone, Copy)]
struct Mix {
    /// Chance that a hub's free slot gets a connector rather than a leaf.
    connector: f64,
    /// Chance that a hub's free slot gets another hub.
    hub: f64,
    /// Chance that a hub's free slot gets an unselected vertex carrying two middles.
    fork: f64,
    depth: usize,
}

impl Template {
    fn node(&mut self, parent: Option<usize>, selected: bool) -> usize {
        let id = self.adj.len();
        self.adj.push(Vec::new());
        self.selected.push(selected);
        if let Some(p) = parent {
            self.adj[p].push(id);
            self.adj[id].push(p);
        }
        id
    }

    fn hub(&mut self, parent: Option<usize>, degree: usize, mix: Mix, rng: &mut ChaCha8Rng) -> usize {
        let h = self.node(parent, true);
        let slots = degree - usize::from(parent.is_some());
        for _ in 0..slots {
            let roll: f64 = rng.gen();
            if mix.depth == 0 {
                self.node(Some(h), false);
            } else if roll < mix.connector {
                self.connector(h, mix, rng);
            } else if roll < mix.connector + mix.hub {
                self.hub(Some(h), 3, Mix { depth: mix.depth - 1, ..mix }, rng);
            } else if roll < mix.connector + mix.hub + mix.fork {
                self.fork(h, mix, rng);
            } else {
                self.node(Some(h), false);
            }
        }
        h
    }

    fn middle(&mut self, parent: usize, mix: Mix, rng: &mut ChaCha8Rng) {
        let m = self.node(Some(parent), false);
        let inner = Mix { depth: mix.depth - 1, ..mix };
        self.hub(Some(m), 3, inner, rng);
        self.hub(Some(m), 3, inner, rng);
    }

    fn connector(&mut self, parent: usize, mix: Mix, rng: &mut ChaCha8Rng) {
        let c = self.node(Some(parent), false);
        self.middle(c, mix, rng);
    }

    fn fork(&mut self, parent: usize, mix: Mix, rng: &mut ChaCha8Rng) {
        let f = self.node(Some(parent), false);
        self.middle(f, mix, rng);
        self.middle(f, mix, rng);
    }

    /// Starts at the template root half of the time, elsewhere otherwise.
    fn reveal(&self, rng: &mut ChaCha8Rng) -> CraftedInstance {
        let start = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..self.adj.len()) };
        let (input, id) = random_reveal(&self.adj, start, rng);
        let optset = DominatingSet::from_vertices(
            input.len(),
            (0..self.adj.len()).filter(|&v| self.selected[v]).map(|v| VertexId::new(id[v])),
        );
        CraftedInstance { input, optset }
    }
}

fn uniform_tree(rng: &mut ChaCha8Rng, max_n: usize) -> CraftedInstance {
    let n = rng.gen_range(4..=max_n);
    let parents: Vec<usize> = (0..n).map(|i| if i == 0 { 0 } else { rng.gen_range(1..=i) }).collect();
    let input = OnlineTreeInput::new(parents).expect("parents precede children");
    let optset = min_dominating_set_tree(&input.view()).expect("non-empty").witness;
    CraftedInstance { input, optset }
}

fn candidate(target: Property, rng: &mut ChaCha8Rng) -> CraftedInstance {
    let mut t = Template::default();
    let plain = Mix { connector: 0.3, hub: 0.0, fork: 0.0, depth: 2 };
    match target {
        Property::P1 | Property::P7 => return uniform_tree(rng, 12),
        Property::P2 => {
            let degree = rng.gen_range(4..=5);
            t.hub(None, degree, Mix { connector: 0.45, ..plain }, rng);
        }
        Property::P3 => {
            t.hub(None, rng.gen_range(1..=2), Mix { connector: 0.0, fork: 0.6, ..plain }, rng);
        }
        Property::P4 => {
            t.hub(None, 3, Mix { connector: 0.2, hub: 0.4, ..plain }, rng);
        }
        Property::P5 | Property::P6 => {
            let h = t.hub(None, 2, Mix { connector: 0.2, ..plain }, rng);
            t.connector(h, plain, rng);
        }
    }
    t.reveal(rng)
}

fn passes(c: &CraftedInstance, target: Property, gate: Gate) -> Option<StepReport> {
    match gate {
        Gate::Preconditions => normalize_step(&c.input, target, Some(&c.optset)).ok(),
        Gate::Without(skip) => {
            let view = c.input.view();
            let earlier = Property::ALL.into_iter().filter(|&p| p < target && p != skip);
            if !crate::opt::is_optimal(&view, &c.optset) || !earlier.into_iter().all(|p| holds(&view, &c.optset, p)) {
                return None;
            }
            apply_step(&c.input, target, &c.optset).ok()
        }
        Gate::TargetOnly => {
            if !crate::opt::is_optimal(&c.input.view(), &c.optset) {
                return None;
            }
            apply_step(&c.input, target, &c.optset).ok()
        }
    }
}

/// Up to `count` distinct inputs passing `gate` for `target`, giving up after
/// `max_attempts` candidates.
pub fn crafted_instances(
    target: Property,
    gate: Gate,
    count: usize,
    seed: u64,
    max_attempts: usize,
) -> CraftedBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (target.number() as u64) << 32);
    let mut seen = HashSet::new();
    let mut instances = Vec::new();
    let mut attempts = 0;
    while instances.len() < count && attempts < max_attempts {
        attempts += 1;
        let c = candidate(target, &mut rng);
        if c.input.len() > MAX_CRAFTED_N || seen.contains(c.input.parents()) || passes(&c, target, gate).is_none() {
            continue;
        }
        seen.insert(c.input.parents().to_vec());
        instances.push(c);
    }
    CraftedBatch { target, attempts, instances }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::is_optimal;

    #[test]
    fn templates_give_optimal_sets_meeting_preconditions() {
        for target in [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5] {
            let batch = crafted_instances(target, Gate::Preconditions, 10, 3, 20_000);
            assert_eq!(batch.instances.len(), 10, "{target} after {} attempts", batch.attempts);
            for c in &batch.instances {
                assert!(is_optimal(&c.input.view(), &c.optset));
                assert!(normalize_step(&c.input, target, Some(&c.optset)).is_ok());
            }
        }
    }

    #[test]
    fn no_candidate_meets_the_p6_preconditions() {
        let batch = crafted_instances(Property::P6, Gate::Preconditions, 1, 3, 5_000);
        assert!(batch.instances.is_empty());
        let relaxed = crafted_instances(Property::P6, Gate::Without(Property::P5), 5, 3, 5_000);
        assert_eq!(relaxed.instances.len(), 5);
        for c in &relaxed.instances {
            assert!(!holds(&c.input.view(), &c.optset, Property::P5));
        }
    }

    #[test]
    fn deterministic() {
        let a = crafted_instances(Property::P5, Gate::Preconditions, 5, 9, 10_000);
        let b = crafted_instances(Property::P5, Gate::Preconditions, 5, 9, 10_000);
        let pa: Vec<_> = a.instances.iter().map(|c| c.input.clone()).collect();
        let pb: Vec<_> = b.instances.iter().map(|c| c.input.clone()).collect();
        assert_eq!(pa, pb);
    }
}
