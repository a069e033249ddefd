use std::collections::HashMap;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use super::{five_halves, format_ratio, ser_ratio, HarnessError};
use crate::online::{verify_membership_with, RaMixture};
use crate::opt::{brute_force_min, min_dominating_set_tree};
use crate::tree::{OnlineTreeInput, TreeView};

/// Number of parent arrays on `n` vertices, `(n - 1)!`.
pub fn parents_count(n: usize) -> u64 {
    (1..n as u64).product()
}

/// The `k`-th parent array on `n` vertices in mixed-radix order.
pub fn enumerate_parents(n: usize, mut k: u64) -> OnlineTreeInput {
    let mut parents = vec![0];
    for i in 2..=n {
        let radix = (i - 1) as u64;
        parents.push(1 + (k % radix) as usize);
        k /= radix;
    }
    OnlineTreeInput::new(parents).expect("mixed radix digits stay below the index")
}

/// Canonical string of the unrooted tree, equal for isomorphic shapes.
pub fn canonical_shape(view: &TreeView) -> String {
    let n = view.len();
    let adj: Vec<Vec<usize>> = view.vertices().map(|v| view.neighbors(v).map(|w| w.index() - 1).collect()).collect();
    // peel leaves to find the one or two centres
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    fn encode(adj: &[Vec<usize>], v: usize, from: usize) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != from).map(|&w| encode(adj, w, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    layer.iter().map(|&c| encode(&adj, c, usize::MAX)).min().expect("a tree has a centre")
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub instances: u64,
    pub shapes: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub max_ratio: Rational64,
    /// First input in enumeration order reaching `max_ratio`.
    pub argmax: OnlineTreeInput,
    pub membership_failures: u64,
    pub oracle_failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub max_n: usize,
    pub rows: Vec<SweepRow>,
    pub total_instances: u64,
    /// Offending inputs, capped at a few per kind.
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_ratio(&self) -> Rational64 {
        self.rows.iter().map(|r| r.max_ratio).max().unwrap_or_default()
    }
}

#[derive(Default)]
struct Acc {
    instances: u64,
    best: Option<(Rational64, u64)>,
    membership_failures: u64,
    violations: Vec<String>,
    shapes: HashMap<String, u64>,
    over: Option<(Rational64, u64)>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        self.instances += other.instances;
        self.best = better(self.best, other.best);
        self.over = self.over.or(other.over);
        self.membership_failures += other.membership_failures;
        self.violations.extend(other.violations);
        self.violations.truncate(8);
        for (k, v) in other.shapes {
            let e = self.shapes.entry(k).or_insert(v);
            *e = (*e).min(v);
        }
        self
    }
}

/// Larger ratio wins; ties go to the earlier index.
fn better(a: Option<(Rational64, u64)>, b: Option<(Rational64, u64)>) -> Option<(Rational64, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if (y.0, std::cmp::Reverse(y.1)) > (x.0, std::cmp::Reverse(x.1)) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn visit(n: usize, k: u64, acc: &mut Acc) {
    let input = enumerate_parents(n, k);
    let view = input.view();
    let mix = RaMixture::run(&input);
    let report = verify_membership_with(&view, &mix);
    let costs_ok = view.vertices().all(|v| {
        crate::online::membership_case(&view, v).expected_cost() == mix.probability(v)
    });
    if !report.all_ok() || !costs_ok {
        acc.membership_failures += 1;
        if acc.violations.len() < 8 {
            acc.violations.push(format!("membership table fails on {input}"));
        }
    }
    let opt = min_dominating_set_tree(&view).expect("non-empty").size;
    let ratio = crate::ratio(mix.expected_cost(), opt);
    if ratio > five_halves() && acc.over.is_none() {
        acc.over = Some((ratio, k));
    }
    acc.instances += 1;
    acc.best = better(acc.best, Some((ratio, k)));
    acc.shapes.entry(canonical_shape(&view)).or_insert(k);
}

/// Every parent array with `2 <= n <= max_n`: membership table, per-vertex
/// costs, the 5/2 bound, and DP against brute force once per shape.
/// Domination of every prefix by A and B is enforced while running them.
pub fn exhaustive_small_sweep(max_n: usize) -> Result<SweepReport, HarnessError> {
    if max_n > 12 {
        return Err(HarnessError::SweepTooLarge(max_n));
    }
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for n in 2..=max_n {
        let acc = (0..parents_count(n))
            .into_par_iter()
            .fold(Acc::default, |mut acc, k| {
                visit(n, k, &mut acc);
                acc
            })
            .reduce(Acc::default, Acc::merge);
        if let Some((ratio, k)) = acc.over {
            return Err(HarnessError::BoundViolated {
                ratio: format_ratio(&ratio),
                input: enumerate_parents(n, k).to_json(),
            });
        }
        let mut reps: Vec<u64> = acc.shapes.values().copied().collect();
        reps.sort_unstable();
        let oracle_bad: Vec<u64> = reps
            .par_iter()
            .copied()
            .filter(|&k| {
                let view = enumerate_parents(n, k).view();
                let dp = min_dominating_set_tree(&view).expect("non-empty").size;
                brute_force_min(&view, 16).map(|b| b.size) != Ok(dp)
            })
            .collect();
        violations.extend(acc.violations);
        violations.extend(oracle_bad.iter().map(|&k| format!("DP and brute force disagree on {}", enumerate_parents(n, k))));
        let (max_ratio, arg) = acc.best.expect("at least one instance");
        rows.push(SweepRow {
            n,
            instances: acc.instances,
            shapes: reps.len(),
            max_ratio,
            argmax: enumerate_parents(n, arg),
            membership_failures: acc.membership_failures,
            oracle_failures: oracle_bad.len(),
        });
    }
    let total_instances = rows.iter().map(|r| r.instances).sum();
    Ok(SweepReport { max_n, rows, total_instances, violations })
}
