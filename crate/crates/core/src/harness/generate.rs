use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::tree::OnlineTreeInput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    UniformAttachment,
    Path,
    Star,
    Degree13Tree,
    Caterpillar,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::UniformAttachment,
        GeneratorKind::Path,
        GeneratorKind::Star,
        GeneratorKind::Degree13Tree,
        GeneratorKind::Caterpillar,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GeneratorKind::UniformAttachment => "uniform-attachment",
            GeneratorKind::Path => "path",
            GeneratorKind::Star => "star",
            GeneratorKind::Degree13Tree => "degree13-tree",
            GeneratorKind::Caterpillar => "caterpillar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RevealOrder {
    Bfs,
    Dfs,
    RandomValid,
}

impl RevealOrder {
    pub fn label(self) -> &'static str {
        match self {
            RevealOrder::Bfs => "bfs",
            RevealOrder::Dfs => "dfs",
            RevealOrder::RandomValid => "random-valid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {what} '{found}'")]
pub struct ParseSpecError {
    what: &'static str,
    found: String,
}

impl FromStr for GeneratorKind {
    type Err = ParseSpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| ParseSpecError { what: "generator", found: s.into() })
    }
}

impl FromStr for RevealOrder {
    type Err = ParseSpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [RevealOrder::Bfs, RevealOrder::Dfs, RevealOrder::RandomValid]
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| ParseSpecError { what: "reveal order", found: s.into() })
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for RevealOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
    pub order: RevealOrder,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64, order: RevealOrder) -> Self {
        GeneratorSpec { kind, n, seed, order }
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |reason: &str| Err(HarnessError::InfeasibleSpec { spec: *self, reason: reason.into() });
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.kind == GeneratorKind::Degree13Tree && (self.n < 4 || self.n % 2 == 1) {
            return bad("degree-{1,3} trees need an even n of at least 4");
        }
        Ok(())
    }
}

/// Undirected adjacency lists over `0..n`.
type Shape = Vec<Vec<usize>>;

fn join(adj: &mut Shape, a: usize, b: usize) {
    adj[a].push(b);
    adj[b].push(a);
}

fn shape(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> (Shape, usize) {
    let n = spec.n;
    let mut adj = vec![Vec::new(); n];
    let start = match spec.kind {
        GeneratorKind::UniformAttachment => {
            for i in 1..n {
                let j = rng.gen_range(0..i);
                join(&mut adj, i, j);
            }
            0
        }
        GeneratorKind::Path => {
            for i in 1..n {
                join(&mut adj, i - 1, i);
            }
            0
        }
        GeneratorKind::Star => {
            // centre is 1 so that a leaf comes first
            for i in (0..n).filter(|&i| i != 1) {
                join(&mut adj, 1, i);
            }
            0
        }
        GeneratorKind::Degree13Tree => {
            for i in 1..4 {
                join(&mut adj, 0, i);
            }
            let mut leaves: Vec<usize> = (1..4).collect();
            let mut next = 4;
            while next < n {
                let at = rng.gen_range(0..leaves.len());
                let leaf = leaves.swap_remove(at);
                join(&mut adj, leaf, next);
                join(&mut adj, leaf, next + 1);
                leaves.extend([next, next + 1]);
                next += 2;
            }
            rng.gen_range(0..n)
        }
        GeneratorKind::Caterpillar => {
            let spine = (n / 2).max(1);
            for i in 1..spine {
                join(&mut adj, i - 1, i);
            }
            for leg in spine..n {
                let s = rng.gen_range(0..spine);
                join(&mut adj, s, leg);
            }
            0
        }
    };
    (adj, start)
}

fn reveal(adj: &Shape, start: usize, order: RevealOrder, rng: &mut ChaCha8Rng) -> (OnlineTreeInput, Vec<usize>) {
    let n = adj.len();
    let mut id = vec![0usize; n];
    let mut parents = Vec::with_capacity(n);
    let mut visit = |v: usize, from: usize, parents: &mut Vec<usize>| {
        parents.push(if from == usize::MAX { 0 } else { id[from] });
        id[v] = parents.len();
    };
    match order {
        RevealOrder::Bfs => {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([(start, usize::MAX)]);
            seen[start] = true;
            while let Some((v, from)) = queue.pop_front() {
                visit(v, from, &mut parents);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back((w, v));
                    }
                }
            }
        }
        RevealOrder::Dfs => {
            let mut seen = vec![false; n];
            let mut stack = vec![(start, usize::MAX)];
            while let Some((v, from)) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                visit(v, from, &mut parents);
                for &w in adj[v].iter().rev() {
                    if !seen[w] {
                        stack.push((w, v));
                    }
                }
            }
        }
        RevealOrder::RandomValid => {
            let mut seen = vec![false; n];
            let mut frontier = vec![(start, usize::MAX)];
            seen[start] = true;
            while !frontier.is_empty() {
                let at = rng.gen_range(0..frontier.len());
                let (v, from) = frontier.swap_remove(at);
                visit(v, from, &mut parents);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        frontier.push((w, v));
                    }
                }
            }
        }
    }
    (OnlineTreeInput::new(parents).expect("traversals reveal parents first"), id)
}

/// Deterministic instance of the requested family.
pub fn generate(spec: &GeneratorSpec) -> Result<OnlineTreeInput, HarnessError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut adj, start) = shape(spec, &mut rng);
    if spec.order == RevealOrder::RandomValid {
        for list in &mut adj {
            list.shuffle(&mut rng);
        }
    }
    Ok(reveal(&adj, start, spec.order, &mut rng).0)
}

/// Reveals an undirected tree from `start` in a random valid order. Also
/// returns the reveal index of every shape vertex.
pub(crate) fn random_reveal(adj: &[Vec<usize>], start: usize, rng: &mut ChaCha8Rng) -> (OnlineTreeInput, Vec<usize>) {
    reveal(&adj.to_vec(), start, RevealOrder::RandomValid, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GeneratorKind, n: usize, order: RevealOrder) -> GeneratorSpec {
        GeneratorSpec::new(kind, n, 7, order)
    }

    #[test]
    fn star_and_path_shapes() {
        let star = generate(&spec(GeneratorKind::Star, 4, RevealOrder::Bfs)).unwrap();
        assert_eq!(star.parents(), &[0, 1, 2, 2]);
        let path = generate(&spec(GeneratorKind::Path, 6, RevealOrder::Bfs)).unwrap();
        assert_eq!(path.parents(), &[0, 1, 2, 3, 4, 5]);
        let path = generate(&spec(GeneratorKind::Path, 6, RevealOrder::Dfs)).unwrap();
        assert_eq!(path.parents(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn infeasible_specs() {
        assert!(generate(&spec(GeneratorKind::Path, 1, RevealOrder::Bfs)).is_err());
        assert!(generate(&spec(GeneratorKind::Degree13Tree, 7, RevealOrder::Bfs)).is_err());
        assert!(generate(&spec(GeneratorKind::Degree13Tree, 2, RevealOrder::Bfs)).is_err());
    }

    #[test]
    fn parse_labels() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.label().parse::<GeneratorKind>().unwrap(), k);
        }
        assert_eq!("random-valid".parse::<RevealOrder>().unwrap(), RevealOrder::RandomValid);
        assert!("bogus".parse::<RevealOrder>().is_err());
    }

    #[test]
    fn degree13_has_only_degrees_one_and_three() {
        for seed in 0..50 {
            for order in [RevealOrder::Bfs, RevealOrder::Dfs, RevealOrder::RandomValid] {
                let n = 4 + 2 * (seed as usize % 20);
                let input = generate(&GeneratorSpec::new(GeneratorKind::Degree13Tree, n, seed, order)).unwrap();
                let view = input.view();
                assert_eq!(input.len(), n);
                assert!(view.vertices().all(|v| matches!(view.degree(v), 1 | 3)));
            }
        }
    }

    #[test]
    fn same_seed_same_input() {
        for kind in GeneratorKind::ALL {
            let s = GeneratorSpec::new(kind, 30, 11, RevealOrder::RandomValid);
            assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
            assert_eq!(generate(&s).unwrap().len(), 30);
        }
    }
}
