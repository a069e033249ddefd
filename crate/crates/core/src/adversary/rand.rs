//! Oblivious adversary against randomized algorithms: reveal a path of `2m`
//! vertices, look at the selection probabilities, and hang a pendant off the
//! weaker vertex of every pair that is not selected often enough.

use num_rational::Rational64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::online::{run_online, OnlineAlgorithm, OnlineError, RaMixture};
use crate::opt::opt_size;
use crate::tree::{f3_connect, DominatingSet, OnlineTreeInput, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Contract(#[from] OnlineError),
    #[error("oracle needs at least one trial")]
    NoTrials,
    #[error("m must be positive")]
    EmptyPath,
}

/// A probability, exact or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Half-width of the confidence interval; zero when exact.
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_ratio")]
    pub exact: Option<Rational64>,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

impl Estimate {
    pub fn exact(p: Rational64) -> Self {
        Estimate { mean: to_f64(p), radius: 0.0, exact: Some(p) }
    }

    /// Mean of `hits` successes in `trials`, with a three-standard-error radius.
    pub fn sampled(hits: u64, trials: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        let se = (mean * (1.0 - mean) / trials as f64).sqrt();
        Estimate { mean, radius: 3.0 * se, exact: None }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.radius
    }

    /// Certainly at least `t`: exact comparison when available, otherwise the
    /// whole interval must clear `t`.
    pub fn at_least(&self, t: Rational64) -> bool {
        match self.exact {
            Some(p) => p >= t,
            None => self.lower() >= to_f64(t),
        }
    }
}

pub(crate) fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Selection probabilities of some randomized algorithm on a given input.
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityTable {
    /// Probability that `v` is selected once the input ends, by slot.
    pub end: Vec<Estimate>,
    /// For each `v ≠ v1` (by slot, `None` for `v1`): probabilities of its
    /// parent and of `v` itself right after `v` is revealed.
    pub at_arrival: Vec<Option<(Estimate, Estimate)>>,
}

pub trait ProbabilityOracle {
    fn name(&self) -> String;
    fn probabilities(&self, input: &OnlineTreeInput) -> Result<ProbabilityTable, OracleError>;
    /// Expected cost on `input` as an estimate.
    fn expected_cost(&self, input: &OnlineTreeInput) -> Result<Estimate, OracleError>;
}

/// Exact oracle for RA from its two arms.
#[derive(Debug, Clone, Copy, Default)]
pub struct RaExact;

impl ProbabilityOracle for RaExact {
    fn name(&self) -> String {
        "ra".into()
    }

    fn probabilities(&self, input: &OnlineTreeInput) -> Result<ProbabilityTable, OracleError> {
        let mix = RaMixture::run(input);
        let end = input.vertices().map(|v| Estimate::exact(mix.probability(v))).collect();
        let at_arrival = input
            .vertices()
            .map(|v| {
                input.parent(v).map(|u| {
                    (Estimate::exact(mix.probability_at(u, v)), Estimate::exact(mix.probability_at(v, v)))
                })
            })
            .collect();
        Ok(ProbabilityTable { end, at_arrival })
    }

    fn expected_cost(&self, input: &OnlineTreeInput) -> Result<Estimate, OracleError> {
        Ok(Estimate::exact(RaMixture::run(input).expected_cost()))
    }
}

/// Monte Carlo oracle for any seeded algorithm. Trial `i` seeds the algorithm
/// from stream `i` of a ChaCha generator keyed by the master seed, so results
/// do not depend on scheduling.
pub struct MonteCarlo<F> {
    pub label: String,
    pub factory: F,
    pub trials: u64,
    pub seed: u64,
}

impl<F, A> MonteCarlo<F>
where
    F: Fn(u64) -> A + Sync,
    A: OnlineAlgorithm,
{
    pub fn new(label: impl Into<String>, factory: F, trials: u64, seed: u64) -> Self {
        MonteCarlo { label: label.into(), factory, trials, seed }
    }

    fn trial_seed(&self, trial: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng.next_u64()
    }

    fn tally(&self, input: &OnlineTreeInput) -> Result<(Vec<u64>, Vec<(u64, u64)>, u64), OracleError> {
        if self.trials == 0 {
            return Err(OracleError::NoTrials);
        }
        let n = input.len();
        let zero = || (vec![0u64; n], vec![(0u64, 0u64); n], 0u64);
        (0..self.trials)
            .into_par_iter()
            .map(|trial| -> Result<_, OracleError> {
                let trace = run_online((self.factory)(self.trial_seed(trial)), input)?;
                let mut acc = zero();
                for v in input.vertices() {
                    acc.0[v.slot()] = u64::from(trace.selected.contains(v));
                    if let Some(u) = input.parent(v) {
                        acc.1[v.slot()] = (u64::from(trace.selected_by(u, v)), u64::from(trace.selected_by(v, v)));
                    }
                }
                acc.2 = trace.cost as u64;
                Ok(acc)
            })
            .try_reduce(zero, |mut a, b| {
                for i in 0..n {
                    a.0[i] += b.0[i];
                    a.1[i].0 += b.1[i].0;
                    a.1[i].1 += b.1[i].1;
                }
                a.2 += b.2;
                Ok(a)
            })
    }
}

impl<F, A> ProbabilityOracle for MonteCarlo<F>
where
    F: Fn(u64) -> A + Sync,
    A: OnlineAlgorithm,
{
    fn name(&self) -> String {
        self.label.clone()
    }

    fn probabilities(&self, input: &OnlineTreeInput) -> Result<ProbabilityTable, OracleError> {
        let (end, arr, _) = self.tally(input)?;
        let t = self.trials;
        Ok(ProbabilityTable {
            end: end.iter().map(|&h| Estimate::sampled(h, t)).collect(),
            at_arrival: input
                .vertices()
                .map(|v| input.parent(v).map(|_| {
                    let (hu, hv) = arr[v.slot()];
                    (Estimate::sampled(hu, t), Estimate::sampled(hv, t))
                }))
                .collect(),
        })
    }

    fn expected_cost(&self, input: &OnlineTreeInput) -> Result<Estimate, OracleError> {
        let (_, _, total) = self.tally(input)?;
        let n = input.len() as f64;
        let mean = total as f64 / self.trials as f64;
        // cost lies in [1, n]; Hoeffding-free crude radius from the range
        let radius = 3.0 * (n - 1.0) / (2.0 * (self.trials as f64).sqrt());
        Ok(Estimate { mean, radius, exact: None })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma17Row {
    pub parent: VertexId,
    pub child: VertexId,
    pub p_parent: Estimate,
    pub p_child: Estimate,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma17Report {
    pub rows: Vec<Lemma17Row>,
}

impl Lemma17Report {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// For every arrival edge `(u, v)`, checks `p_u + p_v ≥ 1` right after `v`
/// is revealed.
pub fn check_lemma17(input: &OnlineTreeInput, oracle: &dyn ProbabilityOracle) -> Result<Lemma17Report, OracleError> {
    let table = oracle.probabilities(input)?;
    let rows = input
        .vertices()
        .filter_map(|v| {
            let u = input.parent(v)?;
            let (pu, pv) = table.at_arrival[v.slot()].expect("non-root has arrival data");
            let ok = match (pu.exact, pv.exact) {
                (Some(a), Some(b)) => a + b >= Rational64::from(1),
                _ => pu.upper() + pv.upper() >= 1.0,
            };
            Some(Lemma17Row { parent: u, child: v, p_parent: pu, p_child: pv, ok })
        })
        .collect();
    Ok(Lemma17Report { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum PairCase {
    /// Both vertices of the pair are selected with probability at least 2/3.
    Case1,
    /// A pendant arrives at `v_{l1}`; `v_{l2}` is the other vertex of the pair.
    Case2 { l1: VertexId, l2: VertexId, pendant: VertexId },
}

#[derive(Debug, Clone, Serialize)]
pub struct RandAdversaryTranscript {
    pub m: usize,
    pub oracle: String,
    pub path_probabilities: Vec<Estimate>,
    pub pairs: Vec<PairCase>,
    pub input: OnlineTreeInput,
    pub off_witness: DominatingSet,
}

impl RandAdversaryTranscript {
    pub fn off_cost(&self) -> usize {
        self.off_witness.len()
    }
}

/// Builds the adversary's input for `m` pairs.
pub fn build_rand_adversary(m: usize, oracle: &dyn ProbabilityOracle) -> Result<RandAdversaryTranscript, OracleError> {
    if m == 0 {
        return Err(OracleError::EmptyPath);
    }
    let path = OnlineTreeInput::path(2 * m);
    let probs = oracle.probabilities(&path)?.end;
    let two_thirds = Rational64::new(2, 3);
    let mut input = path.clone();
    let mut pairs = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m);
    for l in 1..=m {
        let (a, b) = (VertexId::new(2 * l - 1), VertexId::new(2 * l));
        let (pa, pb) = (probs[a.slot()], probs[b.slot()]);
        if pa.at_least(two_thirds) && pb.at_least(two_thirds) {
            pairs.push(PairCase::Case1);
            off.push(a);
            continue;
        }
        let a_first = match (pa.exact, pb.exact) {
            (Some(x), Some(y)) => x <= y,
            _ => pa.mean <= pb.mean,
        };
        let (l1, l2) = if a_first { (a, b) } else { (b, a) };
        input = f3_connect(&input, l1, &OnlineTreeInput::single()).expect("l1 is on the path");
        pairs.push(PairCase::Case2 { l1, l2, pendant: VertexId::new(input.len()) });
        off.push(l1);
    }
    let off_witness = DominatingSet::from_vertices(input.len(), off);
    Ok(RandAdversaryTranscript { m, oracle: oracle.name(), path_probabilities: probs, pairs, input, off_witness })
}

#[derive(Debug, Clone, Serialize)]
pub struct RandEvaluation {
    pub expected_cost: Estimate,
    pub opt_cost: usize,
    pub off_cost: usize,
    /// Exact ratio when the oracle is exact.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_ratio")]
    pub ratio: Option<Rational64>,
    pub ratio_interval: (f64, f64),
    /// Expected cost of each pair (Case 1) or triple (Case 2) on the final
    /// input; exact oracles only.
    #[serde(skip_serializing_if = "Vec::is_empty", serialize_with = "ser_ratio_vec")]
    pub per_pair: Vec<Rational64>,
}

fn ser_ratio_vec<S: serde::Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
}

/// Evaluates the algorithm on the adversary's input against the true optimum.
pub fn evaluate_rand_adversary(
    tr: &RandAdversaryTranscript,
    oracle: &dyn ProbabilityOracle,
) -> Result<RandEvaluation, OracleError> {
    let view = tr.input.view();
    assert!(tr.off_witness.is_dominating(&view), "OFF must dominate the adversary's input");
    assert_eq!(tr.off_cost(), tr.m, "OFF selects one vertex per pair");
    let opt_cost = opt_size(&view);
    assert!(opt_cost <= tr.m, "C_OPT cannot exceed m");
    let cost = oracle.expected_cost(&tr.input)?;
    let ratio = cost.exact.map(|c| c / Rational64::from(opt_cost as i64));
    let per_pair = if cost.exact.is_some() {
        let end = oracle.probabilities(&tr.input)?.end;
        let p = |v: VertexId| end[v.slot()].exact.expect("exact oracle");
        tr.pairs
            .iter()
            .enumerate()
            .map(|(i, case)| {
                let (a, b) = (VertexId::new(2 * i + 1), VertexId::new(2 * i + 2));
                match case {
                    PairCase::Case1 => p(a) + p(b),
                    PairCase::Case2 { pendant, .. } => p(a) + p(b) + p(*pendant),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let o = opt_cost as f64;
    Ok(RandEvaluation {
        expected_cost: cost,
        opt_cost,
        off_cost: tr.off_cost(),
        ratio,
        ratio_interval: (cost.lower() / o, cost.upper() / o),
        per_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{ParityAlgorithm, RaSampled};

    fn half() -> Rational64 {
        Rational64::new(1, 2)
    }

    struct Always;
    impl ProbabilityOracle for Always {
        fn name(&self) -> String {
            "ones".into()
        }
        fn probabilities(&self, input: &OnlineTreeInput) -> Result<ProbabilityTable, OracleError> {
            let one = Estimate::exact(1.into());
            Ok(ProbabilityTable {
                end: vec![one; input.len()],
                at_arrival: input.vertices().map(|v| input.parent(v).map(|_| (one, one))).collect(),
            })
        }
        fn expected_cost(&self, input: &OnlineTreeInput) -> Result<Estimate, OracleError> {
            Ok(Estimate::exact((input.len() as i64).into()))
        }
    }

    #[test]
    fn lemma17_examples() {
        let p2 = check_lemma17(&OnlineTreeInput::path(2), &RaExact).unwrap();
        assert!(p2.all_ok());
        assert_eq!(p2.rows[0].p_parent.exact, Some(1.into()));
        let star = check_lemma17(&OnlineTreeInput::new(vec![0, 1, 2, 2]).unwrap(), &RaExact).unwrap();
        // measured when v3 arrives: A has v2 already, B takes v3 and only later v2
        let e = &star.rows[1];
        assert_eq!((e.p_parent.exact, e.p_child.exact), (Some(half()), Some(half())));
        let end = RaExact.probabilities(&OnlineTreeInput::new(vec![0, 1, 2, 2]).unwrap()).unwrap().end;
        assert_eq!((end[1].exact, end[2].exact), (Some(1.into()), Some(half())));
        let chain = check_lemma17(&OnlineTreeInput::path(4), &RaExact).unwrap();
        let e = &chain.rows[1];
        assert_eq!((e.parent.index(), e.child.index()), (2, 3));
        assert_eq!(e.p_parent.exact.unwrap() + e.p_child.exact.unwrap(), Rational64::from(1));
    }

    #[test]
    fn ra_path_probabilities() {
        let tr = build_rand_adversary(2, &RaExact).unwrap();
        let exact: Vec<_> = tr.path_probabilities.iter().map(|e| e.exact.unwrap()).collect();
        assert_eq!(exact, vec![1.into(), half(), half(), half()]);
        let v = VertexId::new;
        assert!(matches!(tr.pairs[0], PairCase::Case2 { l1, .. } if l1 == v(2)));
        assert!(matches!(tr.pairs[1], PairCase::Case2 { l1, .. } if l1 == v(3)));
        assert_eq!(tr.off_witness.vertices().collect::<Vec<_>>(), vec![v(2), v(3)]);
        assert_eq!(tr.input.len(), 6);
    }

    #[test]
    fn all_ones_oracle_takes_case1() {
        let tr = build_rand_adversary(3, &Always).unwrap();
        assert!(tr.pairs.iter().all(|c| *c == PairCase::Case1));
        assert_eq!((tr.input.len(), tr.off_cost()), (6, 3));
    }

    #[test]
    fn ra_ratio_at_least_four_thirds() {
        for m in [1, 2, 5, 10] {
            let tr = build_rand_adversary(m, &RaExact).unwrap();
            let ev = evaluate_rand_adversary(&tr, &RaExact).unwrap();
            assert!(ev.ratio.unwrap() >= Rational64::new(4, 3), "m = {m}");
            assert!(ev.per_pair.iter().all(|&c| c >= Rational64::new(4, 3)));
        }
    }

    #[test]
    fn monte_carlo_tracks_exact_values() {
        let path = OnlineTreeInput::path(8);
        let mc = MonteCarlo::new("ra-sample", RaSampled::new, 10_000, 7);
        let est = mc.probabilities(&path).unwrap();
        let exact = RaExact.probabilities(&path).unwrap();
        for (e, x) in est.end.iter().zip(&exact.end) {
            let truth = x.mean;
            assert!((e.mean - truth).abs() <= e.radius.max(1e-12), "{} vs {truth}", e.mean);
        }
        assert!(check_lemma17(&path, &mc).unwrap().all_ok());
        let again = mc.probabilities(&path).unwrap();
        assert_eq!(est.end, again.end);
    }

    #[test]
    fn deterministic_algorithm_through_monte_carlo() {
        let mc = MonteCarlo::new("a", |_| ParityAlgorithm::a(), 50, 1);
        let tr = build_rand_adversary(4, &mc).unwrap();
        let ev = evaluate_rand_adversary(&tr, &mc).unwrap();
        assert!(ev.ratio_interval.1 >= 4.0 / 3.0);
    }
}
