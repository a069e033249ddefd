//! Every online algorithm on one input, with what each event added.

use online_domset::online::{run_online, AlgorithmKind, RaSampled};
use online_domset::OnlineTreeInput;

fn main() {
    let input = OnlineTreeInput::new(vec![0, 1, 2, 3, 3, 2, 6, 7, 7]).expect("valid input");
    println!("input {input}");
    for kind in AlgorithmKind::ALL {
        let trace = run_online(kind.build(), &input).expect("dominates every prefix");
        println!("{:<11} cost {} {}", kind.label(), trace.cost, trace.selected);
        for (i, adds) in trace.additions.iter().enumerate().filter(|(_, a)| !a.is_empty()) {
            let names: Vec<String> = adds.iter().map(|v| v.to_string()).collect();
            println!("    after v{}: +{}", i + 1, names.join(" +"));
        }
    }
    for seed in 0..4 {
        let alg = RaSampled::new(seed);
        let arm = alg.arm();
        let trace = run_online(alg, &input).expect("dominates every prefix");
        println!("ra seed {seed}: arm {arm:?}, cost {}", trace.cost);
    }
}
