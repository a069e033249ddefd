//! The path-and-pendant adversary against RA, exactly and by sampling.

use online_domset::adversary::rand::{build_rand_adversary, evaluate_rand_adversary, MonteCarlo, RaExact};
use online_domset::online::RaSampled;

fn main() {
    for m in [1, 2, 5, 10, 50, 100] {
        let tr = build_rand_adversary(m, &RaExact).expect("exact oracle");
        let eval = evaluate_rand_adversary(&tr, &RaExact).expect("exact oracle");
        let r = eval.ratio.expect("exact oracle");
        println!("m {m:>3}: n {:>3}, OPT {:>3}, ratio {r}", tr.input.len(), eval.opt_cost);
    }
    let mc = MonteCarlo::new("ra-sample", RaSampled::new, 4000, 7);
    let tr = build_rand_adversary(10, &mc).expect("sampling oracle");
    let eval = evaluate_rand_adversary(&tr, &mc).expect("sampling oracle");
    println!("sampled m 10: ratio in [{:.3}, {:.3}]", eval.ratio_interval.0, eval.ratio_interval.1);
}
