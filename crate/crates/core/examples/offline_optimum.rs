//! The tree DP against brute force, and every optimal set of a small input.

use online_domset::opt::{brute_force_min, enumerate_optimal_sets, min_dominating_set_tree};
use online_domset::OnlineTreeInput;

fn main() {
    let input = OnlineTreeInput::new(vec![0, 1, 2, 3, 4, 5, 6]).expect("valid input");
    let view = input.view();
    let dp = min_dominating_set_tree(&view).expect("non-empty");
    let brute = brute_force_min(&view, 20).expect("small enough");
    println!("input {input}");
    println!("dp    size {} witness {}", dp.size, dp.witness);
    println!("brute size {} witness {}", brute.size, brute.witness);
    for set in enumerate_optimal_sets(&view, 14).expect("small enough") {
        println!("  optimal {set}");
    }
}
