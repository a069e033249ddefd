//! One instance of each generator family under each reveal order.

use online_domset::harness::{generate, GeneratorKind, GeneratorSpec, RevealOrder};

fn main() {
    for kind in GeneratorKind::ALL {
        for order in [RevealOrder::Bfs, RevealOrder::Dfs, RevealOrder::RandomValid] {
            let input = generate(&GeneratorSpec::new(kind, 10, 42, order)).expect("feasible");
            println!("{:<18} {:<12} {input}", kind.label(), order.label());
        }
    }
}
