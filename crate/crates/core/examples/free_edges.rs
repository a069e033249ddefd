//! Free and fixed edges, good triplets, and the seven properties for every
//! optimal set of one input.

use online_domset::analysis::properties::check_set;
use online_domset::analysis::{all_edges, check_lemma4, check_lemma5, good_triplets, Property};
use online_domset::opt::enumerate_optimal_sets;
use online_domset::OnlineTreeInput;

fn main() {
    let input = OnlineTreeInput::new(vec![0, 1, 2, 2, 4, 5, 5, 6, 6, 7, 7]).expect("valid input");
    let view = input.view();
    let sets = enumerate_optimal_sets(&view, 14).expect("small enough");
    println!("input {input}");
    for d in &sets {
        let free: Vec<String> = all_edges(&view, d)
            .into_iter()
            .filter(|e| e.free)
            .map(|e| format!("({},{}){}", e.v, e.u, if e.fixed { "*" } else { "" }))
            .collect();
        let flags = check_set(&view, d).flags;
        let holds: Vec<String> = Property::ALL.into_iter().filter(|&p| flags.get(p)).map(|p| p.to_string()).collect();
        println!("{d}");
        println!("  free edges (* fixed): {}", free.join(" "));
        println!("  good triplets: {:?}", good_triplets(&view, d));
        println!("  holds: {}", holds.join(" "));
    }
    let l4 = check_lemma4(&input, &sets).expect("sets given");
    let l5 = check_lemma5(&input, &sets).expect("sets given");
    println!("decompositions checked: {} + {}, failures {}", l4.checked, l5.checked, l4.failures.len() + l5.failures.len());
}
