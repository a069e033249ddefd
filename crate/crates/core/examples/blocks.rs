//! Block decomposition of a degree-{1,3} tree with its counts and leaf checks.

use online_domset::analysis::{block_cost_audit, block_routine, check_counting_identities, classify_blocks, normalize};
use online_domset::harness::{generate, GeneratorKind, GeneratorSpec, RevealOrder};
use online_domset::opt::min_dominating_set_tree;

fn main() {
    let spec = GeneratorSpec::new(GeneratorKind::Degree13Tree, 20, 3, RevealOrder::RandomValid);
    let input = generate(&spec).expect("even n");
    let view = input.view();
    let blocks = block_routine(&view);
    let costs = block_cost_audit(&view, &blocks).expect("degree-{1,3} tree");
    let d = min_dominating_set_tree(&view).expect("non-empty").witness;
    let classes = classify_blocks(&view, &blocks, &d).expect("optimal set");
    println!("generated {input} with {d}");
    for ((block, class), row) in blocks.blocks.iter().zip(&classes.classes).zip(&costs.rows) {
        let vs: Vec<String> = block.vertices.iter().map(|v| v.to_string()).collect();
        println!("  block {:>2} {:<8} cost {:<4} {}", block.id, class.label(), row.cost.to_string(), vs.join(" "));
    }
    let c = &classes.counts;
    println!("counts b10 {} b11 {} b2 {} b3 {} b4 {}", c.b10, c.b11, c.b2, c.b3, c.b4());

    let report = check_counting_identities(c);
    println!("leaf identity {}, leaf bounds {} and {}", report.leaf_identity, report.b10_bound, report.b11_bound);

    // the bounds assume every property holds, and normalizing ends at the star
    let out = normalize(&input, None, 200).expect("driver runs");
    println!("normalized to {} with {}, ratio {}", out.input, out.optset, out.ratio);
}
