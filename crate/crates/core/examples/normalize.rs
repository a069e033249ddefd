//! Single normalizing steps on crafted inputs, then the full driver.

use online_domset::analysis::{normalize, normalize_step, Property};
use online_domset::harness::{crafted_instances, Gate};
use online_domset::OnlineTreeInput;

fn main() {
    for target in [Property::P1, Property::P2, Property::P3, Property::P4, Property::P5] {
        let batch = crafted_instances(target, Gate::Preconditions, 1, 1, 50_000);
        let c = &batch.instances[0];
        let step = normalize_step(&c.input, target, Some(&c.optset)).expect("crafted for this step");
        let outs: Vec<String> = step.outputs.iter().map(|o| format!("{} ({})", o.input, o.ratio)).collect();
        println!("{target} case {} on {} ratio {}", step.case, c.input, step.ratio);
        println!("    -> {}", outs.join(", "));
    }
    let input = OnlineTreeInput::new(vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9]).expect("valid input");
    let out = normalize(&input, None, 50).expect("driver runs");
    let path: Vec<String> = out.steps.iter().map(|s| format!("{}:{}", s.target, s.case)).collect();
    println!("driver on {input}: {} -> {} via {}", out.initial_ratio, out.ratio, path.join(" "));
    println!("    final {} with {}, complete {}", out.input, out.optset, out.complete);
}
