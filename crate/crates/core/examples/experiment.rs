//! A seeded batch of random instances, written as CSV.

use online_domset::harness::{run_experiment, uniform_specs};
use online_domset::online::AlgorithmKind;

fn main() {
    let specs = uniform_specs(20, 60, 9);
    let mut report = run_experiment(&specs, &AlgorithmKind::ALL).expect("no ratio above 5/2");
    report.metadata.seed = Some(9);
    print!("{}", report.to_csv().expect("csv"));
    eprintln!("max ratio {} mean {:.4}", report.max_ratio, report.mean_ratio_float);
}
