//! Every parent array up to eight vertices.

use online_domset::harness::exhaustive_small_sweep;

fn main() {
    let report = exhaustive_small_sweep(8).expect("n <= 12");
    for row in &report.rows {
        println!(
            "n {:>2}: {:>6} inputs, {:>3} shapes, max ratio {} at {}",
            row.n, row.instances, row.shapes, row.max_ratio, row.argmax
        );
    }
    println!("violations: {}", report.violations.len());
}
