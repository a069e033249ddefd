//! Per-vertex membership cases and expected costs under RA.

use online_domset::online::{membership_case, verify_membership_table};
use online_domset::OnlineTreeInput;

fn main() {
    let input = OnlineTreeInput::new(vec![0, 1, 1, 2, 2, 3, 6, 6, 8]).expect("valid input");
    let view = input.view();
    println!("input {input}");
    println!("{:>4}  {:>6}  {:>5}  {:>5}  {:>4}", "v", "case", "in A", "in B", "cost");
    for row in verify_membership_table(&input).rows {
        let case = membership_case(&view, row.vertex);
        println!(
            "{:>4}  {:>6}  {:>5}  {:>5}  {:>4}",
            row.vertex.to_string(),
            case.label(),
            row.in_a,
            row.in_b,
            case.expected_cost().to_string()
        );
    }
}
