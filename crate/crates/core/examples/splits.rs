//! Cutting an input at a vertex and grafting one input onto another.

use online_domset::tree::{f1_split, f2_split, f3_connect};
use online_domset::{OnlineTreeInput, VertexId};

fn main() {
    let input = OnlineTreeInput::new(vec![0, 1, 2, 2, 3, 5, 1]).expect("valid input");
    let u = VertexId::new(3);
    let rest = f1_split(&input, u).expect("u is not v1");
    let sub = f2_split(&input, u).expect("u exists");
    println!("input       {input}");
    println!("without v3  {} from {:?}", rest.input, rest.origin);
    println!("below v3    {} from {:?}", sub.input, sub.origin);
    let back = f3_connect(&rest.input, VertexId::new(2), &sub.input).expect("v2 survives");
    println!("regrafted   {back}");
}
