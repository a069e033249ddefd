//! RA on the four-vertex star that arrives leaf first.

use online_domset::opt::opt_size;
use online_domset::{OnlineTreeInput, RaMixture};

fn main() {
    let star = OnlineTreeInput::new(vec![0, 1, 2, 2]).expect("valid input");
    let mix = RaMixture::run(&star);
    let opt = opt_size(&star.view());
    println!("input  {star}");
    println!("A      {} (cost {})", mix.a.selected, mix.a.cost);
    println!("B      {} (cost {})", mix.b.selected, mix.b.cost);
    println!("E[RA]  {}", mix.expected_cost());
    println!("OPT    {opt}");
    println!("ratio  {}", online_domset::ratio(mix.expected_cost(), opt));
}
