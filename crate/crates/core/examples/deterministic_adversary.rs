//! The adaptive adversary against each deterministic algorithm, at three
//! parameter settings.

use online_domset::adversary::det::{run_against, verify_ratio_cases, AdversaryParams};
use online_domset::online::AlgorithmKind;

fn main() {
    for (len, t0, t1) in [(50, 50, 50), (98, 100, 100), (299, 300, 300)] {
        let params = AdversaryParams::new(len, t0, t1).expect("max length is 2 mod 3");
        println!("max-length {len}, max-t0 {t0}, max-t1 {t1}");
        for kind in AlgorithmKind::ALL {
            let tr = run_against(kind, params).expect("adversary finishes");
            let cert = verify_ratio_cases(&tr).expect("ledger matches");
            println!(
                "  {:<11} ON {:>4} OFF {:>3} ratio {:<8} case {} via {} ({} vertices)",
                kind.label(),
                cert.on_cost,
                cert.off_cost,
                cert.ratio.to_string(),
                cert.case,
                cert.step,
                tr.input.len()
            );
        }
    }
}
