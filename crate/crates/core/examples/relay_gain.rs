//! Gain from relaying inside wider windows, estimated on shared obstacle
//! fields so that differences have low variance.

use mmwave_connectivity::{paired_kappa_comparison, BlockageModelParams};

fn main() {
    let params = BlockageModelParams::fixed(5e-4, 10.0, 10.0).unwrap();
    let kappas = [0.0, 5.0, 10.0, 20.0, 100.0];
    let paired = paired_kappa_comparison(&params, 200.0, &kappas, 100_000, 7).unwrap();
    for (k, e) in kappas.iter().zip(&paired.estimates) {
        println!("kappa {k:>5}: {:.5} +- {:.5}", e.mean, e.std_err);
    }
    for (b, k) in kappas.iter().enumerate().skip(1) {
        let diff = paired.difference(0, b);
        println!("gain over direct link at kappa {k:>5}: {:.5} +- {:.5}", diff.mean, diff.std_err);
    }
    let tail = paired.difference(3, 4);
    println!("kappa 20 -> 100: {:.5} +- {:.5}", tail.mean, tail.std_err);
}
