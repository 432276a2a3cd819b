//! Line-of-sight probability: closed form against simulation.

use mmwave_connectivity::{estimate_p_los, p_los, BlockageModelParams};

fn main() {
    let params = BlockageModelParams::fixed(1e-4, 10.0, 10.0).unwrap();
    for d in [50.0, 100.0, 200.0, 400.0] {
        let exact = p_los(&params, d).unwrap().value;
        let est = estimate_p_los(&params, d, 100_000, 1).unwrap();
        println!("d={d:>5}  closed form {exact:.6}  simulated {:.6} [{:.6}, {:.6}]", est.mean, est.ci_low, est.ci_high);
    }
}
