use mmwave_connectivity::analytics::all_bounds;
use mmwave_connectivity::{BlockageModelParams, GrainDistribution, LinkGeometry, QuadratureSpec};

fn main() {
    let width = GrainDistribution::uniform(5.0, 15.0).unwrap();
    let length = GrainDistribution::pmf(vec![4.0, 10.0, 25.0], vec![0.3, 0.5, 0.2]).unwrap();
    let params = BlockageModelParams::new(2e-4, width, length).unwrap();
    let quad = QuadratureSpec::default();

    println!("kappa  unconditional  p_los     src_outdoor  both_outdoor  optimal");
    for kappa in [0.0, 5.0, 10.0, 25.0, 50.0] {
        let b = all_bounds(&params, &LinkGeometry::new(150.0, kappa).unwrap(), &quad).unwrap();
        println!(
            "{kappa:>5}  {:.6}       {:.6}  {:.6}     {:.6}      {:.6} (kappa*={})",
            b.unconditional.value,
            b.p_los.value,
            b.src_outdoor.value,
            b.both_outdoor.value,
            b.optimal_window.value,
            b.kappa_star
        );
    }
}
