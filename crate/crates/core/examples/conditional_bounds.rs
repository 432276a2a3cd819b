use mmwave_connectivity::{
    conditional_upper_bound, estimate_connectivity, BlockageModelParams, Condition, LinkGeometry, QuadratureSpec,
};

fn main() {
    let params = BlockageModelParams::fixed(5e-4, 10.0, 10.0).unwrap();
    let quad = QuadratureSpec::default();
    for kappa in [0.0, 5.0, 20.0] {
        let link = LinkGeometry::new(200.0, kappa).unwrap();
        for condition in Condition::ALL {
            let bound = conditional_upper_bound(&params, &link, condition, &quad).unwrap();
            let est = estimate_connectivity(&params, &link, condition, 50_000, 3).unwrap();
            println!(
                "kappa {kappa:>4} {:<13} estimate {:.5} (accepted {:.3})  bound {:.5}",
                condition.as_str(),
                est.mean,
                est.acceptance_rate(),
                bound.value
            );
        }
    }
}
