use mmwave_connectivity::model::sample_field;
use mmwave_connectivity::{is_indoor, sampling_window, BlockageModelParams, GrainDistribution, LinkGeometry};

fn main() {
    let law = GrainDistribution::uniform(5.0, 15.0).unwrap();
    let params = BlockageModelParams::new(5e-4, law.clone(), law).unwrap();
    let link = LinkGeometry::new(200.0, 20.0).unwrap();
    let w = sampling_window(&link, &params);
    println!("window x [{}, {}] y [{}, {}], expected count {:.2}", w.x_lo, w.x_hi, w.y_lo, w.y_hi, 5e-4 * w.area());

    let field = sample_field(&params, &link, 42);
    for r in &field.obstacles {
        println!("  centre ({:7.2}, {:6.2})  {:5.2} x {:5.2}", r.cx, r.cy, r.width(), r.length());
    }
    println!("source indoor: {}", is_indoor(link.source(), &field));
    println!("destination indoor: {}", is_indoor(link.destination(), &field));
}
