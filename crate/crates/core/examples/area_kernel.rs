//! Blocked-centroid area of one rectangular obstacle and the closed-form
//! bound it gives for fixed-size grains.

use mmwave_connectivity::{area_kernel, fixed_size_upper_bound};

fn main() {
    let (w, l, d) = (10.0, 10.0, 200.0);
    println!("{:>6} {:>10} {:>12}", "kappa", "area m^2", "bound");
    for kappa in [0.0, 2.5, 5.0, 7.5, 10.0, 20.0, 100.0] {
        let area = area_kernel(w, l, d, kappa).unwrap();
        let bound = fixed_size_upper_bound(1e-4, w, l, d, kappa).unwrap();
        println!("{kappa:>6} {area:>10} {:>12.6}", bound.value);
    }
    // grains wider than the link block the same centroids for every window
    println!("w=300: {} m^2", area_kernel(300.0, l, d, 35.0).unwrap());
}
