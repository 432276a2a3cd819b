//! Decides connectivity for a hand-made obstacle layout, prints the witness
//! path, and cross-checks with the raster oracle.

use mmwave_connectivity::{free_space_connected, grid_flood_fill_connected, AxisRect, Strip};

fn main() {
    let strip = Strip::new(200.0, 20.0).unwrap();
    // two staggered walls leave a zig-zag channel
    let mut obstacles =
        vec![AxisRect::new(60.0, 3.0, 4.0, 8.0).unwrap(), AxisRect::new(120.0, -3.0, 4.0, 8.0).unwrap()];

    let out = free_space_connected(&strip, &obstacles, strip.source(), strip.destination()).unwrap();
    println!("connected: {}", out.connected);
    for p in out.witness.unwrap_or_default() {
        println!("  ({:.2}, {:.2})", p.x, p.y);
    }

    obstacles.push(AxisRect::new(90.0, 0.0, 2.0, 12.0).unwrap());
    let exact = free_space_connected(&strip, &obstacles, strip.source(), strip.destination()).unwrap().connected;
    let raster = grid_flood_fill_connected(&strip, &obstacles, strip.source(), strip.destination(), 0.05).unwrap();
    println!("with a cutting wall: exact {exact}, raster {raster}");
}
