//! Cell statistics of the axis-direction grid for a few angular bin sizes.
//!
//! cargo run --release --example hemisphere_grid

use std::f64::consts::TAU;

use hough_prims::accumulator::hemisphere::HemisphereGrid;
use hough_prims::geometry::Vec3;

fn main() {
    for deg in [5.0f64, 10.0, 20.0] {
        let grid = HemisphereGrid::new(deg.to_radians());
        let areas: Vec<f64> = (0..grid.len()).map(|c| grid.solid_angle(c)).collect();
        let (lo, hi) = areas.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        let total: f64 = areas.iter().sum();
        println!(
            "{deg:4}°: {:4} cells in {:2} rings, area {:.5}..{:.5} sr (max/min {:.3}), total {:.6} of {:.6}",
            grid.len(),
            grid.ring_count(),
            lo,
            hi,
            hi / lo,
            total,
            TAU
        );
    }

    let grid = HemisphereGrid::new(10f64.to_radians());
    let direction = Vec3::new(0.3, -0.2, 0.9).normalize();
    let loc = grid.lookup(&direction);
    println!("{:.3?} -> cell {} (ring {})", direction.as_slice(), loc.cell, grid.cell_ring(loc.cell));
    for (cell, w) in grid.stencil(&direction).entries() {
        println!("  cell {cell:4} weight {w:.4} center {:.3?}", grid.center(*cell).as_slice());
    }
}
