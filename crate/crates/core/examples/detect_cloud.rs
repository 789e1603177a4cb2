//! Detects primitives in a PLY or xyzn file and lists them by vote mass.
//!
//! cargo run --release --example detect_cloud -- /tmp/scene/cloud.ply

use hough_prims::detector::{detect, DetectorConfig};
use hough_prims::geometry::Primitive;
use hough_prims::io::read_cloud;

fn main() -> hough_prims::Result<()> {
    let path = std::env::args().nth(1).expect("usage: detect_cloud CLOUD");
    let cloud = read_cloud(path.as_ref())?;
    let report = detect(&cloud, &DetectorConfig::default())?;
    println!(
        "{} points, {} candidates, {} primitives in {:.1} ms",
        cloud.len(),
        report.candidate_count,
        report.primitives.len(),
        report.timing.total_ms
    );
    for (i, d) in report.primitives.iter().enumerate() {
        let what = match d.primitive {
            Primitive::Plane(p) => format!("plane n={:.3?} d={:.4}", p.normal.as_slice(), p.offset),
            Primitive::Sphere(s) => format!("sphere c={:.3?} r={:.4}", s.center.as_slice(), s.radius),
            Primitive::Cylinder(c) => format!("cylinder a={:.3?} r={:.4}", c.axis.as_slice(), c.radius),
            Primitive::Cone(k) => format!("cone apex={:.3?} θ={:.1}°", k.apex.as_slice(), k.angle.to_degrees()),
        };
        println!("{i:2} mass {:7.1} inliers {:6} {what}", d.vote_mass, report.inlier_count(i));
    }
    Ok(())
}
