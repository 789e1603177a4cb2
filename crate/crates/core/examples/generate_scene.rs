//! Renders a mixed scene and writes `cloud.ply` and `ground_truth.json`.
//!
//! cargo run --release --example generate_scene -- /tmp/scene 0.003

use std::path::PathBuf;

use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::io::{write_cloud, write_ground_truth, CloudFileFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "scene".into()));
    let sigma: f64 = args.next().map_or(0.003, |s| s.parse().expect("sigma"));

    let spec = SceneSpec {
        primitive_counts: PrimitiveCounts { plane: 2, sphere: 3, cylinder: 3, cone: 2 },
        noise_sigma: sigma,
        size_range: [0.04, 0.1],
        rng_seed: 1,
        ..SceneSpec::default()
    };
    let (cloud, truth) = generate_scene(&spec)?;
    std::fs::create_dir_all(&dir)?;
    write_cloud(&dir.join("cloud.ply"), &cloud, CloudFileFormat::PlyBinaryLittleEndian)?;
    write_ground_truth(&dir.join("ground_truth.json"), &truth)?;

    println!("{} points, diameter {:.3}", cloud.len(), truth.diameter);
    for (i, p) in truth.primitives.iter().enumerate() {
        let n = truth.labels.iter().filter(|&&l| l == i).count();
        println!("{i:2} {:8} {n:6} points", p.kind().name());
    }
    Ok(())
}
