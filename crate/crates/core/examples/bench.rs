//! Serial and parallel timings of joint and single-type detection on a
//! generated scene.
//!
//! cargo run --release --example bench -- 5

use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::detector::{detect_with, DetectorConfig, Execution};
use hough_prims::geometry::PrimitiveKind;

fn main() -> hough_prims::Result<()> {
    let repeats: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("repeats"));
    let spec = SceneSpec {
        primitive_counts: PrimitiveCounts { plane: 3, sphere: 5, cylinder: 5, cone: 5 },
        noise_sigma: 0.003,
        size_range: [0.05, 0.12],
        rng_seed: 3,
        ..SceneSpec::default()
    };
    let (cloud, _) = generate_scene(&spec)?;
    let base = DetectorConfig::default();
    println!("{} points, {} x {} pairs, {repeats} repeats", cloud.len(), base.n_reference, base.n_pair);

    let mut modes = vec![("joint", base.clone())];
    for kind in PrimitiveKind::ALL {
        modes.push((kind.name(), DetectorConfig { enabled_types: vec![kind], ..base.clone() }));
    }
    println!("{:9} {:>10} {:>10} {:>10} {:>10} {:>10}", "mode", "voting", "cluster", "inliers", "serial", "parallel");
    for (name, config) in modes {
        let mut serial = Vec::new();
        let mut parallel = Vec::new();
        for _ in 0..repeats {
            serial.push(detect_with(&cloud, &config, Execution::Serial)?.timing);
            parallel.push(detect_with(&cloud, &config, Execution::Parallel)?.timing.total_ms);
        }
        let k = repeats as f64;
        let mean = |f: &dyn Fn(&hough_prims::detector::Timing) -> f64| serial.iter().map(f).sum::<f64>() / k;
        println!(
            "{name:9} {:>8.1}ms {:>8.1}ms {:>8.1}ms {:>8.1}ms {:>8.1}ms",
            mean(&|t| t.voting_ms),
            mean(&|t| t.clustering_ms),
            mean(&|t| t.inliers_ms),
            mean(&|t| t.total_ms),
            parallel.iter().sum::<f64>() / k
        );
    }
    Ok(())
}
