//! Generates a scene, detects, and scores the detection against the truth.
//!
//! cargo run --release --example evaluate_scene -- 0.003

use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::detector::{detect, DetectorConfig};
use hough_prims::eval::{evaluate, SEGCOMP_THRESHOLD};

fn main() -> hough_prims::Result<()> {
    let sigma: f64 = std::env::args().nth(1).map_or(0.003, |s| s.parse().expect("sigma"));
    let spec = SceneSpec {
        primitive_counts: PrimitiveCounts { plane: 1, sphere: 3, cylinder: 2, cone: 2 },
        noise_sigma: sigma,
        size_range: [0.04, 0.1],
        rng_seed: 5,
        ..SceneSpec::default()
    };
    let (cloud, truth) = generate_scene(&spec)?;
    let report = detect(&cloud, &DetectorConfig::default())?;
    let result = evaluate(&cloud, &truth, &report, SEGCOMP_THRESHOLD);

    let s = &result.scores;
    println!("precision {:.3} recall {:.3} missed {:.3} noise {:.3}", s.precision, s.recall, s.missed_rate, s.noise_rate);
    println!("over-segmented {} under-segmented {}", s.over_segmented, s.under_segmented);
    for d in &result.object_distances {
        println!("truth {:2} -> detection {:2} {:8} DOD {:.2}σ", d.ground_truth, d.detection, d.kind.name(), d.dod_sigma);
    }
    println!("mean DOD {:.2}σ", result.mean_dod_sigma);
    Ok(())
}
