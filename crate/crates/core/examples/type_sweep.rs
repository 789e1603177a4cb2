//! Precision, recall and DOD over a batch of generated single-type scenes,
//! for the full detector and its three ablations.
//!
//! cargo run --release --example type_sweep -- --kind cylinder --scenes 20

use clap::Parser;
use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::detector::{detect, DetectorConfig};
use hough_prims::eval::{evaluate, SEGCOMP_THRESHOLD};
use hough_prims::geometry::PrimitiveKind;

#[derive(Parser)]
struct Args {
    #[arg(long, default_value = "sphere")]
    kind: PrimitiveKind,
    #[arg(long, default_value_t = 20)]
    scenes: u64,
    /// Primitives per scene.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, default_value_t = 0.03)]
    size_min: f64,
    #[arg(long, default_value_t = 0.08)]
    size_max: f64,
    /// Only the full detector.
    #[arg(long)]
    full_only: bool,
    /// Base detector configuration (JSON).
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

fn main() -> hough_prims::Result<()> {
    let args = Args::parse();
    let variants: Vec<(&str, DetectorConfig)> = {
        let full: DetectorConfig = match &args.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p).expect("config file")).expect("config JSON"),
            None => DetectorConfig::default(),
        };
        let mut v = vec![("full", full.clone())];
        if !args.full_only {
            v.push(("nms-cluster", DetectorConfig { use_cluster_averaging: false, ..full.clone() }));
            v.push(("no-bin-avg", DetectorConfig { use_bin_averaging: false, ..full.clone() }));
            v.push(("no-spread", DetectorConfig { use_vote_spreading: false, ..full.clone() }));
        }
        v
    };
    for (name, config) in variants {
        let (mut correct, mut detections, mut truths) = (0, 0, 0);
        let (mut dod_sum, mut dod_n) = (0.0, 0usize);
        let mut empty = 0;
        let mut kinds = [0usize; 4];
        let start = std::time::Instant::now();
        for seed in 0..args.scenes {
            let spec = SceneSpec {
                primitive_counts: PrimitiveCounts::only(args.kind, args.count),
                noise_sigma: args.sigma,
                size_range: [args.size_min, args.size_max],
                rng_seed: seed,
                ..SceneSpec::default()
            };
            let (cloud, truth) = generate_scene(&spec)?;
            let report = detect(&cloud, &DetectorConfig { rng_seed: seed, ..config.clone() })?;
            for p in &report.primitives {
                kinds[PrimitiveKind::ALL.iter().position(|k| *k == p.primitive.kind()).unwrap()] += 1;
            }
            empty += (0..report.primitives.len()).filter(|&i| report.inlier_count(i) == 0).count();
            let e = evaluate(&cloud, &truth, &report, SEGCOMP_THRESHOLD);
            correct += e.scores.correct;
            detections += e.scores.detections;
            truths += e.scores.ground_truth;
            for o in &e.object_distances {
                dod_sum += o.dod_sigma;
                dod_n += 1;
            }
        }
        println!(
            "{:<12} precision {:.3} recall {:.3} mean DOD {:.3} sigma ({correct} correct, {detections} detected, {truths} true, {empty} without inliers, p/s/c/k {kinds:?}, {:.1}s)",
            name,
            correct as f64 / detections.max(1) as f64,
            correct as f64 / truths.max(1) as f64,
            dod_sum / dod_n.max(1) as f64,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
