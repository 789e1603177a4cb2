//! Votes one reference point of a generated scene and prints the strongest
//! bins of each accumulator, then writes them as CSV.
//!
//! cargo run --release --example accumulator_dump -- /tmp/acc 0

use std::path::PathBuf;

use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::detector::{reference_votes, DetectorConfig};
use hough_prims::ppf::ReferenceFrame;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "accumulators".into()));
    let slot: usize = args.next().map_or(0, |s| s.parse().expect("slot"));

    let spec = SceneSpec {
        primitive_counts: PrimitiveCounts { sphere: 2, cylinder: 2, ..PrimitiveCounts::default() },
        noise_sigma: 0.002,
        size_range: [0.05, 0.1],
        rng_seed: 2,
        ..SceneSpec::default()
    };
    let (cloud, _) = generate_scene(&spec)?;
    let config = DetectorConfig::default();
    let (reference, space) = reference_votes(&cloud, &config, slot)?;
    println!("reference {:.3?} normal {:.3?}", reference.position.as_slice(), reference.normal.as_slice());
    println!(
        "mass plane {:.1} sphere {:.1} cylinder {:.1} cone {:.1}",
        space.plane.total(),
        space.sphere.total(),
        space.cylinder.total(),
        space.cone.total()
    );
    let frame = ReferenceFrame::new(reference.position, reference.normal);
    for e in space.extract(&frame, &config.extraction_rule()) {
        println!("{:8} mass {:7.2} peak {:6.2}", e.primitive.kind().name(), e.mass, e.peak);
    }

    std::fs::create_dir_all(&dir)?;
    let csv = |name: &str, write: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> std::io::Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        std::fs::write(dir.join(name), buf)
    };
    csv("plane.csv", &|w| space.plane.write_csv(w))?;
    csv("sphere.csv", &|w| space.sphere.write_csv(w))?;
    csv("cylinder.csv", &|w| space.cylinder.write_csv(w))?;
    csv("cone.csv", &|w| space.cone.write_csv(w))?;
    println!("wrote {}", dir.display());
    Ok(())
}
