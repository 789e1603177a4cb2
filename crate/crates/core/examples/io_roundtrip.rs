//! Writes a cloud in every supported format and reads each back.
//!
//! cargo run --release --example io_roundtrip -- /tmp/io

use std::path::PathBuf;

use hough_prims::datagen::{generate_scene, SceneSpec};
use hough_prims::io::{read_cloud, write_cloud, CloudFileFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "io".into()));
    std::fs::create_dir_all(&dir)?;
    let (cloud, _) = generate_scene(&SceneSpec { noise_sigma: 0.002, ..SceneSpec::default() })?;

    for (name, format) in [
        ("binary.ply", CloudFileFormat::PlyBinaryLittleEndian),
        ("ascii.ply", CloudFileFormat::PlyAscii),
        ("cloud.xyzn", CloudFileFormat::Xyzn),
    ] {
        let path = dir.join(name);
        write_cloud(&path, &cloud, format)?;
        let back = read_cloud(&path)?;
        let worst = cloud
            .points()
            .iter()
            .zip(back.points())
            .map(|(a, b)| (a.position - b.position).norm().max((a.normal - b.normal).norm()))
            .fold(0.0, f64::max);
        let bytes = std::fs::metadata(&path)?.len();
        println!("{name:11} {bytes:9} bytes, {} points, max deviation {worst:.1e}", back.len());
    }
    Ok(())
}
