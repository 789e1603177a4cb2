//! File formats: point clouds (PLY, XYZN), JSON records for primitives,
//! detection reports and ground truth, and CSV tables.

mod ply;
mod records;
mod xyzn;

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{OrientedPoint, PointCloud, Vec3};

pub use ply::{read_ply, write_ply, PlyEncoding};
pub use records::{
    read_ground_truth, read_report, report_from_json, report_to_json, truth_from_json, truth_to_json,
    write_curves_csv, write_ground_truth, write_labels_csv, write_report, PrimitiveRecord, ReportOptions,
};
pub use xyzn::{read_xyzn, write_xyzn};

/// Normals farther than this from unit length are rejected instead of
/// renormalized.
pub const NORMAL_LENGTH_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudFileFormat {
    PlyAscii,
    PlyBinaryLittleEndian,
    Xyzn,
}

impl CloudFileFormat {
    /// `.ply` files are written as binary; anything else as XYZN.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("ply") => CloudFileFormat::PlyBinaryLittleEndian,
            _ => CloudFileFormat::Xyzn,
        }
    }
}

pub(crate) fn oriented_point(v: [f64; 6]) -> std::result::Result<OrientedPoint, String> {
    let position = Vec3::new(v[0], v[1], v[2]);
    let normal = Vec3::new(v[3], v[4], v[5]);
    if !v.iter().all(|x| x.is_finite()) {
        return Err("non-finite value".into());
    }
    let len = normal.norm();
    if (len - 1.0).abs() > NORMAL_LENGTH_TOLERANCE {
        return Err(format!("normal length {len} is not within {NORMAL_LENGTH_TOLERANCE} of 1"));
    }
    Ok(OrientedPoint { position, normal: normal / len })
}

/// Reads a cloud; PLY encodings are detected from the header.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let points = match CloudFileFormat::from_path(path) {
        CloudFileFormat::Xyzn => read_xyzn(path)?,
        _ => read_ply(path)?,
    };
    PointCloud::new(points).map_err(|e| match e {
        Error::InvalidInput(m) => Error::Format { path: path.to_path_buf(), message: m },
        other => other,
    })
}

pub fn write_cloud(path: &Path, cloud: &PointCloud, format: CloudFileFormat) -> Result<()> {
    match format {
        CloudFileFormat::PlyAscii => write_ply(path, cloud.points(), PlyEncoding::Ascii),
        CloudFileFormat::PlyBinaryLittleEndian => write_ply(path, cloud.points(), PlyEncoding::BinaryLittleEndian),
        CloudFileFormat::Xyzn => write_xyzn(path, cloud.points()),
    }
}
