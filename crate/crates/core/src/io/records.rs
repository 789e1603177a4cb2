//! JSON records for primitives, detection reports and ground truth; CSV
//! tables for labels and coverage curves.
//!
//! Floats are written in shortest round-trip form, so parsing a written file
//! reproduces every value bit for bit.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::{ClipBall, GroundTruth};
use crate::detector::{DetectedPrimitive, DetectionReport, DetectorConfig, Timing};
use crate::error::{Error, Result};
use crate::eval::CoverageCurve;
use crate::geometry::{Cone, Cylinder, Plane, Primitive, Sphere, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PrimitiveRecord {
    Plane {
        normal: [f64; 3],
        offset: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vote_mass: Option<f64>,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vote_mass: Option<f64>,
    },
    Cylinder {
        axis: [f64; 3],
        foot: [f64; 3],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vote_mass: Option<f64>,
    },
    Cone {
        apex: [f64; 3],
        axis: [f64; 3],
        opening_angle_rad: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vote_mass: Option<f64>,
    },
}

impl PrimitiveRecord {
    pub fn new(primitive: &Primitive, vote_mass: Option<f64>) -> Self {
        let a = |v: &Vec3| [v.x, v.y, v.z];
        match primitive {
            Primitive::Plane(p) => PrimitiveRecord::Plane { normal: a(&p.normal), offset: p.offset, vote_mass },
            Primitive::Sphere(s) => PrimitiveRecord::Sphere { center: a(&s.center), radius: s.radius, vote_mass },
            Primitive::Cylinder(c) => {
                PrimitiveRecord::Cylinder { axis: a(&c.axis), foot: a(&c.foot), radius: c.radius, vote_mass }
            }
            Primitive::Cone(k) => {
                PrimitiveRecord::Cone { apex: a(&k.apex), axis: a(&k.axis), opening_angle_rad: k.angle, vote_mass }
            }
        }
    }

    pub fn vote_mass(&self) -> Option<f64> {
        match *self {
            PrimitiveRecord::Plane { vote_mass, .. }
            | PrimitiveRecord::Sphere { vote_mass, .. }
            | PrimitiveRecord::Cylinder { vote_mass, .. }
            | PrimitiveRecord::Cone { vote_mass, .. } => vote_mass,
        }
    }

    /// Rebuilds the primitive exactly as stored and checks its invariants.
    pub fn primitive(&self) -> Result<Primitive> {
        let v = |a: &[f64; 3]| Vec3::from(*a);
        let p = match self {
            PrimitiveRecord::Plane { normal, offset, .. } => Primitive::Plane(Plane { normal: v(normal), offset: *offset }),
            PrimitiveRecord::Sphere { center, radius, .. } => {
                Primitive::Sphere(Sphere { center: v(center), radius: *radius })
            }
            PrimitiveRecord::Cylinder { axis, foot, radius, .. } => {
                Primitive::Cylinder(Cylinder { axis: v(axis), foot: v(foot), radius: *radius })
            }
            PrimitiveRecord::Cone { apex, axis, opening_angle_rad, .. } => {
                Primitive::Cone(Cone { apex: v(apex), axis: v(axis), angle: *opening_angle_rad })
            }
        };
        p.validate()?;
        Ok(p)
    }
}

/// What goes into a report file besides primitives and labels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Stage timings vary between runs; they are left out by default so
    /// equal inputs give byte-identical files.
    pub include_timing: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportJson {
    primitives: Vec<PrimitiveRecord>,
    /// Primitive index per point, −1 when unlabeled.
    labels: Vec<i64>,
    candidate_count: usize,
    config: DetectorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

pub fn report_to_json(report: &DetectionReport, options: ReportOptions) -> Result<String> {
    let json = ReportJson {
        primitives: report.primitives.iter().map(|p| PrimitiveRecord::new(&p.primitive, Some(p.vote_mass))).collect(),
        labels: report.labels.iter().map(|l| l.map_or(-1, |k| k as i64)).collect(),
        candidate_count: report.candidate_count,
        config: report.config.clone(),
        timing: options.include_timing.then_some(report.timing),
    };
    Ok(serde_json::to_string_pretty(&json)?)
}

pub fn report_from_json(text: &str) -> Result<DetectionReport> {
    let json: ReportJson = serde_json::from_str(text)?;
    let primitives = json
        .primitives
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let vote_mass = r.vote_mass().ok_or_else(|| Error::invalid(format!("primitive {i}: missing vote_mass")))?;
            Ok(DetectedPrimitive { primitive: r.primitive()?, vote_mass })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = json
        .labels
        .iter()
        .map(|&l| match l {
            -1 => Ok(None),
            k if k >= 0 && (k as usize) < primitives.len() => Ok(Some(k as usize)),
            k => Err(Error::invalid(format!("label {k} does not name a primitive"))),
        })
        .collect::<Result<Vec<_>>>()?;
    json.config.validate()?;
    Ok(DetectionReport {
        primitives,
        labels,
        config: json.config,
        candidate_count: json.candidate_count,
        timing: json.timing.unwrap_or_default(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthJson {
    primitives: Vec<PrimitiveRecord>,
    clip_balls: Vec<ClipBall>,
    labels: Vec<usize>,
    noise_sigma: f64,
    diameter: f64,
}

pub fn truth_to_json(truth: &GroundTruth) -> Result<String> {
    let json = TruthJson {
        primitives: truth.primitives.iter().map(|p| PrimitiveRecord::new(p, None)).collect(),
        clip_balls: truth.clip_balls.clone(),
        labels: truth.labels.clone(),
        noise_sigma: truth.noise_sigma,
        diameter: truth.diameter,
    };
    Ok(serde_json::to_string_pretty(&json)?)
}

pub fn truth_from_json(text: &str) -> Result<GroundTruth> {
    let json: TruthJson = serde_json::from_str(text)?;
    let primitives = json.primitives.iter().map(PrimitiveRecord::primitive).collect::<Result<Vec<_>>>()?;
    if json.clip_balls.len() != primitives.len() {
        return Err(Error::invalid("clip_balls and primitives differ in length"));
    }
    if let Some(l) = json.labels.iter().find(|&&l| l >= primitives.len()) {
        return Err(Error::invalid(format!("label {l} does not name a primitive")));
    }
    Ok(GroundTruth {
        primitives,
        clip_balls: json.clip_balls,
        labels: json.labels,
        noise_sigma: json.noise_sigma,
        diameter: json.diameter,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_report(path: &Path, report: &DetectionReport, options: ReportOptions) -> Result<()> {
    write_text(path, &report_to_json(report, options)?)
}

pub fn read_report(path: &Path) -> Result<DetectionReport> {
    report_from_json(&read_text(path)?)
}

pub fn write_ground_truth(path: &Path, truth: &GroundTruth) -> Result<()> {
    write_text(path, &truth_to_json(truth)?)
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    truth_from_json(&read_text(path)?)
}

/// `point,label` rows with −1 for unlabeled points.
pub fn write_labels_csv(path: &Path, labels: &[Option<usize>]) -> Result<()> {
    let mut out = String::from("point,label\n");
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", l.map_or(-1, |k| k as i64)));
    }
    write_text(path, &out)
}

/// `epsilon,p,s` rows; `s` is empty when the s-coverage curve is.
pub fn write_curves_csv(path: &Path, p: &CoverageCurve, s: &CoverageCurve) -> Result<()> {
    let mut out = Vec::new();
    let io = |e| Error::io(path, e);
    writeln!(out, "epsilon,p,s").map_err(io)?;
    for (i, eps) in p.epsilons.iter().enumerate() {
        match s.coverage.get(i) {
            Some(sv) => writeln!(out, "{eps},{},{sv}", p.coverage[i]),
            None => writeln!(out, "{eps},{},", p.coverage[i]),
        }
        .map_err(io)?;
    }
    std::fs::write(path, out).map_err(io)
}
