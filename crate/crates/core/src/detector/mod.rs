//! Semi-global primitive detection.
//!
//! For each sampled reference point the pairs it forms with random partners
//! vote into private accumulators; the strongest extraction becomes a
//! candidate anchored at that reference point. Candidates of the same
//! surface are then merged by weighted averaging and every point of the
//! cloud is assigned to the closest compatible primitive.

mod cluster;
mod voting;

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accumulator::ExtractionRule;
use crate::error::{Error, Result};
use crate::geometry::{OrientedPoint, PointCloud, Primitive, PrimitiveKind};
use crate::ppf::{ReferenceFrame, Tolerances};

pub use cluster::{cluster, MergeTest};
pub use voting::{TypedExtraction, VoteOutcome, VotingSpace};

/// Ranking of per-type extractions when one candidate is kept per reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeSelection {
    /// Mass of the maximal bin alone. Interpolation and constraint weights
    /// make the expected per-bin contribution equal across types.
    #[default]
    PeakBin,
    /// Mass of the maximal bin and its neighborhood.
    NeighborhoodMass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub n_reference: usize,
    pub n_pair: usize,
    /// Radians; sets the cylinder angle bins and the hemisphere cell size.
    pub angle_bin: f64,
    /// Radius and axis-distance bin width as a fraction of the scene diameter.
    pub radius_bin_fraction: f64,
    pub radius_bin_count: usize,
    pub max_pair_distance_fraction: f64,
    /// Extractions need strictly more neighborhood mass than this.
    pub min_votes: f64,
    pub cluster_dist_fraction: f64,
    /// Radians.
    pub cluster_angle: f64,
    /// Inlier distance bound as a fraction of the scene diameter.
    pub inlier_dist_fraction: f64,
    /// Primitives left with fewer inliers are dropped and the remaining
    /// ones relabeled; 0 keeps everything.
    pub min_inliers: usize,
    pub tolerances: Tolerances,
    pub enabled_types: Vec<PrimitiveKind>,
    pub use_vote_spreading: bool,
    pub use_bin_averaging: bool,
    pub use_cluster_averaging: bool,
    /// Keep one candidate per type and reference instead of one per reference.
    pub per_type_extraction: bool,
    pub type_selection: TypeSelection,
    /// Bin-averaging window radius in bins.
    pub neighborhood: usize,
    pub rng_seed: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        let angle_bin = 10f64.to_radians();
        Self {
            n_reference: 2048,
            n_pair: 2048,
            angle_bin,
            radius_bin_fraction: 0.005,
            radius_bin_count: 40,
            max_pair_distance_fraction: 0.2,
            min_votes: 8.0,
            cluster_dist_fraction: 0.01,
            cluster_angle: 20f64.to_radians(),
            inlier_dist_fraction: 0.01,
            min_inliers: 1,
            tolerances: Tolerances::uniform(angle_bin),
            enabled_types: PrimitiveKind::ALL.to_vec(),
            use_vote_spreading: true,
            use_bin_averaging: true,
            use_cluster_averaging: true,
            per_type_extraction: false,
            type_selection: TypeSelection::default(),
            neighborhood: 1,
            rng_seed: 0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let fraction = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be in (0, 1], got {v}")))
            }
        };
        let angle = |name: &str, v: f64| {
            if v > 0.0 && v < FRAC_PI_2 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be in (0, π/2) radians, got {v}")))
            }
        };
        if self.n_reference == 0 || self.n_pair == 0 || self.radius_bin_count == 0 {
            return Err(Error::invalid("n_reference, n_pair and radius_bin_count must be positive"));
        }
        fraction("radius_bin_fraction", self.radius_bin_fraction)?;
        fraction("max_pair_distance_fraction", self.max_pair_distance_fraction)?;
        fraction("cluster_dist_fraction", self.cluster_dist_fraction)?;
        fraction("inlier_dist_fraction", self.inlier_dist_fraction)?;
        angle("angle_bin", self.angle_bin)?;
        angle("cluster_angle", self.cluster_angle)?;
        if !self.tolerances.is_valid() {
            return Err(Error::invalid("tolerances must be in (0, π/2) radians"));
        }
        if self.enabled_types.is_empty() {
            return Err(Error::invalid("enabled_types must not be empty"));
        }
        if !(self.min_votes >= 0.0) {
            return Err(Error::invalid("min_votes must be non-negative"));
        }
        Ok(())
    }

    /// The set of enabled types, deduplicated and in canonical order.
    pub fn enabled(&self) -> BTreeSet<PrimitiveKind> {
        self.enabled_types.iter().copied().collect()
    }

    pub fn extraction_rule(&self) -> ExtractionRule {
        ExtractionRule {
            neighborhood: self.neighborhood,
            bin_averaging: self.use_bin_averaging,
            min_mass: self.min_votes,
        }
    }

    /// Merge test with distances scaled by `diameter`.
    pub fn merge_test(&self, diameter: f64) -> MergeTest {
        MergeTest { distance: self.cluster_dist_fraction * diameter, angle: self.cluster_angle }
    }
}

/// A primitive extracted at one reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub primitive: Primitive,
    pub reference: OrientedPoint,
    pub vote_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectedPrimitive {
    pub primitive: Primitive,
    pub vote_mass: f64,
}

/// Wall-clock milliseconds per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub voting_ms: f64,
    pub clustering_ms: f64,
    pub inliers_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionReport {
    pub primitives: Vec<DetectedPrimitive>,
    /// Per point: index into `primitives`, or `None`.
    pub labels: Vec<Option<usize>>,
    pub config: DetectorConfig,
    /// Candidates before clustering.
    pub candidate_count: usize,
    pub timing: Timing,
}

impl DetectionReport {
    pub fn inlier_count(&self, primitive: usize) -> usize {
        self.labels.iter().filter(|l| **l == Some(primitive)).count()
    }
}

/// How reference points are distributed over threads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Rayon's current thread pool.
    #[default]
    Parallel,
}

/// Runs detection on the current rayon pool.
pub fn detect(cloud: &PointCloud, config: &DetectorConfig) -> Result<DetectionReport> {
    detect_with(cloud, config, Execution::Parallel)
}

/// Runs detection; serial and parallel execution give identical reports
/// apart from timing.
pub fn detect_with(cloud: &PointCloud, config: &DetectorConfig, execution: Execution) -> Result<DetectionReport> {
    config.validate()?;
    if cloud.len() < 2 {
        return Err(Error::invalid("detection needs at least two points"));
    }
    let start = Instant::now();
    let diameter = cloud.diameter();
    if !(diameter > 0.0) {
        return Err(Error::invalid("all points coincide"));
    }

    let candidates = collect_candidates(cloud, config, diameter, execution);
    let voted = Instant::now();

    let clustered = cluster(&candidates, &config.merge_test(diameter), config.use_cluster_averaging);
    let mut primitives: Vec<DetectedPrimitive> = clustered
        .iter()
        .map(|c| DetectedPrimitive { primitive: c.primitive, vote_mass: c.vote_mass })
        .collect();
    let clustered_at = Instant::now();

    let mut labels;
    loop {
        let shapes: Vec<Primitive> = primitives.iter().map(|p| p.primitive).collect();
        labels = assign_inliers_with(cloud, &shapes, config, diameter, execution);
        let mut counts = vec![0usize; primitives.len()];
        for &k in labels.iter().flatten() {
            counts[k] += 1;
        }
        if counts.iter().all(|&c| c >= config.min_inliers) {
            break;
        }
        // Removing a primitive can hand its neighbors new points, so relabel.
        let mut keep = counts.iter().map(|&c| c >= config.min_inliers);
        primitives.retain(|_| keep.next().unwrap_or(false));
    }
    let end = Instant::now();

    let ms = |a: Instant, b: Instant| (b - a).as_secs_f64() * 1e3;
    Ok(DetectionReport {
        primitives,
        labels,
        config: config.clone(),
        candidate_count: candidates.len(),
        timing: Timing {
            voting_ms: ms(start, voted),
            clustering_ms: ms(voted, clustered_at),
            inliers_ms: ms(clustered_at, end),
            total_ms: ms(start, end),
        },
    })
}

/// Candidates of every reference point in reference order, before
/// clustering.
pub fn candidates(cloud: &PointCloud, config: &DetectorConfig, execution: Execution) -> Result<Vec<Candidate>> {
    config.validate()?;
    Ok(collect_candidates(cloud, config, cloud.diameter(), execution))
}

/// Sorted reference indices: every point when the cloud is small, otherwise
/// a uniform sample without replacement.
fn reference_indices(n: usize, config: &DetectorConfig) -> Vec<usize> {
    if config.n_reference >= n {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut idx = index::sample(&mut rng, n, config.n_reference).into_vec();
    idx.sort_unstable();
    idx
}

fn collect_candidates(
    cloud: &PointCloud,
    config: &DetectorConfig,
    diameter: f64,
    execution: Execution,
) -> Vec<Candidate> {
    let refs = reference_indices(cloud.len(), config);
    let proto = VotingSpace::new(config, diameter);
    let rule = config.extraction_rule();
    let run = |space: &mut VotingSpace, (slot, &r): (usize, &usize)| {
        candidates_for_reference(cloud, config, diameter, &rule, space, slot as u64, r)
    };
    let per_ref: Vec<Vec<Candidate>> = match execution {
        Execution::Serial => {
            let mut space = proto.clone();
            refs.iter().enumerate().map(|e| run(&mut space, e)).collect()
        }
        Execution::Parallel => refs
            .par_iter()
            .enumerate()
            .map_init(|| proto.clone(), run)
            .collect(),
    };
    per_ref.into_iter().flatten().collect()
}

fn candidates_for_reference(
    cloud: &PointCloud,
    config: &DetectorConfig,
    diameter: f64,
    rule: &ExtractionRule,
    space: &mut VotingSpace,
    stream: u64,
    r: usize,
) -> Vec<Candidate> {
    let reference = cloud.points()[r];
    let frame = vote_reference(cloud, config, diameter, space, stream, r);
    let extractions = space.extract(&frame, rule);
    let to_candidate = |e: &TypedExtraction| Candidate { primitive: e.primitive, reference, vote_mass: e.mass };
    if config.per_type_extraction {
        return extractions.iter().map(to_candidate).collect();
    }
    let key = |e: &TypedExtraction| match config.type_selection {
        TypeSelection::PeakBin => e.peak,
        TypeSelection::NeighborhoodMass => e.mass,
    };
    // First maximum in type order wins ties.
    let mut best: Option<&TypedExtraction> = None;
    for e in &extractions {
        if best.is_none_or(|b| key(e) > key(b)) {
            best = Some(e);
        }
    }
    best.map(to_candidate).into_iter().collect()
}

/// Resets `space` and casts every pair of reference point `r`. Partners are
/// drawn with replacement from a stream keyed by the reference slot; clouds no
/// larger than `n_pair` pair every point once instead.
fn vote_reference(
    cloud: &PointCloud,
    config: &DetectorConfig,
    diameter: f64,
    space: &mut VotingSpace,
    stream: u64,
    r: usize,
) -> ReferenceFrame {
    let points = cloud.points();
    let reference = points[r];
    let frame = ReferenceFrame::new(reference.position, reference.normal);
    let max_d2 = (config.max_pair_distance_fraction * diameter).powi(2);

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(stream + 1);
    space.reset();
    let mut cast = |i: usize| {
        let partner = &points[i];
        if i != r && (partner.position - reference.position).norm_squared() <= max_d2 {
            space.vote_pair(&frame, &partner.position, &partner.normal);
        }
    };
    if config.n_pair >= points.len() {
        (0..points.len()).for_each(&mut cast);
    } else {
        for _ in 0..config.n_pair {
            cast(rng.random_range(0..points.len()));
        }
    }
    frame
}

/// The accumulators of reference slot `slot` exactly as the detector fills
/// them, together with the reference point.
pub fn reference_votes(cloud: &PointCloud, config: &DetectorConfig, slot: usize) -> Result<(OrientedPoint, VotingSpace)> {
    config.validate()?;
    let refs = reference_indices(cloud.len(), config);
    let &r = refs.get(slot).ok_or_else(|| Error::invalid(format!("reference slot {slot} out of {}", refs.len())))?;
    let diameter = cloud.diameter();
    let mut space = VotingSpace::new(config, diameter);
    vote_reference(cloud, config, diameter, &mut space, slot as u64, r);
    Ok((cloud.points()[r], space))
}

/// Labels every point with the primitive of smallest absolute distance when
/// that distance is below the inlier bound and the normals agree within the
/// clustering angle. Ties within 1e-12 go to the lower index.
pub fn assign_inliers(cloud: &PointCloud, primitives: &[Primitive], config: &DetectorConfig) -> Vec<Option<usize>> {
    assign_inliers_with(cloud, primitives, config, cloud.diameter(), Execution::Parallel)
}

fn assign_inliers_with(
    cloud: &PointCloud,
    primitives: &[Primitive],
    config: &DetectorConfig,
    diameter: f64,
    execution: Execution,
) -> Vec<Option<usize>> {
    let bound = config.inlier_dist_fraction * diameter;
    let cos_bound = config.cluster_angle.cos();
    let label = |p: &OrientedPoint| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, prim) in primitives.iter().enumerate() {
            let d = prim.signed_distance(&p.position).abs();
            if best.is_none_or(|(_, bd)| d < bd - 1e-12) {
                best = Some((k, d));
            }
        }
        let (k, d) = best?;
        if d >= bound {
            return None;
        }
        let g = primitives[k].surface_normal_at(&p.position).direction;
        (p.normal.dot(&g) > cos_bound).then_some(k)
    };
    match execution {
        Execution::Serial => cloud.points().iter().map(label).collect(),
        Execution::Parallel => cloud.points().par_iter().map(label).collect(),
    }
}
