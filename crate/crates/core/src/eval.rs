//! Detection quality: coverage curves, data-aware object distance and
//! SegComp-style correspondence scores.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::GroundTruth;
use crate::detector::DetectionReport;
use crate::geometry::{PointCloud, Primitive, PrimitiveKind, Vec3};

/// Error of a point when nothing was detected.
pub const NO_PRIMITIVE: f64 = f64::INFINITY;

/// Default correspondence threshold.
pub const SEGCOMP_THRESHOLD: f64 = 0.6;

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// 100 samples from 1e-4 to 0.1, as fractions of the scene diameter.
pub fn default_epsilon_grid() -> Vec<f64> {
    log_grid(1e-4, 0.1, 100)
}

/// `e_i = min_k |d(p_i, O_k)|`.
pub fn point_errors(cloud: &PointCloud, primitives: &[Primitive]) -> Vec<f64> {
    cloud
        .points()
        .par_iter()
        .map(|p| {
            primitives
                .iter()
                .map(|o| o.signed_distance(&p.position).abs())
                .fold(NO_PRIMITIVE, f64::min)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub epsilons: Vec<f64>,
    pub coverage: Vec<f64>,
    /// Mean of the underlying errors (`NaN` for an empty curve).
    pub mean_error: f64,
}

impl CoverageCurve {
    pub fn is_empty(&self) -> bool {
        self.coverage.is_empty()
    }
}

/// Fraction of errors strictly below each `ε`.
pub fn p_coverage(errors: &[f64], grid: &[f64]) -> CoverageCurve {
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    let coverage = grid.iter().map(|&eps| sorted.partition_point(|&e| e < eps) as f64 / n).collect();
    let mean_error = errors.iter().sum::<f64>() / errors.len() as f64;
    CoverageCurve { epsilons: grid.to_vec(), coverage, mean_error }
}

/// Unweighted mean of per-primitive coverage curves, each over that
/// primitive's inliers and their distance to it. Primitives without
/// inliers are skipped; without any primitive the curve is empty.
pub fn s_coverage(cloud: &PointCloud, primitives: &[Primitive], labels: &[Option<usize>], grid: &[f64]) -> CoverageCurve {
    let mut per: Vec<Vec<f64>> = vec![Vec::new(); primitives.len()];
    for (p, l) in cloud.points().iter().zip(labels) {
        if let Some(k) = *l {
            per[k].push(primitives[k].signed_distance(&p.position).abs());
        }
    }
    let curves: Vec<CoverageCurve> = per.iter().filter(|e| !e.is_empty()).map(|e| p_coverage(e, grid)).collect();
    if curves.is_empty() {
        return CoverageCurve { epsilons: Vec::new(), coverage: Vec::new(), mean_error: f64::NAN };
    }
    let m = curves.len() as f64;
    let coverage = (0..grid.len()).map(|i| curves.iter().map(|c| c.coverage[i]).sum::<f64>() / m).collect();
    let mean_error = curves.iter().map(|c| c.mean_error).sum::<f64>() / m;
    CoverageCurve { epsilons: grid.to_vec(), coverage, mean_error }
}

/// Data-aware object distance: mean distance between the projections of
/// `points` onto `gt` and onto `det`.
pub fn dod<'a>(gt: &Primitive, det: &Primitive, points: impl IntoIterator<Item = &'a Vec3>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for p in points {
        sum += (gt.project(p) - det.project(p)).norm();
        n += 1;
    }
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PrReport {
    pub precision: f64,
    pub recall: f64,
    pub missed_rate: f64,
    pub noise_rate: f64,
    pub threshold: f64,
    pub detections: usize,
    pub ground_truth: usize,
    pub correct: usize,
    pub over_segmented: usize,
    pub under_segmented: usize,
    pub missed: usize,
    pub noise: usize,
    /// One-to-one correct correspondences as `(ground truth, detection)`.
    pub matches: Vec<(usize, usize)>,
}

/// Label overlap between two segmentations of the same cloud.
struct Overlap {
    counts: Vec<Vec<usize>>,
    gt_sizes: Vec<usize>,
    det_sizes: Vec<usize>,
}

impl Overlap {
    fn new(gt: &[Option<usize>], n_gt: usize, det: &[Option<usize>], n_det: usize) -> Self {
        assert_eq!(gt.len(), det.len(), "label sets must cover the same cloud");
        let mut counts = vec![vec![0usize; n_det]; n_gt];
        let mut gt_sizes = vec![0; n_gt];
        let mut det_sizes = vec![0; n_det];
        for (g, d) in gt.iter().zip(det) {
            if let Some(g) = *g {
                gt_sizes[g] += 1;
            }
            if let Some(d) = *d {
                det_sizes[d] += 1;
            }
            if let (Some(g), Some(d)) = (*g, *d) {
                counts[g][d] += 1;
            }
        }
        Self { counts, gt_sizes, det_sizes }
    }

    fn covers(part: usize, whole: usize, t: f64) -> bool {
        whole > 0 && part as f64 >= t * whole as f64
    }

    fn correspond(&self, g: usize, d: usize, t: f64) -> bool {
        let o = self.counts[g][d];
        o > 0 && Self::covers(o, self.gt_sizes[g], t) && Self::covers(o, self.det_sizes[d], t)
    }
}

/// Greedy one-to-one correspondence on descending overlap. A pair
/// corresponds when each covers at least `t` of the other's points.
pub fn correspondences(gt: &[Option<usize>], n_gt: usize, det: &[Option<usize>], n_det: usize, t: f64) -> Vec<(usize, usize)> {
    greedy(&Overlap::new(gt, n_gt, det, n_det), t)
}

fn greedy(ov: &Overlap, t: f64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (g, row) in ov.counts.iter().enumerate() {
        for (d, &o) in row.iter().enumerate() {
            if ov.correspond(g, d, t) {
                pairs.push((o, g, d));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut gt_used, mut det_used) = (vec![false; ov.gt_sizes.len()], vec![false; ov.det_sizes.len()]);
    let mut out = Vec::new();
    for (_, g, d) in pairs {
        if !gt_used[g] && !det_used[d] {
            gt_used[g] = true;
            det_used[d] = true;
            out.push((g, d));
        }
    }
    out.sort_unstable();
    out
}

/// SegComp categories at threshold `t`: correct, over-segmented (one ground
/// truth object split across several detections), under-segmented (one
/// detection spanning several objects), missed and noise. Rates are
/// normalized by the number of detections or ground-truth objects.
pub fn match_and_score(gt: &[Option<usize>], n_gt: usize, det: &[Option<usize>], n_det: usize, t: f64) -> PrReport {
    let ov = Overlap::new(gt, n_gt, det, n_det);
    let matches = greedy(&ov, t);
    let mut gt_done = vec![false; n_gt];
    let mut det_done = vec![false; n_det];
    for &(g, d) in &matches {
        gt_done[g] = true;
        det_done[d] = true;
    }

    // Over-segmentation: detections mostly inside g that jointly cover g.
    let mut over = 0;
    for g in 0..n_gt {
        if gt_done[g] {
            continue;
        }
        let parts: Vec<usize> = (0..n_det)
            .filter(|&d| !det_done[d] && Overlap::covers(ov.counts[g][d], ov.det_sizes[d], t) && ov.counts[g][d] > 0)
            .collect();
        let covered: usize = parts.iter().map(|&d| ov.counts[g][d]).sum();
        if parts.len() >= 2 && Overlap::covers(covered, ov.gt_sizes[g], t) {
            over += 1;
            gt_done[g] = true;
            for d in parts {
                det_done[d] = true;
            }
        }
    }
    // Under-segmentation: objects mostly inside d that jointly cover d.
    let mut under = 0;
    for d in 0..n_det {
        if det_done[d] {
            continue;
        }
        let parts: Vec<usize> = (0..n_gt)
            .filter(|&g| !gt_done[g] && Overlap::covers(ov.counts[g][d], ov.gt_sizes[g], t) && ov.counts[g][d] > 0)
            .collect();
        let covered: usize = parts.iter().map(|&g| ov.counts[g][d]).sum();
        if parts.len() >= 2 && Overlap::covers(covered, ov.det_sizes[d], t) {
            under += 1;
            det_done[d] = true;
            for g in parts {
                gt_done[g] = true;
            }
        }
    }

    let correct = matches.len();
    let missed = gt_done.iter().filter(|x| !**x).count();
    let noise = det_done.iter().filter(|x| !**x).count();
    let rate = |k: usize, n: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    PrReport {
        precision: rate(correct, n_det),
        recall: rate(correct, n_gt),
        missed_rate: rate(missed, n_gt),
        noise_rate: rate(noise, n_det),
        threshold: t,
        detections: n_det,
        ground_truth: n_gt,
        correct,
        over_segmented: over,
        under_segmented: under,
        missed,
        noise,
        matches,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectDistance {
    pub ground_truth: usize,
    pub detection: usize,
    #[serde(rename = "type")]
    pub kind: PrimitiveKind,
    /// Absolute distance.
    pub dod: f64,
    /// In multiples of the noise standard deviation (`NaN` without noise).
    pub dod_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub scores: PrReport,
    pub object_distances: Vec<ObjectDistance>,
    pub mean_dod_sigma: f64,
    /// Curves over `ε` given as fractions of the scene diameter.
    pub p_coverage: CoverageCurve,
    pub s_coverage: CoverageCurve,
}

/// Scores a detection against the ground truth of the same cloud. DOD is
/// computed for each one-to-one correspondence over the ground-truth
/// object's points.
pub fn evaluate(cloud: &PointCloud, truth: &GroundTruth, report: &DetectionReport, threshold: f64) -> Evaluation {
    let gt_labels: Vec<Option<usize>> = truth.labels.iter().map(|&l| Some(l)).collect();
    let scores = match_and_score(&gt_labels, truth.primitives.len(), &report.labels, report.primitives.len(), threshold);
    let sigma = truth.noise_sigma * truth.diameter;
    let object_distances: Vec<ObjectDistance> = scores
        .matches
        .iter()
        .map(|&(g, d)| {
            let pts = cloud.points().iter().zip(&truth.labels).filter(|(_, l)| **l == g).map(|(p, _)| &p.position);
            let value = dod(&truth.primitives[g], &report.primitives[d].primitive, pts);
            ObjectDistance {
                ground_truth: g,
                detection: d,
                kind: truth.primitives[g].kind(),
                dod: value,
                dod_sigma: if sigma > 0.0 { value / sigma } else { f64::NAN },
            }
        })
        .collect();
    let mean_dod_sigma = if object_distances.is_empty() {
        f64::NAN
    } else {
        object_distances.iter().map(|o| o.dod_sigma).sum::<f64>() / object_distances.len() as f64
    };

    let grid = default_epsilon_grid();
    let scale = truth.diameter;
    let shapes: Vec<Primitive> = report.primitives.iter().map(|p| p.primitive).collect();
    let errors: Vec<f64> = point_errors(cloud, &shapes).into_iter().map(|e| e / scale).collect();
    let p = p_coverage(&errors, &grid);
    let mut s = s_coverage(cloud, &shapes, &report.labels, &grid.iter().map(|e| e * scale).collect::<Vec<_>>());
    if !s.is_empty() {
        s.epsilons = grid.clone();
        s.mean_error /= scale;
    }
    Evaluation { scores, object_distances, mean_dod_sigma, p_coverage: p, s_coverage: s }
}
