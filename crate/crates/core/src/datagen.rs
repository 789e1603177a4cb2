//! Synthetic scenes: analytic primitives seen by a pinhole depth camera.
//!
//! Each primitive is visible only inside a clip ball, so cylinders, cones and
//! planes render as finite patches. Every pixel ray keeps its nearest
//! front-facing hit; positions then receive Gaussian noise scaled by the
//! diameter of the noiseless cloud, while normals stay exact.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    fallback_perpendicular, scene_diameter, Cone, Cylinder, OrientedPoint, Plane, PointCloud, Primitive,
    PrimitiveKind, Sphere, Vec3,
};

/// Noise is truncated at this many standard deviations.
pub const NOISE_TRUNCATION: f64 = 4.0;

/// Roots closer than this to the ray origin are ignored.
const MIN_T: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrimitiveCounts {
    pub plane: usize,
    pub sphere: usize,
    pub cylinder: usize,
    pub cone: usize,
}

impl PrimitiveCounts {
    pub fn total(&self) -> usize {
        self.plane + self.sphere + self.cylinder + self.cone
    }

    pub fn only(kind: PrimitiveKind, n: usize) -> Self {
        let mut c = Self::default();
        match kind {
            PrimitiveKind::Plane => c.plane = n,
            PrimitiveKind::Sphere => c.sphere = n,
            PrimitiveKind::Cylinder => c.cylinder = n,
            PrimitiveKind::Cone => c.cone = n,
        }
        c
    }

    fn kinds(&self) -> Vec<PrimitiveKind> {
        let mut out = Vec::with_capacity(self.total());
        for (kind, n) in [
            (PrimitiveKind::Plane, self.plane),
            (PrimitiveKind::Sphere, self.sphere),
            (PrimitiveKind::Cylinder, self.cylinder),
            (PrimitiveKind::Cone, self.cone),
        ] {
            out.extend(std::iter::repeat_n(kind, n));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Camera {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    pub up: [f64; 3],
    /// Vertical field of view in degrees.
    pub fov_deg: f64,
}

impl Default for Camera {
    fn default() -> Self {
        Self { position: [0.0, 0.0, -4.0], look_at: [0.0; 3], up: [0.0, 1.0, 0.0], fov_deg: 40.0 }
    }
}

/// Direction of the positional noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDirection {
    /// Along the exact surface normal: the residual equals the noise sample.
    #[default]
    Normal,
    /// Along the pixel ray (depth noise).
    Ray,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub primitive_counts: PrimitiveCounts,
    /// Noise standard deviation as a fraction of the scene diameter.
    pub noise_sigma: f64,
    pub noise_direction: NoiseDirection,
    /// Standard deviation of an angular perturbation of the normals, degrees.
    pub normal_jitter_deg: f64,
    pub width: usize,
    pub height: usize,
    pub camera: Camera,
    /// Primitive centers are drawn uniformly in `[−h, h]³`.
    pub box_half_extent: f64,
    /// Primitive size (radius, or radius at the patch center) as fractions
    /// of the box diagonal.
    pub size_range: [f64; 2],
    /// Cone half opening angles in degrees.
    pub cone_angle_range_deg: [f64; 2],
    /// Clip-ball radius of planes, cylinders and cones relative to their
    /// size; cone balls never reach past the apex.
    pub patch_extent: f64,
    /// Reject placements whose clip balls intersect (best effort).
    pub separate: bool,
    pub rng_seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            primitive_counts: PrimitiveCounts { sphere: 1, ..PrimitiveCounts::default() },
            noise_sigma: 0.0,
            noise_direction: NoiseDirection::default(),
            normal_jitter_deg: 0.0,
            width: 400,
            height: 400,
            camera: Camera::default(),
            box_half_extent: 1.0,
            size_range: [0.02, 0.2],
            cone_angle_range_deg: [20.0, 50.0],
            patch_extent: 2.5,
            separate: true,
            rng_seed: 0,
        }
    }
}

pub const MAX_PRIMITIVES: usize = 20;
pub const MAX_PIXELS: usize = 160_000;

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.primitive_counts.total();
        if !(1..=MAX_PRIMITIVES).contains(&n) {
            return Err(Error::invalid(format!("scene needs 1 to {MAX_PRIMITIVES} primitives, got {n}")));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be a non-negative number"));
        }
        if !(self.normal_jitter_deg >= 0.0 && self.normal_jitter_deg.is_finite()) {
            return Err(Error::invalid("normal_jitter_deg must be a non-negative number"));
        }
        if self.width == 0 || self.height == 0 || self.width * self.height > MAX_PIXELS {
            return Err(Error::invalid(format!("resolution must be non-empty with at most {MAX_PIXELS} pixels")));
        }
        if !(self.camera.fov_deg > 0.0 && self.camera.fov_deg < 180.0) {
            return Err(Error::invalid("fov_deg must be in (0, 180)"));
        }
        let [lo, hi] = self.size_range;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::invalid("size_range must satisfy 0 < lo ≤ hi"));
        }
        let [a, b] = self.cone_angle_range_deg;
        if !(a > 0.0 && a <= b && b < 90.0) {
            return Err(Error::invalid("cone_angle_range_deg must satisfy 0 < lo ≤ hi < 90"));
        }
        if !(self.box_half_extent > 0.0 && self.patch_extent > 1.0) {
            return Err(Error::invalid("box_half_extent must be positive and patch_extent above 1"));
        }
        Ok(())
    }
}

/// Region in which a primitive's surface is visible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipBall {
    pub center: [f64; 3],
    pub radius: f64,
}

impl ClipBall {
    fn contains(&self, p: &Vec3) -> bool {
        (p - Vec3::from(self.center)).norm_squared() <= self.radius * self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub primitives: Vec<Primitive>,
    pub clip_balls: Vec<ClipBall>,
    /// Per point: index into `primitives`.
    pub labels: Vec<usize>,
    /// Fraction of the scene diameter.
    pub noise_sigma: f64,
    /// Diameter of the noiseless cloud.
    pub diameter: f64,
}

/// A ray-surface intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    pub normal: Vec3,
}

/// Intersection parameters in ascending order, at most two.
fn roots(origin: &Vec3, dir: &Vec3, primitive: &Primitive) -> ([f64; 2], usize) {
    // a t² + 2 b t + c = 0
    let quadratic = |a: f64, b: f64, c: f64| -> ([f64; 2], usize) {
        if a.abs() < 1e-14 {
            if b.abs() < 1e-300 {
                return ([0.0; 2], 0);
            }
            return ([-c / (2.0 * b), 0.0], 1);
        }
        let disc = b * b - a * c;
        if disc < 0.0 {
            return ([0.0; 2], 0);
        }
        if disc == 0.0 {
            return ([-b / a, 0.0], 1);
        }
        // Numerically stable pair.
        let q = -(b + b.signum() * disc.sqrt());
        let (t0, t1) = (q / a, c / q);
        if t0 <= t1 {
            ([t0, t1], 2)
        } else {
            ([t1, t0], 2)
        }
    };
    match primitive {
        Primitive::Plane(p) => {
            let denom = p.normal.dot(dir);
            if denom.abs() < 1e-300 {
                return ([0.0; 2], 0);
            }
            ([(p.offset - p.normal.dot(origin)) / denom, 0.0], 1)
        }
        Primitive::Sphere(s) => {
            let w = origin - s.center;
            quadratic(1.0, w.dot(dir), w.norm_squared() - s.radius * s.radius)
        }
        Primitive::Cylinder(c) => {
            let w = origin - c.foot;
            let dp = dir - c.axis * c.axis.dot(dir);
            let wp = w - c.axis * c.axis.dot(&w);
            quadratic(dp.norm_squared(), wp.dot(&dp), wp.norm_squared() - c.radius * c.radius)
        }
        Primitive::Cone(k) => {
            let w = origin - k.apex;
            let cos2 = k.angle.cos().powi(2);
            let (da, wa) = (dir.dot(&k.axis), w.dot(&k.axis));
            let a = da * da - cos2;
            let b = wa * da - cos2 * w.dot(dir);
            let c = wa * wa - cos2 * w.norm_squared();
            quadratic(a, b, c)
        }
    }
}

/// Nearest front-facing hit with `t > 1e-9` accepted by `keep`.
fn first_hit(origin: &Vec3, dir: &Vec3, primitive: &Primitive, keep: impl Fn(&Vec3) -> bool) -> Option<Hit> {
    let (ts, n) = roots(origin, dir, primitive);
    for &t in &ts[..n] {
        if !(t > MIN_T) {
            continue;
        }
        let point = origin + dir * t;
        if let Primitive::Cone(k) = primitive {
            // The quadric also contains the mirrored nappe.
            if (point - k.apex).dot(&k.axis) <= 0.0 {
                continue;
            }
        }
        let normal = primitive.surface_normal_at(&point).direction;
        if normal.dot(dir) < 0.0 && keep(&point) {
            return Some(Hit { t, point, normal });
        }
    }
    None
}

/// Nearest front-facing intersection of the unbounded surface with the ray.
pub fn intersect_ray(origin: &Vec3, direction: &Vec3, primitive: &Primitive) -> Option<Hit> {
    first_hit(origin, direction, primitive, |_| true)
}

struct PinholeCamera {
    position: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    tan_half: f64,
    width: usize,
    height: usize,
}

impl PinholeCamera {
    fn new(c: &Camera, width: usize, height: usize) -> Result<Self> {
        let position = Vec3::from(c.position);
        let forward = Vec3::from(c.look_at) - position;
        let right = forward.cross(&Vec3::from(c.up));
        if forward.norm() < 1e-12 || right.norm() < 1e-12 {
            return Err(Error::invalid("camera look_at and up must define a frame"));
        }
        let forward = forward.normalize();
        let right = right.normalize();
        let up = right.cross(&forward);
        let tan_half = (c.fov_deg.to_radians() / 2.0).tan();
        Ok(Self { position, forward, right, up, tan_half, width, height })
    }

    fn ray(&self, row: usize, col: usize) -> Vec3 {
        let aspect = self.width as f64 / self.height as f64;
        let x = ((col as f64 + 0.5) / self.width as f64 * 2.0 - 1.0) * self.tan_half * aspect;
        let y = (1.0 - (row as f64 + 0.5) / self.height as f64 * 2.0) * self.tan_half;
        (self.forward + self.right * x + self.up * y).normalize()
    }
}

fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn place(kind: PrimitiveKind, spec: &SceneSpec, camera: &Vec3, rng: &mut impl Rng) -> (Primitive, ClipBall) {
    let h = spec.box_half_extent;
    let diagonal = 2.0 * h * 3f64.sqrt();
    let center = Vec3::new(rng.random_range(-h..=h), rng.random_range(-h..=h), rng.random_range(-h..=h));
    let size = rng.random_range(spec.size_range[0]..=spec.size_range[1]) * diagonal;
    let patch = size * spec.patch_extent;
    let ball = |c: Vec3, r: f64| ClipBall { center: c.into(), radius: r };
    match kind {
        PrimitiveKind::Plane => {
            let mut n = random_unit(rng);
            if n.dot(&(camera - center)) < 0.0 {
                n = -n;
            }
            (Primitive::Plane(Plane::through(&center, &n)), ball(center, patch))
        }
        PrimitiveKind::Sphere => (Primitive::Sphere(Sphere::new(center, size)), ball(center, size * 1.000001)),
        PrimitiveKind::Cylinder => {
            let axis = random_unit(rng);
            (Primitive::Cylinder(Cylinder::new(axis, center, size)), ball(center, patch))
        }
        PrimitiveKind::Cone => {
            let [lo, hi] = spec.cone_angle_range_deg;
            let angle = rng.random_range(lo..=hi).to_radians();
            let axis = random_unit(rng);
            // Radius `size` at the patch center.
            let height = size / angle.tan();
            let apex = center - axis * height;
            // Stopping at the apex distance bounds the visible radius by 2·size·cos²θ.
            (Primitive::Cone(Cone::new(apex, axis, angle)), ball(center, patch.min(height)))
        }
    }
}

struct Sample {
    point: Vec3,
    normal: Vec3,
    ray: Vec3,
    label: usize,
}

fn render(camera: &PinholeCamera, prims: &[(Primitive, ClipBall)]) -> Vec<Vec<Sample>> {
    (0..camera.height)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            for col in 0..camera.width {
                let dir = camera.ray(row, col);
                let mut best: Option<(usize, Hit)> = None;
                for (k, (prim, clip)) in prims.iter().enumerate() {
                    if let Some(hit) = first_hit(&camera.position, &dir, prim, |p| clip.contains(p)) {
                        if best.as_ref().is_none_or(|(_, b)| hit.t < b.t) {
                            best = Some((k, hit));
                        }
                    }
                }
                if let Some((label, hit)) = best {
                    out.push(Sample { point: hit.point, normal: hit.normal, ray: dir, label });
                }
            }
            out
        })
        .collect()
}

fn truncated_normal(rng: &mut impl Rng) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= NOISE_TRUNCATION {
            return z;
        }
    }
}

/// Rotates `n` by a Gaussian angle (std `sigma` radians) about a random
/// tangent direction.
fn jitter_normal(n: &Vec3, sigma: f64, rng: &mut impl Rng) -> Vec3 {
    let e1 = fallback_perpendicular(n);
    let e2 = n.cross(&e1);
    let phi = rng.random_range(0.0..2.0 * PI);
    let z: f64 = StandardNormal.sample(rng);
    let angle = sigma * z.abs().min(NOISE_TRUNCATION);
    let tangent = e1 * phi.cos() + e2 * phi.sin();
    (n * angle.cos() + tangent * angle.sin()).normalize()
}

/// Renders the scene described by `spec`. Primitives that stay invisible
/// after ten placements are dropped; labels index the kept primitives.
pub fn generate_scene(spec: &SceneSpec) -> Result<(PointCloud, GroundTruth)> {
    spec.validate()?;
    let camera = PinholeCamera::new(&spec.camera, spec.width, spec.height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);

    let mut placed: Vec<(Primitive, ClipBall)> = Vec::new();
    for kind in spec.primitive_counts.kinds() {
        let mut kept = None;
        for _attempt in 0..10 {
            let mut candidate = place(kind, spec, &camera.position, &mut rng);
            if spec.separate {
                for _ in 0..100 {
                    let overlaps = placed.iter().any(|(_, b)| {
                        let d = (Vec3::from(b.center) - Vec3::from(candidate.1.center)).norm();
                        d < b.radius + candidate.1.radius
                    });
                    if !overlaps {
                        break;
                    }
                    candidate = place(kind, spec, &camera.position, &mut rng);
                }
            }
            let mut trial = placed.clone();
            trial.push(candidate);
            let visible = render(&camera, &trial).iter().flatten().any(|s| s.label == trial.len() - 1);
            if visible {
                kept = Some(candidate);
                break;
            }
        }
        if let Some(c) = kept {
            placed.push(c);
        }
    }

    let rows = render(&camera, &placed);
    // Occlusion by later primitives can hide earlier ones completely.
    let mut visible = vec![false; placed.len()];
    for s in rows.iter().flatten() {
        visible[s.label] = true;
    }
    let remap: Vec<Option<usize>> = visible
        .iter()
        .scan(0, |next, &v| {
            Some(v.then(|| {
                *next += 1;
                *next - 1
            }))
        })
        .collect();
    if rows.iter().all(|r| r.is_empty()) {
        return Err(Error::invalid("no primitive is visible from the camera"));
    }

    let diameter = scene_diameter(rows.iter().flatten().map(|s| &s.point));
    let sigma = spec.noise_sigma * diameter;
    let jitter = spec.normal_jitter_deg.to_radians();
    let seed = spec.rng_seed;
    let noisy: Vec<Vec<(OrientedPoint, usize)>> = rows
        .into_par_iter()
        .enumerate()
        .map(|(row, samples)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(row as u64 + 1);
            samples
                .into_iter()
                .map(|s| {
                    let mut p = s.point;
                    if sigma > 0.0 {
                        let dir = match spec.noise_direction {
                            NoiseDirection::Normal => s.normal,
                            NoiseDirection::Ray => s.ray,
                        };
                        p += dir * (sigma * truncated_normal(&mut rng));
                    }
                    let n = if jitter > 0.0 { jitter_normal(&s.normal, jitter, &mut rng) } else { s.normal };
                    (OrientedPoint { position: p, normal: n }, remap[s.label].expect("visible"))
                })
                .collect()
        })
        .collect();

    let (points, labels): (Vec<_>, Vec<_>) = noisy.into_iter().flatten().unzip();
    let kept: Vec<(Primitive, ClipBall)> =
        placed.into_iter().zip(&visible).filter(|(_, v)| **v).map(|(p, _)| p).collect();
    let truth = GroundTruth {
        primitives: kept.iter().map(|p| p.0).collect(),
        clip_balls: kept.iter().map(|p| p.1).collect(),
        labels,
        noise_sigma: spec.noise_sigma,
        diameter,
    };
    Ok((PointCloud::new(points)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(kind: PrimitiveKind, n: usize, sigma: f64) -> SceneSpec {
        SceneSpec {
            primitive_counts: PrimitiveCounts::only(kind, n),
            noise_sigma: sigma,
            width: 120,
            height: 120,
            rng_seed: 11,
            ..SceneSpec::default()
        }
    }

    #[test]
    fn ray_sphere_examples() {
        let s = Primitive::Sphere(Sphere::new(Vec3::zeros(), 1.0));
        let hit = intersect_ray(&Vec3::new(0.0, 0.0, -5.0), &Vec3::z(), &s).unwrap();
        assert_relative_eq!(hit.t, 4.0);
        assert_relative_eq!(hit.point, Vec3::new(0.0, 0.0, -1.0));
        // Tangent: the normal is perpendicular to the ray.
        assert!(intersect_ray(&Vec3::new(1.0, 0.0, -5.0), &Vec3::z(), &s).is_none());
        assert!(intersect_ray(&Vec3::new(3.0, 0.0, -5.0), &Vec3::z(), &s).is_none());
        // From inside, the only hit is back-facing.
        assert!(intersect_ray(&Vec3::zeros(), &Vec3::z(), &s).is_none());
    }

    #[test]
    fn ray_cylinder_cone_plane() {
        let cyl = Primitive::Cylinder(Cylinder::new(Vec3::y(), Vec3::zeros(), 0.5));
        let hit = intersect_ray(&Vec3::new(0.0, 0.3, -5.0), &Vec3::z(), &cyl).unwrap();
        assert_relative_eq!(hit.point, Vec3::new(0.0, 0.3, -0.5), epsilon = 1e-12);

        let cone = Primitive::Cone(Cone::new(Vec3::zeros(), Vec3::y(), std::f64::consts::FRAC_PI_4));
        let hit = intersect_ray(&Vec3::new(0.0, 1.0, -5.0), &Vec3::z(), &cone).unwrap();
        assert_relative_eq!(hit.point, Vec3::new(0.0, 1.0, -1.0), epsilon = 1e-12);
        // The mirrored nappe is not part of the surface.
        let below = intersect_ray(&Vec3::new(0.0, -1.0, -5.0), &Vec3::z(), &cone);
        assert!(below.is_none());

        let plane = Primitive::Plane(Plane::through(&Vec3::zeros(), &-Vec3::z()));
        assert_relative_eq!(intersect_ray(&Vec3::new(0.0, 0.0, -2.0), &Vec3::z(), &plane).unwrap().t, 2.0);
        let back = Primitive::Plane(Plane::through(&Vec3::zeros(), &Vec3::z()));
        assert!(intersect_ray(&Vec3::new(0.0, 0.0, -2.0), &Vec3::z(), &back).is_none());
    }

    #[test]
    fn noiseless_points_lie_on_their_primitives() {
        for kind in PrimitiveKind::ALL {
            let (cloud, gt) = generate_scene(&small(kind, 3, 0.0)).unwrap();
            assert_eq!(cloud.len(), gt.labels.len());
            for (p, &l) in cloud.points().iter().zip(&gt.labels) {
                let prim = &gt.primitives[l];
                assert!(prim.signed_distance(&p.position).abs() < 1e-9, "{kind}");
                let n = prim.surface_normal_at(&p.position).direction;
                assert_relative_eq!(p.normal, n, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn noise_respects_truncation_and_scale() {
        let spec = small(PrimitiveKind::Sphere, 2, 0.01);
        let (cloud, gt) = generate_scene(&spec).unwrap();
        let sigma = 0.01 * gt.diameter;
        let mut sq = 0.0;
        for (p, &l) in cloud.points().iter().zip(&gt.labels) {
            let d = gt.primitives[l].signed_distance(&p.position);
            assert!(d.abs() <= NOISE_TRUNCATION * sigma + 1e-12);
            sq += d * d;
        }
        let rms = (sq / cloud.len() as f64).sqrt();
        assert!((0.8 * sigma..=1.2 * sigma).contains(&rms), "rms {rms} sigma {sigma}");
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = small(PrimitiveKind::Cone, 2, 0.01);
        let (a, ga) = generate_scene(&spec).unwrap();
        let (b, gb) = generate_scene(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ga, gb);
    }

    #[test]
    fn front_facing_hits_only() {
        let spec = small(PrimitiveKind::Cylinder, 3, 0.0);
        let (cloud, _) = generate_scene(&spec).unwrap();
        let eye = Vec3::from(spec.camera.position);
        for p in cloud.points() {
            assert!(p.normal.dot(&(p.position - eye)) < 0.0);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = SceneSpec::default();
        assert!(spec.validate().is_ok());
        spec.primitive_counts = PrimitiveCounts::only(PrimitiveKind::Plane, 21);
        assert!(spec.validate().is_err());
        spec = SceneSpec { width: 401, ..SceneSpec::default() };
        assert!(spec.validate().is_err());
        spec = SceneSpec { noise_sigma: -0.1, ..SceneSpec::default() };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn full_resolution_point_budget() {
        let spec = SceneSpec {
            primitive_counts: PrimitiveCounts { plane: 2, sphere: 2, cylinder: 2, cone: 2 },
            ..SceneSpec::default()
        };
        let (cloud, _) = generate_scene(&spec).unwrap();
        assert!(cloud.len() <= 160_000);
    }
}
