//! Random primitives, on-surface samples and F-angle oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use hough_prims::eval::p_coverage;
use hough_prims::geometry::{fallback_perpendicular, Cone, Cylinder, OrientedPoint, Plane, Primitive, Sphere, Vec3};
use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut impl Rng) -> Vec3 {
    let v: [f64; 3] = UnitSphere.sample(rng);
    Vec3::from(v)
}

/// Uniform unit vector orthogonal to `a`.
pub fn perpendicular(rng: &mut impl Rng, a: &Vec3) -> Vec3 {
    let e1 = fallback_perpendicular(a);
    let e2 = a.cross(&e1);
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    e1 * t.cos() + e2 * t.sin()
}

pub fn point_in_box(rng: &mut impl Rng, half: f64) -> Vec3 {
    Vec3::new(rng.random_range(-half..half), rng.random_range(-half..half), rng.random_range(-half..half))
}

pub fn rigid(rng: &mut impl Rng) -> Isometry3<f64> {
    let axis = nalgebra::Unit::new_normalize(unit(rng));
    let rotation = UnitQuaternion::from_axis_angle(&axis, rng.random_range(0.0..std::f64::consts::PI));
    Isometry3::from_parts(Translation3::from(point_in_box(rng, 5.0)), rotation)
}

/// `v` rotated by `angle` about a random axis orthogonal to it.
pub fn tilt(rng: &mut impl Rng, v: &Vec3, angle: f64) -> Vec3 {
    let w = perpendicular(rng, v);
    v * angle.cos() + w * angle.sin()
}

pub fn random_plane(rng: &mut impl Rng) -> Primitive {
    Primitive::Plane(Plane::new(unit(rng), rng.random_range(-2.0..2.0)))
}

pub fn random_sphere(rng: &mut impl Rng, radius: std::ops::Range<f64>) -> Primitive {
    Primitive::Sphere(Sphere::new(point_in_box(rng, 2.0), rng.random_range(radius)))
}

pub fn random_cylinder(rng: &mut impl Rng, radius: std::ops::Range<f64>) -> Primitive {
    Primitive::Cylinder(Cylinder::new(unit(rng), point_in_box(rng, 2.0), rng.random_range(radius)))
}

/// Opening angle in [10°, 80°].
pub fn random_cone(rng: &mut impl Rng) -> Primitive {
    let angle = rng.random_range(10f64.to_radians()..80f64.to_radians());
    Primitive::Cone(Cone::new(point_in_box(rng, 2.0), unit(rng), angle))
}

pub fn random_primitive(rng: &mut impl Rng, kind: usize) -> Primitive {
    match kind % 4 {
        0 => random_plane(rng),
        1 => random_sphere(rng, 0.1..3.0),
        2 => random_cylinder(rng, 0.1..3.0),
        _ => random_cone(rng),
    }
}

/// Exact surface point with its outward normal. `extent` bounds the offset
/// along unbounded directions (plane tangents, cylinder and cone axes).
pub fn on_surface(rng: &mut impl Rng, primitive: &Primitive, extent: f64) -> OrientedPoint {
    let (position, normal) = match primitive {
        Primitive::Plane(p) => {
            let e1 = fallback_perpendicular(&p.normal);
            let e2 = p.normal.cross(&e1);
            let a = rng.random_range(-extent..extent);
            let b = rng.random_range(-extent..extent);
            (p.normal * p.offset + e1 * a + e2 * b, p.normal)
        }
        Primitive::Sphere(s) => {
            let u = unit(rng);
            (s.center + u * s.radius, u)
        }
        Primitive::Cylinder(c) => {
            let u = perpendicular(rng, &c.axis);
            let h = rng.random_range(-extent..extent);
            (c.foot + c.axis * h + u * c.radius, u)
        }
        Primitive::Cone(c) => {
            let u = perpendicular(rng, &c.axis);
            let t = rng.random_range(0.05 * extent..extent);
            let (s, co) = c.angle.sin_cos();
            (c.apex + (c.axis * co + u * s) * t, u * co - c.axis * s)
        }
    };
    OrientedPoint { position, normal: normal.normalize() }
}

/// Two distinct surface points whose normals differ by at least `min_angle`.
pub fn surface_pair(rng: &mut impl Rng, primitive: &Primitive, extent: f64, min_angle: f64) -> (OrientedPoint, OrientedPoint) {
    loop {
        let a = on_surface(rng, primitive, extent);
        let b = on_surface(rng, primitive, extent);
        let angle = angle_between(&a.normal, &b.normal);
        let far = (a.position - b.position).norm() > 1e-3 * extent;
        let usable = match primitive {
            Primitive::Plane(_) => far,
            _ => far && angle >= min_angle,
        };
        if usable {
            return (a, b);
        }
    }
}

/// Angle between two vectors in [0, π], accurate near 0 and π.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Classical feature `(‖d‖, ∠(n_r, d), ∠(n_i, d), ∠(n_r, n_i))`.
pub fn f_angles(r: &OrientedPoint, i: &OrientedPoint) -> [f64; 4] {
    let d = i.position - r.position;
    [d.norm(), angle_between(&r.normal, &d), angle_between(&i.normal, &d), angle_between(&r.normal, &i.normal)]
}

/// Signed deviations of the four exact conditions, in F-angle space:
/// NP, the larger PC term, AS, VT.
pub fn deviations(f: &[f64; 4]) -> [f64; 4] {
    [
        f[3],
        (f[1] - FRAC_PI_2).abs().max((f[2] - FRAC_PI_2).abs()),
        f[1] + f[2] - std::f64::consts::PI,
        f[1] - f[2] - f[3],
    ]
}

/// Area above an empirical CDF, integrated exactly: the curve is constant
/// between consecutive distinct errors, so it is sampled at midpoints.
pub fn area_above(errors: &[f64]) -> f64 {
    let mut knots: Vec<f64> = errors.to_vec();
    knots.push(0.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mids: Vec<f64> = knots.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let curve = p_coverage(errors, &mids);
    knots.windows(2).zip(&curve.coverage).map(|(w, p)| (w[1] - w[0]) * (1.0 - p)).sum()
}

/// Largest one-to-one set of mutually covering pairs, by exhaustive search.
pub fn exhaustive_matching(gt: &[Option<usize>], n_gt: usize, det: &[Option<usize>], n_det: usize, t: f64) -> Vec<(usize, usize)> {
    let mut counts = vec![vec![0usize; n_det]; n_gt];
    let (mut gs, mut ds) = (vec![0usize; n_gt], vec![0usize; n_det]);
    for (g, d) in gt.iter().zip(det) {
        if let Some(g) = g {
            gs[*g] += 1;
        }
        if let Some(d) = d {
            ds[*d] += 1;
        }
        if let (Some(g), Some(d)) = (g, d) {
            counts[*g][*d] += 1;
        }
    }
    let ok = |g: usize, d: usize| {
        let o = counts[g][d] as f64;
        o > 0.0 && o >= t * gs[g] as f64 && o >= t * ds[d] as f64
    };
    fn search(g: usize, n_gt: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, best: &mut Vec<(usize, usize)>, ok: &dyn Fn(usize, usize) -> bool) {
        if g == n_gt {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
            return;
        }
        search(g + 1, n_gt, used, cur, best, ok);
        for d in 0..used.len() {
            if !used[d] && ok(g, d) {
                used[d] = true;
                cur.push((g, d));
                search(g + 1, n_gt, used, cur, best, ok);
                cur.pop();
                used[d] = false;
            }
        }
    }
    let mut best = Vec::new();
    search(0, n_gt, &mut vec![false; n_det], &mut Vec::new(), &mut best, &ok);
    best
}
