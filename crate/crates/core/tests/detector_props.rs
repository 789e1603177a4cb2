mod common;

use common::{on_surface, point_in_box, random_cone, random_cylinder, random_plane, random_sphere, rng, surface_pair, tilt, unit};
use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec};
use hough_prims::detector::{candidates, cluster, detect, detect_with, DetectorConfig, Execution, VotingSpace};
use hough_prims::geometry::{OrientedPoint, PointCloud, Primitive, PrimitiveKind, Vec3};
use hough_prims::ppf::ReferenceFrame;
use proptest::prelude::*;
use rand::Rng;

fn small_scene(seed: u64, sigma: f64) -> PointCloud {
    let spec = SceneSpec {
        primitive_counts: PrimitiveCounts { plane: 1, sphere: 2, cylinder: 2, cone: 1 },
        noise_sigma: sigma,
        width: 160,
        height: 160,
        size_range: [0.04, 0.1],
        rng_seed: seed,
        ..SceneSpec::default()
    };
    generate_scene(&spec).unwrap().0
}

fn small_config(seed: u64) -> DetectorConfig {
    DetectorConfig { n_reference: 400, n_pair: 400, rng_seed: seed, ..DetectorConfig::default() }
}

fn masses(space: &VotingSpace) -> [f64; 4] {
    [space.plane.total(), space.sphere.total(), space.cylinder.total(), space.cone.total()]
}

/// Plane votes never coexist with curved votes; for exact pairs a sphere
/// vote always comes with cylinder and cone votes.
#[test]
fn voting_decisions_are_nested() {
    // Diameter 10 puts every radius below 2 in range.
    let mut space = VotingSpace::new(&DetectorConfig::default(), 10.0);
    let mut rng = rng(5);
    for k in 0..40_000 {
        let primitive = match k % 4 {
            0 => random_plane(&mut rng),
            1 => random_sphere(&mut rng, 0.1..1.5),
            2 => random_cylinder(&mut rng, 0.1..1.5),
            _ => random_cone(&mut rng),
        };
        let (r, mut i) = surface_pair(&mut rng, &primitive, 1.0, 1e-2);
        // Every fourth pair is perturbed; nesting must hold for any pair.
        if k % 16 >= 12 {
            let angle = rng.random_range(0.0..0.3);
            i.normal = tilt(&mut rng, &i.normal, angle);
        }
        space.reset();
        let frame = ReferenceFrame::new(r.position, r.normal);
        let out = space.vote_pair(&frame, &i.position, &i.normal);
        let [plane, sphere, cylinder, cone] = masses(&space);
        assert_eq!(out.plane, plane > 0.0);
        if out.plane {
            assert!(!out.sphere && !out.cylinder && !out.cone);
            assert_eq!(sphere + cylinder + cone, 0.0);
        }
        // Range rejections may drop a single type, so the chain is checked on
        // the pairs whose parameters are known to be in range.
        let exact = k % 16 < 12;
        if exact && out.sphere && matches!(primitive, Primitive::Sphere(_)) {
            assert!(out.cylinder && out.cone, "{primitive:?}");
        }
        if exact && out.cylinder && matches!(primitive, Primitive::Sphere(_) | Primitive::Cylinder(_)) {
            assert!(out.cone, "{primitive:?}");
        }
        // Curved pairs with nearly parallel normals legitimately take the
        // plane branch.
        let curved = common::angle_between(&r.normal, &i.normal) > 10f64.to_radians();
        if exact {
            match primitive {
                Primitive::Plane(_) => assert!(out.plane),
                Primitive::Sphere(_) if curved => assert!(out.sphere && sphere > 0.0 && cylinder > 0.0 && cone > 0.0),
                _ if curved => assert!(!out.plane),
                _ => {}
            }
        }
    }
}

#[test]
fn reports_are_deterministic_and_schedule_independent() {
    let cloud = small_scene(3, 0.002);
    let config = small_config(9);
    let strip = |mut r: hough_prims::detector::DetectionReport| {
        r.timing = Default::default();
        r
    };
    let a = strip(detect_with(&cloud, &config, Execution::Serial).unwrap());
    let b = strip(detect_with(&cloud, &config, Execution::Serial).unwrap());
    let c = strip(detect_with(&cloud, &config, Execution::Parallel).unwrap());
    assert!(!a.primitives.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn candidates_pass_through_their_reference_points() {
    for seed in 0..3 {
        let cloud = small_scene(seed, 0.003);
        let found = candidates(&cloud, &small_config(seed), Execution::Serial).unwrap();
        assert!(!found.is_empty());
        for c in &found {
            assert!(c.primitive.signed_distance(&c.reference.position).abs() < 0.02 * cloud.diameter());
            assert!(c.vote_mass > 8.0);
        }
    }
}

#[test]
fn clustering_is_idempotent() {
    for seed in 0..3 {
        let cloud = small_scene(seed, 0.003);
        let config = small_config(seed);
        let found = candidates(&cloud, &config, Execution::Serial).unwrap();
        let test = config.merge_test(cloud.diameter());
        for averaging in [true, false] {
            let once = cluster(&found, &test, averaging);
            assert!(once.len() < found.len());
            assert_eq!(cluster(&once, &test, averaging), once);
        }
    }
}

#[test]
fn plane_cloud_yields_one_plane() {
    let normal = Vec3::new(1.0, 2.0, 2.0).normalize();
    let e1 = hough_prims::geometry::fallback_perpendicular(&normal);
    let e2 = normal.cross(&e1);
    let points = (0..100)
        .flat_map(|a| (0..100).map(move |b| (a, b)))
        .map(|(a, b)| OrientedPoint { position: e1 * (a as f64 * 0.01) + e2 * (b as f64 * 0.01) + normal * 0.3, normal })
        .collect();
    let cloud = PointCloud::new(points).unwrap();
    let report = detect(&cloud, &DetectorConfig::default()).unwrap();
    assert_eq!(report.primitives.len(), 1);
    let Primitive::Plane(p) = report.primitives[0].primitive else { panic!("{:?}", report.primitives) };
    assert!(p.normal.dot(&normal) > 1.0 - 1e-9 && (p.offset - 0.3).abs() < 1e-9);
    assert!(report.labels.iter().all(|l| *l == Some(0)));

    let spheres = DetectorConfig { enabled_types: vec![PrimitiveKind::Sphere], ..DetectorConfig::default() };
    assert!(detect(&cloud, &spheres).unwrap().primitives.is_empty());
}

#[test]
fn noisy_plane_is_detected() {
    let mut rng = rng(8);
    let normal = Vec3::new(-2.0, 1.0, 2.0).normalize();
    let e1 = hough_prims::geometry::fallback_perpendicular(&normal);
    let e2 = normal.cross(&e1);
    let sigma = 0.003 * 2f64.sqrt();
    let points = (0..10_000)
        .map(|_| {
            let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let h = rng.random_range(-2.0 * sigma..2.0 * sigma);
            OrientedPoint { position: e1 * a + e2 * b + normal * h, normal }
        })
        .collect();
    let report = detect(&PointCloud::new(points).unwrap(), &DetectorConfig::default()).unwrap();
    assert_eq!(report.primitives.len(), 1, "{:?}", report.primitives);
    let Primitive::Plane(p) = report.primitives[0].primitive else { panic!("{:?}", report.primitives) };
    assert!(p.normal.dot(&normal) > 0.999 && p.offset.abs() < 2.0 * sigma);
}

#[test]
fn uniform_noise_yields_nothing() {
    for seed in 0..20 {
        let mut rng = rng(seed);
        let points = (0..1000).map(|_| OrientedPoint { position: point_in_box(&mut rng, 0.5), normal: unit(&mut rng) }).collect();
        let cloud = PointCloud::new(points).unwrap();
        let report = detect(&cloud, &DetectorConfig { rng_seed: seed, ..DetectorConfig::default() }).unwrap();
        assert!(report.primitives.is_empty(), "seed {seed}: {:?}", report.primitives);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn noiseless_sphere_is_reconstructed(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sphere = random_sphere(&mut rng, 0.5..1.5);
        let points: Vec<OrientedPoint> = (0..3000).map(|_| on_surface(&mut rng, &sphere, 1.0)).collect();
        let cloud = PointCloud::new(points).unwrap();
        // A whole sphere has R ≈ 0.29·d_s, beyond the default 0.2·d_s range.
        let config = DetectorConfig { n_reference: 256, n_pair: 512, radius_bin_count: 80, rng_seed: seed, ..DetectorConfig::default() };
        let report = detect(&cloud, &config).unwrap();
        let Primitive::Sphere(truth) = sphere else { unreachable!() };
        prop_assert_eq!(report.primitives.len(), 1, "{:?}", report.primitives);
        let Primitive::Sphere(s) = report.primitives[0].primitive else { panic!("{:?}", report.primitives) };
        let tol = 1e-3 * cloud.diameter();
        prop_assert!((s.center - truth.center).norm() < tol && (s.radius - truth.radius).abs() < tol);
    }
}
