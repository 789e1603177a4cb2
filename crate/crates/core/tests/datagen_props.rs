use hough_prims::datagen::{generate_scene, PrimitiveCounts, SceneSpec, NOISE_TRUNCATION};
use hough_prims::geometry::Vec3;
use proptest::prelude::*;

fn spec(seed: u64, counts: [usize; 4], sigma: f64) -> SceneSpec {
    SceneSpec {
        primitive_counts: PrimitiveCounts { plane: counts[0], sphere: counts[1], cylinder: counts[2], cone: counts[3] },
        noise_sigma: sigma,
        width: 120,
        height: 120,
        rng_seed: seed,
        ..SceneSpec::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noiseless_points_are_exact_and_front_facing(seed in any::<u64>(), counts in prop::array::uniform4(0usize..3)) {
        prop_assume!(counts.iter().sum::<usize>() > 0);
        let spec = spec(seed, counts, 0.0);
        let (cloud, truth) = generate_scene(&spec).unwrap();
        let eye = Vec3::from(spec.camera.position);
        prop_assert_eq!(cloud.len(), truth.labels.len());
        for (p, &l) in cloud.points().iter().zip(&truth.labels) {
            let primitive = &truth.primitives[l];
            prop_assert!(primitive.signed_distance(&p.position).abs() < 1e-9);
            prop_assert!((primitive.surface_normal_at(&p.position).direction - p.normal).norm() < 1e-9);
            prop_assert!(p.normal.dot(&(p.position - eye)) < 0.0);
        }
    }

    #[test]
    fn noisy_points_stay_within_truncation(seed in any::<u64>(), sigma in 0.0f64..0.02) {
        let (cloud, truth) = generate_scene(&spec(seed, [1, 1, 1, 1], sigma)).unwrap();
        let bound = NOISE_TRUNCATION * sigma * truth.diameter + 1e-9;
        for (p, &l) in cloud.points().iter().zip(&truth.labels) {
            prop_assert!(truth.primitives[l].signed_distance(&p.position).abs() <= bound);
        }
    }

    #[test]
    fn scenes_are_reproducible(seed in any::<u64>(), sigma in 0.0f64..0.02) {
        let s = spec(seed, [1, 1, 1, 1], sigma);
        let (a, ta) = generate_scene(&s).unwrap();
        let (b, tb) = generate_scene(&s).unwrap();
        prop_assert_eq!(a.points(), b.points());
        prop_assert_eq!(ta, tb);
    }
}
