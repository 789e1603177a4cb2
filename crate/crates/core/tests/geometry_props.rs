mod common;

use common::{on_surface, point_in_box, random_primitive, rigid, rng};
use hough_prims::geometry::{Primitive, Vec3};
use proptest::prelude::*;

/// Points within this of a sphere center or a cylinder/cone axis are skipped
/// where the distance field is not differentiable.
const SINGULAR_MARGIN: f64 = 0.05;

fn near_singular(primitive: &Primitive, p: &Vec3) -> bool {
    let off_axis = |foot: &Vec3, axis: &Vec3| {
        let v = p - foot;
        (v - axis * v.dot(axis)).norm()
    };
    match primitive {
        Primitive::Plane(_) => false,
        Primitive::Sphere(s) => (p - s.center).norm() < SINGULAR_MARGIN,
        Primitive::Cylinder(c) => off_axis(&c.foot, &c.axis) < SINGULAR_MARGIN,
        Primitive::Cone(c) => off_axis(&c.apex, &c.axis) < SINGULAR_MARGIN || (p - c.apex).norm() < SINGULAR_MARGIN,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_lands_on_surface_and_is_closest(seed in any::<u64>(), kind in 0usize..4) {
        let mut rng = rng(seed);
        let primitive = random_primitive(&mut rng, kind);
        let samples: Vec<Vec3> = (0..1000).map(|_| on_surface(&mut rng, &primitive, 6.0).position).collect();
        for _ in 0..100 {
            let p = point_in_box(&mut rng, 4.0);
            let q = primitive.project(&p);
            prop_assert!(primitive.signed_distance(&q).abs() < 1e-9, "{primitive:?} {p:?} {q:?}");
            let best = (p - q).norm();
            for s in &samples {
                prop_assert!(best <= (p - s).norm() + 1e-9);
            }
        }
    }

    #[test]
    fn normal_is_the_distance_gradient(seed in any::<u64>(), kind in 0usize..4) {
        let mut rng = rng(seed);
        let primitive = random_primitive(&mut rng, kind);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 10 {
            let p = point_in_box(&mut rng, 4.0);
            let n = primitive.surface_normal_at(&p);
            if n.singular || near_singular(&primitive, &p) {
                continue;
            }
            let mut grad = Vec3::zeros();
            for k in 0..3 {
                let mut e = Vec3::zeros();
                e[k] = h;
                grad[k] = (primitive.signed_distance(&(p + e)) - primitive.signed_distance(&(p - e))) / (2.0 * h);
            }
            prop_assert!((grad - n.direction).norm() < 1e-5, "{primitive:?} at {p:?}: {grad:?} vs {:?}", n.direction);
            checked += 1;
        }
    }

    #[test]
    fn cone_normals_satisfy_the_opening_angle_identity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let primitive = random_primitive(&mut rng, 3);
        let Primitive::Cone(cone) = primitive else { unreachable!() };
        for _ in 0..100 {
            let p = on_surface(&mut rng, &primitive, 3.0).position;
            let n = primitive.surface_normal_at(&p);
            prop_assert!((cone.angle.sin() + cone.axis.dot(&n.direction)).abs() < 1e-9);
        }
    }

    #[test]
    fn signed_distance_is_rigidly_invariant(seed in any::<u64>(), kind in 0usize..4) {
        let mut rng = rng(seed);
        let primitive = random_primitive(&mut rng, kind);
        let iso = rigid(&mut rng);
        let moved = primitive.transformed(&iso);
        for _ in 0..100 {
            let p = point_in_box(&mut rng, 4.0);
            let q = iso.transform_point(&p.into()).coords;
            prop_assert!((primitive.signed_distance(&p) - moved.signed_distance(&q)).abs() < 1e-9);
        }
    }
}
