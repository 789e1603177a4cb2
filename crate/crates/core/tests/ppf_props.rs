mod common;

use common::{deviations, f_angles, on_surface, point_in_box, random_cone, random_cylinder, random_plane, random_sphere, rigid, rng, surface_pair, unit};
use hough_prims::geometry::{OrientedPoint, Primitive};
use hough_prims::ppf::{self, PairFeature, ReferenceFrame, Tolerances};
use proptest::prelude::*;
use rand::Rng;

fn feature(r: &OrientedPoint, i: &OrientedPoint) -> PairFeature {
    PairFeature::compute(&r.position, &r.normal, &i.position, &i.normal).unwrap()
}

/// Distance between the two axis points `p − s·n` of a cone pair.
fn axis_point_gap(cone: &hough_prims::geometry::Cone, r: &OrientedPoint, i: &OrientedPoint) -> f64 {
    let foot = |p: &OrientedPoint| {
        let v = p.position - cone.apex;
        let along = cone.axis * v.dot(&cone.axis);
        let s = (v - along).norm() / cone.angle.cos();
        p.position - p.normal * s
    };
    (foot(r) - foot(i)).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trig_free_feature_matches_angles(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for _ in 0..200 {
            let r = OrientedPoint { position: point_in_box(&mut rng, 1.0), normal: unit(&mut rng) };
            let i = OrientedPoint { position: point_in_box(&mut rng, 1.0), normal: unit(&mut rng) };
            let c = feature(&r, &i);
            let f = f_angles(&r, &i);
            prop_assert!((c.c1 - f[0] * f[0]).abs() < 1e-12);
            prop_assert!((c.c2 - f[0] * f[1].cos()).abs() < 1e-12);
            prop_assert!((c.c3 - f[0] * f[2].cos()).abs() < 1e-12);
            prop_assert!((c.c4 - f[3].cos()).abs() < 1e-12);
            prop_assert!(c.c2 * c.c2 <= c.c1 * (1.0 + 1e-12) && c.c3 * c.c3 <= c.c1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sphere_pairs_are_cylinder_pairs(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let tol = Tolerances::default();
        for _ in 0..100 {
            let sphere = random_sphere(&mut rng, 0.1..10.0);
            let (r, i) = surface_pair(&mut rng, &sphere, 1.0, 0.0);
            let c = feature(&r, &i);
            prop_assert!(ppf::check_as(&c, &tol) && ppf::check_vt(&c, &tol));
            let cylinder = random_cylinder(&mut rng, 0.1..10.0);
            let (r, i) = surface_pair(&mut rng, &cylinder, 5.0, 1e-3);
            prop_assert!(ppf::check_as(&feature(&r, &i), &tol));
        }
    }

    #[test]
    fn exact_pairs_pass_at_any_tolerance(seed in any::<u64>(), eps_deg in 0.01f64..80.0) {
        let mut rng = rng(seed);
        let tol = Tolerances::uniform(eps_deg.to_radians());
        let plane = random_plane(&mut rng);
        let (r, i) = surface_pair(&mut rng, &plane, 2.0, 0.0);
        let c = feature(&r, &i);
        prop_assert!(ppf::check_np(&c, &tol) && ppf::check_pc(&c, &tol));
        let sphere = random_sphere(&mut rng, 0.1..10.0);
        let (r, i) = surface_pair(&mut rng, &sphere, 1.0, 1e-2);
        let c = feature(&r, &i);
        prop_assert!(ppf::check_as(&c, &tol) && ppf::check_vt(&c, &tol));
        let cylinder = random_cylinder(&mut rng, 0.1..10.0);
        let (r, i) = surface_pair(&mut rng, &cylinder, 5.0, 1e-2);
        prop_assert!(ppf::check_as(&feature(&r, &i), &tol));
    }

    #[test]
    fn checks_fail_beyond_tolerance(seed in any::<u64>(), eps_deg in 1.0f64..30.0) {
        let eps = eps_deg.to_radians();
        let tol = Tolerances::uniform(eps);
        let mut rng = rng(seed);
        for k in 0..50 {
            let primitive = match k % 3 {
                0 => random_plane(&mut rng),
                1 => random_sphere(&mut rng, 0.1..3.0),
                _ => random_cylinder(&mut rng, 0.1..3.0),
            };
            let (r, mut i) = surface_pair(&mut rng, &primitive, 2.0, 1e-2);
            let angle = rng.random_range(0.0..3.0 * eps);
            i.normal = common::tilt(&mut rng, &i.normal, angle);
            let c = feature(&r, &i);
            let dev = deviations(&f_angles(&r, &i));
            let margin = 1e-9;
            if dev[0] > eps + margin { prop_assert!(!ppf::check_np(&c, &tol)); }
            if dev[1] > eps + margin { prop_assert!(!ppf::check_pc(&c, &tol)); }
            if dev[2].abs() > eps + margin { prop_assert!(!ppf::check_as(&c, &tol)); }
            if c.is_convex_admissible() && dev[3].abs() > eps + margin { prop_assert!(!ppf::check_vt(&c, &tol)); }
        }
    }

    #[test]
    fn closed_forms_recover_exact_parameters(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for _ in 0..50 {
            let sphere = random_sphere(&mut rng, 0.1..10.0);
            let Primitive::Sphere(s) = sphere else { unreachable!() };
            let (r, i) = surface_pair(&mut rng, &sphere, 1.0, 1e-2);
            let got = ppf::sphere_radius(&feature(&r, &i)).unwrap();
            prop_assert!((got - s.radius).abs() < 1e-9 * s.radius);

            let cylinder = random_cylinder(&mut rng, 0.1..10.0);
            let Primitive::Cylinder(cy) = cylinder else { unreachable!() };
            let (r, i) = surface_pair(&mut rng, &cylinder, 5.0, 1e-2);
            let frame = ReferenceFrame::new(r.position, r.normal);
            let v = ppf::cylinder_vote(&frame, &i.normal, &feature(&r, &i)).unwrap();
            prop_assert!((v.radius - cy.radius).abs() < 1e-9 * cy.radius);
            prop_assert!(frame.cylinder_axis(v.phi).cross(&cy.axis).norm() < 1e-9);

            let cone = random_cone(&mut rng);
            let Primitive::Cone(k) = cone else { unreachable!() };
            let (r, i) = surface_pair(&mut rng, &cone, 2.0, 1e-2);
            if axis_point_gap(&k, &r, &i) < 0.05 {
                continue;
            }
            let frame = ReferenceFrame::new(r.position, r.normal);
            let v = ppf::cone_vote(&frame, &i.position, &i.normal, &feature(&r, &i), f64::INFINITY, 1.0).unwrap();
            let got = ppf::extract_cone(v.s_r, &v.axis, &r.position, &r.normal).unwrap();
            prop_assert!((got.apex - k.apex).norm() < 1e-9, "{got:?} vs {k:?}");
            prop_assert!((got.axis - k.axis).norm() < 1e-9);
            prop_assert!((got.angle - k.angle).abs() < 1e-9);
        }
    }

    #[test]
    fn pair_outputs_are_rigidly_equivariant(seed in any::<u64>(), kind in 1usize..4) {
        let mut rng = rng(seed);
        let primitive = common::random_primitive(&mut rng, kind);
        let (r, i) = surface_pair(&mut rng, &primitive, 2.0, 0.05);
        let iso = rigid(&mut rng);
        let mv = |p: &OrientedPoint| OrientedPoint {
            position: iso.transform_point(&p.position.into()).coords,
            normal: iso.rotation * p.normal,
        };
        let (r2, i2) = (mv(&r), mv(&i));
        let (c, c2) = (feature(&r, &i), feature(&r2, &i2));
        if let (Ok(a), Ok(b)) = (ppf::sphere_radius(&c), ppf::sphere_radius(&c2)) {
            prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
        let (f, f2) = (ReferenceFrame::new(r.position, r.normal), ReferenceFrame::new(r2.position, r2.normal));
        if let (Ok(a), Ok(b)) = (ppf::cylinder_vote(&f, &i.normal, &c), ppf::cylinder_vote(&f2, &i2.normal, &c2)) {
            let axis = iso.rotation * f.cylinder_axis(a.phi);
            prop_assert!(axis.cross(&f2.cylinder_axis(b.phi)).norm() < 1e-9);
        }
        let v = ppf::cone_vote(&f, &i.position, &i.normal, &c, f64::INFINITY, 1.0);
        let v2 = ppf::cone_vote(&f2, &i2.position, &i2.normal, &c2, f64::INFINITY, 1.0);
        if let (Ok(a), Ok(b)) = (v, v2) {
            prop_assert!((a.s_r - b.s_r).abs() < 1e-9 * a.s_r.max(1.0));
            if let (Ok(k), Ok(k2)) = (
                ppf::extract_cone(a.s_r, &a.axis, &r.position, &r.normal),
                ppf::extract_cone(b.s_r, &b.axis, &r2.position, &r2.normal),
            ) {
                prop_assert!((k.angle - k2.angle).abs() < 1e-9);
                prop_assert!((iso.transform_point(&k.apex.into()).coords - k2.apex).norm() < 1e-8);
            }
        }
    }
}

#[test]
fn cone_samples_lie_on_their_cone() {
    let mut rng = rng(1);
    for _ in 0..1000 {
        let cone = random_cone(&mut rng);
        let p = on_surface(&mut rng, &cone, 2.0);
        assert!(cone.signed_distance(&p.position).abs() < 1e-12);
        assert!((cone.surface_normal_at(&p.position).direction - p.normal).norm() < 1e-9);
    }
}
