//! Recovers sphere, cylinder and cone parameters from a single exact pair.
//!
//! cargo run --release --example pair_closed_forms

use hough_prims::geometry::Vec3;
use hough_prims::ppf::{self, PairFeature, ReferenceFrame, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let show = |name: &str, c: &PairFeature| {
        println!(
            "{name:8} C = ({:.4}, {:.4}, {:.4}, {:.4})  NP {} PC {} AS {} VT {}",
            c.c1,
            c.c2,
            c.c3,
            c.c4,
            ppf::check_np(c, &tol),
            ppf::check_pc(c, &tol),
            ppf::check_as(c, &tol),
            ppf::check_vt(c, &tol)
        )
    };

    // Sphere of radius 0.7 at the origin.
    let (n_r, n_i) = (Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.6, 0.0, 0.8));
    let c = PairFeature::compute(&(n_r * 0.7), &n_r, &(n_i * 0.7), &n_i).unwrap();
    show("sphere", &c);
    println!("         radius {:.12}", ppf::sphere_radius(&c).unwrap());

    // Cylinder of radius 0.4 about the z axis.
    let (n_r, n_i) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
    let (p_r, p_i) = (n_r * 0.4, n_i * 0.4 + Vec3::new(0.0, 0.0, 0.3));
    let c = PairFeature::compute(&p_r, &n_r, &p_i, &n_i).unwrap();
    show("cylinder", &c);
    let frame = ReferenceFrame::new(p_r, n_r);
    let v = ppf::cylinder_vote(&frame, &n_i, &c).unwrap();
    println!("         radius {:.12} axis {:.6?}", v.radius, frame.cylinder_axis(v.phi).as_slice());

    // Cone with apex at the origin, axis +z, opening angle 30°.
    let theta = 30f64.to_radians();
    let point = |u: Vec3, t: f64| {
        let (s, c) = theta.sin_cos();
        (Vec3::new(0.0, 0.0, c * t) + u * (s * t), u * c - Vec3::z() * s)
    };
    let (p_r, n_r) = point(Vec3::x(), 1.0);
    let (p_i, n_i) = point(Vec3::y(), 1.5);
    let c = PairFeature::compute(&p_r, &n_r, &p_i, &n_i).unwrap();
    show("cone", &c);
    let frame = ReferenceFrame::new(p_r, n_r);
    let v = ppf::cone_vote(&frame, &p_i, &n_i, &c, f64::INFINITY, 1.0).unwrap();
    let k = ppf::extract_cone(v.s_r, &v.axis, &p_r, &n_r).unwrap();
    println!(
        "         s_r {:.12} apex {:.6?} axis {:.6?} angle {:.9}°",
        v.s_r,
        k.apex.as_slice(),
        k.axis.as_slice(),
        k.angle.to_degrees()
    );
}
