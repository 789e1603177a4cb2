//! Primitive parameterizations, signed distances, closest-point projections
//! and outward surface normals.
//!
//! All primitives are unbounded surfaces. Distances are signed, positive on
//! the side the outward normal points to.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Isometry3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on `‖normal‖ − 1` accepted by [`OrientedPoint::new`].
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// A position with its outward unit surface normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedPoint {
    pub position: Vec3,
    pub normal: Vec3,
}

impl OrientedPoint {
    pub fn new(position: Vec3, normal: Vec3) -> Result<Self> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("point position is not finite"));
        }
        let len = normal.norm();
        if !len.is_finite() || (len - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::invalid(format!(
                "normal must have unit length, got {len}"
            )));
        }
        Ok(Self { position, normal })
    }
}

/// An ordered set of oriented points with its cached scene diameter.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<OrientedPoint>,
    diameter: f64,
}

impl PointCloud {
    pub fn new(points: Vec<OrientedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("point cloud is empty"));
        }
        let diameter = scene_diameter(points.iter().map(|p| &p.position));
        Ok(Self { points, diameter })
    }

    pub fn points(&self) -> &[OrientedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Bounding-box diagonal of the positions.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn into_points(self) -> Vec<OrientedPoint> {
        self.points
    }
}

/// Length of the axis-aligned bounding-box diagonal; 0 for fewer than two
/// distinct positions.
pub fn scene_diameter<'a>(positions: impl IntoIterator<Item = &'a Vec3>) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    let mut any = false;
    for p in positions {
        lo = lo.inf(p);
        hi = hi.sup(p);
        any = true;
    }
    if any {
        (hi - lo).norm()
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    /// Signed distance of the origin along `normal`: `normal·p = offset` on the plane.
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vec3, offset: f64) -> Self {
        Self { normal: normal.normalize(), offset }
    }

    pub fn through(point: &Vec3, normal: &Vec3) -> Self {
        let normal = normal.normalize();
        Self { normal, offset: normal.dot(point) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self { center, radius }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylinder {
    /// Unit axis direction, sign-canonical (see [`canonical_axis`]).
    pub axis: Vec3,
    /// Axis point closest to the origin.
    pub foot: Vec3,
    pub radius: f64,
}

impl Cylinder {
    /// Builds a cylinder from any point on its axis; canonicalizes the axis
    /// sign and the foot point.
    pub fn new(axis: Vec3, point_on_axis: Vec3, radius: f64) -> Self {
        let axis = canonical_axis(axis.normalize());
        let foot = point_on_axis - axis * axis.dot(&point_on_axis);
        Self { axis, foot, radius }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    pub apex: Vec3,
    /// Unit axis pointing from the apex into the cone.
    pub axis: Vec3,
    /// Half opening angle in radians, in (0, π/2).
    pub angle: f64,
}

impl Cone {
    pub fn new(apex: Vec3, axis: Vec3, angle: f64) -> Self {
        Self { apex, axis: axis.normalize(), angle }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Plane,
    Sphere,
    Cylinder,
    Cone,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 4] = [
        PrimitiveKind::Plane,
        PrimitiveKind::Sphere,
        PrimitiveKind::Cylinder,
        PrimitiveKind::Cone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Plane => "plane",
            PrimitiveKind::Sphere => "sphere",
            PrimitiveKind::Cylinder => "cylinder",
            PrimitiveKind::Cone => "cone",
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plane" | "planes" => Ok(PrimitiveKind::Plane),
            "sphere" | "spheres" => Ok(PrimitiveKind::Sphere),
            "cylinder" | "cylinders" => Ok(PrimitiveKind::Cylinder),
            "cone" | "cones" => Ok(PrimitiveKind::Cone),
            other => Err(Error::invalid(format!("unknown primitive type `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Plane(Plane),
    Sphere(Sphere),
    Cylinder(Cylinder),
    Cone(Cone),
}

/// Gradient of the signed distance at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceNormal {
    pub direction: Vec3,
    /// Set when the gradient is undefined at the query point (sphere center,
    /// cylinder axis, cone apex) and `direction` is the deterministic fallback.
    pub singular: bool,
}

impl Primitive {
    pub fn kind(&self) -> PrimitiveKind {
        match self {
            Primitive::Plane(_) => PrimitiveKind::Plane,
            Primitive::Sphere(_) => PrimitiveKind::Sphere,
            Primitive::Cylinder(_) => PrimitiveKind::Cylinder,
            Primitive::Cone(_) => PrimitiveKind::Cone,
        }
    }

    /// Checks the per-variant invariants.
    pub fn validate(&self) -> Result<()> {
        let unit = |v: &Vec3| (v.norm() - 1.0).abs() <= UNIT_TOLERANCE;
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        let ok = match self {
            Primitive::Plane(p) => unit(&p.normal) && p.offset.is_finite(),
            Primitive::Sphere(s) => finite(&s.center) && s.radius > 0.0 && s.radius.is_finite(),
            Primitive::Cylinder(c) => {
                unit(&c.axis) && finite(&c.foot) && c.radius > 0.0 && c.radius.is_finite()
            }
            Primitive::Cone(c) => {
                unit(&c.axis)
                    && finite(&c.apex)
                    && c.angle > 0.0
                    && c.angle < std::f64::consts::FRAC_PI_2
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid {} parameters: {self:?}", self.kind())))
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        match self {
            Primitive::Plane(pl) => pl.normal.dot(p) - pl.offset,
            Primitive::Sphere(s) => (p - s.center).norm() - s.radius,
            Primitive::Cylinder(c) => {
                let v = p - c.foot;
                (v - c.axis * c.axis.dot(&v)).norm() - c.radius
            }
            Primitive::Cone(c) => {
                let (h, rho, _) = cone_coordinates(c, p);
                let (sin, cos) = c.angle.sin_cos();
                if h * cos + rho * sin >= 0.0 {
                    rho * cos - h * sin
                } else {
                    (p - c.apex).norm()
                }
            }
        }
    }

    /// Closest point on the surface.
    pub fn project(&self, p: &Vec3) -> Vec3 {
        match self {
            Primitive::Plane(pl) => p - pl.normal * (pl.normal.dot(p) - pl.offset),
            Primitive::Sphere(s) => {
                let v = p - s.center;
                let n = v.norm();
                let dir = if n > 0.0 { v / n } else { Vec3::x() };
                s.center + dir * s.radius
            }
            Primitive::Cylinder(c) => {
                let v = p - c.foot;
                let along = c.axis.dot(&v);
                let radial = v - c.axis * along;
                let n = radial.norm();
                let dir = if n > 0.0 { radial / n } else { fallback_perpendicular(&c.axis) };
                c.foot + c.axis * along + dir * c.radius
            }
            Primitive::Cone(c) => {
                let (h, rho, radial) = cone_coordinates(c, p);
                let (sin, cos) = c.angle.sin_cos();
                let t = h * cos + rho * sin;
                if t > 0.0 {
                    c.apex + (c.axis * cos + radial * sin) * t
                } else {
                    c.apex
                }
            }
        }
    }

    /// Outward unit gradient of [`Primitive::signed_distance`] at `p`.
    pub fn surface_normal_at(&self, p: &Vec3) -> SurfaceNormal {
        match self {
            Primitive::Plane(pl) => SurfaceNormal { direction: pl.normal, singular: false },
            Primitive::Sphere(s) => {
                let v = p - s.center;
                let n = v.norm();
                if n > 0.0 {
                    SurfaceNormal { direction: v / n, singular: false }
                } else {
                    SurfaceNormal { direction: Vec3::x(), singular: true }
                }
            }
            Primitive::Cylinder(c) => {
                let v = p - c.foot;
                let radial = v - c.axis * c.axis.dot(&v);
                let n = radial.norm();
                if n > 0.0 {
                    SurfaceNormal { direction: radial / n, singular: false }
                } else {
                    SurfaceNormal { direction: fallback_perpendicular(&c.axis), singular: true }
                }
            }
            Primitive::Cone(c) => {
                let v = p - c.apex;
                let (h, rho, radial) = cone_coordinates(c, p);
                let (sin, cos) = c.angle.sin_cos();
                if h * cos + rho * sin >= 0.0 {
                    // On the axis inside the cone the radial direction is a
                    // fallback and the gradient is not defined.
                    let singular = rho == 0.0;
                    SurfaceNormal { direction: radial * cos - c.axis * sin, singular }
                } else {
                    let n = v.norm();
                    if n > 0.0 {
                        SurfaceNormal { direction: v / n, singular: false }
                    } else {
                        SurfaceNormal { direction: -c.axis, singular: true }
                    }
                }
            }
        }
    }

    /// Applies a rigid transform to the primitive.
    pub fn transformed(&self, iso: &Isometry3<f64>) -> Primitive {
        let point = |v: &Vec3| iso.transform_point(&(*v).into()).coords;
        let vector = |v: &Vec3| iso.transform_vector(v);
        match self {
            Primitive::Plane(pl) => {
                let anchor = pl.normal * pl.offset;
                Primitive::Plane(Plane::through(&point(&anchor), &vector(&pl.normal)))
            }
            Primitive::Sphere(s) => Primitive::Sphere(Sphere::new(point(&s.center), s.radius)),
            Primitive::Cylinder(c) => {
                Primitive::Cylinder(Cylinder::new(vector(&c.axis), point(&c.foot), c.radius))
            }
            Primitive::Cone(c) => Primitive::Cone(Cone::new(point(&c.apex), vector(&c.axis), c.angle)),
        }
    }
}

/// Axial height, radial distance and unit radial direction of `p` relative
/// to a cone. The radial direction falls back to [`fallback_perpendicular`]
/// on the axis.
fn cone_coordinates(c: &Cone, p: &Vec3) -> (f64, f64, Vec3) {
    let v = p - c.apex;
    let h = c.axis.dot(&v);
    let radial = v - c.axis * h;
    let rho = radial.norm();
    let dir = if rho > 0.0 { radial / rho } else { fallback_perpendicular(&c.axis) };
    (h, rho, dir)
}

/// Deterministic unit vector perpendicular to `axis`: the first of +x, +y,
/// +z whose component orthogonal to `axis` is not negligible.
pub fn fallback_perpendicular(axis: &Vec3) -> Vec3 {
    for candidate in [Vec3::x(), Vec3::y(), Vec3::z()] {
        let v = candidate - axis * axis.dot(&candidate);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
    Vec3::x()
}

/// Flips `axis` so that its largest-magnitude component is positive.
pub fn canonical_axis(axis: Vec3) -> Vec3 {
    let idx = axis.iamax();
    if axis[idx] < 0.0 {
        -axis
    } else {
        axis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn unit_sphere() -> Primitive {
        Primitive::Sphere(Sphere::new(Vec3::zeros(), 1.0))
    }

    fn cone45() -> Primitive {
        Primitive::Cone(Cone::new(Vec3::zeros(), Vec3::z(), FRAC_PI_4))
    }

    #[test]
    fn signed_distance_examples() {
        assert_relative_eq!(unit_sphere().signed_distance(&Vec3::new(2.0, 0.0, 0.0)), 1.0);
        assert!(cone45().signed_distance(&Vec3::new(1.0, 0.0, 1.0)).abs() < 1e-15);
        let plane = Primitive::Plane(Plane::new(Vec3::z(), 0.0));
        assert_relative_eq!(plane.signed_distance(&Vec3::new(0.0, 0.0, -0.3)), -0.3);
    }

    #[test]
    fn cone_distance_behind_apex_is_apex_distance() {
        let p = Vec3::new(0.3, 0.0, -2.0);
        assert_relative_eq!(cone45().signed_distance(&p), p.norm());
    }

    #[test]
    fn projection_examples() {
        assert_relative_eq!(unit_sphere().project(&Vec3::new(2.0, 0.0, 0.0)), Vec3::x());
        let cyl = Primitive::Cylinder(Cylinder::new(Vec3::z(), Vec3::zeros(), 1.0));
        assert_relative_eq!(cyl.project(&Vec3::new(2.0, 0.0, 5.0)), Vec3::new(1.0, 0.0, 5.0));
        assert_relative_eq!(cone45().project(&Vec3::new(0.0, 0.0, -1.0)), Vec3::zeros());
    }

    #[test]
    fn degenerate_projections_use_x_then_y() {
        assert_relative_eq!(unit_sphere().project(&Vec3::zeros()), Vec3::x());
        let cyl = Primitive::Cylinder(Cylinder::new(Vec3::x(), Vec3::zeros(), 2.0));
        assert_relative_eq!(cyl.project(&Vec3::new(3.0, 0.0, 0.0)), Vec3::new(3.0, 2.0, 0.0));
        let n = unit_sphere().surface_normal_at(&Vec3::zeros());
        assert!(n.singular);
        assert_eq!(n.direction, Vec3::x());
    }

    #[test]
    fn surface_normal_examples() {
        let n = unit_sphere().surface_normal_at(&Vec3::new(2.0, 0.0, 0.0));
        assert_relative_eq!(n.direction, Vec3::x());
        assert!(!n.singular);
        let plane = Primitive::Plane(Plane::new(Vec3::z(), 0.0));
        assert_relative_eq!(plane.surface_normal_at(&Vec3::new(5.0, -3.0, 9.0)).direction, Vec3::z());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let n = cone45().surface_normal_at(&Vec3::new(1.0, 0.0, 1.0));
        assert_relative_eq!(n.direction, Vec3::new(h, 0.0, -h), epsilon = 1e-12);
    }

    #[test]
    fn cone_normal_matches_finite_differences() {
        let cone = cone45();
        let p = Vec3::new(1.0, 0.0, 1.0);
        let h = 1e-6;
        let mut fd = Vec3::zeros();
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = h;
            fd[k] = (cone.signed_distance(&(p + e)) - cone.signed_distance(&(p - e))) / (2.0 * h);
        }
        assert_relative_eq!(fd, cone.surface_normal_at(&p).direction, epsilon = 1e-5);
    }

    #[test]
    fn scene_diameter_examples() {
        let cube: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        assert_relative_eq!(scene_diameter(&cube), 3f64.sqrt());
        assert_eq!(scene_diameter(&[Vec3::new(1.0, 2.0, 3.0)]), 0.0);
        assert_relative_eq!(scene_diameter(&[Vec3::zeros(), Vec3::new(3.0, 4.0, 0.0)]), 5.0);
    }

    #[test]
    fn cylinder_axis_is_canonical() {
        let c = Cylinder::new(Vec3::new(0.1, -0.9, 0.2), Vec3::new(5.0, 5.0, 5.0), 1.0);
        assert!(c.axis.y > 0.0);
        assert!(c.axis.dot(&c.foot).abs() < 1e-12);
    }

    #[test]
    fn oriented_point_rejects_non_unit_normals() {
        assert!(OrientedPoint::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.9)).is_err());
        assert!(OrientedPoint::new(Vec3::new(f64::NAN, 0.0, 0.0), Vec3::z()).is_err());
        assert!(OrientedPoint::new(Vec3::zeros(), Vec3::z()).is_ok());
    }

    #[test]
    fn primitive_kind_parses() {
        assert_eq!("Sphere".parse::<PrimitiveKind>().unwrap(), PrimitiveKind::Sphere);
        assert!("torus".parse::<PrimitiveKind>().is_err());
    }
}
