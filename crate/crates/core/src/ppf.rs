//! Point pair features, relaxed voting conditions, constraint weights and the
//! closed-form per-pair primitive parameters.
//!
//! The feature of a pair `(p_r, n_r)`, `(p_i, n_i)` with `d = p_i − p_r` is the
//! trig-free vector `(‖d‖², n_r·d, n_i·d, n_r·n_i)`. Every voting decision is
//! taken on it directly; trigonometry is only evaluated for constraint weights
//! of pairs that actually vote.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::accumulator::hemisphere::canonical_direction;
use crate::geometry::{Cone, Vec3};

/// Normals closer to parallel than this (in `1 − n_r·n_i`) carry no radius or
/// axis information.
const PARALLEL_EPS: f64 = 1e-12;

/// Radians; see [`PairFeature::is_convex_admissible`].
const CONVEX_SLACK: f64 = 1e-9;

/// Trig-free pair feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairFeature {
    /// `‖d‖²`
    pub c1: f64,
    /// `n_r·d`
    pub c2: f64,
    /// `n_i·d`
    pub c3: f64,
    /// `n_r·n_i`
    pub c4: f64,
}

impl PairFeature {
    /// Returns `None` for coincident points.
    #[inline]
    pub fn compute(p_r: &Vec3, n_r: &Vec3, p_i: &Vec3, n_i: &Vec3) -> Option<Self> {
        Self::from_offset(&(p_i - p_r), n_r, n_i)
    }

    #[inline]
    pub(crate) fn from_offset(d: &Vec3, n_r: &Vec3, n_i: &Vec3) -> Option<Self> {
        let c1 = d.norm_squared();
        if c1 <= 0.0 {
            return None;
        }
        Some(Self { c1, c2: n_r.dot(d), c3: n_i.dot(d), c4: n_r.dot(n_i).clamp(-1.0, 1.0) })
    }

    /// Both normals point away from the other point, as on any convex surface.
    /// Angles past π/2 by less than `CONVEX_SLACK` count as rounding.
    #[inline]
    pub fn is_convex_admissible(&self) -> bool {
        let slack = CONVEX_SLACK * CONVEX_SLACK * self.c1;
        (self.c2 <= 0.0 || self.c2 * self.c2 <= slack) && (self.c3 >= 0.0 || self.c3 * self.c3 <= slack)
    }

    #[inline]
    fn s2(&self) -> f64 {
        (self.c1 - self.c2 * self.c2).max(0.0).sqrt()
    }

    #[inline]
    fn s3(&self) -> f64 {
        (self.c1 - self.c3 * self.c3).max(0.0).sqrt()
    }

    #[inline]
    fn s4(&self) -> f64 {
        (1.0 - self.c4 * self.c4).max(0.0).sqrt()
    }

    /// `‖d‖² cos(F₂ + F₃ − π)`
    #[inline]
    fn symmetry_term(&self) -> f64 {
        self.s2() * self.s3() - self.c2 * self.c3
    }

    /// `‖d‖² cos(F₂ − F₃ − F₄)`
    #[inline]
    fn triangle_term(&self) -> f64 {
        let (s2, s3, s4) = (self.s2(), self.s3(), self.s4());
        self.c2 * self.c3 * self.c4 + s2 * s3 * self.c4 + s2 * self.c3 * s4 - self.c2 * s3 * s4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct ToleranceAngles {
    normals_parallel: f64,
    coplanar: f64,
    angles_symmetric: f64,
    vectors_triangular: f64,
}

/// Angular tolerances of the four relaxed voting conditions, with their
/// cosines and squared sines precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ToleranceAngles", into = "ToleranceAngles")]
pub struct Tolerances {
    angles: ToleranceAngles,
    cos_np: f64,
    sin2_pc: f64,
    cos_as: f64,
    cos_vt: f64,
}

impl From<ToleranceAngles> for Tolerances {
    fn from(a: ToleranceAngles) -> Self {
        let sin_pc = a.coplanar.sin();
        Self {
            angles: a,
            cos_np: a.normals_parallel.cos(),
            sin2_pc: sin_pc * sin_pc,
            cos_as: a.angles_symmetric.cos(),
            cos_vt: a.vectors_triangular.cos(),
        }
    }
}

impl From<Tolerances> for ToleranceAngles {
    fn from(t: Tolerances) -> Self {
        t.angles
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::uniform(10f64.to_radians())
    }
}

impl Tolerances {
    /// Angles in radians, each in (0, π/2).
    pub fn new(
        normals_parallel: f64,
        coplanar: f64,
        angles_symmetric: f64,
        vectors_triangular: f64,
    ) -> Self {
        ToleranceAngles { normals_parallel, coplanar, angles_symmetric, vectors_triangular }.into()
    }

    pub fn uniform(eps: f64) -> Self {
        Self::new(eps, eps, eps, eps)
    }

    pub fn normals_parallel(&self) -> f64 {
        self.angles.normals_parallel
    }

    pub fn coplanar(&self) -> f64 {
        self.angles.coplanar
    }

    pub fn angles_symmetric(&self) -> f64 {
        self.angles.angles_symmetric
    }

    pub fn vectors_triangular(&self) -> f64 {
        self.angles.vectors_triangular
    }

    pub fn is_valid(&self) -> bool {
        let a = self.angles;
        [a.normals_parallel, a.coplanar, a.angles_symmetric, a.vectors_triangular]
            .iter()
            .all(|&e| e > 0.0 && e < FRAC_PI_2)
    }
}

/// Convexity relaxed like coplanarity: `F₂ > π/2 − ε_PC` and `F₃ < π/2 + ε_PC`.
#[inline]
pub fn check_convex(c: &PairFeature, tol: &Tolerances) -> bool {
    let bound = tol.sin2_pc * c.c1;
    (c.c2 <= 0.0 || c.c2 * c.c2 < bound) && (c.c3 >= 0.0 || c.c3 * c.c3 < bound)
}

/// Normals parallel: `F₄ < ε_NP`.
#[inline]
pub fn check_np(c: &PairFeature, tol: &Tolerances) -> bool {
    c.c4 > tol.cos_np
}

/// Points coplanar: both `|F₂ − π/2|` and `|F₃ − π/2|` below `ε_PC`.
#[inline]
pub fn check_pc(c: &PairFeature, tol: &Tolerances) -> bool {
    let bound = tol.sin2_pc * c.c1;
    c.c2 * c.c2 < bound && c.c3 * c.c3 < bound
}

/// Angles symmetric: `|F₂ + F₃ − π| < ε_AS`.
#[inline]
pub fn check_as(c: &PairFeature, tol: &Tolerances) -> bool {
    c.symmetry_term() > tol.cos_as * c.c1
}

/// Vectors triangular: `|F₂ − F₃ − F₄| < ε_VT`.
#[inline]
pub fn check_vt(c: &PairFeature, tol: &Tolerances) -> bool {
    c.triangle_term() > tol.cos_vt * c.c1
}

#[inline]
fn linear_weight(deviation: f64, eps: f64) -> f64 {
    (1.0 - deviation.abs() / eps).clamp(0.0, 1.0)
}

pub fn constraint_weight_np(c: &PairFeature, tol: &Tolerances) -> f64 {
    linear_weight(c.c4.clamp(-1.0, 1.0).acos(), tol.angles.normals_parallel)
}

/// Product of the two coplanarity factors (deviation of `F₂` and of `F₃` from π/2).
pub fn constraint_weight_pc(c: &PairFeature, tol: &Tolerances) -> f64 {
    let len = c.c1.sqrt();
    let dev2 = (c.c2.abs() / len).min(1.0).asin();
    let dev3 = (c.c3.abs() / len).min(1.0).asin();
    let eps = tol.angles.coplanar;
    linear_weight(dev2, eps) * linear_weight(dev3, eps)
}

pub fn constraint_weight_as(c: &PairFeature, tol: &Tolerances) -> f64 {
    let cos = (c.symmetry_term() / c.c1).clamp(-1.0, 1.0);
    linear_weight(cos.acos(), tol.angles.angles_symmetric)
}

pub fn constraint_weight_vt(c: &PairFeature, tol: &Tolerances) -> f64 {
    let cos = (c.triangle_term() / c.c1).clamp(-1.0, 1.0);
    linear_weight(cos.acos(), tol.angles.vectors_triangular)
}

/// Why a pair cannot cast a particular vote.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairRejection {
    /// Normals (numerically) parallel; no radius or axis is defined.
    ParallelNormals,
    /// Radius or axis distance is not positive.
    NonPositive,
    /// Parameter beyond the accumulator range.
    OutOfRange,
    /// Both axis points coincide, so the pair does not fix a cone axis. The
    /// axis distance is still defined and carried along.
    EqualHeight { s_r: f64 },
    /// Axis lies in the tangent plane of the reference point.
    AxisInTangentPlane,
    /// Opening angle outside (0, π/2).
    AngleOutOfRange,
}

/// Radius shared by sphere and cylinder pairs: `(C₂ − C₃) / (2(C₄ − 1))`.
#[inline]
pub fn sphere_radius(c: &PairFeature) -> Result<f64, PairRejection> {
    if c.c4 >= 1.0 - PARALLEL_EPS {
        return Err(PairRejection::ParallelNormals);
    }
    let r = (c.c2 - c.c3) / (2.0 * (c.c4 - 1.0));
    if r > 0.0 {
        Ok(r)
    } else {
        Err(PairRejection::NonPositive)
    }
}

/// Per-reference quantities shared by every pair with the same reference
/// point: position, normal, and the rotation taking the normal to +x.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceFrame {
    pub position: Vec3,
    pub normal: Vec3,
    rotation: Matrix3<f64>,
}

impl ReferenceFrame {
    pub fn new(position: Vec3, normal: Vec3) -> Self {
        Self { position, normal, rotation: rotation_to_x(&normal) }
    }

    /// Rotation `R_x` with `R_x · normal = +x`.
    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    /// Cylinder axis for chart angle `phi`: `R_xᵀ (0, cos φ, sin φ)`.
    pub fn cylinder_axis(&self, phi: f64) -> Vec3 {
        let (s, c) = phi.sin_cos();
        self.rotation.tr_mul(&Vec3::new(0.0, c, s))
    }

    /// Chart angle in [0, π) of a direction in the tangent plane.
    pub fn cylinder_angle(&self, axis: &Vec3) -> f64 {
        let local = self.rotation * axis;
        let phi = local.z.atan2(local.y);
        let phi = phi.rem_euclid(PI);
        if phi >= PI {
            0.0
        } else {
            phi
        }
    }
}

/// Minimal rotation taking unit `n` to +x; rotation by π about +z when `n = −x`.
pub fn rotation_to_x(n: &Vec3) -> Matrix3<f64> {
    let c = n.x;
    if 1.0 + c < 1e-12 {
        return Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
    }
    // Rodrigues with v = n × x: R = I + [v]× + [v]×² / (1 + c).
    let v = Vec3::new(0.0, n.z, -n.y);
    let k = Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0);
    Matrix3::identity() + k + k * k / (1.0 + c)
}

/// Cylinder voting parameters of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderVote {
    pub radius: f64,
    /// Axis angle in the reference tangent chart, in [0, π).
    pub phi: f64,
}

/// Radius from the shared closed form, axis from `n_r × n_i`.
#[inline]
pub fn cylinder_vote(
    frame: &ReferenceFrame,
    n_i: &Vec3,
    c: &PairFeature,
) -> Result<CylinderVote, PairRejection> {
    let radius = sphere_radius(c)?;
    let axis = frame.normal.cross(n_i);
    if axis.norm_squared() < 1e-24 {
        return Err(PairRejection::ParallelNormals);
    }
    Ok(CylinderVote { radius, phi: frame.cylinder_angle(&axis) })
}

/// Cone voting parameters of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeVote {
    /// Distance from the reference point to the axis along `−n_r`.
    pub s_r: f64,
    /// Unit axis direction, canonicalized to the upper hemisphere.
    pub axis: Vec3,
}

/// `s_r = C₃ / (1 − C₄)`; axis parallel to `q_i − q_r = d − (C₃n_r + C₂n_i)/(C₄ − 1)`.
///
/// `max_s_r` is the accumulator range; `scale` (the scene diameter) sets the
/// threshold below which the two axis points are considered equal.
#[inline]
pub fn cone_vote(
    frame: &ReferenceFrame,
    p_i: &Vec3,
    n_i: &Vec3,
    c: &PairFeature,
    max_s_r: f64,
    scale: f64,
) -> Result<ConeVote, PairRejection> {
    if c.c4 >= 1.0 - PARALLEL_EPS {
        return Err(PairRejection::ParallelNormals);
    }
    let s_r = c.c3 / (1.0 - c.c4);
    if s_r <= 0.0 {
        return Err(PairRejection::NonPositive);
    }
    if s_r > max_s_r {
        return Err(PairRejection::OutOfRange);
    }
    let d = p_i - frame.position;
    let diff = d - (frame.normal * c.c3 + n_i * c.c2) / (c.c4 - 1.0);
    let len = diff.norm();
    if len < 1e-9 * scale {
        return Err(PairRejection::EqualHeight { s_r });
    }
    Ok(ConeVote { s_r, axis: canonical_direction(&(diff / len)) })
}

/// Cone from the extracted `(ŝ_r, â)` and the reference point.
pub fn extract_cone(
    s_r: f64,
    axis: &Vec3,
    p_r: &Vec3,
    n_r: &Vec3,
) -> Result<Cone, PairRejection> {
    let denom = axis.dot(n_r);
    if denom.abs() <= 1e-9 {
        return Err(PairRejection::AxisInTangentPlane);
    }
    let apex = p_r + (axis / denom - n_r) * s_r;
    let side = (p_r - apex).dot(axis);
    if side == 0.0 || !side.is_finite() {
        return Err(PairRejection::AxisInTangentPlane);
    }
    let signed = if side > 0.0 { *axis } else { -axis };
    let sin = -signed.dot(n_r);
    if !(sin > 0.0 && sin < 1.0) {
        return Err(PairRejection::AngleOutOfRange);
    }
    Ok(Cone::new(apex, signed, sin.asin()))
}
