//! Per-reference voting: joint voting decisions for one point pair and
//! candidate extraction from the four accumulators.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::accumulator::hemisphere::HemisphereGrid;
use crate::accumulator::{
    AngleAxis, ConeAccumulator, ExtractionRule, GridAccumulator1D, GridAccumulator2D, LinearAxis,
    ScalarAccumulator,
};
use crate::geometry::{fallback_perpendicular, Cylinder, Plane, Primitive, PrimitiveKind, Sphere, Vec3};
use crate::ppf::{self, PairFeature, PairRejection, ReferenceFrame, Tolerances};

use super::DetectorConfig;

/// Which branches of the voting decision fired for a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VoteOutcome {
    pub plane: bool,
    pub sphere: bool,
    pub cylinder: bool,
    pub cone: bool,
}

/// One extraction from one accumulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypedExtraction {
    pub primitive: Primitive,
    pub mass: f64,
    pub peak: f64,
}

/// The four accumulators of one reference point together with the voting
/// settings they were built for.
#[derive(Clone, Debug)]
pub struct VotingSpace {
    pub plane: ScalarAccumulator,
    pub sphere: GridAccumulator1D,
    pub cylinder: GridAccumulator2D,
    pub cone: ConeAccumulator,
    tolerances: Tolerances,
    enabled: [bool; 4],
    spreading: bool,
    scale: f64,
    /// `(sin, cos)` of axis samples, one per cell width, along the half
    /// great circle used when a pair fixes the cone's axis distance but not
    /// its direction.
    circle: Arc<[(f64, f64)]>,
}

fn kind_index(kind: PrimitiveKind) -> usize {
    match kind {
        PrimitiveKind::Plane => 0,
        PrimitiveKind::Sphere => 1,
        PrimitiveKind::Cylinder => 2,
        PrimitiveKind::Cone => 3,
    }
}

impl VotingSpace {
    /// Accumulators sized for a scene of diameter `diameter`.
    pub fn new(config: &DetectorConfig, diameter: f64) -> Self {
        let grid = Arc::new(HemisphereGrid::new(config.angle_bin));
        Self::with_grid(config, diameter, grid)
    }

    pub(crate) fn with_grid(config: &DetectorConfig, diameter: f64, grid: Arc<HemisphereGrid>) -> Self {
        let radius = LinearAxis::new(config.radius_bin_fraction * diameter, config.radius_bin_count);
        let angle_bins = ((PI / config.angle_bin).round() as usize).max(1);
        let k = (PI / grid.ring_width()).ceil() as usize;
        let circle: Arc<[(f64, f64)]> = (0..k).map(|j| (PI * j as f64 / k as f64).sin_cos()).collect();
        let mut enabled = [false; 4];
        for &k in &config.enabled_types {
            enabled[kind_index(k)] = true;
        }
        Self {
            plane: ScalarAccumulator::default(),
            sphere: GridAccumulator1D::new(radius),
            cylinder: GridAccumulator2D::new(radius, AngleAxis::new(angle_bins)),
            cone: ConeAccumulator::new(radius, grid),
            tolerances: config.tolerances,
            enabled,
            spreading: config.use_vote_spreading,
            scale: diameter,
            circle,
        }
    }

    pub fn reset(&mut self) {
        self.plane.reset();
        self.sphere.reset();
        self.cylinder.reset();
        self.cone.reset();
    }

    fn on(&self, kind: PrimitiveKind) -> bool {
        self.enabled[kind_index(kind)]
    }

    /// Casts the votes of one pair. Disabled types keep their place in the
    /// decision chain but receive no mass.
    pub fn vote_pair(&mut self, frame: &ReferenceFrame, p_i: &Vec3, n_i: &Vec3) -> VoteOutcome {
        let mut out = VoteOutcome::default();
        let Some(c) = PairFeature::compute(&frame.position, &frame.normal, p_i, n_i) else {
            return out;
        };
        let tol = self.tolerances;
        if !ppf::check_convex(&c, &tol) {
            return out;
        }
        let weighted = self.spreading;

        if ppf::check_np(&c, &tol) {
            if ppf::check_pc(&c, &tol) && self.on(PrimitiveKind::Plane) {
                let w = if weighted {
                    ppf::constraint_weight_np(&c, &tol) * ppf::constraint_weight_pc(&c, &tol)
                } else {
                    1.0
                };
                if w > 0.0 {
                    self.plane.vote(w);
                    out.plane = true;
                }
            }
            return out;
        }

        if self.on(PrimitiveKind::Cone) {
            out.cone = self.cast_cone(frame, p_i, n_i, &c);
        }
        if !ppf::check_as(&c, &tol) {
            return out;
        }
        let w_as = if weighted { ppf::constraint_weight_as(&c, &tol) } else { 1.0 };
        if self.on(PrimitiveKind::Cylinder) && w_as > 0.0 {
            if let Ok(v) = ppf::cylinder_vote(frame, n_i, &c) {
                if self.cylinder.radius_axis().contains(v.radius) {
                    if weighted {
                        self.cylinder.spread(v.radius, v.phi, w_as);
                    } else {
                        self.cylinder.vote_nearest(v.radius, v.phi, 1.0);
                    }
                    out.cylinder = true;
                }
            }
        }
        if !ppf::check_vt(&c, &tol) {
            return out;
        }
        let w = if weighted { w_as * ppf::constraint_weight_vt(&c, &tol) } else { 1.0 };
        if self.on(PrimitiveKind::Sphere) && w > 0.0 {
            if let Ok(r) = ppf::sphere_radius(&c) {
                if self.sphere.axis().contains(r) {
                    if weighted {
                        self.sphere.spread(r, w);
                    } else {
                        self.sphere.vote_nearest(r, 1.0);
                    }
                    out.sphere = true;
                }
            }
        }
        out
    }

    fn cast_cone(&mut self, frame: &ReferenceFrame, p_i: &Vec3, n_i: &Vec3, c: &PairFeature) -> bool {
        let max = self.cone.distance_axis().max();
        match ppf::cone_vote(frame, p_i, n_i, c, max, self.scale) {
            Ok(v) => {
                if self.spreading {
                    self.cone.spread(v.s_r, &v.axis, 1.0);
                } else {
                    self.cone.vote_nearest(v.s_r, &v.axis, 1.0);
                }
                true
            }
            Err(PairRejection::EqualHeight { s_r }) => {
                // Every axis through the common axis point perpendicular to
                // n_r − n_i is consistent with the pair. The samples are
                // denser than the cells, so each goes to its nearest cell.
                let u = (frame.normal - n_i).normalize();
                let e1 = fallback_perpendicular(&u);
                let e2 = u.cross(&e1);
                let w = 1.0 / self.circle.len() as f64;
                for &(s, co) in self.circle.iter() {
                    self.cone.vote_nearest(s_r, &(e1 * co + e2 * s), w);
                }
                true
            }
            Err(_) => false,
        }
    }

    /// Valid extraction of every enabled type, in type order.
    pub fn extract(&self, frame: &ReferenceFrame, rule: &ExtractionRule) -> Vec<TypedExtraction> {
        let (p, n) = (frame.position, frame.normal);
        let mut out = Vec::with_capacity(4);
        if self.on(PrimitiveKind::Plane) {
            if let Some(e) = self.plane.extract(rule) {
                let primitive = Primitive::Plane(Plane::through(&p, &n));
                out.push(TypedExtraction { primitive, mass: e.mass, peak: e.peak });
            }
        }
        if self.on(PrimitiveKind::Sphere) {
            if let Some(e) = self.sphere.extract(rule) {
                let primitive = Primitive::Sphere(Sphere::new(p - n * e.params, e.params));
                out.push(TypedExtraction { primitive, mass: e.mass, peak: e.peak });
            }
        }
        if self.on(PrimitiveKind::Cylinder) {
            if let Some(e) = self.cylinder.extract(rule) {
                let (r, phi) = e.params;
                let axis = frame.cylinder_axis(phi);
                let primitive = Primitive::Cylinder(Cylinder::new(axis, p - n * r, r));
                out.push(TypedExtraction { primitive, mass: e.mass, peak: e.peak });
            }
        }
        if self.on(PrimitiveKind::Cone) {
            if let Some(e) = self.cone.extract(rule) {
                let (s, axis) = e.params;
                if let Ok(cone) = ppf::extract_cone(s, &axis, &p, &n) {
                    let primitive = Primitive::Cone(cone);
                    out.push(TypedExtraction { primitive, mass: e.mass, peak: e.peak });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn space() -> VotingSpace {
        // Unit-sized scene so radius 1 fits the 40 × 0.05 range.
        let config = DetectorConfig { radius_bin_fraction: 0.05, ..DetectorConfig::default() };
        VotingSpace::new(&config, 1.0)
    }

    fn totals(s: &VotingSpace) -> [f64; 4] {
        [s.plane.total(), s.sphere.total(), s.cylinder.total(), s.cone.total()]
    }

    #[test]
    fn coplanar_pair_votes_plane_only() {
        let mut s = space();
        let frame = ReferenceFrame::new(Vec3::zeros(), Vec3::z());
        let out = s.vote_pair(&frame, &Vec3::x(), &Vec3::z());
        assert_eq!(out, VoteOutcome { plane: true, ..VoteOutcome::default() });
        assert_eq!(totals(&s), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sphere_pair_votes_sphere_cylinder_and_cone() {
        let mut s = space();
        let frame = ReferenceFrame::new(Vec3::x(), Vec3::x());
        let out = s.vote_pair(&frame, &Vec3::y(), &Vec3::y());
        assert!(out.sphere && out.cylinder && out.cone && !out.plane);
        let t = totals(&s);
        assert_eq!(t[0], 0.0);
        assert!(t[1] > 0.0 && t[2] > 0.0);
        assert_relative_eq!(t[3], 1.0, epsilon = 1e-9);
        let e = s.sphere.extract(&ExtractionRule { min_mass: 0.0, ..Default::default() }).unwrap();
        assert_relative_eq!(e.params, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn concave_pair_changes_nothing() {
        let mut s = space();
        let frame = ReferenceFrame::new(Vec3::x(), -Vec3::x());
        assert_eq!(s.vote_pair(&frame, &Vec3::y(), &Vec3::y()), VoteOutcome::default());
        assert_eq!(totals(&s), [0.0; 4]);
    }

    #[test]
    fn cone_pair_extracts_its_cone() {
        let mut s = space();
        let h = FRAC_1_SQRT_2;
        let frame = ReferenceFrame::new(Vec3::new(0.5, 0.0, 0.5), Vec3::new(h, 0.0, -h));
        let n_i = Vec3::new(0.0, h, -h);
        for _ in 0..10 {
            s.vote_pair(&frame, &Vec3::new(0.0, 1.0, 1.0), &n_i);
        }
        let rule = ExtractionRule::default();
        let cone = s.extract(&frame, &rule).into_iter().find(|e| e.primitive.kind() == PrimitiveKind::Cone);
        let Primitive::Cone(c) = cone.unwrap().primitive else { unreachable!() };
        assert_relative_eq!(c.apex, Vec3::zeros(), epsilon = 1e-9);
        assert_relative_eq!(c.angle, std::f64::consts::FRAC_PI_4, epsilon = 1e-9);
    }

    #[test]
    fn disabled_types_get_no_mass() {
        let config = DetectorConfig {
            radius_bin_fraction: 0.05,
            enabled_types: vec![PrimitiveKind::Sphere],
            ..DetectorConfig::default()
        };
        let mut s = VotingSpace::new(&config, 1.0);
        let frame = ReferenceFrame::new(Vec3::x(), Vec3::x());
        s.vote_pair(&frame, &Vec3::y(), &Vec3::y());
        let t = totals(&s);
        assert!(t[1] > 0.0);
        assert_eq!([t[0], t[2], t[3]], [0.0; 3]);
    }
}
