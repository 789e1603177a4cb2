//! Candidate clustering by vote-mass-weighted averaging.

use crate::geometry::{Cone, Cylinder, OrientedPoint, Plane, Primitive, Sphere, Vec3};

use super::Candidate;

/// Thresholds of the merge test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeTest {
    /// Absolute distance bound.
    pub distance: f64,
    /// Normal angle bound in radians.
    pub angle: f64,
}

impl MergeTest {
    /// `point` is compatible with `primitive`: close to it, with a normal
    /// within the angle bound of the surface normal there.
    pub fn accepts(&self, point: &OrientedPoint, primitive: &Primitive) -> bool {
        if primitive.signed_distance(&point.position).abs() >= self.distance {
            return false;
        }
        let g = primitive.surface_normal_at(&point.position).direction;
        point.normal.dot(&g) > self.angle.cos()
    }
}

/// Greedy agglomeration in descending vote mass. A candidate joins the first
/// cluster of its type where either reference point is compatible with the
/// other's primitive; rounds repeat on the merged output until nothing merges.
///
/// The returned clusters keep the seed's reference point and carry the
/// summed mass. With `averaging` off, the seed's parameters are kept.
pub fn cluster(candidates: &[Candidate], test: &MergeTest, averaging: bool) -> Vec<Candidate> {
    let mut current: Vec<Candidate> = candidates.to_vec();
    loop {
        let (next, merged) = cluster_round(&current, test, averaging);
        current = next;
        if !merged {
            return current;
        }
    }
}

fn cluster_round(candidates: &[Candidate], test: &MergeTest, averaging: bool) -> (Vec<Candidate>, bool) {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    // Stable: equal masses keep input order.
    order.sort_by(|&a, &b| candidates[b].vote_mass.total_cmp(&candidates[a].vote_mass));

    let mut members: Vec<Vec<usize>> = Vec::new();
    for &j in &order {
        let cj = &candidates[j];
        let home = members.iter().position(|m| {
            let seed = &candidates[m[0]];
            seed.primitive.kind() == cj.primitive.kind()
                && (test.accepts(&seed.reference, &cj.primitive) || test.accepts(&cj.reference, &seed.primitive))
        });
        match home {
            Some(h) => members[h].push(j),
            None => members.push(vec![j]),
        }
    }
    let merged = members.len() < candidates.len();
    let out = members
        .iter()
        .map(|m| {
            let group: Vec<&Candidate> = m.iter().map(|&i| &candidates[i]).collect();
            let seed = group[0];
            let vote_mass = group.iter().map(|c| c.vote_mass).sum();
            let primitive = if averaging && group.len() > 1 { average(&group) } else { seed.primitive };
            Candidate { primitive, reference: seed.reference, vote_mass }
        })
        .collect();
    (out, merged)
}

/// Sign of `v` relative to `reference`.
fn aligned(v: &Vec3, reference: &Vec3) -> Vec3 {
    if v.dot(reference) < 0.0 {
        -v
    } else {
        *v
    }
}

/// Type-specific weighted mean; `group[0]` is the heaviest member and fixes
/// sign conventions. All members share its type.
fn average(group: &[&Candidate]) -> Primitive {
    let total: f64 = group.iter().map(|c| c.vote_mass).sum();
    let mean = |f: &dyn Fn(&Primitive) -> Vec3| -> Vec3 {
        group.iter().map(|c| f(&c.primitive) * c.vote_mass).sum::<Vec3>() / total
    };
    let mean_scalar = |f: &dyn Fn(&Primitive) -> f64| -> f64 {
        group.iter().map(|c| f(&c.primitive) * c.vote_mass).sum::<f64>() / total
    };
    match group[0].primitive {
        Primitive::Plane(seed) => {
            let normal = mean(&|p| match p {
                Primitive::Plane(q) => aligned(&q.normal, &seed.normal),
                _ => unreachable!(),
            });
            let offset = mean_scalar(&|p| match p {
                Primitive::Plane(q) => {
                    if q.normal.dot(&seed.normal) < 0.0 {
                        -q.offset
                    } else {
                        q.offset
                    }
                }
                _ => unreachable!(),
            });
            Primitive::Plane(Plane::new(normal, offset))
        }
        Primitive::Sphere(_) => {
            let center = mean(&|p| match p {
                Primitive::Sphere(q) => q.center,
                _ => unreachable!(),
            });
            let radius = mean_scalar(&|p| match p {
                Primitive::Sphere(q) => q.radius,
                _ => unreachable!(),
            });
            Primitive::Sphere(Sphere::new(center, radius))
        }
        Primitive::Cylinder(seed) => {
            let axis = mean(&|p| match p {
                Primitive::Cylinder(q) => aligned(&q.axis, &seed.axis),
                _ => unreachable!(),
            })
            .normalize();
            let foot = mean(&|p| match p {
                Primitive::Cylinder(q) => q.foot,
                _ => unreachable!(),
            });
            let radius = mean_scalar(&|p| match p {
                Primitive::Cylinder(q) => q.radius,
                _ => unreachable!(),
            });
            Primitive::Cylinder(Cylinder::new(axis, foot, radius))
        }
        Primitive::Cone(seed) => {
            let apex = mean(&|p| match p {
                Primitive::Cone(q) => q.apex,
                _ => unreachable!(),
            });
            let axis = mean(&|p| match p {
                Primitive::Cone(q) => aligned(&q.axis, &seed.axis),
                _ => unreachable!(),
            });
            let angle = mean_scalar(&|p| match p {
                Primitive::Cone(q) => q.angle,
                _ => unreachable!(),
            });
            Primitive::Cone(Cone::new(apex, axis, angle))
        }
    }
}
