//! Near-equal-area discretization of the upper unit hemisphere.
//!
//! Cells are arranged in latitude rings of constant polar-angle width `w`.
//! Ring 0 is a single polar cap of angular radius `w/2`; ring `k ≥ 1` spans
//! polar angles `[(k − ½)w, (k + ½)w]` and is split into as many equal
//! longitude cells as makes each cell's solid angle closest to the cap's.
//! The last ring ends exactly at the equator. Antipodal directions are
//! identified, so a vote below the equator lands on the mirrored cell.
//!
//! Votes are interpolated in the `(ϑ, φ)` chart: linear between the two
//! rings bracketing `ϑ` and, within each ring, between the two cells
//! bracketing `φ`. The cap is a single node at `ϑ = 0`, so the chart's
//! singularity at the pole never splits mass. Extraction averages in the same
//! chart, except around a peak at the cap, where an azimuthal-equidistant
//! `(x, y)` chart avoids averaging meaningless longitudes.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geometry::Vec3;

/// Maps `v` to its representative in the upper hemisphere. Directions on the
/// equator are canonicalized to `y > 0`, or `x > 0` when `y = 0`.
#[inline]
pub fn canonical_direction(v: &Vec3) -> Vec3 {
    let flip = v.z < 0.0 || (v.z == 0.0 && (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)));
    if flip {
        -v
    } else {
        *v
    }
}

#[derive(Clone, Debug)]
struct Ring {
    first: usize,
    count: usize,
    theta: f64,
}

/// Local chart coordinates of a direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartCoords {
    /// Azimuthal-equidistant coordinates around the pole (radians).
    Pole { x: f64, y: f64 },
    /// Polar angle and longitude (radians).
    Spherical { theta: f64, phi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HemisphereLocation {
    pub cell: usize,
    pub chart: ChartCoords,
}

/// Up to four `(cell, weight)` pairs summing to one.
#[derive(Clone, Copy, Debug, Default)]
pub struct Stencil {
    entries: [(usize, f64); 4],
    len: usize,
}

impl Stencil {
    #[inline]
    fn push(&mut self, cell: usize, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        if let Some(e) = self.entries[..self.len].iter_mut().find(|e| e.0 == cell) {
            e.1 += weight;
            return;
        }
        self.entries[self.len] = (cell, weight);
        self.len += 1;
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries[..self.len]
    }
}

#[derive(Clone, Debug)]
pub struct HemisphereGrid {
    ring_width: f64,
    rings: Vec<Ring>,
    centers: Vec<Vec3>,
    cell_ring: Vec<usize>,
    solid_angles: Vec<f64>,
    neighbors: Vec<Vec<usize>>,
}

impl HemisphereGrid {
    /// Layout whose cells have a solid angle of about `angle_bin²`.
    pub fn new(angle_bin: f64) -> Self {
        assert!(angle_bin > 0.0 && angle_bin < FRAC_PI_2, "angle bin out of range");
        // Cap of solid angle angle_bin² has angular radius angle_bin/√π.
        let target_width = 2.0 * angle_bin / PI.sqrt();
        let ring_count = ((FRAC_PI_2 / target_width - 0.5).round() as usize).max(1);
        let w = FRAC_PI_2 / (ring_count as f64 + 0.5);
        let cap_area = TAU * (1.0 - (w / 2.0).cos());

        let mut rings = vec![Ring { first: 0, count: 1, theta: 0.0 }];
        let mut centers = vec![Vec3::z()];
        let mut cell_ring = vec![0];
        let mut solid_angles = vec![cap_area];
        for k in 1..=ring_count {
            let lo = (k as f64 - 0.5) * w;
            let hi = ((k as f64 + 0.5) * w).min(FRAC_PI_2);
            let area = TAU * (lo.cos() - hi.cos());
            let count = ((area / cap_area).round() as usize).max(1);
            let theta = k as f64 * w;
            rings.push(Ring { first: centers.len(), count, theta });
            let (st, ct) = theta.sin_cos();
            for j in 0..count {
                let phi = j as f64 * TAU / count as f64;
                let (sp, cp) = phi.sin_cos();
                centers.push(Vec3::new(st * cp, st * sp, ct));
                cell_ring.push(k);
                solid_angles.push(area / count as f64);
            }
        }
        let mut grid = Self {
            ring_width: w,
            rings,
            centers,
            cell_ring,
            solid_angles,
            neighbors: Vec::new(),
        };
        grid.neighbors = (0..grid.len()).map(|c| grid.compute_neighbors(c)).collect();
        grid
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn ring_width(&self) -> f64 {
        self.ring_width
    }

    pub fn ring_count(&self) -> usize {
        self.rings.len()
    }

    pub fn center(&self, cell: usize) -> &Vec3 {
        &self.centers[cell]
    }

    pub fn solid_angle(&self, cell: usize) -> f64 {
        self.solid_angles[cell]
    }

    /// Largest angle between a cell's center and a point of the cell.
    pub fn angular_radius(&self, cell: usize) -> f64 {
        let ring = &self.rings[self.cell_ring[cell]];
        if self.cell_ring[cell] == 0 {
            return self.ring_width / 2.0;
        }
        let half_phi = PI / ring.count as f64;
        let lo = ring.theta - self.ring_width / 2.0;
        let hi = (ring.theta + self.ring_width / 2.0).min(FRAC_PI_2);
        let c = self.centers[cell];
        let phi_c = c.y.atan2(c.x);
        [lo, hi]
            .iter()
            .flat_map(|&t| [phi_c - half_phi, phi_c + half_phi].map(move |p| (t, p)))
            .map(|(t, p)| {
                let corner = Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
                corner.dot(&c).clamp(-1.0, 1.0).acos()
            })
            .fold(0.0, f64::max)
    }

    /// Adjacent cells (1-ring), excluding `cell` itself.
    pub fn neighbors(&self, cell: usize) -> &[usize] {
        &self.neighbors[cell]
    }

    fn cell_phi(&self, cell: usize) -> f64 {
        let ring = &self.rings[self.cell_ring[cell]];
        (cell - ring.first) as f64 * TAU / ring.count as f64
    }

    pub fn cell_ring(&self, cell: usize) -> usize {
        self.cell_ring[cell]
    }

    fn compute_neighbors(&self, cell: usize) -> Vec<usize> {
        let k = self.cell_ring[cell];
        let last = self.rings.len() - 1;
        let mut out = Vec::new();
        if k == 0 {
            let r = &self.rings[1];
            out.extend(r.first..r.first + r.count);
            return out;
        }
        let ring = &self.rings[k];
        let width = TAU / ring.count as f64;
        let phi = self.cell_phi(cell);
        let j = cell - ring.first;
        for dj in [ring.count - 1, 1] {
            let other = ring.first + (j + dj) % ring.count;
            if other != cell && !out.contains(&other) {
                out.push(other);
            }
        }
        let near_ring = |r: usize, phi_ref: f64, out: &mut Vec<usize>| {
            if r == 0 {
                if !out.contains(&0) {
                    out.push(0);
                }
                return;
            }
            let other = &self.rings[r];
            let other_width = TAU / other.count as f64;
            for c in other.first..other.first + other.count {
                let dphi = angle_diff(self.cell_phi(c), phi_ref).abs();
                if dphi <= width / 2.0 + other_width + 1e-12 && c != cell && !out.contains(&c) {
                    out.push(c);
                }
            }
        };
        near_ring(k - 1, phi, &mut out);
        if k < last {
            near_ring(k + 1, phi, &mut out);
        } else {
            near_ring(last, phi + PI, &mut out);
        }
        out
    }

    /// Mass-weighted mean direction of cells around the peak cell `anchor`,
    /// in the canonical hemisphere.
    pub fn average(&self, anchor: usize, masses: &[(usize, f64)]) -> Vec3 {
        let total: f64 = masses.iter().map(|e| e.1).sum();
        if total <= 0.0 {
            return self.centers[anchor];
        }
        if self.cell_ring[anchor] == 0 {
            return self.average_at_pole(masses, total);
        }
        let last = self.rings.len() - 1;
        let phi_a = self.cell_phi(anchor);
        let (mut theta_sum, mut phi_sum, mut phi_mass) = (0.0, 0.0, 0.0);
        for &(c, m) in masses {
            let r = self.cell_ring[c];
            let mut theta = self.rings[r].theta;
            let mut phi = self.cell_phi(c);
            if r == last && angle_diff(phi, phi_a).abs() > FRAC_PI_2 {
                // Mirror image across the equator.
                theta = PI - theta;
                phi -= PI;
            }
            theta_sum += m * theta;
            if r > 0 {
                phi_sum += m * angle_diff(phi, phi_a);
                phi_mass += m;
            }
        }
        let theta = theta_sum / total;
        let phi = phi_a + if phi_mass > 0.0 { phi_sum / phi_mass } else { 0.0 };
        let (st, ct) = theta.sin_cos();
        canonical_direction(&Vec3::new(st * phi.cos(), st * phi.sin(), ct))
    }

    /// Averages azimuthal-equidistant positions. The first ring's
    /// interpolation runs along arcs, so its chord shortening is undone.
    fn average_at_pole(&self, masses: &[(usize, f64)], total: f64) -> Vec3 {
        let ring1 = &self.rings[1];
        let (mut x, mut y) = (0.0, 0.0);
        let (mut x1, mut y1, mut m1) = (0.0, 0.0, 0.0);
        for &(c, m) in masses {
            let r = self.cell_ring[c];
            let rho = self.rings[r].theta;
            let phi = self.cell_phi(c);
            let (px, py) = (rho * phi.cos(), rho * phi.sin());
            x += m * px;
            y += m * py;
            if r == 1 {
                x1 += m * px;
                y1 += m * py;
                m1 += m;
            }
        }
        let shortening = if m1 > 0.0 {
            (x1.hypot(y1) / (ring1.theta * m1)).clamp((PI / ring1.count as f64).cos(), 1.0)
        } else {
            1.0
        };
        let rho = x.hypot(y) / total / shortening;
        let phi = y.atan2(x);
        let (sr, cr) = rho.sin_cos();
        canonical_direction(&Vec3::new(sr * phi.cos(), sr * phi.sin(), cr))
    }

    #[inline]
    fn angles(v: &Vec3) -> (f64, f64) {
        let theta = v.x.hypot(v.y).atan2(v.z);
        let phi = v.y.atan2(v.x).rem_euclid(TAU);
        (theta, if phi >= TAU { 0.0 } else { phi })
    }

    #[inline]
    fn cell_in_ring(&self, k: usize, phi: f64) -> usize {
        let ring = &self.rings[k];
        let j = (phi.rem_euclid(TAU) * ring.count as f64 / TAU + 0.5) as usize;
        ring.first + j % ring.count
    }

    /// Containing cell of `direction` (any sign).
    #[inline]
    pub fn cell(&self, direction: &Vec3) -> usize {
        let v = canonical_direction(direction);
        let (theta, phi) = Self::angles(&v);
        let k = ((theta / self.ring_width + 0.5) as usize).min(self.rings.len() - 1);
        if k == 0 {
            0
        } else {
            self.cell_in_ring(k, phi)
        }
    }

    /// Containing cell and chart coordinates of `direction` (any sign).
    pub fn lookup(&self, direction: &Vec3) -> HemisphereLocation {
        let v = canonical_direction(direction);
        let (theta, phi) = Self::angles(&v);
        let k = ((theta / self.ring_width + 0.5) as usize).min(self.rings.len() - 1);
        let cell = if k == 0 { 0 } else { self.cell_in_ring(k, phi) };
        let chart = if k == 0 {
            ChartCoords::Pole { x: theta * phi.cos(), y: theta * phi.sin() }
        } else {
            ChartCoords::Spherical { theta, phi }
        };
        HemisphereLocation { cell, chart }
    }

    /// Interpolation weights of `direction` over at most four cells.
    #[inline]
    pub fn stencil(&self, direction: &Vec3) -> Stencil {
        let v = canonical_direction(direction);
        let (theta, phi) = Self::angles(&v);
        let w = self.ring_width;
        let mut st = Stencil::default();
        let last = self.rings.len() - 1;
        let last_theta = self.rings[last].theta;
        if theta < last_theta {
            let k = ((theta / w) as usize).min(last - 1);
            let t = (theta / w - k as f64).clamp(0.0, 1.0);
            self.ring_pair(k, phi, 1.0 - t, &mut st);
            self.ring_pair(k + 1, phi, t, &mut st);
        } else {
            // Between the last ring and its mirror image across the equator.
            let t = ((theta - last_theta) / w).clamp(0.0, 1.0);
            self.ring_pair(last, phi, 1.0 - t, &mut st);
            self.ring_pair(last, phi + PI, t, &mut st);
        }
        st
    }

    #[inline]
    fn ring_pair(&self, k: usize, phi: f64, weight: f64, st: &mut Stencil) {
        if weight <= 0.0 {
            return;
        }
        if k == 0 {
            st.push(0, weight);
            return;
        }
        let ring = &self.rings[k];
        let m = ring.count as f64;
        let u = phi.rem_euclid(TAU) * m / TAU;
        let j0 = u.floor();
        let s = u - j0;
        let j0 = (j0 as i64).rem_euclid(ring.count as i64) as usize;
        st.push(ring.first + j0, weight * (1.0 - s));
        st.push(ring.first + (j0 + 1) % ring.count, weight * s);
    }
}

/// Signed difference `a − b` wrapped to (−π, π].
fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
