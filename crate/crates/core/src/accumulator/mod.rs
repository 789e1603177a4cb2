//! Vote stores for the four primitive types.
//!
//! Planes vote into a single scalar, spheres into a radius line, cylinders
//! into a radius × axis-angle grid (the angle wraps modulo π) and cones into
//! an axis-distance line × hemisphere grid. Votes are spread with linear
//! interpolation weights so that a single exact parameter is recovered by
//! the weighted bin average at extraction.

pub mod hemisphere;

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use crate::geometry::Vec3;
use hemisphere::HemisphereGrid;

/// Bins of equal width covering `(0, width · count]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearAxis {
    width: f64,
    count: usize,
}

impl LinearAxis {
    pub fn new(width: f64, count: usize) -> Self {
        assert!(width > 0.0 && count > 0, "empty axis");
        Self { width, count }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn max(&self) -> f64 {
        self.width * self.count as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.width
    }

    pub fn contains(&self, value: f64) -> bool {
        value > 0.0 && value <= self.max()
    }

    /// Two `(bin, weight)` pairs; values within half a bin of either end go
    /// entirely to the edge bin.
    #[inline]
    pub fn spread(&self, value: f64) -> Option<[(usize, f64); 2]> {
        if !self.contains(value) {
            return None;
        }
        let u = value / self.width - 0.5;
        if u <= 0.0 {
            return Some([(0, 1.0), (0, 0.0)]);
        }
        let last = self.count - 1;
        if u >= last as f64 {
            return Some([(last, 1.0), (last, 0.0)]);
        }
        let i = u.floor() as usize;
        let t = u - i as f64;
        Some([(i, 1.0 - t), (i + 1, t)])
    }

    #[inline]
    pub fn nearest(&self, value: f64) -> Option<usize> {
        if !self.contains(value) {
            return None;
        }
        Some(((value / self.width) as usize).min(self.count - 1))
    }

    fn window(&self, i: usize, k: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(k)..=(i + k).min(self.count - 1)
    }
}

/// Cyclic bins of equal width covering `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleAxis {
    count: usize,
}

impl AngleAxis {
    pub fn new(count: usize) -> Self {
        assert!(count > 0, "empty axis");
        Self { count }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn width(&self) -> f64 {
        PI / self.count as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.width()
    }

    #[inline]
    pub fn spread(&self, angle: f64) -> [(usize, f64); 2] {
        let u = angle.rem_euclid(PI) / self.width() - 0.5;
        let j = u.floor();
        let t = u - j;
        let n = self.count as i64;
        let j0 = (j as i64).rem_euclid(n) as usize;
        [(j0, 1.0 - t), ((j0 + 1) % self.count, t)]
    }

    #[inline]
    pub fn nearest(&self, angle: f64) -> usize {
        ((angle.rem_euclid(PI) / self.width()) as usize).min(self.count - 1)
    }

    /// Offsets `−k..=k`, truncated so no bin is visited twice.
    fn offsets(&self, k: usize) -> std::ops::RangeInclusive<i64> {
        let k = k.min((self.count - 1) / 2) as i64;
        -k..=k
    }

    fn shifted(&self, j: usize, offset: i64) -> usize {
        (j as i64 + offset).rem_euclid(self.count as i64) as usize
    }
}

/// Extracted parameters together with the support they were read from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extraction<P> {
    pub params: P,
    /// Total mass of the maximal bin and its neighborhood.
    pub mass: f64,
    /// Mass of the maximal bin alone.
    pub peak: f64,
}

/// How votes are turned into parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractionRule {
    /// Neighborhood radius in bins (hemisphere: adjacency rings).
    pub neighborhood: usize,
    /// Average bin centers over the neighborhood rather than taking the
    /// maximal bin's center.
    pub bin_averaging: bool,
    /// The neighborhood mass must strictly exceed this.
    pub min_mass: f64,
}

impl Default for ExtractionRule {
    fn default() -> Self {
        Self { neighborhood: 1, bin_averaging: true, min_mass: 8.0 }
    }
}

fn argmax(bins: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut best_v = 0.0;
    for (i, &v) in bins.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = Some(i);
        }
    }
    best
}

/// Plane votes: a single mass per reference point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarAccumulator {
    total: f64,
}

impl ScalarAccumulator {
    #[inline]
    pub fn vote(&mut self, weight: f64) {
        self.total += weight;
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn reset(&mut self) {
        self.total = 0.0;
    }

    pub fn extract(&self, rule: &ExtractionRule) -> Option<Extraction<()>> {
        (self.total > rule.min_mass && self.total > 0.0)
            .then_some(Extraction { params: (), mass: self.total, peak: self.total })
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "mass")?;
        writeln!(w, "{}", self.total)
    }
}

/// Radius (or axis distance) line.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAccumulator1D {
    axis: LinearAxis,
    bins: Vec<f64>,
    dropped: u64,
}

impl GridAccumulator1D {
    pub fn new(axis: LinearAxis) -> Self {
        Self { axis, bins: vec![0.0; axis.count], dropped: 0 }
    }

    pub fn axis(&self) -> &LinearAxis {
        &self.axis
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    /// Out-of-range votes seen since the last reset.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn reset(&mut self) {
        self.bins.fill(0.0);
        self.dropped = 0;
    }

    /// Splits `weight` between the two bins bracketing `value`.
    #[inline]
    pub fn spread(&mut self, value: f64, weight: f64) {
        match self.axis.spread(value) {
            Some(parts) => {
                for (i, w) in parts {
                    self.bins[i] += weight * w;
                }
            }
            None => self.dropped += 1,
        }
    }

    /// Adds `weight` to the bin containing `value`.
    #[inline]
    pub fn vote_nearest(&mut self, value: f64, weight: f64) {
        match self.axis.nearest(value) {
            Some(i) => self.bins[i] += weight,
            None => self.dropped += 1,
        }
    }

    pub fn extract(&self, rule: &ExtractionRule) -> Option<Extraction<f64>> {
        let i = argmax(&self.bins)?;
        let (mut mass, mut moment) = (0.0, 0.0);
        for j in self.axis.window(i, rule.neighborhood) {
            mass += self.bins[j];
            moment += self.bins[j] * self.axis.center(j);
        }
        if mass <= rule.min_mass {
            return None;
        }
        let value = if rule.bin_averaging { moment / mass } else { self.axis.center(i) };
        Some(Extraction { params: value, mass, peak: self.bins[i] })
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "radius,mass")?;
        for (i, m) in self.bins.iter().enumerate() {
            writeln!(w, "{},{}", self.axis.center(i), m)?;
        }
        Ok(())
    }
}

/// Radius × cyclic axis angle.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAccumulator2D {
    radius: LinearAxis,
    angle: AngleAxis,
    bins: Vec<f64>,
    dropped: u64,
}

impl GridAccumulator2D {
    pub fn new(radius: LinearAxis, angle: AngleAxis) -> Self {
        Self { radius, angle, bins: vec![0.0; radius.count * angle.count], dropped: 0 }
    }

    #[inline]
    fn index(&self, r: usize, a: usize) -> usize {
        r * self.angle.count + a
    }

    pub fn radius_axis(&self) -> &LinearAxis {
        &self.radius
    }

    pub fn angle_axis(&self) -> &AngleAxis {
        &self.angle
    }

    pub fn bin(&self, r: usize, a: usize) -> f64 {
        self.bins[self.index(r, a)]
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn reset(&mut self) {
        self.bins.fill(0.0);
        self.dropped = 0;
    }

    #[inline]
    pub fn spread(&mut self, radius: f64, angle: f64, weight: f64) {
        let Some(rs) = self.radius.spread(radius) else {
            self.dropped += 1;
            return;
        };
        let as_ = self.angle.spread(angle);
        for (r, wr) in rs {
            for (a, wa) in as_ {
                let idx = self.index(r, a);
                self.bins[idx] += weight * wr * wa;
            }
        }
    }

    #[inline]
    pub fn vote_nearest(&mut self, radius: f64, angle: f64, weight: f64) {
        let Some(r) = self.radius.nearest(radius) else {
            self.dropped += 1;
            return;
        };
        let idx = self.index(r, self.angle.nearest(angle));
        self.bins[idx] += weight;
    }

    /// Returns `(radius, angle)` with the angle in `[0, π)`.
    pub fn extract(&self, rule: &ExtractionRule) -> Option<Extraction<(f64, f64)>> {
        let best = argmax(&self.bins)?;
        let (ri, ai) = (best / self.angle.count, best % self.angle.count);
        let base = self.angle.center(ai);
        let (mut mass, mut mr, mut ma) = (0.0, 0.0, 0.0);
        for r in self.radius.window(ri, rule.neighborhood) {
            for off in self.angle.offsets(rule.neighborhood) {
                let m = self.bins[self.index(r, self.angle.shifted(ai, off))];
                mass += m;
                mr += m * self.radius.center(r);
                // Unwrapped relative to the maximal bin.
                ma += m * off as f64 * self.angle.width();
            }
        }
        if mass <= rule.min_mass {
            return None;
        }
        let params = if rule.bin_averaging {
            (mr / mass, (base + ma / mass).rem_euclid(PI))
        } else {
            (self.radius.center(ri), base)
        };
        Some(Extraction { params, mass, peak: self.bins[best] })
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "radius,angle,mass")?;
        for r in 0..self.radius.count {
            for a in 0..self.angle.count {
                let c = (self.radius.center(r), self.angle.center(a));
                writeln!(w, "{},{},{}", c.0, c.1, self.bin(r, a))?;
            }
        }
        Ok(())
    }
}

/// Axis distance × axis direction on the hemisphere.
#[derive(Clone, Debug)]
pub struct ConeAccumulator {
    distance: LinearAxis,
    grid: Arc<HemisphereGrid>,
    bins: Vec<f64>,
    dropped: u64,
}

impl ConeAccumulator {
    pub fn new(distance: LinearAxis, grid: Arc<HemisphereGrid>) -> Self {
        let bins = vec![0.0; distance.count * grid.len()];
        Self { distance, grid, bins, dropped: 0 }
    }

    #[inline]
    fn index(&self, s: usize, cell: usize) -> usize {
        s * self.grid.len() + cell
    }

    pub fn distance_axis(&self) -> &LinearAxis {
        &self.distance
    }

    pub fn grid(&self) -> &HemisphereGrid {
        &self.grid
    }

    pub fn bin(&self, s: usize, cell: usize) -> f64 {
        self.bins[self.index(s, cell)]
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn reset(&mut self) {
        self.bins.fill(0.0);
        self.dropped = 0;
    }

    /// Linear in the axis distance × chart-bilinear on the hemisphere.
    #[inline]
    pub fn spread(&mut self, s_r: f64, axis: &Vec3, weight: f64) {
        let Some(ss) = self.distance.spread(s_r) else {
            self.dropped += 1;
            return;
        };
        let st = self.grid.stencil(axis);
        for (s, ws) in ss {
            if ws == 0.0 {
                continue;
            }
            for &(cell, wc) in st.entries() {
                let idx = self.index(s, cell);
                self.bins[idx] += weight * ws * wc;
            }
        }
    }

    #[inline]
    pub fn vote_nearest(&mut self, s_r: f64, axis: &Vec3, weight: f64) {
        let Some(s) = self.distance.nearest(s_r) else {
            self.dropped += 1;
            return;
        };
        let idx = self.index(s, self.grid.cell(axis));
        self.bins[idx] += weight;
    }

    /// `(cell, 0.0)` for the cell and its `k`-ring.
    fn cell_window(&self, cell: usize, k: usize) -> Vec<(usize, f64)> {
        let mut out = vec![cell];
        let mut frontier = vec![cell];
        for _ in 0..k {
            let mut next = Vec::new();
            for &c in &frontier {
                for &n in self.grid.neighbors(c) {
                    if !out.contains(&n) {
                        out.push(n);
                        next.push(n);
                    }
                }
            }
            frontier = next;
        }
        out.into_iter().map(|c| (c, 0.0)).collect()
    }

    /// Returns `(s_r, axis)` with the axis in the canonical hemisphere.
    pub fn extract(&self, rule: &ExtractionRule) -> Option<Extraction<(f64, Vec3)>> {
        let best = argmax(&self.bins)?;
        let n = self.grid.len();
        let (si, ci) = (best / n, best % n);
        let srange = self.distance.window(si, rule.neighborhood);
        let (mut mass, mut ms) = (0.0, 0.0);
        let mut cells = self.cell_window(ci, rule.neighborhood);
        for entry in cells.iter_mut() {
            for s in srange.clone() {
                let m = self.bins[self.index(s, entry.0)];
                entry.1 += m;
                ms += m * self.distance.center(s);
            }
            mass += entry.1;
        }
        if mass <= rule.min_mass {
            return None;
        }
        let params = if rule.bin_averaging {
            (ms / mass, self.grid.average(ci, &cells))
        } else {
            (self.distance.center(si), *self.grid.center(ci))
        };
        Some(Extraction { params, mass, peak: self.bins[best] })
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "s_r,axis_x,axis_y,axis_z,mass")?;
        for s in 0..self.distance.count {
            for c in 0..self.grid.len() {
                let a = self.grid.center(c);
                writeln!(w, "{},{},{},{},{}", self.distance.center(s), a.x, a.y, a.z, self.bin(s, c))?;
            }
        }
        Ok(())
    }
}
