//! Whitespace-separated `x y z nx ny nz` rows. Blank lines and lines
//! starting with `#` are skipped.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::OrientedPoint;

use super::oriented_point;

pub fn read_xyzn(path: &Path) -> Result<Vec<OrientedPoint>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_xyzn_from(path, BufReader::new(file))
}

pub(crate) fn read_xyzn_from(path: &Path, r: impl BufRead) -> Result<Vec<OrientedPoint>> {
    let mut points = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), line: line_no, message };
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() == 3 {
            return Err(Error::NormalsRequired { path: path.to_path_buf(), missing: "nx".into() });
        }
        if words.len() != 6 {
            return Err(parse_err(format!("expected 6 values, found {}", words.len())));
        }
        let mut v = [0.0; 6];
        for (slot, w) in words.iter().enumerate() {
            v[slot] = w.parse().map_err(|_| parse_err(format!("bad number `{w}`")))?;
        }
        points.push(oriented_point(v).map_err(parse_err)?);
    }
    Ok(points)
}

pub fn write_xyzn(path: &Path, points: &[OrientedPoint]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_xyzn_to(&mut w, points).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_xyzn_to(w: &mut impl Write, points: &[OrientedPoint]) -> std::io::Result<()> {
    for p in points {
        let (a, n) = (p.position, p.normal);
        writeln!(w, "{} {} {} {} {} {}", a.x, a.y, a.z, n.x, n.y, n.z)?;
    }
    Ok(())
}
