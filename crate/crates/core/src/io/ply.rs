//! PLY clouds with per-vertex normals.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::OrientedPoint;

use super::oriented_point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_float(self) -> bool {
        matches!(self, Scalar::F32 | Scalar::F64)
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

const FIELDS: [&str; 6] = ["x", "y", "z", "nx", "ny", "nz"];

struct Header {
    encoding: PlyEncoding,
    vertex_count: usize,
    properties: Vec<(String, Scalar)>,
    /// Position of each of x, y, z, nx, ny, nz in `properties`.
    columns: [usize; 6],
    /// Header lines, for error line numbers in ASCII bodies.
    lines: usize,
}

fn read_header(path: &Path, r: &mut impl BufRead) -> Result<Header> {
    let format_err = |message: String| Error::Format { path: path.to_path_buf(), message };
    let mut line = String::new();
    let mut next = |line: &mut String| -> Result<bool> {
        line.clear();
        let n = r.read_line(line).map_err(|e| Error::io(path, e))?;
        Ok(n > 0)
    };
    if !next(&mut line)? || line.trim_end() != "ply" {
        return Err(format_err("not a PLY file (missing `ply` magic)".into()));
    }
    let mut lines = 1;
    let mut encoding = None;
    let mut vertex: Option<usize> = None;
    let mut current_is_vertex = false;
    let mut seen_vertex = false;
    let mut properties = Vec::new();
    loop {
        if !next(&mut line)? {
            return Err(format_err("unterminated header".into()));
        }
        lines += 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["format", fmt, _version] => {
                encoding = Some(match *fmt {
                    "ascii" => PlyEncoding::Ascii,
                    "binary_little_endian" => PlyEncoding::BinaryLittleEndian,
                    "binary_big_endian" => {
                        return Err(format_err("big-endian binary PLY is not supported".into()))
                    }
                    other => return Err(format_err(format!("unknown PLY format `{other}`"))),
                });
            }
            ["element", name, count] => {
                let count: usize = count.parse().map_err(|_| format_err(format!("bad element count `{count}`")))?;
                current_is_vertex = *name == "vertex";
                if current_is_vertex {
                    vertex = Some(count);
                    seen_vertex = true;
                } else if !seen_vertex && count > 0 {
                    return Err(format_err("the vertex element must come first".into()));
                }
            }
            ["property", "list", ..] => {
                if current_is_vertex {
                    return Err(format_err("list properties on vertices are not supported".into()));
                }
            }
            ["property", ty, name] => {
                if current_is_vertex {
                    let scalar = Scalar::parse(ty).ok_or_else(|| format_err(format!("unknown property type `{ty}`")))?;
                    properties.push((name.to_string(), scalar));
                }
            }
            _ => return Err(format_err(format!("unexpected header line `{}`", line.trim_end()))),
        }
    }
    let encoding = encoding.ok_or_else(|| format_err("missing format line".into()))?;
    let vertex_count = vertex.ok_or_else(|| format_err("missing vertex element".into()))?;
    let mut columns = [0; 6];
    for (slot, field) in FIELDS.iter().enumerate() {
        let pos = properties.iter().position(|(n, _)| n == field);
        let Some(pos) = pos else {
            if slot >= 3 {
                return Err(Error::NormalsRequired { path: path.to_path_buf(), missing: field.to_string() });
            }
            return Err(format_err(format!("missing vertex property `{field}`")));
        };
        if !properties[pos].1.is_float() {
            return Err(format_err(format!("property `{field}` must be float or double")));
        }
        columns[slot] = pos;
    }
    Ok(Header { encoding, vertex_count, properties, columns, lines })
}

pub fn read_ply(path: &Path) -> Result<Vec<OrientedPoint>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_ply_from(path, &mut BufReader::new(file))
}

pub(crate) fn read_ply_from(path: &Path, r: &mut impl BufRead) -> Result<Vec<OrientedPoint>> {
    let header = read_header(path, r)?;
    let mut points = Vec::with_capacity(header.vertex_count);
    match header.encoding {
        PlyEncoding::Ascii => {
            let mut line = String::new();
            let mut line_no = header.lines;
            while points.len() < header.vertex_count {
                line.clear();
                if r.read_line(&mut line).map_err(|e| Error::io(path, e))? == 0 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: line_no + 1,
                        message: format!("expected {} vertices, found {}", header.vertex_count, points.len()),
                    });
                }
                line_no += 1;
                if line.trim().is_empty() {
                    continue;
                }
                let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), line: line_no, message };
                let words: Vec<&str> = line.split_whitespace().collect();
                if words.len() < header.properties.len() {
                    return Err(parse_err(format!(
                        "expected {} values, found {}",
                        header.properties.len(),
                        words.len()
                    )));
                }
                let mut v = [0.0; 6];
                for (slot, &col) in header.columns.iter().enumerate() {
                    v[slot] = words[col].parse().map_err(|_| parse_err(format!("bad number `{}`", words[col])))?;
                }
                points.push(oriented_point(v).map_err(parse_err)?);
            }
        }
        PlyEncoding::BinaryLittleEndian => {
            let offsets: Vec<usize> = header
                .properties
                .iter()
                .scan(0, |acc, (_, s)| {
                    let o = *acc;
                    *acc += s.size();
                    Some(o)
                })
                .collect();
            let stride: usize = header.properties.iter().map(|(_, s)| s.size()).sum();
            let mut buf = vec![0u8; stride];
            for i in 0..header.vertex_count {
                r.read_exact(&mut buf).map_err(|e| match e.kind() {
                    std::io::ErrorKind::UnexpectedEof => Error::Format {
                        path: path.to_path_buf(),
                        message: format!("truncated body: expected {} vertices, found {i}", header.vertex_count),
                    },
                    _ => Error::io(path, e),
                })?;
                let mut v = [0.0; 6];
                for (slot, &col) in header.columns.iter().enumerate() {
                    v[slot] = header.properties[col].1.read_le(&buf[offsets[col]..]);
                }
                points.push(oriented_point(v).map_err(|m| Error::Format {
                    path: path.to_path_buf(),
                    message: format!("vertex {i}: {m}"),
                })?);
            }
        }
    }
    Ok(points)
}

/// Writes doubles, so reading back is lossless in either encoding.
pub fn write_ply(path: &Path, points: &[OrientedPoint], encoding: PlyEncoding) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_ply_to(&mut w, points, encoding).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_ply_to(w: &mut impl Write, points: &[OrientedPoint], encoding: PlyEncoding) -> std::io::Result<()> {
    let format = match encoding {
        PlyEncoding::Ascii => "ascii",
        PlyEncoding::BinaryLittleEndian => "binary_little_endian",
    };
    writeln!(w, "ply\nformat {format} 1.0\nelement vertex {}", points.len())?;
    for f in FIELDS {
        writeln!(w, "property double {f}")?;
    }
    writeln!(w, "end_header")?;
    for p in points {
        let v = [p.position.x, p.position.y, p.position.z, p.normal.x, p.normal.y, p.normal.z];
        match encoding {
            PlyEncoding::Ascii => writeln!(w, "{} {} {} {} {} {}", v[0], v[1], v[2], v[3], v[4], v[5])?,
            PlyEncoding::BinaryLittleEndian => {
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}
