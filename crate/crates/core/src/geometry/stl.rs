//! STL reading and writing, ASCII and binary.
//!
//! Binary layout: 80-byte header, little-endian `u32` triangle count, then one
//! 50-byte record per triangle (normal and three vertices as 12 `f32`, followed
//! by a `u16` attribute word).

use log::warn;

use crate::{Error, Result, Vec3};

const HEADER_LEN: usize = 80;
const RECORD_LEN: usize = 50;

/// Triangle soup with per-triangle unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub normals: Vec<Vec3>,
    /// Zero-area triangles removed while reading.
    pub dropped_degenerate: usize,
}

impl TriangleMesh {
    /// Builds a mesh from triangle corner triples, dropping zero-area triangles.
    pub fn from_triangles(corners: impl IntoIterator<Item = [Vec3; 3]>) -> Result<Self> {
        let mut mesh = TriangleMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            normals: Vec::new(),
            dropped_degenerate: 0,
        };
        for tri in corners {
            mesh.push(tri)?;
        }
        if mesh.dropped_degenerate > 0 {
            warn!("dropped {} degenerate triangles", mesh.dropped_degenerate);
        }
        if mesh.triangles.is_empty() {
            return Err(Error::InvalidParameter("mesh has no non-degenerate triangles".into()));
        }
        Ok(mesh)
    }

    fn push(&mut self, [a, b, c]: [Vec3; 3]) -> Result<()> {
        if ![a, b, c].iter().all(|v| v.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "triangle {} has a non-finite vertex",
                self.triangles.len() + self.dropped_degenerate
            )));
        }
        let n = (b - a).cross(&(c - a));
        let norm = n.norm();
        if norm == 0.0 {
            self.dropped_degenerate += 1;
            return Ok(());
        }
        let base = self.vertices.len();
        self.vertices.extend([a, b, c]);
        self.triangles.push([base, base + 1, base + 2]);
        self.normals.push(n / norm);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn corners(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Signed enclosed volume by the divergence theorem; meaningful only for
    /// closed, consistently oriented meshes.
    pub fn signed_volume(&self) -> f64 {
        (0..self.len())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

/// Parses ASCII or binary STL bytes.
pub fn parse_stl(bytes: &[u8]) -> Result<TriangleMesh> {
    if bytes.is_empty() {
        return Err(Error::StlBinary {
            offset: 0,
            message: "empty input".into(),
        });
    }
    if bytes.len() >= HEADER_LEN + 4 {
        let count = read_u32(bytes, HEADER_LEN) as usize;
        if count.checked_mul(RECORD_LEN).and_then(|n| n.checked_add(HEADER_LEN + 4)) == Some(bytes.len()) {
            return parse_binary(bytes);
        }
    }
    let head = &bytes[..bytes.len().min(512)];
    let text_start = head.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(head.len());
    if head[text_start..].starts_with(b"solid") {
        return parse_ascii(bytes);
    }
    parse_binary(bytes)
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn read_f32(bytes: &[u8], at: usize) -> f64 {
    f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as f64
}

fn parse_binary(bytes: &[u8]) -> Result<TriangleMesh> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(Error::StlBinary {
            offset: bytes.len(),
            message: format!("truncated header: {} bytes, expected at least 84", bytes.len()),
        });
    }
    let count = read_u32(bytes, HEADER_LEN) as usize;
    let body = HEADER_LEN + 4;
    let available = (bytes.len() - body) / RECORD_LEN;
    if available < count {
        return Err(Error::StlBinary {
            offset: body + available * RECORD_LEN,
            message: format!("truncated payload: header declares {count} triangles, found {available}"),
        });
    }
    let corners = (0..count).map(|t| {
        let rec = body + t * RECORD_LEN + 12;
        let v = |k: usize| {
            let at = rec + 12 * k;
            Vec3::new(read_f32(bytes, at), read_f32(bytes, at + 4), read_f32(bytes, at + 8))
        };
        [v(0), v(1), v(2)]
    });
    TriangleMesh::from_triangles(corners.collect::<Vec<_>>())
}

fn parse_ascii(bytes: &[u8]) -> Result<TriangleMesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::StlAscii {
        line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
        message: "invalid UTF-8".into(),
    })?;

    #[derive(PartialEq, Clone, Copy)]
    enum State {
        Start,
        Solid,
        Facet,
        Loop(usize),
        EndLoop,
        Done,
    }

    let mut state = State::Start;
    let mut triangles = Vec::new();
    let mut current = [Vec3::zeros(); 3];
    let err = |line: usize, message: String| Error::StlAscii { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        state = match (state, keyword) {
            (State::Start, "solid") => State::Solid,
            (State::Solid, "facet") => {
                if tokens.next() != Some("normal") {
                    return Err(err(line, "expected 'facet normal'".into()));
                }
                State::Facet
            }
            (State::Solid, "endsolid") => State::Done,
            (State::Facet, "outer") => {
                if tokens.next() != Some("loop") {
                    return Err(err(line, "expected 'outer loop'".into()));
                }
                State::Loop(0)
            }
            (State::Loop(k), "vertex") if k < 3 => {
                let mut xyz = [0.0; 3];
                for c in xyz.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| err(line, "vertex needs three coordinates".into()))?;
                    *c = tok
                        .parse::<f64>()
                        .map_err(|_| err(line, format!("invalid coordinate '{tok}'")))?;
                }
                current[k] = Vec3::new(xyz[0], xyz[1], xyz[2]);
                State::Loop(k + 1)
            }
            (State::Loop(3), "endloop") => State::EndLoop,
            (State::EndLoop, "endfacet") => {
                triangles.push(current);
                State::Solid
            }
            (State::Done, _) => return Err(err(line, format!("unexpected '{keyword}' after endsolid"))),
            (_, other) => return Err(err(line, format!("unexpected keyword '{other}'"))),
        };
    }
    if state != State::Done {
        return Err(err(text.lines().count(), "missing 'endsolid'".into()));
    }
    TriangleMesh::from_triangles(triangles).map_err(|e| err(text.lines().count(), e.to_string()))
}

/// Binary STL encoding (coordinates stored as `f32`).
pub fn write_stl_binary(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + RECORD_LEN * mesh.len());
    let mut header = [0u8; HEADER_LEN];
    let tag = b"tlsph binary stl";
    header[..tag.len()].copy_from_slice(tag);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.len() as u32).to_le_bytes());
    for t in 0..mesh.len() {
        let n = mesh.normals[t];
        for v in std::iter::once(n).chain(mesh.corners(t)) {
            for k in 0..3 {
                out.extend_from_slice(&(v[k] as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

/// ASCII STL encoding with shortest round-trip float formatting.
pub fn write_stl_ascii(mesh: &TriangleMesh, name: &str) -> String {
    let mut out = format!("solid {name}\n");
    for t in 0..mesh.len() {
        let n = mesh.normals[t];
        out.push_str(&format!("  facet normal {:?} {:?} {:?}\n    outer loop\n", n.x, n.y, n.z));
        for v in mesh.corners(t) {
            out.push_str(&format!("      vertex {:?} {:?} {:?}\n", v.x, v.y, v.z));
        }
        out.push_str("    endloop\n  endfacet\n");
    }
    out.push_str(&format!("endsolid {name}\n"));
    out
}
