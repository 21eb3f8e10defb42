//! Knot files and mesh export.
//!
//! A knot file is JSON:
//!
//! ```json
//! {
//!   "format": "hullkit-knot",
//!   "version": 1,
//!   "components": [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]]],
//!   "labels": ["A"],
//!   "meta": { "name": "triangle", "seed": 1, "generator": "by hand" }
//! }
//! ```
//!
//! `labels` and `meta` are optional. Coordinates are written with the
//! shortest representation that parses back to the same `f64`.
//!
//! The flat format has one `x y z` vertex per line, components separated by
//! blank lines, and `#` comments.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixtures::FixtureMeta;
use crate::geometry::{validate, Point3, PolyLink, PolyLoop, Tolerance, Violation};
use crate::hull::HullMesh;
use crate::scalar::Scalar;

pub const FORMAT_TAG: &str = "hullkit-knot";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Flat { line: usize, message: String },
    #[error("unsupported knot file: {0}")]
    Format(String),
    #[error("invalid link: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("mesh face {face} refers to vertex {index} of {count}")]
    MeshIndex { face: usize, index: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KnotMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

impl From<&FixtureMeta> for KnotMeta {
    fn from(m: &FixtureMeta) -> Self {
        Self {
            name: Some(m.name.clone()),
            seed: Some(m.seed),
            generator: Some(m.generator.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotFile {
    pub format: String,
    pub version: u32,
    pub components: Vec<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<KnotMeta>,
}

impl KnotFile {
    pub fn from_link<T: Scalar>(link: &PolyLink<T>, meta: Option<KnotMeta>) -> Self {
        Self {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            components: link
                .loops()
                .iter()
                .map(|lp| lp.vertices().iter().map(|p| p.cast::<f64>().to_array()).collect())
                .collect(),
            labels: link.labels().map(<[String]>::to_vec),
            meta,
        }
    }

    /// The link, without validation.
    pub fn to_link(&self) -> PolyLink<f64> {
        let link = PolyLink::new(
            self.components
                .iter()
                .map(|c| PolyLoop::new(c.iter().map(|&a| Point3::from_array(a)).collect()))
                .collect(),
        );
        match &self.labels {
            Some(l) => link.with_labels(l.clone()),
            None => link,
        }
    }
}

fn parse_error(e: serde_json::Error) -> IoError {
    IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses and validates a knot file.
pub fn parse_link(text: &str) -> Result<(PolyLink<f64>, KnotFile), IoError> {
    let file: KnotFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.format != FORMAT_TAG {
        return Err(IoError::Format(format!("format tag {:?}", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(IoError::Format(format!("version {}", file.version)));
    }
    if let Some(l) = &file.labels {
        if l.len() != file.components.len() {
            return Err(IoError::Format(format!(
                "{} labels for {} components",
                l.len(),
                file.components.len()
            )));
        }
    }
    let link = file.to_link();
    check(&link)?;
    Ok((link, file))
}

fn check(link: &PolyLink<f64>) -> Result<(), IoError> {
    // Non-finite coordinates make the diameter useless; validation reports them.
    let tol = Tolerance::with_rel(link, f64::DEFAULT_EPS_REL)
        .unwrap_or_else(|_| Tolerance::new(f64::DEFAULT_EPS_REL, 1.0).expect("valid"));
    let violations = validate(link, &tol);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(IoError::Invalid(violations))
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a knot file, or a flat vertex list when the file does not start
/// with `{`.
pub fn load_link(path: &Path) -> Result<(PolyLink<f64>, Option<KnotMeta>), IoError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let (link, file) = parse_link(&text)?;
        Ok((link, file.meta))
    } else {
        Ok((parse_flat(&text)?, None))
    }
}

pub fn to_json<T: Scalar>(link: &PolyLink<T>, meta: Option<KnotMeta>) -> String {
    let mut s = serde_json::to_string_pretty(&KnotFile::from_link(link, meta)).expect("plain data");
    s.push('\n');
    s
}

pub fn save_link<T: Scalar>(link: &PolyLink<T>, meta: Option<KnotMeta>, path: &Path) -> Result<(), IoError> {
    write(path, &to_json(link, meta))
}

/// Parses whitespace-separated `x y z` lines.
pub fn parse_flat(text: &str) -> Result<PolyLink<f64>, IoError> {
    let mut loops = Vec::new();
    let mut current: Vec<Point3<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !current.is_empty() {
                loops.push(PolyLoop::new(std::mem::take(&mut current)));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()).collect();
        if fields.len() != 3 {
            return Err(IoError::Flat {
                line: i + 1,
                message: format!("expected 3 coordinates, found {}", fields.len()),
            });
        }
        let mut xyz = [0.0; 3];
        for (slot, f) in xyz.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| IoError::Flat {
                line: i + 1,
                message: format!("not a number: {f:?}"),
            })?;
        }
        current.push(Point3::from_array(xyz));
    }
    if !current.is_empty() {
        loops.push(PolyLoop::new(current));
    }
    let link = PolyLink::new(loops);
    check(&link)?;
    Ok(link)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub faces: usize,
}

/// Wavefront OBJ text for a voxel boundary mesh; shared corners are merged.
pub fn mesh_to_obj<T: Scalar>(mesh: &HullMesh<T>) -> Result<(String, MeshStats), IoError> {
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut verts: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<[usize; 4]> = Vec::with_capacity(mesh.faces.len());
    for q in &mesh.faces {
        let mut f = [0usize; 4];
        for (slot, c) in f.iter_mut().zip(&q.corners) {
            let p = c.cast::<f64>().to_array();
            let key = p.map(f64::to_bits);
            *slot = *index.entry(key).or_insert_with(|| {
                verts.push(p);
                verts.len() - 1
            });
        }
        faces.push(f);
    }
    let mut out = String::new();
    let _ = writeln!(out, "# hullkit voxel boundary, level {}", mesh.level);
    let _ = writeln!(out, "# {} vertices, {} faces", verts.len(), faces.len());
    for v in &verts {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for (k, f) in faces.iter().enumerate() {
        if let Some(&bad) = f.iter().find(|&&i| i >= verts.len()) {
            return Err(IoError::MeshIndex {
                face: k,
                index: bad,
                count: verts.len(),
            });
        }
        let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
    }
    let stats = MeshStats {
        vertices: verts.len(),
        faces: faces.len(),
    };
    Ok((out, stats))
}

pub fn export_mesh<T: Scalar>(mesh: &HullMesh<T>, path: &Path) -> Result<MeshStats, IoError> {
    let (text, stats) = mesh_to_obj(mesh)?;
    write(path, &text)?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn json_round_trip_is_bitwise() {
        let f = fixtures::hopf::<f64>(64).unwrap();
        let text = to_json(&f.link, Some(KnotMeta::from(&f.meta)));
        let (back, file) = parse_link(&text).unwrap();
        assert_eq!(back, f.link);
        assert_eq!(back.labels().unwrap(), &["A".to_string(), "B".to_string()]);
        assert_eq!(file.meta.unwrap().seed, Some(fixtures::DEFAULT_SEED));
        for (p, q) in back.vertices().zip(f.link.vertices()) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
        }
    }

    #[test]
    fn short_component_is_reported() {
        let text = r#"{"format":"hullkit-knot","version":1,"components":[[[0,0,0],[1,0,0]]]}"#;
        match parse_link(text) {
            Err(IoError::Invalid(v)) => assert_eq!(v.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"format\": \"hullkit-knot\",\n  \"version\": 1,\n  \"components\": [[[0, 0, x]]]\n}";
        match parse_link(text) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_import() {
        let text = "# square\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n\n5 5 5\n6 5 5\n5 6 5\n";
        let l = parse_flat(text).unwrap();
        assert_eq!(l.loops().len(), 2);
        assert_eq!(l.loops()[1].len(), 3);
        match parse_flat("0 0\n") {
            Err(IoError::Flat { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_flat("0 0 0\n1 0 0\nnan 1 0\n"), Err(IoError::Invalid(_))));
    }

    #[test]
    fn empty_mesh_is_valid() {
        let m: HullMesh<f64> = HullMesh {
            level: 2,
            faces: Vec::new(),
        };
        let (text, stats) = mesh_to_obj(&m).unwrap();
        assert_eq!(stats.faces, 0);
        assert!(text.starts_with('#'));
        assert!(!text.lines().any(|l| l.starts_with("f ")));
    }
}
