//! Mesh readers (OFF, Triangle/TetGen `.node`/`.ele`, native JSON) and the
//! native JSON writer.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    TriangleNodeEle,
    TetgenNodeEle,
    NativeJson,
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "off" => Ok(MeshFormat::Off),
            "triangle" | "triangle_nodes_ele" => Ok(MeshFormat::TriangleNodeEle),
            "tetgen" | "tetgen_nodes_ele" => Ok(MeshFormat::TetgenNodeEle),
            "json" | "native_json" => Ok(MeshFormat::NativeJson),
            other => Err(format!("unknown mesh format '{other}'")),
        }
    }
}

impl MeshFormat {
    /// Guess from the file extension; `.node`/`.ele` needs the element arity,
    /// so it defaults to Triangle and is refined by [`load_complex`].
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "json" => Some(MeshFormat::NativeJson),
            "node" | "ele" => Some(MeshFormat::TriangleNodeEle),
            _ => None,
        }
    }
}

/// On-disk native mesh: lower skeleta are always regenerated on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NativeMesh {
    pub embedding_dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub top_simplices: Vec<Vec<usize>>,
}

pub fn load_complex(path: &Path, format: MeshFormat, require_manifold: bool) -> Result<SimplicialComplex> {
    let complex = match format {
        MeshFormat::Off => {
            let text = fs::read_to_string(path)?;
            parse_off(&text, &path.display().to_string())?
        }
        MeshFormat::NativeJson => {
            let text = fs::read_to_string(path)?;
            parse_native_json(&text, &path.display().to_string())?
        }
        MeshFormat::TriangleNodeEle => load_node_ele(path, 3)?,
        MeshFormat::TetgenNodeEle => load_node_ele(path, 4)?,
    };
    if require_manifold {
        complex.check_manifold()?;
    }
    Ok(complex)
}

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { source_name: source.to_string(), line, message: message.into() }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_num<T: FromStr>(tok: Option<&str>, source: &str, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_error(source, line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_error(source, line, format!("invalid {what} '{tok}'")))
}

pub fn parse_off(text: &str, source: &str) -> Result<SimplicialComplex> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_error(source, 1, "empty file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("OFF") {
        return Err(parse_error(source, hline, "expected 'OFF' header"));
    }
    // counts may share the header line
    let rest: Vec<&str> = toks.collect();
    let (cline, counts) = if rest.is_empty() {
        let (l, s) = lines.next().ok_or_else(|| parse_error(source, hline, "missing counts line"))?;
        (l, s.split_whitespace().collect::<Vec<_>>())
    } else {
        (hline, rest)
    };
    let mut it = counts.into_iter();
    let nv: usize = parse_num(it.next(), source, cline, "vertex count")?;
    let nf: usize = parse_num(it.next(), source, cline, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or_else(|| parse_error(source, cline, "unexpected end of vertices"))?;
        let mut t = s.split_whitespace();
        let v: Vec<f64> = (0..3).map(|_| parse_num(t.next(), source, l, "coordinate")).collect::<Result<_>>()?;
        vertices.push(v);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or_else(|| parse_error(source, cline, "unexpected end of faces"))?;
        let mut t = s.split_whitespace();
        let k: usize = parse_num(t.next(), source, l, "face size")?;
        if k != 3 {
            return Err(parse_error(source, l, format!("only triangular faces supported, got {k}")));
        }
        let f: Vec<usize> = (0..3).map(|_| parse_num(t.next(), source, l, "vertex index")).collect::<Result<_>>()?;
        if let Some(&bad) = f.iter().find(|&&v| v >= nv) {
            return Err(parse_error(source, l, format!("vertex index {bad} out of range ({nv} vertices)")));
        }
        faces.push(f);
    }
    SimplicialComplex::new(3, vertices, faces)
}

pub fn parse_native_json(text: &str, source: &str) -> Result<SimplicialComplex> {
    let mesh: NativeMesh = serde_json::from_str(text)
        .map_err(|e| parse_error(source, e.line(), e.to_string()))?;
    SimplicialComplex::new(mesh.embedding_dim, mesh.vertices, mesh.top_simplices)
}

fn node_ele_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("node"), path.with_extension("ele"))
}

fn load_node_ele(path: &Path, arity: usize) -> Result<SimplicialComplex> {
    let (node_path, ele_path) = node_ele_paths(path);
    let node_text = fs::read_to_string(&node_path)?;
    let ele_text = fs::read_to_string(&ele_path)?;
    parse_node_ele(
        &node_text,
        &node_path.display().to_string(),
        &ele_text,
        &ele_path.display().to_string(),
        arity,
    )
}

/// Parses Triangle (`arity` 3) or TetGen (`arity` 4) node/element files.
/// Indexing base is whatever the node file uses; elements refer to node ids.
pub fn parse_node_ele(
    node_text: &str,
    node_src: &str,
    ele_text: &str,
    ele_src: &str,
    arity: usize,
) -> Result<SimplicialComplex> {
    let mut lines = content_lines(node_text);
    let (hl, header) = lines.next().ok_or_else(|| parse_error(node_src, 1, "empty node file"))?;
    let mut t = header.split_whitespace();
    let nv: usize = parse_num(t.next(), node_src, hl, "vertex count")?;
    let dim: usize = parse_num(t.next(), node_src, hl, "dimension")?;
    if dim == 0 {
        return Err(parse_error(node_src, hl, "dimension must be positive"));
    }
    let mut ids = HashMap::with_capacity(nv);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or_else(|| parse_error(node_src, hl, "unexpected end of nodes"))?;
        let mut t = s.split_whitespace();
        let id: usize = parse_num(t.next(), node_src, l, "node index")?;
        let v: Vec<f64> = (0..dim).map(|_| parse_num(t.next(), node_src, l, "coordinate")).collect::<Result<_>>()?;
        if ids.insert(id, vertices.len()).is_some() {
            return Err(parse_error(node_src, l, format!("duplicate node index {id}")));
        }
        vertices.push(v);
    }

    let mut lines = content_lines(ele_text);
    let (hl, header) = lines.next().ok_or_else(|| parse_error(ele_src, 1, "empty element file"))?;
    let mut t = header.split_whitespace();
    let ne: usize = parse_num(t.next(), ele_src, hl, "element count")?;
    let per: usize = parse_num(t.next(), ele_src, hl, "nodes per element")?;
    if per != arity {
        return Err(parse_error(ele_src, hl, format!("expected {arity} nodes per element, got {per}")));
    }
    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (l, s) = lines.next().ok_or_else(|| parse_error(ele_src, hl, "unexpected end of elements"))?;
        let mut t = s.split_whitespace();
        let _: usize = parse_num(t.next(), ele_src, l, "element index")?;
        let mut e = Vec::with_capacity(arity);
        for _ in 0..arity {
            let id: usize = parse_num(t.next(), ele_src, l, "node index")?;
            let v = *ids
                .get(&id)
                .ok_or_else(|| parse_error(ele_src, l, format!("dangling node index {id}")))?;
            e.push(v);
        }
        elements.push(e);
    }
    SimplicialComplex::new(dim, vertices, elements)
}

impl SimplicialComplex {
    pub fn to_native(&self) -> NativeMesh {
        NativeMesh {
            embedding_dim: self.embedding_dim(),
            vertices: self.vertices().map(<[f64]>::to_vec).collect(),
            top_simplices: self.top_simplices(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_native()).expect("mesh serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
