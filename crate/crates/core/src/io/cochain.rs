//! ASCII cochain and chain files.
//!
//! A file holds one or more blocks. A dense block starts with
//! `cochain <p> <N>` or `chain <p> <N>` followed by `N` values in canonical
//! simplex order; a sparse block starts with `sparse-cochain <p> <N> <k>`
//! followed by `k` lines `<index> <value>`. Blank lines and `#` comments are
//! ignored. Values are written with 17 significant digits, so a write/read
//! cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::Cochain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Cochain,
    Chain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub kind: BlockKind,
    pub data: Cochain,
}

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { source_name: source.to_string(), line, message: message.into() }
}

pub fn parse_cochains(text: &str, source: &str) -> Result<Vec<Block>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut blocks = Vec::new();
    while let Some((ln, header)) = lines.next() {
        let fields: Vec<&str> = header.split_whitespace().collect();
        let num = |k: usize| -> Result<usize> {
            fields
                .get(k)
                .ok_or_else(|| parse_err(source, ln, "truncated header"))?
                .parse()
                .map_err(|_| parse_err(source, ln, format!("bad integer '{}'", fields[k])))
        };
        let (kind, sparse) = match fields[0] {
            "cochain" => (BlockKind::Cochain, false),
            "chain" => (BlockKind::Chain, false),
            "sparse-cochain" => (BlockKind::Cochain, true),
            other => return Err(parse_err(source, ln, format!("expected a cochain header, found '{other}'"))),
        };
        let expected = if sparse { 4 } else { 3 };
        if fields.len() != expected {
            return Err(parse_err(source, ln, format!("header needs {expected} fields")));
        }
        let p = num(1)?;
        let len = num(2)?;
        let mut values = DVector::zeros(len);
        let count = if sparse { num(3)? } else { len };
        for k in 0..count {
            let (vl, line) = lines
                .next()
                .ok_or_else(|| parse_err(source, ln, format!("block ends after {k} of {count} entries")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let value = |s: &str| s.parse::<f64>().map_err(|_| parse_err(source, vl, format!("bad number '{s}'")));
            if sparse {
                let [idx, v] = parts[..] else {
                    return Err(parse_err(source, vl, "expected '<index> <value>'"));
                };
                let i: usize = idx.parse().map_err(|_| parse_err(source, vl, format!("bad index '{idx}'")))?;
                if i >= len {
                    return Err(parse_err(source, vl, format!("index {i} out of range ({len} entries)")));
                }
                values[i] += value(v)?;
            } else {
                let [v] = parts[..] else {
                    return Err(parse_err(source, vl, "expected one value per line"));
                };
                values[k] = value(v)?;
            }
        }
        blocks.push(Block { kind, data: Cochain::from_vector(p, values) });
    }
    Ok(blocks)
}

pub fn read_cochains(path: &Path) -> Result<Vec<Block>> {
    let text = std::fs::read_to_string(path)?;
    parse_cochains(&text, &path.display().to_string())
}

pub fn format_cochain(kind: BlockKind, c: &Cochain) -> String {
    let head = match kind {
        BlockKind::Cochain => "cochain",
        BlockKind::Chain => "chain",
    };
    let mut s = String::with_capacity(26 * c.len() + 32);
    let _ = writeln!(s, "{head} {} {}", c.p, c.len());
    for v in c.values.iter() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}

pub fn write_cochains(path: &Path, kind: BlockKind, cochains: &[Cochain]) -> Result<()> {
    let text: String = cochains.iter().map(|c| format_cochain(kind, c)).collect();
    std::fs::write(path, text)?;
    Ok(())
}
