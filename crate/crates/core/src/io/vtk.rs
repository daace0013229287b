//! Legacy ASCII VTK output of 1-cochains.

use std::fmt::Write as _;
use std::path::Path;

use crate::complex::geometry::barycentric_gradients;
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::operators::Cochain;

/// Whitney interpolant of a 1-cochain evaluated at each top simplex's
/// barycenter, as 3-vectors.
///
/// At the barycenter the Whitney form of edge `[a, b]` is
/// `(grad l_b - grad l_a) / (n + 1)`.
pub fn proxy_vectors(c: &SimplicialComplex, h: &Cochain) -> Result<Vec<[f64; 3]>> {
    let n = c.dim();
    if h.p != 1 || !(2..=3).contains(&n) {
        return Err(Error::Dimension(format!("proxy vectors need a 1-cochain on a 2- or 3-complex (p = {}, n = {n})", h.p)));
    }
    h.check(c)?;
    if c.embedding_dim() > 3 {
        return Err(Error::Dimension("VTK output needs an embedding in at most 3 dimensions".into()));
    }
    let mut out = Vec::with_capacity(c.num_simplices(n));
    for t in 0..c.num_simplices(n) {
        let grads = barycentric_gradients(&c.points_of(n, t)).ok_or(Error::Degenerate { p: n, index: t })?;
        let mut v = [0.0; 3];
        // edges of the simplex, in the same local order as the vertex tuple
        for a in 0..=n {
            for b in a + 1..=n {
                let verts = c.simplex(n, t);
                let e = c.find_simplex(&[verts[a], verts[b]]).expect("edge of top simplex");
                let w = h.values[e] / (n + 1) as f64;
                for (r, slot) in v.iter_mut().enumerate().take(grads.nrows()) {
                    *slot += w * (grads[(r, b)] - grads[(r, a)]);
                }
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Unstructured grid with the top simplices followed by the edges as line
/// cells. Cell data: `proxy` (Whitney vectors, zero on edges), `cochain`
/// (edge values, zero on top cells) and `cell_dim`.
pub fn vtk_string(c: &SimplicialComplex, h: &Cochain, title: &str) -> Result<String> {
    let vectors = proxy_vectors(c, h)?;
    let n = c.dim();
    let nv = c.num_vertices();
    let nt = c.num_simplices(n);
    let ne = c.num_simplices(1);
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or("").chars().take(255).collect::<String>());
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {nv} double");
    for v in c.vertices() {
        let mut xyz = [0.0; 3];
        xyz[..v.len()].copy_from_slice(v);
        let _ = writeln!(s, "{} {} {}", xyz[0], xyz[1], xyz[2]);
    }
    let _ = writeln!(s, "CELLS {} {}", nt + ne, nt * (n + 2) + ne * 3);
    for t in c.simplices(n).iter() {
        let ids: Vec<String> = t.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{} {}", n + 1, ids.join(" "));
    }
    for e in c.simplices(1).iter() {
        let _ = writeln!(s, "2 {} {}", e[0], e[1]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", nt + ne);
    let top_type = if n == 2 { 5 } else { 10 };
    for _ in 0..nt {
        let _ = writeln!(s, "{top_type}");
    }
    for _ in 0..ne {
        let _ = writeln!(s, "3");
    }
    let _ = writeln!(s, "CELL_DATA {}", nt + ne);
    let _ = writeln!(s, "VECTORS proxy double");
    for v in &vectors {
        let _ = writeln!(s, "{:e} {:e} {:e}", v[0], v[1], v[2]);
    }
    for _ in 0..ne {
        let _ = writeln!(s, "0 0 0");
    }
    let _ = writeln!(s, "SCALARS cochain double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for _ in 0..nt {
        let _ = writeln!(s, "0");
    }
    for v in h.values.iter() {
        let _ = writeln!(s, "{v:e}");
    }
    let _ = writeln!(s, "SCALARS cell_dim int 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for _ in 0..nt {
        let _ = writeln!(s, "{n}");
    }
    for _ in 0..ne {
        let _ = writeln!(s, "1");
    }
    Ok(s)
}

pub fn write_vtk(c: &SimplicialComplex, h: &Cochain, path: &Path) -> Result<()> {
    std::fs::write(path, vtk_string(c, h, "harmonic 1-cochain")?)?;
    Ok(())
}
