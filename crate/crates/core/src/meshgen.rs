//! Structured test meshes: a triangulated torus, planar lattice regions such
//! as perforated discs, and a solid spherical shell of tetrahedra.
//!
//! All generators produce meshes whose positive circumcentric duals make the
//! diagonal star definite: the planar meshes are made of equilateral
//! triangles, the torus of acute isosceles ones, and the shell of
//! body-centred-cubic tetrahedra, each of which contains its circumcenter.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::DVector;

use crate::complex::geometry::barycentric_of;
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Triangulated torus of revolution with its standard cycles.
#[derive(Debug, Clone)]
pub struct TorusMesh {
    pub complex: SimplicialComplex,
    pub n_major: usize,
    pub n_minor: usize,
    /// Vertex loop once around the central axis.
    pub longitude: Vec<usize>,
    /// Vertex loop once around the tube.
    pub latitude: Vec<usize>,
    /// Closed dual paths (triangle indices): `[0]` runs parallel to the
    /// longitude and `[1]` parallel to the latitude, so `[0]` crosses the
    /// latitude once and misses the longitude, and vice versa.
    pub dual_cycles: [Vec<usize>; 2],
}

/// Torus with `n_major` vertices around the axis and `n_minor` (even) around
/// the tube, radii `major > minor`.
///
/// Alternate rows are shifted by half a step, which keeps the triangles
/// acute when `pi * (major + minor) / n_major < 2 * pi * minor / n_minor`.
pub fn torus(n_major: usize, n_minor: usize, major: f64, minor: f64) -> Result<TorusMesh> {
    if n_major < 3 || n_minor < 4 || !n_minor.is_multiple_of(2) {
        return Err(Error::InvalidComplex("torus needs n_major >= 3 and even n_minor >= 4".into()));
    }
    if !(major > minor && minor > 0.0) {
        return Err(Error::InvalidComplex("torus needs major > minor > 0".into()));
    }
    let id = |i: usize, j: usize| (j % n_minor) * n_major + (i % n_major);
    let mut verts = Vec::with_capacity(n_major * n_minor);
    for j in 0..n_minor {
        for i in 0..n_major {
            let theta = 2.0 * PI * (i as f64 + 0.5 * (j % 2) as f64) / n_major as f64;
            let phi = 2.0 * PI * j as f64 / n_minor as f64;
            let rho = major + minor * phi.cos();
            verts.push(vec![rho * theta.cos(), rho * theta.sin(), minor * phi.sin()]);
        }
    }
    let up = |i: usize, j: usize| -> [usize; 3] {
        if j.is_multiple_of(2) {
            [id(i, j), id(i + 1, j), id(i, j + 1)]
        } else {
            [id(i, j), id(i + 1, j), id(i + 1, j + 1)]
        }
    };
    let down = |i: usize, j: usize| -> [usize; 3] {
        if j.is_multiple_of(2) {
            [id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]
        } else {
            [id(i, j), id(i + 1, j + 1), id(i, j + 1)]
        }
    };
    let mut tris = Vec::with_capacity(2 * n_major * n_minor);
    for j in 0..n_minor {
        for i in 0..n_major {
            tris.push(up(i, j).to_vec());
            tris.push(down(i, j).to_vec());
        }
    }
    let complex = SimplicialComplex::new(3, verts, tris)?;
    let tri = |t: [usize; 3]| complex.find_simplex(&t).expect("generated triangle");
    let around_axis = (0..n_major).flat_map(|i| [tri(up(i, 0)), tri(down(i, 0))]).collect();
    let around_tube = (0..n_minor).flat_map(|j| [tri(up(0, j)), tri(down(0, j))]).collect();
    let longitude = (0..=n_major).map(|i| id(i, 0)).collect();
    let latitude = (0..=n_minor).map(|j| id(0, j)).collect();
    Ok(TorusMesh { complex, n_major, n_minor, longitude, latitude, dual_cycles: [around_axis, around_tube] })
}

/// Circular hole `(center_x, center_y, radius)`.
pub type Hole = (f64, f64, f64);

/// Planar region cut from an equilateral triangle lattice.
#[derive(Debug, Clone)]
pub struct PlanarMesh {
    pub complex: SimplicialComplex,
    pub spacing: f64,
    pub holes: Vec<Hole>,
}

/// Equilateral lattice triangles with side `spacing` inside the box
/// `[-extent, extent]^2` whose centroids satisfy `keep`. Vertex pinches
/// (triangles meeting only at a vertex) are removed, and unused vertices
/// dropped.
pub fn planar_lattice(spacing: f64, extent: f64, keep: impl Fn(f64, f64) -> bool) -> Result<SimplicialComplex> {
    if !(spacing > 0.0 && extent > 0.0) {
        return Err(Error::InvalidComplex("lattice needs positive spacing and extent".into()));
    }
    let h = spacing * 3f64.sqrt() / 2.0;
    let nx = (2.0 * extent / spacing).ceil() as usize + 2;
    let ny = (2.0 * extent / h).ceil() as usize + 2;
    let point = |i: usize, j: usize| -> [f64; 2] {
        [-extent - spacing + i as f64 * spacing + 0.5 * spacing * (j % 2) as f64, -extent - h + j as f64 * h]
    };
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let cand = if j % 2 == 0 {
                [[id(i, j), id(i + 1, j), id(i, j + 1)], [id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]]
            } else {
                [[id(i, j), id(i + 1, j), id(i + 1, j + 1)], [id(i, j), id(i + 1, j + 1), id(i, j + 1)]]
            };
            for t in cand {
                let pts: Vec<[f64; 2]> = t.iter().map(|&v| point(v % (nx + 1), v / (nx + 1))).collect();
                let cx = pts.iter().map(|p| p[0]).sum::<f64>() / 3.0;
                let cy = pts.iter().map(|p| p[1]).sum::<f64>() / 3.0;
                if keep(cx, cy) {
                    tris.push(t.to_vec());
                }
            }
        }
    }
    remove_pinches(&mut tris);
    let coords = |v: usize| point(v % (nx + 1), v / (nx + 1)).to_vec();
    compact(2, tris, coords)
}

/// Disc of the given radius with circular holes.
pub fn perforated_disc(radius: f64, spacing: f64, holes: &[Hole]) -> Result<PlanarMesh> {
    let complex = planar_lattice(spacing, radius, |x, y| {
        x.hypot(y) < radius && holes.iter().all(|&(hx, hy, hr)| (x - hx).hypot(y - hy) > hr)
    })?;
    Ok(PlanarMesh { complex, spacing, holes: holes.to_vec() })
}

/// Unit disc with four holes of radius 0.15 centred at `(+-0.45, +-0.45)`.
pub fn four_holed_disc(spacing: f64) -> Result<PlanarMesh> {
    let holes: Vec<Hole> =
        [(-0.45, -0.45), (0.45, -0.45), (-0.45, 0.45), (0.45, 0.45)].iter().map(|&(x, y)| (x, y, 0.15)).collect();
    perforated_disc(1.0, spacing, &holes)
}

/// Annulus between radii `inner` and `outer` centred at the origin.
pub fn annulus(outer: f64, inner: f64, spacing: f64) -> Result<PlanarMesh> {
    perforated_disc(outer, spacing, &[(0.0, 0.0, inner)])
}

/// Axis-aligned square `[-half, half]^2`.
pub fn square(half: f64, spacing: f64) -> Result<SimplicialComplex> {
    planar_lattice(spacing, half, |x, y| x.abs() < half && y.abs() < half)
}

/// Solid spherical shell between radii `inner` and `outer`, tetrahedralized
/// by the body-centred cubic lattice of cube size `cube`.
///
/// Each tetrahedron joins the centres of two face-adjacent cubes to one edge
/// of their shared face; it is kept when its centroid lies in the shell.
pub fn solid_annulus(outer: f64, inner: f64, cube: f64) -> Result<SimplicialComplex> {
    if !(outer > inner && inner >= 0.0 && cube > 0.0) {
        return Err(Error::InvalidComplex("shell needs outer > inner >= 0 and positive cube size".into()));
    }
    let m = (outer / cube).ceil() as i64 + 1;
    // corners have even integer coordinates, centres odd ones (units of cube / 2)
    let mut ids: HashMap<[i64; 3], usize> = HashMap::new();
    let mut tets = Vec::new();
    let pos = |k: [i64; 3]| k.map(|c| c as f64 * cube / 2.0);
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for x in -m..m {
            for y in -m..m {
                for z in -m..m {
                    let ca = [2 * x + 1, 2 * y + 1, 2 * z + 1];
                    let mut cb = ca;
                    cb[a] += 2;
                    // shared face corners in cyclic order
                    let mut face = Vec::with_capacity(4);
                    for (sb, sc) in [(-1, -1), (1, -1), (1, 1), (-1, 1)] {
                        let mut k = ca;
                        k[a] += 1;
                        k[b] += sb;
                        k[c] += sc;
                        face.push(k);
                    }
                    for e in 0..4 {
                        let tet = [ca, cb, face[e], face[(e + 1) % 4]];
                        let cen = tet.iter().map(|&k| pos(k)).fold([0.0; 3], |s, p| {
                            [s[0] + p[0] / 4.0, s[1] + p[1] / 4.0, s[2] + p[2] / 4.0]
                        });
                        let r = (cen[0] * cen[0] + cen[1] * cen[1] + cen[2] * cen[2]).sqrt();
                        if r >= inner && r <= outer {
                            let t = tet
                                .iter()
                                .map(|k| {
                                    let next = ids.len();
                                    *ids.entry(*k).or_insert(next)
                                })
                                .collect();
                            tets.push(t);
                        }
                    }
                }
            }
        }
    }
    let mut coords = vec![Vec::new(); ids.len()];
    for (k, &i) in &ids {
        coords[i] = pos(*k).to_vec();
    }
    SimplicialComplex::new(3, coords, tets)
}

/// Top simplices met by the segment from `from` to `to`, in order, for a
/// complex embedded in `R^n`. Consecutive simplices share a face; where the
/// segment grazes a vertex or edge the gap is bridged by a shortest dual
/// path. Parts of the segment outside the mesh are skipped.
pub fn dual_path_along(c: &SimplicialComplex, from: &[f64], to: &[f64]) -> Result<Vec<usize>> {
    let n = c.dim();
    if c.embedding_dim() != n || from.len() != n || to.len() != n {
        return Err(Error::Dimension("dual_path_along needs a complex embedded in its own dimension".into()));
    }
    let len = from.iter().zip(to).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let edges = c.simplices(1);
    let mean_edge = edges
        .iter()
        .map(|e| {
            let (a, b) = (c.vertex(e[0]), c.vertex(e[1]));
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        })
        .sum::<f64>()
        / edges.len().max(1) as f64;
    let steps = ((len / (mean_edge / 40.0)).ceil() as usize).max(1);
    let adjacency = c.top_adjacency();
    let contains = |t: usize, x: &DVector<f64>| {
        let pts: Vec<&[f64]> = c.simplex(n, t).iter().map(|&v| c.vertex(v)).collect();
        barycentric_of(&pts, x).is_some_and(|b| b.iter().all(|&l| l >= -1e-12))
    };
    let mut path: Vec<usize> = Vec::new();
    for s in 0..=steps {
        let f = s as f64 / steps as f64;
        let x = DVector::from_iterator(n, from.iter().zip(to).map(|(a, b)| a + f * (b - a)));
        let last = path.last().copied();
        if last.is_some_and(|t| contains(t, &x)) {
            continue;
        }
        let near = last.map(|t| adjacency[t].clone()).unwrap_or_default();
        let Some(t) = near.into_iter().find(|&t| contains(t, &x)).or_else(|| (0..c.num_simplices(n)).find(|&t| contains(t, &x)))
        else {
            continue;
        };
        match last {
            Some(prev) if !adjacency[prev].contains(&t) => {
                let bridge = shortest_dual_path(&adjacency, prev, t)
                    .ok_or_else(|| Error::DualPath(format!("simplices {prev} and {t} are not connected")))?;
                for b in bridge.into_iter().skip(1) {
                    push_step(&mut path, b);
                }
            }
            _ => push_step(&mut path, t),
        }
    }
    Ok(path)
}

fn push_step(path: &mut Vec<usize>, t: usize) {
    if path.len() >= 2 && path[path.len() - 2] == t {
        path.pop();
    } else {
        path.push(t);
    }
}

/// Breadth-first shortest path between two top simplices.
pub fn shortest_dual_path(adjacency: &[Vec<usize>], a: usize, b: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; adjacency.len()];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(t) = queue.pop_front() {
        if t == b {
            let mut out = vec![b];
            let mut cur = b;
            while cur != a {
                cur = prev[cur];
                out.push(cur);
            }
            out.reverse();
            return Some(out);
        }
        for &u in &adjacency[t] {
            if prev[u] == usize::MAX {
                prev[u] = t;
                queue.push_back(u);
            }
        }
    }
    None
}

/// Drops triangles until every vertex star is a single edge-connected fan.
fn remove_pinches(tris: &mut Vec<Vec<usize>>) {
    loop {
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                by_vertex.entry(v).or_default().push(t);
            }
        }
        let mut drop = BTreeSet::new();
        let mut verts: Vec<_> = by_vertex.keys().copied().collect();
        verts.sort_unstable();
        for v in verts {
            let star = &by_vertex[&v];
            let comps = fan_components(v, star, tris);
            if comps.len() > 1 {
                let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
                let keep = comps.iter().position(|c| c.len() == largest).unwrap_or(0);
                for (i, comp) in comps.iter().enumerate() {
                    if i != keep {
                        drop.extend(comp.iter().copied());
                    }
                }
            }
        }
        if drop.is_empty() {
            return;
        }
        let mut idx = 0;
        tris.retain(|_| {
            let k = !drop.contains(&idx);
            idx += 1;
            k
        });
    }
}

/// Groups the triangles around `v` into fans connected through edges at `v`.
fn fan_components(v: usize, star: &[usize], tris: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; star.len()];
    for s in 0..star.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![star[s]];
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..star.len() {
                if !seen[b] {
                    let shared = tris[star[a]].iter().filter(|&&w| w != v && tris[star[b]].contains(&w)).count();
                    if shared > 0 {
                        seen[b] = true;
                        comp.push(star[b]);
                        stack.push(b);
                    }
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Renumbers the vertices used by `tris` consecutively, in increasing order.
fn compact(dim: usize, tris: Vec<Vec<usize>>, coords: impl Fn(usize) -> Vec<f64>) -> Result<SimplicialComplex> {
    if tris.is_empty() {
        return Err(Error::InvalidComplex("region contains no simplices".into()));
    }
    let used: BTreeSet<usize> = tris.iter().flatten().copied().collect();
    let map: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let verts = used.iter().map(|&v| coords(v)).collect();
    let tris = tris.into_iter().map(|t| t.into_iter().map(|v| map[&v]).collect()).collect();
    SimplicialComplex::new(dim, verts, tris)
}
