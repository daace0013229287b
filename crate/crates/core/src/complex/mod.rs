//! Simplicial complexes: construction from top simplices, canonical
//! simplex tables, face incidence, geometry and topology summaries.
//!
//! Every simplex is stored as a strictly ascending vertex tuple, and each
//! dimension's table is sorted lexicographically. Orientation only enters
//! through the signs of the coboundary operators.

pub(crate) mod geometry;
pub mod io;
mod summary;

pub use geometry::Volume;
pub use summary::{ComplexSummary, SummaryOptions};

use crate::error::{Error, Result};

/// Lexicographically sorted table of `p`-simplices stored in one flat buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexTable {
    arity: usize,
    verts: Vec<usize>,
}

impl SimplexTable {
    fn from_sorted(arity: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        let verts = tuples.into_iter().flatten().collect();
        SimplexTable { arity, verts }
    }

    pub fn len(&self) -> usize {
        self.verts.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Number of vertices per simplex (`p + 1`).
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.verts[i * self.arity..(i + 1) * self.arity]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.verts.chunks_exact(self.arity)
    }

    /// Index of an ascending vertex tuple, if present.
    pub fn find(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.arity {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// A closed, pure simplicial complex embedded in Euclidean space.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    embedding_dim: usize,
    coords: Vec<f64>,
    simplices: Vec<SimplexTable>,
    // facets[p][i * (p + 1) + k] = index of the (p-1)-face of simplex i omitting position k.
    facets: Vec<Vec<usize>>,
    // number of top-dimensional cofaces of each (n-1)-simplex
    top_cofaces: Vec<u32>,
}

impl SimplicialComplex {
    /// Builds the closure of `top_simplices`.
    ///
    /// `vertices` holds one coordinate vector per vertex, each of length
    /// `embedding_dim`. All vertices become 0-simplices, including ones not
    /// referenced by any top simplex.
    pub fn new(
        embedding_dim: usize,
        vertices: Vec<Vec<f64>>,
        top_simplices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if embedding_dim == 0 {
            return Err(Error::InvalidComplex("embedding dimension must be positive".into()));
        }
        let mut coords = Vec::with_capacity(vertices.len() * embedding_dim);
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != embedding_dim {
                return Err(Error::InvalidComplex(format!(
                    "vertex {i} has {} coordinates, expected {embedding_dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidComplex(format!("vertex {i} has non-finite coordinates")));
            }
            coords.extend_from_slice(v);
        }
        Self::from_flat(embedding_dim, coords, top_simplices)
    }

    fn from_flat(embedding_dim: usize, coords: Vec<f64>, top: Vec<Vec<usize>>) -> Result<Self> {
        let nverts = coords.len() / embedding_dim;
        let arity = match top.first() {
            Some(s) => s.len(),
            None => return Err(Error::InvalidComplex("no top simplices".into())),
        };
        if arity < 2 {
            return Err(Error::InvalidComplex("top simplices must have dimension >= 1".into()));
        }
        let n = arity - 1;
        let mut sorted_top = Vec::with_capacity(top.len());
        for (i, s) in top.into_iter().enumerate() {
            if s.len() != arity {
                return Err(Error::InvalidComplex(format!(
                    "top simplex {i} has {} vertices, expected {arity} (complex must be pure)",
                    s.len()
                )));
            }
            let mut s = s;
            if let Some(&bad) = s.iter().find(|&&v| v >= nverts) {
                return Err(Error::VertexIndex { index: bad, count: nverts });
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!("top simplex {i} repeats a vertex")));
            }
            sorted_top.push(s);
        }
        let ntop = sorted_top.len();

        let mut simplices: Vec<SimplexTable> = Vec::with_capacity(n + 1);
        simplices.resize(n + 1, SimplexTable { arity: 1, verts: vec![] });
        simplices[n] = SimplexTable::from_sorted(arity, sorted_top);
        if simplices[n].len() != ntop {
            return Err(Error::InvalidComplex("duplicate top simplices".into()));
        }
        for p in (1..n).rev() {
            let upper = &simplices[p + 1];
            let mut faces = Vec::with_capacity(upper.len() * (p + 2));
            for s in upper.iter() {
                for k in 0..s.len() {
                    faces.push(omit(s, k));
                }
            }
            simplices[p] = SimplexTable::from_sorted(p + 1, faces);
        }
        simplices[0] = SimplexTable { arity: 1, verts: (0..nverts).collect() };

        let mut facets = vec![Vec::new(); n + 1];
        for p in 1..=n {
            let (lower, upper) = (&simplices[p - 1], &simplices[p]);
            let mut table = Vec::with_capacity(upper.len() * (p + 1));
            let mut buf = Vec::with_capacity(p);
            for s in upper.iter() {
                for k in 0..=p {
                    buf.clear();
                    buf.extend(s.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v));
                    // closure guarantees presence
                    table.push(lower.find(&buf).expect("face of stored simplex"));
                }
            }
            facets[p] = table;
        }

        let mut top_cofaces = vec![0u32; simplices[n - 1].len()];
        for &f in &facets[n] {
            top_cofaces[f] += 1;
        }

        Ok(SimplicialComplex { embedding_dim, coords, simplices, facets, top_cofaces })
    }

    /// Rejects complexes where some (n-1)-simplex has more than two cofaces.
    pub fn check_manifold(&self) -> Result<()> {
        let n = self.dim();
        if let Some(i) = self.top_cofaces.iter().position(|&c| c > 2) {
            return Err(Error::NonManifold(format!(
                "{}-simplex {:?} has {} cofaces",
                n - 1,
                self.simplex(n - 1, i),
                self.top_cofaces[i]
            )));
        }
        Ok(())
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    /// Top dimension `n`.
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.simplices[0].len()
    }

    pub fn num_simplices(&self, p: usize) -> usize {
        self.simplices.get(p).map_or(0, SimplexTable::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(SimplexTable::len).collect()
    }

    pub fn simplices(&self, p: usize) -> &SimplexTable {
        &self.simplices[p]
    }

    pub fn simplex(&self, p: usize, i: usize) -> &[usize] {
        self.simplices[p].get(i)
    }

    /// Index of the simplex with the given vertices (any order).
    pub fn find_simplex(&self, verts: &[usize]) -> Option<usize> {
        if verts.is_empty() || verts.len() > self.simplices.len() {
            return None;
        }
        let mut key = verts.to_vec();
        key.sort_unstable();
        self.simplices[key.len() - 1].find(&key)
    }

    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.coords[v * self.embedding_dim..(v + 1) * self.embedding_dim]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.embedding_dim)
    }

    /// Indices of the `p + 1` facets of `p`-simplex `i`; entry `k` omits vertex position `k`.
    pub fn facets(&self, p: usize, i: usize) -> &[usize] {
        &self.facets[p][i * (p + 1)..(i + 1) * (p + 1)]
    }

    /// Number of n-simplices containing each (n-1)-simplex.
    pub fn top_coface_counts(&self) -> &[u32] {
        &self.top_cofaces
    }

    /// Flags for the (n-1)-simplices lying on the boundary.
    pub fn boundary_facets(&self) -> Vec<bool> {
        self.top_cofaces.iter().map(|&c| c == 1).collect()
    }

    /// Boundary flags for every dimension `0..n`; a simplex is on the boundary
    /// when it is a face of a boundary (n-1)-simplex.
    pub fn boundary_flags(&self) -> Vec<Vec<bool>> {
        let n = self.dim();
        let mut flags: Vec<Vec<bool>> = (0..n).map(|p| vec![false; self.num_simplices(p)]).collect();
        flags[n - 1] = self.boundary_facets();
        for p in (1..n).rev() {
            for i in 0..self.num_simplices(p) {
                if flags[p][i] {
                    for &f in self.facets(p, i) {
                        flags[p - 1][f] = true;
                    }
                }
            }
        }
        flags
    }

    pub fn has_boundary(&self) -> bool {
        self.top_cofaces.contains(&1)
    }

    /// For each n-simplex, its neighbours across shared (n-1)-faces.
    pub fn top_adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); self.num_simplices(n - 1)];
        for t in 0..self.num_simplices(n) {
            for &f in self.facets(n, t) {
                by_face[f].push(t);
            }
        }
        let mut adj = vec![Vec::new(); self.num_simplices(n)];
        for cof in &by_face {
            for &a in cof {
                for &b in cof {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        adj
    }

    /// The top simplices as vertex tuples, in canonical order.
    pub fn top_simplices(&self) -> Vec<Vec<usize>> {
        self.simplices[self.dim()].iter().map(<[usize]>::to_vec).collect()
    }
}

fn omit(s: &[usize], k: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tet() -> SimplicialComplex {
        SimplicialComplex::new(
            3,
            vec![vec![0., 0., 0.], vec![1., 0., 0.], vec![0., 1., 0.], vec![0., 0., 1.]],
            vec![vec![3, 1, 0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn closure_of_single_tet() {
        let c = tet();
        assert_eq!(c.counts(), vec![4, 6, 4, 1]);
        assert_eq!(c.simplex(1, 0), &[0, 1]);
        assert_eq!(c.simplex(2, 3), &[1, 2, 3]);
        assert_eq!(c.simplex(3, 0), &[0, 1, 2, 3]);
    }

    #[test]
    fn facets_omit_positions() {
        let c = tet();
        for p in 1..=3 {
            for i in 0..c.num_simplices(p) {
                let s = c.simplex(p, i).to_vec();
                for (k, &f) in c.facets(p, i).iter().enumerate() {
                    assert_eq!(c.simplex(p - 1, f), omit(&s, k).as_slice());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let v = vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]];
        assert!(matches!(
            SimplicialComplex::new(2, v.clone(), vec![vec![0, 1, 3]]),
            Err(Error::VertexIndex { index: 3, .. })
        ));
        assert!(SimplicialComplex::new(2, v.clone(), vec![vec![0, 1, 1]]).is_err());
        assert!(SimplicialComplex::new(2, v.clone(), vec![vec![0, 1, 2], vec![2, 1, 0]]).is_err());
        assert!(SimplicialComplex::new(2, v, vec![vec![0, 1, 2], vec![0, 1]]).is_err());
    }

    #[test]
    fn non_manifold_edge_detected() {
        let v = vec![vec![0., 0., 0.], vec![1., 0., 0.], vec![0., 1., 0.], vec![0., -1., 0.], vec![0., 0., 1.]];
        let c = SimplicialComplex::new(3, v, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap();
        assert!(matches!(c.check_manifold(), Err(Error::NonManifold(_))));
    }

    #[test]
    fn boundary_of_two_triangles() {
        let v = vec![vec![0., 0.], vec![1., 0.], vec![0., 1.], vec![1., 1.]];
        let c = SimplicialComplex::new(2, v, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let b = c.boundary_facets();
        assert_eq!(b.iter().filter(|&&x| x).count(), 4);
        assert!(!b[c.find_simplex(&[2, 1]).unwrap()]);
        assert_eq!(c.top_adjacency(), vec![vec![1], vec![0]]);
    }
}
