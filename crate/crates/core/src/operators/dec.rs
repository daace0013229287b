//! Signed circumcentric dual volumes for the diagonal primal-dual Hodge star.
//!
//! Inside each top simplex the dual cell of a `p`-face is a union of
//! simplices spanned by the circumcenters of a flag `s_p < s_{p+1} < .. < s_n`.
//! Consecutive circumcenter offsets are mutually orthogonal, so each flag
//! simplex has volume `prod_k h_k / (n - p)!` with `h_k` the signed height of
//! `c(s_{k+1})` over `aff(s_k)`. The sign is that of the barycentric
//! coordinate of `c(s_{k+1})` opposite `s_k`.

use nalgebra::DVector;
use rayon::prelude::*;

use super::whitney::combinations;
use crate::complex::geometry::{barycentric_of, circumcenter_of, factorial};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Signed dual volume of every `p`-simplex, accumulated over top simplices.
pub(crate) fn dual_volumes(c: &SimplicialComplex, p: usize) -> Result<Vec<f64>> {
    let n = c.dim();
    let local_faces = combinations(n + 1, p + 1);
    let norm = factorial(n - p);
    let per_element: Vec<Result<Vec<(usize, f64)>>> = crate::parallel::install(|| {
        (0..c.num_simplices(n))
            .into_par_iter()
            .map(|t| {
                let verts = c.simplex(n, t);
                let pts: Vec<&[f64]> = verts.iter().map(|&v| c.vertex(v)).collect();
                let flags = FlagGeometry::new(&pts).ok_or(Error::Degenerate { p: n, index: t })?;
                let mut out = Vec::with_capacity(local_faces.len());
                for face in &local_faces {
                    let mask = face.iter().fold(0usize, |m, &k| m | (1 << k));
                    let rest: Vec<usize> = (0..=n).filter(|k| mask & (1 << k) == 0).collect();
                    let vol = flags.sum_over_flags(mask, &rest) / norm;
                    let tuple: Vec<usize> = face.iter().map(|&k| verts[k]).collect();
                    out.push((c.simplices(p).find(&tuple).expect("face of top simplex"), vol));
                }
                Ok(out)
            })
            .collect()
    });
    let mut dual = vec![0.0; c.num_simplices(p)];
    for contrib in per_element {
        for (i, v) in contrib? {
            dual[i] += v;
        }
    }
    Ok(dual)
}

/// Circumcenters of every face of one top simplex, keyed by vertex bitmask.
struct FlagGeometry<'a> {
    pts: &'a [&'a [f64]],
    centers: Vec<Option<DVector<f64>>>,
}

impl<'a> FlagGeometry<'a> {
    fn new(pts: &'a [&'a [f64]]) -> Option<Self> {
        let m = pts.len();
        let mut centers = vec![None; 1 << m];
        for (mask, slot) in centers.iter_mut().enumerate().skip(1) {
            let sub: Vec<&[f64]> = (0..m).filter(|k| mask & (1 << k) != 0).map(|k| pts[k]).collect();
            *slot = Some(circumcenter_of(&sub)?);
        }
        Some(FlagGeometry { pts, centers })
    }

    fn center(&self, mask: usize) -> &DVector<f64> {
        self.centers[mask].as_ref().expect("nonempty face")
    }

    /// Signed height of `c(mask | v)` above `aff(mask)` within the larger face.
    fn height(&self, mask: usize, v: usize) -> f64 {
        let upper = mask | (1 << v);
        let (hi, lo) = (self.center(upper), self.center(mask));
        let dist = (hi - lo).norm();
        let members: Vec<usize> = (0..self.pts.len()).filter(|k| upper & (1 << k) != 0).collect();
        let sub: Vec<&[f64]> = members.iter().map(|&k| self.pts[k]).collect();
        let bary = barycentric_of(&sub, hi).expect("nondegenerate face");
        let pos = members.iter().position(|&k| k == v).expect("member");
        if bary[pos] < 0.0 {
            -dist
        } else {
            dist
        }
    }

    /// Sum over all orderings of `rest` of the product of signed heights.
    fn sum_over_flags(&self, mask: usize, rest: &[usize]) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        rest.iter()
            .enumerate()
            .map(|(i, &v)| {
                let remaining: Vec<usize> =
                    rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &w)| w).collect();
                self.height(mask, v) * self.sum_over_flags(mask | (1 << v), &remaining)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn equilateral_triangle_duals() {
        let s = 3f64.sqrt();
        let c = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0.5, s / 2.]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        // vertex dual: kite from vertex midpoints to the circumcenter, area/3
        let area = s / 4.0;
        for v in dual_volumes(&c, 0).unwrap() {
            assert_relative_eq!(v, area / 3.0, epsilon = 1e-14);
        }
        // edge dual: inradius (circumcenter = incenter)
        for v in dual_volumes(&c, 1).unwrap() {
            assert_relative_eq!(v, s / 6.0, epsilon = 1e-14);
        }
        assert_eq!(dual_volumes(&c, 2).unwrap(), vec![1.0]);
    }

    #[test]
    fn obtuse_triangle_has_negative_edge_dual() {
        let c = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![2., 0.], vec![1., 0.3]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let duals = dual_volumes(&c, 1).unwrap();
        let long = c.find_simplex(&[0, 1]).unwrap();
        assert!(duals[long] < 0.0);
        // vertex duals still partition the area
        let total: f64 = dual_volumes(&c, 0).unwrap().iter().sum();
        assert_relative_eq!(total, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn tetrahedron_vertex_duals_partition_volume() {
        let c = SimplicialComplex::new(
            3,
            vec![vec![0., 0., 0.], vec![1., 0.1, 0.], vec![0.2, 1., 0.], vec![0.1, 0.2, 1.]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let total: f64 = dual_volumes(&c, 0).unwrap().iter().sum();
        assert_relative_eq!(total, c.simplex_volume(3, 0).value, epsilon = 1e-13);
    }
}
