//! Whitney-form mass matrices.
//!
//! For the Whitney form of `sigma = [a_0..a_p]` on a top simplex,
//! `W = p! sum_k (-1)^k lambda_{a_k} dlambda_{a_0} ^ .. (omit k) .. ^ dlambda_{a_p}`,
//! and the L2 product of two such forms reduces to integrals of products of
//! barycentric coordinates times Gram determinants of their gradients.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::complex::geometry::{barycentric_gradients, factorial, volume_of};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// All `k`-element subsets of `0..m` in lexicographic order.
pub(crate) fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn minor_det(gram: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| gram[(rows[i], cols[j])]).determinant()
}

/// Element mass matrix for Whitney `p`-forms on one `n`-simplex, indexed by
/// the lexicographic local `p`-faces.
pub(crate) fn local_mass(points: &[&[f64]], p: usize) -> Option<DMatrix<f64>> {
    let n = points.len() - 1;
    let vol = volume_of(points);
    if vol.degenerate {
        return None;
    }
    let grads = barycentric_gradients(points)?;
    let gram = grads.transpose() * &grads;
    let faces = combinations(n + 1, p + 1);
    let scale = factorial(p).powi(2);
    let denom = ((n + 1) * (n + 2)) as f64;
    let lambda_int = |i: usize, j: usize| vol.value * if i == j { 2.0 } else { 1.0 } / denom;

    let m = faces.len();
    let mut out = DMatrix::zeros(m, m);
    let mut sub_a = Vec::with_capacity(p);
    let mut sub_b = Vec::with_capacity(p);
    for a in 0..m {
        for b in a..m {
            let (fa, fb) = (&faces[a], &faces[b]);
            let mut acc = 0.0;
            for k in 0..=p {
                sub_a.clear();
                sub_a.extend(fa.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v));
                for l in 0..=p {
                    sub_b.clear();
                    sub_b.extend(fb.iter().enumerate().filter(|&(i, _)| i != l).map(|(_, &v)| v));
                    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * lambda_int(fa[k], fb[l]) * minor_det(&gram, &sub_a, &sub_b);
                }
            }
            out[(a, b)] = scale * acc;
            out[(b, a)] = scale * acc;
        }
    }
    Some(out)
}

/// Global Whitney mass matrix `M_p`, assembled over top simplices.
pub(crate) fn mass_matrix(c: &SimplicialComplex, p: usize) -> Result<SparseOperator> {
    let n = c.dim();
    let local_faces = combinations(n + 1, p + 1);
    let per_element: Vec<Result<Vec<(usize, usize, f64)>>> = crate::parallel::install(|| {
        (0..c.num_simplices(n))
            .into_par_iter()
            .map(|t| {
                let verts = c.simplex(n, t);
                let pts: Vec<&[f64]> = verts.iter().map(|&v| c.vertex(v)).collect();
                let local = local_mass(&pts, p).ok_or(Error::Degenerate { p: n, index: t })?;
                let global: Vec<usize> = local_faces
                    .iter()
                    .map(|f| {
                        let tuple: Vec<usize> = f.iter().map(|&k| verts[k]).collect();
                        c.simplices(p).find(&tuple).expect("face of top simplex")
                    })
                    .collect();
                let mut trip = Vec::with_capacity(global.len() * global.len());
                for (a, &ga) in global.iter().enumerate() {
                    for (b, &gb) in global.iter().enumerate() {
                        trip.push((ga, gb, local[(a, b)]));
                    }
                }
                Ok(trip)
            })
            .collect()
    });
    let mut triplets = Vec::new();
    for t in per_element {
        triplets.extend(t?);
    }
    let size = c.num_simplices(p);
    Ok(SparseOperator::from_triplets(size, size, &triplets))
}
