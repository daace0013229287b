use nalgebra::{DMatrix, DVector};

use super::SimplicialComplex;
use crate::error::{Error, Result};

// Relative Gram-determinant threshold below which a simplex counts as flat.
const DEGENERATE_REL: f64 = 1e-12;

/// Unsigned p-volume of a simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Volume {
    pub value: f64,
    pub degenerate: bool,
}

/// Edge vectors `v_k - v_0` as columns.
pub(crate) fn edge_matrix(points: &[&[f64]]) -> DMatrix<f64> {
    let d = points[0].len();
    let p = points.len() - 1;
    DMatrix::from_fn(d, p, |r, c| points[c + 1][r] - points[0][r])
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

pub(crate) fn volume_of(points: &[&[f64]]) -> Volume {
    let p = points.len() - 1;
    if p == 0 {
        return Volume { value: 1.0, degenerate: false };
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let det = gram.determinant();
    let scale: f64 = (0..p).map(|k| gram[(k, k)]).product();
    if !(det > DEGENERATE_REL * scale) {
        return Volume { value: 0.0, degenerate: true };
    }
    Volume { value: det.sqrt() / factorial(p), degenerate: false }
}

/// Circumcenter of the points, lying in their affine hull.
pub(crate) fn circumcenter_of(points: &[&[f64]]) -> Option<DVector<f64>> {
    let p = points.len() - 1;
    let origin = DVector::from_column_slice(points[0]);
    if p == 0 {
        return Some(origin);
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let rhs = DVector::from_fn(p, |k, _| 0.5 * gram[(k, k)]);
    let coeffs = gram.cholesky()?.solve(&rhs);
    Some(origin + e * coeffs)
}

/// Barycentric coordinates of `x` (assumed in the affine hull) w.r.t. the points.
pub(crate) fn barycentric_of(points: &[&[f64]], x: &DVector<f64>) -> Option<DVector<f64>> {
    let p = points.len() - 1;
    if p == 0 {
        return Some(DVector::from_element(1, 1.0));
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let rel = x - DVector::from_column_slice(points[0]);
    let mu = gram.cholesky()?.solve(&(e.transpose() * rel));
    let mut out = DVector::zeros(p + 1);
    out[0] = 1.0 - mu.sum();
    out.rows_mut(1, p).copy_from(&mu);
    Some(out)
}

/// Gradients of the barycentric coordinate functions of a nondegenerate
/// simplex, one per column, tangent to its affine hull.
pub(crate) fn barycentric_gradients(points: &[&[f64]]) -> Option<DMatrix<f64>> {
    let p = points.len() - 1;
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let inv = gram.cholesky()?.inverse();
    let tail = &e * inv; // columns: grad lambda_1 .. grad lambda_p
    let d = e.nrows();
    let mut grads = DMatrix::zeros(d, p + 1);
    for k in 0..p {
        grads.set_column(k + 1, &tail.column(k));
    }
    let first = -tail.column_sum();
    grads.set_column(0, &first);
    Some(grads)
}

impl SimplicialComplex {
    pub(crate) fn points_of(&self, p: usize, i: usize) -> Vec<&[f64]> {
        self.simplex(p, i).iter().map(|&v| self.vertex(v)).collect()
    }

    /// Unsigned p-volume via the Gram determinant; flat simplices report zero
    /// with `degenerate` set.
    pub fn simplex_volume(&self, p: usize, i: usize) -> Volume {
        volume_of(&self.points_of(p, i))
    }

    pub fn circumcenter(&self, p: usize, i: usize) -> Result<Vec<f64>> {
        let pts = self.points_of(p, i);
        if volume_of(&pts).degenerate {
            return Err(Error::Degenerate { p, index: i });
        }
        circumcenter_of(&pts)
            .map(|c| c.iter().copied().collect())
            .ok_or(Error::Degenerate { p, index: i })
    }

    pub fn barycenter(&self, p: usize, i: usize) -> Vec<f64> {
        let pts = self.points_of(p, i);
        let w = 1.0 / pts.len() as f64;
        (0..self.embedding_dim())
            .map(|r| pts.iter().map(|x| x[r]).sum::<f64>() * w)
            .collect()
    }

    /// Indices of flat p-simplices.
    pub fn degenerate_simplices(&self, p: usize) -> Vec<usize> {
        (0..self.num_simplices(p)).filter(|&i| self.simplex_volume(p, i).degenerate).collect()
    }
}
