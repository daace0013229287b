//! Linear algebra kernels: CG for singular semidefinite systems, symmetric
//! null-space extraction and small dense solves.

mod cg;
mod dense;
mod nullspace;

pub use cg::{cg_semidefinite, cgls, CgOptions, SolveReport};
pub use dense::{dense_solve, DenseSolution};
pub use nullspace::{dense_null_space, null_space_generalized, NullSpaceOptions, NullSpaceResult};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::sparse::SparseOperator;

fn orthonormal_columns(x: &DMatrix<f64>, m: Option<&SparseOperator>) -> DMatrix<f64> {
    if x.ncols() == 0 {
        return x.clone();
    }
    let g = gram(x, x, m);
    let chol = ((&g + g.transpose()) * 0.5).cholesky().expect("independent columns");
    let linv = chol.l().try_inverse().expect("nonsingular factor");
    x * linv.transpose()
}

fn gram(x: &DMatrix<f64>, y: &DMatrix<f64>, m: Option<&SparseOperator>) -> DMatrix<f64> {
    match m {
        Some(m) => x.transpose() * m.mul_dense(y),
        None => x.transpose() * y,
    }
}

/// Largest principal angle (radians) between the column spans of `a` and
/// `b` in the inner product with Gram matrix `m` (Euclidean when `None`).
/// Spans of different dimension are `pi / 2` apart.
///
/// The angle is taken from the residual of projecting one orthonormal basis
/// onto the other, which stays accurate for tiny angles.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>, m: Option<&SparseOperator>) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let (qa, qb) = (orthonormal_columns(a, m), orthonormal_columns(b, m));
    let residual = &qb - &qa * gram(&qa, &qb, m);
    let g = gram(&residual, &residual, m);
    let sin2 = SymmetricEigen::new((&g + g.transpose()) * 0.5).eigenvalues.max();
    sin2.max(0.0).sqrt().min(1.0).asin()
}
