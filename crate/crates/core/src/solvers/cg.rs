//! Conjugate gradients for consistent symmetric positive semidefinite systems.

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::LinearOperator;

/// Stopping rule and optional Jacobi preconditioner for [`cg_semidefinite`].
#[derive(Debug, Clone)]
pub struct CgOptions {
    /// Target for `|b - A x| / |b|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Inverse diagonal used as a preconditioner; `None` runs plain CG.
    pub preconditioner: Option<DVector<f64>>,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-12, max_iter: 100_000, preconditioner: None }
    }
}

impl CgOptions {
    pub fn with_tol(tol: f64) -> Self {
        CgOptions { tol, ..Default::default() }
    }

    /// Jacobi preconditioning from the operator's diagonal; zero entries are left unscaled.
    pub fn with_jacobi(mut self, diagonal: &[f64]) -> Self {
        let inv = diagonal.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 });
        self.preconditioner = Some(DVector::from_iterator(diagonal.len(), inv));
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    /// Seconds.
    pub wall_time: f64,
}

// how often the recursive residual is replaced by the true one
const REPLACE_EVERY: usize = 50;
// directions with curvature below this fraction of |A| |p|^2 lie in the kernel
const KERNEL_CURVATURE: f64 = 1e-14;

/// Solves `A x = b` for symmetric positive semidefinite `A` with `b` in its range.
///
/// The iteration starts from `x = 0`, so in exact arithmetic `x` stays in the
/// range of `A`. When the iteration limit is hit the last iterate is returned
/// with `converged = false`. A search direction with no positive curvature
/// while the residual is still above tolerance means `b` has a component in
/// the kernel, which is reported as [`Error::Inconsistent`].
pub fn cg_semidefinite<A: LinearOperator + ?Sized>(
    a: &A,
    b: &DVector<f64>,
    opts: &CgOptions,
) -> Result<(DVector<f64>, SolveReport)> {
    let start = Instant::now();
    let n = b.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Shape(format!(
            "cg: operator is {}x{}, right-hand side has length {n}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut x = DVector::zeros(n);
    let bnorm = b.norm();
    if bnorm == 0.0 {
        let report = SolveReport { iterations: 0, relative_residual: 0.0, converged: true, wall_time: 0.0 };
        return Ok((x, report));
    }
    let precond = |r: &DVector<f64>| match &opts.preconditioner {
        Some(m) => r.component_mul(m),
        None => r.clone(),
    };

    let mut r = b.clone();
    let mut z = precond(&r);
    let mut dir = z.clone();
    let mut rz = r.dot(&z);
    let mut rel = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    // running estimate of |A| for the curvature test
    let mut anorm: f64 = 0.0;
    while iterations < opts.max_iter {
        let ap = a.apply(&dir);
        let curvature = dir.dot(&ap);
        let dd = dir.norm_squared();
        anorm = anorm.max(ap.norm() / dd.sqrt());
        if !(curvature > KERNEL_CURVATURE * anorm * dd) {
            let true_rel = (b - a.apply(&x)).norm() / bnorm;
            if true_rel <= opts.tol {
                rel = true_rel;
                converged = true;
                break;
            }
            return Err(Error::Inconsistent { residual: true_rel });
        }
        let step = rz / curvature;
        x.axpy(step, &dir, 1.0);
        iterations += 1;
        if iterations % REPLACE_EVERY == 0 {
            r = b - a.apply(&x);
        } else {
            r.axpy(-step, &ap, 1.0);
        }
        rel = r.norm() / bnorm;
        if rel <= opts.tol {
            // confirm against the true residual before stopping
            let true_r = b - a.apply(&x);
            rel = true_r.norm() / bnorm;
            if rel <= opts.tol {
                converged = true;
                break;
            }
            r = true_r;
        }
        z = precond(&r);
        let rz_next = r.dot(&z);
        let beta = rz_next / rz;
        rz = rz_next;
        dir.axpy(1.0, &z, beta);
    }

    let report = SolveReport {
        iterations,
        relative_residual: rel,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}

/// Least-squares CG (CGLS) for a consistent rectangular system `G x = b`.
///
/// Iterates on the normal equations without forming `G^T G`; the reported
/// residual is `|b - G x| / |b|`.
pub fn cgls<A: LinearOperator + ?Sized>(
    g: &A,
    b: &DVector<f64>,
    opts: &CgOptions,
) -> Result<(DVector<f64>, SolveReport)> {
    let start = Instant::now();
    if g.nrows() != b.len() {
        return Err(Error::Shape(format!(
            "cgls: operator has {} rows, right-hand side has length {}",
            g.nrows(),
            b.len()
        )));
    }
    let mut x = DVector::zeros(g.ncols());
    let bnorm = b.norm();
    if bnorm == 0.0 {
        let report = SolveReport { iterations: 0, relative_residual: 0.0, converged: true, wall_time: 0.0 };
        return Ok((x, report));
    }
    let mut r = b.clone();
    let mut s = g.apply_transpose(&r);
    let mut dir = s.clone();
    let mut gamma = s.norm_squared();
    let gamma0 = gamma;
    let mut rel = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let q = g.apply(&dir);
        let qq = q.norm_squared();
        if qq == 0.0 {
            break;
        }
        let step = gamma / qq;
        x.axpy(step, &dir, 1.0);
        iterations += 1;
        if iterations % REPLACE_EVERY == 0 {
            r = b - g.apply(&x);
        } else {
            r.axpy(-step, &q, 1.0);
        }
        rel = r.norm() / bnorm;
        s = g.apply_transpose(&r);
        let gamma_next = s.norm_squared();
        if rel <= opts.tol {
            rel = (b - g.apply(&x)).norm() / bnorm;
            if rel <= opts.tol {
                converged = true;
                break;
            }
        }
        // normal-equation residual at roundoff: the system is as solved as it gets
        if gamma_next <= (f64::EPSILON * f64::EPSILON) * gamma0 {
            break;
        }
        dir.axpy(1.0, &s, gamma_next / gamma);
        gamma = gamma_next;
    }
    let report = SolveReport {
        iterations,
        relative_residual: rel,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}
