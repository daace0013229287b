//! Null spaces of symmetric (generalized) eigenproblems `A x = lambda B x`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::cg::{cg_semidefinite, CgOptions};
use crate::error::{Error, Result};
use crate::sparse::{LinearOperator, SparseOperator};

#[derive(Debug, Clone)]
pub struct NullSpaceOptions {
    /// Eigenvalues with `|lambda| <= zero_tol_rel * |lambda|_max` count as zero.
    pub zero_tol_rel: f64,
    /// Largest problem handed to the dense eigensolver.
    pub dense_limit: usize,
    /// Whether `A` is known to be positive semidefinite, which permits the
    /// iterative path above `dense_limit`.
    pub semidefinite: bool,
    /// Relative tolerance of the inner CG solves on the iterative path.
    pub cg_tol: f64,
    /// Initial block size of probe vectors on the iterative path.
    pub block: usize,
}

impl Default for NullSpaceOptions {
    fn default() -> Self {
        NullSpaceOptions { zero_tol_rel: 1e-8, dense_limit: 4000, semidefinite: true, cg_tol: 1e-12, block: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct NullSpaceResult {
    /// B-orthonormal columns spanning the null space.
    pub basis: DMatrix<f64>,
    /// Eigenvalue (or Rayleigh quotient) of each column.
    pub eigenvalues: Vec<f64>,
    pub threshold_used: f64,
    /// Largest eigenvalue magnitude, or an estimate on the iterative path.
    pub largest_eigenvalue: f64,
    pub iterative: bool,
}

/// Null space of the pencil `(A, B)`; `b = None` means `B = I`.
pub fn null_space_generalized<A: LinearOperator + ?Sized>(
    a: &A,
    b: Option<&SparseOperator>,
    opts: &NullSpaceOptions,
) -> Result<NullSpaceResult> {
    let n = a.nrows();
    if a.ncols() != n || b.is_some_and(|b| b.rows() != n || b.cols() != n) {
        return Err(Error::Shape("null space needs square A and B of equal size".into()));
    }
    if n <= opts.dense_limit {
        let bd = b.map(|b| b.to_dense());
        return dense_null_space(&a.to_dense(), bd.as_ref(), opts.zero_tol_rel);
    }
    if !opts.semidefinite {
        return Err(Error::SizeLimit {
            what: "indefinite null-space problem (dense only)".into(),
            size: n,
            limit: opts.dense_limit,
        });
    }
    iterative_null_space(a, b, opts)
}

/// Dense generalized null space via the Cholesky reduction `L^{-1} A L^{-T}`.
pub fn dense_null_space(
    a: &DMatrix<f64>,
    b: Option<&DMatrix<f64>>,
    zero_tol_rel: f64,
) -> Result<NullSpaceResult> {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let (reduced, chol) = match b {
        Some(b) => {
            let chol = b
                .clone()
                .cholesky()
                .ok_or_else(|| Error::NotPositiveDefinite("B in generalized eigenproblem".into()))?;
            let l = chol.l();
            let x = l.solve_lower_triangular(&sym).expect("nonsingular Cholesky factor");
            let c = l.solve_lower_triangular(&x.transpose()).expect("nonsingular Cholesky factor");
            ((&c + c.transpose()) * 0.5, Some(l))
        }
        None => (sym, None),
    };
    let eig = SymmetricEigen::new(reduced);
    let largest = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = zero_tol_rel * largest;
    let mut keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= threshold).collect();
    keep.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()).then(i.cmp(&j)));

    let mut basis = DMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let y = eig.eigenvectors.column(i).into_owned();
        let x = match &chol {
            Some(l) => l.transpose().solve_upper_triangular(&y).expect("nonsingular Cholesky factor"),
            None => y,
        };
        basis.set_column(col, &fix_sign(x));
    }
    Ok(NullSpaceResult {
        basis,
        eigenvalues: keep.iter().map(|&i| eig.eigenvalues[i]).collect(),
        threshold_used: threshold,
        largest_eigenvalue: largest,
        iterative: false,
    })
}

/// Flips `x` so its largest-magnitude entry is positive.
fn fix_sign(x: DVector<f64>) -> DVector<f64> {
    match x.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
        Some(v) if v < 0.0 => -x,
        _ => x,
    }
}

/// Deterministic, well-spread probe vector number `k` (a Weyl sequence).
fn probe(n: usize, k: usize) -> DVector<f64> {
    let alpha = ((k + 2) as f64).sqrt().fract() + std::f64::consts::FRAC_1_SQRT_2 * (k + 1) as f64;
    DVector::from_fn(n, |j, _| ((j + 1) as f64 * alpha).fract() - 0.5)
}

/// Euclidean projection of `r` onto `ker A`, by removing the minimum-norm
/// solution of `A y = A r`. `largest` scales the test for `r` already being
/// in the kernel, where `A r` is pure roundoff.
fn kernel_component<A: LinearOperator + ?Sized>(
    a: &A,
    r: &DVector<f64>,
    largest: f64,
    cg: &CgOptions,
) -> Result<DVector<f64>> {
    let ar = a.apply(r);
    if ar.norm() <= 1e-13 * largest * r.norm() {
        return Ok(r.clone());
    }
    match cg_semidefinite(a, &ar, cg) {
        Ok((y, _)) => Ok(r - y),
        // the range part of A r is below roundoff
        Err(Error::Inconsistent { .. }) => Ok(r.clone()),
        Err(e) => Err(e),
    }
}

fn iterative_null_space<A: LinearOperator + ?Sized>(
    a: &A,
    b: Option<&SparseOperator>,
    opts: &NullSpaceOptions,
) -> Result<NullSpaceResult> {
    let n = a.nrows();
    let cg = CgOptions::with_tol(opts.cg_tol);
    let largest = power_estimate(a, b, 60)?;
    let mut block = opts.block.max(1).min(n);
    let mut next_probe = 0;
    let mut vectors: Vec<DVector<f64>> = Vec::new();
    loop {
        while vectors.len() < block {
            let z = kernel_component(a, &probe(n, next_probe), largest, &cg)?;
            next_probe += 1;
            vectors.push(z);
        }
        let rank = independent_directions(&vectors).ncols();
        if rank < vectors.len() || block == n {
            break;
        }
        block = (2 * block).min(n);
    }
    // one more pass removes range components reintroduced by roundoff
    let cleaned: Vec<DVector<f64>> = independent_directions(&vectors)
        .column_iter()
        .map(|c| kernel_component(a, &c.into_owned(), largest, &cg))
        .collect::<Result<_>>()?;
    let basis = b_orthonormalize(&cleaned, b);
    let eigenvalues = basis.column_iter().map(|x| x.dot(&a.apply(&x.into_owned()))).collect();
    Ok(NullSpaceResult {
        basis,
        eigenvalues,
        threshold_used: opts.zero_tol_rel * largest,
        largest_eigenvalue: largest,
        iterative: true,
    })
}

fn columns(rows: usize, cols: Vec<DVector<f64>>) -> DMatrix<f64> {
    if cols.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (Euclidean) of the numerically independent directions.
fn independent_directions(vectors: &[DVector<f64>]) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let m = DMatrix::from_columns(vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-6 * scale)
        .collect();
    columns(u.nrows(), keep.iter().map(|&i| u.column(i).into_owned()).collect())
}

fn b_orthonormalize(vectors: &[DVector<f64>], b: Option<&SparseOperator>) -> DMatrix<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    if vectors.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let z = DMatrix::from_columns(vectors);
    let bz = match b {
        Some(b) => b.mul_dense(&z),
        None => z.clone(),
    };
    let gram = z.transpose() * bz;
    let eig = SymmetricEigen::new((&gram + gram.transpose()) * 0.5);
    let max = eig.eigenvalues.max();
    let mut cols = Vec::new();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    for i in order {
        let lam = eig.eigenvalues[i];
        if lam > 1e-12 * max {
            cols.push(fix_sign(&z * eig.eigenvectors.column(i) / lam.sqrt()));
        }
    }
    columns(n, cols)
}

/// Power-iteration estimate of the largest eigenvalue of `(A, B)` (or of `A` when `B = I`).
fn power_estimate<A: LinearOperator + ?Sized>(a: &A, b: Option<&SparseOperator>, iters: usize) -> Result<f64> {
    let n = a.nrows();
    let bdiag = b.map(|b| b.diagonal());
    let mut x = probe(n, 1000);
    let mut lam = 0.0;
    for _ in 0..iters {
        let mut y = a.apply(&x);
        // a Jacobi-scaled B stands in for B^{-1}; only the order of magnitude matters
        if let Some(d) = &bdiag {
            for (yi, di) in y.iter_mut().zip(d) {
                if *di > 0.0 {
                    *yi /= di;
                }
            }
        }
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        lam = norm / x.norm();
        x = y / norm;
    }
    Ok(lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cycle_laplacian(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if (i + 1) % n == j || (j + 1) % n == i {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn constants_span_the_kernel() {
        let a = cycle_laplacian(6);
        let res = dense_null_space(&a, None, 1e-8).unwrap();
        assert_eq!(res.basis.ncols(), 1);
        let c = 1.0 / 6f64.sqrt();
        assert_relative_eq!(res.basis.column(0).into_owned(), DVector::from_element(6, c), epsilon = 1e-12);
    }

    #[test]
    fn generalized_basis_is_b_orthonormal() {
        let a = cycle_laplacian(5);
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 0.5, 1.5, 3.0]));
        let res = dense_null_space(&a, Some(&b), 1e-8).unwrap();
        assert_eq!(res.basis.ncols(), 1);
        let x = res.basis.column(0);
        assert_relative_eq!((x.transpose() * &b * x)[(0, 0)], 1.0, epsilon = 1e-12);
        assert!((&a * x).norm() < 1e-12);
    }

    #[test]
    fn indefinite_b_is_rejected() {
        let a = cycle_laplacian(3);
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0]));
        assert!(matches!(dense_null_space(&a, Some(&b), 1e-8), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn iterative_path_matches_dense() {
        // two disjoint cycles: kernel of dimension 2
        let n = 40;
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, 0), (n, n)).copy_from(&cycle_laplacian(n));
        a.view_mut((n, n), (n, n)).copy_from(&cycle_laplacian(n));
        let sa = SparseOperator::from_dense(&a);
        let diag: Vec<f64> = (0..2 * n).map(|i| 1.0 + (i % 3) as f64 * 0.25).collect();
        let b = SparseOperator::from_diagonal(&diag);
        let opts = NullSpaceOptions { dense_limit: 10, block: 1, ..Default::default() };
        let it = null_space_generalized(&sa, Some(&b), &opts).unwrap();
        assert!(it.iterative);
        assert_eq!(it.basis.ncols(), 2);
        let gram = it.basis.transpose() * b.mul_dense(&it.basis);
        assert_relative_eq!(gram, DMatrix::identity(2, 2), epsilon = 1e-10);
        assert!((&a * &it.basis).norm() < 1e-9);

        let mixed = NullSpaceOptions { semidefinite: false, ..opts };
        assert!(matches!(null_space_generalized(&sa, Some(&b), &mixed), Err(Error::SizeLimit { .. })));
    }
}
