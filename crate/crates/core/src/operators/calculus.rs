//! Cached operators of one complex under one Hodge star flavor.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{adjoint_sign, coboundary, hodge_star, parity, Cochain, StarKind};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::solvers::{cg_semidefinite, CgOptions};
use crate::sparse::{LinearOperator, SparseOperator};

#[derive(Debug, Clone)]
pub struct CalculusOptions {
    /// Largest star factored densely; bigger stars are inverted by CG.
    pub dense_limit: usize,
    /// Largest Whitney Laplacian assembled; bigger ones are matrix-free.
    pub assemble_limit: usize,
    /// Relative tolerance of iterative star solves.
    pub star_tol: f64,
}

impl Default for CalculusOptions {
    fn default() -> Self {
        CalculusOptions { dense_limit: 4000, assemble_limit: 20000, star_tol: 1e-14 }
    }
}

/// Applies `*_p^{-1}`.
#[derive(Debug, Clone)]
pub enum StarSolver {
    Diagonal(DVector<f64>),
    Dense(Cholesky<f64, Dyn>),
    Iterative { star: SparseOperator, tol: f64 },
}

impl StarSolver {
    /// Factors `star`; a Whitney star that fails Cholesky is not positive definite.
    pub fn new(star: &SparseOperator, dense_limit: usize, tol: f64) -> Result<Self> {
        if star.is_diagonal() {
            let diag = star.diagonal();
            if let Some(i) = diag.iter().position(|&v| v == 0.0) {
                return Err(Error::Singular(format!("star has a zero diagonal entry at {i}")));
            }
            return Ok(StarSolver::Diagonal(DVector::from_iterator(diag.len(), diag.iter().map(|v| 1.0 / v))));
        }
        if star.rows() <= dense_limit {
            let chol = Cholesky::new(star.to_dense())
                .ok_or_else(|| Error::NotPositiveDefinite("Whitney mass matrix".into()))?;
            return Ok(StarSolver::Dense(chol));
        }
        if star.diagonal().iter().any(|&v| v <= 0.0) {
            return Err(Error::NotPositiveDefinite("Whitney mass matrix".into()));
        }
        Ok(StarSolver::Iterative { star: star.clone(), tol })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        match self {
            StarSolver::Diagonal(inv) => b.component_mul(inv),
            StarSolver::Dense(chol) => chol.solve(b),
            StarSolver::Iterative { star, tol } => {
                let opts = CgOptions::with_tol(*tol).with_jacobi(&star.diagonal());
                // mass matrices are well conditioned; an SPD solve cannot be inconsistent
                cg_semidefinite(star, b, &opts).map(|(x, _)| x).unwrap_or_else(|_| DVector::zeros(b.len()))
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, StarSolver::Diagonal(_))
    }
}

/// Weak Laplacian `Delta_p`, assembled or applied matrix-free.
pub enum Laplacian<'a> {
    Assembled(SparseOperator),
    MatrixFree {
        size: usize,
        upper: Option<(&'a SparseOperator, &'a SparseOperator)>,
        lower: Option<(&'a SparseOperator, &'a SparseOperator, &'a StarSolver)>,
    },
}

impl Laplacian<'_> {
    pub fn is_assembled(&self) -> bool {
        matches!(self, Laplacian::Assembled(_))
    }

    pub fn as_sparse(&self) -> Option<&SparseOperator> {
        match self {
            Laplacian::Assembled(s) => Some(s),
            Laplacian::MatrixFree { .. } => None,
        }
    }
}

impl LinearOperator for Laplacian<'_> {
    fn nrows(&self) -> usize {
        match self {
            Laplacian::Assembled(s) => s.rows(),
            Laplacian::MatrixFree { size, .. } => *size,
        }
    }

    fn ncols(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Laplacian::Assembled(s) => s.apply(x),
            Laplacian::MatrixFree { size, upper, lower } => {
                let mut out = DVector::zeros(*size);
                if let Some((d, star)) = upper {
                    out += d.apply_transpose(&star.apply(&d.apply(x)));
                }
                if let Some((d, star, solver)) = lower {
                    let sx = star.apply(x);
                    out += star.apply(&d.apply(&solver.solve(&d.apply_transpose(&sx))));
                }
                out
            }
        }
    }

    fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64> {
        self.apply(x)
    }
}

/// Coboundaries, stars and star solvers of one complex, built on first use.
pub struct Calculus<'c> {
    complex: &'c SimplicialComplex,
    kind: StarKind,
    opts: CalculusOptions,
    d: Vec<OnceLock<SparseOperator>>,
    star: Vec<OnceLock<SparseOperator>>,
    solver: Vec<OnceLock<StarSolver>>,
}

fn get_or_try<T>(cell: &OnceLock<T>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v))
}

impl<'c> Calculus<'c> {
    pub fn new(complex: &'c SimplicialComplex, kind: StarKind) -> Self {
        Self::with_options(complex, kind, CalculusOptions::default())
    }

    pub fn with_options(complex: &'c SimplicialComplex, kind: StarKind, opts: CalculusOptions) -> Self {
        let n = complex.dim();
        Calculus {
            complex,
            kind,
            opts,
            d: (0..n).map(|_| OnceLock::new()).collect(),
            star: (0..=n).map(|_| OnceLock::new()).collect(),
            solver: (0..=n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn complex(&self) -> &'c SimplicialComplex {
        self.complex
    }

    pub fn kind(&self) -> StarKind {
        self.kind
    }

    pub fn options(&self) -> &CalculusOptions {
        &self.opts
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// `d_p`, for `p < n`.
    pub fn d(&self, p: usize) -> Result<&SparseOperator> {
        let cell = self
            .d
            .get(p)
            .ok_or_else(|| Error::Dimension(format!("coboundary d_{p} needs p < {}", self.dim())))?;
        get_or_try(cell, || coboundary(self.complex, p))
    }

    /// `*_p`, for `p <= n`.
    pub fn star(&self, p: usize) -> Result<&SparseOperator> {
        let cell = self
            .star
            .get(p)
            .ok_or_else(|| Error::Dimension(format!("star *_{p} on a {}-complex", self.dim())))?;
        get_or_try(cell, || hodge_star(self.complex, p, self.kind))
    }

    pub fn star_solver(&self, p: usize) -> Result<&StarSolver> {
        let star = self.star(p)?;
        get_or_try(&self.solver[p], || StarSolver::new(star, self.opts.dense_limit, self.opts.star_tol))
    }

    /// `*_p^{-1} x`.
    pub fn star_solve(&self, p: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.star_solver(p)?.solve(x))
    }

    /// Dense `*_p^{-1}`; refused above the dense limit for non-diagonal stars.
    pub fn star_inverse_dense(&self, p: usize) -> Result<DMatrix<f64>> {
        match self.star_solver(p)? {
            StarSolver::Diagonal(inv) => Ok(DMatrix::from_diagonal(inv)),
            StarSolver::Dense(chol) => Ok(chol.inverse()),
            StarSolver::Iterative { star, .. } => Err(Error::SizeLimit {
                what: format!("dense inverse of *_{p}"),
                size: star.rows(),
                limit: self.opts.dense_limit,
            }),
        }
    }

    fn check(&self, a: &Cochain) -> Result<()> {
        a.check(self.complex)
    }

    pub fn inner(&self, a: &Cochain, b: &Cochain) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        if a.p != b.p {
            return Err(Error::Dimension(format!("inner product of a {}- and a {}-cochain", a.p, b.p)));
        }
        self.inner_vec(a.p, &a.values, &b.values)
    }

    pub fn norm(&self, a: &Cochain) -> Result<f64> {
        Ok(self.inner(a, a)?.max(0.0).sqrt())
    }

    pub fn inner_vec(&self, p: usize, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        Ok(a.dot(&self.star(p)?.apply(b)))
    }

    pub fn norm_vec(&self, p: usize, a: &DVector<f64>) -> Result<f64> {
        Ok(self.inner_vec(p, a, a)?.max(0.0).sqrt())
    }

    /// `d_p a`.
    pub fn apply_d(&self, a: &Cochain) -> Result<Cochain> {
        self.check(a)?;
        Ok(Cochain::from_vector(a.p + 1, self.d(a.p)?.apply(&a.values)))
    }

    /// `delta_p b = (-1)^{1-(p-1)^2} *_{p-1}^{-1} d_{p-1}^T *_p b`, for `p >= 1`.
    pub fn codifferential(&self, b: &Cochain) -> Result<Cochain> {
        self.check(b)?;
        let p = b.p;
        if p == 0 {
            return Err(Error::Dimension("codifferential of a 0-cochain".into()));
        }
        let v = self.d(p - 1)?.apply_transpose(&self.star(p)?.apply(&b.values));
        let v = self.star_solve(p - 1, &v)? * adjoint_sign(p - 1);
        Ok(Cochain::from_vector(p - 1, v))
    }

    /// Note recorded when the printed global sign `(-1)^{(p-1)(n-p+1)}` of
    /// the second Laplacian term is negative and replaced by `+1`.
    pub fn laplacian_sign_note(&self, p: usize) -> Option<String> {
        let n = self.dim();
        if p == 0 || p > n {
            return None;
        }
        (parity((p - 1) * (n - p + 1)) < 0.0).then(|| {
            format!(
                "sign (-1)^((p-1)(n-p+1)) = -1 for n = {n}, p = {p} would make Delta_p indefinite; using +1"
            )
        })
    }

    /// Weak Laplace-deRham operator
    /// `Delta_p = d_p^T *_{p+1} d_p + *_p d_{p-1} *_{p-1}^{-1} d_{p-1}^T *_p`,
    /// whose null space is the harmonic `p`-cochains.
    ///
    /// With a diagonal star the result is assembled sparse. A Whitney
    /// Laplacian is assembled densely up to `assemble_limit` unknowns and
    /// applied matrix-free beyond.
    pub fn laplacian(&self, p: usize) -> Result<Laplacian<'_>> {
        let n = self.dim();
        if p > n {
            return Err(Error::Dimension(format!("Laplacian Delta_{p} on a {n}-complex")));
        }
        let size = self.complex.num_simplices(p);
        let dense_ok = size <= self.opts.assemble_limit
            && (p == 0 || self.complex.num_simplices(p - 1) <= self.opts.dense_limit);
        if p == 0 || matches!(self.kind, StarKind::Dec { .. }) || dense_ok {
            return Ok(Laplacian::Assembled(self.laplacian_assembled(p)?));
        }
        let upper = if p < n { Some((self.d(p)?, self.star(p + 1)?)) } else { None };
        let lower = if p > 0 { Some((self.d(p - 1)?, self.star(p)?, self.star_solver(p - 1)?)) } else { None };
        Ok(Laplacian::MatrixFree { size, upper, lower })
    }

    /// Assembled `Delta_p`; errors above the size limits for a Whitney star.
    pub fn laplacian_assembled(&self, p: usize) -> Result<SparseOperator> {
        let n = self.dim();
        if p > n {
            return Err(Error::Dimension(format!("Laplacian Delta_{p} on a {n}-complex")));
        }
        let size = self.complex.num_simplices(p);
        let mut lap = if p < n { self.upper_term(p)? } else { SparseOperator::zeros(size, size) };
        if p > 0 {
            lap = lap.add(&self.lower_term(p)?)?;
        }
        if let Some(note) = self.laplacian_sign_note(p) {
            lap.add_note(note);
        }
        Ok(lap)
    }

    /// `d_p^T *_{p+1} d_p`, the Gram matrix of `d_p` in the star inner product.
    pub fn upper_term(&self, p: usize) -> Result<SparseOperator> {
        let d = self.d(p)?;
        let sd = self.star(p + 1)?.matmul(d)?;
        Ok(d.transpose().matmul(&sd)?.symmetrized())
    }

    /// `*_p d_{p-1} *_{p-1}^{-1} d_{p-1}^T *_p`; dense for a Whitney star.
    pub fn lower_term(&self, p: usize) -> Result<SparseOperator> {
        let d = self.d(p - 1)?;
        let sd = self.star(p)?.matmul(d)?;
        match self.star_solver(p - 1)? {
            StarSolver::Diagonal(inv) => {
                let scaled = sd.matmul(&SparseOperator::from_diagonal(inv.as_slice()))?;
                Ok(scaled.matmul(&sd.transpose())?.symmetrized())
            }
            StarSolver::Dense(chol) => {
                let size = self.complex.num_simplices(p);
                if size > self.opts.assemble_limit {
                    return Err(Error::SizeLimit {
                        what: format!("dense Whitney Laplacian term for p = {p}"),
                        size,
                        limit: self.opts.assemble_limit,
                    });
                }
                // S K^{-1} S^T = X^T X with X = L^{-1} S^T
                let x = chol.l().solve_lower_triangular(&sd.to_dense().transpose()).expect("nonsingular factor");
                let m = x.transpose() * &x;
                Ok(SparseOperator::from_dense(&((&m + m.transpose()) * 0.5)))
            }
            StarSolver::Iterative { star, .. } => Err(Error::SizeLimit {
                what: format!("dense Whitney Laplacian term for p = {p}"),
                size: star.rows(),
                limit: self.opts.dense_limit,
            }),
        }
    }

    /// `Delta_p x`, assembled or matrix-free as [`Calculus::laplacian`] decides.
    pub fn laplacian_apply(&self, p: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.laplacian(p)?.apply(x))
    }

    /// Relative harmonicity residual `|*^{-1} Delta h|_* / |h|_*`, the
    /// star norm of the strong Laplacian of `h`.
    pub fn laplacian_residual(&self, h: &Cochain) -> Result<f64> {
        self.check(h)?;
        let lap = self.laplacian(h.p)?;
        self.laplacian_residual_with(&lap, h)
    }

    pub fn laplacian_residual_with(&self, lap: &Laplacian<'_>, h: &Cochain) -> Result<f64> {
        let hn = self.norm(h)?;
        if hn == 0.0 {
            return Ok(0.0);
        }
        let w = lap.apply(&h.values);
        let strong = self.star_solve(h.p, &w)?;
        Ok(w.dot(&strong).max(0.0).sqrt() / hn)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_triangles() -> SimplicialComplex {
        SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0.1, 0.9], vec![1.1, 1.0]],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn laplacian_zero_has_zero_row_sums() {
        let c = two_triangles();
        for kind in [StarKind::Whitney, StarKind::DEC] {
            let lap = Calculus::new(&c, kind).laplacian_assembled(0).unwrap();
            let sums = lap.apply(&DVector::from_element(4, 1.0));
            assert!(sums.amax() < 1e-14);
        }
    }

    #[test]
    fn matrix_free_matches_assembled() {
        let c = two_triangles();
        let opts = CalculusOptions { assemble_limit: 0, dense_limit: 0, ..Default::default() };
        let free = Calculus::with_options(&c, StarKind::Whitney, opts);
        let assembled = Calculus::new(&c, StarKind::Whitney);
        for p in 0..=2 {
            let lap = free.laplacian(p).unwrap();
            assert_eq!(lap.is_assembled(), p == 0);
            let x = DVector::from_fn(c.num_simplices(p), |i, _| (i as f64 * 0.7).sin());
            let a = assembled.laplacian_assembled(p).unwrap().apply(&x);
            assert_relative_eq!(lap.apply(&x), a, epsilon = 1e-12);
        }
    }

    #[test]
    fn top_laplacian_sign_note() {
        let c = two_triangles();
        let calc = Calculus::new(&c, StarKind::DEC);
        assert!(calc.laplacian_sign_note(2).is_some());
        assert!(calc.laplacian_sign_note(1).is_none());
        let lap = calc.laplacian_assembled(2).unwrap();
        assert_eq!(lap.notes().len(), 1);
        let eig = lap.to_dense().symmetric_eigenvalues();
        assert!(eig.min() > -1e-12);
    }
}
