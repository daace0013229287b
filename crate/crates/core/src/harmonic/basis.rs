use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{require_cocycle, with_h, HarmonicOptions, HarmonicResult, Method};
use crate::complex::{SimplicialComplex, SummaryOptions};
use crate::error::{Error, Result};
use crate::operators::{Calculus, Cochain, StarKind};
use crate::solvers::{dense_null_space, dense_solve, null_space_generalized, NullSpaceOptions, SolveReport};
use crate::sparse::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisMethod {
    EigenDirect,
    EigenMixed,
}

/// Columns of `h` span the harmonic `p`-cochains and are star-orthonormal.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub p: usize,
    pub star: StarKind,
    pub h: DMatrix<f64>,
    /// `|*^{-1} Delta h|_* / |h|_*` per column.
    pub residual_norms: Vec<f64>,
    /// Eigenvalue belonging to each column.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub method: BasisMethod,
    /// `|sigma| / |u|` per column (mixed method only).
    pub sigma_ratios: Vec<f64>,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.h.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.h.ncols() == 0
    }

    pub fn column(&self, k: usize) -> Cochain {
        Cochain::from_vector(self.p, self.h.column(k).into_owned())
    }
}

#[derive(Debug, Clone)]
pub struct BasisOptions {
    pub nullspace: NullSpaceOptions,
    /// Largest accepted `|*^{-1} Delta h|_* / |h|_*`.
    pub harmonic_tol: f64,
    /// Compare the column count with the Betti number (when it is computable).
    pub check_betti: bool,
    pub summary: SummaryOptions,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            nullspace: NullSpaceOptions::default(),
            harmonic_tol: 1e-8,
            check_betti: true,
            summary: SummaryOptions::default(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_basis(
    calc: &Calculus<'_>,
    p: usize,
    h: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    threshold: f64,
    method: BasisMethod,
    sigma_ratios: Vec<f64>,
    opts: &BasisOptions,
) -> Result<HarmonicBasis> {
    let lap = calc.laplacian(p)?;
    let mut residual_norms = Vec::with_capacity(h.ncols());
    for (k, col) in h.column_iter().enumerate() {
        let r = calc.laplacian_residual_with(&lap, &Cochain::from_vector(p, col.into_owned()))?;
        if r > opts.harmonic_tol {
            return Err(Error::NotHarmonic { column: k, residual: r });
        }
        residual_norms.push(r);
    }
    if opts.check_betti {
        if let Some(betti) = calc.complex().betti_numbers(&opts.summary)? {
            if betti[p] != h.ncols() {
                return Err(Error::BettiMismatch { p, expected: betti[p], found: h.ncols() });
            }
        }
    }
    Ok(HarmonicBasis { p, star: calc.kind(), h, residual_norms, eigenvalues, threshold, method, sigma_ratios })
}

/// Harmonic basis from the null space of `Delta_p u = lambda *_p u`.
pub fn harmonic_basis_direct(calc: &Calculus<'_>, p: usize, opts: &BasisOptions) -> Result<HarmonicBasis> {
    let lap = calc.laplacian(p)?;
    let ns = null_space_generalized(&lap, Some(calc.star(p)?), &opts.nullspace)?;
    finish_basis(calc, p, ns.basis, ns.eigenvalues, ns.threshold_used, BasisMethod::EigenDirect, Vec::new(), opts)
}

/// Harmonic basis from the null space of the symmetric indefinite block system
/// `[[-*_{p-1}, d^T *_p], [*_p d, d_p^T *_{p+1} d_p]]` in the unknowns `(sigma, u)`.
///
/// Each null vector must have a negligible `sigma` part; a large one is an
/// error. Dense only.
pub fn harmonic_basis_mixed(calc: &Calculus<'_>, p: usize, opts: &BasisOptions) -> Result<HarmonicBasis> {
    let c = calc.complex();
    let n = calc.dim();
    if p == 0 || p > n {
        return Err(Error::Dimension(format!("mixed method needs 1 <= p <= {n}")));
    }
    let m = c.num_simplices(p - 1);
    let k = c.num_simplices(p);
    if m + k > opts.nullspace.dense_limit {
        return Err(Error::SizeLimit { what: "mixed eigenproblem".into(), size: m + k, limit: opts.nullspace.dense_limit });
    }
    let star = calc.star(p)?;
    let sd = star.matmul(calc.d(p - 1)?)?.to_dense();
    let mut block = DMatrix::zeros(m + k, m + k);
    block.view_mut((0, 0), (m, m)).copy_from(&(-calc.star(p - 1)?.to_dense()));
    block.view_mut((0, m), (m, k)).copy_from(&sd.transpose());
    block.view_mut((m, 0), (k, m)).copy_from(&sd);
    if p < n {
        block.view_mut((m, m), (k, k)).copy_from(&calc.upper_term(p)?.to_dense());
    }
    // symmetric diagonal scaling: the two blocks differ in scale by about h^-4
    let scale = DVector::from_fn(m + k, |i, _| {
        let d = block[(i, i)].abs();
        if d > 0.0 {
            d.sqrt().recip()
        } else {
            1.0
        }
    });
    let scaled = DMatrix::from_fn(m + k, m + k, |i, j| scale[i] * block[(i, j)] * scale[j]);
    let ns = dense_null_space(&scaled, None, opts.nullspace.zero_tol_rel)?;

    let cols = ns.basis.ncols();
    let mut u = DMatrix::zeros(k, cols);
    let mut sigma_ratios = Vec::with_capacity(cols);
    for j in 0..cols {
        let v = ns.basis.column(j).component_mul(&scale);
        let sigma = v.rows(0, m).norm();
        let un = v.rows(m, k).norm();
        let ratio = if un == 0.0 { f64::INFINITY } else { sigma / un };
        if ratio > 1e-10 {
            return Err(Error::SigmaNotNegligible { column: j, ratio });
        }
        sigma_ratios.push(ratio);
        u.set_column(j, &v.rows(m, k));
    }
    let h = if cols == 0 {
        u
    } else {
        let gram = u.transpose() * star.mul_dense(&u);
        let chol = ((&gram + gram.transpose()) * 0.5)
            .cholesky()
            .ok_or_else(|| Error::Singular("mixed null vectors are dependent".into()))?;
        let linv = chol.l().try_inverse().ok_or_else(|| Error::Singular("mixed null vectors".into()))?;
        u * linv.transpose()
    };
    finish_basis(calc, p, h, ns.eigenvalues, ns.threshold_used, BasisMethod::EigenMixed, sigma_ratios, opts)
}

/// Harmonic part of `omega`: `h = H a` with `H^T * H a = H^T * omega`.
///
/// For a star-orthonormal basis `a = H^T * omega` directly. An empty basis
/// gives `h = 0`.
pub fn project_to_harmonics(
    calc: &Calculus<'_>,
    basis: &HarmonicBasis,
    omega: &Cochain,
    opts: &HarmonicOptions,
) -> Result<HarmonicResult> {
    require_cocycle(calc, omega, opts.cocycle_tol)?;
    if basis.p != omega.p || basis.h.nrows() != omega.len() {
        return Err(Error::Shape(format!(
            "basis of {}-cochains ({} rows) and a {}-cochain of length {}",
            basis.p,
            basis.h.nrows(),
            omega.p,
            omega.len()
        )));
    }
    let start = Instant::now();
    let star = calc.star(omega.p)?;
    let sh = star.mul_dense(&basis.h);
    let rhs = sh.tr_mul(&omega.values);
    let gram = basis.h.tr_mul(&sh);
    let k = gram.nrows();
    let orthonormal = (&gram - DMatrix::<f64>::identity(k, k)).amax() <= 1e-12;
    let a = if orthonormal || k == 0 {
        rhs
    } else {
        let sol = dense_solve(&gram, &DMatrix::from_column_slice(k, 1, rhs.as_slice()))?;
        sol.x.column(0).into_owned()
    };
    let h: DVector<f64> = &basis.h * a;
    let report = SolveReport { iterations: 0, relative_residual: 0.0, converged: true, wall_time: start.elapsed().as_secs_f64() };
    with_h(calc, omega, Cochain::from_vector(omega.p, h), report, None, Method::Projection, opts.spot_checks)
}

/// Integer `p`-cycles, one per column.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyBasis {
    pub p: usize,
    pub b: DMatrix<f64>,
}

impl HomologyBasis {
    /// Checks that entries are integers and that every column is a cycle.
    pub fn new(c: &SimplicialComplex, p: usize, b: DMatrix<f64>) -> Result<Self> {
        if p == 0 || p > c.dim() {
            return Err(Error::Dimension(format!("{p}-cycles on a {}-complex", c.dim())));
        }
        if b.nrows() != c.num_simplices(p) {
            return Err(Error::Shape(format!("{}-chains need {} rows, got {}", p, c.num_simplices(p), b.nrows())));
        }
        if b.iter().any(|v| v.fract() != 0.0 || v.abs() > 2f64.powi(40)) {
            return Err(Error::InvalidComplex("homology chains must have integer entries".into()));
        }
        for (j, col) in b.column_iter().enumerate() {
            let mut boundary = vec![0i64; c.num_simplices(p - 1)];
            for (i, &v) in col.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                for (k, &f) in c.facets(p, i).iter().enumerate() {
                    let s = if k % 2 == 0 { 1 } else { -1 };
                    boundary[f] += s * v as i64;
                }
            }
            if boundary.iter().any(|&x| x != 0) {
                return Err(Error::InvalidComplex(format!("chain {j} has a nonzero boundary")));
            }
        }
        Ok(HomologyBasis { p, b })
    }

    /// 1-cycles from closed vertex loops. The last vertex connects back to
    /// the first; repeating the first vertex at the end is also accepted.
    pub fn from_vertex_loops(c: &SimplicialComplex, loops: &[Vec<usize>]) -> Result<Self> {
        let mut b = DMatrix::zeros(c.num_simplices(1), loops.len());
        for (j, lp) in loops.iter().enumerate() {
            let lp = match lp.as_slice() {
                [first, .., last] if first == last => &lp[..lp.len() - 1],
                _ => &lp[..],
            };
            for i in 0..lp.len() {
                let (a, z) = (lp[i], lp[(i + 1) % lp.len()]);
                let e = c
                    .find_simplex(&[a, z])
                    .filter(|_| a != z)
                    .ok_or_else(|| Error::InvalidComplex(format!("loop {j}: no edge between {a} and {z}")))?;
                b[(e, j)] += if a < z { 1.0 } else { -1.0 };
            }
        }
        Self::new(c, 1, b)
    }

    pub fn from_chains(c: &SimplicialComplex, chains: &[Cochain]) -> Result<Self> {
        let p = chains.first().map_or(1, |ch| ch.p);
        if chains.iter().any(|ch| ch.p != p) {
            return Err(Error::Shape("chains of different degrees".into()));
        }
        let rows = c.num_simplices(p);
        let mut b = DMatrix::zeros(rows, chains.len());
        for (j, ch) in chains.iter().enumerate() {
            if ch.len() != rows {
                return Err(Error::Shape(format!("chain {j} has length {}, expected {rows}", ch.len())));
            }
            b.set_column(j, &ch.values);
        }
        Self::new(c, p, b)
    }

    pub fn len(&self) -> usize {
        self.b.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.b.ncols() == 0
    }
}

/// `H (B^T H)^{-1}`: harmonic cochains whose periods on the cycles of `B`
/// form the identity matrix.
pub fn pair_homology(h: &DMatrix<f64>, b: &HomologyBasis) -> Result<DMatrix<f64>> {
    if h.ncols() != b.len() || h.nrows() != b.b.nrows() {
        return Err(Error::Shape(format!(
            "harmonic basis is {}x{}, homology basis is {}x{}",
            h.nrows(),
            h.ncols(),
            b.b.nrows(),
            b.len()
        )));
    }
    if h.ncols() == 0 {
        return Ok(h.clone());
    }
    let periods = b.b.tr_mul(h);
    // (H M^{-1})^T = M^{-T} H^T
    let sol = dense_solve(&periods.transpose(), &h.transpose())
        .map_err(|_| Error::Singular("cycles do not pair with the harmonic basis".into()))?;
    Ok(sol.x.transpose())
}
