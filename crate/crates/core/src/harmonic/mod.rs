//! Harmonic representatives of cohomology classes.
//!
//! For a cocycle `omega` in `C^p`, the harmonic cochain in its class is
//! `h = omega + d alpha`, where `alpha` solves the weighted least-squares
//! normal equations `d^T * d alpha = -d^T * omega`. The same `h` comes out of
//! projecting onto a harmonic basis found by an eigensolver, and of the
//! comparison systems in [`compare`].

mod basis;
mod cocycle;
pub mod compare;

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use basis::{
    harmonic_basis_direct, harmonic_basis_mixed, pair_homology, project_to_harmonics, BasisMethod, BasisOptions,
    HarmonicBasis, HomologyBasis,
};
pub use cocycle::cocycle_from_dual_chain;
pub use compare::{compare_methods, desbrun, gu_yau, ComparisonReport, Method};

use crate::error::{Error, Result};
use crate::operators::{Calculus, Cochain, StarKind};
use crate::solvers::{cg_semidefinite, CgOptions, SolveReport};
use crate::sparse::{FnOperator, LinearOperator, SparseOperator};

/// Result of [`is_cocycle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CocycleCheck {
    pub closed: bool,
    /// `|d omega|_inf`.
    pub norm: f64,
    pub tol: f64,
}

/// Whether `d_p omega` vanishes.
///
/// The default tolerance is exact zero for integer-valued cochains and
/// `1e-12 * max(1, |omega|_inf)` otherwise. Top-dimensional cochains are
/// closed.
pub fn is_cocycle(calc: &Calculus<'_>, omega: &Cochain, tol: Option<f64>) -> Result<CocycleCheck> {
    omega.check(calc.complex())?;
    let integral = omega.values.iter().all(|v| v.fract() == 0.0);
    let scale = omega.values.amax().max(1.0);
    let tol = tol.unwrap_or(if integral { 0.0 } else { 1e-12 * scale });
    if omega.p >= calc.dim() {
        return Ok(CocycleCheck { closed: true, norm: 0.0, tol });
    }
    let norm = calc.d(omega.p)?.apply(&omega.values).amax();
    Ok(CocycleCheck { closed: norm <= tol, norm, tol })
}

/// Size and sparsity of an assembled system matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub assembly_seconds: f64,
}

impl SystemInfo {
    fn of(m: &SparseOperator, assembly_seconds: f64) -> Self {
        SystemInfo { rows: m.rows(), cols: m.cols(), nnz: m.nnz(), assembly_seconds }
    }
}

/// Checks that `h` is harmonic, in absolute and scale-free forms.
///
/// The relative closedness measures compare `|L h|_inf` with
/// `| |L| |h| |_inf`, i.e. the size of the result against the size of the
/// terms that cancel in it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub h_norm: f64,
    /// `|d h|_*`.
    pub d_norm: f64,
    pub d_relative: f64,
    /// `|delta h|_*`.
    pub codifferential_norm: f64,
    /// Relative size of the weak codifferential `d^T * h`.
    pub codifferential_relative: f64,
    /// `|*^{-1} Delta h|_* / |h|_*`.
    pub laplacian_residual: f64,
    /// `|<h, d tau>_*| / (|h|_* |d tau|_*)` for fixed test cochains `tau`.
    pub gradient_spot_checks: Vec<f64>,
    /// `|d alpha|_*`, when a potential was computed.
    pub alpha_image_norm: Option<f64>,
}

/// Output of the harmonic solvers.
#[derive(Debug, Clone)]
pub struct HarmonicResult {
    pub omega: Cochain,
    pub alpha: Option<Cochain>,
    pub h: Cochain,
    pub star: StarKind,
    pub method: Method,
    pub report: SolveReport,
    pub system: Option<SystemInfo>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct HarmonicOptions {
    pub cg: CgOptions,
    /// Fix `alpha` to zero at this vertex (p = 1 only), removing the kernel of `d_0`.
    pub pin_vertex: Option<usize>,
    /// Tolerance for the cocycle check; see [`is_cocycle`].
    pub cocycle_tol: Option<f64>,
    /// Number of test cochains for the orthogonality spot checks.
    pub spot_checks: usize,
}

impl Default for HarmonicOptions {
    fn default() -> Self {
        HarmonicOptions { cg: CgOptions::default(), pin_vertex: None, cocycle_tol: None, spot_checks: 3 }
    }
}

pub(crate) fn require_cocycle(calc: &Calculus<'_>, omega: &Cochain, tol: Option<f64>) -> Result<()> {
    omega.check(calc.complex())?;
    if omega.p == 0 {
        return Err(Error::Dimension("harmonic representatives need p >= 1".into()));
    }
    let check = is_cocycle(calc, omega, tol)?;
    if !check.closed {
        return Err(Error::NotCocycle { norm: check.norm });
    }
    Ok(())
}

/// Harmonic representative of the class of `omega` by the least-squares
/// normal equations, solved with unpreconditioned CG from zero.
///
/// `alpha` is whichever solution CG reaches; `d alpha`, and so `h`, does not
/// depend on that choice. A non-converged solve still returns a result, with
/// `report.converged = false`.
pub fn harmonic_ls(calc: &Calculus<'_>, omega: &Cochain, opts: &HarmonicOptions) -> Result<HarmonicResult> {
    require_cocycle(calc, omega, opts.cocycle_tol)?;
    let p = omega.p;
    let start = Instant::now();
    let system = calc.upper_term(p - 1)?;
    let info = SystemInfo::of(&system, start.elapsed().as_secs_f64());
    let d = calc.d(p - 1)?;
    let rhs = -d.apply_transpose(&calc.star(p)?.apply(&omega.values));

    let (alpha, report) = match opts.pin_vertex {
        None => solve_refined(&system, &rhs, &opts.cg)?,
        Some(v) => {
            if p != 1 {
                return Err(Error::Dimension("pin_vertex applies to p = 1 only".into()));
            }
            if v >= system.rows() {
                return Err(Error::VertexIndex { index: v, count: system.rows() });
            }
            // identity on the pinned unknown, original operator on the rest
            let pinned = FnOperator::symmetric(system.rows(), |x: &DVector<f64>| {
                let mut masked = x.clone();
                masked[v] = 0.0;
                let mut y = system.apply(&masked);
                y[v] = x[v];
                y
            });
            let mut b = rhs.clone();
            b[v] = 0.0;
            solve_refined(&pinned, &b, &opts.cg)?
        }
    };
    let alpha = Cochain::from_vector(p - 1, alpha);
    finish(calc, omega, Some(alpha), report, Some(info), Method::Ls, opts.spot_checks)
}

/// CG followed by one refinement sweep on the true residual.
///
/// The error in `d alpha` grows like the stopping tolerance times the
/// square root of the condition number, so after convergence the residual
/// is pushed a further two digits down. The sweep is skipped when it is
/// already there, and discarded if it fails to help.
pub(crate) fn solve_refined<A: LinearOperator + ?Sized>(
    a: &A,
    b: &DVector<f64>,
    opts: &CgOptions,
) -> Result<(DVector<f64>, SolveReport)> {
    let (mut x, mut report) = cg_semidefinite(a, b, opts)?;
    let bnorm = b.norm();
    if !report.converged || bnorm == 0.0 {
        return Ok((x, report));
    }
    let target = 1e-2 * opts.tol * bnorm;
    let r = b - a.apply(&x);
    let rn = r.norm();
    if rn <= target {
        return Ok((x, report));
    }
    let inner = CgOptions { tol: target / rn, max_iter: report.iterations.max(50), ..opts.clone() };
    match cg_semidefinite(a, &r, &inner) {
        Ok((dx, extra)) => {
            let candidate = &x + dx;
            let rn2 = (b - a.apply(&candidate)).norm();
            report.iterations += extra.iterations;
            report.wall_time += extra.wall_time;
            if rn2 < rn {
                x = candidate;
                report.relative_residual = rn2 / bnorm;
            }
        }
        // the residual is already at roundoff level
        Err(Error::Inconsistent { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok((x, report))
}

/// Builds `h = omega + d alpha` and its diagnostics.
pub(crate) fn finish(
    calc: &Calculus<'_>,
    omega: &Cochain,
    alpha: Option<Cochain>,
    report: SolveReport,
    system: Option<SystemInfo>,
    method: Method,
    spot_checks: usize,
) -> Result<HarmonicResult> {
    let (h, alpha_image_norm) = match &alpha {
        Some(a) => {
            let da = calc.d(omega.p - 1)?.apply(&a.values);
            let n = calc.norm_vec(omega.p, &da)?;
            (Cochain::from_vector(omega.p, &omega.values + da), Some(n))
        }
        None => (omega.clone(), None),
    };
    let mut diagnostics = diagnose(calc, &h, spot_checks)?;
    diagnostics.alpha_image_norm = alpha_image_norm;
    Ok(HarmonicResult { omega: omega.clone(), alpha, h, star: calc.kind(), method, report, system, diagnostics })
}

pub(crate) fn with_h(
    calc: &Calculus<'_>,
    omega: &Cochain,
    h: Cochain,
    report: SolveReport,
    system: Option<SystemInfo>,
    method: Method,
    spot_checks: usize,
) -> Result<HarmonicResult> {
    let diagnostics = diagnose(calc, &h, spot_checks)?;
    Ok(HarmonicResult { omega: omega.clone(), alpha: None, h, star: calc.kind(), method, report, system, diagnostics })
}

fn cancellation(result: &DVector<f64>, op: &SparseOperator, x: &DVector<f64>, transpose: bool) -> f64 {
    let num = result.amax();
    if num == 0.0 {
        return 0.0;
    }
    let ax = x.abs();
    let abs_op = SparseOperator::from_triplets(
        op.rows(),
        op.cols(),
        &op.triplets().into_iter().map(|(i, j, v)| (i, j, v.abs())).collect::<Vec<_>>(),
    );
    let den = if transpose { abs_op.apply_transpose(&ax) } else { abs_op.apply(&ax) }.amax();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Deterministic test cochain number `k` with entries in `[-1, 1]`.
pub(crate) fn test_cochain(len: usize, k: usize) -> DVector<f64> {
    let freq = 0.37 + 0.61 * k as f64;
    DVector::from_fn(len, |i, _| ((i as f64 + 1.0) * freq).sin())
}

/// Harmonicity measurements of `h`.
pub fn diagnose(calc: &Calculus<'_>, h: &Cochain, spot_checks: usize) -> Result<Diagnostics> {
    let p = h.p;
    let n = calc.dim();
    let h_norm = calc.norm(h)?;
    let mut diag = Diagnostics { h_norm, ..Default::default() };
    if p < n {
        let d = calc.d(p)?;
        let dh = d.apply(&h.values);
        diag.d_norm = calc.norm_vec(p + 1, &dh)?;
        diag.d_relative = cancellation(&dh, d, &h.values, false);
    }
    if p > 0 {
        let d = calc.d(p - 1)?;
        let sh = calc.star(p)?.apply(&h.values);
        let weak = d.apply_transpose(&sh);
        diag.codifferential_relative = cancellation(&weak, d, &sh, true);
        let delta = calc.codifferential(h)?;
        diag.codifferential_norm = calc.norm(&delta)?;
        let m = calc.complex().num_simplices(p - 1);
        for k in 0..spot_checks {
            let dtau = d.apply(&test_cochain(m, k));
            let dn = calc.norm_vec(p, &dtau)?;
            let ip = calc.inner_vec(p, &h.values, &dtau)?;
            diag.gradient_spot_checks.push(if dn == 0.0 || h_norm == 0.0 { 0.0 } else { ip.abs() / (h_norm * dn) });
        }
    }
    diag.laplacian_residual = calc.laplacian_residual(h)?;
    Ok(diag)
}
