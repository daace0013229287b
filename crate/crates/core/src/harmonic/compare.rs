//! Alternative harmonic solvers and a side-by-side comparison.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{finish, harmonic_basis_direct, solve_refined, harmonic_ls, project_to_harmonics, require_cocycle, BasisOptions};
use super::{HarmonicOptions, HarmonicResult, SystemInfo};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::operators::{Calculus, CalculusOptions, Cochain, StarKind, StarSolver};
use crate::solvers::cgls;
use crate::sparse::{LinearOperator, SparseOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Least-squares normal equations.
    Ls,
    /// Projection onto an eigen-computed harmonic basis.
    Projection,
    GuYau,
    Desbrun,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ls, Method::Projection, Method::GuYau, Method::Desbrun];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ls => "ls",
            Method::Projection => "projection",
            Method::GuYau => "gu-yau",
            Method::Desbrun => "desbrun",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ls" | "least-squares" => Ok(Method::Ls),
            "projection" | "project" => Ok(Method::Projection),
            "gu-yau" | "guyau" => Ok(Method::GuYau),
            "desbrun" => Ok(Method::Desbrun),
            other => Err(Error::Shape(format!("unknown method '{other}'"))),
        }
    }
}

/// `G alpha = -d *_{p-1}^{-1} d^T *_p omega` with
/// `G = d *_{p-1}^{-1} d^T *_p d`, solved by CGLS.
///
/// With a Whitney star `G` is dense, and is only built while `N_{p-1}` is
/// within the calculus' dense limit.
pub fn gu_yau(calc: &Calculus<'_>, omega: &Cochain, opts: &HarmonicOptions) -> Result<HarmonicResult> {
    require_cocycle(calc, omega, opts.cocycle_tol)?;
    let p = omega.p;
    let start = Instant::now();
    let d = calc.d(p - 1)?;
    let upper = calc.upper_term(p - 1)?;
    let g = match calc.star_solver(p - 1)? {
        StarSolver::Diagonal(inv) => {
            let inv = SparseOperator::from_diagonal(inv.as_slice());
            d.matmul(&inv)?.matmul(&upper)?
        }
        StarSolver::Dense(chol) => {
            let x = chol.solve(&upper.to_dense());
            SparseOperator::from_dense(&d.mul_dense(&x))
        }
        StarSolver::Iterative { star, .. } => {
            return Err(Error::SizeLimit {
                what: "dense inverse star for the Gu-Yau system".into(),
                size: star.rows(),
                limit: calc.options().dense_limit,
            })
        }
    };
    let info = SystemInfo::of(&g, start.elapsed().as_secs_f64());
    let weak = d.apply_transpose(&calc.star(p)?.apply(&omega.values));
    let rhs = -d.apply(&calc.star_solve(p - 1, &weak)?);
    let (alpha, report) = cgls(&g, &rhs, &opts.cg)?;
    finish(calc, omega, Some(Cochain::from_vector(p - 1, alpha)), report, Some(info), Method::GuYau, opts.spot_checks)
}

/// The Poisson problem `(d delta + delta d) alpha = -delta omega` on
/// `(p-1)`-cochains, solved in weak form with CG.
///
/// Multiplying through by `*_{p-1}` turns the operator into the weak
/// Laplacian `Delta_{p-1}`; the `d delta` part vanishes for `p = 1`.
pub fn desbrun(calc: &Calculus<'_>, omega: &Cochain, opts: &HarmonicOptions) -> Result<HarmonicResult> {
    require_cocycle(calc, omega, opts.cocycle_tol)?;
    let p = omega.p;
    let start = Instant::now();
    let system = calc.laplacian_assembled(p - 1)?;
    let info = SystemInfo::of(&system, start.elapsed().as_secs_f64());
    let rhs = -calc.d(p - 1)?.apply_transpose(&calc.star(p)?.apply(&omega.values));
    let (alpha, report) = solve_refined(&system, &rhs, &opts.cg)?;
    finish(calc, omega, Some(Cochain::from_vector(p - 1, alpha)), report, Some(info), Method::Desbrun, opts.spot_checks)
}

/// One (method, star) run of [`compare_methods`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: Method,
    pub star: String,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub wall_seconds: f64,
    pub iterations: usize,
    pub converged: bool,
    pub laplacian_residual: Option<f64>,
    pub h_norm: Option<f64>,
    pub error: Option<String>,
}

/// `|h_a - h_b|_* / max(|h_a|_*, |h_b|_*)` for two rows with the same star.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseDifference {
    pub a: usize,
    pub b: usize,
    pub star: String,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub p: usize,
    pub counts: Vec<usize>,
    pub rows: Vec<ComparisonRow>,
    pub pairwise: Vec<PairwiseDifference>,
    #[serde(skip)]
    pub solutions: Vec<Option<DVector<f64>>>,
}

impl ComparisonReport {
    pub fn row(&self, method: Method, star: StarKind) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method && r.star == star.name())
    }

    pub fn difference(&self, a: (Method, StarKind), b: (Method, StarKind)) -> Option<f64> {
        let ia = self.rows.iter().position(|r| r.method == a.0 && r.star == a.1.name())?;
        let ib = self.rows.iter().position(|r| r.method == b.0 && r.star == b.1.name())?;
        self.pairwise
            .iter()
            .find(|d| (d.a, d.b) == (ia, ib) || (d.a, d.b) == (ib, ia))
            .map(|d| d.relative_difference)
    }

    pub fn max_difference(&self) -> f64 {
        self.pairwise.iter().map(|d| d.relative_difference).fold(0.0, f64::max)
    }
}

fn run(
    calc: &Calculus<'_>,
    method: Method,
    omega: &Cochain,
    opts: &HarmonicOptions,
    basis_opts: &BasisOptions,
) -> Result<HarmonicResult> {
    match method {
        Method::Ls => harmonic_ls(calc, omega, opts),
        Method::GuYau => gu_yau(calc, omega, opts),
        Method::Desbrun => desbrun(calc, omega, opts),
        Method::Projection => {
            let start = Instant::now();
            let basis = harmonic_basis_direct(calc, omega.p, basis_opts)?;
            let mut res = project_to_harmonics(calc, &basis, omega, opts)?;
            res.system = Some(SystemInfo {
                rows: basis.h.nrows(),
                cols: basis.h.nrows(),
                nnz: calc.laplacian(omega.p)?.as_sparse().map_or(0, |m| m.nnz()),
                assembly_seconds: start.elapsed().as_secs_f64() - res.report.wall_time,
            });
            Ok(res)
        }
    }
}

/// Runs every (method, star) pair on the same cocycle, one at a time.
///
/// Each run gets a fresh [`Calculus`] whose coboundaries and stars are built
/// before the clock starts, so the timings cover system assembly and solve.
/// A failing run is recorded in its row instead of aborting the comparison.
pub fn compare_methods(
    c: &SimplicialComplex,
    omega: &Cochain,
    methods: &[Method],
    stars: &[StarKind],
    calc_opts: &CalculusOptions,
    opts: &HarmonicOptions,
) -> Result<ComparisonReport> {
    if methods.is_empty() || stars.is_empty() {
        return Err(Error::Shape("nothing to compare".into()));
    }
    omega.check(c)?;
    let p = omega.p;
    if p == 0 {
        return Err(Error::Dimension("harmonic representatives need p >= 1".into()));
    }
    let basis_opts = BasisOptions {
        nullspace: crate::solvers::NullSpaceOptions { dense_limit: calc_opts.dense_limit, ..Default::default() },
        check_betti: false,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    let mut kinds = Vec::new();
    for &star in stars {
        for &method in methods {
            let calc = Calculus::with_options(c, star, calc_opts.clone());
            let warm = || -> Result<()> {
                calc.d(p - 1)?;
                if p < c.dim() {
                    calc.d(p)?;
                    calc.star(p + 1)?;
                }
                calc.star(p)?;
                calc.star_solver(p - 1)?;
                calc.star_solver(p)?;
                Ok(())
            };
            let outcome = warm().and_then(|_| {
                let start = Instant::now();
                run(&calc, method, omega, opts, &basis_opts).map(|r| (r, start.elapsed().as_secs_f64()))
            });
            let row = match &outcome {
                Ok((res, wall)) => {
                    let sys = res.system.clone().unwrap_or_default();
                    ComparisonRow {
                        method,
                        star: star.name().to_string(),
                        rows: sys.rows,
                        cols: sys.cols,
                        nnz: sys.nnz,
                        assembly_seconds: sys.assembly_seconds,
                        solve_seconds: res.report.wall_time,
                        wall_seconds: *wall,
                        iterations: res.report.iterations,
                        converged: res.report.converged,
                        laplacian_residual: Some(res.diagnostics.laplacian_residual),
                        h_norm: Some(res.diagnostics.h_norm),
                        error: None,
                    }
                }
                Err(e) => ComparisonRow {
                    method,
                    star: star.name().to_string(),
                    rows: 0,
                    cols: 0,
                    nnz: 0,
                    assembly_seconds: 0.0,
                    solve_seconds: 0.0,
                    wall_seconds: 0.0,
                    iterations: 0,
                    converged: false,
                    laplacian_residual: None,
                    h_norm: None,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
            solutions.push(outcome.ok().map(|(r, _)| r.h.values));
            kinds.push(star);
        }
    }

    let mut pairwise = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            if kinds[a] != kinds[b] {
                continue;
            }
            if let (Some(ha), Some(hb)) = (&solutions[a], &solutions[b]) {
                let calc = Calculus::with_options(c, kinds[a], calc_opts.clone());
                let diff = calc.norm_vec(p, &(ha - hb))?;
                let scale = calc.norm_vec(p, ha)?.max(calc.norm_vec(p, hb)?);
                let rel = if scale == 0.0 { diff } else { diff / scale };
                pairwise.push(PairwiseDifference { a, b, star: kinds[a].name().to_string(), relative_difference: rel });
            }
        }
    }
    Ok(ComparisonReport { p, counts: c.counts(), rows, pairwise, solutions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("fisher".parse::<Method>().is_err());
    }

    #[test]
    fn all_methods_agree_on_a_small_annulus() {
        let mesh = meshgen::annulus(1.0, 0.4, 0.25).unwrap();
        let c = &mesh.complex;
        // straight dual path from the hole to the outer rim along +x
        let path = meshgen::dual_path_along(c, &[0.0, 0.003], &[1.2, 0.021]).unwrap();
        let omega = crate::harmonic::cocycle_from_dual_chain(c, &path, false).unwrap();
        let report = compare_methods(
            c,
            &omega,
            &Method::ALL,
            &[StarKind::DEC, StarKind::Whitney],
            &CalculusOptions::default(),
            &HarmonicOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 8);
        for row in &report.rows {
            assert!(row.error.is_none(), "{row:?}");
        }
        assert!(report.max_difference() < 1e-8, "{:?}", report.pairwise);
    }

    #[test]
    fn zero_gives_zero() {
        let mesh = meshgen::annulus(1.0, 0.4, 0.3).unwrap();
        let calc = Calculus::new(&mesh.complex, StarKind::DEC);
        let res = gu_yau(&calc, &Cochain::zeros(&mesh.complex, 1), &HarmonicOptions::default()).unwrap();
        assert!(res.h.values.iter().all(|&x| x == 0.0));
    }
}
