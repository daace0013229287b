use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hodgekit::complex::SummaryOptions;
use hodgekit::harmonic::{
    self, compare_methods, harmonic_basis_direct, harmonic_basis_mixed, is_cocycle, pair_homology,
    project_to_harmonics, BasisOptions, HarmonicBasis, HarmonicOptions, HarmonicResult, HomologyBasis, Method,
};
use hodgekit::io::{format_cochain, load_complex, read_cochains, write_cochains, write_vtk, BlockKind, MeshFormat};
use hodgekit::meshgen;
use hodgekit::{Calculus, CalculusOptions, CgOptions, Cochain, Error, Result, SimplicialComplex};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::report::{BasisEntry, BasisReport, HarmonicReport, PairReport};
use crate::{
    exit, star_kind, BasisArgs, BasisMethodArg, CalcArgs, CompareArgs, DualPathArgs, GenerateArgs, HarmonicArgs, InfoArgs,
    MeshArgs, MethodArg, PairArgs, ProjectArgs, Shape, SolveArgs,
};

fn load_mesh(m: &MeshArgs) -> Result<SimplicialComplex> {
    let format = match m.format {
        Some(f) => f.into(),
        None => MeshFormat::from_path(&m.mesh).ok_or_else(|| Error::Parse {
            source_name: m.mesh.display().to_string(),
            line: 0,
            message: "cannot tell the mesh format from the extension; pass --format".into(),
        })?,
    };
    load_complex(&m.mesh, format, m.require_manifold)
}

fn calculus<'c>(c: &'c SimplicialComplex, a: &CalcArgs) -> Calculus<'c> {
    Calculus::with_options(c, a.kind(), CalculusOptions { dense_limit: a.dense_limit, ..CalculusOptions::default() })
}

fn harmonic_options(s: &SolveArgs) -> HarmonicOptions {
    HarmonicOptions { cg: CgOptions { tol: s.tol, max_iter: s.max_iter, preconditioner: None }, ..Default::default() }
}

fn read_single(path: &Path) -> Result<Cochain> {
    let mut blocks = read_cochains(path)?;
    if blocks.len() != 1 {
        return Err(Error::Shape(format!("{}: expected one cochain block, found {}", path.display(), blocks.len())));
    }
    Ok(blocks.remove(0).data)
}

fn read_many(path: &Path) -> Result<Vec<Cochain>> {
    Ok(read_cochains(path)?.into_iter().map(|b| b.data).collect())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn columns(p: usize, h: &DMatrix<f64>) -> Vec<Cochain> {
    h.column_iter().map(|c| Cochain::from_vector(p, c.into_owned())).collect()
}

fn basis_from_file(c: &SimplicialComplex, calc: &Calculus<'_>, path: &Path) -> Result<HarmonicBasis> {
    let cols = read_many(path)?;
    let p = cols.first().map(|b| b.p).ok_or_else(|| Error::Shape(format!("{}: no cochains", path.display())))?;
    for col in &cols {
        col.check(c)?;
        if col.p != p {
            return Err(Error::Shape(format!("{}: mixed cochain degrees", path.display())));
        }
    }
    let n = c.num_simplices(p);
    let h = DMatrix::from_fn(n, cols.len(), |i, j| cols[j].values[i]);
    Ok(HarmonicBasis {
        p,
        star: calc.kind(),
        h,
        residual_norms: Vec::new(),
        eigenvalues: Vec::new(),
        threshold: 0.0,
        method: harmonic::BasisMethod::EigenDirect,
        sigma_ratios: Vec::new(),
    })
}

/// Writes `h`, `alpha`, the diagnostics and optionally a VTK file. Returns the
/// exit code: nonzero when the solver did not converge.
fn write_result(
    c: &SimplicialComplex,
    calc: &Calculus<'_>,
    res: &HarmonicResult,
    prefix: &Path,
    vtk: bool,
) -> Result<u8> {
    let check = is_cocycle(calc, &res.omega, None)?;
    let notes = calc.laplacian_sign_note(res.h.p).into_iter().collect();
    let mut report = HarmonicReport::new(res, c.counts(), check, notes);
    let h_path = with_suffix(prefix, ".h.cochain");
    write_cochains(&h_path, BlockKind::Cochain, std::slice::from_ref(&res.h))?;
    report.files.push(h_path.display().to_string());
    if let Some(alpha) = &res.alpha {
        let path = with_suffix(prefix, ".alpha.cochain");
        write_cochains(&path, BlockKind::Cochain, std::slice::from_ref(alpha))?;
        report.files.push(path.display().to_string());
    }
    if vtk {
        if res.h.p == 1 {
            let path = with_suffix(prefix, ".vtk");
            write_vtk(c, &res.h, &path)?;
            report.files.push(path.display().to_string());
        } else {
            eprintln!("hodgekit: --vtk is only written for 1-cochains");
        }
    }
    let diag_path = with_suffix(prefix, ".diagnostics.json");
    report.files.push(diag_path.display().to_string());
    write_json(&diag_path, &report)?;
    if !res.report.converged {
        eprintln!(
            "hodgekit: solver stopped after {} iterations at relative residual {:.3e}",
            res.report.iterations, res.report.relative_residual
        );
        return Ok(exit::SOLVER);
    }
    Ok(0)
}

pub fn info(a: &InfoArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    let summary = c.summary(&SummaryOptions { dense_limit: a.dense_limit, ..SummaryOptions::default() })?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

pub fn harmonic(a: &HarmonicArgs) -> Result<u8> {
    if a.pin_vertex.is_some() && a.method != MethodArg::Ls {
        eprintln!("hodgekit: --pin-vertex applies to the ls method only");
        return Ok(exit::PARSE);
    }
    let c = load_mesh(&a.mesh)?;
    let omega = read_single(&a.cocycle)?;
    if let Some(p) = a.p {
        if p != omega.p {
            return Err(Error::Shape(format!("expected a {p}-cochain, the file holds a {}-cochain", omega.p)));
        }
    }
    let calc = calculus(&c, &a.calc);
    let opts = HarmonicOptions { pin_vertex: a.pin_vertex, ..harmonic_options(&a.solve) };
    let res = match a.method {
        MethodArg::Ls => harmonic::harmonic_ls(&calc, &omega, &opts)?,
        MethodArg::GuYau => harmonic::gu_yau(&calc, &omega, &opts)?,
        MethodArg::Desbrun => harmonic::desbrun(&calc, &omega, &opts)?,
        MethodArg::Projection => {
            omega.check(&c)?;
            let basis = harmonic_basis_direct(&calc, omega.p, &basis_options(&a.calc, 1e-8, 1e-8))?;
            project_to_harmonics(&calc, &basis, &omega, &opts)?
        }
    };
    write_result(&c, &calc, &res, &a.out_prefix, a.vtk)
}

fn basis_options(calc: &CalcArgs, tol: f64, harmonic_tol: f64) -> BasisOptions {
    let mut o = BasisOptions { harmonic_tol, ..BasisOptions::default() };
    o.nullspace.zero_tol_rel = tol;
    o.nullspace.dense_limit = calc.dense_limit;
    o
}

/// Largest principal angle between two star-orthonormal bases.
fn principal_angle(calc: &Calculus<'_>, a: &HarmonicBasis, b: &HarmonicBasis) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Ok(None);
    }
    if a.is_empty() {
        return Ok(Some(0.0));
    }
    let star = calc.star(a.p)?;
    let r = &b.h - &a.h * a.h.tr_mul(&star.mul_dense(&b.h));
    let gram = r.tr_mul(&star.mul_dense(&r));
    let smax = gram.symmetric_eigenvalues().max().max(0.0).sqrt();
    Ok(Some(smax.min(1.0).asin()))
}

pub fn basis(a: &BasisArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    if a.p > c.dim() {
        return Err(Error::Dimension(format!("p = {} on a {}-complex", a.p, c.dim())));
    }
    let calc = calculus(&c, &a.calc);
    let opts = basis_options(&a.calc, a.tol, a.harmonic_tol);
    let mut bases = Vec::new();
    if matches!(a.method, BasisMethodArg::EigenDirect | BasisMethodArg::Both) {
        let t = Instant::now();
        let b = harmonic_basis_direct(&calc, a.p, &opts)?;
        bases.push((b, t.elapsed().as_secs_f64()));
    }
    if matches!(a.method, BasisMethodArg::EigenMixed | BasisMethodArg::Both) {
        let t = Instant::now();
        let b = harmonic_basis_mixed(&calc, a.p, &opts)?;
        bases.push((b, t.elapsed().as_secs_f64()));
    }
    let principal_angle = match bases.as_slice() {
        [(x, _), (y, _)] => principal_angle(&calc, x, y)?,
        _ => None,
    };
    let betti = c.betti_numbers(&opts.summary)?.map(|b| b[a.p]);
    let first = &bases[0].0;
    let mut files = Vec::new();
    if first.is_empty() {
        eprintln!("hodgekit: no harmonic {}-cochains on this mesh; no cochain files written", a.p);
    } else {
        let cols = columns(a.p, &first.h);
        for (k, col) in cols.iter().enumerate() {
            let path = with_suffix(&a.out_prefix, &format!(".h{k}.cochain"));
            write_cochains(&path, BlockKind::Cochain, std::slice::from_ref(col))?;
            files.push(path.display().to_string());
        }
        let path = with_suffix(&a.out_prefix, ".basis.cochain");
        write_cochains(&path, BlockKind::Cochain, &cols)?;
        files.push(path.display().to_string());
    }
    let json = with_suffix(&a.out_prefix, ".basis.json");
    files.push(json.display().to_string());
    let report = BasisReport {
        p: a.p,
        star: calc.kind().name().to_string(),
        betti,
        bases: bases.iter().map(|(b, s)| BasisEntry::new(b, *s)).collect(),
        principal_angle,
        files,
    };
    write_json(&json, &report)?;
    Ok(0)
}

pub fn project(a: &ProjectArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    let omega = read_single(&a.cocycle)?;
    omega.check(&c)?;
    let calc = calculus(&c, &a.calc);
    let basis = match &a.basis {
        Some(path) => basis_from_file(&c, &calc, path)?,
        None => harmonic_basis_direct(&calc, omega.p, &basis_options(&a.calc, 1e-8, 1e-8))?,
    };
    let res = project_to_harmonics(&calc, &basis, &omega, &HarmonicOptions::default())?;
    write_result(&c, &calc, &res, &a.out_prefix, a.vtk)
}

pub fn pair(a: &PairArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    let chains = read_many(&a.cycles)?;
    let cycles = HomologyBasis::from_chains(&c, &chains)?;
    let calc = calculus(&c, &a.calc);
    let basis = match &a.basis {
        Some(path) => basis_from_file(&c, &calc, path)?,
        None => harmonic_basis_direct(&calc, cycles.p, &basis_options(&a.calc, 1e-8, 1e-8))?,
    };
    if basis.p != cycles.p {
        return Err(Error::Shape(format!("{}-cycles paired with {}-cochains", cycles.p, basis.p)));
    }
    let paired = pair_homology(&basis.h, &cycles)?;
    let periods = cycles.b.tr_mul(&paired);
    let k = periods.nrows();
    let identity_error = (&periods - DMatrix::<f64>::identity(k, periods.ncols())).amax();
    let mut files = Vec::new();
    let path = with_suffix(&a.out_prefix, ".paired.cochain");
    write_cochains(&path, BlockKind::Cochain, &columns(basis.p, &paired))?;
    files.push(path.display().to_string());
    let json = with_suffix(&a.out_prefix, ".pair.json");
    files.push(json.display().to_string());
    let report = PairReport {
        p: basis.p,
        star: calc.kind().name().to_string(),
        count: paired.ncols(),
        periods: periods.row_iter().map(|r| r.iter().copied().collect()).collect(),
        identity_error,
        files,
    };
    write_json(&json, &report)?;
    Ok(0)
}

pub fn compare(a: &CompareArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    let omega = read_single(&a.cocycle)?;
    omega.check(&c)?;
    let methods: Vec<Method> = a.methods.iter().map(|&m| m.into()).collect();
    let stars: Vec<_> = a.stars.iter().map(|&s| star_kind(s, a.allow_indefinite_star)).collect();
    let calc_opts = CalculusOptions { dense_limit: a.dense_limit, ..CalculusOptions::default() };
    {
        let calc = Calculus::with_options(&c, stars[0], calc_opts.clone());
        let check = is_cocycle(&calc, &omega, None)?;
        if !check.closed {
            return Err(Error::NotCocycle { norm: check.norm });
        }
    }
    let report = compare_methods(&c, &omega, &methods, &stars, &calc_opts, &harmonic_options(&a.solve))?;
    match &a.out_prefix {
        Some(prefix) => write_json(&with_suffix(prefix, ".compare.json"), &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("hodgekit: {} / {} failed: {}", row.method, row.star, row.error.as_deref().unwrap_or(""));
    }
    Ok(0)
}

pub fn cocycle_from_dual_path(a: &DualPathArgs) -> Result<u8> {
    let c = load_mesh(&a.mesh)?;
    let path = match (&a.path, &a.from, &a.to) {
        (Some(p), _, _) => p.clone(),
        (None, Some(from), Some(to)) => meshgen::dual_path_along(&c, from, to)?,
        _ => return Err(Error::DualPath("give --path or --from and --to".into())),
    };
    let omega = harmonic::cocycle_from_dual_chain(&c, &path, a.closed)?;
    match &a.out {
        Some(out) => write_cochains(out, BlockKind::Cochain, std::slice::from_ref(&omega))?,
        None => print!("{}", format_cochain(BlockKind::Cochain, &omega)),
    }
    Ok(0)
}

pub fn generate(a: &GenerateArgs) -> Result<u8> {
    let c = match a.shape {
        Shape::Torus => {
            let (nm, nn) = match a.resolution.as_deref() {
                Some([x, y]) => (*x, *y),
                Some(_) => return Err(Error::Dimension("--resolution takes two numbers".into())),
                None => (42, 12),
            };
            let [major, minor] = a.radii[..] else {
                return Err(Error::Dimension("--radii takes two numbers".into()));
            };
            let t = meshgen::torus(nm, nn, major, minor)?;
            let stem = a.out.with_extension("");
            let cycles = HomologyBasis::from_vertex_loops(&t.complex, &[t.longitude.clone(), t.latitude.clone()])?;
            let chains = columns(1, &cycles.b);
            let cycles_path = with_suffix(&stem, ".cycles.chain");
            write_cochains(&cycles_path, BlockKind::Chain, &chains)?;
            eprintln!("wrote {}", cycles_path.display());
            for (k, p) in t.dual_cycles.iter().enumerate() {
                let fence = harmonic::cocycle_from_dual_chain(&t.complex, p, true)?;
                let path = with_suffix(&stem, &format!(".fence{k}.cochain"));
                write_cochains(&path, BlockKind::Cochain, std::slice::from_ref(&fence))?;
                eprintln!("wrote {}", path.display());
            }
            t.complex
        }
        Shape::FourHoledDisc => meshgen::four_holed_disc(a.spacing.unwrap_or(0.085))?.complex,
        Shape::Annulus => meshgen::annulus(1.0, 0.4, a.spacing.unwrap_or(0.1))?.complex,
        Shape::Square => meshgen::square(1.0, a.spacing.unwrap_or(0.1))?,
        Shape::SolidAnnulus => meshgen::solid_annulus(1.0, 0.45, a.spacing.unwrap_or(0.31))?,
    };
    c.write_json(&a.out)?;
    eprintln!("wrote {} ({:?} simplices)", a.out.display(), c.counts());
    Ok(0)
}
