//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p hodgekit --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hodgekit::harmonic::{
    self, compare::Method, harmonic_basis_direct, harmonic_basis_mixed, harmonic_ls, pair_homology,
    project_to_harmonics, BasisOptions, HarmonicBasis, HarmonicOptions, HomologyBasis,
};
use hodgekit::meshgen::{self, PlanarMesh, TorusMesh};
use hodgekit::solvers::max_principal_angle;
use hodgekit::{Calculus, CalculusOptions, Cochain, LinearOperator, SimplicialComplex, StarKind, SummaryOptions};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use common::*;

const STARS: [StarKind; 2] = [StarKind::DEC, StarKind::Whitney];

struct Fixtures {
    torus: TorusMesh,
    disc: PlanarMesh,
    shell: SimplicialComplex,
    torus_cocycles: Vec<Cochain>,
    disc_cocycles: Vec<Cochain>,
    shell_cocycle: Cochain,
    bases: Vec<(String, StarKind, HarmonicBasis, HarmonicBasis)>,
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ls(c: &SimplicialComplex, star: StarKind, omega: &Cochain) -> harmonic::HarmonicResult {
    let calc = Calculus::new(c, star);
    harmonic_ls(&calc, omega, &HarmonicOptions::default()).unwrap()
}

fn basis_dimensions(fx: &mut Fixtures) -> Outcome {
    let mut notes = Vec::new();
    let mut slowest: f64 = 0.0;
    let cases = [("torus", &fx.torus.complex, 2usize), ("disc", &fx.disc.complex, 4)];
    for (name, c, expected) in cases {
        for star in STARS {
            let calc = Calculus::new(c, star);
            let t = Instant::now();
            let direct = harmonic_basis_direct(&calc, 1, &BasisOptions::default()).map_err(|e| e.to_string())?;
            let td = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let mixed = harmonic_basis_mixed(&calc, 1, &BasisOptions::default()).map_err(|e| e.to_string())?;
            let tm = t.elapsed().as_secs_f64();
            slowest = slowest.max(td).max(tm);
            ensure(direct.len() == expected && mixed.len() == expected, || {
                format!("{name}/{star}: direct {} mixed {} expected {expected}", direct.len(), mixed.len())
            })?;
            ensure(td <= 60.0 && tm <= 60.0, || format!("{name}/{star}: {td:.1} s / {tm:.1} s"))?;
            notes.push(format!("{name}/{star} {}+{}", direct.len(), mixed.len()));
            fx.bases.push((name.to_string(), star, direct, mixed));
        }
    }
    Ok(format!(
        "torus V={} and four-holed disc V={}: {}; slowest {slowest:.1} s",
        fx.torus.complex.num_vertices(),
        fx.disc.complex.num_vertices(),
        notes.join(", ")
    ))
}

fn harmonicity_residual(fx: &Fixtures) -> Outcome {
    let mut worst: f64 = 0.0;
    for (c, cocycles) in [(&fx.torus.complex, &fx.torus_cocycles), (&fx.disc.complex, &fx.disc_cocycles)] {
        for star in STARS {
            for omega in cocycles {
                let res = ls(c, star, omega);
                ensure(res.report.converged, || format!("CG did not converge ({star})"))?;
                worst = worst.max(res.diagnostics.laplacian_residual);
            }
        }
    }
    ensure(worst <= 1e-8, || format!("max |Delta h|/|h| = {worst:.2e}"))?;
    Ok(format!("max |Delta h|_*/|h|_* = {worst:.2e} over 6 cocycles x 2 stars (tol 1e-8)"))
}

fn representative_independence(fx: &Fixtures) -> Outcome {
    let mut rng = rng(3);
    let mut worst_db: f64 = 0.0;
    let mut worst_alt: f64 = 0.0;
    for star in STARS {
        let cases = [(&fx.torus.complex, &fx.torus_cocycles), (&fx.disc.complex, &fx.disc_cocycles)];
        for (c, cocycles) in cases {
            let calc = Calculus::new(c, star);
            let d0 = calc.d(0).unwrap();
            for omega in cocycles {
                let h = ls(c, star, omega).h;
                let beta = random_vec(&mut rng, c.num_vertices()) * 5.0;
                let shifted = Cochain::from_vector(1, &omega.values + d0.apply(&beta));
                let h2 = ls(c, star, &shifted).h;
                let rel = calc.norm_vec(1, &(&h.values - &h2.values)).unwrap() / calc.norm(&h).unwrap();
                worst_db = worst_db.max(rel);
            }
        }
        // a second picket fence from each hole, leaving in another direction
        let calc = Calculus::new(&fx.disc.complex, star);
        for (k, omega) in fx.disc_cocycles.iter().enumerate() {
            let path = hole_path(&fx.disc, k, disc_angle(&fx.disc, k) - 0.6);
            let alt = harmonic::cocycle_from_dual_chain(&fx.disc.complex, &path, false).unwrap();
            ensure(alt.values != omega.values, || "alternate fence coincides with the original".into())?;
            let h = ls(&fx.disc.complex, star, omega).h;
            let h2 = ls(&fx.disc.complex, star, &alt).h;
            let rel = calc.norm_vec(1, &(&h.values - &h2.values)).unwrap() / calc.norm(&h).unwrap();
            worst_alt = worst_alt.max(rel);
        }
    }
    ensure(worst_db <= 1e-10 && worst_alt <= 1e-10, || {
        format!("omega+d beta: {worst_db:.2e}, alternate fence: {worst_alt:.2e}")
    })?;
    Ok(format!("|h - h'|_*/|h|_*: omega + d beta {worst_db:.2e}, alternate picket fence {worst_alt:.2e} (tol 1e-10)"))
}

fn theorem_two_suite(fx: &Fixtures) -> Outcome {
    let triangle = triangle_boundary();
    let annulus = coarse_annulus();
    let small_torus = coarse_torus();
    let mut cases: Vec<(&str, &SimplicialComplex, Vec<Cochain>)> = vec![
        ("triangle", &triangle, vec![triangle_cocycle()]),
        ("annulus", &annulus.complex, vec![annulus_cocycle(&annulus)]),
        ("coarse torus", &small_torus.complex, torus_cocycles(&small_torus)),
        ("torus", &fx.torus.complex, fx.torus_cocycles.clone()),
        ("disc", &fx.disc.complex, fx.disc_cocycles.clone()),
    ];
    cases.push(("shell", &fx.shell, vec![fx.shell_cocycle.clone()]));
    let mut rng = rng(4);
    let (mut min_ratio, mut orth, mut closed, mut coclosed) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for (name, c, cocycles) in &cases {
        for star in STARS {
            let calc = Calculus::new(c, star);
            for omega in cocycles {
                let p = omega.p;
                let h = ls(c, star, omega).h;
                let hn = calc.norm(&h).unwrap();
                let d = calc.d(p - 1).unwrap();
                let star_p = calc.star(p).unwrap();
                for k in 0..100 {
                    let beta = random_vec(&mut rng, c.num_simplices(p - 1)) * 10f64.powi(-(k % 5));
                    let moved = star_norm(star_p, &(&h.values + d.apply(&beta)));
                    min_ratio = min_ratio.min(moved / hn);
                }
                for _ in 0..20 {
                    let dtau = d.apply(&random_vec(&mut rng, c.num_simplices(p - 1)));
                    let ip = calc.inner_vec(p, &h.values, &dtau).unwrap();
                    orth = orth.max(ip.abs() / (hn * star_norm(star_p, &dtau)));
                }
                if p < c.dim() {
                    closed = closed.max(cancellation(calc.d(p).unwrap(), &h.values, false));
                }
                coclosed = coclosed.max(cancellation(d, &star_p.apply(&h.values), true));
                if min_ratio < 1.0 - 1e-12 || orth > 1e-10 || closed > 1e-10 || coclosed > 1e-10 {
                    return Err(format!(
                        "{name}/{star}: min |h+d beta|/|h| = {min_ratio:.17}, orth {orth:.2e}, dh {closed:.2e}, delta h {coclosed:.2e}"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{} complexes x 2 stars: min |h + d beta|/|h| - 1 = {:.1e}, orthogonality {orth:.1e}, dh {closed:.1e}, delta h {coclosed:.1e}",
        cases.len(),
        min_ratio - 1.0
    ))
}

fn oracle_equivalence() -> Outcome {
    let triangle = triangle_boundary();
    let annulus = coarse_annulus();
    let small_torus = coarse_torus();
    let cases: Vec<(&str, &SimplicialComplex, Vec<Cochain>)> = vec![
        ("triangle", &triangle, vec![triangle_cocycle()]),
        ("annulus", &annulus.complex, vec![annulus_cocycle(&annulus)]),
        ("coarse torus", &small_torus.complex, torus_cocycles(&small_torus)),
    ];
    let (mut angle, mut diff) = (0.0f64, 0.0f64);
    for (name, c, cocycles) in &cases {
        ensure(c.num_simplices(1) <= 500, || format!("{name} has {} edges", c.num_simplices(1)))?;
        for star in STARS {
            let calc = Calculus::new(c, star);
            let lap = calc.laplacian_assembled(1).unwrap().to_dense();
            let oracle = svd_null_space(&lap, 1e-9);
            let direct = harmonic_basis_direct(&calc, 1, &BasisOptions::default()).unwrap();
            let mixed = harmonic_basis_mixed(&calc, 1, &BasisOptions::default()).unwrap();
            ensure(oracle.ncols() == direct.len() && oracle.ncols() == mixed.len(), || {
                format!("{name}/{star}: oracle {} direct {} mixed {}", oracle.ncols(), direct.len(), mixed.len())
            })?;
            let m = Some(calc.star(1).unwrap());
            angle = angle
                .max(max_principal_angle(&direct.h, &oracle, m))
                .max(max_principal_angle(&mixed.h, &oracle, m))
                .max(max_principal_angle(&direct.h, &mixed.h, m));
            let star_dense = calc.star(1).unwrap().to_dense();
            for omega in cocycles {
                let expected = star_projection(&oracle, &star_dense, &omega.values);
                let scale = star_norm(calc.star(1).unwrap(), &expected);
                let from_ls = ls(c, star, omega).h.values;
                let from_direct = project_to_harmonics(&calc, &direct, omega, &HarmonicOptions::default()).unwrap().h.values;
                let from_mixed = project_to_harmonics(&calc, &mixed, omega, &HarmonicOptions::default()).unwrap().h.values;
                for (a, b) in [(&from_ls, &expected), (&from_direct, &expected), (&from_mixed, &expected), (&from_ls, &from_direct)] {
                    diff = diff.max(calc.norm_vec(1, &(a - b)).unwrap() / scale);
                }
            }
        }
    }
    ensure(angle <= 1e-8 && diff <= 1e-8, || format!("max angle {angle:.2e}, max difference {diff:.2e}"))?;
    Ok(format!("triangle, coarse annulus, coarse torus x 2 stars vs SVD oracle: max angle {angle:.1e}, max |h_i - h_j|_*/|h|_* {diff:.1e}"))
}

fn exact_identities(fx: &Fixtures) -> Outcome {
    let triangle = triangle_boundary();
    let tet = single_tet();
    let annulus = coarse_annulus();
    let small_torus = coarse_torus();
    let small_shell = meshgen::solid_annulus(1.0, 0.45, 0.5).unwrap();
    let all: Vec<&SimplicialComplex> = vec![
        &triangle,
        &tet,
        &annulus.complex,
        &small_torus.complex,
        &small_shell,
        &fx.torus.complex,
        &fx.disc.complex,
        &fx.shell,
    ];
    let mut products = 0;
    for c in &all {
        for p in 0..c.dim().saturating_sub(1) {
            let lo = hodgekit::operators::coboundary(c, p).unwrap();
            let hi = hodgekit::operators::coboundary(c, p + 1).unwrap();
            let nz = integer_dd_nonzeros(&hi, &lo);
            ensure(nz == 0, || format!("d_{} d_{p} has {nz} nonzeros", p + 1))?;
            products += 1;
        }
    }
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for c in [&triangle, &tet, &annulus.complex, &small_torus.complex, &small_shell] {
        for star in STARS {
            let calc = Calculus::new(c, star);
            for p in 0..c.dim() {
                let sign = if (1 - (p * p) as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                for _ in 0..10 {
                    let alpha = Cochain::from_vector(p, random_vec(&mut rng, c.num_simplices(p)));
                    let beta = Cochain::from_vector(p + 1, random_vec(&mut rng, c.num_simplices(p + 1)));
                    let da = calc.apply_d(&alpha).unwrap();
                    let db = calc.codifferential(&beta).unwrap();
                    let lhs = calc.inner(&da, &beta).unwrap();
                    let rhs = calc.inner(&alpha, &db).unwrap();
                    let scale = calc.norm(&da).unwrap() * calc.norm(&beta).unwrap()
                        + calc.norm(&alpha).unwrap() * calc.norm(&db).unwrap();
                    worst = worst.max((lhs - sign * rhs).abs() / scale);
                    pairs += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("adjointness defect {worst:.2e}"))?;
    Ok(format!("{products} products d d = 0 exactly; adjointness defect {worst:.1e} over {pairs} pairs, n = 1..3"))
}

fn comparison_study(fx: &Fixtures) -> Outcome {
    let report = harmonic::compare_methods(
        &fx.shell,
        &fx.shell_cocycle,
        &[Method::Ls, Method::Desbrun],
        &STARS,
        &CalculusOptions::default(),
        &HarmonicOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    for row in &report.rows {
        ensure(row.error.is_none() && row.converged, || format!("{row:?}"))?;
    }
    let row = |m, s| report.row(m, s).unwrap();
    let (lw, dw) = (row(Method::Ls, StarKind::Whitney), row(Method::Desbrun, StarKind::Whitney));
    let (ld, dd) = (row(Method::Ls, StarKind::DEC), row(Method::Desbrun, StarKind::DEC));
    ensure(10 * lw.nnz <= dw.nnz, || format!("whitney nnz {} vs {}", lw.nnz, dw.nnz))?;
    ensure(ld.nnz < dd.nnz, || format!("dec nnz {} vs {}", ld.nnz, dd.nnz))?;
    ensure(lw.wall_seconds < dw.wall_seconds, || format!("whitney time {} vs {}", lw.wall_seconds, dw.wall_seconds))?;
    let diff = report.max_difference();
    ensure(diff <= 1e-8, || format!("max pairwise difference {diff:.2e}"))?;
    Ok(format!(
        "{} tets, p = 2: nnz whitney {} vs {}, dec {} vs {}; whitney time {:.3} s vs {:.3} s; max |h_ls - h_desbrun| {:.1e}",
        fx.shell.num_simplices(3),
        lw.nnz,
        dw.nnz,
        ld.nnz,
        dd.nnz,
        lw.wall_seconds,
        dw.wall_seconds,
        diff
    ))
}

fn kernel_bound(fx: &Fixtures) -> Outcome {
    let c = &fx.shell;
    let counts = c.counts();
    let chi_counts: i64 = counts.iter().enumerate().map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
    let betti = c.betti_numbers(&SummaryOptions::default()).unwrap().ok_or("betti numbers unavailable")?;
    let chi_betti: i64 = betti.iter().enumerate().map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
    ensure(chi_counts == chi_betti, || format!("chi {chi_counts} vs {chi_betti}"))?;
    let d1 = hodgekit::operators::coboundary(c, 1).unwrap().to_dense();
    let eig = SymmetricEigen::new(d1.transpose() * &d1);
    let top = eig.eigenvalues.amax();
    let kernel = eig.eigenvalues.iter().filter(|&&l| l.abs() <= 1e-9 * top).count();
    let bound = counts[0] as i64 - chi_counts;
    ensure(kernel as i64 >= bound, || format!("dim ker d_1 = {kernel} < {bound}"))?;
    Ok(format!("chi = {chi_counts} from counts {counts:?} and betti {betti:?}; dim ker d_1 = {kernel} >= N_0 - chi = {bound}"))
}

fn pairing(fx: &Fixtures) -> Outcome {
    let c = &fx.torus.complex;
    let (_, _, basis, _) =
        fx.bases.iter().find(|(n, s, _, _)| n == "torus" && *s == StarKind::DEC).ok_or("torus basis missing")?;
    let cycles = HomologyBasis::from_vertex_loops(c, &[fx.torus.longitude.clone(), fx.torus.latitude.clone()])
        .map_err(|e| e.to_string())?;
    let paired = pair_homology(&basis.h, &cycles).map_err(|e| e.to_string())?;
    let identity_err = (cycles.b.transpose() * &paired - DMatrix::<f64>::identity(2, 2)).amax();
    ensure(identity_err <= 1e-12, || format!("|B^T H' - I| = {identity_err:.2e}"))?;

    // the fence along the longitude only meets the latitude, and vice versa
    let calc = Calculus::new(c, StarKind::DEC);
    let h: Vec<DVector<f64>> = fx.torus_cocycles.iter().map(|w| ls(c, StarKind::DEC, w).h.values).collect();
    let periods = DMatrix::from_fn(2, 2, |i, j| cycles.b.column(i).dot(&h[j]));
    ensure(periods[(0, 0)].abs() < 1e-10 && periods[(1, 1)].abs() < 1e-10, || format!("periods {periods}"))?;
    ensure((periods[(1, 0)].abs() - 1.0).abs() < 1e-10 && (periods[(0, 1)].abs() - 1.0).abs() < 1e-10, || {
        format!("periods {periods}")
    })?;
    // column i of H' is the harmonic class dual to cycle i
    let mut cross: f64 = 0.0;
    for (i, j) in [(0, 1), (1, 0)] {
        let col = paired.column(i).into_owned();
        let target = &h[j] * periods[(i, j)].signum();
        cross = cross.max(calc.norm_vec(1, &(col - &target)).unwrap() / calc.norm_vec(1, &target).unwrap());
    }
    ensure(cross <= 1e-8, || format!("pairing columns differ from the fence harmonics by {cross:.2e}"))?;
    Ok(format!(
        "|B^T H' - I| = {identity_err:.1e}; fence periods [[{:.0}, {:.0}], [{:.0}, {:.0}]]; H' vs fence harmonics {cross:.1e}",
        periods[(0, 0)].abs(),
        periods[(0, 1)],
        periods[(1, 0)],
        periods[(1, 1)].abs()
    ))
}

fn sigma_check(fx: &Fixtures) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut vectors = 0;
    for (_, _, _, mixed) in &fx.bases {
        for &r in &mixed.sigma_ratios {
            worst = worst.max(r);
            vectors += 1;
        }
    }
    let small_torus = coarse_torus();
    let annulus = coarse_annulus();
    let triangle = triangle_boundary();
    for c in [&small_torus.complex, &annulus.complex, &triangle] {
        for star in STARS {
            let mixed = harmonic_basis_mixed(&Calculus::new(c, star), 1, &BasisOptions::default())
                .map_err(|e| e.to_string())?;
            for &r in &mixed.sigma_ratios {
                worst = worst.max(r);
                vectors += 1;
            }
        }
    }
    ensure(vectors > 0 && worst <= 1e-10, || format!("max |sigma|/|u| = {worst:.2e} over {vectors}"))?;
    Ok(format!("{vectors} null vectors, max |sigma|/|u| = {worst:.1e} (tol 1e-10)"))
}

fn main() {
    let t0 = Instant::now();
    let torus = torus();
    let disc = four_holed_disc();
    let shell = solid_annulus();
    let mut fx = Fixtures {
        torus_cocycles: torus_cocycles(&torus),
        disc_cocycles: disc_cocycles(&disc),
        shell_cocycle: shell_cocycle(&shell),
        torus,
        disc,
        shell,
        bases: Vec::new(),
    };

    let mut criteria: Vec<(&str, Box<dyn FnMut(&mut Fixtures) -> Outcome>)> = vec![
        ("basis dimensions", Box::new(basis_dimensions)),
        ("harmonicity residual", Box::new(|f: &mut Fixtures| harmonicity_residual(f))),
        ("representative independence", Box::new(|f: &mut Fixtures| representative_independence(f))),
        ("minimal norm, orthogonality, closed and coclosed", Box::new(|f: &mut Fixtures| theorem_two_suite(f))),
        ("oracle equivalence", Box::new(|_: &mut Fixtures| oracle_equivalence())),
        ("exact identities", Box::new(|f: &mut Fixtures| exact_identities(f))),
        ("comparison study", Box::new(|f: &mut Fixtures| comparison_study(f))),
        ("kernel bound", Box::new(|f: &mut Fixtures| kernel_bound(f))),
        ("homology pairing", Box::new(|f: &mut Fixtures| pairing(f))),
        ("mixed-method sigma", Box::new(|f: &mut Fixtures| sigma_check(f))),
    ];

    let mut failures = 0;
    for (i, (name, check)) in criteria.iter_mut().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut fx)))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1} s", criteria.len() - failures, criteria.len(), t0.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
