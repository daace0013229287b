#![allow(dead_code)]

use std::collections::HashMap;

use hodgekit::harmonic::cocycle_from_dual_chain;
use hodgekit::meshgen::{self, PlanarMesh, TorusMesh};
use hodgekit::{Cochain, LinearOperator, SimplicialComplex, SparseOperator};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Boundary of an equilateral triangle with unit edges: a 1-complex loop.
pub fn triangle_boundary() -> SimplicialComplex {
    let s = 3f64.sqrt() / 2.0;
    SimplicialComplex::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0.5, s]], vec![vec![0, 1], vec![0, 2], vec![1, 2]])
        .unwrap()
}

/// Regular tetrahedron.
pub fn single_tet() -> SimplicialComplex {
    let v = vec![vec![1., 1., 1.], vec![1., -1., -1.], vec![-1., 1., -1.], vec![-1., -1., 1.]];
    SimplicialComplex::new(3, v, vec![vec![0, 1, 2, 3]]).unwrap()
}

pub fn coarse_annulus() -> PlanarMesh {
    meshgen::annulus(1.0, 0.4, 0.25).unwrap()
}

pub fn coarse_torus() -> TorusMesh {
    meshgen::torus(16, 6, 3.0, 1.0).unwrap()
}

pub fn torus() -> TorusMesh {
    meshgen::torus(42, 12, 4.0, 1.0).unwrap()
}

pub fn four_holed_disc() -> PlanarMesh {
    meshgen::four_holed_disc(0.085).unwrap()
}

pub fn solid_annulus() -> SimplicialComplex {
    meshgen::solid_annulus(1.0, 0.45, 0.31).unwrap()
}

/// Open dual path from the centre of hole `k` out past the rim, leaving at
/// `angle` radians (slightly off the lattice directions).
pub fn hole_path(mesh: &PlanarMesh, k: usize, angle: f64) -> Vec<usize> {
    let (hx, hy, _) = mesh.holes[k];
    let to = [hx + 2.5 * angle.cos(), hy + 2.5 * angle.sin()];
    meshgen::dual_path_along(&mesh.complex, &[hx, hy], &to).unwrap()
}

/// Outward diagonal from each hole of the four-holed disc.
pub fn disc_angle(mesh: &PlanarMesh, k: usize) -> f64 {
    let (hx, hy, _) = mesh.holes[k];
    hy.atan2(hx) + 0.05
}

pub fn disc_cocycles(mesh: &PlanarMesh) -> Vec<Cochain> {
    (0..mesh.holes.len())
        .map(|k| cocycle_from_dual_chain(&mesh.complex, &hole_path(mesh, k, disc_angle(mesh, k)), false).unwrap())
        .collect()
}

pub fn annulus_cocycle(mesh: &PlanarMesh) -> Cochain {
    cocycle_from_dual_chain(&mesh.complex, &hole_path(mesh, 0, 0.03), false).unwrap()
}

pub fn torus_cocycles(mesh: &TorusMesh) -> Vec<Cochain> {
    mesh.dual_cycles.iter().map(|p| cocycle_from_dual_chain(&mesh.complex, p, true).unwrap()).collect()
}

/// 2-cocycle of the dual path from the cavity to the outer sphere.
pub fn shell_cocycle(c: &SimplicialComplex) -> Cochain {
    let path = meshgen::dual_path_along(c, &[0.011, 0.017, 0.023], &[1.4, 0.31, 0.19]).unwrap();
    cocycle_from_dual_chain(c, &path, false).unwrap()
}

/// `(1, 0, 0)` on the edges `(0,1), (0,2), (1,2)` of the triangle boundary.
pub fn triangle_cocycle() -> Cochain {
    Cochain::new(1, vec![1.0, 0.0, 0.0])
}

pub fn star_norm(star: &SparseOperator, v: &DVector<f64>) -> f64 {
    v.dot(&star.apply(v)).max(0.0).sqrt()
}

/// `d_{p+1} d_p` computed with integer entries; returns the number of nonzeros.
pub fn integer_dd_nonzeros(d_hi: &SparseOperator, d_lo: &SparseOperator) -> usize {
    let to_int = |m: &SparseOperator| -> Vec<(usize, usize, i64)> {
        m.triplets()
            .into_iter()
            .map(|(i, j, v)| {
                assert_eq!(v.fract(), 0.0);
                (i, j, v as i64)
            })
            .collect()
    };
    let mut lo_rows: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for (i, j, v) in to_int(d_lo) {
        lo_rows.entry(i).or_default().push((j, v));
    }
    let mut product: HashMap<(usize, usize), i64> = HashMap::new();
    for (i, k, a) in to_int(d_hi) {
        for &(j, b) in lo_rows.get(&k).map(Vec::as_slice).unwrap_or(&[]) {
            *product.entry((i, j)).or_default() += a * b;
        }
    }
    product.values().filter(|&&v| v != 0).count()
}

/// Null space of a dense symmetric matrix from its SVD: right singular
/// vectors with `sigma <= tol * sigma_max`.
pub fn svd_null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= tol * smax).collect();
    let mut out = DMatrix::zeros(a.ncols(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    out
}

/// Star-orthogonal projection of `omega` onto the column span of `n`.
pub fn star_projection(n: &DMatrix<f64>, star: &DMatrix<f64>, omega: &DVector<f64>) -> DVector<f64> {
    let sn = star * n;
    let gram = n.transpose() * &sn;
    let coeff = gram.lu().solve(&(sn.transpose() * omega)).unwrap();
    n * coeff
}

/// `|L x|_inf / | |L| |x| |_inf`: how much of the product cancels.
pub fn cancellation(op: &SparseOperator, x: &DVector<f64>, transpose: bool) -> f64 {
    let abs = SparseOperator::from_triplets(
        op.rows(),
        op.cols(),
        &op.triplets().into_iter().map(|(i, j, v)| (i, j, v.abs())).collect::<Vec<_>>(),
    );
    let (num, den) = if transpose {
        (op.apply_transpose(x), abs.apply_transpose(&x.abs()))
    } else {
        (op.apply(x), abs.apply(&x.abs()))
    };
    if den.amax() == 0.0 {
        0.0
    } else {
        num.amax() / den.amax()
    }
}
