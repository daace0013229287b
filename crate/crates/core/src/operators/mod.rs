//! Coboundaries, Hodge stars, codifferentials and Laplace-deRham operators.
//!
//! Cochains are column vectors indexed by the canonical simplex order of the
//! complex. `d_p` maps `C^p` to `C^{p+1}`. The star `*_p` is the Gram matrix
//! of the cochain inner product, so `<a, b> = a^T *_p b`.

mod calculus;
mod dec;
mod whitney;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use calculus::{Calculus, CalculusOptions, Laplacian, StarSolver};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// Real coefficients on the `p`-simplices of a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub p: usize,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn new(p: usize, values: Vec<f64>) -> Self {
        Cochain { p, values: DVector::from_vec(values) }
    }

    pub fn from_vector(p: usize, values: DVector<f64>) -> Self {
        Cochain { p, values }
    }

    pub fn zeros(c: &SimplicialComplex, p: usize) -> Self {
        Cochain { p, values: DVector::zeros(c.num_simplices(p)) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks the length against the complex's `p`-simplex count.
    pub fn check(&self, c: &SimplicialComplex) -> Result<()> {
        if self.p > c.dim() {
            return Err(Error::Dimension(format!(
                "{}-cochain on a {}-complex",
                self.p,
                c.dim()
            )));
        }
        if self.len() != c.num_simplices(self.p) {
            return Err(Error::Shape(format!(
                "{}-cochain has {} values but the complex has {} {}-simplices",
                self.p,
                self.len(),
                c.num_simplices(self.p),
                self.p
            )));
        }
        Ok(())
    }
}

/// Which Hodge star defines the cochain inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarKind {
    /// Whitney-form mass matrix.
    Whitney,
    /// Diagonal ratio of circumcentric dual volume to primal volume.
    Dec { allow_indefinite: bool },
}

impl StarKind {
    pub const DEC: StarKind = StarKind::Dec { allow_indefinite: false };

    pub fn name(&self) -> &'static str {
        match self {
            StarKind::Whitney => "whitney",
            StarKind::Dec { .. } => "dec",
        }
    }
}

impl fmt::Display for StarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "whitney" => Ok(StarKind::Whitney),
            "dec" => Ok(StarKind::DEC),
            other => Err(Error::InvalidComplex(format!("unknown star kind {other:?}"))),
        }
    }
}

/// `(-1)^k` as a float.
pub(crate) fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign `(-1)^{1-p^2}` in `<d_p a, b> = (-1)^{1-p^2} <a, delta_{p+1} b>`.
pub fn adjoint_sign(p: usize) -> f64 {
    // 1 - p^2 is odd exactly when p is even
    parity(p + 1)
}

/// The coboundary `d_p`, with entry `(j, i) = (-1)^k` when `sigma_i` is the
/// face of `tau_j` omitting vertex position `k`.
pub fn coboundary(c: &SimplicialComplex, p: usize) -> Result<SparseOperator> {
    let n = c.dim();
    if p >= n {
        return Err(Error::Dimension(format!("coboundary d_{p} needs p < {n}")));
    }
    let mut trip = Vec::with_capacity(c.num_simplices(p + 1) * (p + 2));
    for j in 0..c.num_simplices(p + 1) {
        for (k, &i) in c.facets(p + 1, j).iter().enumerate() {
            trip.push((j, i, parity(k)));
        }
    }
    Ok(SparseOperator::from_triplets(c.num_simplices(p + 1), c.num_simplices(p), &trip))
}

/// The Hodge star `*_p` of the given flavor.
pub fn hodge_star(c: &SimplicialComplex, p: usize, kind: StarKind) -> Result<SparseOperator> {
    let n = c.dim();
    if p > n {
        return Err(Error::Dimension(format!("star *_{p} on a {n}-complex")));
    }
    match kind {
        StarKind::Whitney => whitney::mass_matrix(c, p),
        StarKind::Dec { allow_indefinite } => dec_star(c, p, allow_indefinite),
    }
}

fn dec_star(c: &SimplicialComplex, p: usize, allow_indefinite: bool) -> Result<SparseOperator> {
    let dual = dec::dual_volumes(c, p)?;
    let mut diag = Vec::with_capacity(dual.len());
    let mut nonpositive = Vec::new();
    for (i, &dv) in dual.iter().enumerate() {
        let primal = if p == 0 { 1.0 } else { c.simplex_volume(p, i).value };
        if primal == 0.0 || c.simplex_volume(p, i).degenerate {
            return Err(Error::Degenerate { p, index: i });
        }
        let value = dv / primal;
        if value <= 0.0 {
            if !allow_indefinite {
                return Err(Error::IndefiniteStar { p, index: i, value });
            }
            nonpositive.push(i);
        }
        diag.push(value);
    }
    let mut star = SparseOperator::from_diagonal(&diag);
    if !nonpositive.is_empty() {
        star.add_note(format!(
            "dec star *_{p} has {} nonpositive diagonal entries (first at simplex {})",
            nonpositive.len(),
            nonpositive[0]
        ));
    }
    Ok(star)
}

/// `delta_p b = (-1)^{1-(p-1)^2} *_{p-1}^{-1} d_{p-1}^T *_p b`.
pub fn codifferential_apply(c: &SimplicialComplex, kind: StarKind, b: &Cochain) -> Result<Cochain> {
    Calculus::new(c, kind).codifferential(b)
}

/// Assembled weak Laplacian `Delta_p`; see [`Calculus::laplacian`].
pub fn laplacian(c: &SimplicialComplex, p: usize, kind: StarKind) -> Result<SparseOperator> {
    Calculus::new(c, kind).laplacian_assembled(p)
}

/// `a^T *_p b`.
pub fn inner_product(c: &SimplicialComplex, kind: StarKind, a: &Cochain, b: &Cochain) -> Result<f64> {
    Calculus::new(c, kind).inner(a, b)
}

pub fn norm(c: &SimplicialComplex, kind: StarKind, a: &Cochain) -> Result<f64> {
    Ok(inner_product(c, kind, a, a)?.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::LinearOperator;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]], vec![vec![0, 1, 2]])
            .unwrap()
    }

    fn triangle_boundary() -> SimplicialComplex {
        let s = 3f64.sqrt() / 2.0;
        SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0.5, s]],
            vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn triangle_coboundaries() {
        let c = triangle();
        let d0 = coboundary(&c, 0).unwrap().to_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[-1., 1., 0., -1., 0., 1., 0., -1., 1.]);
        assert_eq!(d0, expected);
        let d1 = coboundary(&c, 1).unwrap().to_dense();
        assert_eq!(d1, DMatrix::from_row_slice(1, 3, &[1., -1., 1.]));
        assert_eq!(&d1 * &d0, DMatrix::zeros(1, 3));
        assert!(coboundary(&c, 2).is_err());
    }

    #[test]
    fn dec_star_on_unit_loop_is_identity() {
        let c = triangle_boundary();
        let star = hodge_star(&c, 1, StarKind::DEC).unwrap();
        assert_relative_eq!(star.to_dense(), DMatrix::identity(3, 3), epsilon = 1e-14);
        let a = Cochain::new(1, vec![1.0, 2.0, -1.0]);
        let b = Cochain::new(1, vec![0.5, 0.0, 3.0]);
        assert_relative_eq!(inner_product(&c, StarKind::DEC, &a, &b).unwrap(), -2.5, epsilon = 1e-14);
    }

    #[test]
    fn whitney_constant_has_area_norm() {
        let c = triangle();
        let one = Cochain::new(0, vec![1.0; 3]);
        assert_relative_eq!(inner_product(&c, StarKind::Whitney, &one, &one).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn codifferential_on_unit_loop() {
        let c = triangle_boundary();
        let b = Cochain::new(1, vec![1.0, -2.0, 0.5]);
        let delta = codifferential_apply(&c, StarKind::DEC, &b).unwrap();
        // both stars are the identity on this loop; p = 1 gives sign -1
        let d0 = coboundary(&c, 0).unwrap().to_dense();
        let expected = -(d0.transpose() * &b.values);
        assert_relative_eq!(delta.values, expected, epsilon = 1e-14);
    }

    #[test]
    fn star_kind_parsing() {
        assert_eq!("whitney".parse::<StarKind>().unwrap(), StarKind::Whitney);
        assert_eq!("DEC".parse::<StarKind>().unwrap(), StarKind::DEC);
        assert!("barycentric".parse::<StarKind>().is_err());
        assert_eq!(adjoint_sign(0), -1.0);
        assert_eq!(adjoint_sign(1), 1.0);
    }

    #[test]
    fn obtuse_mesh_needs_opt_in() {
        let c = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![2., 0.], vec![1., 0.3]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(hodge_star(&c, 1, StarKind::DEC), Err(Error::IndefiniteStar { .. })));
        let star = hodge_star(&c, 1, StarKind::Dec { allow_indefinite: true }).unwrap();
        assert_eq!(star.notes().len(), 1);
    }
}
