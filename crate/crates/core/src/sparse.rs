//! Sparse matrices and the minimal linear-operator interface the solvers use.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

/// Anything that can multiply a vector.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
    fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Dense copy, built column by column unless overridden.
    fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows(), self.ncols());
        let mut e = DVector::zeros(self.ncols());
        for j in 0..self.ncols() {
            e[j] = 1.0;
            out.set_column(j, &self.apply(&e));
            e[j] = 0.0;
        }
        out
    }
}

/// Real sparse matrix in CSR form, with free-form notes recorded during assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    csr: CsrMatrix<f64>,
    notes: Vec<String>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut coo = CooMatrix::new(rows, cols);
        for &(i, j, v) in triplets {
            coo.push(i, j, v);
        }
        Self::from_csr(CsrMatrix::from(&coo))
    }

    pub fn from_csr(csr: CsrMatrix<f64>) -> Self {
        SparseOperator { csr, notes: Vec::new() }.pruned()
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let trip: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(n, n, &trip)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_csr(CsrMatrix::identity(n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_csr(CsrMatrix::zeros(rows, cols))
    }

    /// Stores every nonzero entry of a dense matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut coo = CooMatrix::new(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != 0.0 {
                    coo.push(i, j, v);
                }
            }
        }
        SparseOperator { csr: CsrMatrix::from(&coo), notes: Vec::new() }
    }

    fn pruned(self) -> Self {
        let csr = self.csr.filter(|_, _, &v| v != 0.0);
        SparseOperator { csr, notes: self.notes }
    }

    pub fn csr(&self) -> &CsrMatrix<f64> {
        &self.csr
    }

    pub fn rows(&self) -> usize {
        self.csr.nrows()
    }

    pub fn cols(&self) -> usize {
        self.csr.ncols()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.csr.nnz()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn add_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.csr.row(i);
        match row.col_indices().binary_search(&j) {
            Ok(k) => row.values()[k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.csr.triplet_iter().map(|(i, j, &v)| (i, j, v)).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows().min(self.cols())).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.csr.triplet_iter().all(|(i, j, _)| i == j)
    }

    pub fn transpose(&self) -> Self {
        SparseOperator { csr: self.csr.transpose(), notes: Vec::new() }
    }

    pub fn matmul(&self, other: &SparseOperator) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self::from_csr(&self.csr * &other.csr))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::Shape("cannot add operators of different shapes".into()));
        }
        Ok(Self::from_csr(&self.csr + &other.csr))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_csr(&self.csr * s)
    }

    /// Sparse times dense.
    pub fn mul_dense(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows(), m.ncols());
        for j in 0..m.ncols() {
            let col = self.matvec(m.column(j).as_slice());
            out.set_column(j, &DVector::from_vec(col));
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let (offsets, cols, vals) = (self.csr.row_offsets(), self.csr.col_indices(), self.csr.values());
        (0..self.rows())
            .map(|i| {
                let (a, b) = (offsets[i], offsets[i + 1]);
                cols[a..b].iter().zip(&vals[a..b]).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `A^T x` without materialising the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (i, row) in self.csr.row_iter().enumerate() {
            let xi = x[i];
            if xi != 0.0 {
                for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                    out[j] += v * xi;
                }
            }
        }
        out
    }

    /// Largest entrywise asymmetry `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.csr
            .triplet_iter()
            .map(|(i, j, &v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// `(A + A^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        let t = self.csr.transpose();
        let mut out = Self::from_csr(&(&self.csr + &t) * 0.5);
        out.notes = self.notes.clone();
        out
    }

    /// Matrix Market coordinate format (general, real).
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(s, "{} {} {}", self.rows(), self.cols(), self.nnz());
        for (i, j, v) in self.csr.triplet_iter() {
            let _ = writeln!(s, "{} {} {:.16e}", i + 1, j + 1, v);
        }
        s
    }

    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_matrix_market().as_bytes())?;
        Ok(())
    }
}

impl LinearOperator for SparseOperator {
    fn nrows(&self) -> usize {
        self.rows()
    }
    fn ncols(&self) -> usize {
        self.cols()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.matvec(x.as_slice()))
    }
    fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.matvec_transpose(x.as_slice()))
    }
    fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows(), self.cols());
        for (i, j, &v) in self.csr.triplet_iter() {
            out[(i, j)] += v;
        }
        out
    }
}

impl LinearOperator for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self * x
    }
    fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64> {
        self.tr_mul(x)
    }
    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// Square symmetric operator defined by a closure.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> FnOperator<F> {
    pub fn symmetric(n: usize, f: F) -> Self {
        FnOperator { n, f }
    }
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> LinearOperator for FnOperator<F> {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
    fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_are_summed_and_zeros_dropped() {
        let a = SparseOperator::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), 0.0);
    }

    #[test]
    fn products_and_transpose() {
        let a = SparseOperator::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, -1.0)]);
        let x = [1.0, 2.0, 3.0];
        assert_eq!(a.matvec(&x), vec![7.0, -2.0]);
        assert_eq!(a.matvec_transpose(&[1.0, 1.0]), a.transpose().matvec(&[1.0, 1.0]));
        let ata = a.transpose().matmul(&a).unwrap();
        let dense = a.to_dense();
        assert_eq!(ata.to_dense(), dense.transpose() * &dense);
        assert!(a.matmul(&a).is_err());
        assert_eq!(ata.asymmetry(), 0.0);
    }

    #[test]
    fn matrix_market_header() {
        let a = SparseOperator::from_diagonal(&[1.0, 0.0, 2.5]);
        let mm = a.to_matrix_market();
        let mut lines = mm.lines();
        assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
        assert_eq!(lines.next(), Some("3 3 2"));
        assert_eq!(lines.next(), Some("1 1 1.0000000000000000e0"));
    }
}
