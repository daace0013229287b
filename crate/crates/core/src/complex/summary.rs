use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{Error, Result};
use crate::operators::coboundary;
use crate::sparse::LinearOperator;

#[derive(Debug, Clone, Copy)]
pub struct SummaryOptions {
    /// Singular values at or below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Betti numbers are skipped when any dimension has more simplices than this.
    pub dense_limit: usize,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        SummaryOptions { rank_tol: 1e-10, dense_limit: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub dim: usize,
    pub embedding_dim: usize,
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub betti: Option<Vec<usize>>,
    pub boundary_simplex_counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

/// Numerical rank of a dense matrix by singular-value thresholding.
pub(crate) fn dense_rank(m: nalgebra::DMatrix<f64>, rank_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * max).count()
}

impl SimplicialComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Rank of the coboundary `d_p` for `0 <= p < n` (dense SVD).
    pub fn coboundary_rank(&self, p: usize, rank_tol: f64) -> Result<usize> {
        Ok(dense_rank(coboundary(self, p)?.to_dense(), rank_tol))
    }

    /// Real Betti numbers `b_0..b_n` from coboundary ranks, or `None` when the
    /// complex exceeds `dense_limit` in some dimension.
    pub fn betti_numbers(&self, opts: &SummaryOptions) -> Result<Option<Vec<usize>>> {
        let counts = self.counts();
        if counts.iter().any(|&c| c > opts.dense_limit) {
            return Ok(None);
        }
        let n = self.dim();
        let ranks: Vec<usize> = (0..n)
            .map(|p| self.coboundary_rank(p, opts.rank_tol))
            .collect::<Result<_>>()?;
        let betti = (0..=n)
            .map(|p| {
                let rank_out = if p < n { ranks[p] } else { 0 };
                let rank_in = if p > 0 { ranks[p - 1] } else { 0 };
                counts[p] - rank_out - rank_in
            })
            .collect();
        Ok(Some(betti))
    }

    pub fn summary(&self, opts: &SummaryOptions) -> Result<ComplexSummary> {
        let betti = self.betti_numbers(opts)?;
        let notice = betti.is_none().then(|| {
            format!(
                "betti numbers omitted: some dimension exceeds dense limit {}",
                opts.dense_limit
            )
        });
        let boundary_simplex_counts =
            self.boundary_flags().iter().map(|f| f.iter().filter(|&&b| b).count()).collect();
        Ok(ComplexSummary {
            dim: self.dim(),
            embedding_dim: self.embedding_dim(),
            counts: self.counts(),
            euler_characteristic: self.euler_characteristic(),
            betti,
            boundary_simplex_counts,
            notice,
        })
    }

    /// Lower bound `N_0 - chi` on the dimension of `ker d_1` for 3-complexes.
    pub fn kernel_dim_bound(&self) -> Result<i64> {
        if self.dim() != 3 {
            return Err(Error::Dimension(format!(
                "kernel bound needs a 3-complex, got dimension {}",
                self.dim()
            )));
        }
        Ok(self.num_vertices() as i64 - self.euler_characteristic())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle_is_contractible() {
        let c = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let s = c.summary(&SummaryOptions::default()).unwrap();
        assert_eq!(s.counts, vec![3, 3, 1]);
        assert_eq!(s.euler_characteristic, 1);
        assert_eq!(s.betti, Some(vec![1, 0, 0]));
        assert_eq!(s.boundary_simplex_counts, vec![3, 3]);
    }

    #[test]
    fn betti_skipped_above_limit() {
        let c = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let s = c.summary(&SummaryOptions { dense_limit: 2, ..Default::default() }).unwrap();
        assert!(s.betti.is_none());
        assert!(s.notice.is_some());
        assert_eq!(s.euler_characteristic, 1);
    }

    #[test]
    fn kernel_bound_needs_3d() {
        let tet = SimplicialComplex::new(
            3,
            vec![vec![0., 0., 0.], vec![1., 0., 0.], vec![0., 1., 0.], vec![0., 0., 1.]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(tet.kernel_dim_bound().unwrap(), 3);
        let tri = SimplicialComplex::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(tri.kernel_dim_bound(), Err(Error::Dimension(_))));
    }
}
