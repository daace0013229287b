//! Small dense solves.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Solution of `A X = B` with a 1-norm condition estimate of `A`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: DMatrix<f64>,
    pub condition: f64,
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn dense_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DenseSolution> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "dense_solve: A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok(DenseSolution { x: b.clone(), condition: 1.0 });
    }
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| Error::Singular("matrix is exactly singular".into()))?;
    let condition = one_norm(a) * one_norm(&inv);
    if !condition.is_finite() || condition > 1.0 / f64::EPSILON {
        return Err(Error::Singular(format!("condition estimate {condition:e}")));
    }
    let x = a.clone().lu().solve(b).ok_or_else(|| Error::Singular("LU solve failed".into()))?;
    Ok(DenseSolution { x, condition })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}
