//! Harmonic cochains on simplicial manifold complexes.
//!
//! The crate builds coboundary and Hodge star matrices (Whitney mass matrices
//! or diagonal circumcentric stars) on a [`SimplicialComplex`] and finds the
//! harmonic representative of a cohomology class by a weighted least-squares
//! solve, by generalized eigenproblems, by projection onto a harmonic basis,
//! or by pairing with homology cycles.
//!
//! ```
//! use hodgekit::{harmonic, meshgen, Calculus, StarKind};
//!
//! let torus = meshgen::torus(16, 6, 3.0, 1.0).unwrap();
//! let omega = harmonic::cocycle_from_dual_chain(&torus.complex, &torus.dual_cycles[0], true).unwrap();
//! let calc = Calculus::new(&torus.complex, StarKind::DEC);
//! let res = harmonic::harmonic_ls(&calc, &omega, &Default::default()).unwrap();
//! assert!(res.diagnostics.laplacian_residual < 1e-8);
//! ```

pub mod complex;
pub mod error;
pub mod harmonic;
pub mod io;
pub mod meshgen;
pub mod operators;
pub mod parallel;
pub mod solvers;
pub mod sparse;

pub use complex::{ComplexSummary, SimplicialComplex, SummaryOptions};
pub use error::{Error, Result};
pub use harmonic::{HarmonicBasis, HarmonicResult, HomologyBasis};
pub use operators::{Calculus, CalculusOptions, Cochain, StarKind};
pub use solvers::{CgOptions, NullSpaceOptions, NullSpaceResult, SolveReport};
pub use sparse::{LinearOperator, SparseOperator};
