//! Small dense numerical kernels shared by the rest of the crate.
//!
//! Everything here is deterministic for fixed inputs: exact binomials,
//! cyclic Jacobi eigendecomposition, compensated summation, a bounded
//! Nelder-Mead least-squares driver and a seedable ChaCha8 random source.

mod binomial;
mod eigen;
mod rng;
mod simplex;
mod summation;

pub use binomial::{binomial, binomial_ratio, falling_factorial, MAX_BINOMIAL_N};
pub use eigen::{
    min_eigenpair, symmetric_eigen, EigenPair, SymmetricMatrix, JACOBI_MAX_SWEEPS,
    JACOBI_RELATIVE_TOLERANCE,
};
pub use rng::{sample_multinomial, RngStream};
pub use simplex::{fit_least_squares, fit_least_squares_with, FitOutcome, SimplexOptions};
pub use summation::NeumaierSum;
