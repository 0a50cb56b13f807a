//! Largest-eigenvalue inference for high-dimensional covariance and
//! canonical-correlation problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] evaluates the Airy function, the Hastings-McLeod solution of
//!   Painleve II and the Tracy-Widom laws `F1`, `F2`, together with an
//!   independent Airy-kernel Fredholm determinant used as an oracle.
//! * [`linalg`] holds the dense symmetric eigensolver (cyclic Jacobi),
//!   Cholesky factorization and the generalized symmetric-definite problem.
//! * [`laws`] has the Marcenko-Pastur law, exact null joint eigenvalue
//!   densities and the centering/scaling constants for the four
//!   single/double Wishart, real/complex cases.
//! * [`inference`] turns those into largest-root tests, spiked-model
//!   predictions and canonical correlations.
//! * [`simulate`] is a deterministic, seedable Monte Carlo harness used to
//!   check all of the above.

// `!(x > 0.0)` is used on purpose so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inference;
pub mod laws;
pub mod linalg;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use inference::{
    brown_population_eigs, canonical_correlations, detectability, largest_root_test, loss,
    overlap_limit, spike_predict, BrownEigenvalues, Detectability, FluctuationLaw, Regime,
    SpikePrediction, SpikedModel, TestResult,
};
pub use laws::{
    center_scale, joint_density_log, weight_function, CenterScale, Dims, EnsembleCase, Field,
    JointDensityParams, MpLaw, StatisticScale, WeightFamily,
};
pub use linalg::{cholesky, generalized_eig, sym_eig, Matrix, Spectrum, SymMatrix};
pub use specfun::{airy_ai, fredholm_tw2_cdf, solve_painleve_ii, AiryValue, TwDistribution};
