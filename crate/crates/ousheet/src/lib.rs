//! Optimal-design criteria for Ornstein-Uhlenbeck sheets.
//!
//! An OU sheet is a zero-mean Gaussian random field on the plane with the
//! separable exponential covariance `sigma^2 exp(-alpha|ds| - beta|dt|)`.
//! Observed on an `n x m` grid, its covariance matrix is the Kronecker
//! product of two one-dimensional Markov correlation factors, which makes
//! the classical design criteria (D-optimality for trend, covariance and
//! Arrhenius-trend parameters, integrated mean squared prediction error,
//! entropy) available in closed form. This crate implements those closed
//! forms, independent dense linear-algebra oracles to validate them, and
//! optimizers for grids, monotonic chains and two-point designs.
//!
//! Module map:
//! - [`design`]: design spaces, grids, monotonic chains, model parameters.
//! - [`covariance`]: correlation factors, tridiagonal inverses, dense
//!   covariances, the semivariogram.
//! - [`fisher`]: Fisher information on trend, covariance and Arrhenius
//!   parameters, plus the free-boundary determinant surfaces.
//! - [`prediction`]: kriging MSPE, IMSPE and entropy criteria.
//! - [`oracle`]: dense reference implementations of every criterion.
//! - [`optimize`]: analytic and numeric design optimizers and root solvers.

pub mod covariance;
pub mod design;
pub mod fisher;
mod numeric;
pub mod optimize;
pub mod oracle;
pub mod prediction;

pub use design::{CovParams, DesignSpace, GridDesign, MonotonicChain, Spacings, TrendModel};
