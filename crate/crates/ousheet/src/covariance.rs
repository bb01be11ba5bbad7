//! Correlation factors, their tridiagonal inverses, dense covariances and
//! the semivariogram of the OU sheet.
//!
//! On a lexicographically ordered grid the correlation matrix factors as the
//! Kronecker product `P (x) Q` of two one-dimensional Markov factors whose
//! `(i, j)` entry is the running product `p_i p_{i+1} ... p_{j-1}` of
//! adjacent correlations. Everything the criteria need (inverse, log
//! determinant, quadratic forms) is available from the adjacent correlations
//! alone; dense matrices are materialized only on demand, for the oracle.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::design::{CovParams, GridDesign, MonotonicChain};
use crate::numeric;

/// Spacings with a smaller decay exponent than this produce an adjacent
/// correlation that rounds to 1 and a numerically singular factor.
pub const SINGULAR_EXPONENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovarianceError {
    #[error("spacing {spacing} at rate {rate} makes the adjacent correlation round to 1")]
    SingularSpacing { spacing: f64, rate: f64 },
    #[error("adjacent correlation {0} is outside [0, 1)")]
    CorrelationOutOfRange(f64),
    #[error("observation points {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },
}

/// One-dimensional Markov correlation factor over `k` ordered points,
/// represented by the `k - 1` adjacent correlations `p_i` in `[0, 1)`.
/// `p_i = 0` is legitimate and means independent neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFactor {
    p: Vec<f64>,
}

impl CorrelationFactor {
    pub fn from_correlations(p: Vec<f64>) -> Result<Self, CovarianceError> {
        if let Some(&bad) = p.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(CovarianceError::CorrelationOutOfRange(bad));
        }
        Ok(Self { p })
    }

    /// Factor for adjacent spacings under exponential decay,
    /// `p_i = exp(-rate * spacing_i)`. Correlations that underflow to 0 are
    /// kept (independence); exponents below [`SINGULAR_EXPONENT_FLOOR`] are
    /// rejected because the correlation would round to 1.
    pub fn from_spacings(spacings: &[f64], rate: f64) -> Result<Self, CovarianceError> {
        let p = spacings
            .iter()
            .map(|&d| {
                if rate * d < SINGULAR_EXPONENT_FLOOR {
                    Err(CovarianceError::SingularSpacing { spacing: d, rate })
                } else {
                    Ok((-rate * d).exp())
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(Self { p })
    }

    /// Adjacent correlations.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Number of points the factor covers.
    pub fn dim(&self) -> usize {
        self.p.len() + 1
    }

    /// Dense symmetric view; entry `(i, j)` is the product of the adjacent
    /// correlations between `i` and `j`.
    pub fn dense(&self) -> DMatrix<f64> {
        let k = self.dim();
        let mut m = DMatrix::identity(k, k);
        for i in 0..k {
            let mut prod = 1.0;
            for j in i + 1..k {
                prod *= self.p[j - 1];
                m[(i, j)] = prod;
                m[(j, i)] = prod;
            }
        }
        m
    }

    /// Tridiagonal inverse of the dense view: corner diagonals
    /// `1/(1 - p_1^2)` and `1/(1 - p_{k-1}^2)`, interior diagonals
    /// `1/(1 - p_i^2) + p_{i-1}^2/(1 - p_{i-1}^2)`, off-diagonals
    /// `p_i/(p_i^2 - 1)`.
    pub fn inverse(&self) -> SymTridiagonal {
        let k = self.dim();
        if k == 1 {
            return SymTridiagonal {
                diag: vec![1.0],
                off: vec![],
            };
        }
        let w: Vec<f64> = self.p.iter().map(|&p| 1.0 / (1.0 - p * p)).collect();
        let mut diag = Vec::with_capacity(k);
        diag.push(w[0]);
        for i in 1..k - 1 {
            diag.push(w[i] + self.p[i - 1] * self.p[i - 1] * w[i - 1]);
        }
        diag.push(w[k - 2]);
        let off = self.p.iter().zip(&w).map(|(&p, &wi)| -p * wi).collect();
        SymTridiagonal { diag, off }
    }

    /// Log determinant of the dense view, `sum_i ln(1 - p_i^2)`.
    pub fn log_det(&self) -> f64 {
        numeric::csum(self.p.iter().map(|&p| (-p * p).ln_1p()))
    }
}

/// Symmetric tridiagonal matrix, the shape of a Markov factor inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let k = self.diag.len();
        let mut m = DMatrix::zeros(k, k);
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        for (i, &o) in self.off.iter().enumerate() {
            m[(i, i + 1)] = o;
            m[(i + 1, i)] = o;
        }
        m
    }
}

/// The two directional factors of a grid: `p_i = exp(-alpha d_i)` over the
/// abscissas and `q_j = exp(-beta delta_j)` over the ordinates. The
/// Kronecker product of their dense views is the grid correlation matrix in
/// lexicographic order.
pub fn correlation_factors(
    grid: &GridDesign,
    params: &CovParams,
) -> Result<(CorrelationFactor, CorrelationFactor), CovarianceError> {
    let sp = grid.spacings();
    Ok((
        CorrelationFactor::from_spacings(sp.d(), params.alpha())?,
        CorrelationFactor::from_spacings(sp.delta(), params.beta())?,
    ))
}

/// Markov factor along a monotonic chain: adjacent distances add in the
/// exponent, so `p_i = exp(-alpha |ds_i| - beta |dt_i|)`.
pub fn chain_factor(
    chain: &MonotonicChain,
    params: &CovParams,
) -> Result<CorrelationFactor, CovarianceError> {
    let incs = chain.increments();
    let exponents: Vec<f64> = incs
        .iter()
        .map(|&(ds, dt)| params.alpha() * ds + params.beta() * dt)
        .collect();
    for (&z, &(ds, dt)) in exponents.iter().zip(&incs) {
        if z < SINGULAR_EXPONENT_FLOOR {
            return Err(CovarianceError::SingularSpacing {
                spacing: ds + dt,
                rate: 1.0,
            });
        }
    }
    CorrelationFactor::from_correlations(exponents.iter().map(|&z| (-z).exp()).collect())
}

/// Dense covariance of an arbitrary point set,
/// entry `(i, j) = sigma^2 exp(-alpha|s_i - s_j| - beta|t_i - t_j|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCovariance {
    matrix: DMatrix<f64>,
}

impl DenseCovariance {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn dense_covariance(
    points: &[(f64, f64)],
    params: &CovParams,
) -> Result<DenseCovariance, CovarianceError> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(CovarianceError::DuplicatePoints { i, j });
            }
        }
    }
    let s2 = params.sigma2();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let (si, ti) = points[i];
        let (sj, tj) = points[j];
        s2 * (-params.alpha() * (si - sj).abs() - params.beta() * (ti - tj).abs()).exp()
    });
    Ok(DenseCovariance { matrix })
}

/// Elementwise derivatives of the dense covariance with respect to the
/// decay rates: `dC/dalpha = -|s_i - s_j| C_ij`, `dC/dbeta = -|t_i - t_j|
/// C_ij`.
pub fn covariance_derivatives(
    points: &[(f64, f64)],
    params: &CovParams,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = points.len();
    let s2 = params.sigma2();
    let kernel = |i: usize, j: usize| {
        let (si, ti) = points[i];
        let (sj, tj) = points[j];
        s2 * (-params.alpha() * (si - sj).abs() - params.beta() * (ti - tj).abs()).exp()
    };
    let d_alpha = DMatrix::from_fn(n, n, |i, j| {
        -(points[i].0 - points[j].0).abs() * kernel(i, j)
    });
    let d_beta = DMatrix::from_fn(n, n, |i, j| {
        -(points[i].1 - points[j].1).abs() * kernel(i, j)
    });
    (d_alpha, d_beta)
}

/// Semivariogram of the sheet at lag `(d, delta)`:
/// `gamma = (sigma_tilde^2 / (4 alpha beta)) (1 - exp(-alpha d - beta delta))`
/// with sill `sigma^2`. Lags enter through their absolute values.
pub fn semivariogram(d: f64, delta: f64, params: &CovParams) -> f64 {
    let exponent = -params.alpha() * d.abs() - params.beta() * delta.abs();
    params.sigma2() * -exponent.exp_m1()
}
