//! Dense linear-algebra reference implementations.
//!
//! Everything in this module recomputes a criterion from an explicitly
//! assembled covariance matrix: Cholesky or LU factorisations, trace
//! formulas for Fisher information, a bordered system for the kriging
//! variance, and adaptive Gauss-Legendre quadrature for its integral.
//! These are O(N^3) routes kept deliberately independent of the closed
//! forms elsewhere in the crate so the two can be compared in tests.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

use crate::design::CovParams;
use crate::fisher::FisherR;

/// Errors from dense reference computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// Cholesky factorisation failed; the matrix is not positive definite.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    /// LU solve failed; the bordered system is singular.
    #[error("linear system is singular")]
    SingularSystem,
    /// Adaptive quadrature hit its subdivision budget before reaching the
    /// requested tolerance; `estimate` is the best value obtained and
    /// `error` bounds the unresolved remainder.
    #[error("quadrature budget exhausted: estimate {estimate}, error bound {error}")]
    QuadratureBudget { estimate: f64, error: f64 },
}

/// Cholesky factorisation of a symmetric positive definite matrix.
pub struct CholeskyFactor {
    inner: Cholesky<f64, Dyn>,
}

impl CholeskyFactor {
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self, OracleError> {
        Cholesky::new(matrix.clone())
            .map(|inner| CholeskyFactor { inner })
            .ok_or(OracleError::NotPositiveDefinite)
    }

    pub fn solve_vec(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.inner.solve(rhs)
    }

    pub fn solve_mat(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.inner.solve(rhs)
    }

    /// `ln det` of the factored matrix, summed from the diagonal of `L`.
    pub fn log_det(&self) -> f64 {
        2.0 * self
            .inner
            .l_dirty()
            .diagonal()
            .iter()
            .map(|&l| l.ln())
            .sum::<f64>()
    }

    /// The lower-triangular factor `L` with `L L^T` equal to the input.
    pub fn lower(&self) -> DMatrix<f64> {
        self.inner.l()
    }
}

/// `1^T C^{-1} 1` by dense factorisation.
pub fn one_c_inv_one(c: &DMatrix<f64>) -> Result<f64, OracleError> {
    let chol = CholeskyFactor::new(c)?;
    let ones = DVector::from_element(c.nrows(), 1.0);
    Ok(chol.solve_vec(&ones).sum())
}

/// Fisher information of the decay rates from the trace formula
/// `I_ab = tr(C^{-1} dC_a C^{-1} dC_b) / 2`.
///
/// Any common scalar factor of `c` and the derivatives cancels, so the
/// correlation matrix and its derivatives may be passed directly.
pub fn fisher_trace(
    c: &DMatrix<f64>,
    dc_alpha: &DMatrix<f64>,
    dc_beta: &DMatrix<f64>,
) -> Result<FisherR, OracleError> {
    let chol = CholeskyFactor::new(c)?;
    let x = chol.solve_mat(dc_alpha);
    let y = chol.solve_mat(dc_beta);
    Ok(FisherR {
        m_alpha: 0.5 * (&x * &x).trace(),
        m_beta: 0.5 * (&y * &y).trace(),
        m_alphabeta: 0.5 * (&x * &y).trace(),
    })
}

/// Trend information `F^T C^{-1} F` for an arbitrary regressor matrix.
///
/// `F` has one row per observation and one column per trend parameter;
/// the constant trend is the all-ones column, the Arrhenius trend uses
/// the sensitivity values at each design point.
pub fn fisher_trend_general(
    f: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>, OracleError> {
    let chol = CholeskyFactor::new(c)?;
    Ok(f.transpose() * chol.solve_mat(f))
}

/// Bordered system for kriging with an estimated constant trend.
///
/// Holds the LU factorisation of `[[0, 1^T], [1, R]]` with `R` the
/// correlation matrix of the design points, so repeated MSPE evaluations
/// cost one solve each.
pub struct BorderedKriging {
    lu: nalgebra::LU<f64, Dyn, Dyn>,
    points: Vec<(f64, f64)>,
    alpha: f64,
    beta: f64,
    sigma2: f64,
}

impl BorderedKriging {
    pub fn new(points: &[(f64, f64)], params: &CovParams) -> Result<Self, OracleError> {
        let n = points.len();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(0, i + 1)] = 1.0;
            m[(i + 1, 0)] = 1.0;
            for j in 0..n {
                let ds = (points[i].0 - points[j].0).abs();
                let dt = (points[i].1 - points[j].1).abs();
                m[(i + 1, j + 1)] = (-params.alpha() * ds - params.beta() * dt).exp();
            }
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(OracleError::SingularSystem);
        }
        Ok(BorderedKriging {
            lu,
            points: points.to_vec(),
            alpha: params.alpha(),
            beta: params.beta(),
            sigma2: params.sigma2(),
        })
    }

    /// MSPE of the constant-trend kriging predictor at `(x1, x2)`:
    /// `sigma^2 (1 - v^T M^{-1} v)` with `v = (1, rho)`.
    pub fn mspe(&self, x1: f64, x2: f64) -> f64 {
        let n = self.points.len();
        let mut v = DVector::zeros(n + 1);
        v[0] = 1.0;
        for (i, &(s, t)) in self.points.iter().enumerate() {
            v[i + 1] = (-self.alpha * (x1 - s).abs() - self.beta * (x2 - t).abs()).exp();
        }
        let sol = self.lu.solve(&v).expect("factorisation checked invertible");
        self.sigma2 * (1.0 - v.dot(&sol))
    }
}

/// MSPE at a single point via the bordered dense system.
pub fn mspe_bordered(
    x1: f64,
    x2: f64,
    points: &[(f64, f64)],
    params: &CovParams,
) -> Result<f64, OracleError> {
    Ok(BorderedKriging::new(points, params)?.mspe(x1, x2))
}

const GAUSS6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_170_4),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152, 0.171_324_492_379_170_4),
];

fn gauss6_cell(f: &impl Fn(f64, f64) -> f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
    let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
    let mut acc = 0.0;
    for (u, wu) in GAUSS6 {
        for (v, wv) in GAUSS6 {
            acc += wu * wv * f(cx + hx * u, cy + hy * v);
        }
    }
    acc * hx * hy
}

/// One adaptive cell `[x0, x1] x [y0, y1]`: compare the single-panel
/// rule against its 2x2 refinement and recurse on disagreement.
fn adapt_cell(
    f: &impl Fn(f64, f64) -> f64,
    cell: [f64; 4],
    tol: f64,
    depth: u32,
    budget: &mut u32,
) -> (f64, f64) {
    let [x0, x1, y0, y1] = cell;
    let coarse = gauss6_cell(f, x0, x1, y0, y1);
    let (mx, my) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let quads = [
        [x0, mx, y0, my],
        [mx, x1, y0, my],
        [x0, mx, my, y1],
        [mx, x1, my, y1],
    ];
    let fine: f64 = quads
        .iter()
        .map(|&[a, b, c, d]| gauss6_cell(f, a, b, c, d))
        .sum();
    let err = (fine - coarse).abs();
    if err <= tol || depth >= 12 || *budget == 0 {
        return (fine, if err <= tol { 0.0 } else { err });
    }
    *budget -= 1;
    let quarter = tol / 4.0;
    let mut total = 0.0;
    let mut bound = 0.0;
    for quad in quads {
        let (v, e) = adapt_cell(f, quad, quarter, depth + 1, budget);
        total += v;
        bound += e;
    }
    (total, bound)
}

/// Mean MSPE over the bounding rectangle of `points`, by adaptive
/// Gauss-Legendre quadrature of the bordered-system MSPE.
///
/// The rectangle is pre-split at the interior design coordinates, where
/// the integrand has derivative kinks; inside each cell it is analytic,
/// so the tensor rule converges fast. `tol` bounds the absolute error of
/// the mean; exceeding the refinement budget reports the best estimate.
pub fn imspe_quadrature(
    points: &[(f64, f64)],
    params: &CovParams,
    tol: f64,
) -> Result<f64, OracleError> {
    let kriging = BorderedKriging::new(points, params)?;
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    ys.sort_by(|a, b| a.total_cmp(b));
    ys.dedup();
    let area = (xs[xs.len() - 1] - xs[0]) * (ys[ys.len() - 1] - ys[0]);
    debug_assert!(area > 0.0, "degenerate hull");
    let f = |x: f64, y: f64| kriging.mspe(x, y);
    let abs_tol = tol * area;
    let mut integral = 0.0;
    let mut error = 0.0;
    let mut budget = 20_000u32;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            let cell_tol = abs_tol * (wx[1] - wx[0]) * (wy[1] - wy[0]) / area;
            let (v, e) = adapt_cell(&f, [wx[0], wx[1], wy[0], wy[1]], cell_tol, 0, &mut budget);
            integral += v;
            error += e;
        }
    }
    let mean = integral / area;
    if error > abs_tol {
        return Err(OracleError::QuadratureBudget {
            estimate: mean,
            error: error / area,
        });
    }
    Ok(mean)
}

/// Differential entropy of the observations at arbitrary points, from the
/// dense covariance matrix: `(N / 2)(1 + ln 2 pi) + ln det(C) / 2`.
pub fn entropy_dense(points: &[(f64, f64)], params: &CovParams) -> Result<f64, OracleError> {
    let cov = crate::covariance::dense_covariance(points, params)
        .map_err(|_| OracleError::NotPositiveDefinite)?;
    let chol = CholeskyFactor::new(cov.matrix())?;
    let n = points.len() as f64;
    Ok(0.5 * n * (1.0 + (2.0 * std::f64::consts::PI).ln()) + 0.5 * chol.log_det())
}

/// Spectral condition number of a symmetric matrix.
pub fn condition_number(c: &DMatrix<f64>) -> f64 {
    let eigen = c.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &ev in eigen.eigenvalues.iter() {
        lo = lo.min(ev.abs());
        hi = hi.max(ev.abs());
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
