//! Fisher information for trend and covariance parameters on grid designs.
//!
//! All quantities here are closed forms in the grid spacings; no covariance
//! matrix is ever assembled. The trend information `m_theta` uses the
//! tanh half-spacing gains, the covariance block `m_r` uses per-axis decay
//! sums, and the Arrhenius variants replace the constant-trend regressor
//! with the temperature-dependent sensitivities `kappa` and `lambda`.
//!
//! Conventions: `sigma_tilde` is held fixed, so `m_r` is the 2x2 information
//! for `(alpha, beta)` alone, and all determinants are reported for unit
//! process variance (the `sigma` field of [`CovParams`] scales criteria that
//! involve it explicitly, not the ones here).

use thiserror::Error;

use crate::design::{CovParams, GridDesign, MonotonicChain};
use crate::numeric::{csum, markov_quadratic, trend_gain};

/// Errors from Fisher-information evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FisherError {
    /// Arrhenius sensitivities require nonnegative temperatures.
    #[error("Arrhenius trend needs nonnegative temperatures, got t = {0}")]
    NegativeTemperature(f64),
}

/// Information matrix for the correlation decay rates `(alpha, beta)`.
///
/// Symmetric 2x2 matrix stored by its three distinct entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherR {
    pub m_alpha: f64,
    pub m_beta: f64,
    pub m_alphabeta: f64,
}

impl FisherR {
    /// Determinant of the 2x2 matrix.
    pub fn det(&self) -> f64 {
        self.m_alpha * self.m_beta - self.m_alphabeta * self.m_alphabeta
    }
}

/// Information matrix for the Arrhenius trend pair `(mu, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherTrend2 {
    pub m_mumu: f64,
    pub m_mub: f64,
    pub m_bb: f64,
}

impl FisherTrend2 {
    /// Determinant of the 2x2 matrix.
    pub fn det(&self) -> f64 {
        self.m_mumu * self.m_bb - self.m_mub * self.m_mub
    }
}

/// `x^2 p^2 (1 + p^2) / (1 - p^2)^2` with `p = exp(-rate x)`.
///
/// Equals `x^2 (e + 2) / e^2` with `e = expm1(2 rate x)`, which avoids the
/// catastrophic cancellation of `1 - p^2` for small spacings. Extended
/// continuously by its limits `1 / (2 rate^2)` at `x = 0` and zero as
/// `x -> inf`.
fn decay_curvature(x: f64, rate: f64) -> f64 {
    if x == 0.0 {
        return 1.0 / (2.0 * rate * rate);
    }
    let e = (2.0 * rate * x).exp_m1();
    if e.is_infinite() {
        return 0.0;
    }
    let u = x / e;
    u * u * (e + 2.0)
}

/// `x p^2 / (1 - p^2) = x / expm1(2 rate x)` with `p = exp(-rate x)`.
///
/// Extended continuously by `1 / (2 rate)` at `x = 0`; decays to zero for
/// large spacings (including `expm1` overflow, where `x / inf = 0`).
fn decay_cross(x: f64, rate: f64) -> f64 {
    if x == 0.0 {
        return 1.0 / (2.0 * rate);
    }
    x / (2.0 * rate * x).exp_m1()
}

/// `(k expm1(z) + 2) / (e^z + 1)`: per-axis trend factor of the joint
/// free-spacing determinant. Tends to `k` as `z -> inf` and to 1 at `z = 0`.
fn trend_edge_factor(z: f64, k: f64) -> f64 {
    if z > 350.0 {
        return k;
    }
    (k * z.exp_m1() + 2.0) / (z.exp() + 1.0)
}

/// Fisher information for a constant trend on a grid design.
///
/// Factorises over the axes: `(1 + sum tanh(alpha d_i / 2)) *
/// (1 + sum tanh(beta delta_j / 2))`. Lies in `[1, nm]`, increasing in the
/// spacings, with limits 1 (all spacings to zero) and `nm` (independence).
pub fn m_theta(grid: &GridDesign, params: &CovParams) -> f64 {
    let sp = grid.spacings();
    let s_factor = 1.0 + csum(sp.d().iter().map(|&d| trend_gain(params.alpha() * d)));
    let t_factor = 1.0 + csum(sp.delta().iter().map(|&dl| trend_gain(params.beta() * dl)));
    s_factor * t_factor
}

/// Fisher information for a constant trend observed along a monotonic chain.
///
/// The restriction of the sheet to a monotonic path is Markov with one-step
/// exponents `alpha ds_i + beta dt_i`, so the information is the chain
/// analogue `1 + sum tanh((alpha ds_i + beta dt_i) / 2)`; it lies in `[1, k]`.
pub fn m_theta_monotonic(chain: &MonotonicChain, params: &CovParams) -> f64 {
    let gains = chain
        .increments()
        .into_iter()
        .map(|(ds, dt)| trend_gain(params.alpha() * ds + params.beta() * dt));
    1.0 + csum(gains)
}

/// Fisher information matrix for the decay rates `(alpha, beta)` on a grid.
pub fn m_r(grid: &GridDesign, params: &CovParams) -> FisherR {
    let sp = grid.spacings();
    let (alpha, beta) = (params.alpha(), params.beta());
    let m_alpha = grid.m() as f64 * csum(sp.d().iter().map(|&d| decay_curvature(d, alpha)));
    let m_beta = grid.n() as f64 * csum(sp.delta().iter().map(|&dl| decay_curvature(dl, beta)));
    let cross_s = csum(sp.d().iter().map(|&d| decay_cross(d, alpha)));
    let cross_t = csum(sp.delta().iter().map(|&dl| decay_cross(dl, beta)));
    FisherR {
        m_alpha,
        m_beta,
        m_alphabeta: 2.0 * cross_s * cross_t,
    }
}

/// `det m_r` for an `n x m` grid with constant spacings `d`, `delta`.
///
/// Closed form
/// `(n-1)(m-1) [ nm T(d) T(delta) - 4 (n-1)(m-1) v(d)^2 v(delta)^2 ]`
/// where `T` is [`decay_curvature`] and `v` is [`decay_cross`]; extended
/// continuously to zero spacings. Nonnegative for all admissible inputs.
pub fn det_m_r_equidistant(n: usize, m: usize, d: f64, delta: f64, params: &CovParams) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let edges = (nf - 1.0) * (mf - 1.0);
    let t_prod = decay_curvature(d, params.alpha()) * decay_curvature(delta, params.beta());
    let v_s = decay_cross(d, params.alpha());
    let v_t = decay_cross(delta, params.beta());
    edges * (nf * mf * t_prod - 4.0 * edges * (v_s * v_s) * (v_t * v_t))
}

/// Joint design criterion `m_theta * det m_r` for trend plus decay rates.
pub fn det_m_all(grid: &GridDesign, params: &CovParams) -> f64 {
    m_theta(grid, params) * m_r(grid, params).det()
}

/// Joint criterion for an equidistant `n x m` grid with free spacings.
///
/// Closed form in `x = alpha d`, `y = beta delta`:
/// `(n-1)(m-1) f(x, n) f(y, m) [ nm T(d) T(delta) - 4 (n-1)(m-1) v^2 v^2 ]`
/// with `f` the [`trend_edge_factor`]. Extended continuously to zero
/// spacings, where it equals `(n-1)(m-1) (nm - (n-1)(m-1)) / (4 alpha^2 beta^2)`.
pub fn det_m_all_free_equidistant(
    n: usize,
    m: usize,
    d: f64,
    delta: f64,
    params: &CovParams,
) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let edges = (nf - 1.0) * (mf - 1.0);
    let t_prod = decay_curvature(d, params.alpha()) * decay_curvature(delta, params.beta());
    let v_s = decay_cross(d, params.alpha());
    let v_t = decay_cross(delta, params.beta());
    let bracket = nf * mf * t_prod - 4.0 * edges * (v_s * v_s) * (v_t * v_t);
    edges
        * trend_edge_factor(params.alpha() * d, nf)
        * trend_edge_factor(params.beta() * delta, mf)
        * bracket
}

/// Sensitivity of the Arrhenius trend `t^{-mu} exp(-B/t)` to `B`.
///
/// `kappa(t) = -exp(-B/t) / t^{mu+1}`, extended continuously by zero at
/// `t = 0` (the essential singularity of the trend wins over any power).
pub fn kappa(t: f64, mu: f64, b: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    -(-b / t).exp() / t.powf(mu + 1.0)
}

/// Sensitivity of the Arrhenius trend to `mu`.
///
/// `lambda(t) = -ln(t) exp(-B/t) / t^mu`, extended continuously by zero at
/// `t = 0`.
pub fn lambda(t: f64, mu: f64, b: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    -t.ln() * (-b / t).exp() / t.powf(mu)
}

fn check_temperatures(grid: &GridDesign) -> Result<(), FisherError> {
    // Temperatures are strictly increasing, so the first is the minimum.
    let t0 = grid.t()[0];
    if t0 < 0.0 {
        return Err(FisherError::NegativeTemperature(t0));
    }
    Ok(())
}

fn s_trend_factor(grid: &GridDesign, params: &CovParams) -> f64 {
    let sp = grid.spacings();
    1.0 + csum(sp.d().iter().map(|&d| trend_gain(params.alpha() * d)))
}

fn t_exponents(grid: &GridDesign, params: &CovParams) -> Vec<f64> {
    let sp = grid.spacings();
    sp.delta().iter().map(|&dl| params.beta() * dl).collect()
}

/// Fisher information for the Arrhenius rate constant `B` (known `mu`).
///
/// The grid's second coordinate is interpreted as temperature; it must be
/// nonnegative. Factorises as `(1 + sum tanh(alpha d_i / 2))` times the
/// Markov quadratic form of the `kappa` sensitivities along the
/// temperature axis.
pub fn m_b_arrhenius(
    grid: &GridDesign,
    params: &CovParams,
    mu: f64,
    b: f64,
) -> Result<f64, FisherError> {
    check_temperatures(grid)?;
    let kv: Vec<f64> = grid.t().iter().map(|&t| kappa(t, mu, b)).collect();
    let z = t_exponents(grid, params);
    Ok(s_trend_factor(grid, params) * markov_quadratic(&z, &kv, &kv))
}

/// Fisher information matrix for the Arrhenius pair `(mu, B)`.
///
/// Same structure as [`m_b_arrhenius`] with the three quadratic forms of
/// the `lambda` and `kappa` sensitivity vectors.
pub fn m_mub_arrhenius(
    grid: &GridDesign,
    params: &CovParams,
    mu: f64,
    b: f64,
) -> Result<FisherTrend2, FisherError> {
    check_temperatures(grid)?;
    let kv: Vec<f64> = grid.t().iter().map(|&t| kappa(t, mu, b)).collect();
    let lv: Vec<f64> = grid.t().iter().map(|&t| lambda(t, mu, b)).collect();
    let z = t_exponents(grid, params);
    let s_factor = s_trend_factor(grid, params);
    Ok(FisherTrend2 {
        m_mumu: s_factor * markov_quadratic(&z, &lv, &lv),
        m_mub: s_factor * markov_quadratic(&z, &lv, &kv),
        m_bb: s_factor * markov_quadratic(&z, &kv, &kv),
    })
}

/// Joint Arrhenius criterion: trend information times `det m_r`.
///
/// With `estimate_mu` the trend factor is `det` of the `(mu, B)` matrix,
/// otherwise the scalar `B` information.
pub fn det_frak_m(
    grid: &GridDesign,
    params: &CovParams,
    mu: f64,
    b: f64,
    estimate_mu: bool,
) -> Result<f64, FisherError> {
    let trend = if estimate_mu {
        m_mub_arrhenius(grid, params, mu, b)?.det()
    } else {
        m_b_arrhenius(grid, params, mu, b)?
    };
    Ok(trend * m_r(grid, params).det())
}

/// `det m_r` for the 3x3 grid `{0, d, 1} x {0, delta, 1}` on the unit square.
///
/// `9 G(d; alpha) G(delta; beta) - 4 [H(d; alpha) H(delta; beta)]^2` with
/// `G(u; r) = T(u, r) + T(1-u, r)` and `H(u; r) = v(u, r) + v(1-u, r)`;
/// continuous on the closed square `0 <= d, delta <= 1` via the spacing
/// limits, so interior points may coalesce with the corners.
pub fn det_m_r_restricted33(d: f64, delta: f64, params: &CovParams) -> f64 {
    debug_assert!((0.0..=1.0).contains(&d) && (0.0..=1.0).contains(&delta));
    let g_s = decay_curvature(d, params.alpha()) + decay_curvature(1.0 - d, params.alpha());
    let g_t = decay_curvature(delta, params.beta()) + decay_curvature(1.0 - delta, params.beta());
    let h_s = decay_cross(d, params.alpha()) + decay_cross(1.0 - d, params.alpha());
    let h_t = decay_cross(delta, params.beta()) + decay_cross(1.0 - delta, params.beta());
    let h = h_s * h_t;
    9.0 * g_s * g_t - 4.0 * h * h
}

/// Joint criterion `m_theta * det m_r` for the restricted 3x3 grid.
pub fn det_m_all_restricted33(d: f64, delta: f64, params: &CovParams) -> f64 {
    let alpha = params.alpha();
    let beta = params.beta();
    let s_factor = 1.0 + trend_gain(alpha * d) + trend_gain(alpha * (1.0 - d));
    let t_factor = 1.0 + trend_gain(beta * delta) + trend_gain(beta * (1.0 - delta));
    s_factor * t_factor * det_m_r_restricted33(d, delta, params)
}
