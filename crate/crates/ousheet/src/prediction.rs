//! Prediction accuracy criteria: pointwise MSPE, integrated MSPE, entropy.
//!
//! All criteria use the Markov structure of the sheet along each axis, so
//! they cost O(n + m) per evaluation. The MSPE is the variance of the best
//! linear unbiased predictor with the constant trend estimated by
//! generalised least squares; the integrated version averages it over the
//! rectangular hull of the grid; the entropy is that of the Gaussian vector
//! of observations.

use thiserror::Error;

use crate::design::{CovParams, GridDesign, MonotonicChain};
use crate::numeric::{csum, ln_one_minus_p2, markov_quadratic, one_minus_p2, trend_gain};

/// Errors from prediction-accuracy evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictionError {
    /// The closed MSPE form interpolates; points outside the grid hull are
    /// not supported.
    #[error("prediction point ({x1}, {x2}) lies outside the grid hull")]
    Extrapolation { x1: f64, x2: f64 },
}

/// Per-axis ingredients of the kriging variance at one coordinate.
///
/// Returns `(t, b, m)`: the Markov quadratic form of the correlation
/// vector, its weighted sum against the trend, and the axis trend
/// information `1 + sum tanh(z_i / 2)`.
fn axis_terms(x: f64, knots: &[f64], rate: f64) -> (f64, f64, f64) {
    let r: Vec<f64> = knots
        .iter()
        .map(|&k| (-rate * (x - k).abs()).exp())
        .collect();
    let z: Vec<f64> = knots.windows(2).map(|w| rate * (w[1] - w[0])).collect();
    let t = markov_quadratic(&z, &r, &r);
    let b = r[r.len() - 1]
        + csum(z.iter().enumerate().map(|(i, &zi)| {
            let p = (-zi).exp();
            (r[i] - p * r[i + 1]) / (1.0 + p)
        }));
    let m = 1.0 + csum(z.iter().map(|&zi| trend_gain(zi)));
    (t, b, m)
}

/// Mean squared prediction error of the kriging predictor at `(x1, x2)`.
///
/// The point must lie in the hull `[s_1, s_n] x [t_1, t_m]`; the value is
/// `sigma^2 [ 1 - T_1 T_2 + (1 - B_1 B_2)^2 / (M_1 M_2) ]` with per-axis
/// terms from [`axis_terms`]. Zero (to rounding) at design points.
pub fn mspe(
    x1: f64,
    x2: f64,
    grid: &GridDesign,
    params: &CovParams,
) -> Result<f64, PredictionError> {
    let s = grid.s();
    let t = grid.t();
    let in_hull = x1 >= s[0] && x1 <= s[s.len() - 1] && x2 >= t[0] && x2 <= t[t.len() - 1];
    if !in_hull {
        return Err(PredictionError::Extrapolation { x1, x2 });
    }
    let (t1, b1, m1) = axis_terms(x1, s, params.alpha());
    let (t2, b2, m2) = axis_terms(x2, t, params.beta());
    let gap = 1.0 - b1 * b2;
    Ok(params.sigma2() * (1.0 - t1 * t2 + gap * gap / (m1 * m2)))
}

/// Per-axis ingredients of the integrated MSPE on the unit interval.
///
/// For unit-normalised spacings `d_i` (summing to 1) and rate `a`, returns
/// `(A, S, D, M)` where `A = (n-1)/a - 2 sum d_i p_i^2 / (1 - p_i^2)`,
/// `S = sum tanh(a d_i / 2)`, `D = sum (1 - p_i^2 + 2 a d_i p_i) /
/// (a (1 + p_i)^2)` and `M = 1 + S`.
fn axis_integrals(d: &[f64], a: f64) -> (f64, f64, f64, f64) {
    let n1 = d.len() as f64;
    let cross = csum(d.iter().map(|&di| di / (2.0 * a * di).exp_m1()));
    let s = csum(d.iter().map(|&di| trend_gain(a * di)));
    let dsum = csum(d.iter().map(|&di| {
        let p = (-a * di).exp();
        let denom = (1.0 + p) * (1.0 + p);
        (one_minus_p2(a * di) + 2.0 * a * di * p) / (a * denom)
    }));
    (n1 / a - 2.0 * cross, s, dsum, 1.0 + s)
}

/// MSPE of the kriging predictor averaged over the hull of the grid.
///
/// The hull is affinely mapped onto the unit square (rates scale by the
/// hull widths; the average is invariant), where the closed form
/// `sigma^2 [ 1 - A_1 A_2 + (1 - (8 / a b) S_1 S_2 + D_1 D_2) / (M_1 M_2) ]`
/// applies. Tends to `sigma^2 (1 + 1 / nm)` in the independence limit.
pub fn imspe(grid: &GridDesign, params: &CovParams) -> f64 {
    let sp = grid.spacings();
    let width_s = grid.s()[grid.n() - 1] - grid.s()[0];
    let width_t = grid.t()[grid.m() - 1] - grid.t()[0];
    let a = params.alpha() * width_s;
    let b = params.beta() * width_t;
    let d: Vec<f64> = sp.d().iter().map(|&di| di / width_s).collect();
    let dl: Vec<f64> = sp.delta().iter().map(|&dj| dj / width_t).collect();
    let (a1, s1, d1, m1) = axis_integrals(&d, a);
    let (a2, s2, d2, m2) = axis_integrals(&dl, b);
    let inner = 1.0 - 8.0 / (a * b) * s1 * s2 + d1 * d2;
    params.sigma2() * (1.0 - a1 * a2 + inner / (m1 * m2))
}

/// Differential entropy of the observation vector on a grid design.
///
/// `(nm / 2)(1 + ln 2 pi sigma^2) + (m / 2) sum ln(1 - p_i^2) +
/// (n / 2) sum ln(1 - q_j^2)`; increasing in every spacing, with the
/// independence value `(nm / 2)(1 + ln 2 pi sigma^2)` as supremum.
pub fn entropy(grid: &GridDesign, params: &CovParams) -> f64 {
    let sp = grid.spacings();
    let (n, m) = (grid.n() as f64, grid.m() as f64);
    let gauss = 0.5 * n * m * (1.0 + (2.0 * std::f64::consts::PI * params.sigma2()).ln());
    let s_sum = csum(sp.d().iter().map(|&d| ln_one_minus_p2(params.alpha() * d)));
    let t_sum = csum(
        sp.delta()
            .iter()
            .map(|&dl| ln_one_minus_p2(params.beta() * dl)),
    );
    gauss + 0.5 * m * s_sum + 0.5 * n * t_sum
}

/// Differential entropy of the observations along a monotonic chain.
///
/// The restriction to a monotonic path is Markov with one-step exponents
/// `alpha ds_i + beta dt_i`, giving
/// `(k / 2)(1 + ln 2 pi sigma^2) + (1 / 2) sum ln(1 - p_i^2)`.
pub fn entropy_monotonic(chain: &MonotonicChain, params: &CovParams) -> f64 {
    let k = chain.k() as f64;
    let gauss = 0.5 * k * (1.0 + (2.0 * std::f64::consts::PI * params.sigma2()).ln());
    let sum = csum(
        chain
            .increments()
            .iter()
            .map(|&(ds, dt)| ln_one_minus_p2(params.alpha() * ds + params.beta() * dt)),
    );
    gauss + 0.5 * sum
}
