//! Design optimisers and root solvers for the closed-form criteria.
//!
//! Grid criteria have analytic optima (equidistant designs), so
//! [`optimal_grid`] needs no iteration. The free-spacing joint criterion
//! and the two-point Arrhenius examples reduce to one-dimensional root
//! problems solved by bracket scan, bisection and Newton polish. Monotonic
//! chains are optimised by a seeded multi-start coordinate ascent over
//! their increments.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::design::{
    make_equidistant_grid, CovParams, DesignError, DesignSpace, GridDesign, MonotonicChain,
};
use crate::fisher::{
    det_m_all_free_equidistant, det_m_all_restricted33, det_m_r_equidistant, det_m_r_restricted33,
    m_theta,
};
use crate::numeric::{csum, ln_one_minus_p2, trend_gain};
use crate::prediction::entropy_monotonic;

/// Errors from root solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    /// The bracket scan found no sign change of the defining equation.
    #[error("no sign change of the defining equation in the scan interval")]
    NoBracket,
    /// `mu = -1` separates the two maximin regimes; neither closed form
    /// nor root equation applies there.
    #[error("mu = -1 has no maximin optimum; the two regimes meet there")]
    MaximinBoundaryMu,
    /// An argument violates a precondition.
    #[error("invalid argument: {0}")]
    Domain(&'static str),
}

/// Grid design criteria with analytic optimisers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    TrendD,
    Imspe,
    Entropy,
}

/// Criteria defined for monotonic chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainCriterion {
    TrendD,
    Entropy,
}

/// Whether the free-spacing rate determinant decreases monotonically in
/// both spacings or has a ridge/saddle structure instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DesignBehavior {
    MonotoneDecreasing,
    RidgeMaximum,
}

/// Optimal grid for the given criterion: the endpoint-inclusive
/// equidistant grid, which maximises the trend information and entropy
/// and minimises the integrated MSPE among grids in the space.
pub fn optimal_grid(
    space: &DesignSpace,
    n: usize,
    m: usize,
    _criterion: Criterion,
) -> Result<GridDesign, DesignError> {
    make_equidistant_grid(space, n, m)
}

/// Shape classification of the free-spacing rate determinant as a
/// function of the spacings: monotone decreasing from the zero-spacing
/// supremum iff `nm >= 2 (n-1)(m-1)`, otherwise a ridge with an interior
/// maximum along the diagonal.
pub fn covariance_design_classification(n: usize, m: usize) -> DesignBehavior {
    debug_assert!(n >= 2 && m >= 2);
    if n * m >= 2 * (n - 1) * (m - 1) {
        DesignBehavior::MonotoneDecreasing
    } else {
        DesignBehavior::RidgeMaximum
    }
}

/// First stationarity polynomial of the free-spacing joint criterion.
pub fn g1(x: f64, n: usize) -> f64 {
    free_poly_g1(x, n as f64).0
}

/// Second stationarity polynomial of the free-spacing joint criterion.
pub fn g2(x: f64, n: usize) -> f64 {
    free_poly_g2(x, n as f64).0
}

/// `(value, magnitude)` of `g1`; the magnitude is the sum of absolute
/// terms and bounds the cancellation noise of the value.
fn free_poly_g1(x: f64, n: f64) -> (f64, f64) {
    let e = x.exp();
    let (e2, e3, e4, e5) = (e * e, e * e * e, e * e * e * e, e * e * e * e * e);
    let terms = [
        e5 * n * (1.0 - x),
        e4 * (2.0 * n * x - 3.0 * x - n + 2.0),
        e3 * x * (1.0 - 4.0 * n),
        e2 * x * (4.0 * n - 7.0),
        e * (x - n - n * x),
        n - 2.0,
    ];
    (csum(terms), csum(terms.map(f64::abs)))
}

/// `(value, magnitude)` of `g2`, as for [`free_poly_g1`].
fn free_poly_g2(x: f64, n: f64) -> (f64, f64) {
    let e = x.exp();
    let (e2, e3) = (e * e, e * e * e);
    let terms = [
        e3 * n * (1.0 - 2.0 * x),
        e2 * (3.0 * n * x - 5.0 * x + 2.0 - n),
        e * (x - n - n * x),
        n - 2.0,
    ];
    (csum(terms), csum(terms.map(f64::abs)))
}

/// `(value, noise floor)` of the symmetric stationarity function
/// `F(x) = n^2 (e^{2x} + 1) g1(x, n) - 4 (n-1)^2 g2(x, n)`.
///
/// Signs with `|F|` below the floor are treated as indeterminate: near
/// `x = 0` both polynomials vanish to second order and the floating-point
/// residue is pure cancellation noise.
fn free_stationarity(x: f64, n: f64) -> (f64, f64) {
    let (g1v, g1m) = free_poly_g1(x, n);
    let (g2v, g2m) = free_poly_g2(x, n);
    let lead = n * n * ((2.0 * x).exp() + 1.0);
    let trail = 4.0 * (n - 1.0) * (n - 1.0);
    let value = lead * g1v - trail * g2v;
    let noise = 64.0 * f64::EPSILON * (lead * g1m + trail * g2m);
    (value, noise)
}

/// Solution of the free-spacing stationarity system for `n = m`.
#[derive(Debug, Clone, Serialize)]
pub struct FreeBoundarySolution {
    pub d_star: f64,
    pub delta_star: f64,
    /// Joint criterion value at the solution.
    pub objective: f64,
    pub iterations: u32,
    /// Relative residuals of the two stationarity equations,
    /// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
    pub residuals: [f64; 2],
    /// Sign changes found by the bracket scan; more than one means the
    /// uniqueness the solver relies on failed and the best root by
    /// objective value was returned.
    pub roots_bracketed: usize,
    pub kind: SolutionKind,
}

/// Whether the free-spacing optimum is interior or the degenerate
/// collapse at zero spacings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    Interior,
    CollapsedAtZero,
}

/// Solves the free-spacing stationarity system for an `n x n` grid.
///
/// For `n = 2` the joint criterion is strictly decreasing in both
/// spacings and the maximum sits at `d = delta = 0`. For `n >= 3` the
/// system is symmetric in `(alpha d, beta delta)`, so it reduces to one
/// scalar equation; brackets come from a geometric scan of
/// `[1e-6, 50]` with 200 probes, refined by bisection and a damped
/// Newton polish.
pub fn solve_all_params_free(
    n: usize,
    params: &CovParams,
) -> Result<FreeBoundarySolution, SolveError> {
    if n < 2 {
        return Err(SolveError::Domain("free-spacing designs need n >= 2"));
    }
    if n == 2 {
        return Ok(FreeBoundarySolution {
            d_star: 0.0,
            delta_star: 0.0,
            objective: det_m_all_free_equidistant(2, 2, 0.0, 0.0, params),
            iterations: 0,
            residuals: [0.0, 0.0],
            roots_bracketed: 0,
            kind: SolutionKind::CollapsedAtZero,
        });
    }
    let nf = n as f64;
    let f = |x: f64| free_stationarity(x, nf);
    let brackets = scan_brackets(&f, 1e-6, 50.0, 200);
    if brackets.is_empty() {
        return Err(SolveError::NoBracket);
    }
    let mut best: Option<(f64, f64, u32)> = None;
    for &(lo, hi) in &brackets {
        let (x, iters) = refine_root(&f, lo, hi);
        let d = x / params.alpha();
        let delta = x / params.beta();
        let objective = det_m_all_free_equidistant(n, n, d, delta, params);
        if best.as_ref().is_none_or(|&(_, obj, _)| objective > obj) {
            best = Some((x, objective, iters));
        }
    }
    let (x_star, objective, iterations) = best.expect("nonempty brackets");
    let residual = {
        let lhs = nf * nf * ((2.0 * x_star).exp() + 1.0) * g1(x_star, n);
        let rhs = 4.0 * (nf - 1.0) * (nf - 1.0) * g2(x_star, n);
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
    };
    Ok(FreeBoundarySolution {
        d_star: x_star / params.alpha(),
        delta_star: x_star / params.beta(),
        objective,
        iterations,
        // The system is evaluated at the symmetric point, where its two
        // equations coincide.
        residuals: [residual, residual],
        roots_bracketed: brackets.len(),
        kind: SolutionKind::Interior,
    })
}

/// Sign-change intervals of `f` over a geometric probe ladder, skipping
/// probes whose value sits inside the reported noise floor.
fn scan_brackets(
    f: &impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    probes: usize,
) -> Vec<(f64, f64)> {
    let ratio = (hi / lo).powf(1.0 / (probes - 1) as f64);
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut x = lo;
    for _ in 0..probes {
        let (v, noise) = f(x);
        if v.abs() > noise {
            if let Some((px, pv)) = prev {
                if pv.signum() != v.signum() {
                    brackets.push((px, x));
                }
            }
            prev = Some((x, v));
        }
        x *= ratio;
    }
    brackets
}

/// Bisection to near machine precision followed by a damped Newton
/// polish kept inside the bracket. Returns the root and the iteration
/// count.
fn refine_root(f: &impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> (f64, u32) {
    let mut iterations = 0u32;
    let mut flo = f(lo).0;
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (v, noise) = f(mid);
        if v.abs() <= noise || hi - lo <= f64::EPSILON * mid.abs() {
            return (mid, iterations);
        }
        if v.signum() == flo.signum() {
            lo = mid;
            flo = v;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * mid.max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        iterations += 1;
        let h = 1e-7 * x.abs().max(0.1);
        let (v, noise) = f(x);
        if v.abs() <= noise {
            break;
        }
        let slope = (f(x + h).0 - f(x - h).0) / (2.0 * h);
        if slope == 0.0 {
            break;
        }
        let next = (x - v / slope).clamp(lo, hi);
        if (next - x).abs() < f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    (x, iterations)
}

/// Maximin spacing for the two-point Arrhenius rate design.
///
/// For `mu < -1` the worst-case criterion has the closed maximiser
/// `-(mu + 1) / B`; for `mu > -1` it is the unique root of
/// `(B - (mu+1) delta) (e^{2 beta delta} - 1) = beta delta^2` in
/// `(0, B / (mu+1))`; `mu = -1` is rejected.
pub fn maximin_two_point(mu: f64, b: f64, beta: f64) -> Result<f64, SolveError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(SolveError::Domain("B must be positive and finite"));
    }
    if !(beta > 0.0 && beta.is_finite()) || !mu.is_finite() {
        return Err(SolveError::Domain("beta must be positive and mu finite"));
    }
    if mu == -1.0 {
        return Err(SolveError::MaximinBoundaryMu);
    }
    if mu < -1.0 {
        return Ok(-(mu + 1.0) / b);
    }
    let upper = b / (mu + 1.0);
    let f = |delta: f64| {
        let v = (b - (mu + 1.0) * delta) * (2.0 * beta * delta).exp_m1() - beta * delta * delta;
        let mag =
            (b + (mu + 1.0) * delta) * (2.0 * beta * delta).exp_m1().abs() + beta * delta * delta;
        (v, 64.0 * f64::EPSILON * mag)
    };
    let brackets = scan_brackets(&f, 1e-9 * upper, upper * (1.0 - 1e-12), 200);
    let &(lo, hi) = brackets.first().ok_or(SolveError::NoBracket)?;
    Ok(refine_root(&f, lo, hi).0)
}

/// Optimal temperature gap of the two-point joint Arrhenius design at a
/// fixed environment correlation `p = exp(-alpha d)`.
///
/// Solves the exponentially rescaled stationarity equation
///
/// ```text
/// (beta delta^2 - mu delta + B) e^{-4 beta delta}
///   + (2 beta (2 + p^2) delta^2 + (B - mu delta) p^2) e^{-2 beta delta}
///   + (1 + p^2)(beta delta^2 + mu delta - B) = 0
/// ```
///
/// which starts at zero with negative slope and ends positive, so the
/// root is the first sign change from below.
pub fn joint_two_point_delta(mu: f64, b: f64, beta: f64, p: f64) -> Result<f64, SolveError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(SolveError::Domain("B must be positive and finite"));
    }
    if !(beta > 0.0 && beta.is_finite()) || !mu.is_finite() {
        return Err(SolveError::Domain("beta must be positive and mu finite"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(SolveError::Domain("p must lie in [0, 1)"));
    }
    let p2 = p * p;
    let f = |delta: f64| {
        let e2 = (-2.0 * beta * delta).exp();
        let e4 = e2 * e2;
        let terms = [
            (beta * delta * delta - mu * delta + b) * e4,
            (2.0 * beta * (2.0 + p2) * delta * delta + (b - mu * delta) * p2) * e2,
            (1.0 + p2) * (beta * delta * delta + mu * delta - b),
        ];
        (csum(terms), 64.0 * f64::EPSILON * csum(terms.map(f64::abs)))
    };
    // The sum of the last bracket turns positive past the larger root of
    // beta delta^2 + mu delta - B; beyond about twice that point the
    // exponentially damped terms cannot flip the sign back.
    let turn = (-mu + (mu * mu + 4.0 * beta * b).sqrt()) / (2.0 * beta);
    let mut hi = 4.0 * turn + 4.0 / beta;
    if f(hi).0 <= 0.0 {
        hi *= 4.0;
    }
    let brackets = scan_brackets(&f, 1e-9 * turn.min(1.0), hi, 400);
    let &(lo, hi) = brackets.first().ok_or(SolveError::NoBracket)?;
    Ok(refine_root(&f, lo, hi).0)
}

/// Result of a multi-start monotonic-chain optimisation.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    pub criterion: ChainCriterion,
    pub k: usize,
    pub seed: u64,
    pub starts: usize,
    /// Best criterion value, re-evaluated on `best_chain` by the public
    /// criterion function, so it is reproducible bit for bit.
    pub best_value: f64,
    pub best_chain: MonotonicChain,
    /// Converged value of every start, in start order.
    pub start_values: Vec<f64>,
}

const CHAIN_STARTS: usize = 32;
const CHAIN_MAX_SWEEPS: usize = 300;
const CHAIN_SWEEP_TOL: f64 = 1e-10;

/// Internal chain objective: the criterion terms that depend on the
/// increments (monotone transforms of the public criteria).
fn chain_gain(z: f64, criterion: ChainCriterion) -> f64 {
    match criterion {
        ChainCriterion::TrendD => trend_gain(z),
        ChainCriterion::Entropy => ln_one_minus_p2(z),
    }
}

/// Golden-section maximisation of a unimodal function on `[0, 1]`.
fn golden_max(f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..70 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

/// One multi-start state: increments along both axes, kept on the
/// full-budget simplex (their sums stay equal to the axis widths, which
/// is always optimal because every gain is increasing).
struct ChainState {
    ds: Vec<f64>,
    dt: Vec<f64>,
    alpha: f64,
    beta: f64,
    criterion: ChainCriterion,
}

impl ChainState {
    fn z(&self, i: usize) -> f64 {
        self.alpha * self.ds[i] + self.beta * self.dt[i]
    }

    fn objective(&self) -> f64 {
        csum((0..self.ds.len()).map(|i| chain_gain(self.z(i), self.criterion)))
    }

    /// Redistributes the budget of one coordinate pair on one axis by a
    /// golden-section line search; returns the objective improvement.
    fn transfer(&mut self, i: usize, j: usize, t_axis: bool) -> f64 {
        let (inc, rate) = if t_axis {
            (&self.dt, self.beta)
        } else {
            (&self.ds, self.alpha)
        };
        let total = inc[i] + inc[j];
        if total == 0.0 {
            return 0.0;
        }
        let other_i = self.z(i) - rate * inc[i];
        let other_j = self.z(j) - rate * inc[j];
        let criterion = self.criterion;
        let pair = |t: f64| {
            chain_gain(other_i + rate * t * total, criterion)
                + chain_gain(other_j + rate * (1.0 - t) * total, criterion)
        };
        let before = pair(inc[i] / total);
        let (t, after) = golden_max(pair);
        if after > before {
            let inc = if t_axis { &mut self.dt } else { &mut self.ds };
            inc[i] = t * total;
            inc[j] = (1.0 - t) * total;
            after - before
        } else {
            0.0
        }
    }

    fn sweep(&mut self, rng: &mut StdRng) -> f64 {
        let k1 = self.ds.len();
        let mut improved = 0.0;
        for t_axis in [false, true] {
            for i in 0..k1.saturating_sub(1) {
                improved += self.transfer(i, i + 1, t_axis);
            }
            if k1 >= 2 {
                for _ in 0..k1 {
                    let i = rng.gen_range(0..k1);
                    let j = rng.gen_range(0..k1);
                    if i != j {
                        improved += self.transfer(i, j, t_axis);
                    }
                }
            }
        }
        improved
    }
}

/// Strictly positive random spacings summing to `width` (a flat Dirichlet
/// draw scaled to the budget).
fn random_simplex(rng: &mut StdRng, len: usize, width: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x *= width / total;
    }
    v
}

/// Multi-start coordinate ascent over monotonic chains of `k` points.
///
/// Chains are anchored corner to corner: increments consume the full
/// axis budgets, which is optimal since both criteria increase in every
/// one-step exponent. Start 0 is the equal-increment diagonal (the
/// analytic optimum of the concave objective); the remaining starts are
/// random full-budget splits, so the report also certifies convergence
/// of the ascent itself. Results are deterministic for a fixed seed.
pub fn optimize_monotonic_chain(
    space: &DesignSpace,
    k: usize,
    params: &CovParams,
    criterion: ChainCriterion,
    seed: u64,
) -> Result<OptimizationReport, SolveError> {
    if k < 2 {
        return Err(SolveError::Domain("chains need at least two points"));
    }
    let outcomes: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..CHAIN_STARTS)
        .into_par_iter()
        .map(|start| {
            let mut rng = StdRng::seed_from_u64(
                seed.wrapping_add((start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let len = k - 1;
            let (ds, dt) = if start == 0 {
                (
                    vec![space.width_s() / len as f64; len],
                    vec![space.width_t() / len as f64; len],
                )
            } else {
                (
                    random_simplex(&mut rng, len, space.width_s()),
                    random_simplex(&mut rng, len, space.width_t()),
                )
            };
            let mut state = ChainState {
                ds,
                dt,
                alpha: params.alpha(),
                beta: params.beta(),
                criterion,
            };
            for _ in 0..CHAIN_MAX_SWEEPS {
                if state.sweep(&mut rng) < CHAIN_SWEEP_TOL {
                    break;
                }
            }
            (state.objective(), state.ds, state.dt)
        })
        .collect();
    let start_values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let (_, best) = outcomes
        .iter()
        .enumerate()
        .fold(None::<(f64, usize)>, |acc, (i, o)| match acc {
            Some((v, _)) if v >= o.0 => acc,
            _ => Some((o.0, i)),
        })
        .expect("at least one start");
    let (_, ds, dt) = &outcomes[best];
    let mut points = Vec::with_capacity(k);
    let (mut s, mut t) = (space.a1(), space.a2());
    points.push((s, t));
    for i in 0..k - 1 {
        s = (s + ds[i]).min(space.b1());
        t = (t + dt[i]).min(space.b2());
        points.push((s, t));
    }
    let best_chain =
        MonotonicChain::new(points, space).expect("ascent keeps every increment nonzero");
    let best_value = match criterion {
        ChainCriterion::TrendD => crate::fisher::m_theta_monotonic(&best_chain, params),
        ChainCriterion::Entropy => entropy_monotonic(&best_chain, params),
    };
    Ok(OptimizationReport {
        criterion,
        k,
        seed,
        starts: CHAIN_STARTS,
        best_value,
        best_chain,
        start_values,
    })
}

/// Lattice specification for a surface scan: inclusive linear ranges in
/// both scan variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl ScanGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        y_min: f64,
        y_max: f64,
        ny: usize,
    ) -> Result<Self, SolveError> {
        let ordered = x_min <= x_max && y_min <= y_max;
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !ordered || !finite || nx == 0 || ny == 0 {
            return Err(SolveError::Domain("scan ranges must be finite and ordered"));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            y_min,
            y_max,
            ny,
        })
    }

    fn coord(min: f64, max: f64, count: usize, i: usize) -> f64 {
        if count == 1 {
            min
        } else {
            min + (max - min) * i as f64 / (count - 1) as f64
        }
    }
}

/// Surfaces that can be tabulated over a two-variable lattice.
///
/// The first four scan over spacings `(d, delta)`; the last scans the
/// correlation rates `(alpha, beta)` (its lattice must stay positive) and
/// ignores the rates in `params`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScanObjective {
    /// `det m_r` on the unit-square grid `{0, d, 1} x {0, delta, 1}`.
    RestrictedRateDet,
    /// The joint criterion on the same restricted grid.
    RestrictedJointDet,
    /// `det m_r` for an equidistant `n x m` grid with free spacings.
    FreeRateDet { n: usize, m: usize },
    /// The joint free-spacing criterion for an `n x n` grid.
    FreeJointDet { n: usize },
    /// Trend information of the equidistant `n x m` grid with the given
    /// axis widths, as a function of the rates.
    TrendInfoOverRates {
        n: usize,
        m: usize,
        width_s: f64,
        width_t: f64,
    },
}

/// Tabulates an objective over the lattice, row-major in the first scan
/// variable; always returns `nx * ny` rows `(x, y, value)`.
pub fn surface_scan(
    objective: ScanObjective,
    params: &CovParams,
    grid: &ScanGrid,
) -> Vec<(f64, f64, f64)> {
    let mut rows = Vec::with_capacity(grid.nx * grid.ny);
    for i in 0..grid.nx {
        let x = ScanGrid::coord(grid.x_min, grid.x_max, grid.nx, i);
        for j in 0..grid.ny {
            let y = ScanGrid::coord(grid.y_min, grid.y_max, grid.ny, j);
            let value = match objective {
                ScanObjective::RestrictedRateDet => det_m_r_restricted33(x, y, params),
                ScanObjective::RestrictedJointDet => det_m_all_restricted33(x, y, params),
                ScanObjective::FreeRateDet { n, m } => det_m_r_equidistant(n, m, x, y, params),
                ScanObjective::FreeJointDet { n } => det_m_all_free_equidistant(n, n, x, y, params),
                ScanObjective::TrendInfoOverRates {
                    n,
                    m,
                    width_s,
                    width_t,
                } => {
                    let space =
                        DesignSpace::new(0.0, width_s, 0.0, width_t).expect("positive widths");
                    let rates = CovParams::new(x, y, params.sigma())
                        .expect("rate lattice must be positive");
                    let grid = make_equidistant_grid(&space, n, m).expect("n, m >= 2");
                    m_theta(&grid, &rates)
                }
            };
            rows.push((x, y, value));
        }
    }
    rows
}
