//! Randomised invariants tying the closed forms to the dense oracles and
//! to the structural facts they rely on (Kronecker factorisation, exact
//! tridiagonal inverses, equidistant optimality).

use nalgebra::DMatrix;
use proptest::prelude::*;

use ousheet::covariance::{
    chain_factor, correlation_factors, covariance_derivatives, dense_covariance,
};
use ousheet::design::{make_equidistant_grid, ChainDescriptor, GridDescriptor};
use ousheet::fisher::{m_r, m_theta, m_theta_monotonic};
use ousheet::oracle::{entropy_dense, fisher_trace, one_c_inv_one, BorderedKriging};
use ousheet::prediction::{entropy, entropy_monotonic, imspe, mspe};
use ousheet::{CovParams, DesignSpace, GridDesign, MonotonicChain};

/// Strictly increasing axis on `[0, 1]` built from positive raw spacings.
fn axis_from_raw(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    let mut axis = Vec::with_capacity(raw.len() + 1);
    axis.push(0.0);
    let mut acc = 0.0;
    for &r in raw {
        acc += r;
        axis.push(acc / total);
    }
    axis
}

fn raw_axis(len_range: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, len_range)
}

fn cov_params() -> impl Strategy<Value = CovParams> {
    (0.1..4.0f64, 0.1..4.0f64, 0.5..2.0f64).prop_map(|(a, b, s)| CovParams::new(a, b, s).unwrap())
}

fn unit_grid(raw_s: &[f64], raw_t: &[f64]) -> GridDesign {
    GridDesign::new(
        &DesignSpace::unit_square(),
        axis_from_raw(raw_s),
        axis_from_raw(raw_t),
    )
    .unwrap()
}

/// Monotonic chain from per-step increments; `mode` picks which axes move.
fn chain_from_steps(steps: &[(f64, f64, u8)]) -> MonotonicChain {
    let mut points = vec![(0.0, 0.0)];
    let (mut s, mut t) = (0.0, 0.0);
    for &(raw_s, raw_t, mode) in steps {
        let (ds, dt) = match mode % 3 {
            0 => (raw_s + 0.01, 0.0),
            1 => (0.0, raw_t + 0.01),
            _ => (raw_s + 0.01, raw_t + 0.01),
        };
        s += ds;
        t += dt;
        points.push((s, t));
    }
    let space = DesignSpace::new(0.0, s.max(0.02), 0.0, t.max(0.02)).unwrap();
    MonotonicChain::new(points, &space).unwrap()
}

proptest! {
    /// The dense covariance of a grid is the Kronecker product of the two
    /// axis correlation factors, scaled by the process variance.
    #[test]
    fn covariance_factorises_over_axes(
        raw_s in raw_axis(1..5),
        raw_t in raw_axis(1..5),
        params in cov_params(),
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        let (pf, qf) = correlation_factors(&grid, &params).unwrap();
        let kron = pf.dense().kronecker(&qf.dense()) * params.sigma2();
        let dense = dense_covariance(&grid.points_lexicographic(), &params).unwrap();
        let diff = (dense.matrix() - &kron).amax();
        prop_assert!(diff < 1e-14 * params.sigma2(), "max entry gap {diff}");
    }

    /// The analytic tridiagonal inverse of a correlation factor really
    /// inverts its dense form.
    #[test]
    fn tridiagonal_inverse_is_exact(
        raw in raw_axis(1..7),
        rate in 0.1..4.0f64,
    ) {
        let axis = axis_from_raw(&raw);
        let spacings: Vec<f64> = axis.windows(2).map(|w| w[1] - w[0]).collect();
        let factor =
            ousheet::covariance::CorrelationFactor::from_spacings(&spacings, rate).unwrap();
        let product = factor.inverse().to_dense() * factor.dense();
        let gap = (&product - DMatrix::<f64>::identity(factor.dim(), factor.dim())).amax();
        prop_assert!(gap < 1e-12, "inverse residual {gap}");
    }

    /// Restricted to a monotonic chain the sheet is Markov: the chain
    /// factor reproduces the dense covariance of the chain points.
    #[test]
    fn chain_restriction_is_markov(
        steps in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0u8..3), 1..7),
        params in cov_params(),
    ) {
        let chain = chain_from_steps(&steps);
        let factor = chain_factor(&chain, &params).unwrap();
        let dense = dense_covariance(chain.points(), &params).unwrap();
        let gap = (&(factor.dense() * params.sigma2()) - dense.matrix()).amax();
        prop_assert!(gap < 1e-13 * params.sigma2(), "chain covariance gap {gap}");
    }

    /// Grid descriptors survive a JSON round trip bit for bit.
    #[test]
    fn grid_descriptor_round_trip_is_bit_exact(
        raw_s in raw_axis(1..5),
        raw_t in raw_axis(1..5),
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        let text = serde_json::to_string(&GridDescriptor::from(grid.clone())).unwrap();
        let back = GridDesign::try_from(
            serde_json::from_str::<GridDescriptor>(&text).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(grid.s(), back.s());
        prop_assert_eq!(grid.t(), back.t());
        let again = serde_json::to_string(&GridDescriptor::from(back)).unwrap();
        prop_assert_eq!(text, again);
    }

    /// Chain descriptors survive a JSON round trip bit for bit.
    #[test]
    fn chain_descriptor_round_trip_is_bit_exact(
        steps in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0u8..3), 1..7),
    ) {
        let chain = chain_from_steps(&steps);
        let text = serde_json::to_string(&ChainDescriptor::from(chain.clone())).unwrap();
        let back = MonotonicChain::try_from(
            serde_json::from_str::<ChainDescriptor>(&text).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(chain.points(), back.points());
        let again = serde_json::to_string(&ChainDescriptor::from(back)).unwrap();
        prop_assert_eq!(text, again);
    }

    /// Kriging error is zero at the design points and nonnegative in
    /// between, and the closed form agrees with the bordered solve.
    #[test]
    fn mspe_vanishes_on_design_and_stays_nonnegative(
        raw_s in raw_axis(1..4),
        raw_t in raw_axis(1..4),
        params in cov_params(),
        x in 0.0..1.0f64,
        y in 0.0..1.0f64,
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        for &(s, t) in grid.points_lexicographic().iter() {
            let at_point = mspe(s, t, &grid, &params).unwrap();
            prop_assert!(at_point.abs() < 1e-10 * params.sigma2());
        }
        let value = mspe(x, y, &grid, &params).unwrap();
        prop_assert!(value >= -1e-12 * params.sigma2(), "negative MSPE {value}");
        let oracle = BorderedKriging::new(&grid.points_lexicographic(), &params)
            .unwrap()
            .mspe(x, y);
        prop_assert!((value - oracle).abs() < 1e-9 * params.sigma2());
    }

    /// The rate information matrix is positive semidefinite, so its
    /// determinant and diagonal cannot be negative.
    #[test]
    fn rate_information_is_positive_semidefinite(
        raw_s in raw_axis(1..6),
        raw_t in raw_axis(1..6),
        params in cov_params(),
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        let info = m_r(&grid, &params);
        prop_assert!(info.m_alpha >= 0.0);
        prop_assert!(info.m_beta >= 0.0);
        let det = info.det();
        prop_assert!(
            det >= -1e-12 * info.m_alpha * info.m_beta,
            "negative det {det}"
        );
    }

    /// Trend information, rate information and entropy all agree with
    /// their dense linear-algebra counterparts on random grids.
    #[test]
    fn closed_forms_agree_with_dense_oracles(
        raw_s in raw_axis(1..5),
        raw_t in raw_axis(1..5),
        params in cov_params(),
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        let pts = grid.points_lexicographic();
        let cov = dense_covariance(&pts, &params).unwrap();

        let trend_dense = one_c_inv_one(cov.matrix()).unwrap() * params.sigma2();
        let trend = m_theta(&grid, &params);
        prop_assert!((trend - trend_dense).abs() < 1e-10 * trend);

        let (da, db) = covariance_derivatives(&pts, &params);
        let rates_dense = fisher_trace(cov.matrix(), &da, &db).unwrap();
        let rates = m_r(&grid, &params);
        prop_assert!((rates.m_alpha - rates_dense.m_alpha).abs() < 1e-9 * rates.m_alpha);
        prop_assert!((rates.m_beta - rates_dense.m_beta).abs() < 1e-9 * rates.m_beta);
        prop_assert!(
            (rates.m_alphabeta - rates_dense.m_alphabeta).abs()
                < 1e-9 * rates.m_alphabeta.abs().max(1e-6)
        );

        let h_dense = entropy_dense(&pts, &params).unwrap();
        let h = entropy(&grid, &params);
        prop_assert!((h - h_dense).abs() < 1e-9 * h.abs().max(1.0));
    }

    /// Trend information lies between 1 (perfect correlation) and the
    /// number of observations (independence), on grids and chains alike.
    #[test]
    fn trend_information_respects_its_range(
        raw_s in raw_axis(1..6),
        raw_t in raw_axis(1..6),
        steps in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0u8..3), 1..8),
        params in cov_params(),
    ) {
        let grid = unit_grid(&raw_s, &raw_t);
        let nm = (grid.n() * grid.m()) as f64;
        let value = m_theta(&grid, &params);
        prop_assert!((1.0..=nm).contains(&value), "grid value {value}");

        let chain = chain_from_steps(&steps);
        let chain_value = m_theta_monotonic(&chain, &params);
        prop_assert!(
            chain_value >= 1.0 && chain_value <= chain.k() as f64,
            "chain value {chain_value}"
        );
    }

    /// Chain entropy matches the dense entropy of the chain points.
    #[test]
    fn chain_entropy_agrees_with_dense_oracle(
        steps in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0u8..3), 1..8),
        params in cov_params(),
    ) {
        let chain = chain_from_steps(&steps);
        let closed = entropy_monotonic(&chain, &params);
        let dense = entropy_dense(chain.points(), &params).unwrap();
        prop_assert!((closed - dense).abs() < 1e-9 * closed.abs().max(1.0));
    }

    /// Among grids sharing the same bounding box, the equidistant grid
    /// maximises trend information and entropy and minimises IMSPE.
    #[test]
    fn equidistant_grid_dominates_perturbations(
        raw_s in raw_axis(2..5),
        raw_t in raw_axis(2..5),
        params in cov_params(),
    ) {
        let perturbed = unit_grid(&raw_s, &raw_t);
        let eq = make_equidistant_grid(
            &DesignSpace::unit_square(),
            perturbed.n(),
            perturbed.m(),
        )
        .unwrap();

        let slack = 1e-12;
        let trend_gap = m_theta(&eq, &params) - m_theta(&perturbed, &params);
        prop_assert!(trend_gap >= -slack, "trend regressed by {trend_gap}");
        let entropy_gap = entropy(&eq, &params) - entropy(&perturbed, &params);
        prop_assert!(entropy_gap >= -slack, "entropy regressed by {entropy_gap}");
        let imspe_gap = imspe(&perturbed, &params) - imspe(&eq, &params);
        prop_assert!(imspe_gap >= -slack, "IMSPE regressed by {imspe_gap}");
    }
}
