//! Domain types for design spaces, grid designs, monotonic chains and model
//! parameters.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards, so they can be shared freely across parallel criterion
//! evaluations. Grids and chains (de)serialize through the JSON descriptors
//! `{"space":[a1,b1,a2,b2],"s":[...],"t":[...]}` and `{"chain":[[s,t],...]}`;
//! serialization uses shortest round-trip floats, so a descriptor survives a
//! round trip bit-identically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("design space bounds must be finite with b1 > a1 and b2 > a2")]
    InvalidBounds,
    #[error("a grid needs at least 2 points per direction, got {n} x {m}")]
    TooFewGridPoints { n: usize, m: usize },
    #[error("grid coordinates must be finite and strictly increasing")]
    NotStrictlyIncreasing,
    #[error("point ({s}, {t}) lies outside the design space")]
    OutOfBounds { s: f64, t: f64 },
    #[error("a chain needs at least 2 points, got {0}")]
    TooFewChainPoints(usize),
    #[error("chain coordinates must be nondecreasing in both components")]
    NotMonotonic,
    #[error("consecutive chain points coincide")]
    DegenerateChain,
    #[error("correlation decay rates and scale must be strictly positive and finite")]
    InvalidCovParams,
    #[error("Arrhenius trend requires finite mu and finite B >= 0")]
    InvalidTrend,
}

/// Compact rectangular design space `[a1, b1] x [a2, b2]`. The first
/// coordinate is the environment variable `s`, the second the temperature
/// `t` (only `t` enters the Arrhenius trend).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignSpace {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
}

impl DesignSpace {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self, DesignError> {
        let finite = [a1, b1, a2, b2].iter().all(|v| v.is_finite());
        if !finite || b1 <= a1 || b2 <= a2 {
            return Err(DesignError::InvalidBounds);
        }
        Ok(Self { a1, b1, a2, b2 })
    }

    pub fn unit_square() -> Self {
        Self {
            a1: 0.0,
            b1: 1.0,
            a2: 0.0,
            b2: 1.0,
        }
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn width_s(&self) -> f64 {
        self.b1 - self.a1
    }

    pub fn width_t(&self) -> f64 {
        self.b2 - self.a2
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        self.a1 <= s && s <= self.b1 && self.a2 <= t && t <= self.b2
    }
}

/// JSON descriptor for a grid design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub space: [f64; 4],
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

/// JSON descriptor for a monotonic chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainDescriptor {
    pub chain: Vec<[f64; 2]>,
}

/// Either kind of design descriptor; grids and chains are told apart by
/// their field names.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DesignDescriptor {
    Grid(GridDescriptor),
    Chain(ChainDescriptor),
}

/// An `n x m` grid design: abscissas `s_1 < ... < s_n` crossed with
/// ordinates `t_1 < ... < t_m`, all inside the owning design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDescriptor", into = "GridDescriptor")]
pub struct GridDesign {
    space: DesignSpace,
    s: Vec<f64>,
    t: Vec<f64>,
}

impl GridDesign {
    pub fn new(space: &DesignSpace, s: Vec<f64>, t: Vec<f64>) -> Result<Self, DesignError> {
        if s.len() < 2 || t.len() < 2 {
            return Err(DesignError::TooFewGridPoints {
                n: s.len(),
                m: t.len(),
            });
        }
        for axis in [&s, &t] {
            if !axis.iter().all(|v| v.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(DesignError::NotStrictlyIncreasing);
            }
        }
        for &si in &s {
            for &tj in &t {
                if !space.contains(si, tj) {
                    return Err(DesignError::OutOfBounds { s: si, t: tj });
                }
            }
        }
        Ok(Self {
            space: *space,
            s,
            t,
        })
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn m(&self) -> usize {
        self.t.len()
    }

    /// Directional distances between adjacent design points.
    pub fn spacings(&self) -> Spacings {
        Spacings {
            d: self.s.windows(2).map(|w| w[1] - w[0]).collect(),
            delta: self.t.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }

    /// Grid points in lexicographic (s-major) order, the ordering under
    /// which the covariance matrix is the Kronecker product of the two
    /// directional correlation factors.
    pub fn points_lexicographic(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.n() * self.m());
        for &si in &self.s {
            for &tj in &self.t {
                pts.push((si, tj));
            }
        }
        pts
    }
}

impl TryFrom<GridDescriptor> for GridDesign {
    type Error = DesignError;

    fn try_from(d: GridDescriptor) -> Result<Self, DesignError> {
        let [a1, b1, a2, b2] = d.space;
        GridDesign::new(&DesignSpace::new(a1, b1, a2, b2)?, d.s, d.t)
    }
}

impl From<GridDesign> for GridDescriptor {
    fn from(g: GridDesign) -> Self {
        GridDescriptor {
            space: [g.space.a1, g.space.b1, g.space.a2, g.space.b2],
            s: g.s,
            t: g.t,
        }
    }
}

/// The endpoint-inclusive directionally equidistant grid: `s_1 = a1`,
/// `s_n = b1`, `t_1 = a2`, `t_m = b2`, uniform spacing in each direction.
pub fn make_equidistant_grid(
    space: &DesignSpace,
    n: usize,
    m: usize,
) -> Result<GridDesign, DesignError> {
    if n < 2 || m < 2 {
        return Err(DesignError::TooFewGridPoints { n, m });
    }
    let axis = |a: f64, b: f64, k: usize| -> Vec<f64> {
        let step = (b - a) / (k - 1) as f64;
        (0..k)
            .map(|i| if i == k - 1 { b } else { a + step * i as f64 })
            .collect()
    };
    GridDesign::new(
        space,
        axis(space.a1, space.b1, n),
        axis(space.a2, space.b2, m),
    )
}

/// Directional distances `d_i = s_{i+1} - s_i`, `delta_j = t_{j+1} - t_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spacings {
    d: Vec<f64>,
    delta: Vec<f64>,
}

impl Spacings {
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}

/// A planar point sequence nondecreasing in both coordinates. Along such a
/// chain the sheet covariance is Markov: adjacent-distance exponents add up,
/// so the one-dimensional correlation-factor machinery applies verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainDescriptor", into = "ChainDescriptor")]
pub struct MonotonicChain {
    points: Vec<(f64, f64)>,
}

impl MonotonicChain {
    pub fn new(points: Vec<(f64, f64)>, space: &DesignSpace) -> Result<Self, DesignError> {
        let chain = Self::validated(points)?;
        for &(s, t) in &chain.points {
            if !space.contains(s, t) {
                return Err(DesignError::OutOfBounds { s, t });
            }
        }
        Ok(chain)
    }

    /// All invariants except the bounds check against an owning space.
    fn validated(points: Vec<(f64, f64)>) -> Result<Self, DesignError> {
        if points.len() < 2 {
            return Err(DesignError::TooFewChainPoints(points.len()));
        }
        if !points.iter().all(|&(s, t)| s.is_finite() && t.is_finite()) {
            return Err(DesignError::NotMonotonic);
        }
        for w in points.windows(2) {
            let ((s0, t0), (s1, t1)) = (w[0], w[1]);
            if s1 < s0 || t1 < t0 {
                return Err(DesignError::NotMonotonic);
            }
            if s1 == s0 && t1 == t0 {
                return Err(DesignError::DegenerateChain);
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    /// Nonnegative coordinate increments between consecutive points.
    pub fn increments(&self) -> Vec<(f64, f64)> {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1))
            .collect()
    }

    /// Tightest design space containing the chain.
    pub fn bounding_space(&self) -> DesignSpace {
        let (first, last) = (self.points[0], self.points[self.points.len() - 1]);
        // Monotonicity puts the extremes at the ends; widen degenerate sides
        // so the bounds stay a valid space.
        let pad = |a: f64, b: f64| if a < b { (a, b) } else { (a, a + 1.0) };
        let (a1, b1) = pad(first.0, last.0);
        let (a2, b2) = pad(first.1, last.1);
        DesignSpace { a1, b1, a2, b2 }
    }
}

impl TryFrom<ChainDescriptor> for MonotonicChain {
    type Error = DesignError;

    fn try_from(d: ChainDescriptor) -> Result<Self, DesignError> {
        // A descriptor carries no space; a valid chain is bounded by its own
        // endpoints, so only the intrinsic invariants are checked.
        MonotonicChain::validated(d.chain.iter().map(|p| (p[0], p[1])).collect())
    }
}

impl From<MonotonicChain> for ChainDescriptor {
    fn from(c: MonotonicChain) -> Self {
        ChainDescriptor {
            chain: c.points.iter().map(|&(s, t)| [s, t]).collect(),
        }
    }
}

/// Correlation decay rates and scale of the OU sheet covariance
/// `sigma^2 exp(-alpha|ds| - beta|dt|)`. The raw scale of the unmodified
/// sheet relates by `sigma = sigma_tilde / (2 sqrt(alpha beta))`; only
/// `sigma` is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
}

impl CovParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Result<Self, DesignError> {
        let ok = [alpha, beta, sigma]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !ok {
            return Err(DesignError::InvalidCovParams);
        }
        Ok(Self { alpha, beta, sigma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Scale of the driving sheet, `sigma_tilde = 2 sigma sqrt(alpha beta)`.
    pub fn sigma_tilde(&self) -> f64 {
        2.0 * self.sigma * (self.alpha * self.beta).sqrt()
    }
}

/// Trend of the observed field: either a constant `theta` or the modified
/// Arrhenius rate `eta(t) = t^{-mu} exp(-B/t)` (leading factor normalized
/// to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendModel {
    Constant { theta: f64 },
    Arrhenius { mu: f64, b: f64 },
}

impl TrendModel {
    pub fn constant(theta: f64) -> Result<Self, DesignError> {
        if !theta.is_finite() {
            return Err(DesignError::InvalidTrend);
        }
        Ok(Self::Constant { theta })
    }

    pub fn arrhenius(mu: f64, b: f64) -> Result<Self, DesignError> {
        if !(mu.is_finite() && b.is_finite() && b >= 0.0) {
            return Err(DesignError::InvalidTrend);
        }
        Ok(Self::Arrhenius { mu, b })
    }

    /// Trend value at temperature `t`.
    pub fn eta(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { theta } => theta,
            Self::Arrhenius { mu, b } => t.powf(-mu) * (-b / t).exp(),
        }
    }
}
