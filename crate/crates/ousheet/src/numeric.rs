//! Small numeric helpers shared by the closed-form criteria.

/// Neumaier compensated accumulator. The information sums run over up to a
/// few hundred terms spanning many orders of magnitude; plain summation
/// would eat into the 1e-9 oracle-agreement budget at the extremes.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub(crate) fn csum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Compensated::default();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// `(1 - p) / (1 + p)` for `p = exp(-z)`, i.e. `tanh(z/2)`, without forming
/// the cancellation-prone numerator.
pub(crate) fn trend_gain(z: f64) -> f64 {
    (0.5 * z).tanh()
}

/// `ln(1 - p^2)` for `p = exp(-z)`, evaluated as `ln(-expm1(-2z))` so small
/// `z` does not lose the leading digits of `1 - p^2`.
pub(crate) fn ln_one_minus_p2(z: f64) -> f64 {
    (-(-2.0 * z).exp_m1()).ln()
}

/// `1 - p^2` for `p = exp(-z)`; strictly positive for every `z > 0` in
/// contrast to `1.0 - p * p`, which rounds to zero once `z` is tiny.
pub(crate) fn one_minus_p2(z: f64) -> f64 {
    -(-2.0 * z).exp_m1()
}

/// Quadratic/bilinear form `u^T K^{-1} v` where `K` is the k x k Markov
/// correlation matrix built from adjacent correlations `p` (entries are
/// running products of `p`). Closed form via the tridiagonal inverse:
/// `u_k v_k + sum_i (u_i - p_i u_{i+1})(v_i - p_i v_{i+1}) / (1 - p_i^2)`.
/// `z` holds the exponents, so `p_i = exp(-z_i)` and the denominators stay
/// positive even when `p_i` rounds to 1.
pub(crate) fn markov_quadratic(z: &[f64], u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), z.len() + 1);
    debug_assert_eq!(v.len(), z.len() + 1);
    let mut acc = Compensated::default();
    acc.add(u[z.len()] * v[z.len()]);
    for (i, &zi) in z.iter().enumerate() {
        let p = (-zi).exp();
        let du = u[i] - p * u[i + 1];
        let dv = v[i] - p * v[i + 1];
        acc.add(du * dv / one_minus_p2(zi));
    }
    acc.value()
}
