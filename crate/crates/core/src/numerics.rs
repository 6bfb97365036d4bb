//! Log-domain scalars and truncated Taylor jets.
//!
//! Partition functions span thousands of orders of magnitude, so every
//! positive quantity in the dynamic programs is carried either as a
//! [`LogValue`] or, when derivatives in `h` are needed, as a [`ScaledJet`]:
//! a log scale plus Taylor coefficients normalized so that the constant
//! term is exactly one.

use std::ops::{Div, Mul};

use crate::error::{Error, Result};

/// Default truncation order for jets. Covers sixth-order cumulants with two
/// guard orders.
pub const DEFAULT_JET_ORDER: usize = 8;

/// A nonnegative real stored as its natural logarithm. `-inf` is the zero
/// state.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(Error::Numeric(format!("log magnitude {ln} is not admissible")));
        }
        Ok(LogValue(ln))
    }

    pub fn from_value(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Numeric(format!("{x} is not a finite nonnegative real")));
        }
        Ok(LogValue(x.ln()))
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    /// `exp(ln)`; may underflow to 0 or overflow to `inf`.
    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl serde::Serialize for LogValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::report::Real(self.ln()).serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for LogValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = crate::report::Real::deserialize(d)?;
        LogValue::from_ln(r.0).map_err(serde::de::Error::custom)
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            LogValue::ZERO
        } else {
            LogValue(self.0 + rhs.0)
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    /// Panics on division by the zero state.
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(!rhs.is_zero(), "division by zero LogValue");
        if self.is_zero() {
            LogValue::ZERO
        } else {
            LogValue(self.0 - rhs.0)
        }
    }
}

/// `log Σ exp(v_i)` against the running maximum. The empty sum is the zero
/// state.
pub fn log_sum_exp(values: &[LogValue]) -> Result<LogValue> {
    let mut acc = LogAccumulator::new();
    for v in values {
        if v.0.is_nan() {
            return Err(Error::Numeric("NaN in log_sum_exp".into()));
        }
        acc.add(v.0);
    }
    Ok(acc.finish())
}

/// Raw-`f64` variant of [`log_sum_exp`]; `-inf` entries are zeros.
pub fn log_sum_exp_ln(values: &[f64]) -> Result<f64> {
    let mut acc = LogAccumulator::new();
    for &v in values {
        if v.is_nan() {
            return Err(Error::Numeric("NaN in log_sum_exp".into()));
        }
        acc.add(v);
    }
    Ok(acc.finish().0)
}

/// `log((1/S) Σ exp(x_i))`. Returns the common value bit-for-bit when all
/// inputs are equal.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "log_mean_exp of empty slice");
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = values.iter().map(|&x| (x - m).exp()).sum();
    m + (s / values.len() as f64).ln()
}

/// Streaming log-sum-exp that rescales only when a new maximum arrives.
#[derive(Clone, Copy, Debug)]
pub struct LogAccumulator {
    max: f64,
    sum: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl LogAccumulator {
    pub fn new() -> Self {
        LogAccumulator { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, ln: f64) {
        if ln == f64::NEG_INFINITY {
            return;
        }
        if ln > self.max {
            self.sum = self.sum * (self.max - ln).exp() + 1.0;
            self.max = ln;
        } else {
            self.sum += (ln - self.max).exp();
        }
    }

    pub fn finish(self) -> LogValue {
        if self.max == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue(self.max + self.sum.ln())
        }
    }
}

/// Truncated Taylor expansion in `Δh` of a positive quantity:
/// `exp(scale) · Σ_k coeffs[k] Δh^k` with `coeffs[0] == 1`.
///
/// A scale of `-inf` is the zero jet (the identity for accumulation).
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledJet {
    scale: f64,
    coeffs: Vec<f64>,
}

/// How a weight depends on `h` when it multiplies a jet.
#[derive(Clone, Copy, Debug)]
pub enum JetWeight {
    /// Independent of `h`: contributes at order 0 only.
    Constant(LogValue),
    /// `exp(ln_value + rate·Δh)`; the Boltzmann factor `e^{h+ω}` has rate 1.
    Exponential { ln_value: f64, rate: f64 },
}

impl JetWeight {
    pub fn boltzmann(h: f64, omega: f64) -> Self {
        JetWeight::Exponential { ln_value: h + omega, rate: 1.0 }
    }

    fn ln_value(&self) -> f64 {
        match *self {
            JetWeight::Constant(v) => v.ln(),
            JetWeight::Exponential { ln_value, .. } => ln_value,
        }
    }
}

impl ScaledJet {
    /// Builds a jet from raw (unnormalized) coefficients; `coeffs[0]` must be
    /// positive.
    pub fn new(scale: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Numeric("jet needs at least one coefficient".into()));
        }
        let c0 = coeffs[0];
        if !(c0 > 0.0) || !c0.is_finite() || scale.is_nan() || scale == f64::INFINITY {
            return Err(Error::Numeric(format!("jet with zeroth coefficient {c0}, scale {scale}")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric("non-finite jet coefficient".into()));
        }
        let mut jet = ScaledJet { scale, coeffs };
        jet.normalize();
        Ok(jet)
    }

    pub fn zero(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        ScaledJet { scale: f64::NEG_INFINITY, coeffs }
    }

    pub fn one(order: usize) -> Self {
        let mut jet = Self::zero(order);
        jet.scale = 0.0;
        jet
    }

    /// `exp(ln_value + rate·Δh)` truncated at `order`.
    pub fn exponential(ln_value: f64, rate: f64, order: usize) -> Self {
        ScaledJet { scale: ln_value, coeffs: exp_series(rate, order) }
    }

    pub fn from_weight(weight: JetWeight, order: usize) -> Self {
        match weight {
            JetWeight::Constant(v) => {
                let mut j = Self::one(order);
                j.scale = v.ln();
                j
            }
            JetWeight::Exponential { ln_value, rate } => Self::exponential(ln_value, rate, order),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.scale == f64::NEG_INFINITY
    }

    fn normalize(&mut self) {
        let c0 = self.coeffs[0];
        if c0 != 1.0 {
            let inv = 1.0 / c0;
            for c in &mut self.coeffs {
                *c *= inv;
            }
            self.coeffs[0] = 1.0;
            self.scale += c0.ln();
        }
    }

    /// Truncated product of two jets of equal order.
    pub fn mul(&self, other: &ScaledJet) -> Result<ScaledJet> {
        check_order(self, other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(ScaledJet::zero(self.order()));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        convolve_into(&self.coeffs, &other.coeffs, &mut out);
        let mut jet = ScaledJet { scale: self.scale + other.scale, coeffs: out };
        jet.normalize();
        Ok(jet)
    }

    /// Multiplies in place by `exp(rate·Δh)`.
    pub fn shift_rate(&mut self, rate: f64) {
        let series = exp_series(rate, self.order());
        let mut out = vec![0.0; self.coeffs.len()];
        convolve_into(&self.coeffs, &series, &mut out);
        self.coeffs = out;
    }

    /// Value of the truncated series at `Δh`, in log scale.
    pub fn evaluate_ln(&self, dh: f64) -> f64 {
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * dh + c);
        self.scale + poly.ln()
    }

    /// Taylor coefficients of `log` of this jet; `[0]` is the scale.
    pub fn log_coefficients(&self) -> Vec<f64> {
        log_of_jet(self)
    }
}

fn check_order(a: &ScaledJet, b: &ScaledJet) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch { left: a.order(), right: b.order() });
    }
    Ok(())
}

/// `rate^k / k!` for `k = 0..=order`.
pub(crate) fn exp_series(rate: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut term = 1.0;
    out.push(term);
    for k in 1..=order {
        term *= rate / k as f64;
        out.push(term);
    }
    out
}

/// Truncated Cauchy product; `out.len()` sets the truncation.
#[inline]
pub(crate) fn convolve_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for (m, slot) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..=m {
            s += a[j] * b[m - j];
        }
        *slot = s;
    }
}

/// Returns `acc + weight·factor`, renormalized.
pub fn jet_mul_acc(acc: &ScaledJet, factor: &ScaledJet, weight: JetWeight) -> Result<ScaledJet> {
    check_order(acc, factor)?;
    let ln_w = weight.ln_value();
    if ln_w.is_nan() {
        return Err(Error::Numeric("NaN weight".into()));
    }
    if factor.is_zero() || ln_w == f64::NEG_INFINITY {
        return Ok(acc.clone());
    }
    let order = acc.order();
    let mut term = vec![0.0; order + 1];
    match weight {
        JetWeight::Constant(_) => term.copy_from_slice(&factor.coeffs),
        JetWeight::Exponential { rate, .. } => {
            convolve_into(&factor.coeffs, &exp_series(rate, order), &mut term)
        }
    }
    let term_scale = factor.scale + ln_w;
    if acc.is_zero() {
        let mut jet = ScaledJet { scale: term_scale, coeffs: term };
        jet.normalize();
        return Ok(jet);
    }
    let m = acc.scale.max(term_scale);
    let wa = (acc.scale - m).exp();
    let wt = (term_scale - m).exp();
    let coeffs: Vec<f64> = acc.coeffs.iter().zip(&term).map(|(a, t)| wa * a + wt * t).collect();
    let mut jet = ScaledJet { scale: m, coeffs };
    jet.normalize();
    Ok(jet)
}

/// Taylor coefficients `κ_0..κ_R` of `log` of the jet. `κ_0` is the scale;
/// `k!·κ_k` is the k-th cumulant when the jet carries a partition function.
pub fn log_of_jet(j: &ScaledJet) -> Vec<f64> {
    let c = &j.coeffs;
    let r = c.len() - 1;
    let mut b = vec![0.0; r + 1];
    b[0] = j.scale;
    for k in 1..=r {
        let mut s = 0.0;
        for i in 1..k {
            s += i as f64 * b[i] * c[k - i];
        }
        b[k] = c[k] - s / k as f64;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn log_sum_exp_examples() {
        let two = log_sum_exp(&[LogValue::ONE, LogValue::ONE]).unwrap();
        assert!((two.ln() - 2f64.ln()).abs() < 1e-15);
        assert!(log_sum_exp(&[]).unwrap().is_zero());
        let v = log_sum_exp(&[LogValue::from_ln(0.0).unwrap(), LogValue::from_ln(-800.0).unwrap()])
            .unwrap();
        assert_eq!(v.ln(), 0.0 + (-800f64).exp().ln_1p());
        assert!(LogValue::from_ln(f64::NAN).is_err());
        assert!(log_sum_exp_ln(&[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn zero_state_absorbs_and_is_identity() {
        let x = LogValue::from_value(3.0).unwrap();
        assert!((x * LogValue::ZERO).is_zero());
        let s = log_sum_exp(&[x, LogValue::ZERO]).unwrap();
        assert_eq!(s, x);
    }

    #[test]
    fn log_mean_exp_is_exact_on_constants() {
        let xs = vec![-1234.5678; 977];
        assert_eq!(log_mean_exp(&xs), -1234.5678);
    }

    #[test]
    fn jet_square_of_linear() {
        let lin = ScaledJet::new(0.0, vec![1.0, 1.0, 0.0]).unwrap();
        let sq = lin.mul(&lin).unwrap();
        assert_eq!(sq.coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn boltzmann_weight_jet() {
        let acc = ScaledJet::zero(3);
        let j = jet_mul_acc(&acc, &ScaledJet::one(3), JetWeight::boltzmann(0.3, -0.1)).unwrap();
        assert!((j.scale() - 0.2).abs() < 1e-15);
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in j.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn order_mismatch_rejected() {
        let a = ScaledJet::one(2);
        let b = ScaledJet::one(3);
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch { .. })));
        assert!(jet_mul_acc(&a, &b, JetWeight::Constant(LogValue::ONE)).is_err());
    }

    fn naive_poly_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    #[test]
    fn random_degree_four_products_match_naive_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a: Vec<f64> = (0..5).map(|k| if k == 0 { 1.0 } else { rng.random_range(-2.0..2.0) }).collect();
            let b: Vec<f64> = (0..5).map(|k| if k == 0 { 1.0 } else { rng.random_range(-2.0..2.0) }).collect();
            let ja = ScaledJet::new(0.0, a.clone()).unwrap();
            let jb = ScaledJet::new(0.0, b.clone()).unwrap();
            let prod = ja.mul(&jb).unwrap();
            let want = naive_poly_mul(&a, &b, 5);
            for (x, y) in prod.coeffs().iter().zip(&want) {
                assert!((x - y).abs() <= 1e-13 * y.abs().max(1.0));
            }
            // acc + weight·factor with a constant weight is a plain sum
            let w = rng.random_range(0.1..3.0);
            let sum = jet_mul_acc(&ja, &jb, JetWeight::Constant(LogValue::from_value(w).unwrap()))
                .unwrap();
            let total0 = 1.0 + w;
            for k in 0..5 {
                let want = (a[k] + w * b[k]) / total0;
                assert!((sum.coeffs()[k] - want).abs() < 1e-13);
            }
            assert!((sum.scale() - total0.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn log_of_linear_jet_is_log1p_series() {
        let j = ScaledJet::new(0.0, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = log_of_jet(&j);
        let want = [0.0, 1.0, -0.5, 1.0 / 3.0];
        for (x, y) in b.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn log_of_exponential_jet_is_linear() {
        let j = ScaledJet::exponential(2.5, -1.75, 8);
        let b = log_of_jet(&j);
        assert_eq!(b[0], 2.5);
        assert!((b[1] + 1.75).abs() < 1e-15);
        for x in &b[2..] {
            assert!(x.abs() < 1e-13);
        }
    }

    /// Fourth-order central differences at step 1e-3.
    fn central_derivs(f: impl Fn(f64) -> f64, step: f64) -> [f64; 3] {
        let v = |k: f64| f(k * step);
        let d1 = (-v(2.0) + 8.0 * v(1.0) - 8.0 * v(-1.0) + v(-2.0)) / (12.0 * step);
        let d2 = (-v(2.0) + 16.0 * v(1.0) - 30.0 * v(0.0) + 16.0 * v(-1.0) - v(-2.0))
            / (12.0 * step * step);
        let d3 = (-v(3.0) + 8.0 * v(2.0) - 13.0 * v(1.0) + 13.0 * v(-1.0) - 8.0 * v(-2.0) + v(-3.0))
            / (8.0 * step.powi(3));
        [d1, d2, d3]
    }

    #[test]
    fn log_of_jet_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c: Vec<f64> =
                (0..5).map(|k| if k == 0 { 1.0 } else { rng.random_range(0.1..1.0) }).collect();
            let j = ScaledJet::new(0.0, c.clone()).unwrap();
            let b = log_of_jet(&j);
            let logp = |x: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck).ln();
            let d = central_derivs(logp, 1e-3);
            let fact = [1.0, 2.0, 6.0];
            for k in 0..3 {
                let want = d[k] / fact[k];
                assert!(
                    (b[k + 1] - want).abs() <= 1e-5 * want.abs(),
                    "k={} jet={} fd={}",
                    k + 1,
                    b[k + 1],
                    want
                );
            }
        }
    }

    proptest! {
        #[test]
        fn log_sum_exp_permutation_invariant(
            mut xs in proptest::collection::vec(-700.0f64..700.0, 0..40),
            seed in any::<u64>(),
        ) {
            let vals: Vec<LogValue> = xs.iter().map(|&x| LogValue::from_ln(x).unwrap()).collect();
            let a = log_sum_exp(&vals).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..xs.len()).rev() {
                let j = rng.random_range(0..=i);
                xs.swap(i, j);
            }
            let vals: Vec<LogValue> = xs.iter().map(|&x| LogValue::from_ln(x).unwrap()).collect();
            let b = log_sum_exp(&vals).unwrap();
            if a.is_zero() {
                prop_assert!(b.is_zero());
            } else {
                prop_assert!((a.ln() - b.ln()).abs() <= 1e-12);
            }
        }

        #[test]
        fn accumulation_order_does_not_matter(
            terms in proptest::collection::vec(
                (-50.0f64..50.0, proptest::collection::vec(-1.0f64..1.0, 4), -2.0f64..2.0),
                1..12,
            ),
        ) {
            let jets: Vec<(ScaledJet, JetWeight)> = terms
                .iter()
                .map(|(s, c, rate)| {
                    let mut coeffs = vec![1.0];
                    coeffs.extend_from_slice(c);
                    (
                        ScaledJet::new(*s, coeffs).unwrap(),
                        JetWeight::Exponential { ln_value: -s / 2.0, rate: *rate },
                    )
                })
                .collect();
            let mut fwd = ScaledJet::zero(4);
            for (j, w) in &jets {
                fwd = jet_mul_acc(&fwd, j, *w).unwrap();
            }
            let mut rev = ScaledJet::zero(4);
            for (j, w) in jets.iter().rev() {
                rev = jet_mul_acc(&rev, j, *w).unwrap();
            }
            prop_assert!((fwd.scale() - rev.scale()).abs() <= 1e-10 * fwd.scale().abs().max(1.0));
            for (a, b) in fwd.coeffs().iter().zip(rev.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            }
        }

        #[test]
        fn log_inverts_exponential(c in -20.0f64..20.0, s in -100.0f64..100.0) {
            let b = log_of_jet(&ScaledJet::exponential(s, c, 6));
            prop_assert_eq!(b[0], s);
            prop_assert!((b[1] - c).abs() <= 1e-12 * c.abs().max(1.0));
            for x in &b[2..] {
                prop_assert!(x.abs() <= 1e-9 * c.abs().max(1.0).powi(6));
            }
        }
    }
}
