//! Small-sample statistics used by the Monte Carlo layer.

use statrs::distribution::{ContinuousCDF, Normal};

/// Sample mean and unbiased variance, shifted by the first value so a
/// constant input gives that constant and zero variance exactly.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let s = xs.len();
    if s == 0 {
        return (f64::NAN, f64::NAN);
    }
    let x0 = xs[0];
    let d: f64 = xs.iter().map(|x| x - x0).sum::<f64>() / s as f64;
    let mean = x0 + d;
    if s < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - x0 - d).powi(2)).sum::<f64>() / (s - 1) as f64;
    (mean, var)
}

/// Mean and its standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let (m, v) = mean_var(xs);
    (m, (v / xs.len() as f64).sqrt())
}

/// Standard error of the unbiased sample variance.
pub fn variance_stderr(xs: &[f64]) -> f64 {
    let s = xs.len() as f64;
    let (m, v) = mean_var(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / s;
    ((m4 - (s - 3.0) / (s - 1.0) * v * v) / s).max(0.0).sqrt()
}

/// Unbiased third and fourth cumulant estimators (k-statistics).
pub fn k_statistics(xs: &[f64]) -> (f64, f64) {
    let s = xs.len() as f64;
    let (m, _) = mean_var(xs);
    let moment = |k: i32| xs.iter().map(|x| (x - m).powi(k)).sum::<f64>() / s;
    let (m2, m3, m4) = (moment(2), moment(3), moment(4));
    let k3 = s * s / ((s - 1.0) * (s - 2.0)) * m3;
    let k4 = s * s * ((s + 1.0) * m4 - 3.0 * (s - 1.0) * m2 * m2) / ((s - 1.0) * (s - 2.0) * (s - 3.0));
    (k3, k4)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = intercept + slope·x`.
pub fn ols(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let k = x.len() as f64;
    let (mx, _) = mean_var(x);
    let (my, _) = mean_var(y);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let sigma2 = if k > 2.0 { sse / (k - 2.0) } else { 0.0 };
    let slope_stderr = (sigma2 / sxx).sqrt();
    let intercept_stderr = (sigma2 * (1.0 / k + mx * mx / sxx)).sqrt();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit { slope, intercept, slope_stderr, intercept_stderr, r2 }
}

/// Delete-one jackknife of a statistic over `s` samples. `stat(None)` is
/// the full-sample value, `stat(Some(i))` the value without sample `i`.
pub fn jackknife<F: Fn(Option<usize>) -> f64 + Sync>(s: usize, stat: F) -> (f64, f64) {
    use rayon::prelude::*;
    let full = stat(None);
    let loo: Vec<f64> = (0..s).into_par_iter().map(|i| stat(Some(i))).collect();
    let (m, _) = mean_var(&loo);
    let ss: f64 = loo.iter().map(|x| (x - m).powi(2)).sum();
    (full, ((s as f64 - 1.0) / s as f64 * ss).sqrt())
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Kolmogorov distance between the empirical law of `xs` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let s = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / s).max((i + 1) as f64 / s - f)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov distance of the standardized sample to N(0,1); `None` for a
/// degenerate (constant) sample.
pub fn ks_standardized(xs: &[f64]) -> Option<f64> {
    let (m, v) = mean_var(xs);
    if !(v > 0.0) {
        return None;
    }
    let sd = v.sqrt();
    let z: Vec<f64> = xs.iter().map(|x| (x - m) / sd).collect();
    Some(ks_statistic(&z, normal_cdf))
}

/// Upper end of the Wilson score interval for `k` successes in `n` trials.
pub fn wilson_upper(k: usize, n: usize, z: f64) -> f64 {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

/// `v[i+1] ≤ v[i] + k·sqrt(se_i² + se_{i+1}²)` for all consecutive pairs.
pub fn non_increasing_within(values: &[f64], stderrs: &[f64], k: f64) -> bool {
    values
        .windows(2)
        .zip(stderrs.windows(2))
        .all(|(v, s)| v[1] <= v[0] + k * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

/// `v[i+1] ≥ v[i] - k·sqrt(se_i² + se_{i+1}²)` for all consecutive pairs.
pub fn non_decreasing_within(values: &[f64], stderrs: &[f64], k: f64) -> bool {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    non_increasing_within(&neg, stderrs, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_have_exact_mean_and_zero_variance() {
        let xs = [0.1 + 0.2; 37];
        assert_eq!(mean_var(&xs), (0.1 + 0.2, 0.0));
    }

    #[test]
    fn ols_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|a| 2.0 - 0.5 * a).collect();
        let f = ols(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-14 && (f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jackknife_of_mean_is_classical_stderr() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let (m, se) = jackknife(xs.len(), |skip| {
            let v: Vec<f64> = xs.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|p| *p.1).collect();
            mean_var(&v).0
        });
        let (m2, se2) = mean_stderr(&xs);
        assert!((m - m2).abs() < 1e-14 && (se - se2).abs() < 1e-12);
    }

    #[test]
    fn ks_single_point() {
        assert!((ks_statistic(&[0.0], normal_cdf) - 0.5).abs() < 1e-15);
        assert_eq!(ks_standardized(&[2.0, 2.0]), None);
    }

    #[test]
    fn k_statistics_of_symmetric_pair_set() {
        let (k3, _) = k_statistics(&[-1.0, 0.0, 1.0, -2.0, 2.0]);
        assert!(k3.abs() < 1e-15);
    }

    #[test]
    fn wilson_bounds() {
        assert!(wilson_upper(0, 100, 1.96) > 0.0);
        assert!((wilson_upper(100, 100, 1.96) - 1.0).abs() < 1e-12);
        let u = wilson_upper(50, 100, 1.96);
        assert!(u > 0.5 && u < 0.61);
    }
}
