//! Brute-force ground truth for small systems.
//!
//! Configurations are subsets of `{1..n}` containing `n`, stored as bit
//! masks with bit `a - 1` set when `a` is a contact.

use crate::error::{Error, Result};
use crate::model::InterArrivalLaw;
use crate::numerics::{log_sum_exp_ln, LogValue};

/// Largest `n` accepted by the enumerators.
pub const ORACLE_MAX_N: usize = 16;

/// One renewal configuration on `{0..n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub n: usize,
    pub mask: u32,
}

impl Configuration {
    /// `X_a`; `X_0 = 1`.
    pub fn x(&self, a: usize) -> bool {
        a == 0 || (a <= self.n && self.mask >> (a - 1) & 1 == 1)
    }

    /// `L_n`.
    pub fn contacts(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Contact sites in increasing order, `S_1 < … < S_{L_n} = n`.
    pub fn sites(&self) -> Vec<usize> {
        (1..=self.n).filter(|&a| self.x(a)).collect()
    }

    /// Inter-arrival gaps `T_1..T_{L_n}`.
    pub fn gaps(&self) -> Vec<usize> {
        let mut prev = 0;
        self.sites()
            .into_iter()
            .map(|s| {
                let t = s - prev;
                prev = s;
                t
            })
            .collect()
    }

    /// `M_n`, the longest gap.
    pub fn max_gap(&self) -> usize {
        self.gaps().into_iter().max().unwrap_or(0)
    }
}

/// Every configuration of a system of size `n ≤ 16` with its log weight.
#[derive(Clone, Debug)]
pub struct PathSet {
    n: usize,
    configs: Vec<(Configuration, f64)>,
}

impl PathSet {
    pub fn enumerate(law: &InterArrivalLaw, h: f64, omega: &[f64], n: usize) -> Result<Self> {
        if n > ORACLE_MAX_N {
            return Err(Error::OracleTooLarge { n, max: ORACLE_MAX_N });
        }
        if n > law.n_max() {
            return Err(Error::HorizonExceeded { n, n_max: law.n_max() });
        }
        if omega.len() < n {
            return Err(Error::ShortDisorder { len: omega.len(), n });
        }
        if n == 0 {
            return Ok(PathSet { n, configs: vec![(Configuration { n, mask: 0 }, 0.0)] });
        }
        let top = 1u32 << (n - 1);
        let configs = (0..top)
            .map(|interior| {
                let c = Configuration { n, mask: interior | top };
                let mut lw = 0.0;
                let mut prev = 0;
                for s in c.sites() {
                    lw += law.log_p(s - prev) + h + omega[s - 1];
                    prev = s;
                }
                (c, lw)
            })
            .collect();
        Ok(PathSet { n, configs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Configuration, f64)> {
        self.configs.iter()
    }

    pub fn log_partition(&self) -> f64 {
        let w: Vec<f64> = self.configs.iter().map(|c| c.1).collect();
        log_sum_exp_ln(&w).expect("finite weights")
    }

    /// `E_{n,h,ω}[F]`.
    pub fn expectation<F: Fn(&Configuration) -> f64>(&self, f: F) -> f64 {
        let lz = self.log_partition();
        self.configs.iter().map(|(c, lw)| (lw - lz).exp() * f(c)).sum()
    }

    /// `E^{⊗2}[F(X, X')]` over independent pairs.
    pub fn pair_expectation<F: Fn(&Configuration, &Configuration) -> f64>(&self, f: F) -> f64 {
        let lz = self.log_partition();
        let mut s = 0.0;
        for (c1, w1) in &self.configs {
            let p1 = (w1 - lz).exp();
            for (c2, w2) in &self.configs {
                s += p1 * (w2 - lz).exp() * f(c1, c2);
            }
        }
        s
    }

    /// `E^{⊗2}[Π_{0<k<n}(1 - X_k X'_k)]`.
    ///
    /// Sums the second replica over subsets of the first replica's
    /// complement with a subset-sum transform, `O(2^n n)`.
    pub fn avoidance(&self) -> f64 {
        if self.n <= 1 {
            return 1.0;
        }
        let m = self.n - 1;
        let lz = self.log_partition();
        let interior = (1u32 << m) - 1;
        let mut sub = vec![0.0; 1 << m];
        for (c, w) in &self.configs {
            sub[(c.mask & interior) as usize] = (w - lz).exp();
        }
        for bit in 0..m {
            for s in 0..(1usize << m) {
                if s >> bit & 1 == 1 {
                    sub[s] += sub[s ^ (1 << bit)];
                }
            }
        }
        self.configs
            .iter()
            .map(|(c, w)| (w - lz).exp() * sub[(!c.mask & interior) as usize])
            .sum()
    }
}

pub fn enumerate_partition(law: &InterArrivalLaw, h: f64, omega: &[f64], n: usize) -> Result<LogValue> {
    LogValue::from_ln(PathSet::enumerate(law, h, omega, n)?.log_partition())
}

pub fn enumerate_expectation<F: Fn(&Configuration) -> f64>(
    law: &InterArrivalLaw,
    h: f64,
    omega: &[f64],
    n: usize,
    functional: F,
) -> Result<f64> {
    Ok(PathSet::enumerate(law, h, omega, n)?.expectation(functional))
}

/// `a_j` for `j = 1..=J` on the window starting at `i`, each by its own
/// enumeration.
pub fn enumerate_avoidance(law: &InterArrivalLaw, h: f64, omega: &[f64], i: usize, window: usize) -> Result<Vec<f64>> {
    (1..=window)
        .map(|j| Ok(PathSet::enumerate(law, h, &omega[i..], j)?.avoidance()))
        .collect()
}

/// Free energy of the pure model: the `f ≥ 0` solving
/// `e^h Σ_t p(t) e^{-f t} = 1`, or 0 when no positive root exists.
pub fn pure_model_free_energy(law: &InterArrivalLaw, h: f64) -> Result<f64> {
    let g = |f: f64| h + law.log_laplace(f);
    let g0 = g(0.0);
    if g0.is_nan() {
        return Err(Error::NoConvergence(format!("generating function undefined at h = {h}")));
    }
    if g0 <= 0.0 {
        return Ok(0.0);
    }
    let mass = law.log_laplace(0.0);
    let mut lo = 0.0;
    let mut hi = (h + mass.max(0.0)).max(0.0) + 1.0;
    if !(g(hi) < 0.0) {
        return Err(Error::NoConvergence(format!("no sign change below f = {hi}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EllSpec;

    #[test]
    fn toy_values() {
        let law = InterArrivalLaw::from_table(&[0.5, 0.25]).unwrap();
        let z = enumerate_partition(&law, 0.0, &[0.0, 0.0], 2).unwrap();
        assert!((z.ln() + 2f64.ln()).abs() < 1e-15);
        let x1 = enumerate_expectation(&law, 0.0, &[0.0, 0.0], 2, |c| c.x(1) as u8 as f64).unwrap();
        assert!((x1 - 0.5).abs() < 1e-15);
        let one = enumerate_expectation(&law, 0.3, &[0.1, -0.4], 2, |_| 1.0).unwrap();
        assert!((one - 1.0).abs() < 1e-15);
        let single = enumerate_partition(&law, 0.7, &[0.2], 1).unwrap();
        assert!((single.ln() - (0.9 + 0.5f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn configuration_count_and_size_cap() {
        let law = InterArrivalLaw::power_law(1.0, EllSpec::Constant { c: 1.0 }, 32, true).unwrap();
        let ps = PathSet::enumerate(&law, 0.0, &[0.0; 10], 10).unwrap();
        assert_eq!(ps.len(), 512);
        assert!(ps.iter().all(|(c, _)| c.x(10)));
        assert!(matches!(
            PathSet::enumerate(&law, 0.0, &[0.0; 17], 17),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn avoidance_transform_matches_double_sum() {
        let law = InterArrivalLaw::power_law(1.0, EllSpec::Constant { c: 1.0 }, 32, true).unwrap();
        let omega = [0.3, -1.1, 0.5, 0.9, -0.2, 0.4, 1.3];
        let ps = PathSet::enumerate(&law, 0.4, &omega, 7).unwrap();
        let direct = ps.pair_expectation(|a, b| (1..7).all(|k| !(a.x(k) && b.x(k))) as u8 as f64);
        assert!((ps.avoidance() - direct).abs() < 1e-14);
    }

    #[test]
    fn geometric_pure_free_energy() {
        let law = InterArrivalLaw::geometric(0.5, 256).unwrap();
        assert!(pure_model_free_energy(&law, 0.0).unwrap().abs() < 1e-12);
        let f = pure_model_free_energy(&law, 3f64.ln()).unwrap();
        assert!((f - 2f64.ln()).abs() < 1e-10, "{f}");
        assert_eq!(pure_model_free_energy(&law, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn pure_free_energy_is_monotone_convex_and_above_trivial_bound() {
        let law = InterArrivalLaw::power_law(1.0, EllSpec::Constant { c: 1.0 }, 4096, true).unwrap();
        let hs: Vec<f64> = (0..41).map(|i| -1.0 + 0.1 * i as f64).collect();
        let fs: Vec<f64> = hs.iter().map(|&h| pure_model_free_energy(&law, h).unwrap()).collect();
        for w in fs.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        for w in fs.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-8);
        }
        for (h, f) in hs.iter().zip(&fs) {
            assert!(*f >= (h + law.log_p(1)).max(0.0) - 1e-12);
        }
    }
}
