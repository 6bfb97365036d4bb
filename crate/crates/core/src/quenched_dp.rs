//! Exact dynamic programs for a fixed system `(law, h, ω, n)`.
//!
//! Everything is built on the renewal recursion
//! `Z_{0,k} = Σ_{t=1..k} Z_{0,k-t} p(t) e^{h+ω_k}` and on segment partition
//! functions `Z_{[i,j]}`, which are the same recursion run on the charges
//! `ω_{i+1}..ω_j`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InterArrivalLaw;
use crate::numerics::{convolve_into, exp_series, log_of_jet, LogAccumulator, LogValue, ScaledJet};

pub use crate::numerics::DEFAULT_JET_ORDER;

/// Largest `n` for which [`QuenchedSystem::contact_law`] runs without an
/// explicit override.
pub const DEFAULT_CONTACT_LAW_CAP: usize = 2048;

/// Default window for segment tables.
pub const DEFAULT_WINDOW: usize = 128;

/// A fixed system with its prefix and suffix log-partition tables.
#[derive(Clone, Debug)]
pub struct QuenchedSystem<'a> {
    law: &'a InterArrivalLaw,
    h: f64,
    omega: Vec<f64>,
    n: usize,
    /// `log Z_{0,k}`, `k = 0..=n`.
    prefix: Vec<f64>,
    /// `log Z_{[a,n]}`, `a = 0..=n`, filled on first use.
    suffix: OnceLock<Vec<f64>>,
}

/// Builds the system and fills the prefix table (`O(n²)`); the suffix
/// table is built on first use.
pub fn log_partition<'a>(law: &'a InterArrivalLaw, h: f64, omega: &[f64], n: usize) -> Result<QuenchedSystem<'a>> {
    QuenchedSystem::new(law, h, omega, n)
}

impl<'a> QuenchedSystem<'a> {
    pub fn new(law: &'a InterArrivalLaw, h: f64, omega: &[f64], n: usize) -> Result<Self> {
        if n > law.n_max() {
            return Err(Error::HorizonExceeded { n, n_max: law.n_max() });
        }
        if omega.len() < n {
            return Err(Error::ShortDisorder { len: omega.len(), n });
        }
        if !h.is_finite() || omega[..n].iter().any(|w| !w.is_finite()) {
            return Err(Error::Numeric("non-finite h or charge".into()));
        }
        let omega = omega[..n].to_vec();
        let lp = law.log_p_table();

        let mut prefix = vec![0.0; n + 1];
        for k in 1..=n {
            let mut acc = LogAccumulator::new();
            for t in 1..=k {
                acc.add(prefix[k - t] + lp[t - 1]);
            }
            prefix[k] = acc.finish().ln() + h + omega[k - 1];
        }

        Ok(QuenchedSystem { law, h, omega, n, prefix, suffix: OnceLock::new() })
    }

    pub fn law(&self) -> &'a InterArrivalLaw {
        self.law
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ω_1..ω_n`.
    pub fn charges(&self) -> &[f64] {
        &self.omega
    }

    /// `h + ω_a`, the log Boltzmann weight of a contact at `a ≥ 1`.
    #[inline]
    fn boltz(&self, a: usize) -> f64 {
        self.h + self.omega[a - 1]
    }

    pub fn log_z(&self) -> f64 {
        self.prefix[self.n]
    }

    /// `log Z⁻`: the terminal Boltzmann factor removed.
    pub fn log_z_minus(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.prefix[self.n] - self.boltz(self.n)
        }
    }

    /// `log Z_{0,k}` for `k = 0..=n`.
    pub fn prefix_log_z(&self) -> &[f64] {
        &self.prefix
    }

    /// `log Z_{[a,n]}` for `a = 0..=n`.
    pub fn suffix_log_z(&self) -> &[f64] {
        self.suffix.get_or_init(|| {
            let n = self.n;
            let lp = self.law.log_p_table();
            let mut suffix = vec![0.0; n + 1];
            for a in (0..n).rev() {
                let mut acc = LogAccumulator::new();
                for t in 1..=n - a {
                    acc.add(lp[t - 1] + self.boltz(a + t) + suffix[a + t]);
                }
                suffix[a] = acc.finish().ln();
            }
            suffix
        })
    }

    /// `log Z⁻_{0,k}` for `k = 1..=n` (index `k`; entry 0 is 0).
    pub fn prefix_log_z_minus(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| if k == 0 { 0.0 } else { self.prefix[k] - self.boltz(k) })
            .collect()
    }

    /// `log Z_{[i,i+m]}` for `m = 0..=len`.
    pub fn segment_prefix(&self, i: usize, len: usize) -> Vec<f64> {
        assert!(i + len <= self.n, "segment exceeds system");
        let lp = self.law.log_p_table();
        let mut z = vec![0.0; len + 1];
        for m in 1..=len {
            let mut acc = LogAccumulator::new();
            for t in 1..=m {
                acc.add(z[m - t] + lp[t - 1]);
            }
            z[m] = acc.finish().ln() + self.boltz(i + m);
        }
        z
    }

    /// `log Z_{[i,j]}` by a direct forward recursion, `O((j-i)²)`.
    pub fn segment_log_z(&self, i: usize, j: usize) -> Result<f64> {
        if i > j || j > self.n {
            return Err(Error::OutOfRange(format!("segment [{i},{j}] in system of size {}", self.n)));
        }
        if i == 0 {
            return Ok(self.prefix[j]);
        }
        if j == self.n {
            return Ok(self.suffix_log_z()[i]);
        }
        Ok(self.segment_prefix(i, j - i)[j - i])
    }

    /// All `log Z_{[i,j]}` with `j - i ≤ window`.
    pub fn segment_partitions(&self, window: usize) -> Result<SegmentTable> {
        if window > self.n {
            return Err(Error::OutOfRange(format!("window {window} exceeds n = {}", self.n)));
        }
        let mut offsets = Vec::with_capacity(self.n + 1);
        let mut data = Vec::new();
        for i in 0..=self.n {
            offsets.push(data.len());
            let len = window.min(self.n - i);
            data.extend(self.segment_prefix(i, len));
        }
        offsets.push(data.len());
        Ok(SegmentTable { window, n: self.n, offsets, data })
    }

    fn check_site(&self, a: usize) -> Result<()> {
        if a > self.n {
            return Err(Error::OutOfRange(format!("site {a} outside 0..={}", self.n)));
        }
        Ok(())
    }

    /// `E[X_a]`.
    pub fn contact_probability(&self, a: usize) -> Result<f64> {
        self.check_site(a)?;
        if a == 0 || a == self.n {
            return Ok(1.0);
        }
        Ok((self.prefix[a] + self.suffix_log_z()[a] - self.prefix[self.n]).exp().min(1.0))
    }

    /// `E[Π X_s]` over a set of sites (duplicates collapse since `X² = X`).
    pub fn joint_contact_probability(&self, sites: &[usize]) -> Result<f64> {
        let mut s = sites.to_vec();
        s.sort_unstable();
        s.dedup();
        for &a in &s {
            self.check_site(a)?;
        }
        if s.is_empty() {
            return Ok(1.0);
        }
        let mut ln = self.prefix[s[0]] + self.suffix_log_z()[*s.last().unwrap()] - self.prefix[self.n];
        for w in s.windows(2) {
            ln += self.segment_log_z(w[0], w[1])?;
        }
        Ok(ln.exp().min(1.0))
    }

    /// `cov[X_a, X_b]` for `a ≤ b`.
    pub fn contact_covariance(&self, a: usize, b: usize) -> Result<f64> {
        if a > b {
            return Err(Error::OutOfRange(format!("covariance needs a <= b, got ({a}, {b})")));
        }
        self.check_site(b)?;
        let pa = self.contact_probability(a)?;
        if a == b {
            return Ok(pa * (1.0 - pa));
        }
        let pb = self.contact_probability(b)?;
        let pab = self.joint_contact_probability(&[a, b])?;
        Ok(pab - pa * pb)
    }

    /// Same as [`contact_covariance`](Self::contact_covariance), reading
    /// `Z_{[a,b]}` from a segment table.
    pub fn contact_covariance_with(&self, table: &SegmentTable, a: usize, b: usize) -> Result<f64> {
        if a > b {
            return Err(Error::OutOfRange(format!("covariance needs a <= b, got ({a}, {b})")));
        }
        self.check_site(b)?;
        let pa = self.contact_probability(a)?;
        if a == b {
            return Ok(pa * (1.0 - pa));
        }
        let seg = table
            .get(a, b)
            .ok_or_else(|| Error::OutOfRange(format!("segment [{a},{b}] outside table window")))?;
        let pb = self.contact_probability(b)?;
        let pab = (self.prefix[a] + seg + self.suffix_log_z()[b] - self.prefix[self.n]).exp().min(1.0);
        Ok(pab - pa * pb)
    }

    /// `q_k(t) = P_k[last gap = t]` for `t = 1..=k`, index `t - 1`.
    fn last_gap_weights(&self, k: usize, out: &mut Vec<f64>) {
        let lp = self.law.log_p_table();
        out.clear();
        let base = self.boltz(k) - self.prefix[k];
        out.extend((1..=k).map(|t| (self.prefix[k - t] + lp[t - 1] + base).exp()));
    }

    /// Exact law of `L_n`, capped at [`DEFAULT_CONTACT_LAW_CAP`].
    pub fn contact_law(&self) -> Result<ContactLaw> {
        self.contact_law_with_cap(DEFAULT_CONTACT_LAW_CAP)
    }

    /// Exact law of `L_n` by the `(position, count)` recursion, `O(n³)`.
    ///
    /// Rows are kept as probabilities `P_k[L_k = l]`; each row is a convex
    /// combination of earlier rows, so the recursion never cancels. Masses
    /// below the `f64` range are reported as the zero state.
    pub fn contact_law_with_cap(&self, cap: usize) -> Result<ContactLaw> {
        let n = self.n;
        if n > cap {
            return Err(Error::ContactLawCap { n, cap });
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        rows.push(vec![1.0]);
        let mut q = Vec::with_capacity(n);
        for k in 1..=n {
            self.last_gap_weights(k, &mut q);
            let mut row = vec![0.0; k + 1];
            for (ti, &w) in q.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let prev = &rows[k - ti - 1];
                for (dst, &src) in row[1..].iter_mut().zip(prev) {
                    *dst += w * src;
                }
            }
            rows.push(row);
        }
        let last = rows.pop().unwrap();
        let total: f64 = last.iter().sum();
        let log_pmf = last.iter().map(|&x| LogValue::from_ln((x / total).ln()).unwrap_or(LogValue::ZERO)).collect();
        Ok(ContactLaw { n, log_pmf })
    }

    /// `∂ʰ_k log Z` for `k = 1..=r_max` at the default jet order.
    pub fn cumulants(&self, r_max: usize) -> Result<CumulantVector> {
        self.cumulants_with_order(r_max, DEFAULT_JET_ORDER)
    }

    pub fn cumulants_with_order(&self, r_max: usize, order: usize) -> Result<CumulantVector> {
        Ok(self.prefix_cumulants(r_max, order)?.pop().unwrap())
    }

    /// Cumulants of `L_k` under `P_{k,h,ω}` for every prefix `k = 0..=n`.
    ///
    /// The recursion runs in jet arithmetic on `Z_{0,k}(h+Δ)`, re-centered
    /// at each step by `e^{-Δ·E_k[L_k]}` so that coefficients stay of the
    /// size of central moments rather than raw moments.
    pub fn prefix_cumulants(&self, r_max: usize, order: usize) -> Result<Vec<CumulantVector>> {
        if r_max > order {
            return Err(Error::OrderTooLarge { requested: r_max, available: order });
        }
        let n = self.n;
        let r1 = order + 1;
        let mut coeffs = vec![0.0; (n + 1) * r1];
        coeffs[0] = 1.0;
        let mut center = vec![0.0; n + 1];
        let mut out = Vec::with_capacity(n + 1);
        out.push(CumulantVector { r_max, kappa: vec![0.0; r_max] });

        let mut q = Vec::with_capacity(n);
        let mut acc = vec![0.0; r1];
        let mut shifted = vec![0.0; r1];
        for k in 1..=n {
            self.last_gap_weights(k, &mut q);
            acc.iter_mut().for_each(|c| *c = 0.0);
            let mut total = 0.0;
            for (ti, &w) in q.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let src = k - ti - 1;
                let jet = &coeffs[src * r1..(src + 1) * r1];
                let rate = center[src] - center[k - 1];
                if rate == 0.0 {
                    for (a, c) in acc.iter_mut().zip(jet) {
                        *a += w * c;
                    }
                } else {
                    convolve_into(jet, &exp_series(rate, order), &mut shifted);
                    for (a, c) in acc.iter_mut().zip(&shifted) {
                        *a += w * c;
                    }
                }
                total += w;
            }
            for a in acc.iter_mut() {
                *a /= total;
            }
            let drift = if order >= 1 { acc[1] } else { 0.0 };
            center[k] = center[k - 1] + 1.0 + drift;
            let dst = &mut coeffs[k * r1..(k + 1) * r1];
            if drift != 0.0 {
                convolve_into(&acc, &exp_series(-drift, order), dst);
                dst[0] = 1.0;
            } else {
                dst.copy_from_slice(&acc);
            }
            let jet = ScaledJet::new(self.prefix[k], dst.to_vec())?;
            let b = log_of_jet(&jet);
            let mut kappa = Vec::with_capacity(r_max);
            let mut fact = 1.0;
            for r in 1..=r_max {
                fact *= r as f64;
                kappa.push(if r == 1 { center[k] + b[1] } else { fact * b[r] });
            }
            out.push(CumulantVector { r_max, kappa });
        }
        Ok(out)
    }

    /// `E_k[L_k]` for every prefix `k = 0..=n`.
    pub fn prefix_mean_contacts(&self) -> Vec<f64> {
        self.prefix_cumulants(1, 1)
            .expect("order 1 is always available")
            .into_iter()
            .map(|c| c.kappa.first().copied().unwrap_or(0.0))
            .collect()
    }

    /// `a_1..a_J` from the window starting at 0, by the renormalized
    /// first-common-contact recursion.
    pub fn two_replica_avoidance(&self, table: &SegmentTable, window: usize) -> Result<AvoidanceSeries> {
        self.two_replica_avoidance_at(table, 0, window)
    }

    /// `a_j = E^{⊗2}_{j,h,ϑ^i ω}[Π_{k<j}(1 - X_k X'_k)]`, `j = 1..=J`, via
    /// `a_j = 1 - Σ_{m<j} a_m P_j[X_m]²`. Accurate to about `1e-16`
    /// absolute; see [`two_replica_avoidance_exact`](Self::two_replica_avoidance_exact)
    /// for deep tails.
    pub fn two_replica_avoidance_at(&self, table: &SegmentTable, i: usize, window: usize) -> Result<AvoidanceSeries> {
        self.check_window(table, i, window)?;
        let seg = |x: usize, y: usize| table.get(i + x, i + y).unwrap();
        let mut a = vec![0.0; window + 1];
        let mut undershoot: f64 = 0.0;
        if window >= 1 {
            a[1] = 1.0;
        }
        for j in 2..=window {
            let zj = seg(0, j);
            let mut s = 0.0;
            for m in 1..j {
                s += a[m] * (2.0 * (seg(0, m) + seg(m, j) - zj)).exp();
            }
            let v = 1.0 - s;
            if v < 0.0 {
                undershoot = undershoot.max(-v);
            }
            a[j] = v.clamp(0.0, 1.0);
        }
        a.remove(0);
        Ok(AvoidanceSeries { values: a, max_undershoot: undershoot })
    }

    /// Same quantity as [`two_replica_avoidance_at`](Self::two_replica_avoidance_at)
    /// as a sum of nonnegative terms: a pair-of-walkers recursion over the
    /// merged contact sets, `O(J³)`. Keeps full relative precision however
    /// small `a_j` gets.
    pub fn two_replica_avoidance_exact(&self, table: &SegmentTable, i: usize, window: usize) -> Result<Vec<f64>> {
        self.check_window(table, i, window)?;
        let jn = window;
        let lp = self.law.log_p_table();
        // q[w][x] = P_{[i,i+w]}[last gap starts at x], 0 ≤ x < w ≤ J
        let mut q = vec![0.0; (jn + 1) * (jn + 1)];
        for w in 1..=jn {
            let zw = table.get(i, i + w).unwrap();
            let bw = self.boltz(i + w);
            for x in 0..w {
                let zx = table.get(i, i + x).unwrap();
                q[w * (jn + 1) + x] = (zx + lp[w - x - 1] + bw - zw).exp();
            }
        }
        let qq = |w: usize, x: usize| q[w * (jn + 1) + x];
        // g[u][v]: leader at u, trailer at v < u, no common contact yet
        let mut g = vec![0.0; (jn + 1) * (jn + 1)];
        for w in 1..jn {
            g[w * (jn + 1)] = 2.0 * qq(w, 0);
        }
        for u in 1..jn {
            for v in 0..u {
                let guv = g[u * (jn + 1) + v];
                if guv == 0.0 {
                    continue;
                }
                for w in u + 1..jn {
                    g[w * (jn + 1) + v] += guv * qq(w, u);
                    g[w * (jn + 1) + u] += guv * qq(w, v);
                }
            }
        }
        let mut a = Vec::with_capacity(jn);
        for j in 1..=jn {
            let mut s = qq(j, 0) * qq(j, 0);
            for u in 1..j {
                for v in 0..u {
                    let guv = g[u * (jn + 1) + v];
                    if guv != 0.0 {
                        s += guv * qq(j, u) * qq(j, v);
                    }
                }
            }
            a.push(s.min(1.0));
        }
        Ok(a)
    }

    fn check_window(&self, table: &SegmentTable, i: usize, window: usize) -> Result<()> {
        if window > table.window() {
            return Err(Error::OutOfRange(format!(
                "avoidance window {window} exceeds segment window {}",
                table.window()
            )));
        }
        if i + window > self.n {
            return Err(Error::OutOfRange(format!("window [{i},{}] exceeds n = {}", i + window, self.n)));
        }
        Ok(())
    }

    /// `P[M_n ≤ m]`, `M_n` the longest excursion.
    pub fn max_excursion_cdf(&self, m: usize) -> Result<f64> {
        if m == 0 && self.n > 0 {
            return Err(Error::OutOfRange("excursion bound must be at least 1".into()));
        }
        if m >= self.n {
            return Ok(1.0);
        }
        let lp = self.law.log_p_table();
        let mut z = vec![0.0; self.n + 1];
        for k in 1..=self.n {
            let mut acc = LogAccumulator::new();
            for t in 1..=k.min(m) {
                acc.add(z[k - t] + lp[t - 1]);
            }
            z[k] = acc.finish().ln() + self.boltz(k);
        }
        Ok((z[self.n] - self.prefix[self.n]).exp().min(1.0))
    }

    /// Joint cumulant of `X_{a_1},…,X_{a_r}`, `r ≤ 4`, by the set-partition
    /// formula over moments.
    pub fn ursell(&self, sites: &[usize]) -> Result<f64> {
        let r = sites.len();
        if r == 0 || r > 4 {
            return Err(Error::OutOfRange(format!("ursell order must be 1..=4, got {r}")));
        }
        for &a in sites {
            if a == 0 || a > self.n {
                return Err(Error::OutOfRange(format!("site {a} outside 1..={}", self.n)));
            }
        }
        let mut moment = std::collections::HashMap::new();
        let mut total = 0.0;
        for partition in set_partitions(r) {
            let l = partition.len();
            let mut term = if l % 2 == 1 { 1.0 } else { -1.0 } * factorial(l - 1);
            for block in &partition {
                let mask: u32 = block.iter().map(|&b| 1u32 << b).sum();
                let m = match moment.get(&mask) {
                    Some(&v) => v,
                    None => {
                        let s: Vec<usize> = block.iter().map(|&b| sites[b]).collect();
                        let v = self.joint_contact_probability(&s)?;
                        moment.insert(mask, v);
                        v
                    }
                };
                term *= m;
            }
            total += term;
        }
        Ok(total)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// All set partitions of `{0..r}` as lists of blocks.
fn set_partitions(r: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::<Vec<usize>>::new()];
    for x in 0..r {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(x);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![x]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `log Z_{[i,j]}` for `0 ≤ j - i ≤ window`.
#[derive(Clone, Debug)]
pub struct SegmentTable {
    window: usize,
    n: usize,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl SegmentTable {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i > j || j > self.n || j - i > self.window {
            return None;
        }
        Some(self.data[self.offsets[i] + (j - i)])
    }
}

/// Two-replica avoidance probabilities `a_1..a_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceSeries {
    pub values: Vec<f64>,
    /// Largest negative excursion clamped away (round-off indicator).
    pub max_undershoot: f64,
}

impl AvoidanceSeries {
    pub fn warned(&self) -> bool {
        self.max_undershoot > 1e-9
    }
}

/// `P_{n,h,ω}[L_n = l]` for `l = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactLaw {
    pub n: usize,
    pub log_pmf: Vec<LogValue>,
}

impl ContactLaw {
    pub fn pmf(&self, l: usize) -> f64 {
        self.log_pmf.get(l).map_or(0.0, |v| v.value())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_pmf.iter().map(|v| v.value()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities().iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    /// `E[(L - mean)^k]`.
    pub fn central_moment(&self, k: i32) -> f64 {
        let m = self.mean();
        self.probabilities().iter().enumerate().map(|(l, p)| (l as f64 - m).powi(k) * p).sum()
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    /// First four cumulants from central moments.
    pub fn cumulants4(&self) -> [f64; 4] {
        let m2 = self.central_moment(2);
        let m3 = self.central_moment(3);
        let m4 = self.central_moment(4);
        [self.mean(), m2, m3, m4 - 3.0 * m2 * m2]
    }

    /// `P[L ≤ l]` for `l = 0..=n`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut s = 0.0;
        self.probabilities()
            .into_iter()
            .map(|p| {
                s += p;
                s.min(1.0)
            })
            .collect()
    }

    /// `P[|L - E L| > u]`.
    pub fn deviation_tail(&self, u: f64) -> f64 {
        let m = self.mean();
        self.probabilities().iter().enumerate().filter(|(l, _)| (*l as f64 - m).abs() > u).map(|(_, p)| p).sum()
    }

    /// `P[L < δ n]`.
    pub fn lower_fraction_probability(&self, delta: f64) -> f64 {
        let bound = delta * self.n as f64;
        self.probabilities().iter().enumerate().filter(|(l, _)| (*l as f64) < bound).map(|(_, p)| p).sum()
    }
}

/// `κ_k = ∂ʰ_k log Z`, `k = 1..=r_max` (stored at index `k - 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantVector {
    pub r_max: usize,
    pub kappa: Vec<f64>,
}

impl CumulantVector {
    /// `κ_k` for `1 ≤ k ≤ r_max`.
    pub fn get(&self, k: usize) -> f64 {
        self.kappa[k - 1]
    }
}
