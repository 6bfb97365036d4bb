//! Monte Carlo over disorder realizations.
//!
//! Every sample is an independent task seeded by `(master_seed, index)`;
//! results are collected and reduced in index order, so outputs do not
//! depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sample_disorder, DisorderLaw, DisorderSample, InterArrivalLaw};
use crate::numerics::{log_mean_exp, DEFAULT_JET_ORDER};
use crate::quenched_dp::{QuenchedSystem, DEFAULT_WINDOW};
use crate::stats::{self, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub law: InterArrivalLaw,
    pub disorder: DisorderLaw,
    pub h_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
    pub jet_order: usize,
    pub window: usize,
}

impl McConfig {
    pub fn new(law: InterArrivalLaw, disorder: DisorderLaw, h_values: Vec<f64>, n_values: Vec<usize>, samples: usize, master_seed: u64) -> Result<Self> {
        let cfg = McConfig {
            law,
            disorder,
            h_values,
            n_values,
            samples,
            master_seed,
            jet_order: DEFAULT_JET_ORDER,
            window: DEFAULT_WINDOW,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Config(format!("samples must be at least 2, got {}", self.samples)));
        }
        if self.h_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::Config("h and n grids must be nonempty".into()));
        }
        if !self.h_values.windows(2).all(|w| w[0] < w[1]) || !self.n_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("grids must be strictly increasing".into()));
        }
        if self.n_values[0] == 0 {
            return Err(Error::Config("system sizes must be positive".into()));
        }
        let n_max = *self.n_values.last().unwrap();
        if n_max > self.law.n_max() {
            return Err(Error::HorizonExceeded { n: n_max, n_max: self.law.n_max() });
        }
        Ok(())
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        McConfig { samples, ..self.clone() }
    }

    pub fn with_n_values(&self, n_values: Vec<usize>) -> Self {
        McConfig { n_values, ..self.clone() }
    }

    pub fn with_seed(&self, master_seed: u64) -> Self {
        McConfig { master_seed, ..self.clone() }
    }

    pub fn n_max(&self) -> usize {
        *self.n_values.last().unwrap()
    }

    pub fn sample(&self, index: usize, n: usize) -> DisorderSample {
        sample_disorder(&self.disorder, n, self.master_seed, index as u64)
    }

    /// Applies `f` to every sample of length `n`, in index order. A pure
    /// model is evaluated once and replicated.
    pub fn map_samples<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send + Clone,
        F: Fn(&DisorderSample) -> Result<T> + Sync,
    {
        if self.disorder.is_pure() {
            let v = f(&self.sample(0, n))?;
            return Ok(vec![v; self.samples]);
        }
        (0..self.samples).into_par_iter().map(|i| f(&self.sample(i, n))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    F,
    FAnnealed,
    Mu,
    MuLastGap,
    Rho,
    V,
    W,
    CenteringMean,
    KsCentering,
    KsQuenched,
    DecayGamma,
    DecayG,
    ConcKappa,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::F => "f",
            Quantity::FAnnealed => "f_annealed",
            Quantity::Mu => "mu",
            Quantity::MuLastGap => "mu_last_gap",
            Quantity::Rho => "rho",
            Quantity::V => "v",
            Quantity::W => "w",
            Quantity::CenteringMean => "centering_mean",
            Quantity::KsCentering => "ks_centering",
            Quantity::KsQuenched => "ks_quenched",
            Quantity::DecayGamma => "decay_gamma",
            Quantity::DecayG => "decay_G",
            Quantity::ConcKappa => "conc_kappa",
        }
    }
}

/// One estimate at a grid point; `n` is `None` for quantities fitted across
/// the whole `n` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSeries {
    pub quantity: Quantity,
    pub h: f64,
    pub n: Option<usize>,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl EstimateSeries {
    fn new(quantity: Quantity, h: f64, n: Option<usize>, mean: f64, stderr: f64, samples: usize) -> Self {
        EstimateSeries { quantity, h, n, mean, stderr, samples }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FEstimate {
    pub quenched: EstimateSeries,
    /// `(1/n) log` of the sample mean of `Z`.
    pub annealed: EstimateSeries,
    /// `mean log Z ≤ log mean Z` on this run.
    pub jensen_holds: bool,
}

fn build<'a>(cfg: &'a McConfig, h: f64, n: usize, omega: &DisorderSample) -> Result<QuenchedSystem<'a>> {
    QuenchedSystem::new(&cfg.law, h, omega.charges(), n)
}

fn f_estimate(h: f64, n: usize, log_z: &[f64]) -> FEstimate {
    let s = log_z.len();
    let (m, se) = stats::mean_stderr(log_z);
    let lme = log_mean_exp(log_z);
    let nf = n as f64;
    FEstimate {
        quenched: EstimateSeries::new(Quantity::F, h, Some(n), m / nf, se / nf, s),
        annealed: EstimateSeries::new(Quantity::FAnnealed, h, Some(n), lme / nf, f64::NAN, s),
        jensen_holds: m <= lme + 1e-12 * lme.abs().max(1.0),
    }
}

/// `(1/n) log Z` over the samples, with the annealed comparison.
pub fn estimate_f(cfg: &McConfig, h: f64, n: usize) -> Result<FEstimate> {
    let lz = cfg.map_samples(n, |w| Ok(build(cfg, h, n, w)?.log_z()))?;
    Ok(f_estimate(h, n, &lz))
}

/// [`estimate_f`] at every `n` of the grid from one prefix table per sample.
pub fn estimate_f_grid(cfg: &McConfig, h: f64) -> Result<Vec<FEstimate>> {
    let table = prefix_values(cfg, h, |sys| sys.prefix_log_z().to_vec())?;
    Ok(cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(g, &n)| f_estimate(h, n, &column(&table, g)))
        .collect())
}

/// Per-sample values at each grid `n`, read off one system of size `n_max`.
fn prefix_values<F>(cfg: &McConfig, h: f64, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&QuenchedSystem<'_>) -> Vec<f64> + Sync,
{
    let n = cfg.n_max();
    cfg.map_samples(n, |w| {
        let sys = build(cfg, h, n, w)?;
        let all = f(&sys);
        Ok(cfg.n_values.iter().map(|&k| all[k]).collect())
    })
}

fn column(table: &[Vec<f64>], g: usize) -> Vec<f64> {
    table.iter().map(|row| row[g]).collect()
}

/// Slope of `mean log Z_n` against `n`, with the stderr of per-sample
/// slopes. Removes the `O(1)` intercept of `(1/n) log Z_n`.
pub fn f_slope(cfg: &McConfig, h: f64) -> Result<(f64, f64)> {
    if cfg.n_values.len() < 2 {
        return Err(Error::Config("slope needs at least 2 grid sizes".into()));
    }
    let ns: Vec<f64> = cfg.n_values.iter().map(|&n| n as f64).collect();
    let table = prefix_values(cfg, h, |sys| sys.prefix_log_z().to_vec())?;
    let slopes: Vec<f64> = table.iter().map(|row| stats::ols(&ns, row).slope).collect();
    Ok(stats::mean_stderr(&slopes))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuPoint {
    pub n: usize,
    /// `-(1/n) log mean(1/Z⁻_n)`.
    pub mu: f64,
    /// `(1/n) mean log Z⁻_n`.
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    /// Slope across `n` of `-log mean(1/Z⁻_n)`.
    pub mu: EstimateSeries,
    /// Slope across `n` of `-log mean(p(n)/Z⁻_n)`.
    pub mu_last_gap: EstimateSeries,
    /// Slope across `n` of `mean log Z⁻_n`, the matching free-energy estimate.
    pub f: EstimateSeries,
    /// Jackknife stderr of `f - mu`.
    pub gap_stderr: f64,
    pub points: Vec<MuPoint>,
}

/// `μ̂(h)` by the slope estimator, its last-gap variant and the paired `f̂`.
pub fn estimate_mu(cfg: &McConfig, h: f64) -> Result<MuEstimate> {
    let g = cfg.n_values.len();
    if g < 3 {
        return Err(Error::Config(format!("mu estimation needs at least 3 grid sizes, got {g}")));
    }
    let s = cfg.samples;
    let ns: Vec<f64> = cfg.n_values.iter().map(|&n| n as f64).collect();
    let table = prefix_values(cfg, h, |sys| sys.prefix_log_z_minus())?;
    let lp: Vec<f64> = cfg.n_values.iter().map(|&n| cfg.law.log_p(n)).collect();

    let select = |col: usize, skip: Option<usize>| -> Vec<f64> {
        (0..s).filter(|&i| Some(i) != skip).map(|i| table[i][col]).collect()
    };
    let mu_curve = |skip: Option<usize>| -> Vec<f64> {
        (0..g).map(|c| -log_mean_exp(&select(c, skip).iter().map(|x| -x).collect::<Vec<_>>())).collect()
    };
    let f_curve = |skip: Option<usize>| -> Vec<f64> { (0..g).map(|c| stats::mean_var(&select(c, skip)).0).collect() };
    let slope = |y: &[f64]| stats::ols(&ns, y).slope;

    let jk = |stat: &(dyn Fn(Option<usize>) -> f64 + Sync)| -> (f64, f64) {
        if cfg.disorder.is_pure() {
            (stat(None), 0.0)
        } else {
            stats::jackknife(s, stat)
        }
    };
    let (mu, mu_se) = jk(&|skip| slope(&mu_curve(skip)));
    let (f, f_se) = jk(&|skip| slope(&f_curve(skip)));
    let (mu_lg, mu_lg_se) = jk(&|skip| {
        let y: Vec<f64> = mu_curve(skip).iter().zip(&lp).map(|(m, l)| m - l).collect();
        slope(&y)
    });
    let (_, gap_se) = jk(&|skip| slope(&f_curve(skip)) - slope(&mu_curve(skip)));

    let mc = mu_curve(None);
    let fc = f_curve(None);
    let points = cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| MuPoint { n, mu: mc[i] / n as f64, f: fc[i] / n as f64 })
        .collect();
    Ok(MuEstimate {
        mu: EstimateSeries::new(Quantity::Mu, h, None, mu, mu_se, s),
        mu_last_gap: EstimateSeries::new(Quantity::MuLastGap, h, None, mu_lg, mu_lg_se, s),
        f: EstimateSeries::new(Quantity::F, h, None, f, f_se, s),
        gap_stderr: gap_se,
        points,
    })
}

/// Thermal moments `κ₁/n` and `κ₂/n` averaged over disorder.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalPoint {
    pub rho: EstimateSeries,
    pub v: EstimateSeries,
}

pub fn thermal_moments(cfg: &McConfig, h: f64) -> Result<Vec<ThermalPoint>> {
    let n = cfg.n_max();
    let per = cfg.map_samples(n, |w| {
        let sys = build(cfg, h, n, w)?;
        let c = sys.prefix_cumulants(2, 2)?;
        Ok(cfg.n_values.iter().map(|&k| (c[k].get(1), c[k].get(2))).collect::<Vec<_>>())
    })?;
    Ok(cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(g, &k)| {
            let nf = k as f64;
            let r: Vec<f64> = per.iter().map(|row| row[g].0 / nf).collect();
            let v: Vec<f64> = per.iter().map(|row| row[g].1 / nf).collect();
            let (rm, rs) = stats::mean_stderr(&r);
            let (vm, vs) = stats::mean_stderr(&v);
            ThermalPoint {
                rho: EstimateSeries::new(Quantity::Rho, h, Some(k), rm, rs, r.len()),
                v: EstimateSeries::new(Quantity::V, h, Some(k), vm, vs, v.len()),
            }
        })
        .collect())
}

/// Minimum sample count for the Kolmogorov metric.
pub const MIN_CLT_SAMPLES: usize = 100;

/// Statistics of the random centering `E_{n,h,ω}[L_n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteringStats {
    pub h: f64,
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    /// Sample variance over `n`; estimates `w(h)`.
    pub variance_per_n: f64,
    pub variance_per_n_stderr: f64,
    /// Kolmogorov distance of the standardized centering to N(0,1);
    /// `None` when degenerate or with fewer than [`MIN_CLT_SAMPLES`] samples.
    pub ks: Option<f64>,
    pub kappa3_per_n: f64,
    pub kappa3_stderr: f64,
    pub kappa4_per_n: f64,
    pub kappa4_stderr: f64,
    pub degenerate: bool,
}

fn centering_from(h: f64, n: usize, xs: &[f64]) -> CenteringStats {
    let s = xs.len();
    let nf = n as f64;
    let (mean, var) = stats::mean_var(xs);
    let degenerate = var == 0.0;
    let (k3, k4) = if s >= 4 && !degenerate { stats::k_statistics(xs) } else { (0.0, 0.0) };
    let sf = s as f64;
    CenteringStats {
        h,
        n,
        samples: s,
        mean,
        mean_stderr: (var / sf).sqrt(),
        variance_per_n: var / nf,
        variance_per_n_stderr: stats::variance_stderr(xs) / nf,
        ks: if s >= MIN_CLT_SAMPLES { stats::ks_standardized(xs) } else { None },
        kappa3_per_n: k3 / nf,
        kappa3_stderr: (6.0 * var.powi(3) / sf).sqrt() / nf,
        kappa4_per_n: k4 / nf,
        kappa4_stderr: (24.0 * var.powi(4) / sf).sqrt() / nf,
        degenerate,
    }
}

pub fn centering_statistics(cfg: &McConfig, h: f64, n: usize) -> Result<CenteringStats> {
    Ok(centering_grid(&cfg.with_n_values(vec![n]), h)?.remove(0))
}

/// [`centering_statistics`] at every grid `n`, from shared prefix passes.
pub fn centering_grid(cfg: &McConfig, h: f64) -> Result<Vec<CenteringStats>> {
    let table = prefix_values(cfg, h, |sys| sys.prefix_mean_contacts())?;
    Ok(cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(g, &n)| centering_from(h, n, &column(&table, g)))
        .collect())
}

/// Options for [`correlation_decay_scan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub window: usize,
    /// Inclusive `j` range of the exponential fit.
    pub fit_range: (usize, usize),
    /// Distance between successive window offsets.
    pub offset_stride: usize,
    /// Size of the system holding the windows.
    pub system_size: usize,
    /// Largest gap `b - a` of the mixing proxy.
    pub max_gap: usize,
    /// Mixing-proxy values below this are numeric noise and left out of its fit.
    pub floor: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions { window: 96, fit_range: (8, 64), offset_stride: 32, system_size: 512, max_gap: 48, floor: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayScan {
    pub h: f64,
    pub samples: usize,
    /// Disorder mean of `a_j`, `j = 1..=J`.
    pub mean_a: Vec<f64>,
    pub stderr_a: Vec<f64>,
    pub gamma: f64,
    pub gamma_stderr: f64,
    pub log_g: f64,
    pub log_g_stderr: f64,
    pub r2: f64,
    /// Gaps `b - a` of the mixing proxy.
    pub gaps: Vec<usize>,
    /// Disorder mean of `|cov[X_a,X_b]| / min{E X_a, E X_b}`.
    pub mixing: Vec<f64>,
    pub mixing_gamma: f64,
    pub mixing_gamma_stderr: f64,
    pub mixing_r2: f64,
    /// Fit points lost to the numeric floor.
    pub floor_reached: bool,
}

fn log_fit(xs: &[usize], ys: &[f64], floor: f64) -> Option<(LinearFit, bool)> {
    let (x, y): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).filter(|(_, &y)| y > floor).map(|(&x, &y)| (x as f64, y.ln())).unzip();
    let dropped = x.len() < xs.len();
    if x.len() < 3 {
        return None;
    }
    Some((stats::ols(&x, &y), dropped))
}

/// Disorder-averaged two-replica avoidance and mixing-proxy decay.
pub fn correlation_decay_scan(cfg: &McConfig, h: f64, opts: &DecayOptions) -> Result<DecayScan> {
    let jn = opts.window;
    if jn < 16 {
        return Err(Error::Config(format!("decay window must be at least 16, got {jn}")));
    }
    let (lo, hi) = opts.fit_range;
    if lo < 1 || hi > jn || lo + 2 > hi {
        return Err(Error::Config(format!("fit range [{lo},{hi}] incompatible with window {jn}")));
    }
    let n = opts.system_size.max(jn + 2 * opts.max_gap);
    if n > cfg.law.n_max() {
        return Err(Error::HorizonExceeded { n, n_max: cfg.law.n_max() });
    }
    let stride = opts.offset_stride.max(1);
    let offsets: Vec<usize> = (0..=n - jn).step_by(stride).collect();
    let gaps: Vec<usize> = (1..=opts.max_gap).collect();
    let sites: Vec<usize> = (opts.max_gap..n - 2 * opts.max_gap).step_by(stride).collect();

    let per = cfg.map_samples(n, |w| {
        let sys = build(cfg, h, n, w)?;
        let table = sys.segment_partitions(jn.max(opts.max_gap))?;
        let mut a = vec![0.0; jn];
        for &i in &offsets {
            for (acc, v) in a.iter_mut().zip(sys.two_replica_avoidance_exact(&table, i, jn)?) {
                *acc += v / offsets.len() as f64;
            }
        }
        let mut mix = vec![0.0; gaps.len()];
        for (g, &gap) in gaps.iter().enumerate() {
            for &s in &sites {
                mix[g] += mixing_proxy(&sys, &table, s, s + gap)? / sites.len() as f64;
            }
        }
        Ok((a, mix))
    })?;

    let mut mean_a = Vec::with_capacity(jn);
    let mut stderr_a = Vec::with_capacity(jn);
    for j in 0..jn {
        let col: Vec<f64> = per.iter().map(|p| p.0[j]).collect();
        let (m, se) = stats::mean_stderr(&col);
        mean_a.push(m);
        stderr_a.push(se);
    }
    let mixing: Vec<f64> = (0..gaps.len()).map(|g| stats::mean_var(&per.iter().map(|p| p.1[g]).collect::<Vec<_>>()).0).collect();

    let js: Vec<usize> = (lo..=hi).collect();
    let (fit, dropped) = log_fit(&js, &mean_a[lo - 1..hi], 0.0)
        .ok_or_else(|| Error::InsufficientSamples("all a_j in the fit range underflow".into()))?;
    let (mfit, mdropped) = log_fit(&gaps, &mixing, opts.floor).unwrap_or((
        LinearFit { slope: f64::NAN, intercept: f64::NAN, slope_stderr: f64::NAN, intercept_stderr: f64::NAN, r2: f64::NAN },
        true,
    ));
    Ok(DecayScan {
        h,
        samples: cfg.samples,
        mean_a,
        stderr_a,
        gamma: -fit.slope,
        gamma_stderr: fit.slope_stderr,
        log_g: fit.intercept,
        log_g_stderr: fit.intercept_stderr,
        r2: fit.r2,
        gaps,
        mixing,
        mixing_gamma: -mfit.slope,
        mixing_gamma_stderr: mfit.slope_stderr,
        mixing_r2: mfit.r2,
        floor_reached: dropped || mdropped,
    })
}

/// `|cov[X_a,X_b]| / min{E X_a, E X_b}` with the covariance formed as
/// `E X_a E X_b · expm1(log-ratio)` to avoid subtracting close numbers.
fn mixing_proxy(sys: &QuenchedSystem<'_>, table: &crate::quenched_dp::SegmentTable, a: usize, b: usize) -> Result<f64> {
    let pre = sys.prefix_log_z();
    let suf = sys.suffix_log_z();
    let lz = sys.log_z();
    let seg = table.get(a, b).ok_or_else(|| Error::OutOfRange(format!("segment [{a},{b}] outside table")))?;
    let la = pre[a] + suf[a] - lz;
    let lb = pre[b] + suf[b] - lz;
    let lab = pre[a] + seg + suf[b] - lz;
    let cov = (la + lb).exp() * (lab - la - lb).exp_m1();
    Ok(cov.abs() / la.min(lb).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSeries {
    pub u: Vec<f64>,
    pub frequency: Vec<f64>,
    pub wilson_upper: Vec<f64>,
    /// Largest κ with `2exp(-κu²/(n+u)) ≥` every upper bound.
    pub kappa_linear: f64,
    /// Same with the `u^{5/3}` denominator.
    pub kappa_five_thirds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationScan {
    pub h: f64,
    pub n: usize,
    pub samples: usize,
    pub free_energy: TailSeries,
    pub centering: TailSeries,
}

/// Confidence level of the Wilson bounds in [`concentration_scan`].
pub const WILSON_Z: f64 = 1.96;

/// Largest κ such that `2exp(-κu²/(n + u^p))` dominates each bound.
/// Points with no exceedances impose nothing; `+∞` if none do.
pub fn dominating_kappa(n: usize, u: &[f64], bounds: &[f64], counts: &[usize], power: f64) -> f64 {
    u.iter()
        .zip(bounds)
        .zip(counts)
        .filter(|((&u, _), &k)| u > 0.0 && k > 0)
        .map(|((&u, &b), _)| -(b / 2.0).ln() * (n as f64 + u.powf(power)) / (u * u))
        .fold(f64::INFINITY, f64::min)
}

fn tail_series(n: usize, xs: &[f64], u_grid: &[f64]) -> TailSeries {
    let s = xs.len();
    let (m, _) = stats::mean_var(xs);
    let counts: Vec<usize> = u_grid.iter().map(|&u| xs.iter().filter(|&&x| (x - m).abs() >= u).count()).collect();
    let frequency: Vec<f64> = counts.iter().map(|&k| k as f64 / s as f64).collect();
    let wilson_upper: Vec<f64> = counts.iter().map(|&k| stats::wilson_upper(k, s, WILSON_Z)).collect();
    TailSeries {
        kappa_linear: dominating_kappa(n, u_grid, &wilson_upper, &counts, 1.0),
        kappa_five_thirds: dominating_kappa(n, u_grid, &wilson_upper, &counts, 5.0 / 3.0),
        u: u_grid.to_vec(),
        frequency,
        wilson_upper,
    }
}

/// Minimum sample count for [`concentration_scan`].
pub const MIN_CONCENTRATION_SAMPLES: usize = 500;

/// Empirical tails of `|log Z - mean|` and `|κ₁ - mean κ₁|` at deviations
/// `u` (absolute units), with fitted dominating constants.
pub fn concentration_scan(cfg: &McConfig, h: f64, n: usize, u_grid: &[f64]) -> Result<ConcentrationScan> {
    scan_tails(cfg, h, n, u_grid, false)
}

fn scan_tails(cfg: &McConfig, h: f64, n: usize, u_grid: &[f64], sd_units: bool) -> Result<ConcentrationScan> {
    if cfg.samples < MIN_CONCENTRATION_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "concentration needs at least {MIN_CONCENTRATION_SAMPLES} samples, got {}",
            cfg.samples
        )));
    }
    let per = cfg.map_samples(n, |w| {
        let sys = build(cfg, h, n, w)?;
        let k1 = *sys.prefix_mean_contacts().last().unwrap();
        Ok((sys.log_z(), k1))
    })?;
    let lz: Vec<f64> = per.iter().map(|p| p.0).collect();
    let k1: Vec<f64> = per.iter().map(|p| p.1).collect();
    let scale = |xs: &[f64]| -> Vec<f64> {
        let sd = stats::mean_var(xs).1.sqrt();
        let unit = if sd_units && sd > 0.0 { sd } else { 1.0 };
        u_grid.iter().map(|u| u * unit).collect()
    };
    Ok(ConcentrationScan {
        h,
        n,
        samples: cfg.samples,
        free_energy: tail_series(n, &lz, &scale(&lz)),
        centering: tail_series(n, &k1, &scale(&k1)),
    })
}

/// [`concentration_scan`] with `u` in units of each variable's sample
/// standard deviation (absolute units when that is zero).
pub fn concentration_scan_scaled(cfg: &McConfig, h: f64, n: usize, u_sd: &[f64]) -> Result<ConcentrationScan> {
    scan_tails(cfg, h, n, u_sd, true)
}

/// Options for [`hc_bracket`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HcOptions {
    /// Bisection stops once the bracket is this narrow.
    pub tolerance: f64,
    /// Slopes at or below this count as zero.
    pub floor: f64,
}

impl Default for HcOptions {
    fn default() -> Self {
        HcOptions { tolerance: 1.0 / 32.0, floor: 1e-10 }
    }
}

/// Whether `f̂(h)` is significantly positive: the slope of `mean log Z_n`
/// across the `n` grid exceeds `3·stderr` and the floor.
pub fn localized_test(cfg: &McConfig, h: f64, opts: &HcOptions) -> Result<bool> {
    let (f, se) = f_slope(cfg, h)?;
    Ok(f > (3.0 * se).max(opts.floor))
}

/// Brackets the empirical transition by bisection between the extreme
/// points of the `h` grid.
pub fn hc_bracket(cfg: &McConfig, opts: &HcOptions) -> Result<(f64, f64)> {
    let mut lo = cfg.h_values[0];
    let mut hi = *cfg.h_values.last().unwrap();
    if localized_test(cfg, lo, opts)? || !localized_test(cfg, hi, opts)? {
        return Err(Error::NoConvergence(format!("no sign change of the localization test on [{lo}, {hi}]")));
    }
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if localized_test(cfg, mid, opts)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisorderFamily, EllSpec};

    fn alpha1(n: usize) -> InterArrivalLaw {
        InterArrivalLaw::power_law(1.0, EllSpec::Constant { c: 1.0 }, n, true).unwrap()
    }

    fn gauss() -> DisorderLaw {
        DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 }).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(alpha1(64), gauss(), vec![1.0], vec![32], 1, 0).is_err());
        assert!(McConfig::new(alpha1(64), gauss(), vec![1.0], vec![32, 16], 4, 0).is_err());
        assert!(McConfig::new(alpha1(64), gauss(), vec![1.0], vec![128], 4, 0).is_err());
        assert!(McConfig::new(alpha1(64), gauss(), vec![], vec![32], 4, 0).is_err());
    }

    #[test]
    fn zero_disorder_collapses() {
        let cfg = McConfig::new(alpha1(256), DisorderLaw::zero(), vec![1.0], vec![64, 128, 256], 5, 1).unwrap();
        let f = estimate_f(&cfg, 1.0, 128).unwrap();
        let sys = QuenchedSystem::new(&cfg.law, 1.0, &[0.0; 128], 128).unwrap();
        assert_eq!(f.quenched.stderr, 0.0);
        assert_eq!(f.quenched.mean, sys.log_z() / 128.0);
        let mu = estimate_mu(&cfg, 1.0).unwrap();
        assert_eq!(mu.mu.mean, mu.f.mean);
        for p in &mu.points {
            assert_eq!(p.mu, p.f);
        }
        let c = centering_statistics(&cfg, 1.0, 128).unwrap();
        assert!(c.degenerate && c.variance_per_n == 0.0 && c.ks.is_none());
    }

    #[test]
    fn jensen_and_mu_bound_on_small_disordered_run() {
        let cfg = McConfig::new(alpha1(256), gauss(), vec![2.0], vec![32, 64, 128], 40, 7).unwrap();
        for e in estimate_f_grid(&cfg, 2.0).unwrap() {
            assert!(e.jensen_holds && e.quenched.mean <= e.annealed.mean);
        }
        let mu = estimate_mu(&cfg, 2.0).unwrap();
        assert!(mu.mu.mean <= mu.f.mean + 2.0 * mu.gap_stderr);
        for p in &mu.points {
            assert!(p.mu <= p.f + 1e-12);
        }
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let cfg = McConfig::new(alpha1(128), gauss(), vec![1.0], vec![32, 64, 128], 24, 3).unwrap();
        let run = |k| {
            rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(|| {
                (estimate_mu(&cfg, 1.0).unwrap().mu, centering_grid(&cfg, 1.0).unwrap())
            })
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.0.mean.to_bits(), b.0.mean.to_bits());
        assert_eq!(a.0.stderr.to_bits(), b.0.stderr.to_bits());
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn decay_first_column_is_one() {
        let cfg = McConfig::new(alpha1(256), gauss(), vec![2.0], vec![64], 3, 2).unwrap();
        let opts = DecayOptions { window: 24, fit_range: (4, 16), offset_stride: 16, system_size: 96, max_gap: 12, floor: 1e-12 };
        let d = correlation_decay_scan(&cfg, 2.0, &opts).unwrap();
        assert_eq!(d.mean_a[0], 1.0);
        assert!(d.gamma > 0.0);
    }

    #[test]
    fn concentration_trivial_points() {
        let cfg = McConfig::new(alpha1(64), DisorderLaw::zero(), vec![1.0], vec![32], 500, 1).unwrap();
        let c = concentration_scan(&cfg, 1.0, 32, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.free_energy.frequency, vec![1.0, 0.0, 0.0]);
        assert_eq!(c.free_energy.kappa_linear, f64::INFINITY);
        assert!(concentration_scan(&cfg.with_samples(10), 1.0, 32, &[1.0]).is_err());
    }

    #[test]
    fn pure_geometric_bracket_contains_zero() {
        let law = InterArrivalLaw::geometric(0.5, 1024).unwrap();
        let cfg = McConfig::new(law, DisorderLaw::zero(), vec![-1.0, 1.0], vec![256, 512, 1024], 2, 0).unwrap();
        let (lo, hi) = hc_bracket(&cfg, &HcOptions::default()).unwrap();
        assert!(lo <= 0.0 && hi >= 0.0, "[{lo}, {hi}]");
    }
}
