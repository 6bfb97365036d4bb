//! Runnable localized-phase checks, one per result in scope.
//!
//! Each check returns a [`CheckReport`] whose pass flag is computed from
//! its criteria. Statistical failure is data, not an error; errors are
//! reserved for configurations the check cannot run on.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::disorder_mc::{self as mc, DecayOptions, McConfig};
use crate::error::{Error, Result};
use crate::model::{sample_disorder, DisorderFamily, DisorderLaw, InterArrivalLaw, LawSpec};
use crate::numerics::DEFAULT_JET_ORDER;
use crate::oracle::PathSet;
use crate::quenched_dp::{ContactLaw, QuenchedSystem};
use crate::report::{CheckReport, Criterion, Curve};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
    C11,
    C12,
    C13,
}

/// Check identifiers with the result each one exercises.
pub const CHECK_TABLE: [(CheckId, &str); 13] = [
    (CheckId::C1, "free-energy regularity: convergent cumulant densities and Gevrey-3 growth"),
    (CheckId::C2, "quenched central limit theorem for the contact number"),
    (CheckId::C3, "quenched concentration of the contact number and of the free energy"),
    (CheckId::C4, "random centering: positive variance w(h), Gaussian limit, bounded offset from rho(h) n"),
    (CheckId::C5, "alternative free energy bounds min{f, f^2} <= mu <= f"),
    (CheckId::C6, "maximal excursion M_n / log n concentrates at 1 / mu"),
    (CheckId::C7, "exponential decay of two-replica avoidance and of contact mixing"),
    (CheckId::C8, "positive thermal variance density and strict convexity"),
    (CheckId::C9, "contact-enforcement lower bound and site exchange inequality"),
    (CheckId::C10, "conditional independence of the two sides of a contact"),
    (CheckId::C11, "centering within sqrt(n log n) of rho(h) n"),
    (CheckId::C12, "centering cumulants grow at most linearly in n"),
    (CheckId::C13, "small contact fraction is exponentially unlikely"),
];

impl CheckId {
    pub fn all() -> Vec<CheckId> {
        CHECK_TABLE.iter().map(|e| e.0).collect()
    }

    pub fn description(self) -> &'static str {
        CHECK_TABLE.iter().find(|e| e.0 == self).unwrap().1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::C1 => "C1",
            CheckId::C2 => "C2",
            CheckId::C3 => "C3",
            CheckId::C4 => "C4",
            CheckId::C5 => "C5",
            CheckId::C6 => "C6",
            CheckId::C7 => "C7",
            CheckId::C8 => "C8",
            CheckId::C9 => "C9",
            CheckId::C10 => "C10",
            CheckId::C11 => "C11",
            CheckId::C12 => "C12",
            CheckId::C13 => "C13",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::all()
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown check id {s:?}")))
    }
}

/// Parameters of every check. Defaults are the desk-scale regime:
/// `α = 1` normalized law, Gaussian(1) charges, `h = 3`.
///
/// The law, the disorder and the master seed are not serialized with the
/// rest; a run configuration supplies them from its own blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(skip)]
    pub law: LawSpec,
    #[serde(skip)]
    pub disorder: DisorderLaw,
    #[serde(skip)]
    pub master_seed: u64,
    /// Checks to run; empty selects all.
    pub select: Vec<CheckId>,
    pub h: f64,
    /// Localized points for the `μ` bounds and the contact lower bound.
    pub h_grid: Vec<f64>,
    pub samples: usize,
    /// Samples for distributional statistics of the centering and tails.
    pub clt_samples: usize,
    /// Disorder realizations examined one by one.
    pub seeds: usize,
    pub jet_order: usize,
    pub r_max: usize,
    pub cumulant_n: Vec<usize>,
    pub clt_n: Vec<usize>,
    pub centering_n: Vec<usize>,
    pub mu_n: Vec<usize>,
    pub concentration_n: usize,
    /// Deviations in units of each variable's sample standard deviation.
    pub u_grid: Vec<f64>,
    pub decay: DecayOptions,
    pub excursion_n: Vec<usize>,
    pub excursion_samples: usize,
    pub excursion_eps: f64,
    pub hl_seeds: usize,
    pub hl_n: Vec<usize>,
    pub fraction_n: Vec<usize>,
    /// `δ` as a fraction of `ρ̂`.
    pub fraction_delta: f64,
    pub oracle_instances: usize,
    pub oracle_n: usize,
    pub bound_n: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            law: LawSpec::alpha_one(4096),
            disorder: DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 }).unwrap(),
            select: Vec::new(),
            h: 3.0,
            h_grid: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            master_seed: 20240601,
            samples: 200,
            clt_samples: 2000,
            seeds: 5,
            jet_order: DEFAULT_JET_ORDER,
            r_max: 6,
            cumulant_n: vec![128, 256, 512, 1024],
            clt_n: vec![128, 256, 512, 1024],
            centering_n: vec![128, 256, 512],
            mu_n: vec![128, 256, 512],
            concentration_n: 256,
            u_grid: (0..12).map(|k| 0.5 * k as f64).collect(),
            decay: DecayOptions::default(),
            excursion_n: vec![1024, 2048, 4096],
            excursion_samples: 100,
            excursion_eps: 0.25,
            hl_seeds: 10,
            hl_n: vec![256, 512, 1024, 2048, 4096],
            fraction_n: vec![32, 64, 96, 128],
            fraction_delta: 0.9,
            oracle_instances: 200,
            oracle_n: 8,
            bound_n: 256,
        }
    }
}

impl CheckConfig {
    /// A reduced configuration that runs every check in seconds; useful for
    /// smoke tests, too small for the statistical criteria to be meaningful.
    pub fn quick() -> Self {
        CheckConfig {
            law: LawSpec::alpha_one(512),
            samples: 24,
            clt_samples: 500,
            seeds: 3,
            cumulant_n: vec![64, 128, 256],
            clt_n: vec![64, 128, 256],
            centering_n: vec![64, 128, 256],
            mu_n: vec![64, 128, 256],
            concentration_n: 128,
            decay: DecayOptions { window: 32, fit_range: (4, 24), offset_stride: 32, system_size: 128, max_gap: 16, floor: 1e-9 },
            excursion_n: vec![128, 256, 512],
            excursion_samples: 8,
            hl_seeds: 4,
            hl_n: vec![64, 128, 256, 512],
            fraction_n: vec![16, 32, 48],
            oracle_instances: 20,
            bound_n: 64,
            ..CheckConfig::default()
        }
    }

    pub fn is_pure(&self) -> bool {
        self.disorder.is_pure()
    }

    pub fn validate(&self) -> Result<()> {
        let n_max = self.law.n_max();
        let grids: [(&str, &[usize]); 7] = [
            ("cumulant_n", &self.cumulant_n),
            ("clt_n", &self.clt_n),
            ("centering_n", &self.centering_n),
            ("mu_n", &self.mu_n),
            ("excursion_n", &self.excursion_n),
            ("hl_n", &self.hl_n),
            ("fraction_n", &self.fraction_n),
        ];
        for (name, g) in grids {
            if g.len() < 2 || !g.windows(2).all(|w| w[0] < w[1]) || g[0] < 2 {
                return Err(Error::Config(format!("{name} must be increasing with at least 2 sizes >= 2")));
            }
            if *g.last().unwrap() > n_max {
                return Err(Error::Config(format!("{name} exceeds law horizon {n_max}")));
            }
        }
        if self.mu_n.len() < 3 || self.excursion_n.len() < 3 {
            return Err(Error::Config("mu_n and excursion_n need at least 3 sizes".into()));
        }
        if self.h_grid.len() < 2 || !self.h_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("h_grid must be increasing with at least 2 points".into()));
        }
        if self.samples < 2 || self.seeds < 2 || self.hl_seeds < 2 || self.excursion_samples < 2 || self.clt_samples < 4 {
            return Err(Error::Config("sample counts must be at least 2".into()));
        }
        if self.r_max < 4 || self.r_max > self.jet_order {
            return Err(Error::Config(format!("r_max must lie in 4..=jet_order, got {}", self.r_max)));
        }
        if self.oracle_n > crate::oracle::ORACLE_MAX_N || self.oracle_n < 2 {
            return Err(Error::Config(format!("oracle_n must lie in 2..=16, got {}", self.oracle_n)));
        }
        if self.bound_n > n_max || self.concentration_n > n_max || self.decay.system_size > n_max {
            return Err(Error::Config(format!("system sizes exceed law horizon {n_max}")));
        }
        if !(self.excursion_eps > 0.0 && self.excursion_eps < 1.0) || !(self.fraction_delta > 0.0 && self.fraction_delta < 1.0) {
            return Err(Error::Config("excursion_eps and fraction_delta must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn mc(&self, law: &InterArrivalLaw, disorder: DisorderLaw, n_values: &[usize], samples: usize) -> Result<McConfig> {
        let mut cfg = McConfig::new(law.clone(), disorder, vec![self.h], n_values.to_vec(), samples, self.master_seed)?;
        cfg.jet_order = self.jet_order;
        cfg.window = self.decay.window;
        Ok(cfg)
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "law": self.law,
            "disorder": self.disorder,
            "h": self.h,
            "master_seed": self.master_seed,
        })
    }
}

/// Runs one check.
pub fn run_check(id: CheckId, cfg: &CheckConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let law = cfg.law.build()?;
    match id {
        CheckId::C1 => check_regularity(cfg, &law),
        CheckId::C2 => check_quenched_clt(cfg, &law),
        CheckId::C3 => check_concentration(cfg, &law),
        CheckId::C4 => check_centering(cfg, &law),
        CheckId::C5 => check_mu_bounds(cfg, &law),
        CheckId::C6 => check_max_excursion(cfg, &law),
        CheckId::C7 => check_decay(cfg, &law),
        CheckId::C8 => check_variance(cfg, &law),
        CheckId::C9 => check_contact_bound(cfg, &law),
        CheckId::C10 => check_factorization(cfg, &law),
        CheckId::C11 => check_hardy_littlewood(cfg, &law),
        CheckId::C12 => check_centering_cumulants(cfg, &law),
        CheckId::C13 => check_small_fraction(cfg, &law),
    }
}

/// Runs `ids`, or `cfg.select` when `ids` is empty, or else every check,
/// in catalog order.
pub fn full_report(cfg: &CheckConfig, ids: &[CheckId]) -> Result<Vec<CheckReport>> {
    let mut selected: Vec<CheckId> = if !ids.is_empty() {
        ids.to_vec()
    } else if !cfg.select.is_empty() {
        cfg.select.clone()
    } else {
        CheckId::all()
    };
    selected.sort();
    selected.dedup();
    selected.into_iter().map(|id| run_check(id, cfg)).collect()
}

fn report(id: CheckId, cfg: &CheckConfig, extra: serde_json::Value) -> CheckReport {
    let mut params = cfg.echo();
    if let (Some(p), Some(e)) = (params.as_object_mut(), extra.as_object()) {
        for (k, v) in e {
            p.insert(k.clone(), v.clone());
        }
    }
    CheckReport::new(id.as_str(), id.description(), params)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn sizes(ns: &[usize]) -> Vec<f64> {
    ns.iter().map(|&n| n as f64).collect()
}

fn check_regularity(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(
        CheckId::C1,
        cfg,
        json!({"n_values": cfg.cumulant_n, "seeds": cfg.seeds, "r_max": cfg.r_max, "jet_order": cfg.jet_order}),
    );
    let m = cfg.mc(law, cfg.disorder, &cfg.cumulant_n, cfg.seeds)?;
    let n_top = m.n_max();
    // per seed, per grid n: κ_r / n for r = 1..=r_max
    let dens: Vec<Vec<Vec<f64>>> = m.map_samples(n_top, |w| {
        let sys = QuenchedSystem::new(law, cfg.h, w.charges(), n_top)?;
        let all = sys.prefix_cumulants(cfg.r_max, cfg.jet_order)?;
        Ok(cfg.cumulant_n.iter().map(|&n| all[n].kappa.iter().map(|k| k / n as f64).collect()).collect())
    })?;
    let k = cfg.seeds as f64;
    let ns = sizes(&cfg.cumulant_n);
    for r in 1..=4 {
        let mut means = Vec::new();
        let mut ses = Vec::new();
        let mut sds = Vec::new();
        for g in 0..ns.len() {
            let col: Vec<f64> = dens.iter().map(|d| d[g][r - 1]).collect();
            let (mean, var) = stats::mean_var(&col);
            means.push(mean);
            ses.push((var / k).sqrt());
            sds.push(var.sqrt());
        }
        let diffs: Vec<f64> = means.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let diff_se: Vec<f64> = ses.windows(2).map(|s| (s[0] * s[0] + s[1] * s[1]).sqrt()).collect();
        let sd_se: Vec<f64> = sds.iter().map(|s| s / (2.0 * (k - 1.0)).sqrt()).collect();
        rep.curve(&format!("kappa{r}_per_n"), Curve::new("n", &format!("kappa{r}/n"), &ns, &means));
        rep.curve(&format!("kappa{r}_seed_sd"), Curve::new("n", "seed sd", &ns, &sds));
        rep.fitted(&format!("kappa{r}_per_n"), *means.last().unwrap(), *ses.last().unwrap());
        rep.criterion(Criterion::at_least(
            &format!("kappa{r}/n successive differences shrink (2 sigma)"),
            stats::non_increasing_within(&diffs, &diff_se, 2.0) as u8 as f64,
            1.0,
        ));
        rep.criterion(Criterion::at_least(
            &format!("kappa{r}/n seed spread shrinks (2 sigma)"),
            stats::non_increasing_within(&sds, &sd_se, 2.0) as u8 as f64,
            1.0,
        ));
    }
    // Gevrey constant per seed and n
    let mut c_mean = Vec::new();
    let mut c_se = Vec::new();
    for g in 0..ns.len() {
        let per_seed: Vec<f64> = dens
            .iter()
            .map(|d| {
                (1..=cfg.r_max)
                    .map(|r| (d[g][r - 1].abs() / factorial(r).powi(3)).powf(1.0 / r as f64))
                    .fold(0.0, f64::max)
            })
            .collect();
        let (mean, se) = stats::mean_stderr(&per_seed);
        c_mean.push(mean);
        c_se.push(se);
    }
    rep.curve("gevrey_constant", Curve::new("n", "max_r (|kappa_r/n|/(r!)^3)^(1/r)", &ns, &c_mean));
    let c_hat = c_mean.iter().copied().fold(0.0, f64::max);
    let arg = c_mean.iter().position(|&c| c == c_hat).unwrap_or(0);
    rep.fitted("gevrey_c", c_hat, c_se[arg]);
    rep.criterion(Criterion::within("gevrey constant finite and positive", c_hat, f64::MIN_POSITIVE, f64::MAX));
    rep.criterion(Criterion::at_least(
        "gevrey constant bounded along n (2 sigma)",
        stats::non_increasing_within(&c_mean, &c_se, 2.0) as u8 as f64,
        1.0,
    ));
    Ok(rep.finish())
}

/// Kolmogorov distance between a lattice law standardized by its own mean
/// and variance and N(0,1), including the left limits at atoms.
pub fn lattice_ks(cl: &ContactLaw) -> f64 {
    let m = cl.mean();
    let sd = cl.variance().sqrt();
    if !(sd > 0.0) {
        return f64::NAN;
    }
    let cdf = cl.cdf();
    let mut ks: f64 = 0.0;
    for (l, &f) in cdf.iter().enumerate() {
        let phi = stats::normal_cdf((l as f64 - m) / sd);
        let below = if l == 0 { 0.0 } else { cdf[l - 1] };
        ks = ks.max((f - phi).abs()).max((below - phi).abs());
    }
    ks
}

/// Threshold on the quenched Kolmogorov distance at the largest size.
pub const QUENCHED_KS_MAX: f64 = 0.06;

fn check_quenched_clt(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C2, cfg, json!({"n_values": cfg.clt_n, "seeds": cfg.seeds, "ks_max": QUENCHED_KS_MAX}));
    let m = cfg.mc(law, cfg.disorder, &cfg.clt_n, cfg.seeds)?;
    let ks: Vec<Vec<f64>> = m.map_samples(m.n_max(), |w| {
        cfg.clt_n
            .iter()
            .map(|&n| Ok(lattice_ks(&QuenchedSystem::new(law, cfg.h, w.charges(), n)?.contact_law()?)))
            .collect()
    })?;
    let ns = sizes(&cfg.clt_n);
    let zeros = vec![0.0; ns.len()];
    let mut worst_end: f64 = 0.0;
    let mut monotone = true;
    for (s, row) in ks.iter().enumerate() {
        rep.curve(&format!("ks_seed{s}"), Curve::new("n", "KS", &ns, row));
        worst_end = worst_end.max(*row.last().unwrap());
        // exact per-seed values: no sampling error
        monotone &= stats::non_increasing_within(row, &zeros, 2.0);
    }
    rep.metric("ks_max_at_largest_n", worst_end);
    rep.criterion(Criterion::at_least("KS non-increasing in n for every seed", monotone as u8 as f64, 1.0));
    rep.criterion(Criterion::at_most("KS at largest n, worst seed", worst_end, QUENCHED_KS_MAX));
    Ok(rep.finish())
}

/// Largest κ with `P[|L - E L| > u] ≤ 2exp(-κu²/(n + u^p))` for every `u`.
pub fn exact_tail_kappa(cl: &ContactLaw, power: f64) -> f64 {
    let m = cl.mean();
    let n = cl.n as f64;
    let probs = cl.probabilities();
    let mut devs: Vec<(f64, f64)> = probs.iter().enumerate().map(|(l, &p)| ((l as f64 - m).abs(), p)).collect();
    devs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    let mut kappa = f64::INFINITY;
    for (d, p) in devs {
        tail += p;
        if d > 0.0 && tail > 0.0 {
            kappa = kappa.min(-(tail.min(1.0) / 2.0).ln() * (n + d.powf(power)) / (d * d));
        }
    }
    kappa
}

fn check_concentration(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(
        CheckId::C3,
        cfg,
        json!({"n_values": cfg.clt_n, "seeds": cfg.seeds, "scan_n": cfg.concentration_n, "scan_samples": cfg.clt_samples, "u_grid_sd_units": cfg.u_grid}),
    );
    let m = cfg.mc(law, cfg.disorder, &cfg.clt_n, cfg.seeds)?;
    let kap: Vec<Vec<f64>> = m.map_samples(m.n_max(), |w| {
        cfg.clt_n
            .iter()
            .map(|&n| Ok(exact_tail_kappa(&QuenchedSystem::new(law, cfg.h, w.charges(), n)?.contact_law()?, 5.0 / 3.0)))
            .collect()
    })?;
    let ns = sizes(&cfg.clt_n);
    let per_n: Vec<f64> = (0..ns.len()).map(|g| kap.iter().map(|r| r[g]).fold(f64::INFINITY, f64::min)).collect();
    rep.curve("quenched_kappa", Curve::new("n", "kappa (u^(5/3) form)", &ns, &per_n));
    let k_exact = per_n.iter().copied().fold(f64::INFINITY, f64::min);
    rep.metric("quenched_kappa_min", k_exact);
    rep.criterion(Criterion::at_least("exact contact-law tails dominated with kappa > 0", k_exact, f64::MIN_POSITIVE));

    let scan_cfg = cfg.mc(law, cfg.disorder, &[cfg.concentration_n], cfg.clt_samples)?;
    let scan = mc::concentration_scan_scaled(&scan_cfg, cfg.h, cfg.concentration_n, &cfg.u_grid)?;
    for (name, t) in [("free_energy", &scan.free_energy), ("centering", &scan.centering)] {
        rep.curve(&format!("{name}_tail"), Curve::new("u", "frequency", &t.u, &t.frequency));
        rep.curve(&format!("{name}_tail_upper"), Curve::new("u", "Wilson upper", &t.u, &t.wilson_upper));
        rep.metric(&format!("{name}_kappa_linear"), t.kappa_linear);
        rep.metric(&format!("{name}_kappa_five_thirds"), t.kappa_five_thirds);
    }
    let se = |k: f64| if k.is_finite() { k / (cfg.clt_samples as f64).sqrt() } else { 0.0 };
    rep.fitted("kappa_free_energy", scan.free_energy.kappa_linear, se(scan.free_energy.kappa_linear));
    rep.fitted("kappa_centering", scan.centering.kappa_five_thirds, se(scan.centering.kappa_five_thirds));
    rep.criterion(Criterion::at_least("free-energy tails dominated, kappa > 0", scan.free_energy.kappa_linear, f64::MIN_POSITIVE));
    rep.criterion(Criterion::at_least("centering tails dominated, kappa > 0", scan.centering.kappa_five_thirds, f64::MIN_POSITIVE));
    Ok(rep.finish())
}

fn check_centering(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C4, cfg, json!({"n_values": cfg.centering_n, "samples": cfg.clt_samples}));
    if cfg.is_pure() {
        return Ok(rep.skip("pure model"));
    }
    let m = cfg.mc(law, cfg.disorder, &cfg.centering_n, cfg.clt_samples)?;
    let grid = mc::centering_grid(&m, cfg.h)?;
    let ns = sizes(&cfg.centering_n);
    let means: Vec<f64> = grid.iter().map(|c| c.mean).collect();
    let w: Vec<f64> = grid.iter().map(|c| c.variance_per_n).collect();
    rep.curve("centering_mean", Curve::new("n", "E[E_n[L_n]]", &ns, &means));
    rep.curve("w_hat", Curve::new("n", "Var/n", &ns, &w));
    let last = grid.last().unwrap();
    rep.fitted("w", last.variance_per_n, last.variance_per_n_stderr);
    let fit = stats::ols(&ns, &means);
    rep.fitted("rho", fit.slope, fit.slope_stderr);
    rep.fitted("c", fit.intercept, fit.intercept_stderr);
    let offset = grid.iter().map(|c| (c.mean - fit.slope * c.n as f64).abs()).fold(0.0, f64::max);
    rep.metric("max_abs_offset", offset);
    let worst_resid = grid
        .iter()
        .map(|c| (c.mean - fit.slope * c.n as f64 - fit.intercept).abs() / c.mean_stderr)
        .fold(0.0, f64::max);
    rep.metric("offset_residual_in_stderr", worst_resid);
    rep.criterion(Criterion::at_most("mean - rho n is a single constant (residual, stderr units)", worst_resid, 3.0));
    rep.criterion(Criterion::at_least("w / stderr", last.variance_per_n / last.variance_per_n_stderr, 3.0));
    let ks = last.ks.unwrap_or(f64::NAN);
    rep.metric("ks_centering", ks);
    rep.criterion(Criterion::at_most("KS of standardized centering", ks, 0.05));
    let g = grid.len();
    let (a, b) = (&grid[g - 2], &grid[g - 1]);
    let z = (b.variance_per_n - a.variance_per_n).abs() / (a.variance_per_n_stderr.powi(2) + b.variance_per_n_stderr.powi(2)).sqrt();
    rep.metric("w_drift_in_stderr", z);
    let zero = cfg.mc(law, DisorderLaw::zero(), &[last.n], cfg.clt_samples)?;
    let control = mc::centering_statistics(&zero, cfg.h, last.n)?;
    rep.metric("w_zero_disorder_control", control.variance_per_n);
    rep.criterion(Criterion::within("zero-disorder control: w exactly 0", control.variance_per_n, 0.0, 0.0));
    Ok(rep.finish())
}

fn check_mu_bounds(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C5, cfg, json!({"h_grid": cfg.h_grid, "n_values": cfg.mu_n, "samples": cfg.samples}));
    let m = cfg.mc(law, cfg.disorder, &cfg.mu_n, cfg.samples)?;
    let mut mus = Vec::new();
    let mut fs = Vec::new();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut c_hat = f64::INFINITY;
    let mut c_se = 0.0;
    for &h in &cfg.h_grid {
        let e = mc::estimate_mu(&m, h)?;
        let excess = (e.mu.mean - e.f.mean) - 2.0 * e.gap_stderr;
        worst_gap = worst_gap.max(excess);
        let lower = e.f.mean.min(e.f.mean * e.f.mean);
        let c = e.mu.mean / lower;
        if c < c_hat {
            c_hat = c;
            c_se = e.mu.stderr / lower;
        }
        mus.push(e.mu.mean);
        fs.push(e.f.mean);
    }
    rep.curve("mu_hat", Curve::new("h", "mu", &cfg.h_grid, &mus));
    rep.curve("f_hat", Curve::new("h", "f", &cfg.h_grid, &fs));
    rep.metric("max_mu_minus_f_minus_2sigma", worst_gap);
    rep.fitted("c", c_hat, c_se);
    rep.criterion(Criterion::at_most("mu - f - 2 sigma, worst h", worst_gap, 0.0));
    rep.criterion(Criterion::at_least("c in mu >= c min{f, f^2}", c_hat, f64::MIN_POSITIVE));
    Ok(rep.finish())
}

/// `P[(1-ε) log n/μ ≤ M_n ≤ (1+ε) log n/μ]`.
pub fn excursion_window_mass(sys: &QuenchedSystem<'_>, mu: f64, eps: f64) -> Result<f64> {
    let n = sys.n();
    let c = (n as f64).ln() / mu;
    let lo = ((1.0 - eps) * c).ceil().max(1.0) as usize;
    let hi = ((1.0 + eps) * c).floor() as usize;
    if hi < lo {
        return Ok(0.0);
    }
    let upper = sys.max_excursion_cdf(hi.min(n))?;
    let lower = if lo >= 2 { sys.max_excursion_cdf(lo - 1)? } else { 0.0 };
    Ok((upper - lower).max(0.0))
}

fn check_max_excursion(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(
        CheckId::C6,
        cfg,
        json!({"n_values": cfg.excursion_n, "samples": cfg.excursion_samples, "eps": cfg.excursion_eps}),
    );
    let mut runs = vec![("", cfg.disorder)];
    if !cfg.is_pure() {
        runs.push(("pure_", DisorderLaw::zero()));
    }
    let ns = sizes(&cfg.excursion_n);
    for (tag, disorder) in runs {
        let m = cfg.mc(law, disorder, &cfg.excursion_n, cfg.excursion_samples)?;
        let mu = mc::estimate_mu(&m, cfg.h)?.mu;
        rep.fitted(&format!("{tag}mu"), mu.mean, mu.stderr);
        let n_top = m.n_max();
        let m_top = ((2.0 * (n_top as f64).ln() / mu.mean).ceil() as usize).clamp(1, n_top);
        let per = m.map_samples(n_top, |w| {
            let mut masses = Vec::new();
            let mut cdfs = Vec::new();
            for &n in &cfg.excursion_n {
                let sys = QuenchedSystem::new(law, cfg.h, w.charges(), n)?;
                masses.push(excursion_window_mass(&sys, mu.mean, cfg.excursion_eps)?);
                if n == n_top {
                    for k in 1..=m_top {
                        cdfs.push(sys.max_excursion_cdf(k)?);
                    }
                }
            }
            Ok((masses, cdfs))
        })?;
        let mut mass = Vec::new();
        let mut se = Vec::new();
        for g in 0..ns.len() {
            let (a, b) = stats::mean_stderr(&per.iter().map(|p| p.0[g]).collect::<Vec<_>>());
            mass.push(a);
            se.push(b);
        }
        let cdf: Vec<f64> = (0..m_top).map(|k| stats::mean_var(&per.iter().map(|p| p.1[k]).collect::<Vec<_>>()).0).collect();
        let xs: Vec<f64> = (1..=m_top).map(|k| k as f64 / (n_top as f64).ln()).collect();
        rep.curve(&format!("{tag}window_mass"), Curve::new("n", "mass", &ns, &mass));
        rep.curve(&format!("{tag}cdf_m_over_log_n"), Curve::new("M/log n", "P[M_n/log n <= x]", &xs, &cdf));
        rep.criterion(Criterion::at_least(&format!("{tag}window mass at largest n"), *mass.last().unwrap(), 0.9));
        rep.criterion(Criterion::at_least(
            &format!("{tag}window mass increases along n (2 sigma)"),
            (stats::non_decreasing_within(&mass, &se, 2.0) && mass.last() > mass.first()) as u8 as f64,
            1.0,
        ));
    }
    Ok(rep.finish())
}

fn check_decay(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C7, cfg, json!({"samples": cfg.samples, "decay": cfg.decay}));
    let m = cfg.mc(law, cfg.disorder, &[cfg.decay.system_size], cfg.samples)?;
    let d = mc::correlation_decay_scan(&m, cfg.h, &cfg.decay)?;
    let js: Vec<f64> = (1..=d.mean_a.len()).map(|j| j as f64).collect();
    rep.curve("a_j", Curve::new("j", "mean a_j", &js, &d.mean_a));
    rep.curve("mixing", Curve::new("b - a", "mixing proxy", &sizes(&d.gaps), &d.mixing));
    rep.fitted("gamma", d.gamma, d.gamma_stderr);
    rep.fitted("G", d.log_g.exp(), d.log_g.exp() * d.log_g_stderr);
    rep.fitted("mixing_gamma", d.mixing_gamma, d.mixing_gamma_stderr);
    rep.metric("r2", d.r2);
    rep.metric("mixing_r2", d.mixing_r2);
    rep.metric("floor_reached", d.floor_reached as u8 as f64);
    rep.criterion(Criterion::at_least("gamma / stderr", d.gamma / d.gamma_stderr, 3.0));
    rep.criterion(Criterion::at_least("R^2 of avoidance fit", d.r2, 0.98));
    rep.criterion(Criterion::at_least("mixing gamma / stderr", d.mixing_gamma / d.mixing_gamma_stderr, 3.0));
    Ok(rep.finish())
}

fn check_variance(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C8, cfg, json!({"n_values": cfg.clt_n, "samples": cfg.samples}));
    let m = cfg.mc(law, cfg.disorder, &cfg.clt_n, cfg.samples)?;
    let th = mc::thermal_moments(&m, cfg.h)?;
    let ns = sizes(&cfg.clt_n);
    let v: Vec<f64> = th.iter().map(|t| t.v.mean).collect();
    rep.curve("v_hat", Curve::new("n", "E[var_n(L_n)]/n", &ns, &v));
    let last = &th.last().unwrap().v;
    rep.fitted("v", last.mean, last.stderr);
    rep.fitted("rho", th.last().unwrap().rho.mean, th.last().unwrap().rho.stderr);
    let worst = th
        .iter()
        .map(|t| if t.v.stderr > 0.0 { t.v.mean / t.v.stderr } else if t.v.mean > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    rep.metric("min_v_over_stderr", worst);
    rep.criterion(Criterion::at_least("v / stderr at every n", worst, 3.0));
    Ok(rep.finish())
}

/// Sites where `E[X_a] < 1/(1 + ξ e^{-h-ω_a} min{a,n-a}^ξ)` (relative slack 1e-12).
pub fn contact_bound_violations(sys: &QuenchedSystem<'_>, xi: f64) -> Result<Vec<usize>> {
    let n = sys.n();
    let mut bad = Vec::new();
    for a in 1..n {
        let bound = 1.0 / (1.0 + xi * (-sys.h() - sys.charges()[a - 1]).exp() * (a.min(n - a) as f64).powf(xi));
        if sys.contact_probability(a)? < bound * (1.0 - 1e-12) {
            bad.push(a);
        }
    }
    Ok(bad)
}

/// Exchange inequality on every pair of left/right contact patterns at every
/// interior site; returns the largest `lhs / rhs` (at most 1 when it holds).
pub fn exchange_worst_ratio(ps: &PathSet, law: &InterArrivalLaw, h: f64, omega: &[f64]) -> f64 {
    let n = ps.n();
    let xi = law.xi();
    let lz = ps.log_partition();
    let mut worst: f64 = 0.0;
    for a in 1..n {
        let k = xi * (-h - omega[a - 1]).exp() * (a.min(n - a) as f64).powf(xi);
        let mut with = std::collections::HashMap::new();
        let mut without = std::collections::HashMap::new();
        for (c, lw) in ps.iter() {
            let key = c.mask & !(1u32 << (a - 1));
            let p = (lw - lz).exp();
            let slot = if c.x(a) { &mut with } else { &mut without };
            *slot.entry(key).or_insert(0.0) += p;
        }
        for (key, lhs) in without {
            let rhs = k * with.get(&key).copied().unwrap_or(0.0);
            let ratio = if rhs > 0.0 { lhs / rhs } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
            worst = worst.max(ratio);
        }
    }
    worst
}

/// `max |P[l, r | X_a] - P[l | X_a] P[r | X_a]|` over sites and over all
/// left/right contact patterns.
pub fn factorization_residual(ps: &PathSet) -> f64 {
    let n = ps.n();
    let lz = ps.log_partition();
    let mut worst: f64 = 0.0;
    for a in 1..n {
        let left_mask = (1u32 << (a - 1)) - 1;
        let mut joint = std::collections::HashMap::new();
        let mut left = std::collections::HashMap::new();
        let mut right = std::collections::HashMap::new();
        let mut pa = 0.0;
        for (c, lw) in ps.iter() {
            if !c.x(a) {
                continue;
            }
            let p = (lw - lz).exp();
            let (l, r) = (c.mask & left_mask, c.mask >> a);
            pa += p;
            *joint.entry((l, r)).or_insert(0.0) += p;
            *left.entry(l).or_insert(0.0) += p;
            *right.entry(r).or_insert(0.0) += p;
        }
        for (&l, &pl) in &left {
            for (&r, &pr) in &right {
                let pj = joint.get(&(l, r)).copied().unwrap_or(0.0);
                worst = worst.max((pj / pa - (pl / pa) * (pr / pa)).abs());
            }
        }
    }
    worst
}

/// Deterministic random oracle instances `(h, ω)` for checks on small systems.
fn oracle_instance(cfg: &CheckConfig, index: usize, n: usize) -> (f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed ^ 0x6f72_6163_6c65);
    rng.set_stream(index as u64);
    let h = rng.random_range(-2.0..4.0);
    let w = sample_disorder(&cfg.disorder, n, cfg.master_seed ^ 0x6f72_6163_6c65, index as u64);
    (h, w.charges().to_vec())
}

fn check_contact_bound(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(
        CheckId::C9,
        cfg,
        json!({"h_grid": cfg.h_grid, "n": cfg.bound_n, "samples": cfg.samples, "oracle_instances": cfg.oracle_instances, "xi": law.xi()}),
    );
    let xi = law.xi();
    let m = cfg.mc(law, cfg.disorder, &[cfg.bound_n], cfg.samples)?;
    let mut violations = 0usize;
    for &h in &cfg.h_grid {
        let v = m.map_samples(cfg.bound_n, |w| {
            Ok(contact_bound_violations(&QuenchedSystem::new(law, h, w.charges(), cfg.bound_n)?, xi)?.len())
        })?;
        violations += v.iter().sum::<usize>();
    }
    rep.metric("contact_bound_violations", violations as f64);
    rep.criterion(Criterion::at_most("contact lower bound violations", violations as f64, 0.0));

    let mut worst: f64 = 0.0;
    for i in 0..cfg.oracle_instances {
        let n = 2 + i % 9;
        let (h, omega) = oracle_instance(cfg, i, n);
        let ps = PathSet::enumerate(law, h, &omega, n)?;
        worst = worst.max(exchange_worst_ratio(&ps, law, h, &omega));
    }
    rep.metric("exchange_worst_ratio", worst);
    rep.criterion(Criterion::at_most("exchange inequality lhs / rhs, worst", worst, 1.0 + 1e-12));
    Ok(rep.finish())
}

fn check_factorization(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C10, cfg, json!({"n": cfg.oracle_n, "instances": cfg.oracle_instances}));
    let mut worst: f64 = 0.0;
    for i in 0..cfg.oracle_instances {
        let (h, omega) = oracle_instance(cfg, i, cfg.oracle_n);
        let ps = PathSet::enumerate(law, h, &omega, cfg.oracle_n)?;
        worst = worst.max(factorization_residual(&ps));
    }
    rep.metric("max_residual", worst);
    rep.criterion(Criterion::at_most("factorization residual", worst, 1e-12));
    Ok(rep.finish())
}

fn check_hardy_littlewood(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C11, cfg, json!({"n_values": cfg.hl_n, "seeds": cfg.hl_seeds, "rho_samples": cfg.clt_samples, "rho_n_values": cfg.centering_n}));
    // ρ̂ from an independent disorder stream
    let rho_cfg = cfg.mc(law, cfg.disorder, &cfg.centering_n, cfg.clt_samples)?.with_seed(cfg.master_seed.wrapping_add(0x9e37_79b9));
    let cg = mc::centering_grid(&rho_cfg, cfg.h)?;
    let fit = stats::ols(&sizes(&cfg.centering_n), &cg.iter().map(|c| c.mean).collect::<Vec<_>>());
    let (rho, rho_se) = (fit.slope, fit.slope_stderr);
    rep.fitted("rho", rho, rho_se);

    let m = cfg.mc(law, cfg.disorder, &cfg.hl_n, cfg.hl_seeds)?;
    let n_top = m.n_max();
    let start = 16.min(cfg.hl_n[0]);
    // running maximum over every 16 <= n <= N
    let ratios: Vec<Vec<f64>> = m.map_samples(n_top, |w| {
        let k = QuenchedSystem::new(law, cfg.h, w.charges(), n_top)?.prefix_mean_contacts();
        let mut out = Vec::new();
        let mut run: f64 = 0.0;
        let mut g = 0;
        for n in start..=n_top {
            let nf = n as f64;
            run = run.max((k[n] - rho * nf).abs() / (nf * nf.ln()).sqrt());
            if n == cfg.hl_n[g] {
                out.push(run);
                g += 1;
                if g == cfg.hl_n.len() {
                    break;
                }
            }
        }
        Ok(out)
    })?;
    let ln_n: Vec<f64> = cfg.hl_n.iter().map(|&n| (n as f64).ln()).collect();
    let slopes: Vec<f64> = ratios.iter().map(|r| stats::ols(&ln_n, r).slope).collect();
    let (slope, slope_se) = stats::mean_stderr(&slopes);
    let mean_ratio: Vec<f64> = (0..ln_n.len()).map(|g| stats::mean_var(&ratios.iter().map(|r| r[g]).collect::<Vec<_>>()).0).collect();
    rep.curve("max_ratio", Curve::new("ln n", "max |kappa1 - rho n| / sqrt(n ln n)", &ln_n, &mean_ratio));
    rep.fitted("slope", slope, slope_se);
    rep.metric("max_ratio_overall", ratios.iter().flatten().copied().fold(0.0, f64::max));
    rep.criterion(Criterion::at_most("slope vs log n minus 2 sigma", slope - 2.0 * slope_se, 0.0));
    Ok(rep.finish())
}

fn check_centering_cumulants(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let rep = report(CheckId::C12, cfg, json!({"n_values": cfg.centering_n, "samples": cfg.clt_samples}));
    if cfg.is_pure() {
        return Ok(rep.skip("pure model"));
    }
    let mut rep = rep;
    let m = cfg.mc(law, cfg.disorder, &cfg.centering_n, cfg.clt_samples)?;
    let grid = mc::centering_grid(&m, cfg.h)?;
    let ns = sizes(&cfg.centering_n);
    for (r, get) in [(3usize, (|c: &mc::CenteringStats| (c.kappa3_per_n, c.kappa3_stderr)) as fn(&mc::CenteringStats) -> (f64, f64)), (4, |c| (c.kappa4_per_n, c.kappa4_stderr))] {
        let vals: Vec<(f64, f64)> = grid.iter().map(get).collect();
        let v: Vec<f64> = vals.iter().map(|x| x.0).collect();
        let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let se: Vec<f64> = vals.iter().map(|x| x.1).collect();
        rep.curve(&format!("kappa{r}_per_n"), Curve::new("n", &format!("k{r}/n"), &ns, &v));
        let (a, b) = (vals[0], vals[vals.len() - 1]);
        let growth = (b.0.abs() - a.0.abs()) / (a.1 * a.1 + b.1 * b.1).sqrt();
        rep.metric(&format!("kappa{r}_growth_in_sigma"), growth);
        let c = abs.iter().copied().fold(0.0, f64::max) / factorial(r).powi(3);
        rep.fitted(&format!("c{r}"), c.powf(1.0 / r as f64), 0.0);
        rep.criterion(Criterion::at_most(&format!("|kappa{r}|/n growth across n (sigma)"), growth, 3.0));
        rep.criterion(Criterion::at_least(
            &format!("|kappa{r}|/n bounded along n (3 sigma)"),
            stats::non_increasing_within(&abs, &se, 3.0) as u8 as f64,
            1.0,
        ));
    }
    Ok(rep.finish())
}

fn check_small_fraction(cfg: &CheckConfig, law: &InterArrivalLaw) -> Result<CheckReport> {
    let mut rep = report(CheckId::C13, cfg, json!({"n_values": cfg.fraction_n, "samples": cfg.samples, "delta_fraction": cfg.fraction_delta}));
    let m = cfg.mc(law, cfg.disorder, &cfg.fraction_n, cfg.samples)?;
    let th = mc::thermal_moments(&m, cfg.h)?;
    let rho = th.last().unwrap().rho.mean;
    let delta = cfg.fraction_delta * rho;
    rep.fitted("rho", rho, th.last().unwrap().rho.stderr);
    rep.metric("delta", delta);
    let per = m.map_samples(m.n_max(), |w| {
        cfg.fraction_n
            .iter()
            .map(|&n| Ok(QuenchedSystem::new(law, cfg.h, w.charges(), n)?.contact_law()?.lower_fraction_probability(delta)))
            .collect::<Result<Vec<f64>>>()
    })?;
    let ns = sizes(&cfg.fraction_n);
    let mean: Vec<f64> = (0..ns.len()).map(|g| stats::mean_var(&per.iter().map(|p| p[g]).collect::<Vec<_>>()).0).collect();
    rep.curve("mean_probability", Curve::new("n", "E[P(L_n < delta n)]", &ns, &mean));
    if mean.iter().any(|&p| !(p > 0.0)) {
        rep.metric("underflow", 1.0);
        rep.criterion(Criterion::at_least("probabilities resolvable (no underflow)", 0.0, 1.0));
        return Ok(rep.finish());
    }
    let logs: Vec<f64> = mean.iter().map(|p| p.ln()).collect();
    let fit = stats::ols(&ns, &logs);
    rep.fitted("rate", -fit.slope, fit.slope_stderr);
    rep.metric("r2", fit.r2);
    rep.criterion(Criterion::at_least("decay rate / stderr", -fit.slope / fit.slope_stderr.max(f64::MIN_POSITIVE), 3.0));

    // exact law against enumeration at oracle size, delta = 1/2
    let (h, omega) = oracle_instance(cfg, 0, cfg.oracle_n);
    let n = cfg.oracle_n;
    let dp = QuenchedSystem::new(law, h, &omega, n)?.contact_law()?.lower_fraction_probability(0.5);
    let brute = PathSet::enumerate(law, h, &omega, n)?.expectation(|c| ((c.contacts() as f64) < 0.5 * n as f64) as u8 as f64);
    rep.metric("oracle_abs_difference", (dp - brute).abs());
    rep.criterion(Criterion::at_most("exact law vs enumeration at oracle size", (dp - brute).abs(), 1e-10));
    Ok(rep.finish())
}
