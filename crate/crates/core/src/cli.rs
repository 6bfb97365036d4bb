//! Command-line front end: configuration, orchestration and output files.
//!
//! A run is described by one TOML file with the blocks `[model]`,
//! `[disorder]`, `[grids]`, `[run]` and `[checks]`. Flags override scalar
//! fields only. Every run writes the resolved configuration next to its
//! outputs so it can be replayed as a single artifact.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::disorder_mc::{self as mc, DecayOptions, EstimateSeries, McConfig, MIN_CLT_SAMPLES, MIN_CONCENTRATION_SAMPLES};
use crate::error::{Error, Result};
use crate::model::{sample_disorder, DisorderLaw, LawSpec, SEED_SCHEME};
use crate::numerics::DEFAULT_JET_ORDER;
use crate::plot::{Plot, Series};
use crate::quenched_dp::{QuenchedSystem, DEFAULT_CONTACT_LAW_CAP};
use crate::report::Report;
use crate::theorems::{full_report, lattice_ks, CheckConfig, CheckId};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "PINLAB_OUT";
const FALLBACK_OUT: &str = "pinlab-out";

pub const SERIES_FILE: &str = "series.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SEEDS_FILE: &str = "seeds.json";
pub const RESOLVED_FILE: &str = "config.resolved.toml";
pub const CSV_HEADER: &str = "quantity,h,n,value,stderr,samples";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub h_values: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Tail deviations in units of the sample standard deviation.
    pub u_grid: Vec<f64>,
    /// Avoidance window `J`; 0 leaves decay out of `scan`.
    pub window: usize,
    pub r_max: usize,
    /// Largest `n` at which `scan` computes quenched KS distances.
    pub ks_max_n: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            h_values: vec![3.0],
            n_values: vec![128, 256, 512],
            u_grid: (0..12).map(|k| 0.5 * k as f64).collect(),
            window: 0,
            r_max: 4,
            ks_max_n: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub samples: usize,
    pub master_seed: u64,
    /// Disorder sample used by `compute`.
    pub sample_index: u64,
    pub jet_order: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings { samples: 200, master_seed: 1, sample_index: 0, jet_order: DEFAULT_JET_ORDER, out: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: LawSpec,
    pub disorder: DisorderLaw,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub run: RunSettings,
    #[serde(default)]
    pub checks: CheckConfig,
}

impl RunConfig {
    /// Parses and validates; messages carry the offending line when known.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate().map_err(|e| match locate(text, &e.to_string()) {
            Some(line) => Error::Config(format!("line {line}: {e}")),
            None => e,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_kind(&e))))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let law = self.model.build()?;
        let g = &self.grids;
        if g.h_values.is_empty() || !g.h_values.windows(2).all(|w| w[0] < w[1]) || g.h_values.iter().any(|h| !h.is_finite()) {
            return Err(Error::Config("h_values must be finite, nonempty and increasing".into()));
        }
        if g.n_values.is_empty() || !g.n_values.windows(2).all(|w| w[0] < w[1]) || g.n_values[0] == 0 {
            return Err(Error::Config("n_values must be positive, nonempty and increasing".into()));
        }
        let top = *g.n_values.last().unwrap();
        if top > law.n_max() {
            return Err(Error::Config(format!("n_values reach {top}, beyond the law horizon n_max = {}", law.n_max())));
        }
        if g.u_grid.iter().any(|u| !(*u >= 0.0)) {
            return Err(Error::Config("u_grid entries must be nonnegative".into()));
        }
        if g.r_max == 0 || g.r_max > self.run.jet_order {
            return Err(Error::Config(format!("r_max must lie in 1..=jet_order ({}), got {}", self.run.jet_order, g.r_max)));
        }
        if g.window != 0 && (g.window < 16 || g.window + g.window / 2 * 2 > top) {
            return Err(Error::Config(format!("window must be 0 or in 16..={}, got {}", top / 2, g.window)));
        }
        if self.run.samples < 2 {
            return Err(Error::Config(format!("samples must be at least 2, got {}", self.run.samples)));
        }
        Ok(())
    }

    /// Check parameters with the model blocks filled in.
    pub fn check_config(&self) -> CheckConfig {
        CheckConfig {
            law: self.model.clone(),
            disorder: self.disorder,
            master_seed: self.run.master_seed,
            jet_order: self.run.jet_order,
            ..self.checks.clone()
        }
    }

    fn mc_config(&self) -> Result<McConfig> {
        let mut m = McConfig::new(
            self.model.build()?,
            self.disorder,
            self.grids.h_values.clone(),
            self.grids.n_values.clone(),
            self.run.samples,
            self.run.master_seed,
        )?;
        m.jet_order = self.run.jet_order;
        Ok(m)
    }
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// First line whose key is named in `msg`.
fn locate(text: &str, msg: &str) -> Option<usize> {
    text.lines().enumerate().find_map(|(i, line)| {
        let key = line.split('=').next()?.trim();
        let named = !key.is_empty()
            && line.contains('=')
            && msg.split(|c: char| !(c.is_alphanumeric() || c == '_')).any(|w| w == key);
        named.then_some(i + 1)
    })
}

/// One CSV record.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub h: f64,
    pub n: Option<usize>,
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl From<&EstimateSeries> for Row {
    fn from(e: &EstimateSeries) -> Self {
        Row { quantity: e.quantity.as_str().into(), h: e.h, n: e.n, value: e.mean, stderr: e.stderr, samples: e.samples }
    }
}

/// `series.csv` contents; reals use shortest round-trip formatting.
pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{},{}", r.quantity, r.h, n, r.value, r.stderr, r.samples);
    }
    s
}

pub fn csv_to_rows(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Config(format!("series file must start with {CSV_HEADER:?}")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || Error::Config(format!("series line {}: malformed record {l:?}", i + 2));
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(Row {
                quantity: f[0].to_string(),
                h: real(f[1])?,
                n: if f[2].is_empty() { None } else { Some(f[2].parse().map_err(|_| bad())?) },
                value: real(f[3])?,
                stderr: real(f[4])?,
                samples: f[5].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Writes through a sibling temporary file and a rename, so a failed run
/// never leaves a truncated output.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|source| Error::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub seed_scheme: String,
}

#[derive(Parser, Debug)]
#[command(name = "pinlab", version, about = "Exact quenched observables and localized-phase checks for disordered pinning models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact observables of one disorder sample at every (h, n) of the grid.
    Compute(CommonArgs),
    /// Monte Carlo estimates over the (h, n) grid.
    Scan(CommonArgs),
    /// Run the localized-phase checks and write report.json.
    Verify(CommonArgs),
    /// Plot series.csv and report.json of an output directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override [run] master_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated check ids, e.g. C2,C7.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<CheckId>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory holding the outputs of earlier runs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Read the output directory from this config's [run] block.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// What a finished command did.
#[derive(Debug)]
pub struct Outcome {
    pub out: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: Option<Report>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if !r.all_passed() => 2,
            _ => 0,
        }
    }
}

fn out_dir(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.run.out.clone()))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT))
}

fn resolve(args: &CommonArgs) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.run.master_seed = seed;
    }
    if !args.checks.is_empty() {
        cfg.checks.select = args.checks.clone();
    }
    let out = out_dir(args.out.as_deref(), Some(&cfg));
    Ok((cfg, out))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn write_common(cfg: &RunConfig, out: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    let resolved = out.join(RESOLVED_FILE);
    write_atomic(&resolved, cfg.to_toml().as_bytes())?;
    let seeds = out.join(SEEDS_FILE);
    let rec = SeedRecord { master_seed: cfg.run.master_seed, seed_scheme: SEED_SCHEME.into() };
    write_atomic(&seeds, (serde_json::to_string_pretty(&rec).expect("seed record") + "\n").as_bytes())?;
    files.extend([resolved, seeds]);
    Ok(())
}

/// Exact observables for the configured disorder sample.
pub fn compute_rows(cfg: &RunConfig) -> Result<Vec<Row>> {
    let law = cfg.model.build()?;
    let top = *cfg.grids.n_values.last().unwrap();
    let omega = sample_disorder(&cfg.disorder, top, cfg.run.master_seed, cfg.run.sample_index);
    let mut rows = Vec::new();
    let row = |q: &str, h: f64, n: usize, v: f64| Row { quantity: q.into(), h, n: Some(n), value: v, stderr: 0.0, samples: 1 };
    for &h in &cfg.grids.h_values {
        let sys = QuenchedSystem::new(&law, h, omega.charges(), top)?;
        let pre = sys.prefix_log_z();
        let minus = sys.prefix_log_z_minus();
        let cum = sys.prefix_cumulants(cfg.grids.r_max, cfg.run.jet_order)?;
        for &n in &cfg.grids.n_values {
            rows.push(row("log_z", h, n, pre[n]));
            rows.push(row("log_z_minus", h, n, minus[n]));
            rows.push(row("f_n", h, n, pre[n] / n as f64));
            for r in 1..=cfg.grids.r_max {
                rows.push(row(&format!("kappa{r}"), h, n, cum[n].get(r)));
            }
            if n <= DEFAULT_CONTACT_LAW_CAP.min(cfg.grids.ks_max_n) {
                let sub = QuenchedSystem::new(&law, h, omega.charges(), n)?;
                rows.push(row("ks_quenched", h, n, lattice_ks(&sub.contact_law()?)));
            }
        }
    }
    Ok(rows)
}

/// Monte Carlo series over the grid.
pub fn scan_rows(cfg: &RunConfig) -> Result<Vec<Row>> {
    let m = cfg.mc_config()?;
    let s = m.samples;
    let top = m.n_max();
    let mut rows: Vec<Row> = Vec::new();
    for &h in &cfg.grids.h_values {
        for fe in mc::estimate_f_grid(&m, h)? {
            rows.push((&fe.quenched).into());
            rows.push((&fe.annealed).into());
        }
        for th in mc::thermal_moments(&m, h)? {
            rows.push((&th.rho).into());
            rows.push((&th.v).into());
        }
        if m.n_values.len() >= 3 {
            let mu = mc::estimate_mu(&m, h)?;
            rows.push((&mu.mu).into());
            rows.push((&mu.mu_last_gap).into());
        }
        if s >= MIN_CLT_SAMPLES {
            for c in mc::centering_grid(&m, h)? {
                let r = |q: &str, v: f64, se: f64| Row { quantity: q.into(), h, n: Some(c.n), value: v, stderr: se, samples: s };
                rows.push(r("centering_mean", c.mean, c.mean_stderr));
                rows.push(r("w", c.variance_per_n, c.variance_per_n_stderr));
                rows.push(r("ks_centering", c.ks.unwrap_or(f64::NAN), f64::NAN));
            }
        }
        let ks_n: Vec<usize> = m.n_values.iter().copied().filter(|&n| n <= cfg.grids.ks_max_n.min(DEFAULT_CONTACT_LAW_CAP)).collect();
        if let Some(&ks_top) = ks_n.last() {
            let per = m.map_samples(ks_top, |w| {
                ks_n.iter()
                    .map(|&n| Ok(lattice_ks(&QuenchedSystem::new(&m.law, h, w.charges(), n)?.contact_law()?)))
                    .collect::<Result<Vec<f64>>>()
            })?;
            for (g, &n) in ks_n.iter().enumerate() {
                let (v, se) = crate::stats::mean_stderr(&per.iter().map(|p| p[g]).collect::<Vec<_>>());
                rows.push(Row { quantity: "ks_quenched".into(), h, n: Some(n), value: v, stderr: se, samples: s });
            }
        }
        if cfg.grids.window > 0 {
            let j = cfg.grids.window;
            let opts = DecayOptions {
                window: j,
                fit_range: ((j / 12).max(1), 2 * j / 3),
                offset_stride: 32,
                system_size: top,
                max_gap: j / 2,
                ..DecayOptions::default()
            };
            let d = mc::correlation_decay_scan(&m, h, &opts)?;
            rows.push(Row { quantity: "decay_gamma".into(), h, n: Some(top), value: d.gamma, stderr: d.gamma_stderr, samples: s });
            rows.push(Row {
                quantity: "decay_G".into(),
                h,
                n: Some(top),
                value: d.log_g.exp(),
                stderr: d.log_g.exp() * d.log_g_stderr,
                samples: s,
            });
            for (k, (a, se)) in d.mean_a.iter().zip(&d.stderr_a).enumerate() {
                rows.push(Row { quantity: format!("a_{}", k + 1), h, n: Some(top), value: *a, stderr: *se, samples: s });
            }
        }
        if s >= MIN_CONCENTRATION_SAMPLES && !cfg.disorder.is_pure() {
            let c = mc::concentration_scan_scaled(&m, h, top, &cfg.grids.u_grid)?;
            let r = |q: &str, v: f64| Row { quantity: q.into(), h, n: Some(top), value: v, stderr: f64::NAN, samples: s };
            rows.push(r("conc_kappa", c.free_energy.kappa_linear));
            rows.push(r("conc_kappa_centering", c.centering.kappa_five_thirds));
        }
    }
    Ok(rows)
}

pub fn compute(args: &CommonArgs) -> Result<Outcome> {
    let (cfg, out) = resolve(args)?;
    let rows = with_threads(args.threads, || compute_rows(&cfg))?;
    let mut files = vec![out.join(SERIES_FILE)];
    write_atomic(&files[0], rows_to_csv(&rows).as_bytes())?;
    write_common(&cfg, &out, &mut files)?;
    Ok(Outcome { out, files, report: None })
}

pub fn scan(args: &CommonArgs) -> Result<Outcome> {
    let (cfg, out) = resolve(args)?;
    let rows = with_threads(args.threads, || scan_rows(&cfg))?;
    let mut files = vec![out.join(SERIES_FILE)];
    write_atomic(&files[0], rows_to_csv(&rows).as_bytes())?;
    write_common(&cfg, &out, &mut files)?;
    Ok(Outcome { out, files, report: None })
}

pub fn verify(args: &CommonArgs) -> Result<Outcome> {
    let (cfg, out) = resolve(args)?;
    let checks = cfg.check_config();
    checks.validate()?;
    let reports = with_threads(args.threads, || full_report(&checks, &[]))?;
    let report = Report::new(cfg.run.master_seed, reports);
    let mut files = vec![out.join(REPORT_FILE)];
    write_atomic(&files[0], (serde_json::to_string_pretty(&report).expect("report serializes") + "\n").as_bytes())?;
    write_common(&cfg, &out, &mut files)?;
    Ok(Outcome { out, files, report: Some(report) })
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// SVG plots for whatever outputs exist in `out`.
pub fn render_plots(out: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let plots = out.join("plots");
    let series = out.join(SERIES_FILE);
    if series.exists() {
        let text = fs::read_to_string(&series).map_err(|source| Error::Io { path: series.clone(), source })?;
        let rows = csv_to_rows(&text)?;
        let mut quantities: Vec<&str> = rows.iter().map(|r| r.quantity.as_str()).collect();
        quantities.dedup();
        quantities.sort_unstable();
        quantities.dedup();
        let avoidance: Vec<&Row> = rows.iter().filter(|r| r.quantity.starts_with("a_")).collect();
        for q in quantities.iter().filter(|q| !q.starts_with("a_")) {
            let sel: Vec<&Row> = rows.iter().filter(|r| r.quantity == *q && r.n.is_some()).collect();
            let mut hs: Vec<f64> = sel.iter().map(|r| r.h).collect();
            hs.dedup();
            let mut ns: Vec<usize> = sel.iter().filter_map(|r| r.n).collect();
            ns.sort_unstable();
            ns.dedup();
            if ns.len() > 1 {
                let mut p = Plot::new(format!("{q} vs n"), "n", *q);
                for &h in &hs {
                    let pts: Vec<&&Row> = sel.iter().filter(|r| r.h == h).collect();
                    let x: Vec<f64> = pts.iter().map(|r| r.n.unwrap() as f64).collect();
                    let y: Vec<f64> = pts.iter().map(|r| r.value).collect();
                    p = p.with(Series::new(format!("h = {h}"), &x, &y));
                }
                let path = plots.join(format!("{}_vs_n.svg", slug(q)));
                write_atomic(&path, p.auto_log().to_svg().as_bytes())?;
                files.push(path);
            }
            if hs.len() > 1 {
                let n = *ns.last().unwrap_or(&0);
                let pts: Vec<&&Row> = sel.iter().filter(|r| r.n == Some(n)).collect();
                let x: Vec<f64> = pts.iter().map(|r| r.h).collect();
                let y: Vec<f64> = pts.iter().map(|r| r.value).collect();
                let p = Plot::new(format!("{q} vs h"), "h", *q).with(Series::new(format!("n = {n}"), &x, &y));
                let path = plots.join(format!("{}_vs_h.svg", slug(q)));
                write_atomic(&path, p.auto_log().to_svg().as_bytes())?;
                files.push(path);
            }
        }
        if !avoidance.is_empty() {
            let mut hs: Vec<f64> = avoidance.iter().map(|r| r.h).collect();
            hs.dedup();
            let mut p = Plot::new("two-replica avoidance", "j", "mean a_j");
            for &h in &hs {
                let pts: Vec<&&Row> = avoidance.iter().filter(|r| r.h == h).collect();
                let x: Vec<f64> = pts.iter().map(|r| r.quantity[2..].parse::<f64>().unwrap_or(f64::NAN)).collect();
                let y: Vec<f64> = pts.iter().map(|r| r.value).collect();
                p = p.with(Series::new(format!("h = {h}"), &x, &y));
            }
            let path = plots.join("a_j_vs_j.svg");
            write_atomic(&path, p.auto_log().to_svg().as_bytes())?;
            files.push(path);
        }
    }
    let report = out.join(REPORT_FILE);
    if report.exists() {
        let text = fs::read_to_string(&report).map_err(|source| Error::Io { path: report.clone(), source })?;
        let rep: Report = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", report.display())))?;
        for c in &rep.checks {
            for (name, curve) in &c.curves {
                let x: Vec<f64> = curve.x.iter().map(|v| v.0).collect();
                let y: Vec<f64> = curve.y.iter().map(|v| v.0).collect();
                let p = Plot::new(format!("{} {name}", c.check_id), &curve.x_label, &curve.y_label).with(Series::new(name.as_str(), &x, &y));
                let path = plots.join(format!("{}_{}.svg", c.check_id, slug(name)));
                write_atomic(&path, p.auto_log().to_svg().as_bytes())?;
                files.push(path);
            }
        }
    }
    Ok(files)
}

pub fn report(args: &ReportArgs) -> Result<Outcome> {
    let cfg = args.config.as_deref().map(RunConfig::load).transpose()?;
    let out = out_dir(args.out.as_deref(), cfg.as_ref());
    if !out.join(SERIES_FILE).exists() && !out.join(REPORT_FILE).exists() {
        return Err(Error::Config(format!("{} holds neither {SERIES_FILE} nor {REPORT_FILE}", out.display())));
    }
    let files = render_plots(&out)?;
    Ok(Outcome { out, files, report: None })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Scan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    }
}

fn summary(o: &Outcome) -> String {
    let mut s = String::new();
    if let Some(r) = &o.report {
        for c in &r.checks {
            let status = match (&c.skipped, c.passed) {
                (Some(why), _) => format!("SKIP ({why})"),
                (None, true) => "PASS".into(),
                (None, false) => "FAIL".into(),
            };
            let _ = writeln!(s, "{:<4} {status:<6} {}", c.check_id, c.description);
        }
        let _ = writeln!(s, "{} passed, {} failed, {} skipped", r.passed, r.failed, r.skipped);
    }
    for f in &o.files {
        let _ = writeln!(s, "wrote {}", f.display());
    }
    s
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on invalid input or I/O failure, 2 when a check fails.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            print!("{}", summary(&o));
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"
[model]
kind = "table"
p = [0.5, 0.25]

[disorder]
family = "zero"

[grids]
h_values = [0.0]
n_values = [2]
r_max = 2
"#;

    #[test]
    fn toy_config_computes_log_two() {
        let cfg = RunConfig::parse(TOY).unwrap();
        let rows = compute_rows(&cfg).unwrap();
        let lz = rows.iter().find(|r| r.quantity == "log_z").unwrap();
        assert!((lz.value + std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn config_round_trips_and_defaults_expand() {
        let cfg = RunConfig::parse(TOY).unwrap();
        let text = cfg.to_toml();
        assert!(text.contains("[checks]") && text.contains("master_seed"));
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = TOY.replace("n_values = [2]", "n_values = [2, 8]");
        let e = RunConfig::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("line 11"), "{e}");
        let e = RunConfig::parse("[model]\nkind = \"table\"\np = [0.5]\n[disorder]\nfamily = \"gaussian\"\nsgma = 1.0\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 4") && e.contains("sgma"), "{e}");
    }

    #[test]
    fn csv_round_trip_and_empty_header() {
        assert_eq!(rows_to_csv(&[]), format!("{CSV_HEADER}\n"));
        let rows = vec![
            Row { quantity: "f".into(), h: 0.1, n: Some(64), value: 1.0 / 3.0, stderr: 1e-17, samples: 5 },
            Row { quantity: "mu".into(), h: 3.0, n: None, value: f64::NAN, stderr: f64::INFINITY, samples: 2 },
        ];
        let text = rows_to_csv(&rows);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 6);
        let back = csv_to_rows(&text).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].value.is_nan() && back[1].n.is_none());
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.txt");
        write_atomic(&p, b"abc").unwrap();
        write_atomic(&p, b"def").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "def");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
