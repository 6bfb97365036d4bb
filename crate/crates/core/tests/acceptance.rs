//! Acceptance suite: one line per criterion.
//!
//! Statistical criteria that fail are reported, not hidden; the process
//! exits non-zero on a failure only when `PINLAB_ACCEPTANCE_STRICT` is set.

mod common;

use std::path::Path;
use std::time::Instant;

use pinlab::cli::{self, Cli, Grids, RunConfig, RunSettings};
use pinlab::disorder_mc::{self as mc, McConfig};
use pinlab::oracle::{self, PathSet};
use pinlab::theorems::{contact_bound_violations, exchange_worst_ratio, factorization_residual};
use pinlab::{run_check, CheckConfig, CheckId, DisorderFamily, DisorderLaw, InterArrivalLaw, LawSpec, QuenchedSystem};

use clap::Parser;
use common::{random_instance, rng};

type Outcome = (bool, String);

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut r = rng(1);
    let (mut lz, mut cp, mut cov, mut law_err, mut mx, mut av): (f64, f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..500 {
        let inst = random_instance(&mut r, 1, 14, k);
        let n = inst.n;
        let sys = QuenchedSystem::new(&inst.law, inst.h, &inst.omega, n).unwrap();
        let ps = PathSet::enumerate(&inst.law, inst.h, &inst.omega, n).unwrap();
        lz = lz.max((sys.log_z() - ps.log_partition()).abs());
        let ex: Vec<f64> = (0..=n).map(|a| ps.expectation(|c| c.x(a) as u8 as f64)).collect();
        for a in 1..=n {
            cp = cp.max((sys.contact_probability(a).unwrap() - ex[a]).abs());
            for b in a..=n {
                let joint = ps.expectation(|c| (c.x(a) && c.x(b)) as u8 as f64);
                cov = cov.max((sys.contact_covariance(a, b).unwrap() - (joint - ex[a] * ex[b])).abs());
            }
        }
        let dp: Vec<f64> = sys.contact_law().unwrap().probabilities();
        let brute: Vec<f64> = (0..=n).map(|l| ps.expectation(|c| (c.contacts() == l) as u8 as f64)).collect();
        law_err = law_err.max(max_err(&dp, &brute));
        for m in 1..=n {
            let b = ps.expectation(|c| (c.max_gap() <= m) as u8 as f64);
            mx = mx.max((sys.max_excursion_cdf(m).unwrap() - b).abs());
        }
        let table = sys.segment_partitions(n).unwrap();
        let a_dp = sys.two_replica_avoidance_exact(&table, 0, n).unwrap();
        let a_or = oracle::enumerate_avoidance(&inst.law, inst.h, &inst.omega, 0, n).unwrap();
        av = av.max(max_err(&a_dp, &a_or));
    }
    let secs = t.elapsed().as_secs_f64();
    let worst = [lz, cp, cov, law_err, mx, av].into_iter().fold(0.0, f64::max);
    (
        worst <= 1e-9 && secs < 30.0,
        format!("max |dlogZ| {lz:.1e}, P(X_a) {cp:.1e}, cov {cov:.1e}, law {law_err:.1e}, M_n cdf {mx:.1e}, a_j {av:.1e}; {secs:.1}s"),
    )
}

fn cumulant_consistency() -> Outcome {
    let mut r = rng(2);
    let (mut vs_law, mut vs_fd): (f64, f64) = (0.0, 0.0);
    for k in 0..50 {
        let inst = random_instance(&mut r, 8, 64, 1000 + k);
        let sys = QuenchedSystem::new(&inst.law, inst.h, &inst.omega, inst.n).unwrap();
        let jets = sys.cumulants_with_order(4, 8).unwrap();
        let exact = sys.contact_law().unwrap().cumulants4();
        // the r-th cumulant is measured against its natural scale κ₂^{r/2}
        let k2 = exact[1].max(1e-300);
        for r_ in 1..=4 {
            let scale = exact[r_ - 1].abs().max(k2.powf(r_ as f64 / 2.0));
            vs_law = vs_law.max((jets.get(r_) - exact[r_ - 1]).abs() / scale);
        }
        let d = 1e-3;
        let f = |s: f64| QuenchedSystem::new(&inst.law, inst.h + s * d, &inst.omega, inst.n).unwrap().log_z();
        let (m2, m1, z0, p1, p2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
        let fd = [(p1 - m1) / (2.0 * d), (p1 - 2.0 * z0 + m1) / (d * d), (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * d * d * d)];
        for r_ in 1..=3 {
            let scale = exact[r_ - 1].abs().max(k2.powf(r_ as f64 / 2.0));
            vs_fd = vs_fd.max((fd[r_ - 1] - jets.get(r_)).abs() / scale);
        }
    }
    (vs_law <= 1e-8 && vs_fd <= 1e-4, format!("jets vs law rel {vs_law:.1e} (<= 1e-8), vs finite differences rel {vs_fd:.1e} (<= 1e-4)"))
}

fn pure_regression() -> Outcome {
    let h = 3f64.ln();
    let geo = InterArrivalLaw::geometric(0.5, 4096).unwrap();
    let ns = [256, 512, 1024, 2048, 4096];
    let sys = QuenchedSystem::new(&geo, h, &[0.0; 4096], 4096).unwrap();
    let pre = sys.prefix_log_z();
    let errs: Vec<f64> = ns.iter().map(|&n| (pre[n] / n as f64 - 2f64.ln()).abs()).collect();
    let decreasing = errs.windows(2).all(|w| w[1] <= w[0]);
    let rho = sys.prefix_mean_contacts()[4096] / 4096.0;
    let m = McConfig::new(geo.clone(), DisorderLaw::zero(), vec![h], ns.to_vec(), 4, 7).unwrap();
    let mu = mc::estimate_mu(&m, h).unwrap();
    let same = mu.mu.mean == mu.f.mean;
    let one = InterArrivalLaw::power_law(1.0, pinlab::EllSpec::Constant { c: 1.0 }, 4096, true).unwrap();
    let mut gf: f64 = 0.0;
    for hh in [0.5, 1.0, 3.0] {
        let lz = QuenchedSystem::new(&one, hh, &[0.0; 4096], 4096).unwrap().log_z() / 4096.0;
        gf = gf.max((lz - oracle::pure_model_free_energy(&one, hh).unwrap()).abs());
    }
    let e = *errs.last().unwrap();
    (
        e <= 1e-2 && decreasing && (rho - 0.75).abs() <= 1e-2 && same && gf <= 1e-2,
        format!(
            "|f_n - log 2| {e:.1e} decreasing {decreasing}, rho {rho:.5}, mu == f {same}, alpha=1 |f_n - root| {gf:.1e}"
        ),
    )
}

fn inequality_suite() -> Outcome {
    let mut r = rng(4);
    let (mut jensen, mut contact, mut exchange, mut fact) = (0usize, 0usize, 0usize, 0usize);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_fact: f64 = 0.0;
    for k in 0..200 {
        let inst = random_instance(&mut r, 2, 10, 5000 + k);
        let disorder = DisorderLaw::new(inst.family).unwrap();
        let m = McConfig::new(inst.law.clone(), disorder, vec![inst.h], vec![inst.n], 8, 100 + k).unwrap();
        if !mc::estimate_f(&m, inst.h, inst.n).unwrap().jensen_holds {
            jensen += 1;
        }
        let sys = QuenchedSystem::new(&inst.law, inst.h, &inst.omega, inst.n).unwrap();
        contact += contact_bound_violations(&sys, inst.law.xi()).unwrap().len();
        let ps = PathSet::enumerate(&inst.law, inst.h, &inst.omega, inst.n).unwrap();
        let ratio = exchange_worst_ratio(&ps, &inst.law, inst.h, &inst.omega);
        worst_ratio = worst_ratio.max(ratio);
        exchange += (ratio > 1.0 + 1e-12) as usize;
        let res = factorization_residual(&ps);
        worst_fact = worst_fact.max(res);
        fact += (res > 1e-12) as usize;
    }
    let total = jensen + contact + exchange + fact;
    (
        total == 0,
        format!("violations: Jensen {jensen}, contact bound {contact}, exchange {exchange} (worst ratio {worst_ratio:.3}), factorization {fact} (worst {worst_fact:.1e})"),
    )
}

fn check_line(id: CheckId, cfg: &CheckConfig, keys: &[&str]) -> Outcome {
    let t = Instant::now();
    let rep = run_check(id, cfg).unwrap();
    let mut parts: Vec<String> = keys
        .iter()
        .filter_map(|k| rep.fitted_constants.get(*k).map(|f| format!("{k} {:.4} ± {:.1e}", f.value.0, f.stderr.0)))
        .collect();
    parts.extend(rep.criteria.iter().filter(|c| !c.passed).map(|c| format!("failed: {c}")));
    parts.push(format!("{:.1}s", t.elapsed().as_secs_f64()));
    (rep.passed, parts.join(", "))
}

fn criterion_line(id: CheckId, cfg: &CheckConfig, metrics: &[&str], budget: f64) -> Outcome {
    let t = Instant::now();
    let rep = run_check(id, cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut parts: Vec<String> = rep.criteria.iter().map(|c| format!("{} {}", if c.passed { "ok" } else { "FAILED" }, c)).collect();
    parts.extend(metrics.iter().filter_map(|k| rep.metrics.get(*k).map(|v| format!("{k} {v}"))));
    parts.push(format!("{secs:.1}s"));
    (rep.passed && secs < budget, parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        model: LawSpec::alpha_one(512),
        disorder: DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 }).unwrap(),
        grids: Grids { h_values: vec![1.0, 3.0], n_values: vec![64, 128, 256], window: 32, ks_max_n: 128, ..Grids::default() },
        run: RunSettings { samples: 120, master_seed: 99, ..RunSettings::default() },
        checks: CheckConfig {
            select: vec![CheckId::C1, CheckId::C2, CheckId::C5, CheckId::C7, CheckId::C9, CheckId::C10, CheckId::C11, CheckId::C13],
            ..CheckConfig::quick()
        },
    };
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let mut mismatches = Vec::new();
    for sub in ["scan", "verify"] {
        let mut first: Option<Vec<(String, Vec<u8>)>> = None;
        for threads in [1, 4, 8] {
            let out = dir.path().join(format!("{sub}-{threads}"));
            let args = [
                "pinlab",
                sub,
                "--config",
                path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--threads",
                &threads.to_string(),
            ];
            cli::execute(&Cli::try_parse_from(args).unwrap()).unwrap();
            let files = snapshot(&out);
            match &first {
                None => first = Some(files),
                Some(f) if *f != files => mismatches.push(format!("{sub} with {threads} workers")),
                _ => {}
            }
        }
    }
    (mismatches.is_empty(), if mismatches.is_empty() { "scan and verify byte-identical with 1, 4, 8 workers".into() } else { format!("differs: {}", mismatches.join(", ")) })
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn main() {
    let cfg = CheckConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("cumulant consistency", Box::new(cumulant_consistency)),
        ("pure-model regression", Box::new(pure_regression)),
        ("inequality suite", Box::new(inequality_suite)),
        ("correlation decay", Box::new(|| criterion_line(CheckId::C7, &cfg, &["r2"], 300.0))),
        ("quenched CLT", Box::new(|| criterion_line(CheckId::C2, &cfg, &[], f64::INFINITY))),
        ("centering suite", Box::new(|| criterion_line(CheckId::C4, &cfg, &["ks_centering"], f64::INFINITY))),
        ("concentration", Box::new(|| check_line(CheckId::C3, &cfg, &["kappa_free_energy", "kappa_centering"]))),
        ("mu bounds", Box::new(|| check_line(CheckId::C5, &cfg, &["c"]))),
        ("maximal excursion", Box::new(|| criterion_line(CheckId::C6, &cfg, &[], f64::INFINITY))),
        ("sqrt(n log n) centering", Box::new(|| check_line(CheckId::C11, &cfg, &["slope", "rho"]))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        failed += !ok as usize;
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("PINLAB_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
