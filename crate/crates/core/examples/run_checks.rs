//! Runs localized-phase checks on the reduced preset and prints each
//! criterion. Pass check ids (e.g. `C2 C7`) to select. The preset is
//! small, so the sharper statistical checks can fail at this scale.
//!
//! `cargo run --release --example run_checks -- C9 C10`

use pinlab::report::Report;
use pinlab::{full_report, CheckConfig, CheckId};

fn main() -> pinlab::Result<()> {
    let ids = std::env::args().skip(1).map(|s| s.parse()).collect::<pinlab::Result<Vec<CheckId>>>()?;
    let cfg = CheckConfig::quick();
    let report = Report::new(cfg.master_seed, full_report(&cfg, &ids)?);
    for c in &report.checks {
        let status = match (&c.skipped, c.passed) {
            (Some(why), _) => format!("skipped: {why}"),
            (None, true) => "pass".into(),
            (None, false) => "FAIL".into(),
        };
        println!("{} {} [{status}]", c.check_id, c.description);
        for crit in &c.criteria {
            println!("    {crit}");
        }
        for (name, fit) in &c.fitted_constants {
            println!("    {name} = {} ± {}", fit.value, fit.stderr);
        }
    }
    println!("{} passed, {} failed, {} skipped", report.passed, report.failed, report.skipped);
    Ok(())
}
