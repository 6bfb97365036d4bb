//! Disorder averages: quenched and annealed free energy, and the rate μ.
//!
//! `cargo run --release --example free_energy_mc`

use pinlab::disorder_mc::{self as mc, McConfig};
use pinlab::{DisorderFamily, DisorderLaw, LawSpec};

fn main() -> pinlab::Result<()> {
    let law = LawSpec::alpha_one(1024).build()?;
    let disorder = DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 })?;
    let cfg = McConfig::new(law, disorder, vec![1.0, 2.0, 3.0], vec![128, 256, 512, 1024], 64, 42)?;

    println!("   h      n   f_quenched          f_annealed");
    for &h in &cfg.h_values {
        for est in mc::estimate_f_grid(&cfg, h)? {
            let (q, a) = (&est.quenched, &est.annealed);
            println!("{h:>4} {:>6}   {:.5} ± {:.5}   {:.5}", q.n.unwrap_or(0), q.mean, q.stderr, a.mean);
        }
    }

    println!("\n   h   slope f          mu               mu (last gap)");
    for &h in &cfg.h_values {
        let (f, fse) = mc::f_slope(&cfg, h)?;
        let mu = mc::estimate_mu(&cfg, h)?;
        println!(
            "{h:>4}   {f:.5} ± {fse:.5}   {:.5} ± {:.5}   {:.5} ± {:.5}",
            mu.mu.mean, mu.mu.stderr, mu.mu_last_gap.mean, mu.mu_last_gap.stderr
        );
    }
    Ok(())
}
