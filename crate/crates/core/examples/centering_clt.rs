//! The random centering E[L_n]: variance growth, Gaussian shape and tails.
//!
//! `cargo run --release --example centering_clt`

use pinlab::disorder_mc::{self as mc, McConfig};
use pinlab::{DisorderFamily, DisorderLaw, LawSpec};

fn main() -> pinlab::Result<()> {
    let law = LawSpec::alpha_one(512).build()?;
    let disorder = DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 })?;
    let cfg = McConfig::new(law, disorder, vec![3.0], vec![64, 128, 256], 600, 3)?;

    println!("   n   mean/n    var/n            KS     k3/n");
    for c in mc::centering_grid(&cfg, 3.0)? {
        let ks = c.ks.map_or("-".to_string(), |k| format!("{k:.4}"));
        println!(
            "{:>4}   {:.5}   {:.4} ± {:.4}   {ks}   {:+.4}",
            c.n,
            c.mean / c.n as f64,
            c.variance_per_n,
            c.variance_per_n_stderr,
            c.kappa3_per_n
        );
    }

    let u: Vec<f64> = (0..8).map(|k| 0.5 * k as f64).collect();
    let scan = mc::concentration_scan_scaled(&cfg, 3.0, 256, &u)?;
    println!("\n  u/sd   P[|log Z - mean| > u]   P[|E L - mean| > u]");
    for (k, uk) in u.iter().enumerate() {
        println!("{uk:>6}   {:.4}                  {:.4}", scan.free_energy.frequency[k], scan.centering.frequency[k]);
    }
    println!("kappa: free energy {:.3}, centering {:.3}", scan.free_energy.kappa_linear, scan.centering.kappa_five_thirds);
    Ok(())
}
