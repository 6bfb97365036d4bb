//! Exact quenched observables of one disorder sample.
//!
//! `cargo run --example exact_partition`

use pinlab::model::sample_disorder;
use pinlab::{DisorderFamily, DisorderLaw, InterArrivalLaw, QuenchedSystem};
use pinlab::model::EllSpec;

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(1.0, EllSpec::Constant { c: 1.0 }, 1024, true)?;
    let disorder = DisorderLaw::new(DisorderFamily::Gaussian { sigma: 1.0 })?;
    let n = 512;
    let omega = sample_disorder(&disorder, n, 7, 0);
    let sys = QuenchedSystem::new(&law, 1.5, omega.charges(), n)?;

    println!("n = {n}, h = {}", sys.h());
    println!("log Z      = {:.6}", sys.log_z());
    println!("log Z⁻     = {:.6}", sys.log_z_minus());
    println!("(1/n)log Z = {:.6}", sys.log_z() / n as f64);

    println!("\n  a   P[X_a]   cov(X_a, X_a+8)");
    for a in (32..=n - 32).step_by(96) {
        println!("{a:>4}  {:.4}   {:+.3e}", sys.contact_probability(a)?, sys.contact_covariance(a, a + 8)?);
    }

    println!("\n  m   P[max gap ≤ m]");
    for m in [2, 4, 8, 16, 32] {
        println!("{m:>4}  {:.6}", sys.max_excursion_cdf(m)?);
    }
    Ok(())
}
