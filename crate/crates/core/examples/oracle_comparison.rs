//! Dynamic programming against brute-force enumeration on a small system.
//!
//! `cargo run --example oracle_comparison`

use pinlab::model::sample_disorder;
use pinlab::oracle::{self, PathSet};
use pinlab::{DisorderFamily, DisorderLaw, InterArrivalLaw, QuenchedSystem};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::from_table(&[0.3, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.02, 0.02, 0.01, 0.01])?;
    let disorder = DisorderLaw::new(DisorderFamily::UniformCentered { a: 1.0 })?;
    let (h, n) = (0.4, 12);
    let omega = sample_disorder(&disorder, n, 5, 0);

    let sys = QuenchedSystem::new(&law, h, omega.charges(), n)?;
    let paths = PathSet::enumerate(&law, h, omega.charges(), n)?;
    println!("{} configurations", paths.len());
    println!("log Z  dp {:.15}  enum {:.15}", sys.log_z(), paths.log_partition());

    let mut worst: f64 = 0.0;
    for a in 1..=n {
        let e = paths.expectation(|c| c.x(a) as u8 as f64);
        worst = worst.max((sys.contact_probability(a)? - e).abs());
    }
    println!("max |P[X_a]| error      {worst:.2e}");

    let dp = sys.contact_law()?.probabilities();
    let brute: Vec<f64> = (0..=n).map(|l| paths.expectation(|c| (c.contacts() == l) as u8 as f64)).collect();
    let law_err = dp.iter().zip(&brute).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("max contact-law error   {law_err:.2e}");

    let table = sys.segment_partitions(n)?;
    let a_dp = sys.two_replica_avoidance_exact(&table, 0, 8)?;
    let a_en = oracle::enumerate_avoidance(&law, h, omega.charges(), 0, 8)?;
    for (j, (x, y)) in a_dp.iter().zip(&a_en).enumerate() {
        println!("a_{:<2} dp {x:.12}  enum {y:.12}", j + 1);
    }

    let pure = InterArrivalLaw::geometric(0.5, 4096)?;
    println!("\npure free energy at h = 0.5: {:.12}", oracle::pure_model_free_energy(&pure, 0.5)?);
    Ok(())
}
