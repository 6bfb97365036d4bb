//! Law of the contact number, its cumulants and joint cumulants of contacts.
//!
//! `cargo run --example contact_law`

use pinlab::model::sample_disorder;
use pinlab::{DisorderFamily, DisorderLaw, InterArrivalLaw, QuenchedSystem};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::geometric(0.6, 512)?;
    let disorder = DisorderLaw::new(DisorderFamily::Rademacher { s: 0.5 })?;
    let n = 256;
    let omega = sample_disorder(&disorder, n, 11, 3);
    let sys = QuenchedSystem::new(&law, 0.8, omega.charges(), n)?;

    let cl = sys.contact_law()?;
    let exact = cl.cumulants4();
    let jets = sys.cumulants(6)?;
    println!("total mass {:.15}", cl.total_mass());
    println!(" r   from law          from jets");
    for r in 1..=6 {
        let lawv = if r <= 4 { format!("{:+.10e}", exact[r - 1]) } else { "-".into() };
        println!("{r:>2}   {lawv:<17} {:+.10e}", jets.get(r));
    }

    let mode = (0..=n).max_by(|&a, &b| cl.pmf(a).total_cmp(&cl.pmf(b))).unwrap_or(0);
    println!("\nmode of L_n = {mode}, P = {:.4}", cl.pmf(mode));
    println!("P[|L - EL| > 2 sd] = {:.4}", cl.deviation_tail(2.0 * cl.variance().sqrt()));

    let a = n / 2;
    for sites in [vec![a, a + 1], vec![a, a + 1, a + 3], vec![a, a + 1, a + 2, a + 4]] {
        println!("ursell {sites:?} = {:+.4e}", sys.ursell(&sites)?);
    }
    Ok(())
}
