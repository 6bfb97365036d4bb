//! Random small instances shared by the integration tests.
#![allow(dead_code)]

use pinlab::model::sample_disorder;
use pinlab::{DisorderFamily, DisorderLaw, InterArrivalLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_family<R: Rng>(rng: &mut R) -> DisorderFamily {
    match rng.random_range(0..5) {
        0 => DisorderFamily::Zero,
        1 => DisorderFamily::Gaussian { sigma: rng.random_range(0.1..2.0) },
        2 => DisorderFamily::UniformCentered { a: rng.random_range(0.1..2.0) },
        3 => DisorderFamily::Rademacher { s: rng.random_range(0.1..1.5) },
        _ => DisorderFamily::ShiftedExponential { lambda: rng.random_range(0.1..1.0) },
    }
}

/// Positive table of length `len` with total mass in `(0.2, 1)`.
pub fn random_table<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.02..1.0)).collect();
    let mass: f64 = rng.random_range(0.2..1.0);
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x * mass / total).collect()
}

pub struct Instance {
    pub law: InterArrivalLaw,
    pub family: DisorderFamily,
    pub h: f64,
    pub n: usize,
    pub omega: Vec<f64>,
}

/// Random table law, `h ∈ [-2, 4]`, random disorder family, `n` in the range.
pub fn random_instance<R: Rng>(rng: &mut R, n_lo: usize, n_hi: usize, index: u64) -> Instance {
    let n = rng.random_range(n_lo..=n_hi);
    let law = InterArrivalLaw::from_table(&random_table(rng, n.max(2))).unwrap();
    let family = random_family(rng);
    let h = rng.random_range(-2.0..4.0);
    let omega = sample_disorder(&DisorderLaw::new(family).unwrap(), n, 0xacce55, index).charges().to_vec();
    Instance { law, family, h, n, omega }
}
