//! LinUCB and linear Thompson sampling on a 20-arm linear bandit.
//!
//! Rewards are `1{θ*·x + noise > 0.3}`; per-round regret is measured against
//! the arm with the highest expected reward.
//!
//! ```bash
//! cargo run --release --example linear_bandit
//! ```

use manyarm::corpus::EmbeddingTable;
use manyarm::policies::{FeatureMap, LinThompSamp, LinUcb};
use manyarm::ArmId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

const D: usize = 8;
const ARMS: usize = 20;
const T: usize = 5000;
const NOISE: f64 = 0.1;

fn unit(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..D).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn success(mean: f64) -> f64 {
    // P(mean + N(0, NOISE²) > 0.3)
    let z = (mean - 0.3) / NOISE;
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

fn main() -> manyarm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let theta = unit(&mut rng);
    let mut table = EmbeddingTable::new(D);
    for id in 0..ARMS as ArmId {
        table.insert(id, &unit(&mut rng))?;
    }
    let ids: Vec<ArmId> = table.ids().to_vec();
    let p: Vec<f64> = ids
        .iter()
        .map(|&a| success(table.get(a).unwrap().iter().zip(&theta).map(|(x, t)| x * t).sum()))
        .collect();
    let best = p.iter().cloned().fold(0.0, f64::max);
    let noise = Normal::new(0.0, NOISE).unwrap();
    let context = vec![0.0; D];

    let mut ucb = LinUcb::new(D, FeatureMap::ArmOnly, 1.0, 1.0)?;
    let mut ts = LinThompSamp::new(D, FeatureMap::ArmOnly, 0.25)?;
    let (mut r_ucb, mut r_ts) = (0.0, 0.0);
    for t in 1..=T {
        let a = ucb.select(&ids, &context, &table)?.chosen;
        let x = table.get(a).unwrap();
        let r = (x.iter().zip(&theta).map(|(x, t)| x * t).sum::<f64>() + noise.sample(&mut rng) > 0.3) as u8 as f64;
        ucb.update(x, r)?;
        r_ucb += best - p[a as usize];

        let a = ts.select(&ids, &context, &table, &mut rng)?.chosen;
        let x = table.get(a).unwrap();
        let r = (x.iter().zip(&theta).map(|(x, t)| x * t).sum::<f64>() + noise.sample(&mut rng) > 0.3) as u8 as f64;
        ts.update(x, r)?;
        r_ts += best - p[a as usize];

        if [10, 100, 200, 1000, 5000].contains(&t) {
            println!(
                "t = {t:>5}  LinUCB R/t = {:.4}  LinThompSamp R/t = {:.4}",
                r_ucb / t as f64,
                r_ts / t as f64
            );
        }
    }
    Ok(())
}
