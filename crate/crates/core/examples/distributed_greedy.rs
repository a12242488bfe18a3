//! Partition/merge greedy over a large pool.
//!
//! The pool is dealt into `m` random parts, each part is solved independently,
//! and the union of the part solutions is solved again. The better of the best
//! part and the merged pass is kept.
//!
//! ```bash
//! cargo run --release --example distributed_greedy
//! ```

use manyarm::preference::{PreferenceSpace, SimilarityRow};
use manyarm::selection::{distributed_greedy_run, lazy_greedy, DistributedConfig, UtilityModel};
use manyarm::ArmId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> manyarm::Result<()> {
    let n = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-0.2..1.0)).collect();
    let space = PreferenceSpace::new(SimilarityRow::new(ArmId::MAX, (0..n as ArmId).collect(), scores), 0.5)?;
    let pool: Vec<usize> = (0..n).collect();
    let model = UtilityModel::default();
    let k = 100;

    let central = lazy_greedy(&space, &pool, k, &model);
    println!("centralised: utility {:.4}", central.utility());

    for m in [1, 2, 4, 8] {
        let run = distributed_greedy_run(&space, &pool, k, &model, DistributedConfig { partitions: m, seed: 5 })?;
        println!(
            "m = {m}: best part {:.4}, merged {:.4}, evaluations {}",
            run.best_part.utility(),
            run.merged.utility(),
            run.merged.gain_evaluations
        );
        let chosen = run.into_chosen();
        println!("        kept {:.4} (gap to centralised {:.2e})", chosen.utility(), central.utility() - chosen.utility());
    }
    Ok(())
}
