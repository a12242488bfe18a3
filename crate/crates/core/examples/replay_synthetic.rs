//! Offline replay on a synthetic session corpus.
//!
//! Compares candidate strategies (max-utility, random-k, zooming) under
//! LinUCB and the random policy, then prints the first few rounds of one run.
//!
//! ```bash
//! cargo run --release --example replay_synthetic
//! RUST_LOG=info cargo run --release --example replay_synthetic -- 3
//! ```

use std::time::Instant;

use manyarm::corpus::{generate_synthetic, SyntheticConfig};
use manyarm::policies::{PolicyKind, PolicySpec};
use manyarm::replay::{replay_corpus, write_round_log, ReplayConfig, ReplayPool, SelectionStrategy};
use manyarm::selection::KSchedule;

fn main() -> manyarm::Result<()> {
    env_logger::init();
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = SyntheticConfig {
        num_sessions: 200,
        rng_seed: seed,
        ..SyntheticConfig::default()
    };
    let (sessions, table) = generate_synthetic(&cfg)?;
    println!("{} sessions, {} arms, dim {}", sessions.len(), table.len(), table.dim());
    let pool = ReplayPool::new(table)?;

    let runs = [
        (SelectionStrategy::MaxUtility, PolicyKind::LinUcb),
        (SelectionStrategy::Zooming, PolicyKind::LinUcb),
        (SelectionStrategy::RandomK, PolicyKind::LinUcb),
        (SelectionStrategy::MaxUtility, PolicyKind::MostSimilar),
        (SelectionStrategy::MaxUtility, PolicyKind::Random),
        (SelectionStrategy::RandomK, PolicyKind::Random),
    ];
    let mut first = None;
    for (strategy, kind) in runs {
        let rc = ReplayConfig {
            strategy,
            policy: PolicySpec::of(kind),
            epsilon: 0.5,
            k_schedule: KSchedule::Fixed { k: 250 },
            rng_seed: seed,
            ..ReplayConfig::default()
        };
        let t = Instant::now();
        let out = replay_corpus(&sessions, &rc, &pool)?;
        println!(
            "{:<12} {:<13} T = {}  hits = {:>4}  R(T)/T = {:.4}  ({:.1?})",
            strategy.to_string(),
            kind.to_string(),
            out.horizon(),
            out.total_reward(),
            out.final_per_round_regret(),
            t.elapsed()
        );
        first.get_or_insert(out);
    }

    println!("\nfirst rounds of max-utility + LinUCB:");
    let out = first.expect("at least one run");
    write_round_log(std::io::stdout().lock(), &out.rounds[..8])
        .map_err(|e| manyarm::Error::Config(e.to_string()))?;
    Ok(())
}
