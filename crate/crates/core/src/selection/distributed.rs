use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::greedy::lazy_greedy;
use super::{CandidateSet, UtilityModel};
use crate::error::{Error, Result};
use crate::preference::PreferenceSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributedConfig {
    /// Number of partitions `m`.
    pub partitions: usize,
    /// Seed for the random assignment of arms to partitions.
    pub seed: u64,
}

impl Default for DistributedConfig {
    fn default() -> Self {
        Self {
            partitions: 4,
            seed: 0,
        }
    }
}

/// Both second-round contenders of a distributed greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedRun {
    /// Best single-partition solution.
    pub best_part: CandidateSet,
    /// Greedy over the union of all partition solutions.
    pub merged: CandidateSet,
}

impl DistributedRun {
    /// The higher-utility contender, the partition solution on ties.
    pub fn into_chosen(self) -> CandidateSet {
        let spent = self.best_part.gain_evaluations.max(self.merged.gain_evaluations);
        let mut out = if self.merged.utility() > self.best_part.utility() {
            self.merged
        } else {
            self.best_part
        };
        out.gain_evaluations = spent;
        out
    }
}

/// Two-round distributed greedy; see [`distributed_greedy_run`].
pub fn distributed_greedy(
    space: &PreferenceSpace,
    pool: &[usize],
    k: usize,
    model: &UtilityModel,
    cfg: DistributedConfig,
) -> Result<CandidateSet> {
    distributed_greedy_run(space, pool, k, model, cfg).map(DistributedRun::into_chosen)
}

/// The pool is shuffled with `cfg.seed` and dealt round-robin into `m` parts.
/// Each part is solved by lazy greedy in parallel; the parts' solutions are
/// merged and solved again. Results do not depend on the number of worker
/// threads. `gain_evaluations` on the merged contender counts the whole run.
pub fn distributed_greedy_run(
    space: &PreferenceSpace,
    pool: &[usize],
    k: usize,
    model: &UtilityModel,
    cfg: DistributedConfig,
) -> Result<DistributedRun> {
    let m = cfg.partitions;
    if m == 0 || m > pool.len() {
        return Err(Error::TooManyPartitions {
            parts: m,
            pool: pool.len(),
        });
    }
    let mut shuffled = pool.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut parts: Vec<Vec<usize>> = vec![Vec::with_capacity(pool.len() / m + 1); m];
    for (i, e) in shuffled.into_iter().enumerate() {
        parts[i % m].push(e);
    }

    let solutions: Vec<CandidateSet> = parts.par_iter().map(|p| lazy_greedy(space, p, k, model)).collect();
    let spent: usize = solutions.iter().map(|s| s.gain_evaluations).sum();

    let mut merged: Vec<usize> = solutions.iter().flat_map(|s| s.positions.iter().copied()).collect();
    merged.sort_unstable();
    let mut merged = lazy_greedy(space, &merged, k, model);
    merged.gain_evaluations += spent;

    let best_part = solutions
        .into_iter()
        .reduce(|best, s| if s.utility() > best.utility() { s } else { best })
        .expect("m >= 1");
    Ok(DistributedRun { best_part, merged })
}

/// Builds the first candidate set for a new current arm.
pub fn initialize_candidates(
    space: &PreferenceSpace,
    pool: &[usize],
    k0: usize,
    model: &UtilityModel,
    cfg: DistributedConfig,
) -> Result<CandidateSet> {
    if k0 == 0 {
        return Err(Error::config("initial candidate-set size must be at least 1"));
    }
    distributed_greedy(space, pool, k0, model, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::SimilarityRow;
    use crate::ArmId;

    fn space(n: usize) -> PreferenceSpace {
        let scores = (0..n).map(|i| 0.05 + 0.9 * (((i * 37) % n) as f64) / n as f64).collect();
        PreferenceSpace::new(SimilarityRow::new(u32::MAX, (0..n as ArmId).collect(), scores), 0.5).unwrap()
    }

    #[test]
    fn single_partition_is_lazy_greedy() {
        let s = space(200);
        let pool: Vec<usize> = (0..200).collect();
        let model = UtilityModel::default();
        let d = distributed_greedy(&s, &pool, 20, &model, DistributedConfig { partitions: 1, seed: 3 }).unwrap();
        let l = lazy_greedy(&s, &pool, 20, &model);
        assert_eq!(d.members, l.members);
        assert_eq!(d.utility(), l.utility());
    }

    #[test]
    fn too_many_partitions() {
        let s = space(5);
        let err = distributed_greedy(&s, &[0, 1, 2], 2, &UtilityModel::default(), DistributedConfig { partitions: 4, seed: 0 });
        assert!(matches!(err, Err(Error::TooManyPartitions { parts: 4, pool: 3 })));
        assert!(initialize_candidates(&s, &[0, 1, 2], 0, &UtilityModel::default(), DistributedConfig::default()).is_err());
    }

    #[test]
    fn same_seed_same_answer() {
        let s = space(300);
        let pool: Vec<usize> = (0..300).collect();
        let cfg = DistributedConfig { partitions: 3, seed: 11 };
        let a = distributed_greedy(&s, &pool, 10, &UtilityModel::modular(), cfg).unwrap();
        let b = distributed_greedy(&s, &pool, 10, &UtilityModel::modular(), cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }
}
