//! Downstream bandit policies that pick one recommendation from a candidate set.
//!
//! LinUCB and linear Thompson sampling share one parameter vector across all
//! arms; an arm enters the model only through its feature vector
//! `φ(current, arm)`. Random and most-similar are context-free baselines. The
//! zooming baseline is a candidate region (all arms within `ε` of the current
//! arm) that LinUCB then runs on.

mod linucb;
mod thompson;

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;

pub use linucb::{LinUcb, REFACTOR_EVERY};
pub use thompson::LinThompSamp;

use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::preference::SimilarityRow;
use crate::ArmId;

/// How the current arm conditions the linear models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureMap {
    /// `φ = a_j`
    ArmOnly,
    /// `φ = [a_j ; a_i ⊙ a_j]`
    #[default]
    ConcatHadamard,
}

impl FeatureMap {
    pub fn output_dim(self, context_dim: usize) -> usize {
        match self {
            FeatureMap::ArmOnly => context_dim,
            FeatureMap::ConcatHadamard => 2 * context_dim,
        }
    }

    /// Overwrites `out` with `φ(current, arm)`.
    pub fn write(self, current: &[f64], arm: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(arm);
        if self == FeatureMap::ConcatHadamard {
            out.extend(current.iter().zip(arm).map(|(c, a)| c * a));
        }
    }

    pub fn features(self, current: &[f64], arm: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.output_dim(arm.len()));
        self.write(current, arm, &mut out);
        out
    }
}

impl FromStr for FeatureMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arm-only" => Ok(FeatureMap::ArmOnly),
            "concat-hadamard" => Ok(FeatureMap::ConcatHadamard),
            other => Err(Error::config(format!("unknown feature map {other:?}"))),
        }
    }
}

impl fmt::Display for FeatureMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMap::ArmOnly => "arm-only",
            FeatureMap::ConcatHadamard => "concat-hadamard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyChoice {
    pub chosen: ArmId,
    /// UCB value, sampled payoff, marginal probability, or uniform probability.
    pub score: f64,
    pub candidate_count: usize,
}

/// Highest score wins, ties to the lowest arm id.
pub(crate) fn argmax_by_score(candidates: &[ArmId], scores: &[f64]) -> Result<PolicyChoice> {
    let (chosen, score) = candidates
        .iter()
        .copied()
        .zip(scores.iter().copied())
        .reduce(|best, cur| match cur.1.total_cmp(&best.1) {
            std::cmp::Ordering::Greater => cur,
            std::cmp::Ordering::Equal if cur.0 < best.0 => cur,
            _ => best,
        })
        .ok_or(Error::EmptySet)?;
    Ok(PolicyChoice {
        chosen,
        score,
        candidate_count: candidates.len(),
    })
}

pub fn random_select<R: Rng + ?Sized>(candidates: &[ArmId], rng: &mut R) -> Result<PolicyChoice> {
    let &chosen = candidates.choose(rng).ok_or(Error::EmptySet)?;
    Ok(PolicyChoice {
        chosen,
        score: 1.0 / candidates.len() as f64,
        candidate_count: candidates.len(),
    })
}

pub const MOST_SIMILAR_TOP: usize = 5;

/// Uniform draw among the five candidates with the highest marginal
/// probability (`marginals` aligned with `candidates`; ties at the cut-off go
/// to lower ids).
pub fn most_similar_select<R: Rng + ?Sized>(
    candidates: &[ArmId],
    marginals: &[f64],
    rng: &mut R,
) -> Result<PolicyChoice> {
    if candidates.is_empty() {
        return Err(Error::EmptySet);
    }
    if marginals.len() != candidates.len() {
        return Err(Error::LengthMismatch(candidates.len(), marginals.len()));
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        marginals[b]
            .total_cmp(&marginals[a])
            .then(candidates[a].cmp(&candidates[b]))
    });
    order.truncate(MOST_SIMILAR_TOP);
    let &pick = order.choose(rng).expect("non-empty");
    Ok(PolicyChoice {
        chosen: candidates[pick],
        score: marginals[pick],
        candidate_count: candidates.len(),
    })
}

/// Arms of `row` whose clamped similarity is at least `epsilon`. When none
/// qualifies the whole row is returned and the flag is set.
pub fn zooming_candidates(row: &SimilarityRow, epsilon: f64) -> (Vec<ArmId>, bool) {
    let region: Vec<ArmId> = row
        .arms
        .iter()
        .zip(&row.scores)
        .filter(|(_, &s)| s.max(0.0) >= epsilon)
        .map(|(&a, _)| a)
        .collect();
    if region.is_empty() {
        log::debug!(
            "zooming region around {} is empty at eps={epsilon}; using all {} arms",
            row.current,
            row.len()
        );
        (row.arms.clone(), true)
    } else {
        (region, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    LinUcb,
    LinThompSamp,
    Random,
    MostSimilar,
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linucb" => Ok(PolicyKind::LinUcb),
            "linthompsamp" => Ok(PolicyKind::LinThompSamp),
            "random" => Ok(PolicyKind::Random),
            "most-similar" => Ok(PolicyKind::MostSimilar),
            other => Err(Error::config(format!("unknown policy {other:?}"))),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::LinUcb => "linucb",
            PolicyKind::LinThompSamp => "linthompsamp",
            PolicyKind::Random => "random",
            PolicyKind::MostSimilar => "most-similar",
        })
    }
}

/// Policy choice plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub alpha_ucb: f64,
    pub lambda: f64,
    pub v: f64,
    pub feature_map: FeatureMap,
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self {
            kind: PolicyKind::LinUcb,
            alpha_ucb: 1.0,
            lambda: 1.0,
            v: 0.25,
            feature_map: FeatureMap::ConcatHadamard,
        }
    }
}

impl PolicySpec {
    pub fn of(kind: PolicyKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn build(&self, context_dim: usize) -> Result<Policy> {
        Ok(match self.kind {
            PolicyKind::LinUcb => Policy::LinUcb(LinUcb::new(context_dim, self.feature_map, self.alpha_ucb, self.lambda)?),
            PolicyKind::LinThompSamp => Policy::LinThompSamp(LinThompSamp::new(context_dim, self.feature_map, self.v)?),
            PolicyKind::Random => Policy::Random,
            PolicyKind::MostSimilar => Policy::MostSimilar,
        })
    }
}

/// What a policy sees in one round.
#[derive(Debug, Clone, Copy)]
pub struct RoundContext<'a> {
    pub current: ArmId,
    pub current_vector: &'a [f64],
    pub candidates: &'a [ArmId],
    pub embeddings: &'a EmbeddingTable,
    /// Marginal probabilities aligned with `candidates`; required by most-similar.
    pub marginals: Option<&'a [f64]>,
}

#[derive(Debug, Clone)]
pub enum Policy {
    LinUcb(LinUcb),
    LinThompSamp(LinThompSamp),
    Random,
    MostSimilar,
}

impl Policy {
    pub fn needs_marginals(&self) -> bool {
        matches!(self, Policy::MostSimilar)
    }

    pub fn select<R: Rng + ?Sized>(&self, ctx: &RoundContext<'_>, rng: &mut R) -> Result<PolicyChoice> {
        if ctx.candidates.is_empty() {
            return Err(Error::EmptySet);
        }
        match self {
            Policy::LinUcb(p) => p.select(ctx.candidates, ctx.current_vector, ctx.embeddings),
            Policy::LinThompSamp(p) => p.select(ctx.candidates, ctx.current_vector, ctx.embeddings, rng),
            Policy::Random => random_select(ctx.candidates, rng),
            Policy::MostSimilar => {
                let m = ctx
                    .marginals
                    .ok_or_else(|| Error::config("most-similar needs candidate marginals"))?;
                most_similar_select(ctx.candidates, m, rng)
            }
        }
    }

    pub fn update(&mut self, ctx: &RoundContext<'_>, chosen: ArmId, reward: f64) -> Result<()> {
        let arm = ctx.embeddings.vector(chosen)?;
        match self {
            Policy::LinUcb(p) => p.update(&p.feature_map.features(ctx.current_vector, arm), reward),
            Policy::LinThompSamp(p) => p.update(&p.feature_map.features(ctx.current_vector, arm), reward),
            Policy::Random | Policy::MostSimilar => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn concat_hadamard_layout() {
        let phi = FeatureMap::ConcatHadamard.features(&[2.0, -1.0], &[0.5, 3.0]);
        assert_eq!(phi, vec![0.5, 3.0, 1.0, -3.0]);
        assert_eq!(FeatureMap::ArmOnly.features(&[2.0, -1.0], &[0.5, 3.0]), vec![0.5, 3.0]);
    }

    #[test]
    fn random_select_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(random_select(&[42], &mut rng).unwrap().chosen, 42);
        assert!(matches!(random_select(&[], &mut rng), Err(Error::EmptySet)));
        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| random_select(&[1, 2, 3, 4], &mut r).unwrap().chosen).collect::<Vec<_>>()
        };
        assert_eq!(draw(8), draw(8));
    }

    #[test]
    fn most_similar_small_sets_use_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seen = [false; 3];
        for _ in 0..300 {
            let c = most_similar_select(&[10, 11, 12], &[0.1, 0.5, 0.4], &mut rng).unwrap();
            seen[(c.chosen - 10) as usize] = true;
        }
        assert_eq!(seen, [true; 3]);
        assert!(most_similar_select(&[], &[], &mut rng).is_err());
    }

    #[test]
    fn most_similar_never_picks_sixth() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cands = [1, 2, 3, 4, 5, 6];
        let marg = [0.3, 0.25, 0.2, 0.12, 0.08, 0.05];
        for _ in 0..10_000 {
            assert_ne!(most_similar_select(&cands, &marg, &mut rng).unwrap().chosen, 6);
        }
    }

    #[test]
    fn zooming_region_cases() {
        let row = SimilarityRow::new(0, vec![1, 2, 3], vec![0.4, 0.55, 0.6]);
        assert_eq!(zooming_candidates(&row, 0.5), (vec![2, 3], false));
        assert_eq!(zooming_candidates(&row, -1.0), (vec![1, 2, 3], false));
        assert_eq!(zooming_candidates(&row, 0.9), (vec![1, 2, 3], true));
        let neg = SimilarityRow::new(0, vec![1, 2], vec![-0.4, 0.2]);
        assert_eq!(zooming_candidates(&neg, -1.0).0, vec![1, 2]);
    }

    #[test]
    fn names_parse() {
        for k in ["linucb", "linthompsamp", "random", "most-similar"] {
            assert_eq!(k.parse::<PolicyKind>().unwrap().to_string(), k);
        }
        assert!("ucb1".parse::<PolicyKind>().is_err());
        assert_eq!("arm-only".parse::<FeatureMap>().unwrap(), FeatureMap::ArmOnly);
    }
}
