//! Offline replay of logged sessions.
//!
//! Each session starts with its first logged query as the current arm. Every
//! round the candidate set is refreshed, the policy recommends one query, and
//! the recommendation earns reward 1 when it matches a not-yet-consumed later
//! query of the same session. A hit consumes that occurrence and the
//! recommendation becomes the current arm; a miss consumes the next logged
//! query, which becomes the current arm. Every round consumes exactly one
//! logged occurrence, so a session of length `L` yields `L - 1` rounds.
//!
//! The round counter `t` runs across sessions and drives the k-schedule.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{EmbeddingTable, Session};
use crate::error::{Error, Result};
use crate::policies::{zooming_candidates, Policy, PolicyChoice, PolicySpec, RoundContext};
use crate::preference::{CosineIndex, PreferenceSpace, SimilarityOracle, SimilarityRow};
use crate::selection::{greedy_extend, initialize_candidates, CandidateSet, DistributedConfig, KSchedule, UtilityModel};
use crate::ArmId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SelectionStrategy {
    #[default]
    MaxUtility,
    RandomK,
    Zooming,
}

impl FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-utility" => Ok(SelectionStrategy::MaxUtility),
            "random-k" => Ok(SelectionStrategy::RandomK),
            "zooming" => Ok(SelectionStrategy::Zooming),
            other => Err(Error::config(format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionStrategy::MaxUtility => "max-utility",
            SelectionStrategy::RandomK => "random-k",
            SelectionStrategy::Zooming => "zooming",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayConfig {
    pub epsilon: f64,
    pub k_schedule: KSchedule,
    pub utility_model: UtilityModel,
    pub policy: PolicySpec,
    pub strategy: SelectionStrategy,
    pub rng_seed: u64,
    pub reset_per_session: bool,
    /// Partitions for distributed initialisation (capped at the pool size).
    pub partitions: usize,
    /// Initial candidate-set size; `None` means the schedule's value at the
    /// round of initialisation.
    pub k0: Option<usize>,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            k_schedule: KSchedule::default(),
            utility_model: UtilityModel::default(),
            policy: PolicySpec::default(),
            strategy: SelectionStrategy::MaxUtility,
            rng_seed: 0,
            reset_per_session: false,
            partitions: 4,
            k0: None,
        }
    }
}

impl ReplayConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() {
            return Err(Error::config("epsilon must be finite"));
        }
        self.k_schedule.validate()?;
        if self.strategy == SelectionStrategy::RandomK && !self.k_schedule.is_fixed() {
            return Err(Error::config("random-k needs a fixed k"));
        }
        if self.partitions == 0 {
            return Err(Error::config("partitions must be at least 1"));
        }
        if self.k0 == Some(0) {
            return Err(Error::config("k0 must be at least 1"));
        }
        Ok(())
    }
}

/// The arm pool `A′`: a unit-normalised embedding table and its cosine index.
#[derive(Debug, Clone)]
pub struct ReplayPool {
    table: EmbeddingTable,
    index: CosineIndex,
}

impl ReplayPool {
    pub fn new(mut table: EmbeddingTable) -> Result<Self> {
        if !table.is_unit_norm() {
            table.normalize()?;
        }
        let index = CosineIndex::new(&table)?;
        Ok(Self { table, index })
    }

    pub fn table(&self) -> &EmbeddingTable {
        &self.table
    }

    pub fn index(&self) -> &CosineIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Anything that can recommend from a candidate set and learn from the reward.
pub trait Recommender {
    fn needs_marginals(&self) -> bool {
        false
    }
    fn select(&mut self, ctx: &RoundContext<'_>, upcoming: &[ArmId], rng: &mut ChaCha8Rng) -> Result<PolicyChoice>;
    fn update(&mut self, ctx: &RoundContext<'_>, chosen: ArmId, reward: f64) -> Result<()>;
}

impl Recommender for Policy {
    fn needs_marginals(&self) -> bool {
        Policy::needs_marginals(self)
    }

    fn select(&mut self, ctx: &RoundContext<'_>, _upcoming: &[ArmId], rng: &mut ChaCha8Rng) -> Result<PolicyChoice> {
        Policy::select(self, ctx, rng)
    }

    fn update(&mut self, ctx: &RoundContext<'_>, chosen: ArmId, reward: f64) -> Result<()> {
        Policy::update(self, ctx, chosen, reward)
    }
}

/// Recommends the next unconsumed logged query; its regret is zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct OraclePolicy;

impl Recommender for OraclePolicy {
    fn select(&mut self, ctx: &RoundContext<'_>, upcoming: &[ArmId], _rng: &mut ChaCha8Rng) -> Result<PolicyChoice> {
        let &chosen = upcoming.first().ok_or(Error::EmptySet)?;
        Ok(PolicyChoice {
            chosen,
            score: 1.0,
            candidate_count: ctx.candidates.len(),
        })
    }

    fn update(&mut self, _: &RoundContext<'_>, _: ArmId, _: f64) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    pub t: u64,
    pub session_id: String,
    pub current_arm: ArmId,
    pub recommended: ArmId,
    pub reward: u8,
    pub candidate_size: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReplayOutcome {
    pub rounds: Vec<RoundLog>,
    /// `R(t) = t - Σ r`.
    pub cumulative_regret: Vec<u64>,
    /// `R(t) / t`.
    pub per_round_regret: Vec<f64>,
}

impl ReplayOutcome {
    pub fn from_rounds(rounds: Vec<RoundLog>) -> Self {
        let mut cumulative_regret = Vec::with_capacity(rounds.len());
        let mut per_round_regret = Vec::with_capacity(rounds.len());
        let mut regret = 0u64;
        for (i, r) in rounds.iter().enumerate() {
            regret += 1 - r.reward as u64;
            cumulative_regret.push(regret);
            per_round_regret.push(regret as f64 / (i + 1) as f64);
        }
        Self {
            rounds,
            cumulative_regret,
            per_round_regret,
        }
    }

    pub fn horizon(&self) -> u64 {
        self.rounds.len() as u64
    }

    pub fn final_regret(&self) -> u64 {
        self.cumulative_regret.last().copied().unwrap_or(0)
    }

    /// `R(T) / T`, zero for an empty run.
    pub fn final_per_round_regret(&self) -> f64 {
        self.per_round_regret.last().copied().unwrap_or(0.0)
    }

    pub fn total_reward(&self) -> u64 {
        self.rounds.iter().map(|r| r.reward as u64).sum()
    }
}

/// State carried from session to session.
#[derive(Debug, Clone)]
pub struct ReplayState<P> {
    pub policy: P,
    pub rng: ChaCha8Rng,
    /// Largest `k_t` seen so far; the candidate set never shrinks.
    k_hold: usize,
}

impl<P> ReplayState<P> {
    pub fn new(policy: P, seed: u64) -> Self {
        Self {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            k_hold: 1,
        }
    }

    fn k_at(&mut self, schedule: &KSchedule, t: u64) -> usize {
        self.k_hold = self.k_hold.max(schedule.k_at(t));
        self.k_hold
    }
}

/// Uniform `k`-subset of `pool` without replacement, sorted by arm id.
pub fn random_k_candidates<R: Rng + ?Sized>(pool: &[ArmId], k: usize, rng: &mut R) -> Result<Vec<ArmId>> {
    if k > pool.len() {
        return Err(Error::SampleTooLarge { k, pool: pool.len() });
    }
    let mut out: Vec<ArmId> = sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    Ok(out)
}

/// Candidate bookkeeping for one current arm.
struct Neighbourhood {
    row: SimilarityRow,
    space: Option<PreferenceSpace>,
    set: Option<CandidateSet>,
    all: Vec<usize>,
}

impl Neighbourhood {
    fn new(pool: &ReplayPool, current: ArmId, epsilon: f64) -> Result<Self> {
        let row = pool.index.row(current)?;
        let space = match PreferenceSpace::new(row.clone(), epsilon) {
            Ok(s) => Some(s),
            Err(Error::DegenerateSimilarities) => {
                log::warn!("arm {current} has no positive similarity to any other arm");
                None
            }
            Err(e) => return Err(e),
        };
        let all = (0..row.len()).collect();
        Ok(Self {
            row,
            space,
            set: None,
            all,
        })
    }

    fn marginals_for(&self, arms: &[ArmId]) -> Vec<f64> {
        let Some(space) = &self.space else {
            return vec![1.0 / arms.len() as f64; arms.len()];
        };
        let pos: std::collections::HashMap<ArmId, usize> =
            self.row.arms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        arms.iter().map(|a| pos.get(a).map_or(0.0, |&p| space.marginal(p))).collect()
    }
}

/// Replays one session starting at global round `t_offset + 1` and returns
/// its round logs.
pub fn replay_session<P: Recommender>(
    session: &Session,
    cfg: &ReplayConfig,
    pool: &ReplayPool,
    state: &mut ReplayState<P>,
    t_offset: u64,
) -> Result<Vec<RoundLog>> {
    let q = &session.query_ids;
    if q.len() < 2 {
        return Err(Error::config(format!(
            "session {} has {} queries; replay needs at least 2",
            session.session_id,
            q.len()
        )));
    }
    for &id in q {
        pool.table.vector(id)?;
    }

    let mut consumed = vec![false; q.len()];
    consumed[0] = true;
    let mut current = q[0];
    let mut hood: Option<Neighbourhood> = None;
    let random_k = if cfg.strategy == SelectionStrategy::RandomK {
        Some(random_k_candidates(pool.index.ids(), cfg.k_schedule.k_max(), &mut state.rng)?)
    } else {
        None
    };

    let mut logs = Vec::with_capacity(q.len() - 1);
    for round in 0..q.len() - 1 {
        let t = t_offset + round as u64 + 1;
        let k = state.k_at(&cfg.k_schedule, t);

        if hood.as_ref().is_none_or(|h| h.row.current != current) {
            hood = Some(Neighbourhood::new(pool, current, cfg.epsilon)?);
        }
        let h = hood.as_mut().expect("just set");

        let candidates: Vec<ArmId> = match cfg.strategy {
            SelectionStrategy::MaxUtility => match &h.space {
                Some(space) => {
                    let set = match h.set.take() {
                        Some(set) => greedy_extend(set, space, &h.all, k, &cfg.utility_model),
                        None => {
                            let k0 = cfg.k0.unwrap_or(k).min(h.all.len());
                            let dc = DistributedConfig {
                                partitions: cfg.partitions.min(h.all.len()),
                                seed: state.rng.random(),
                            };
                            let set = initialize_candidates(space, &h.all, k0, &cfg.utility_model, dc)?;
                            greedy_extend(set, space, &h.all, k, &cfg.utility_model)
                        }
                    };
                    let members = set.members.clone();
                    h.set = Some(set);
                    if members.is_empty() {
                        h.row.arms.clone()
                    } else {
                        members
                    }
                }
                None => h.row.arms.clone(),
            },
            SelectionStrategy::RandomK => {
                let drawn = random_k.as_deref().expect("drawn at session start");
                drawn.iter().copied().filter(|&a| a != current).collect()
            }
            SelectionStrategy::Zooming => zooming_candidates(&h.row, cfg.epsilon).0,
        };

        let marginals = state.policy.needs_marginals().then(|| h.marginals_for(&candidates));
        let upcoming: Vec<ArmId> = q.iter().zip(&consumed).filter(|(_, &c)| !c).map(|(&a, _)| a).collect();
        let ctx = RoundContext {
            current,
            current_vector: pool.table.vector(current)?,
            candidates: &candidates,
            embeddings: &pool.table,
            marginals: marginals.as_deref(),
        };
        let choice = state.policy.select(&ctx, &upcoming, &mut state.rng)?;

        let hit = (1..q.len()).find(|&j| !consumed[j] && q[j] == choice.chosen);
        let reward = hit.is_some() as u8;
        state.policy.update(&ctx, choice.chosen, reward as f64)?;

        let next = hit.unwrap_or_else(|| consumed.iter().position(|&c| !c).expect("one unconsumed per remaining round"));
        consumed[next] = true;

        logs.push(RoundLog {
            t,
            session_id: session.session_id.clone(),
            current_arm: current,
            recommended: choice.chosen,
            reward,
            candidate_size: candidates.len(),
        });
        current = q[next];
    }
    Ok(logs)
}

/// Replays every session in order with a single learner (rebuilt per session
/// when `reset_per_session` is set).
pub fn replay_corpus(sessions: &[Session], cfg: &ReplayConfig, pool: &ReplayPool) -> Result<ReplayOutcome> {
    cfg.validate()?;
    let dim = pool.table.dim();
    let mut state = ReplayState::new(cfg.policy.build(dim)?, cfg.rng_seed);
    replay_with(sessions, cfg, pool, &mut state, |s| {
        if cfg.reset_per_session {
            s.policy = cfg.policy.build(dim)?;
        }
        Ok(())
    })
}

/// [`replay_corpus`] with a caller-supplied recommender.
pub fn replay_corpus_with<P: Recommender>(
    sessions: &[Session],
    cfg: &ReplayConfig,
    pool: &ReplayPool,
    policy: P,
) -> Result<ReplayOutcome> {
    cfg.validate()?;
    let mut state = ReplayState::new(policy, cfg.rng_seed);
    replay_with(sessions, cfg, pool, &mut state, |_| Ok(()))
}

fn replay_with<P: Recommender>(
    sessions: &[Session],
    cfg: &ReplayConfig,
    pool: &ReplayPool,
    state: &mut ReplayState<P>,
    mut on_session: impl FnMut(&mut ReplayState<P>) -> Result<()>,
) -> Result<ReplayOutcome> {
    if sessions.is_empty() {
        return Err(Error::config("replay needs at least one session"));
    }
    let mut rounds = Vec::new();
    for (i, s) in sessions.iter().enumerate() {
        if i > 0 {
            on_session(state)?;
        }
        let t0 = rounds.len() as u64;
        rounds.extend(replay_session(s, cfg, pool, state, t0)?);
    }
    Ok(ReplayOutcome::from_rounds(rounds))
}

pub fn write_round_log<W: Write>(mut out: W, rounds: &[RoundLog]) -> std::io::Result<()> {
    writeln!(out, "t,session_id,current_arm,recommended,reward,candidate_size")?;
    for r in rounds {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t, r.session_id, r.current_arm, r.recommended, r.reward, r.candidate_size
        )?;
    }
    out.flush()
}
