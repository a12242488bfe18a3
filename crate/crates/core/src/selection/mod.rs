//! Max-utility candidate sets.
//!
//! The utility of a candidate set `C` around the current arm is `c · ln g(C)`
//! (joint probability of the whole set) or, in the modular variant,
//! `c · Σ ln P(j)` over per-arm marginals. Sets are grown greedily: plain
//! greedy for incremental extension, lazy greedy for from-scratch builds, and
//! a partition/merge distributed greedy for initialisation over huge pools.

mod distributed;
mod greedy;
mod schedule;

pub use distributed::{
    distributed_greedy, distributed_greedy_run, initialize_candidates, DistributedConfig, DistributedRun,
};
pub use greedy::{greedy_extend, lazy_greedy};
pub use schedule::{BetaExponent, KSchedule};

use crate::error::{Error, Result};
use crate::preference::{log_sum_exp, PreferenceSpace};
use crate::ArmId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UtilityVariant {
    /// `c · ln g(C)` with the set-level joint probability.
    #[default]
    GeneralizedJoint,
    /// `c · Σ_{j∈C} ln P(j)` with per-arm marginals.
    ModularLogMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityModel {
    pub variant: UtilityVariant,
    pub scale: f64,
}

impl Default for UtilityModel {
    fn default() -> Self {
        Self {
            variant: UtilityVariant::GeneralizedJoint,
            scale: 1.0,
        }
    }
}

impl UtilityModel {
    pub fn new(variant: UtilityVariant, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::config("utility scale must be positive"));
        }
        Ok(Self { variant, scale })
    }

    pub fn modular() -> Self {
        Self {
            variant: UtilityVariant::ModularLogMarginal,
            scale: 1.0,
        }
    }
}

/// Utility of a set given by local indices into `space`. `-∞` when any member
/// has zero clamped similarity.
pub fn utility(model: &UtilityModel, space: &PreferenceSpace, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let raw = match model.variant {
        UtilityVariant::GeneralizedJoint => space.log_set_probability(set)?,
        UtilityVariant::ModularLogMarginal => set.iter().map(|&j| space.marginal(j).ln()).sum(),
    };
    Ok(model.scale * raw)
}

/// Greedily built candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub current_arm: ArmId,
    pub epsilon: f64,
    /// Insertion order.
    pub members: Vec<ArmId>,
    /// Local indices into the preference space the set was built on.
    pub positions: Vec<usize>,
    /// Utility after each insertion.
    pub utility_trace: Vec<f64>,
    /// Gain evaluations spent building the set.
    pub gain_evaluations: usize,
}

impl CandidateSet {
    pub fn empty(space: &PreferenceSpace) -> Self {
        Self {
            current_arm: space.current(),
            epsilon: space.partition.epsilon,
            members: Vec::new(),
            positions: Vec::new(),
            utility_trace: Vec::new(),
            gain_evaluations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Utility of the full set, `-∞` when empty.
    pub fn utility(&self) -> f64 {
        self.utility_trace.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn contains(&self, arm: ArmId) -> bool {
        self.members.contains(&arm)
    }
}

/// Running sums that let the set utility be updated in O(1) per insertion.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct GainState {
    n: usize,
    log_above: f64,
    log_below: f64,
    log_marginal: f64,
}

/// Utility of `space` under `model`, restated incrementally for greedy search.
pub(crate) struct Objective<'a> {
    model: UtilityModel,
    space: &'a PreferenceSpace,
    ln_mass_above: Option<f64>,
    ln_mass_below: Option<f64>,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(model: UtilityModel, space: &'a PreferenceSpace) -> Self {
        let ln = |m: f64| (m > 0.0).then(|| m.ln());
        Self {
            model,
            space,
            ln_mass_above: ln(space.partition.mass_above),
            ln_mass_below: ln(space.partition.mass_below),
        }
    }

    pub(crate) fn with(&self, mut s: GainState, e: usize) -> GainState {
        let w = &self.space.weights;
        s.n += 1;
        match self.model.variant {
            UtilityVariant::GeneralizedJoint => {
                s.log_above += w.w_above[e].ln();
                s.log_below += w.w_below[e].ln();
            }
            UtilityVariant::ModularLogMarginal => {
                s.log_marginal += self.space.marginal(e).ln();
            }
        }
        s
    }

    /// Utility of the state; the empty set scores zero.
    pub(crate) fn value(&self, s: &GainState) -> f64 {
        if s.n == 0 {
            return 0.0;
        }
        match self.model.variant {
            UtilityVariant::GeneralizedJoint => self.model.scale * (self.log_numerator(s) - self.log_denominator(s.n)),
            UtilityVariant::ModularLogMarginal => self.model.scale * s.log_marginal,
        }
    }

    fn log_numerator(&self, s: &GainState) -> f64 {
        let n = s.n as f64;
        let above = self.ln_mass_above.map_or(f64::NEG_INFINITY, |lm| n * lm + s.log_above);
        let below = self.ln_mass_below.map_or(f64::NEG_INFINITY, |lm| n * lm + s.log_below);
        log_sum_exp(&[above, below])
    }

    fn log_denominator(&self, n: usize) -> f64 {
        let n = n as f64;
        let above = self.ln_mass_above.map_or(f64::NEG_INFINITY, |lm| n * lm);
        let below = self.ln_mass_below.map_or(f64::NEG_INFINITY, |lm| n * lm);
        log_sum_exp(&[above, below])
    }

    /// Quantities shared by every gain evaluated against `s`.
    pub(crate) fn step(&self, s: &GainState) -> Step {
        Step {
            base: self.value(s),
            log_den_next: self.log_denominator(s.n + 1),
        }
    }

    pub(crate) fn gain(&self, s: &GainState, step: &Step, e: usize) -> f64 {
        match self.model.variant {
            UtilityVariant::GeneralizedJoint => {
                let next = self.with(*s, e);
                self.model.scale * (self.log_numerator(&next) - step.log_den_next) - step.base
            }
            UtilityVariant::ModularLogMarginal => self.model.scale * self.space.marginal(e).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    base: f64,
    log_den_next: f64,
}
