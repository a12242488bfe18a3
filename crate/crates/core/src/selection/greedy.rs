use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CandidateSet, GainState, Objective, UtilityModel};
use crate::preference::PreferenceSpace;
use crate::ArmId;

/// Greedy order: larger gain first, then lower arm id.
#[inline]
fn beats(gain: f64, arm: ArmId, best_gain: f64, best_arm: ArmId) -> bool {
    match gain.total_cmp(&best_gain) {
        Ordering::Greater => true,
        Ordering::Equal => arm < best_arm,
        Ordering::Less => false,
    }
}

fn rebuild_state(obj: &Objective<'_>, positions: &[usize]) -> GainState {
    positions.iter().fold(GainState::default(), |s, &e| obj.with(s, e))
}

/// Appends arms from `pool` (local indices into `space`) until `set` holds
/// `k_target` members, each time taking the arm with the largest utility gain,
/// ties to the lowest arm id. Arms already in `set` are skipped, and arms whose
/// gain is `-∞` are never added, so the result can stop short of `k_target`.
pub fn greedy_extend(
    set: CandidateSet,
    space: &PreferenceSpace,
    pool: &[usize],
    k_target: usize,
    model: &UtilityModel,
) -> CandidateSet {
    let mut set = set;
    if set.len() >= k_target {
        return set;
    }
    let obj = Objective::new(*model, space);
    let mut state = rebuild_state(&obj, &set.positions);
    let mut taken = vec![false; space.len()];
    for &p in &set.positions {
        taken[p] = true;
    }
    let mut remaining: Vec<usize> = pool.iter().copied().filter(|&p| !taken[p]).collect();

    while set.len() < k_target && !remaining.is_empty() {
        let mut best: Option<(usize, f64, ArmId)> = None;
        let step = obj.step(&state);
        for (slot, &e) in remaining.iter().enumerate() {
            let g = obj.gain(&state, &step, e);
            set.gain_evaluations += 1;
            if g == f64::NEG_INFINITY || g.is_nan() {
                continue;
            }
            let arm = space.arm(e);
            if best.is_none_or(|(_, bg, ba)| beats(g, arm, bg, ba)) {
                best = Some((slot, g, arm));
            }
        }
        let Some((slot, _, arm)) = best else { break };
        let e = remaining.swap_remove(slot);
        state = obj.with(state, e);
        set.members.push(arm);
        set.positions.push(e);
        set.utility_trace.push(obj.value(&state));
    }
    set
}

struct Entry {
    gain: f64,
    arm: ArmId,
    pos: usize,
    /// Set size when `gain` was computed.
    stamp: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.arm.cmp(&self.arm))
    }
}

/// Greedy from an empty set using stale gains as upper bounds: only the heap
/// head is re-evaluated, and it is accepted once its gain is current. Exact for
/// objectives with diminishing returns, which both utility variants have.
pub fn lazy_greedy(space: &PreferenceSpace, pool: &[usize], k: usize, model: &UtilityModel) -> CandidateSet {
    let obj = Objective::new(*model, space);
    let mut set = CandidateSet::empty(space);
    let mut state = GainState::default();

    let mut heap: BinaryHeap<Entry> = BinaryHeap::with_capacity(pool.len());
    let mut step = obj.step(&state);
    for &pos in pool {
        let gain = obj.gain(&state, &step, pos);
        set.gain_evaluations += 1;
        if gain == f64::NEG_INFINITY || gain.is_nan() {
            continue;
        }
        heap.push(Entry {
            gain,
            arm: space.arm(pos),
            pos,
            stamp: 0,
        });
    }

    while set.len() < k {
        let Some(mut top) = heap.pop() else { break };
        if top.stamp == set.len() {
            state = obj.with(state, top.pos);
            step = obj.step(&state);
            set.members.push(top.arm);
            set.positions.push(top.pos);
            set.utility_trace.push(obj.value(&state));
            continue;
        }
        top.gain = obj.gain(&state, &step, top.pos);
        top.stamp = set.len();
        set.gain_evaluations += 1;
        if top.gain == f64::NEG_INFINITY || top.gain.is_nan() {
            continue;
        }
        heap.push(top);
    }
    set
}
