//! Similarity-induced preference probabilities around the currently playing arm.
//!
//! Given raw similarities `s_j` of every other arm to the current arm and a
//! threshold `ε`, arms split into `above` (`s_j ≥ ε`) and `below`. The
//! masses `π = Σ_above s / Σ s` and `π̄ = 1 - π` weight two within-side
//! distributions `w_j = s_j / Σ_above s` and `w̄_j = s_j / Σ_below s`.
//! Pairs are drawn both-above or both-below:
//!
//! ```text
//! p(j, k) = (π² w_j w_k + π̄² w̄_j w̄_k) / (π² + π̄²)
//! ```
//!
//! Both weight families are stored for every arm, so `w̄_j` of an above arm
//! can exceed one. The marginal restricts each arm to its own side, which makes
//! it a proper distribution over all arms.
//!
//! Negative similarities are clamped to zero before any of this. A side whose
//! mass is zero (empty, or all-zero similarities) drops out of every formula.

use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::ArmId;

/// `u·v / (‖u‖‖v‖)`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Raw similarities of every other arm to `current`. Position `p` in
/// `arms`/`scores` is the "local index" used throughout this module.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityRow {
    pub current: ArmId,
    pub arms: Vec<ArmId>,
    pub scores: Vec<f64>,
}

impl SimilarityRow {
    pub fn new(current: ArmId, arms: Vec<ArmId>, scores: Vec<f64>) -> Self {
        assert_eq!(arms.len(), scores.len(), "arms and scores must align");
        Self { current, arms, scores }
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    /// Local index of `arm`, by linear scan.
    pub fn position(&self, arm: ArmId) -> Option<usize> {
        self.arms.iter().position(|&a| a == arm)
    }
}

/// Source of similarity rows. Exact cosine is the only implementation here;
/// an approximate index can slot in behind the same trait.
pub trait SimilarityOracle {
    fn row(&self, current: ArmId) -> Result<SimilarityRow>;
}

/// Exact cosine similarity over a unit-normalised copy of an embedding table.
/// Rows are computed on demand; no pairwise matrix is ever materialised.
#[derive(Debug, Clone)]
pub struct CosineIndex {
    dim: usize,
    ids: Vec<ArmId>,
    unit: Vec<f64>,
    table_pos: std::collections::HashMap<ArmId, usize>,
}

impl CosineIndex {
    pub fn new(table: &EmbeddingTable) -> Result<Self> {
        let dim = table.dim();
        let mut unit = Vec::with_capacity(table.len() * dim);
        for (id, v) in table.iter() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                log::warn!("query {id} has a zero embedding");
                return Err(Error::ZeroVector);
            }
            unit.extend(v.iter().map(|x| x / n));
        }
        let table_pos = table.ids().iter().enumerate().map(|(i, &id)| (id, i)).collect();
        Ok(Self {
            dim,
            ids: table.ids().to_vec(),
            unit,
            table_pos,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ArmId] {
        &self.ids
    }

    pub fn unit_vector(&self, id: ArmId) -> Option<&[f64]> {
        self.table_pos.get(&id).map(|&p| &self.unit[p * self.dim..(p + 1) * self.dim])
    }

    /// Similarities of `current` to the listed arms (skipping `current` itself).
    pub fn row_over(&self, current: ArmId, arms: &[ArmId]) -> Result<SimilarityRow> {
        let q = self.unit_vector(current).ok_or(Error::MissingEmbedding(current))?;
        let mut out_arms = Vec::with_capacity(arms.len());
        let mut scores = Vec::with_capacity(arms.len());
        for &a in arms {
            if a == current {
                continue;
            }
            let v = self.unit_vector(a).ok_or(Error::MissingEmbedding(a))?;
            out_arms.push(a);
            scores.push(dot(q, v).clamp(-1.0, 1.0));
        }
        Ok(SimilarityRow::new(current, out_arms, scores))
    }
}

impl SimilarityOracle for CosineIndex {
    fn row(&self, current: ArmId) -> Result<SimilarityRow> {
        let q = self.unit_vector(current).ok_or(Error::MissingEmbedding(current))?;
        let mut arms = Vec::with_capacity(self.ids.len().saturating_sub(1));
        let mut scores = Vec::with_capacity(self.ids.len().saturating_sub(1));
        for (id, v) in self.ids.iter().zip(self.unit.chunks_exact(self.dim)) {
            if *id == current {
                continue;
            }
            arms.push(*id);
            scores.push(dot(q, v).clamp(-1.0, 1.0));
        }
        Ok(SimilarityRow::new(current, arms, scores))
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The ε-split of a similarity row.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub epsilon: f64,
    /// Per local index: clamped similarity `≥ ε`.
    pub above: Vec<bool>,
    /// Similarities clamped at zero.
    pub clamped: Vec<f64>,
    pub mass_above: f64,
    pub mass_below: f64,
    pub sum_above: f64,
    pub sum_below: f64,
}

impl Partition {
    pub fn new(row: &SimilarityRow, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::config("epsilon must be finite"));
        }
        let clamped: Vec<f64> = row.scores.iter().map(|&s| s.max(0.0)).collect();
        let above: Vec<bool> = clamped.iter().map(|&s| s >= epsilon).collect();
        let (mut sum_above, mut sum_below) = (0.0, 0.0);
        for (&s, &up) in clamped.iter().zip(&above) {
            if up {
                sum_above += s;
            } else {
                sum_below += s;
            }
        }
        let total = sum_above + sum_below;
        if total <= 0.0 {
            return Err(Error::DegenerateSimilarities);
        }
        let mass_above = sum_above / total;
        Ok(Self {
            epsilon,
            above,
            clamped,
            mass_above,
            mass_below: sum_below / total,
            sum_above,
            sum_below,
        })
    }

    pub fn len(&self) -> usize {
        self.above.len()
    }

    pub fn is_empty(&self) -> bool {
        self.above.is_empty()
    }

    pub fn above_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.above.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }

    pub fn below_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.above.iter().enumerate().filter(|(_, &a)| !a).map(|(i, _)| i)
    }

    /// `π² + π̄²`, always positive.
    pub fn pair_normalizer(&self) -> f64 {
        self.mass_above.powi(2) + self.mass_below.powi(2)
    }
}

/// Within-side weights for every arm.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceWeights {
    pub w_above: Vec<f64>,
    pub w_below: Vec<f64>,
}

impl PreferenceWeights {
    pub fn new(p: &Partition) -> Self {
        let scale = |sum: f64| if sum > 0.0 { 1.0 / sum } else { 0.0 };
        let (a, b) = (scale(p.sum_above), scale(p.sum_below));
        Self {
            w_above: p.clamped.iter().map(|s| s * a).collect(),
            w_below: p.clamped.iter().map(|s| s * b).collect(),
        }
    }
}

pub fn joint_probability(p: &Partition, w: &PreferenceWeights, j: usize, k: usize) -> Result<f64> {
    if j == k {
        return Err(Error::SameArm(j));
    }
    let mut num = 0.0;
    if p.mass_above > 0.0 {
        num += p.mass_above.powi(2) * (w.w_above[j] * w.w_above[k]);
    }
    if p.mass_below > 0.0 {
        num += p.mass_below.powi(2) * (w.w_below[j] * w.w_below[k]);
    }
    Ok(num / p.pair_normalizer())
}

/// Marginal selection probability, each arm supported on its own side only.
pub fn marginal_probability(p: &Partition, w: &PreferenceWeights, j: usize) -> f64 {
    let num = if p.above[j] {
        p.mass_above.powi(2) * w.w_above[j]
    } else {
        p.mass_below.powi(2) * w.w_below[j]
    };
    num / p.pair_normalizer()
}

/// `ln g(C)`, with
/// `g(C) = (π^n Π w_j + π̄^n Π w̄_j) / (π^n + π̄^n)`, `n = |C|`,
/// evaluated in log space so large sets do not underflow. Returns `-∞` when
/// some member has zero weight on every live side.
pub fn log_set_probability(p: &Partition, w: &PreferenceWeights, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.len() as f64;
    let mut num = Vec::with_capacity(2);
    let mut den = Vec::with_capacity(2);
    if p.mass_above > 0.0 {
        let lm = n * p.mass_above.ln();
        num.push(lm + set.iter().map(|&j| w.w_above[j].ln()).sum::<f64>());
        den.push(lm);
    }
    if p.mass_below > 0.0 {
        let lm = n * p.mass_below.ln();
        num.push(lm + set.iter().map(|&j| w.w_below[j].ln()).sum::<f64>());
        den.push(lm);
    }
    Ok(log_sum_exp(&num) - log_sum_exp(&den))
}

pub fn set_probability(p: &Partition, w: &PreferenceWeights, set: &[usize]) -> Result<f64> {
    log_set_probability(p, w, set).map(f64::exp)
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Row, partition and weights for one current arm.
#[derive(Debug, Clone)]
pub struct PreferenceSpace {
    pub row: SimilarityRow,
    pub partition: Partition,
    pub weights: PreferenceWeights,
}

impl PreferenceSpace {
    pub fn new(row: SimilarityRow, epsilon: f64) -> Result<Self> {
        let partition = Partition::new(&row, epsilon)?;
        let weights = PreferenceWeights::new(&partition);
        Ok(Self {
            row,
            partition,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    pub fn current(&self) -> ArmId {
        self.row.current
    }

    pub fn arm(&self, j: usize) -> ArmId {
        self.row.arms[j]
    }

    pub fn joint(&self, j: usize, k: usize) -> Result<f64> {
        joint_probability(&self.partition, &self.weights, j, k)
    }

    pub fn marginal(&self, j: usize) -> f64 {
        marginal_probability(&self.partition, &self.weights, j)
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.marginal(j)).collect()
    }

    pub fn log_set_probability(&self, set: &[usize]) -> Result<f64> {
        log_set_probability(&self.partition, &self.weights, set)
    }
}
