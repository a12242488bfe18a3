use nalgebra::{DMatrix, DVector};

use super::{argmax_by_score, FeatureMap, PolicyChoice};
use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::ArmId;

/// Updates between full re-factorisations of the inverse design matrix.
pub const REFACTOR_EVERY: usize = 1000;

/// Shared-parameter LinUCB with ridge regularisation.
///
/// Keeps `A = λI + Σ φφᵀ`, `b = Σ rφ`, and `A⁻¹` updated by Sherman–Morrison.
/// Every [`REFACTOR_EVERY`] updates `A⁻¹` is recomputed from `A` by Cholesky.
#[derive(Debug, Clone)]
pub struct LinUcb {
    pub feature_map: FeatureMap,
    pub alpha: f64,
    pub lambda: f64,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    b: DVector<f64>,
    theta: DVector<f64>,
    updates: usize,
}

impl LinUcb {
    /// `context_dim` is the embedding dimension; the model works in the
    /// feature dimension implied by `feature_map`.
    pub fn new(context_dim: usize, feature_map: FeatureMap, alpha: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::config("LinUCB lambda must be positive"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::config("LinUCB alpha must be non-negative"));
        }
        let d = feature_map.output_dim(context_dim);
        Ok(Self {
            feature_map,
            alpha,
            lambda,
            a: DMatrix::identity(d, d) * lambda,
            a_inv: DMatrix::identity(d, d) / lambda,
            b: DVector::zeros(d),
            theta: DVector::zeros(d),
            updates: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn design_inverse(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    /// `θ̂ᵀφ + α √(φᵀA⁻¹φ)`.
    pub fn score(&self, phi: &[f64]) -> f64 {
        let mean: f64 = self.theta.iter().zip(phi).map(|(t, x)| t * x).sum();
        mean + self.alpha * quad_form(&self.a_inv, phi).max(0.0).sqrt()
    }

    /// Highest-scoring candidate, ties to the lowest id.
    pub fn select(&self, candidates: &[ArmId], current: &[f64], embeddings: &EmbeddingTable) -> Result<PolicyChoice> {
        let mut phi = Vec::with_capacity(self.dim());
        let mut scores = Vec::with_capacity(candidates.len());
        for &arm in candidates {
            self.feature_map.write(current, embeddings.vector(arm)?, &mut phi);
            scores.push(self.score(&phi));
        }
        argmax_by_score(candidates, &scores)
    }

    pub fn update(&mut self, phi: &[f64], reward: f64) -> Result<()> {
        let x = DVector::from_column_slice(phi);
        self.a.ger(1.0, &x, &x, 1.0);
        self.b.axpy(reward, &x, 1.0);
        self.updates += 1;
        if self.updates % REFACTOR_EVERY == 0 {
            self.a_inv = invert_spd(&self.a)?;
        } else {
            sherman_morrison(&mut self.a_inv, &x);
        }
        self.theta = &self.a_inv * &self.b;
        Ok(())
    }
}

/// `φᵀMφ` for a column-major square matrix.
pub(crate) fn quad_form(m: &DMatrix<f64>, phi: &[f64]) -> f64 {
    let n = phi.len();
    let data = m.as_slice();
    let mut total = 0.0;
    for (j, &pj) in phi.iter().enumerate() {
        if pj == 0.0 {
            continue;
        }
        let col = &data[j * n..(j + 1) * n];
        let dot: f64 = col.iter().zip(phi).map(|(a, b)| a * b).sum();
        total += pj * dot;
    }
    total
}

/// `M ← M − (Mx)(Mx)ᵀ / (1 + xᵀMx)` for symmetric `M = A⁻¹`.
pub(crate) fn sherman_morrison(m: &mut DMatrix<f64>, x: &DVector<f64>) {
    let mx = &*m * x;
    let denom = 1.0 + x.dot(&mx);
    m.ger(-1.0 / denom, &mx, &mx, 1.0);
}

pub(crate) fn invert_spd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = a.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let inv = chol.inverse();
    let n = a.nrows();
    let drift = (a * &inv - DMatrix::<f64>::identity(n, n)).abs().max();
    if drift >= 1e-6 {
        log::warn!("inverse drift {drift:.3e} after re-factorisation");
    }
    Ok(inv)
}
