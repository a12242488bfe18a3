use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::linucb::{invert_spd, sherman_morrison, REFACTOR_EVERY};
use super::{argmax_by_score, FeatureMap, PolicyChoice};
use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::ArmId;

/// Linear Thompson sampling with a Gaussian posterior `N(μ̂, v² B⁻¹)`.
#[derive(Debug, Clone)]
pub struct LinThompSamp {
    pub feature_map: FeatureMap,
    /// Posterior scale `v`; zero makes the policy greedy in `μ̂`.
    pub v: f64,
    b: DMatrix<f64>,
    b_inv: DMatrix<f64>,
    f: DVector<f64>,
    mu_hat: DVector<f64>,
    updates: usize,
}

impl LinThompSamp {
    pub fn new(context_dim: usize, feature_map: FeatureMap, v: f64) -> Result<Self> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::config("LinThompSamp v must be non-negative"));
        }
        let d = feature_map.output_dim(context_dim);
        Ok(Self {
            feature_map,
            v,
            b: DMatrix::identity(d, d),
            b_inv: DMatrix::identity(d, d),
            f: DVector::zeros(d),
            mu_hat: DVector::zeros(d),
            updates: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mu_hat
    }

    /// One posterior draw `θ̃`.
    pub fn sample_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        if self.v == 0.0 {
            return Ok(self.mu_hat.clone());
        }
        let chol = self.b_inv.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        Ok(&self.mu_hat + chol.l() * z * self.v)
    }

    pub fn select<R: Rng + ?Sized>(
        &self,
        candidates: &[ArmId],
        current: &[f64],
        embeddings: &EmbeddingTable,
        rng: &mut R,
    ) -> Result<PolicyChoice> {
        let theta = self.sample_theta(rng)?;
        let mut phi = Vec::with_capacity(self.dim());
        let mut scores = Vec::with_capacity(candidates.len());
        for &arm in candidates {
            self.feature_map.write(current, embeddings.vector(arm)?, &mut phi);
            scores.push(theta.iter().zip(&phi).map(|(t, x)| t * x).sum());
        }
        argmax_by_score(candidates, &scores)
    }

    pub fn update(&mut self, phi: &[f64], reward: f64) -> Result<()> {
        let x = DVector::from_column_slice(phi);
        self.b.ger(1.0, &x, &x, 1.0);
        self.f.axpy(reward, &x, 1.0);
        self.updates += 1;
        if self.updates % REFACTOR_EVERY == 0 {
            self.b_inv = invert_spd(&self.b)?;
        } else {
            sherman_morrison(&mut self.b_inv, &x);
        }
        self.mu_hat = &self.b_inv * &self.f;
        Ok(())
    }
}
