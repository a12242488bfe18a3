//! Reference computations written directly from the formulas, without going
//! through the library, plus small instance generators.

#![allow(dead_code)]

use manyarm::preference::{PreferenceSpace, SimilarityRow};
use manyarm::ArmId;
use rand::Rng;

/// Joint, marginal and set probabilities for one similarity row.
pub struct Reference {
    pub s: Vec<f64>,
    pub above: Vec<bool>,
    pub pi: f64,
    pub pi_bar: f64,
    pub sa: f64,
    pub sb: f64,
}

impl Reference {
    pub fn new(raw: &[f64], eps: f64) -> Self {
        let s: Vec<f64> = raw.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect();
        let above: Vec<bool> = s.iter().map(|&x| x >= eps).collect();
        let sa: f64 = s.iter().zip(&above).filter(|(_, &a)| a).map(|(x, _)| x).sum();
        let sb: f64 = s.iter().zip(&above).filter(|(_, &a)| !a).map(|(x, _)| x).sum();
        Self {
            pi: sa / (sa + sb),
            pi_bar: sb / (sa + sb),
            s,
            above,
            sa,
            sb,
        }
    }

    fn wa(&self, j: usize) -> f64 {
        if self.sa > 0.0 { self.s[j] / self.sa } else { 0.0 }
    }

    fn wb(&self, j: usize) -> f64 {
        if self.sb > 0.0 { self.s[j] / self.sb } else { 0.0 }
    }

    pub fn joint(&self, j: usize, k: usize) -> f64 {
        let num = self.pi * self.pi * self.wa(j) * self.wa(k) + self.pi_bar * self.pi_bar * self.wb(j) * self.wb(k);
        num / (self.pi * self.pi + self.pi_bar * self.pi_bar)
    }

    pub fn marginal(&self, j: usize) -> f64 {
        let num = if self.above[j] {
            self.pi * self.pi * self.wa(j)
        } else {
            self.pi_bar * self.pi_bar * self.wb(j)
        };
        num / (self.pi * self.pi + self.pi_bar * self.pi_bar)
    }

    /// `g(C)` in plain arithmetic; fine for the small sets used in tests.
    pub fn set_probability(&self, set: &[usize]) -> f64 {
        let n = set.len() as i32;
        let pa: f64 = set.iter().map(|&j| self.wa(j)).product();
        let pb: f64 = set.iter().map(|&j| self.wb(j)).product();
        let (a, b) = (self.pi.powi(n), self.pi_bar.powi(n));
        (a * pa + b * pb) / (a + b)
    }
}

/// A row of `n` similarities in `[lo, 1)` for arms `1..=n`, current arm 0.
pub fn random_row<R: Rng>(rng: &mut R, n: usize, lo: f64) -> SimilarityRow {
    let scores: Vec<f64> = (0..n).map(|_| rng.random_range(lo..1.0)).collect();
    SimilarityRow::new(0, (1..=n as ArmId).collect(), scores)
}

/// A random instance whose clamped row has positive mass.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> PreferenceSpace {
    loop {
        let row = random_row(rng, n, 0.01);
        let eps = rng.random_range(0.05..0.95);
        if let Ok(space) = PreferenceSpace::new(row, eps) {
            return space;
        }
    }
}

/// Every `k`-subset of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-round pseudo-regret `R(t)/t` of LinUCB at each checkpoint, on a fixed
/// set of `arms` unit vectors in `d` dimensions with rewards
/// `1{θ*·x + N(0, noise²) > threshold}`.
pub fn linucb_linear_bandit(seed: u64, d: usize, arms: usize, checkpoints: &[usize]) -> Vec<f64> {
    use manyarm::corpus::EmbeddingTable;
    use manyarm::policies::{FeatureMap, LinUcb};
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal, StandardNormal};

    const NOISE: f64 = 0.1;
    const THRESHOLD: f64 = 0.3;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut rand_chacha::ChaCha8Rng| {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
    };
    let theta = unit(&mut rng);
    let mut table = EmbeddingTable::new(d);
    for id in 0..arms as ArmId {
        table.insert(id, &unit(&mut rng)).unwrap();
    }
    let ids = table.ids().to_vec();
    let mean = |x: &[f64]| x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
    let success = |m: f64| 0.5 * (1.0 + libm::erf((m - THRESHOLD) / NOISE / std::f64::consts::SQRT_2));
    let p: Vec<f64> = ids.iter().map(|&a| success(mean(table.get(a).unwrap()))).collect();
    let best = p.iter().cloned().fold(0.0, f64::max);
    let noise = Normal::new(0.0, NOISE).unwrap();
    let context = vec![0.0; d];

    let mut ucb = LinUcb::new(d, FeatureMap::ArmOnly, 1.0, 1.0).unwrap();
    let horizon = *checkpoints.iter().max().unwrap();
    let mut regret = 0.0;
    let mut out = Vec::new();
    for t in 1..=horizon {
        let a = ucb.select(&ids, &context, &table).unwrap().chosen;
        let x = table.get(a).unwrap();
        let r = (mean(x) + noise.sample(&mut rng) > THRESHOLD) as u8 as f64;
        ucb.update(x, r).unwrap();
        regret += best - p[a as usize];
        if checkpoints.contains(&t) {
            out.push(regret / t as f64);
        }
    }
    out
}
