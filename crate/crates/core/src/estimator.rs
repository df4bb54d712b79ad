//! AP position estimation from (SNR, client position) samples.
//!
//! For every sample pair `(j, k)` the SNR ratio `r_j / (r_j + r_k)` is the
//! target probability that sample `j` ranks above `k`; the candidate AP
//! position `p` induces `d_k / (d_j + d_k)` with `d` the squared distance
//! from `p` to each sample position. The estimate minimises the mean binary
//! cross-entropy between the two over the pair list.
//!
//! The loss is not convex in `p` in general, so the solver is gradient
//! descent with backtracking (the step is halved whenever the loss would
//! increase), and [`grid_search_oracle`] exists as an independent check.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::radio::db_to_linear;

/// Clamp applied to distance probabilities before taking logs.
pub const PROB_EPS: f64 = 1e-12;

/// Above this many samples the default pairing switches to random pairs.
pub const ALL_PAIRS_LIMIT: usize = 200;
/// Random pairs drawn per sample when subsampling.
pub const PAIRS_PER_SAMPLE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// SNR in positive units (linear by default).
    pub r: f64,
    pub q: Vec3,
}

/// Units in which SNR enters the pair probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SnrScale {
    #[default]
    Linear,
    /// dB values used directly; every sample must be above 0 dB.
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum PairStrategy {
    /// All pairs up to [`ALL_PAIRS_LIMIT`] samples, random pairs beyond.
    #[default]
    Auto,
    AllPairs,
    RandomPairs {
        m: usize,
        seed: u64,
    },
}

/// Samples plus the pair list the loss sums over.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    pairs: Vec<(u32, u32)>,
}

impl SampleSet {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        Self::with_pairs(samples, PairStrategy::Auto)
    }

    pub fn with_pairs(samples: Vec<Sample>, strategy: PairStrategy) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples);
        }
        for s in &samples {
            if !(s.r > 0.0 && s.r.is_finite()) {
                return Err(Error::InvalidSample(alloc::format!(
                    "SNR sample {} is not positive",
                    s.r
                )));
            }
            if !s.q.is_finite() {
                return Err(Error::InvalidSample("position is not finite".into()));
            }
        }
        let pairs = build_pairs(samples.len(), strategy);
        Ok(SampleSet { samples, pairs })
    }

    /// Builds samples from `(position, snr_db)` measurements.
    pub fn from_db<I>(measurements: I, scale: SnrScale, strategy: PairStrategy) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec3, f64)>,
    {
        let samples = measurements
            .into_iter()
            .map(|(q, db)| Sample {
                q,
                r: match scale {
                    SnrScale::Linear => db_to_linear(db),
                    SnrScale::Db => db,
                },
            })
            .collect();
        Self::with_pairs(samples, strategy)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn repaired(&self, strategy: PairStrategy) -> SampleSet {
        SampleSet {
            samples: self.samples.clone(),
            pairs: build_pairs(self.samples.len(), strategy),
        }
    }

    fn centroid(&self) -> Vec3 {
        let sum = self.samples.iter().fold(Vec3::ZERO, |acc, s| acc + s.q);
        sum * (1.0 / self.samples.len() as f64)
    }

    fn has_two_positions(&self) -> bool {
        let first = self.samples[0].q;
        self.samples.iter().any(|s| s.q != first)
    }
}

fn build_pairs(n: usize, strategy: PairStrategy) -> Vec<(u32, u32)> {
    let all = || {
        let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for j in 0..n as u32 {
            for k in j + 1..n as u32 {
                v.push((j, k));
            }
        }
        v
    };
    match strategy {
        PairStrategy::AllPairs => all(),
        PairStrategy::Auto if n <= ALL_PAIRS_LIMIT => all(),
        PairStrategy::Auto => random_pairs(n, PAIRS_PER_SAMPLE * n, 0),
        PairStrategy::RandomPairs { m, seed } => random_pairs(n, m, seed),
    }
}

fn random_pairs(n: usize, m: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let j = rng.gen_range(0..n as u32);
            let mut k = rng.gen_range(0..n as u32 - 1);
            if k >= j {
                k += 1;
            }
            (j, k)
        })
        .collect()
}

/// Probability that SNR sample `j` ranks above `k`.
pub fn pair_prob_snr(r_j: f64, r_k: f64) -> Result<f64> {
    let s = r_j + r_k;
    if s == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(r_j / s)
}

/// Probability that position `q_j` ranks above `q_k` (is closer to `p_a`),
/// from squared distances.
pub fn pair_prob_dist(p_a: Vec3, q_j: Vec3, q_k: Vec3) -> Result<f64> {
    let (dj, dk) = (p_a.dist_sq(q_j), p_a.dist_sq(q_k));
    let s = dj + dk;
    if s == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(dk / s)
}

fn pair_term(pr: f64, pd: f64) -> f64 {
    let p = pd.clamp(PROB_EPS, 1.0 - PROB_EPS);
    -(pr * libm::log(p) + (1.0 - pr) * libm::log(1.0 - p))
}

/// Mean pairwise cross-entropy at candidate AP position `p_a`.
pub fn rank_loss(p_a: Vec3, samples: &SampleSet) -> Result<f64> {
    loss_and_gradient(p_a, samples, false).map(|(l, _)| l)
}

/// Analytic gradient of [`rank_loss`] with respect to `p_a`.
pub fn rank_loss_gradient(p_a: Vec3, samples: &SampleSet) -> Result<Vec3> {
    loss_and_gradient(p_a, samples, true).map(|(_, g)| g)
}

pub fn loss_and_gradient(p_a: Vec3, samples: &SampleSet, with_grad: bool) -> Result<(f64, Vec3)> {
    if samples.pairs.is_empty() {
        return Err(Error::InsufficientSamples);
    }
    let s = &samples.samples;
    let mut loss = 0.0;
    let mut grad = Vec3::ZERO;
    for &(j, k) in &samples.pairs {
        let (a, b) = (&s[j as usize], &s[k as usize]);
        let pr = a.r / (a.r + b.r);
        let (vj, vk) = (p_a - a.q, p_a - b.q);
        let (dj, dk) = (vj.norm_sq(), vk.norm_sq());
        let sum = dj + dk;
        if sum == 0.0 {
            return Err(Error::DegeneratePair);
        }
        let pd = dk / sum;
        loss += pair_term(pr, pd);
        // d/dp of the term is (pd - pr) * (2 vk / dk - 2 vj / dj); it vanishes
        // where the clamp is active.
        if with_grad && pd > PROB_EPS && pd < 1.0 - PROB_EPS {
            let c = 2.0 * (pd - pr);
            grad += (vk * (1.0 / dk) - vj * (1.0 / dj)) * c;
        }
    }
    let n = samples.pairs.len() as f64;
    Ok((loss / n, grad * (1.0 / n)))
}

/// Starting point of the descent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum InitStrategy {
    /// Centroid of the sample positions, raised to `height` (the ceiling).
    Centroid {
        height: f64,
    },
    Fixed {
        at: Vec3,
    },
}

impl Default for InitStrategy {
    fn default() -> Self {
        InitStrategy::Centroid { height: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Step multiplier after every accepted step (1.0 disables growth).
    pub step_growth: f64,
    pub init: InitStrategy,
    pub pair_strategy: PairStrategy,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            learning_rate: 0.05,
            max_iters: 5000,
            grad_tol: 1e-7,
            step_growth: 1.5,
            init: InitStrategy::default(),
            pair_strategy: PairStrategy::Auto,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::param("learning_rate", "must be > 0"));
        }
        if self.max_iters < 1 {
            return Err(Error::param("max_iters", "must be >= 1"));
        }
        if !(self.step_growth >= 1.0) {
            return Err(Error::param("step_growth", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub position: Vec3,
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Loss after every accepted step, starting with the initial loss.
    pub loss_history: Vec<f64>,
}

/// Gradient descent with backtracking on [`rank_loss`].
pub fn estimate_ap_position(samples: &SampleSet, cfg: &EstimatorConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !samples.has_two_positions() {
        return Err(Error::InsufficientSamples);
    }
    let repaired;
    let samples = if build_pairs(samples.len(), cfg.pair_strategy) == samples.pairs {
        samples
    } else {
        repaired = samples.repaired(cfg.pair_strategy);
        &repaired
    };

    let mut p = match cfg.init {
        InitStrategy::Centroid { height } => {
            let c = samples.centroid();
            Vec3::new(c.x, c.y, height)
        }
        InitStrategy::Fixed { at } => at,
    };
    let (mut loss, mut grad) = loss_and_gradient(p, samples, true)?;
    let mut history = alloc::vec![loss];
    let mut lr = cfg.learning_rate;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let gnorm = grad.norm();
        if !gnorm.is_finite() {
            return Err(Error::NonFinite);
        }
        if gnorm < cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let accepted = loop {
            let cand = p - grad * lr;
            if !cand.is_finite() {
                return Err(Error::NonFinite);
            }
            let (l, g) = loss_and_gradient(cand, samples, true)?;
            if !l.is_finite() {
                return Err(Error::NonFinite);
            }
            if l <= loss {
                break Some((cand, l, g));
            }
            lr *= 0.5;
            if lr * gnorm < 1e-16 {
                break None;
            }
        };
        match accepted {
            Some((cand, l, g)) => {
                p = cand;
                loss = l;
                grad = g;
                history.push(l);
                lr *= cfg.step_growth;
            }
            // no descent step is representable any more
            None => {
                converged = true;
                break;
            }
        }
    }

    Ok(Estimate {
        position: p,
        loss,
        iterations,
        converged,
        loss_history: history,
    })
}

/// Exhaustive minimisation of [`rank_loss`] over cell centers of `bounds`
/// split into cells no larger than `resolution` per axis.
pub fn grid_search_oracle(samples: &SampleSet, bounds: Aabb, resolution: f64) -> Result<Vec3> {
    if !(resolution > 0.0) {
        return Err(Error::param("resolution", "must be > 0"));
    }
    let ext = bounds.max - bounds.min;
    if ext.x < 0.0 || ext.y < 0.0 || ext.z < 0.0 {
        return Err(Error::param("bounds", "min must not exceed max"));
    }
    let cells = |len: f64| (libm::ceil(len / resolution) as usize).max(1);
    let (nx, ny, nz) = (cells(ext.x), cells(ext.y), cells(ext.z));
    let center = |lo: f64, len: f64, n: usize, i: usize| lo + (i as f64 + 0.5) * len / n as f64;

    let mut best = None;
    let mut best_loss = f64::INFINITY;
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let p = Vec3::new(
                    center(bounds.min.x, ext.x, nx, ix),
                    center(bounds.min.y, ext.y, ny, iy),
                    center(bounds.min.z, ext.z, nz, iz),
                );
                if let Ok(l) = rank_loss(p, samples) {
                    if l < best_loss || best.is_none() {
                        best_loss = l;
                        best = Some(p);
                    }
                }
            }
        }
    }
    best.ok_or(Error::DegeneratePair)
}
