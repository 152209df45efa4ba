//! Hit-and-run sampling from the exponential-family density p_θ ∝ e^{⟨θ,x⟩}
//! on a polytope.
//!
//! Each step draws a uniformly random direction, intersects the line through
//! the current point with the body (exactly, via the half-space
//! representation), and samples the new point from the exact 1-D exponential
//! conditional on that chord. Steps are therefore rejection-free. Chains are
//! deterministic functions of (body, θ, count, config); independent chains
//! use seeds `seed ^ chain_index` so results never depend on scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::geometry::{self, ConvexBody, GeometryError};

/// Number of batches used for batch-means standard errors.
const BATCHES: usize = 32;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("non-finite numeric input")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least 2 samples to estimate moments, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Burn-in and thinning defaults are desk-scale heuristics; statistical
/// tests downstream rely on reported standard errors, not on these.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: 1000,
            thinning: 10,
            seed: 0,
        }
    }
}

/// Current position of one hit-and-run chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub position: DVector<f64>,
    pub steps_taken: u64,
}

/// Inverse-CDF sample of the density ∝ e^{rate·s} on [lo, hi] at the
/// uniform variate `u`. Total on valid input: tiny |rate·(hi−lo)| falls
/// back to the uniform sample, and both exponential branches are written in
/// `exp_m1`/`ln_1p` form so neither end of the chord loses precision.
pub fn chord_sample_1d(lo: f64, hi: f64, rate: f64, u: f64) -> f64 {
    debug_assert!(lo < hi && rate.is_finite() && (0.0..=1.0).contains(&u));
    let len = hi - lo;
    let rl = rate * len;
    let s = if rl.abs() < 1e-8 {
        lo + u * len
    } else if rl > 0.0 {
        // e^{rate·s} mass at the high end: s = hi + ln(1 − (1−u)(1−e^{−rl}))/rate.
        hi + f64::ln_1p((1.0 - u) * f64::exp_m1(-rl)) / rate
    } else {
        // Mass at the low end: s = lo + ln(1 + u(e^{rl} − 1))/rate.
        lo + f64::ln_1p(u * f64::exp_m1(rl)) / rate
    };
    s.clamp(lo, hi)
}

/// `count` hit-and-run samples from p_θ on `body`, after `config.burn_in`
/// steps and keeping every `config.thinning`-th state. The chain starts at
/// the Chebyshev center.
pub fn sample(
    body: &ConvexBody,
    theta: &DVector<f64>,
    count: usize,
    config: &SamplerConfig,
) -> Result<Vec<DVector<f64>>, SamplerError> {
    let n = body.dimension();
    if theta.len() != n {
        return Err(SamplerError::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    if !theta.iter().all(|t| t.is_finite()) {
        return Err(SamplerError::NonFiniteInput);
    }
    if count == 0 {
        return Err(SamplerError::InvalidConfig("count must be positive".into()));
    }
    if config.thinning == 0 {
        return Err(SamplerError::InvalidConfig(
            "thinning must be positive".into(),
        ));
    }

    let (a, b) = body.halfspaces()?;
    let (start, _) = body.chebyshev_center()?;
    let mut chain = ChainState {
        position: start,
        steps_taken: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(count);
    let total = config.burn_in + count * config.thinning;
    for step in 0..total {
        hit_and_run_step(&a, &b, theta, &mut chain, &mut rng)?;
        if step >= config.burn_in && (step - config.burn_in + 1) % config.thinning == 0 {
            out.push(chain.position.clone());
        }
    }
    Ok(out)
}

fn hit_and_run_step(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    theta: &DVector<f64>,
    chain: &mut ChainState,
    rng: &mut ChaCha8Rng,
) -> Result<(), SamplerError> {
    let dir = random_unit(rng, chain.position.len());
    let (lo, hi) = geometry::chord_interval(a, b, &chain.position, &dir)?;
    if hi - lo > 1e-14 {
        let rate = theta.dot(&dir);
        let u: f64 = rng.random();
        let s = chord_sample_1d(lo, hi, rate, u);
        chain.position.axpy(s, &dir, 1.0);
    }
    chain.steps_taken += 1;
    Ok(())
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Sample mean, unbiased sample covariance, and batch-means standard errors
/// (32 batches) for every entry.
#[derive(Debug, Clone)]
pub struct MomentEstimate {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub mean_se: DVector<f64>,
    pub covariance_se: DMatrix<f64>,
}

pub fn estimate_moments(samples: &[DVector<f64>]) -> Result<MomentEstimate, SamplerError> {
    let k = samples.len();
    if k < 2 {
        return Err(SamplerError::TooFewSamples(k));
    }
    let n = samples[0].len();
    let mut mean = DVector::zeros(n);
    for x in samples {
        mean += x;
    }
    mean /= k as f64;

    let mut covariance = DMatrix::zeros(n, n);
    for x in samples {
        let d = x - &mean;
        covariance.ger(1.0, &d, &d, 1.0);
    }
    covariance /= (k - 1) as f64;

    // Batch means: contiguous near-equal chunks; the spread of per-batch
    // estimates over sqrt(B) gives a correlation-aware standard error.
    let batches = ranges(k, BATCHES.min(k));
    let nb = batches.len();
    let mut mean_se = DVector::zeros(n);
    let mut covariance_se = DMatrix::zeros(n, n);
    let mut batch_mean = Vec::with_capacity(nb);
    let mut batch_cov = Vec::with_capacity(nb);
    for r in &batches {
        let len = (r.end - r.start) as f64;
        let mut bm = DVector::zeros(n);
        let mut bc = DMatrix::zeros(n, n);
        for x in &samples[r.clone()] {
            bm += x;
            let d = x - &mean;
            bc.ger(1.0, &d, &d, 1.0);
        }
        batch_mean.push(bm / len);
        batch_cov.push(bc / len);
    }
    for i in 0..n {
        mean_se[i] = spread(batch_mean.iter().map(|m| m[i]));
        for j in 0..n {
            covariance_se[(i, j)] = spread(batch_cov.iter().map(|c| c[(i, j)]));
        }
    }
    Ok(MomentEstimate {
        mean,
        covariance,
        mean_se,
        covariance_se,
    })
}

/// Unbiased variance and batch-means standard error of a scalar sequence:
/// per-batch second central moments about the global mean, spread over
/// batches.
pub(crate) fn scalar_variance_stats(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    debug_assert!(k >= 2);
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let batch: Vec<f64> = ranges(k, BATCHES.min(k))
        .into_iter()
        .map(|r| {
            values[r.clone()].iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (r.end - r.start) as f64
        })
        .collect();
    (var, spread(batch.into_iter()))
}

/// Mean and batch-means standard error of a scalar sequence.
pub(crate) fn scalar_batch_stats(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    debug_assert!(k >= 2);
    let mean = values.iter().sum::<f64>() / k as f64;
    let batch: Vec<f64> = ranges(k, BATCHES.min(k))
        .into_iter()
        .map(|r| values[r.clone()].iter().sum::<f64>() / (r.end - r.start) as f64)
        .collect();
    (mean, spread(batch.into_iter()))
}

/// Standard error of the overall mean from per-batch estimates:
/// std(batch values) / sqrt(B).
fn spread(batch: impl Iterator<Item = f64> + Clone) -> f64 {
    let b = batch.clone().count() as f64;
    let m = batch.clone().sum::<f64>() / b;
    let var = batch.map(|v| (v - m).powi(2)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

/// Split `0..k` into `parts` contiguous ranges with sizes differing by at
/// most one.
fn ranges(k: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let base = k / parts;
    let extra = k % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}
