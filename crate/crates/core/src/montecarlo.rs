//! Monte Carlo simulation of the full sensing and fusion pipeline.
//!
//! The simulator works from [`NetworkParams`] directly: it draws the hypothesis,
//! every sensor's noise and the fusion center noise, forms each sensor observation
//! and the superimposed MAC signal, and applies the threshold test. It never looks
//! at the collapsed [`ChannelAggregate`](crate::model::ChannelAggregate), so it
//! independently checks the closed forms.
//!
//! Trials are split into fixed-size blocks. Block `k` draws from two ChaCha8
//! streams derived from `(seed, k)`, one for the hypothesis and noise and one for
//! the Gaussian jammer, so the estimate does not depend on how many workers run.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::PureStrategyProfile;
use crate::error::{check_len, Error, Result};
use crate::mixed::GaussianJammerCovariance;
use crate::model::{NetworkParams, Priors};

pub const BLOCK_TRIALS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub trials: usize,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub stderr: f64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    fn from_counts(errors: u64, trials: usize, seed: u64) -> Self {
        let estimate = errors as f64 / trials as f64;
        Self {
            estimate,
            trials,
            stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            seed,
        }
    }

    /// Compares against a closed-form value at `k` standard errors.
    pub fn check(&self, closed_form: f64, k: f64) -> OracleCheck {
        let deviation = self.estimate - closed_form;
        OracleCheck {
            estimate: *self,
            closed_form,
            deviation,
            bound: k * self.stderr,
            pass: deviation.abs() <= k * self.stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub estimate: MonteCarloEstimate,
    pub closed_form: f64,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

fn block_rng(seed: u64, block: usize, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * block as u64 + lane);
    rng
}

fn count_errors<F>(cfg: &McConfig, per_block: F) -> Result<u64>
where
    F: Fn(usize, usize) -> u64 + Sync,
{
    if cfg.trials == 0 {
        return Err(Error::InvalidTrials(cfg.trials));
    }
    let blocks = cfg.trials.div_ceil(BLOCK_TRIALS);
    let run = || -> u64 {
        (0..blocks)
            .into_par_iter()
            .map(|k| per_block(k, BLOCK_TRIALS.min(cfg.trials - k * BLOCK_TRIALS)))
            .sum()
    };
    if cfg.workers == 0 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "workers",
                reason: e.to_string(),
            })?;
        Ok(pool.install(run))
    }
}

struct Pipeline<'a> {
    network: &'a NetworkParams,
    pi1: f64,
    threshold: f64,
}

impl Pipeline<'_> {
    /// One trial given the jammer's per-sensor and direct contributions.
    /// Returns true on a decision error. Ties go to H0.
    fn trial(&self, rng: &mut ChaCha8Rng, sensor_jam: &[f64], fc_jam: f64) -> bool {
        let net = self.network;
        let present = rng.random::<f64>() < self.pi1;
        let theta = if present { 1.0 } else { 0.0 };
        let mut r = 0.0;
        for ((alpha, phi), jam) in net.alpha.iter().zip(&net.phi).zip(sensor_jam) {
            let n: f64 = rng.sample(StandardNormal);
            r += phi * (alpha * theta + jam + net.sigma_s * n);
        }
        let n_fc: f64 = rng.sample(StandardNormal);
        r += fc_jam + net.sigma_fc * n_fc;
        (r > self.threshold) != present
    }

    /// Splits `w = (w_s, w_fc)` into per-sensor and direct jamming terms.
    fn jamming_terms(&self, w: &[f64], sensor_jam: &mut [f64]) -> f64 {
        let l = self.network.sensing_antennas();
        let (w_s, w_fc) = w.split_at(l);
        for (out, row) in sensor_jam.iter_mut().zip(&self.network.beta) {
            *out = row.iter().zip(w_s).map(|(b, x)| b * x).sum();
        }
        if self.network.beta.is_empty() {
            sensor_jam.iter_mut().for_each(|x| *x = 0.0);
        }
        self.network.psi.iter().zip(w_fc).map(|(p, x)| p * x).sum()
    }
}

/// Estimates the error probability of a fixed pure profile by simulation.
pub fn simulate_error(
    profile: &PureStrategyProfile,
    network: &NetworkParams,
    priors: &Priors,
    cfg: &McConfig,
) -> Result<MonteCarloEstimate> {
    network.validate()?;
    check_len("jammer vector", network.jammer_dim(), profile.w.len())?;
    let pipeline = Pipeline {
        network,
        pi1: priors.pi1(),
        threshold: profile.threshold,
    };
    let mut sensor_jam = vec![0.0; network.sensors()];
    let fc_jam = pipeline.jamming_terms(&profile.w, &mut sensor_jam);

    let errors = count_errors(cfg, |block, n| {
        let mut rng = block_rng(cfg.seed, block, 0);
        (0..n)
            .filter(|_| pipeline.trial(&mut rng, &sensor_jam, fc_jam))
            .count() as u64
    })?;
    Ok(MonteCarloEstimate::from_counts(
        errors, cfg.trials, cfg.seed,
    ))
}

/// Estimates the error probability at threshold `lambda` against `w ~ N(0, W)`.
///
/// Hypothesis and noise draws match [`simulate_error`] for the same seed, so a
/// zero covariance reproduces its decisions exactly.
pub fn simulate_mixed_error(
    threshold: f64,
    cov: &GaussianJammerCovariance,
    network: &NetworkParams,
    priors: &Priors,
    cfg: &McConfig,
) -> Result<MonteCarloEstimate> {
    network.validate()?;
    let dim = network.jammer_dim();
    if cov.dim() != dim {
        return Err(Error::InvalidCovariance(format!(
            "covariance has dimension {}, jammer vector has {dim}",
            cov.dim()
        )));
    }
    let pipeline = Pipeline {
        network,
        pi1: priors.pi1(),
        threshold,
    };
    let factor: DMatrix<f64> = cov.factor();

    let errors = count_errors(cfg, |block, n| {
        let mut rng = block_rng(cfg.seed, block, 0);
        let mut jam_rng = block_rng(cfg.seed, block, 1);
        let mut z = vec![0.0; dim];
        let mut w = vec![0.0; dim];
        let mut sensor_jam = vec![0.0; network.sensors()];
        let mut errors = 0u64;
        for _ in 0..n {
            z.iter_mut()
                .for_each(|x| *x = jam_rng.sample(StandardNormal));
            for (r, wr) in w.iter_mut().enumerate() {
                *wr = (0..dim).map(|c| factor[(r, c)] * z[c]).sum();
            }
            let fc_jam = pipeline.jamming_terms(&w, &mut sensor_jam);
            if pipeline.trial(&mut rng, &sensor_jam, fc_jam) {
                errors += 1;
            }
        }
        errors
    })?;
    Ok(MonteCarloEstimate::from_counts(
        errors, cfg.trials, cfg.seed,
    ))
}
