//! Closed-form error probability at the fusion center and its derivatives.

use libm::erfc;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelAggregate, Priors};

/// A threshold for the fusion center paired with a jammer vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureStrategyProfile {
    pub threshold: f64,
    pub w: Vec<f64>,
}

impl PureStrategyProfile {
    pub fn new(threshold: f64, w: Vec<f64>) -> Self {
        Self { threshold, w }
    }

    /// `lambda - b'w`, the only combination the error probability depends on.
    pub fn offset(&self, agg: &ChannelAggregate) -> Result<f64> {
        Ok(self.threshold - agg.project(&self.w)?)
    }
}

/// Standard normal upper tail `Q(x) = P(Z > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Error probability as a function of the offset `u = lambda - b'w`.
pub fn error_probability_at_offset(u: f64, agg: &ChannelAggregate, priors: &Priors) -> f64 {
    let sigma = agg.sigma();
    // 1 - Q(x) = Q(-x) keeps precision in the upper tail.
    priors.pi0() * gaussian_q(u / sigma) + priors.pi1() * gaussian_q((agg.a - u) / sigma)
}

/// `pi0 Q((lambda - b'w)/sigma) + pi1 [1 - Q((lambda - b'w - a)/sigma)]`.
pub fn error_probability(
    profile: &PureStrategyProfile,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<f64> {
    Ok(error_probability_at_offset(
        profile.offset(agg)?,
        agg,
        priors,
    ))
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// `phi(u/sigma)/sigma * [pi1 exp((2au - a^2)/(2 sigma2)) - pi0]` with `shift = a(u - c)/sigma2`.
///
/// The bracket equals `pi0 * expm1(shift)`, so its sign is exactly the sign of `shift`.
/// For positive shifts the Gaussian kernel and the exponential are combined in log
/// space, which keeps the value finite without clamping.
fn kernel_times_bracket(u: f64, shift: f64, agg: &ChannelAggregate, priors: &Priors) -> f64 {
    let sigma = agg.sigma();
    let log_kernel = -u * u / (2.0 * agg.sigma2) - sigma.ln() - LN_SQRT_2PI;
    if shift <= 0.0 {
        priors.pi0() * log_kernel.exp() * shift.exp_m1()
    } else {
        priors.pi0() * (log_kernel + shift).exp() * -(-shift).exp_m1()
    }
}

/// Analytic derivative of the error probability with respect to the threshold.
pub fn threshold_derivative(
    profile: &PureStrategyProfile,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<f64> {
    let u = profile.offset(agg)?;
    let shift = agg.a * (u - agg.c) / agg.sigma2;
    Ok(kernel_times_bracket(u, shift, agg, priors))
}

/// Unique root `y0 = lambda - c` of [`score_g`].
pub fn zero_crossing(threshold: f64, agg: &ChannelAggregate) -> f64 {
    threshold - agg.c
}

/// The function `g(y)` with `dP_E/dy = -g(y)` along `y = b'w` for fixed `lambda`.
///
/// Non-negative for `y <= y0` and negative beyond it.
pub fn score_g(y: f64, threshold: f64, agg: &ChannelAggregate, priors: &Priors) -> f64 {
    let y0 = zero_crossing(threshold, agg);
    let shift = agg.a * (y0 - y) / agg.sigma2;
    kernel_times_bracket(threshold - y, shift, agg, priors)
}

/// Uniform sampling grid over a closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || points < 2 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!(
                    "need finite lo < hi and at least 2 points, got [{lo}, {hi}] x {points}"
                ),
            });
        }
        Ok(Self { lo, hi, points })
    }

    /// Symmetric grid over `[-bound, bound]`.
    pub fn symmetric(bound: f64, points: usize) -> Result<Self> {
        Self::new(-bound, bound, points)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.point(i)).collect()
    }
}

/// Result of sampling a one-dimensional function and testing for a single valley.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub unimodal: bool,
    pub argmin: f64,
    pub step: f64,
    pub max_violation: f64,
}

impl StructureReport {
    /// Tests `values` for a decrease to the first minimum followed by an increase.
    ///
    /// `max_violation` is the largest rise before the minimum or drop after it.
    pub fn from_samples(grid: Vec<f64>, values: Vec<f64>, step: f64, tolerance: f64) -> Self {
        let (imin, _) = values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            );
        let mut max_violation = 0.0_f64;
        for (i, pair) in values.windows(2).enumerate() {
            let rise = pair[1] - pair[0];
            let violation = if i < imin { rise } else { -rise };
            max_violation = max_violation.max(violation);
        }
        Self {
            argmin: grid[imin],
            unimodal: max_violation <= tolerance,
            grid,
            values,
            step,
            max_violation,
        }
    }
}

/// Samples `P_E(lambda, w)` over `grid` and checks that it has a single valley.
pub fn check_unimodal_in_threshold(
    w: &[f64],
    agg: &ChannelAggregate,
    priors: &Priors,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<StructureReport> {
    let shift = agg.project(w)?;
    let lambdas = grid.points();
    let values: Vec<f64> = lambdas
        .par_iter()
        .map(|&lambda| error_probability_at_offset(lambda - shift, agg, priors))
        .collect();
    Ok(StructureReport::from_samples(
        lambdas,
        values,
        grid.step(),
        tolerance,
    ))
}
