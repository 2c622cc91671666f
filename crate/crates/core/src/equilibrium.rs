//! Best responses, the pure-strategy equilibrium family and a saddle-point auditor.
//!
//! For a fixed jammer vector the fusion center's unique best threshold is
//! `lambda = b'w + c`, and at that threshold the error probability no longer depends
//! on `w`. The jammer's stationarity condition `b'w = lambda - c` has a power-feasible
//! solution only when `lambda` lies in `[c - sqrt(P b'b), c + sqrt(P b'b)]`.
//! Every profile
//!
//! ```text
//! w* = sqrt(P / b'b) * eps,   lambda* = c + sqrt(P / b'b) * b'eps,   -b <= eps <= b
//! ```
//!
//! satisfies both conditions. [`verify_saddle`] checks the two saddle inequalities
//! numerically and reports the largest violation on each side with its witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{error_probability_at_offset, gaussian_q, GridSpec, PureStrategyProfile};
use crate::error::{check_len, Error, Result};
use crate::model::{dot, norm_sq, ChannelAggregate, JammerBudget, Priors};

/// Unique threshold minimizing the error probability against `w`.
pub fn fc_best_response(w: &[f64], agg: &ChannelAggregate) -> Result<f64> {
    Ok(agg.project(w)? + agg.c)
}

/// Error probability when the fusion center best-responds; the same for every `w`.
///
/// `pi0 Q(c/sigma) + pi1 [1 - Q((c - a)/sigma)]`, which is also the equilibrium error.
pub fn best_response_value(agg: &ChannelAggregate, priors: &Priors) -> f64 {
    let sigma = agg.sigma();
    priors.pi0() * gaussian_q(agg.c / sigma) + priors.pi1() * gaussian_q((agg.a - agg.c) / sigma)
}

/// Jammer move produced by [`jammer_stationary_response`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JammerResponse {
    pub w: Vec<f64>,
    /// Whether `b'w = lambda - c` was reachable within the power budget.
    pub feasible: bool,
}

/// Minimum-norm solution of `b'w = lambda - c`, saturated at full power along `b`.
///
/// The full solution set is the hyperplane `b'w = lambda - c` intersected with the
/// power ball; the minimum-norm point `(lambda - c) b / b'b` is returned. When the
/// hyperplane misses the ball the result is `sign(lambda - c) sqrt(P / b'b) b`
/// with `feasible = false`.
pub fn jammer_stationary_response(
    threshold: f64,
    agg: &ChannelAggregate,
    budget: &JammerBudget,
) -> Result<JammerResponse> {
    let btb = agg.nonzero_channel()?;
    let target = threshold - agg.c;
    if target.abs() <= budget.reach(agg) {
        let scale = target / btb;
        Ok(JammerResponse {
            w: agg.b.iter().map(|b| scale * b).collect(),
            feasible: true,
        })
    } else {
        let scale = target.signum() * (budget.power / btb).sqrt();
        Ok(JammerResponse {
            w: agg.b.iter().map(|b| scale * b).collect(),
            feasible: false,
        })
    }
}

/// Threshold interval `(c - sqrt(P b'b), c + sqrt(P b'b))`.
pub fn feasibility_window(agg: &ChannelAggregate, budget: &JammerBudget) -> Result<(f64, f64)> {
    agg.nonzero_channel()?;
    let reach = budget.reach(agg);
    Ok((agg.c - reach, agg.c + reach))
}

/// Vector parameter `eps` of the equilibrium family, bounded by `-b <= eps <= b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumParameter {
    epsilon: Vec<f64>,
}

impl EquilibriumParameter {
    pub fn new(epsilon: Vec<f64>, agg: &ChannelAggregate) -> Result<Self> {
        check_len("epsilon", agg.dim(), epsilon.len())?;
        for (index, (&value, &bound)) in epsilon.iter().zip(&agg.b).enumerate() {
            if value.is_nan() || value.abs() > bound {
                return Err(Error::ParameterOutOfRange {
                    index,
                    value: value.abs(),
                    bound,
                });
            }
        }
        Ok(Self { epsilon })
    }

    /// Center of the family, `eps = 0`.
    pub fn center(agg: &ChannelAggregate) -> Self {
        Self {
            epsilon: vec![0.0; agg.dim()],
        }
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }
}

/// Profile of the equilibrium family selected by `param`.
pub fn equilibrium_family(
    param: &EquilibriumParameter,
    agg: &ChannelAggregate,
    budget: &JammerBudget,
) -> Result<PureStrategyProfile> {
    check_len("epsilon", agg.dim(), param.epsilon.len())?;
    let btb = agg.nonzero_channel()?;
    let scale = (budget.power / btb).sqrt();
    let w: Vec<f64> = param.epsilon.iter().map(|e| scale * e).collect();
    // c + scale * b'eps, computed through w so the profile is an exact fixed point.
    let threshold = dot(&agg.b, &w) + agg.c;
    Ok(PureStrategyProfile { threshold, w })
}

/// True iff `lambda = b'w + c` within `tol` and `||w||^2 <= P + tol`.
pub fn is_in_family(
    profile: &PureStrategyProfile,
    agg: &ChannelAggregate,
    budget: &JammerBudget,
    tol: f64,
) -> Result<bool> {
    let stationary = (profile.threshold - agg.project(&profile.w)? - agg.c).abs() <= tol;
    Ok(stationary && norm_sq(&profile.w) <= budget.power + tol)
}

pub const MIN_AUDIT_THRESHOLD_POINTS: usize = 2000;
pub const MIN_AUDIT_JAMMER_SAMPLES: usize = 10_000;

/// Settings for [`verify_saddle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleAudit {
    /// Threshold deviations are drawn from `[-R, R]`.
    pub threshold_bound: f64,
    pub threshold_points: usize,
    /// Uniform draws from the power ball.
    pub samples: usize,
    pub seed: u64,
    /// Extra jammer vectors evaluated and reported individually.
    pub probes: Vec<Vec<f64>>,
    pub tolerance: f64,
    /// Tolerance of the family membership precondition.
    pub family_tolerance: f64,
}

impl SaddleAudit {
    pub fn new(
        threshold_bound: f64,
        threshold_points: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if threshold_points < MIN_AUDIT_THRESHOLD_POINTS {
            return Err(Error::InvalidAudit(format!(
                "threshold grid needs at least {MIN_AUDIT_THRESHOLD_POINTS} points, got {threshold_points}"
            )));
        }
        if samples < MIN_AUDIT_JAMMER_SAMPLES {
            return Err(Error::InvalidAudit(format!(
                "jammer side needs at least {MIN_AUDIT_JAMMER_SAMPLES} samples, got {samples}"
            )));
        }
        if !(threshold_bound.is_finite() && threshold_bound > 0.0) {
            return Err(Error::InvalidAudit(format!(
                "threshold bound must be positive, got {threshold_bound}"
            )));
        }
        Ok(Self {
            threshold_bound,
            threshold_points,
            samples,
            seed,
            probes: Vec::new(),
            tolerance: 1e-12,
            family_tolerance: 1e-9,
        })
    }

    pub fn with_probe(mut self, w: Vec<f64>) -> Self {
        self.probes.push(w);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Error probability and jammer-side violation at a user supplied probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub w: Vec<f64>,
    pub error_probability: f64,
    pub violation: f64,
}

/// Outcome of auditing `P_E(lambda*, w) <= P_E(lambda*, w*) <= P_E(lambda, w*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    pub profile: PureStrategyProfile,
    pub equilibrium_error: f64,
    /// `max_lambda P_E(lambda*, w*) - P_E(lambda, w*)` over the grid and `lambda*`.
    pub fc_side_max_violation: f64,
    pub fc_witness_threshold: f64,
    /// `max_w P_E(lambda*, w) - P_E(lambda*, w*)` over all evaluated jammer vectors.
    pub jammer_side_max_violation: f64,
    pub jammer_witness: Vec<f64>,
    pub threshold_points: usize,
    /// Number of jammer vectors evaluated, including boundary points and probes.
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub holds_fc_side: bool,
    pub holds_jammer_side: bool,
    pub probes: Vec<ProbeResult>,
}

fn first_max(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
}

/// Uniform draws from the ball `||w||^2 <= power` in `dim` dimensions.
fn sample_ball(dim: usize, power: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = power.sqrt();
    let unit = Uniform::new(0.0_f64, 1.0).expect("valid range");
    (0..count)
        .map(|_| {
            if dim == 0 {
                return Vec::new();
            }
            let mut z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = norm_sq(&z).sqrt();
            let r = radius * unit.sample(&mut rng).powf(1.0 / dim as f64);
            let scale = if norm > 0.0 { r / norm } else { 0.0 };
            z.iter_mut().for_each(|x| *x *= scale);
            z
        })
        .collect()
}

/// Audits both saddle inequalities for a member of the equilibrium family.
///
/// Jammer deviations are `w*` itself, the `2(L+M)` axis points at full power,
/// full power along `+-b`, the audit's probes and `samples` uniform draws from the
/// power ball. The result is independent of the rayon thread count.
pub fn verify_saddle(
    profile: &PureStrategyProfile,
    agg: &ChannelAggregate,
    priors: &Priors,
    budget: &JammerBudget,
    audit: &SaddleAudit,
) -> Result<SaddleReport> {
    if !is_in_family(profile, agg, budget, audit.family_tolerance)? {
        return Err(Error::NotInFamily {
            threshold: profile.threshold,
        });
    }
    let dim = agg.dim();
    for probe in &audit.probes {
        check_len("probe", dim, probe.len())?;
    }
    let y_star = agg.project(&profile.w)?;
    let lambda_star = profile.threshold;
    let pe_star = error_probability_at_offset(lambda_star - y_star, agg, priors);

    let grid = GridSpec::symmetric(audit.threshold_bound, audit.threshold_points)?;
    let mut lambdas = vec![lambda_star];
    lambdas.extend(grid.points());
    let fc_violations: Vec<f64> = lambdas
        .par_iter()
        .map(|&lambda| pe_star - error_probability_at_offset(lambda - y_star, agg, priors))
        .collect();
    let (fc_idx, fc_max) = first_max(&fc_violations);

    let radius = budget.power.sqrt();
    let mut candidates = vec![profile.w.clone()];
    for j in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[j] = sign * radius;
            candidates.push(e);
        }
    }
    let btb = agg.b_norm_sq();
    if btb > 0.0 {
        let scale = (budget.power / btb).sqrt();
        for sign in [1.0, -1.0] {
            candidates.push(agg.b.iter().map(|b| sign * scale * b).collect());
        }
    }
    let probe_start = candidates.len();
    candidates.extend(audit.probes.iter().cloned());
    candidates.extend(sample_ball(dim, budget.power, audit.samples, audit.seed));

    let jam_violations: Vec<f64> = candidates
        .par_iter()
        .map(|w| error_probability_at_offset(lambda_star - dot(&agg.b, w), agg, priors) - pe_star)
        .collect();
    let (jam_idx, jam_max) = first_max(&jam_violations);

    let probes = audit
        .probes
        .iter()
        .enumerate()
        .map(|(k, w)| ProbeResult {
            w: w.clone(),
            error_probability: jam_violations[probe_start + k] + pe_star,
            violation: jam_violations[probe_start + k],
        })
        .collect();

    Ok(SaddleReport {
        profile: profile.clone(),
        equilibrium_error: pe_star,
        fc_side_max_violation: fc_max,
        fc_witness_threshold: lambdas[fc_idx],
        jammer_side_max_violation: jam_max,
        jammer_witness: candidates[jam_idx].clone(),
        threshold_points: audit.threshold_points,
        samples: candidates.len(),
        seed: audit.seed,
        tolerance: audit.tolerance,
        holds_fc_side: fc_max <= audit.tolerance,
        holds_jammer_side: jam_max <= audit.tolerance,
        probes,
    })
}
