//! Scenario parameters and the collapsed signal model at the fusion center.
//!
//! Each sensor observes `s_i = alpha_i * theta + sum_l beta_il * w_s[l] + n_i` and
//! forwards it over a multiple access channel with gain `phi_i`. The jammer also
//! injects `w_fc` directly at the fusion center through gains `psi_m`. The received
//! statistic collapses to
//!
//! ```text
//! r_fc = a * theta + b'w + z,    z ~ N(0, sigma2)
//! ```
//!
//! where [`ChannelAggregate`] holds `a`, `b`, `sigma2` and the Bayes offset `c`.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};

/// Absolute slack used when checking the jammer power constraint.
pub const POWER_SLACK: f64 = 1e-12;

/// Raw description of the sensing and communication channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    /// Sensing gains from the phenomenon to each sensor.
    pub alpha: Vec<f64>,
    /// Forwarding gains from each sensor to the fusion center.
    pub phi: Vec<f64>,
    /// Jammer-to-sensor gains, one row per sensor and one column per sensing antenna.
    #[serde(default)]
    pub beta: Vec<Vec<f64>>,
    /// Jammer-to-fusion-center gains, one per antenna.
    #[serde(default)]
    pub psi: Vec<f64>,
    pub sigma_s: f64,
    pub sigma_fc: f64,
}

impl NetworkParams {
    pub fn sensors(&self) -> usize {
        self.alpha.len()
    }

    /// Number of jammer antennas aimed at the sensing channels.
    ///
    /// An empty `beta` is read as `N` rows of width zero.
    pub fn sensing_antennas(&self) -> usize {
        self.beta.first().map_or(0, Vec::len)
    }

    pub fn fc_antennas(&self) -> usize {
        self.psi.len()
    }

    /// Length `L + M` of the stacked jammer vector.
    pub fn jammer_dim(&self) -> usize {
        self.sensing_antennas() + self.fc_antennas()
    }

    /// Checks shapes and noise levels. Sign of `b` is checked by [`aggregate`].
    pub fn validate(&self) -> Result<()> {
        let n = self.alpha.len();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "at least one sensor is required".into(),
            });
        }
        check_len("phi", n, self.phi.len())?;
        if !self.beta.is_empty() {
            check_len("beta rows", n, self.beta.len())?;
            let l = self.beta[0].len();
            for row in &self.beta {
                check_len("beta columns", l, row.len())?;
            }
        }
        let all_gains = self
            .alpha
            .iter()
            .chain(&self.phi)
            .chain(self.beta.iter().flatten())
            .chain(&self.psi);
        for &g in all_gains {
            check_finite("channel gain", g)?;
        }
        for (name, s) in [("sigma_s", self.sigma_s), ("sigma_fc", self.sigma_fc)] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("noise deviation must be positive and finite, got {s}"),
                });
            }
        }
        Ok(())
    }
}

/// Prior probabilities of the two hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pi0: f64,
    pi1: f64,
}

impl Priors {
    pub fn new(pi0: f64, pi1: f64) -> Result<Self> {
        for (name, p) in [("pi0", pi0), ("pi1", pi1)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("prior must lie strictly inside (0, 1), got {p}"),
                });
            }
        }
        if (pi0 + pi1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "priors",
                reason: format!("pi0 + pi1 must equal 1, got {}", pi0 + pi1),
            });
        }
        Ok(Self { pi0, pi1 })
    }

    /// Builds the pair from `pi0` alone, with `pi1 = 1 - pi0`.
    pub fn from_pi0(pi0: f64) -> Result<Self> {
        Self::new(pi0, 1.0 - pi0)
    }

    pub fn equal() -> Self {
        Self { pi0: 0.5, pi1: 0.5 }
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    /// `log(pi0 / pi1)`, exactly zero for equal priors.
    pub fn log_ratio(&self) -> f64 {
        if self.pi0 == self.pi1 {
            0.0
        } else {
            (self.pi0 / self.pi1).ln()
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            pi0: self.pi1,
            pi1: self.pi0,
        }
    }
}

/// The collapsed model `r_fc = a theta + b'w + z` plus the Bayes offset `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelAggregate {
    pub a: f64,
    pub b: Vec<f64>,
    pub sigma2: f64,
    pub c: f64,
}

impl ChannelAggregate {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `b'b`.
    pub fn b_norm_sq(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum()
    }

    /// `b'w`, after checking that `w` has length `L + M`.
    pub fn project(&self, w: &[f64]) -> Result<f64> {
        check_len("jammer vector", self.b.len(), w.len())?;
        Ok(dot(&self.b, w))
    }

    pub(crate) fn nonzero_channel(&self) -> Result<f64> {
        let btb = self.b_norm_sq();
        if btb > 0.0 {
            Ok(btb)
        } else {
            Err(Error::ZeroJammerChannel)
        }
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Bayes offset `c = (a^2 + 2 sigma2 log(pi0/pi1)) / (2a)`.
pub fn bayes_offset(a: f64, sigma2: f64, priors: &Priors) -> f64 {
    let log_ratio = priors.log_ratio();
    if log_ratio == 0.0 {
        a / 2.0
    } else {
        (a * a + 2.0 * sigma2 * log_ratio) / (2.0 * a)
    }
}

/// Collapses the network description into `(a, b, sigma2, c)`.
pub fn aggregate(network: &NetworkParams, priors: &Priors) -> Result<ChannelAggregate> {
    network.validate()?;
    let a = dot(&network.phi, &network.alpha);
    // Gains are finite after validation, so `a` is not NaN.
    if a <= 0.0 {
        return Err(Error::DegenerateModel { a });
    }

    let l = network.sensing_antennas();
    let mut b = Vec::with_capacity(l + network.fc_antennas());
    for j in 0..l {
        b.push(
            network
                .phi
                .iter()
                .zip(&network.beta)
                .map(|(phi, row)| phi * row[j])
                .sum(),
        );
    }
    b.extend_from_slice(&network.psi);
    if let Some((index, &value)) = b.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeGain { index, value });
    }

    let sigma2 = network.sigma_fc.powi(2) + network.sigma_s.powi(2) * norm_sq(&network.phi);
    let c = bayes_offset(a, sigma2, priors);
    Ok(ChannelAggregate { a, b, sigma2, c })
}

/// Instantaneous power budget of the jammer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerBudget {
    pub power: f64,
}

impl JammerBudget {
    pub fn new(power: f64) -> Result<Self> {
        if !(power.is_finite() && power >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "jammer.power",
                reason: format!("power budget must be finite and non-negative, got {power}"),
            });
        }
        Ok(Self { power })
    }

    /// Radius `sqrt(P b'b)` of the reachable interval of `b'w`.
    pub fn reach(&self, agg: &ChannelAggregate) -> f64 {
        (self.power * agg.b_norm_sq()).sqrt()
    }
}

/// True iff `||w||^2 <= P` up to [`POWER_SLACK`].
pub fn validate_strategy(w: &[f64], agg: &ChannelAggregate, budget: &JammerBudget) -> Result<bool> {
    check_len("jammer vector", agg.dim(), w.len())?;
    Ok(norm_sq(w) <= budget.power + POWER_SLACK)
}

/// Numerical tolerances used by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Closed-form identities such as family membership.
    pub identity: f64,
    /// Allowed saddle-inequality violation before a side is reported as failing.
    pub saddle: f64,
    /// Plateau allowance in the single-valley test.
    pub unimodal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            saddle: 1e-12,
            unimodal: 1e-12,
        }
    }
}

pub const DEFAULT_THRESHOLD_POINTS: usize = 2001;
pub const DEFAULT_JAMMER_SAMPLES: usize = 10_000;

/// Threshold interval `[-R, R]` plus verifier grid sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub threshold_bound: f64,
    pub threshold_points: usize,
    pub jammer_samples: usize,
    pub tolerances: Tolerances,
}

/// Smallest admissible `R`: `|c| + sqrt(P b'b) + 6 sigma`.
pub fn min_threshold_bound(agg: &ChannelAggregate, budget: &JammerBudget) -> f64 {
    agg.c.abs() + budget.reach(agg) + 6.0 * agg.sigma()
}

impl GameConfig {
    /// Config with `R` at its minimum admissible value.
    pub fn for_game(agg: &ChannelAggregate, budget: &JammerBudget) -> Self {
        Self {
            threshold_bound: min_threshold_bound(agg, budget),
            threshold_points: DEFAULT_THRESHOLD_POINTS,
            jammer_samples: DEFAULT_JAMMER_SAMPLES,
            tolerances: Tolerances::default(),
        }
    }

    /// Replaces `R`, rejecting bounds that would cut off analysed thresholds.
    pub fn with_threshold_bound(
        mut self,
        bound: f64,
        agg: &ChannelAggregate,
        budget: &JammerBudget,
    ) -> Result<Self> {
        let required = min_threshold_bound(agg, budget);
        if !(bound.is_finite() && bound >= required) {
            return Err(Error::ThresholdBoundTooSmall {
                given: bound,
                required,
            });
        }
        self.threshold_bound = bound;
        Ok(self)
    }
}
