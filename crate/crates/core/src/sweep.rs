//! One-dimensional parameter sweeps over a scenario.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{best_response_value, feasibility_window};
use crate::error::{Error, Result};
use crate::mixed::{compare_mixed_vs_pure, utility_maximizing_covariance};
use crate::report::{fmt_g17, CsvTable};
use crate::scenario::{Scenario, ScenarioFile};

/// Scalar scenario field addressed by a dotted path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "jammer.power")]
    JammerPower,
    #[serde(rename = "priors.pi0")]
    Pi0,
    #[serde(rename = "network.sigma_s")]
    SigmaS,
    #[serde(rename = "network.sigma_fc")]
    SigmaFc,
    #[serde(rename = "game.threshold_bound")]
    ThresholdBound,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 5] = [
        Self::JammerPower,
        Self::Pi0,
        Self::SigmaS,
        Self::SigmaFc,
        Self::ThresholdBound,
    ];

    pub fn path(&self) -> &'static str {
        match self {
            Self::JammerPower => "jammer.power",
            Self::Pi0 => "priors.pi0",
            Self::SigmaS => "network.sigma_s",
            Self::SigmaFc => "network.sigma_fc",
            Self::ThresholdBound => "game.threshold_bound",
        }
    }

    pub fn parse(path: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.path() == path)
            .ok_or_else(|| Error::InvalidParameter {
                name: "sweep parameter",
                reason: format!(
                    "{path:?} is not a scalar scenario field; expected one of {}",
                    Self::ALL.map(|p| p.path()).join(", ")
                ),
            })
    }

    fn apply(&self, file: &mut ScenarioFile, value: f64) {
        match self {
            Self::JammerPower => file.jammer.power = value,
            Self::Pi0 => file.priors.pi0 = value,
            Self::SigmaS => file.network.sigma_s = value,
            Self::SigmaFc => file.network.sigma_fc = value,
            Self::ThresholdBound => file.game.threshold_bound = Some(value),
        }
    }
}

/// Column computed at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    /// Pure-strategy equilibrium error.
    EquilibriumError,
    /// `U(W*)` for the covariance putting all power along `b`.
    MixedUtilityMax,
    /// `U(W*)` minus the equilibrium error.
    MixedAdvantageMax,
    WindowLow,
    WindowHigh,
    BayesOffset,
    NoiseVariance,
    ThresholdBound,
}

impl SweepOutput {
    pub const ALL: [SweepOutput; 8] = [
        Self::EquilibriumError,
        Self::MixedUtilityMax,
        Self::MixedAdvantageMax,
        Self::WindowLow,
        Self::WindowHigh,
        Self::BayesOffset,
        Self::NoiseVariance,
        Self::ThresholdBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::EquilibriumError => "equilibrium_error",
            Self::MixedUtilityMax => "mixed_utility_max",
            Self::MixedAdvantageMax => "mixed_advantage_max",
            Self::WindowLow => "window_low",
            Self::WindowHigh => "window_high",
            Self::BayesOffset => "bayes_offset",
            Self::NoiseVariance => "noise_variance",
            Self::ThresholdBound => "threshold_bound",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::InvalidParameter {
                name: "sweep output",
                reason: format!(
                    "unknown report kind {name:?}; expected one of {}",
                    Self::ALL.map(|o| o.name()).join(", ")
                ),
            })
    }

    fn evaluate(&self, s: &Scenario) -> Result<f64> {
        Ok(match self {
            Self::EquilibriumError => best_response_value(&s.agg, &s.priors),
            Self::MixedUtilityMax | Self::MixedAdvantageMax => {
                let cov = utility_maximizing_covariance(&s.agg, &s.budget)?;
                let cmp = compare_mixed_vs_pure(&cov, &s.agg, &s.priors)?;
                if *self == Self::MixedUtilityMax {
                    cmp.utility
                } else {
                    cmp.advantage
                }
            }
            Self::WindowLow => feasibility_window(&s.agg, &s.budget)?.0,
            Self::WindowHigh => feasibility_window(&s.agg, &s.budget)?.1,
            Self::BayesOffset => s.agg.c,
            Self::NoiseVariance => s.agg.sigma2,
            Self::ThresholdBound => s.game.threshold_bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub outputs: Vec<SweepOutput>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sweep values",
                reason: "at least one value is required".into(),
            });
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sweep values",
                reason: format!("values must be finite, got {v}"),
            });
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sweep outputs",
                reason: "at least one report kind is required".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub columns: Vec<SweepOutput>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, output: SweepOutput) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| *c == output)?;
        Some(self.rows.iter().map(|r| r.outputs[j]).collect())
    }
}

impl CsvTable for SweepTable {
    fn header(&self) -> Vec<String> {
        std::iter::once(self.parameter.path().to_string())
            .chain(self.columns.iter().map(|c| c.name().to_string()))
            .collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                std::iter::once(r.value)
                    .chain(r.outputs.iter().copied())
                    .map(fmt_g17)
                    .collect()
            })
            .collect()
    }
}

/// Re-validates the scenario at every point; the first failing value aborts the sweep.
pub fn run_sweep(base: &ScenarioFile, spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let wrap = |source: Error| Error::Sweep {
            parameter: spec.parameter.path().to_string(),
            value,
            source: Box::new(source),
        };
        let mut file = base.clone();
        spec.parameter.apply(&mut file, value);
        let scenario = file.resolve().map_err(wrap)?;
        let outputs = spec
            .outputs
            .iter()
            .map(|o| o.evaluate(&scenario))
            .collect::<Result<Vec<_>>>()
            .map_err(wrap)?;
        rows.push(SweepRow { value, outputs });
    }
    Ok(SweepTable {
        parameter: spec.parameter,
        columns: spec.outputs.clone(),
        rows,
    })
}
