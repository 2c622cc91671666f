//! Scenario files: the JSON description of a network, its priors, the jammer
//! budget and optional verifier settings.
//!
//! ```json
//! {
//!   "network": {"alpha": [1, 1], "phi": [1, 1], "beta": [[1], [1]], "psi": [1],
//!               "sigma_s": 1, "sigma_fc": 1},
//!   "priors": {"pi0": 0.5},
//!   "jammer": {"power": 5},
//!   "game": {"threshold_bound": 20}
//! }
//! ```
//!
//! Unknown keys are rejected, and every model invariant is checked on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    aggregate, ChannelAggregate, GameConfig, JammerBudget, NetworkParams, Priors, Tolerances,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsSpec {
    pub pi0: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jammer_samples: Option<usize>,
}

/// Scenario exactly as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub network: NetworkParams,
    pub priors: PriorsSpec,
    pub jammer: JammerBudget,
    #[serde(default)]
    pub game: GameSpec,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the file and derives the channel aggregate and game config.
    pub fn resolve(&self) -> Result<Scenario> {
        let priors = Priors::from_pi0(self.priors.pi0)?;
        let budget = JammerBudget::new(self.jammer.power)?;
        let agg = aggregate(&self.network, &priors)?;
        let mut game = GameConfig::for_game(&agg, &budget);
        if let Some(bound) = self.game.threshold_bound {
            game = game.with_threshold_bound(bound, &agg, &budget)?;
        }
        if let Some(tol) = self.game.tolerances {
            for (name, v) in [
                ("game.tolerances.identity", tol.identity),
                ("game.tolerances.saddle", tol.saddle),
                ("game.tolerances.unimodal", tol.unimodal),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name,
                        reason: format!("tolerance must be finite and non-negative, got {v}"),
                    });
                }
            }
            game.tolerances = tol;
        }
        if let Some(points) = self.game.threshold_points {
            game.threshold_points = points;
        }
        if let Some(samples) = self.game.jammer_samples {
            game.jammer_samples = samples;
        }
        Ok(Scenario {
            network: self.network.clone(),
            priors,
            budget,
            agg,
            game,
        })
    }
}

/// A validated scenario with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: NetworkParams,
    pub priors: Priors,
    pub budget: JammerBudget,
    pub agg: ChannelAggregate,
    pub game: GameConfig,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ScenarioFile::load(path)?.resolve()
    }
}
