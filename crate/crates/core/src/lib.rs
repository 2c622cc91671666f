//! Zero-sum jamming game between a fusion-center detection network with a
//! multiple access front end and a multi-antenna, power-constrained jammer.
//!
//! The fusion center picks a threshold `lambda`; the jammer picks a vector `w`
//! with `||w||^2 <= P`. The crate provides the closed-form error probability,
//! both players' best responses, the pure-strategy equilibrium family,
//! alternating best-response dynamics, the Gaussian mixed-strategy jammer,
//! and a Monte Carlo simulator of the full sensing pipeline to cross-check them.

pub mod analysis;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod mixed;
pub mod model;
pub mod montecarlo;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use analysis::{
    check_unimodal_in_threshold, error_probability, gaussian_q, score_g, threshold_derivative,
    zero_crossing, GridSpec, PureStrategyProfile, StructureReport,
};
pub use dynamics::{
    classify_initial, run_dynamics, DynamicsTrace, JammerRule, PlayOrder, WindowPosition,
};
pub use equilibrium::{
    best_response_value, equilibrium_family, fc_best_response, feasibility_window, is_in_family,
    jammer_stationary_response, verify_saddle, EquilibriumParameter, SaddleAudit, SaddleReport,
};
pub use error::{Error, Result};
pub use mixed::{
    compare_mixed_vs_pure, gamma_functional, mixed_best_threshold, mixed_utility,
    utility_maximizing_covariance, GaussianJammerCovariance, MixedComparison,
};
pub use model::{
    aggregate, validate_strategy, ChannelAggregate, GameConfig, JammerBudget, NetworkParams,
    Priors, Tolerances,
};
pub use montecarlo::{simulate_error, simulate_mixed_error, McConfig, MonteCarloEstimate};
pub use scenario::{Scenario, ScenarioFile};

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::model::{aggregate, ChannelAggregate, NetworkParams, Priors};

    /// Two sensors, one sensing antenna and one FC antenna, all gains 1.
    pub fn s1() -> NetworkParams {
        NetworkParams {
            alpha: vec![1.0, 1.0],
            phi: vec![1.0, 1.0],
            beta: vec![vec![1.0], vec![1.0]],
            psi: vec![1.0],
            sigma_s: 1.0,
            sigma_fc: 1.0,
        }
    }

    pub fn s1_aggregate() -> (ChannelAggregate, Priors) {
        let priors = Priors::equal();
        (aggregate(&s1(), &priors).unwrap(), priors)
    }
}
