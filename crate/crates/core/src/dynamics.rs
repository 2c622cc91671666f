//! Alternating best-response play with perfectly observable strategies.

use serde::{Deserialize, Serialize};

use crate::analysis::{error_probability_at_offset, GridSpec, PureStrategyProfile};
use crate::equilibrium::{fc_best_response, jammer_stationary_response};
use crate::error::{Error, Result};
use crate::model::{norm_sq, ChannelAggregate, JammerBudget, Priors, POWER_SLACK};

/// Change below which a half-step counts as leaving the profile unchanged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayOrder {
    NetworkFirst,
    JammerFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Initial,
    Network,
    Jammer,
}

/// How the jammer picks its move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JammerRule {
    /// Stays put when already stationary, else moves to the minimum-norm solution
    /// of `b'w = lambda - c` (saturated at full power along `b`).
    Stationary,
    /// Maximizes the error probability over a grid of `b'w` values reachable
    /// within the budget, moving along `b`.
    Empirical { grid_points: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfStep {
    pub half_step: usize,
    pub player: Player,
    pub profile: PureStrategyProfile,
    pub error_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub order: PlayOrder,
    pub jammer_rule: JammerRule,
    /// Starts with the initial profile, then one entry per half-step.
    pub steps: Vec<HalfStep>,
    pub converged: bool,
    /// Half-step after which neither player moves again.
    pub converged_at_half_step: Option<usize>,
}

impl DynamicsTrace {
    pub fn final_profile(&self) -> &PureStrategyProfile {
        &self
            .steps
            .last()
            .expect("trace holds the initial profile")
            .profile
    }

    /// Number of half-steps actually played.
    pub fn half_steps(&self) -> usize {
        self.steps.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowPosition {
    InsideWindow,
    OutsideWindow,
}

/// Whether the initial threshold lies in `[c - sqrt(P b'b), c + sqrt(P b'b)]`.
pub fn classify_initial(
    initial: &PureStrategyProfile,
    agg: &ChannelAggregate,
    budget: &JammerBudget,
) -> WindowPosition {
    if (initial.threshold - agg.c).abs() <= budget.reach(agg) {
        WindowPosition::InsideWindow
    } else {
        WindowPosition::OutsideWindow
    }
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

struct Players<'a> {
    agg: &'a ChannelAggregate,
    priors: &'a Priors,
    budget: &'a JammerBudget,
    rule: JammerRule,
}

impl Players<'_> {
    fn network_move(&self, p: &PureStrategyProfile) -> Result<PureStrategyProfile> {
        Ok(PureStrategyProfile::new(
            fc_best_response(&p.w, self.agg)?,
            p.w.clone(),
        ))
    }

    fn jammer_move(&self, p: &PureStrategyProfile) -> Result<PureStrategyProfile> {
        let w = match self.rule {
            JammerRule::Stationary => {
                let gap = self.agg.project(&p.w)? - (p.threshold - self.agg.c);
                if gap.abs() <= CONVERGENCE_TOLERANCE
                    && norm_sq(&p.w) <= self.budget.power + POWER_SLACK
                {
                    // Any point on the stationary hyperplane is a best response.
                    p.w.clone()
                } else {
                    jammer_stationary_response(p.threshold, self.agg, self.budget)?.w
                }
            }
            JammerRule::Empirical { grid_points } => {
                self.empirical_jammer(p.threshold, grid_points)?
            }
        };
        Ok(PureStrategyProfile::new(p.threshold, w))
    }

    fn empirical_jammer(&self, threshold: f64, grid_points: usize) -> Result<Vec<f64>> {
        let btb = self.agg.nonzero_channel()?;
        let reach = self.budget.reach(self.agg);
        let ys = if reach > 0.0 {
            GridSpec::symmetric(reach, grid_points.max(2))?.points()
        } else {
            vec![0.0]
        };
        let (best_y, _) = ys.iter().fold((0.0, f64::NEG_INFINITY), |(by, bv), &y| {
            let v = error_probability_at_offset(threshold - y, self.agg, self.priors);
            if v > bv {
                (y, v)
            } else {
                (by, bv)
            }
        });
        Ok(self.agg.b.iter().map(|b| best_y * b / btb).collect())
    }

    fn is_fixed_point(&self, p: &PureStrategyProfile) -> Result<bool> {
        let n = self.network_move(p)?;
        if (n.threshold - p.threshold).abs() > CONVERGENCE_TOLERANCE {
            return Ok(false);
        }
        let j = self.jammer_move(p)?;
        Ok(max_abs_diff(&j.w, &p.w) <= CONVERGENCE_TOLERANCE)
    }

    fn pe(&self, p: &PureStrategyProfile) -> Result<f64> {
        Ok(error_probability_at_offset(
            p.offset(self.agg)?,
            self.agg,
            self.priors,
        ))
    }
}

/// Runs best-response dynamics from `initial` with the stationary jammer.
pub fn run_dynamics(
    initial: &PureStrategyProfile,
    order: PlayOrder,
    agg: &ChannelAggregate,
    priors: &Priors,
    budget: &JammerBudget,
    max_half_steps: usize,
) -> Result<DynamicsTrace> {
    run_dynamics_with_rule(
        initial,
        order,
        JammerRule::Stationary,
        agg,
        priors,
        budget,
        max_half_steps,
    )
}

/// Runs alternating best responses until neither player would move.
///
/// Play stops at the first profile from which both the network's and the jammer's
/// next responses leave it unchanged within [`CONVERGENCE_TOLERANCE`], or after
/// `max_half_steps` moves.
pub fn run_dynamics_with_rule(
    initial: &PureStrategyProfile,
    order: PlayOrder,
    rule: JammerRule,
    agg: &ChannelAggregate,
    priors: &Priors,
    budget: &JammerBudget,
    max_half_steps: usize,
) -> Result<DynamicsTrace> {
    let power = norm_sq(&initial.w);
    agg.project(&initial.w)?;
    if power > budget.power + POWER_SLACK {
        return Err(Error::InfeasibleInitial {
            power,
            budget: budget.power,
        });
    }

    let players = Players {
        agg,
        priors,
        budget,
        rule,
    };
    let mut steps = vec![HalfStep {
        half_step: 0,
        player: Player::Initial,
        profile: initial.clone(),
        error_probability: players.pe(initial)?,
    }];
    let mut converged_at = None;

    loop {
        let k = steps.len() - 1;
        let current = &steps[k].profile;
        if players.is_fixed_point(current)? {
            converged_at = Some(k);
            break;
        }
        if k == max_half_steps {
            break;
        }
        let network_turn = (k % 2 == 0) == (order == PlayOrder::NetworkFirst);
        let (player, next) = if network_turn {
            (Player::Network, players.network_move(current)?)
        } else {
            (Player::Jammer, players.jammer_move(current)?)
        };
        steps.push(HalfStep {
            half_step: k + 1,
            player,
            error_probability: players.pe(&next)?,
            profile: next,
        });
    }

    Ok(DynamicsTrace {
        order,
        jammer_rule: rule,
        steps,
        converged: converged_at.is_some(),
        converged_at_half_step: converged_at,
    })
}
