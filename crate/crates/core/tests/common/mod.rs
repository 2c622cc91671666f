#![allow(dead_code)]

use macjam::{aggregate, ChannelAggregate, JammerBudget, NetworkParams, Priors};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

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

/// Closed-form S1 value `Q(1/sqrt 3)`, from an extended-precision evaluation.
pub const S1_EQUILIBRIUM_ERROR: f64 = 0.281_851_430_825_386_5;

pub struct Game {
    pub network: NetworkParams,
    pub priors: Priors,
    pub agg: ChannelAggregate,
    pub budget: JammerBudget,
}

impl Game {
    pub fn s1() -> Self {
        let priors = Priors::equal();
        Self {
            agg: aggregate(&s1(), &priors).unwrap(),
            network: s1(),
            priors,
            budget: JammerBudget::new(5.0).unwrap(),
        }
    }

    /// Random scenario with positive gains and at least one jammer antenna.
    ///
    /// Sensing gains are rescaled so that `a / sigma` lies in `[0.5, 8]`. Below that
    /// the dip of the error probability under `pi0` falls beneath f64 resolution.
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=4);
        let (l, m) = loop {
            let l = rng.random_range(0..=2);
            let m = rng.random_range(0..=2);
            if l + m > 0 {
                break (l, m);
            }
        };
        let gain = |rng: &mut ChaCha8Rng| rng.random_range(0.2..2.0);
        let alpha = (0..n).map(|_| gain(rng)).collect();
        let phi = (0..n).map(|_| gain(rng)).collect();
        let beta = if l == 0 {
            Vec::new()
        } else {
            (0..n)
                .map(|_| (0..l).map(|_| gain(rng)).collect())
                .collect()
        };
        let psi = (0..m).map(|_| gain(rng)).collect();
        let mut network = NetworkParams {
            alpha,
            phi,
            beta,
            psi,
            sigma_s: rng.random_range(0.3..2.0),
            sigma_fc: rng.random_range(0.3..2.0),
        };
        let priors = Priors::from_pi0(rng.random_range(0.1..0.9)).unwrap();
        let raw = aggregate(&network, &priors).unwrap();
        let scale = rng.random_range(0.5..8.0) * raw.sigma() / raw.a;
        network.alpha.iter_mut().for_each(|x| *x *= scale);
        let agg = aggregate(&network, &priors).unwrap();
        let budget = JammerBudget::new(rng.random_range(0.1..10.0)).unwrap();
        Self {
            network,
            priors,
            agg,
            budget,
        }
    }

    /// Uniform draw from the power ball.
    pub fn feasible_w(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        ball_point(rng, self.agg.dim(), self.budget.power)
    }

    pub fn reach(&self) -> f64 {
        self.budget.reach(&self.agg)
    }
}

pub fn ball_point(rng: &mut ChaCha8Rng, dim: usize, power: f64) -> Vec<f64> {
    let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = power.sqrt() * rng.random::<f64>().powf(1.0 / dim as f64);
    z.iter().map(|x| x * r / norm).collect()
}
