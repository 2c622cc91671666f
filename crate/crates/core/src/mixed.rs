//! Zero-mean Gaussian jammer `w ~ N(0, W)` under an average power constraint.
//!
//! Against such a jammer the received statistic has variance `sigma2 + b'Wb`, so the
//! fusion center faces a pure detection problem with inflated noise. The resulting
//! error `U(W)` grows with `b'Wb` and is never below the pure-strategy equilibrium
//! error.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::analysis::gaussian_q;
use crate::equilibrium::best_response_value;
use crate::error::{check_len, Error, Result};
use crate::model::{ChannelAggregate, JammerBudget, Priors, POWER_SLACK};

const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;

/// Validated jammer covariance with its power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJammerCovariance {
    matrix: DMatrix<f64>,
    budget: f64,
}

impl GaussianJammerCovariance {
    /// Builds a covariance from row-major entries of a `dim x dim` matrix.
    pub fn from_row_major(dim: usize, entries: &[f64], budget: &JammerBudget) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidCovariance(format!(
                "expected {} entries for dimension {dim}, found {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries), budget)
    }

    pub fn new(matrix: DMatrix<f64>, budget: &JammerBudget) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidCovariance(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance("entries must be finite".into()));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidCovariance(format!(
                "matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        if matrix.nrows() > 0 {
            let min_eig = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
            if min_eig < EIGEN_FLOOR {
                return Err(Error::InvalidCovariance(format!(
                    "matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})"
                )));
            }
        }
        let trace = matrix.trace();
        if trace > budget.power + POWER_SLACK {
            return Err(Error::InvalidCovariance(format!(
                "trace {trace} exceeds the average power budget {}",
                budget.power
            )));
        }
        Ok(Self {
            matrix,
            budget: budget.power,
        })
    }

    pub fn zeros(dim: usize, budget: &JammerBudget) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
            budget: budget.power,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `b'Wb`, the jamming variance seen at the fusion center.
    ///
    /// Clamped at zero: `W` is PSD, so a negative value is rounding.
    pub fn projected_variance(&self, agg: &ChannelAggregate) -> Result<f64> {
        check_len("covariance", agg.dim(), self.dim())?;
        let b = DVector::from_column_slice(&agg.b);
        Ok(b.dot(&(&self.matrix * &b)).max(0.0))
    }

    /// Factor `F` with `F F' = W`, from the eigendecomposition with negative
    /// eigenvalues clamped to zero.
    pub fn factor(&self) -> DMatrix<f64> {
        if self.dim() == 0 {
            return DMatrix::zeros(0, 0);
        }
        let eig = SymmetricEigen::new(self.matrix.clone());
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        eig.eigenvectors * DMatrix::from_diagonal(&roots)
    }
}

/// Covariance `P b b' / b'b`, which maximizes `b'Wb` subject to `tr(W) <= P`.
pub fn utility_maximizing_covariance(
    agg: &ChannelAggregate,
    budget: &JammerBudget,
) -> Result<GaussianJammerCovariance> {
    let btb = agg.nonzero_channel()?;
    let b = DVector::from_column_slice(&agg.b);
    let matrix = (&b * b.transpose()) * (budget.power / btb);
    Ok(GaussianJammerCovariance {
        matrix: (&matrix + matrix.transpose()) * 0.5,
        budget: budget.power,
    })
}

/// `pi0 Q(x/s) + pi1 [1 - Q((x - a)/s)]` with `s^2 = sigma2 + b'Wb`.
pub fn gamma_functional(
    x: f64,
    cov: &GaussianJammerCovariance,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<f64> {
    let spread = (agg.sigma2 + cov.projected_variance(agg)?).sqrt();
    Ok(priors.pi0() * gaussian_q(x / spread) + priors.pi1() * gaussian_q((agg.a - x) / spread))
}

/// Threshold `c + b'Wb log(pi0/pi1) / a` minimizing [`gamma_functional`].
pub fn mixed_best_threshold(
    cov: &GaussianJammerCovariance,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<f64> {
    let bwb = cov.projected_variance(agg)?;
    Ok(agg.c + bwb * priors.log_ratio() / agg.a)
}

/// Expected error `U(W)` when the fusion center best-responds to the Gaussian jammer.
pub fn mixed_utility(
    cov: &GaussianJammerCovariance,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<f64> {
    gamma_functional(mixed_best_threshold(cov, agg, priors)?, cov, agg, priors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedComparison {
    /// `U(W)`.
    pub utility: f64,
    /// Pure-strategy equilibrium error.
    pub pure: f64,
    /// `utility - pure`.
    pub advantage: f64,
    pub projected_variance: f64,
    pub threshold: f64,
}

pub fn compare_mixed_vs_pure(
    cov: &GaussianJammerCovariance,
    agg: &ChannelAggregate,
    priors: &Priors,
) -> Result<MixedComparison> {
    let threshold = mixed_best_threshold(cov, agg, priors)?;
    let utility = gamma_functional(threshold, cov, agg, priors)?;
    let pure = best_response_value(agg, priors);
    Ok(MixedComparison {
        utility,
        pure,
        advantage: utility - pure,
        projected_variance: cov.projected_variance(agg)?,
        threshold,
    })
}
