use serde::Serialize;

use crate::error::{Error, Result};

/// The two terms of the rebalance/LVR trade-off `C(f) = 2 Omega^2 / f + f dt l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostSplit {
    pub rebalance: f64,
    pub lvr: f64,
    pub total: f64,
}

pub fn analytic_cost(f: f64, omega: f64, mean_lvr: f64, dt_block: f64) -> CostSplit {
    let rebalance = 2.0 * omega * omega / f;
    let lvr = f * dt_block * mean_lvr;
    CostSplit {
        rebalance,
        lvr,
        total: rebalance + lvr,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalSteps {
    /// Unrounded minimiser of `C(f)`.
    pub f_star: f64,
    pub min_cost: f64,
}

/// `f* = Omega sqrt(2 / (dt l))` and `C(f*) = 2 sqrt(2 Omega^2 dt l)`.
///
/// With no LVR (`l <= 0`) more steps are always better, so there is no finite optimum.
pub fn optimal_step_count(omega: f64, mean_lvr: f64, dt_block: f64) -> Result<OptimalSteps> {
    if !(mean_lvr > 0.0) {
        return Err(Error::NoFiniteOptimum(
            "mean LVR rate is zero: constant-price regime, use as many steps as possible".into(),
        ));
    }
    if !(dt_block > 0.0) {
        return Err(Error::invalid("block interval must be positive"));
    }
    Ok(OptimalSteps {
        f_star: omega * (2.0 / (dt_block * mean_lvr)).sqrt(),
        min_cost: 2.0 * (2.0 * omega * omega * dt_block * mean_lvr).sqrt(),
    })
}

/// Nearest integer step count, at least one.
pub fn round_steps(f_star: f64) -> usize {
    if f_star.is_finite() {
        f_star.round().max(1.0) as usize
    } else {
        1
    }
}

/// Dimensionless LVR strength `2 sigma^2 / l`.
pub fn lambda_star(sigma_eff: f64, mean_lvr: f64) -> Result<f64> {
    if !(mean_lvr > 0.0) {
        return Err(Error::NoFiniteOptimum("mean LVR rate must be positive".into()));
    }
    Ok(2.0 * sigma_eff * sigma_eff / mean_lvr)
}
