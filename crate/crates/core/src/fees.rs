//! Swap-fee economics for a rebalancing pool.
//!
//! A fee `1 - gamma` opens a no-arbitrage band around the market price.
//! Weight steps small enough to stay inside it are not arbitraged at once;
//! they accumulate until the band is breached, so the effective number of
//! rebalancing steps saturates at a threshold.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::interpolation::Trajectory;
use crate::simplex::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeParams {
    /// Fraction of each trade retained after the fee, e.g. 0.997 for 30 bp.
    pub gamma: f64,
    /// Realised share of the zero-fee LVR actually lost (may be <= 0).
    pub phi: f64,
    pub pool_value: f64,
}

impl FeeParams {
    pub fn new(gamma: f64, phi: f64, pool_value: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!("fee retention gamma {gamma} outside (0, 1)")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("cost-of-carry fraction must be finite"));
        }
        if !(pool_value > 0.0) || !pool_value.is_finite() {
            return Err(Error::invalid(format!("pool value {pool_value} must be positive")));
        }
        Ok(FeeParams { gamma, phi, pool_value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Bound set by the smallest weight.
    WorstCase,
    /// Weight changes spread evenly over `n_tokens` components.
    Typical { n_tokens: usize },
}

/// Step count above which individual weight steps fall inside the fee band.
pub fn f_threshold(omega: f64, w_min: f64, gamma: f64, mode: ThresholdMode) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::invalid("geodesic angle must be non-negative"));
    }
    if !(w_min > 0.0 && w_min < 1.0) {
        return Err(Error::invalid(format!("minimum weight {w_min} outside (0, 1)")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("fee retention gamma {gamma} outside (0, 1)")));
    }
    let spread = match mode {
        ThresholdMode::WorstCase => w_min.sqrt(),
        ThresholdMode::Typical { n_tokens } => {
            if n_tokens < 2 {
                return Err(Error::invalid("typical mode needs at least two tokens"));
            }
            (n_tokens as f64 * w_min).sqrt()
        }
    };
    Ok(4.0 * omega / (spread * (1.0 - gamma)))
}

/// Fraction of blocks in which price moves alone push the price out of the band.
pub fn price_arb_rate(sigma_daily: f64, dt_block: f64, gamma: f64) -> Result<f64> {
    if !(gamma < 1.0) {
        return Err(Error::invalid("gamma must be below 1"));
    }
    Ok(sigma_daily * sigma_daily * dt_block / ((1.0 - gamma) * (1.0 - gamma)))
}

fn fee_scale(fee: &FeeParams) -> f64 {
    (1.0 - fee.gamma) / (2.0 * fee.gamma) * fee.pool_value
}

/// Leading-order fee revenue collected from arbitrageurs over the whole move.
pub fn fee_revenue_total(w_start: &WeightVector, w_end: &WeightVector, fee: &FeeParams) -> Result<f64> {
    check_dims(w_start.len(), w_end.len())?;
    let moved: f64 = w_start.iter().zip(w_end.iter()).map(|(a, b)| (b - a).abs()).sum();
    Ok(fee_scale(fee) * moved)
}

/// Fee revenue summed step by step along a trajectory.
pub fn fee_revenue_along(t: &Trajectory, fee: &FeeParams) -> f64 {
    let moved: f64 = t
        .points()
        .windows(2)
        .map(|p| p[0].iter().zip(p[1].iter()).map(|(a, b)| (b - a).abs()).sum::<f64>())
        .sum();
    fee_scale(fee) * moved
}

/// True when every component moves in one direction only (changes within 1e-14 count as zero).
pub fn is_component_monotone(t: &Trajectory) -> bool {
    let pts = t.points();
    (0..t.n_tokens()).all(|i| {
        let mut sign = 0.0;
        for p in pts.windows(2) {
            let d = p[1][i] - p[0][i];
            if d.abs() <= 1e-14 {
                continue;
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                return false;
            }
        }
        true
    })
}

/// `C_phi(f) = 2 Omega^2 / min(f, f_thr) + f dt l phi`.
pub fn fee_adjusted_cost(f: f64, omega: f64, mean_lvr: f64, dt_block: f64, fee: &FeeParams, f_thr: f64) -> f64 {
    2.0 * omega * omega / f.min(f_thr) + f * dt_block * mean_lvr * fee.phi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeeAdjustedOptimum {
    Finite { f_star: f64, capped: bool },
    /// Carrying cost is zero or negative: more steps never hurt.
    NoFiniteOptimum,
}

pub fn fee_adjusted_optimal_f(omega: f64, mean_lvr: f64, dt_block: f64, fee: &FeeParams, f_thr: f64) -> FeeAdjustedOptimum {
    if fee.phi <= 0.0 {
        return FeeAdjustedOptimum::NoFiniteOptimum;
    }
    let carry = dt_block * mean_lvr * fee.phi;
    let raw = if carry > 0.0 {
        omega * (2.0 / carry).sqrt()
    } else {
        f64::INFINITY
    };
    if raw > f_thr {
        FeeAdjustedOptimum::Finite { f_star: f_thr, capped: true }
    } else {
        FeeAdjustedOptimum::Finite { f_star: raw, capped: false }
    }
}

/// Blocks per sawtooth cycle of weight-driven arbitrage, `f / f_thr`.
pub fn sawtooth_blocks(f: f64, f_thr: f64) -> Result<f64> {
    if !(f_thr > 0.0) {
        return Err(Error::invalid("fee threshold must be positive"));
    }
    Ok(f / f_thr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::{amgm_path, linear_path, slerp_path};
    use crate::stochastic::{optimal_step_count, DT_BLOCK_12S};

    fn wv(x: &[f64]) -> WeightVector {
        WeightVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let w = f_threshold(0.21, 0.3, 0.997, ThresholdMode::WorstCase).unwrap();
        assert!((w - 511.2).abs() < 0.1, "{w}");
        let w = f_threshold(0.21, 0.05, 0.997, ThresholdMode::WorstCase).unwrap();
        assert!((w / 1250.0 - 1.0).abs() < 0.03);
        let t = f_threshold(0.21, 0.05, 0.997, ThresholdMode::Typical { n_tokens: 3 }).unwrap();
        assert!((t / 720.0 - 1.0).abs() < 0.03);
        assert_eq!(f_threshold(0.0, 0.3, 0.997, ThresholdMode::WorstCase).unwrap(), 0.0);
        assert!(f_threshold(0.2, 0.3, 1.0, ThresholdMode::WorstCase).is_err());
    }

    #[test]
    fn arb_rate_examples() {
        let nu = price_arb_rate(0.03, DT_BLOCK_12S, 0.997).unwrap();
        assert!((nu - 0.013_888_9).abs() < 1e-6);
        assert!((1.0 / nu - 72.0).abs() < 0.1);
        assert_eq!(price_arb_rate(0.0, DT_BLOCK_12S, 0.997).unwrap(), 0.0);
        let half = price_arb_rate(0.03, DT_BLOCK_12S, 0.9985).unwrap();
        assert!((half / nu - 4.0).abs() < 1e-9);
        assert!(price_arb_rate(0.03, DT_BLOCK_12S, 1.0).is_err());
    }

    #[test]
    fn revenue_examples() {
        let fee = FeeParams::new(0.997, 1.0, 1.0).unwrap();
        let a = wv(&[0.5, 0.5]);
        assert_eq!(fee_revenue_total(&a, &a, &fee).unwrap(), 0.0);
        let r = fee_revenue_total(&a, &wv(&[0.7, 0.3]), &fee).unwrap();
        assert!((r - 0.003 / 1.994 * 0.4).abs() < 1e-15);
        let r = fee_revenue_total(&wv(&[0.05, 0.55, 0.40]), &wv(&[0.40, 0.50, 0.10]), &fee).unwrap();
        assert!((r - 0.003 / 1.994 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn revenue_telescopes_on_monotone_paths() {
        let fee = FeeParams::new(0.997, 1.0, 3.0).unwrap();
        let a = wv(&[0.05, 0.55, 0.40]);
        let b = wv(&[0.40, 0.50, 0.10]);
        let total = fee_revenue_total(&a, &b, &fee).unwrap();
        for t in [linear_path(&a, &b, 64).unwrap(), amgm_path(&a, &b, 64).unwrap(), slerp_path(&a, &b, 64).unwrap()] {
            let along = fee_revenue_along(&t, &fee);
            if is_component_monotone(&t) {
                assert!((along - total).abs() < 1e-14, "{}", t.method());
            } else {
                assert!(along >= total - 1e-14);
            }
        }
    }

    #[test]
    fn adjusted_cost_properties() {
        let fee = FeeParams::new(0.997, 0.0, 1.0).unwrap();
        let (om, l, dt, thr) = (0.21, 1.1e-4, DT_BLOCK_12S, 510.0);
        let mut prev = f64::INFINITY;
        for f in [10.0, 100.0, 510.0, 1000.0] {
            let c = fee_adjusted_cost(f, om, l, dt, &fee, thr);
            assert!(c <= prev);
            prev = c;
        }
        let fee = FeeParams::new(0.997, 0.7, 1.0).unwrap();
        let c1 = fee_adjusted_cost(thr, om, l, dt, &fee, thr);
        let c2 = fee_adjusted_cost(2.0 * thr, om, l, dt, &fee, thr);
        assert!((c2 - c1 - thr * dt * l * 0.7).abs() < 1e-18);
        let below = fee_adjusted_cost(thr * (1.0 - 1e-12), om, l, dt, &fee, thr);
        assert!((below - c1).abs() < 1e-12 * c1);
        let plain = crate::stochastic::analytic_cost(300.0, om, l * 0.7, dt).total;
        assert!((fee_adjusted_cost(300.0, om, l, dt, &fee, thr) - plain).abs() < 1e-18);
    }

    #[test]
    fn adjusted_optimum() {
        let (om, l, dt) = (0.21, 1.1e-4, 1.4e-4);
        let one = FeeParams::new(0.997, 1.0, 1.0).unwrap();
        let plain = optimal_step_count(om, l, dt).unwrap().f_star;
        match fee_adjusted_optimal_f(om, l, dt, &one, 1e9) {
            FeeAdjustedOptimum::Finite { f_star, capped } => {
                assert!(!capped);
                assert!((f_star - plain).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            fee_adjusted_optimal_f(om, l, dt, &one, 510.0),
            FeeAdjustedOptimum::Finite { f_star: 510.0, capped: true }
        );
        let quarter = FeeParams::new(0.997, 0.25, 1.0).unwrap();
        if let FeeAdjustedOptimum::Finite { f_star, .. } = fee_adjusted_optimal_f(om, l, dt, &quarter, 1e9) {
            assert!((f_star / plain - 2.0).abs() < 1e-12);
        } else {
            panic!();
        }
        let neg = FeeParams::new(0.997, -0.1, 1.0).unwrap();
        assert_eq!(fee_adjusted_optimal_f(om, l, dt, &neg, 510.0), FeeAdjustedOptimum::NoFiniteOptimum);
    }

    #[test]
    fn sawtooth() {
        assert_eq!(sawtooth_blocks(510.0, 510.0).unwrap(), 1.0);
        assert!((sawtooth_blocks(2400.0, 510.0).unwrap() - 4.7).abs() < 0.1);
        assert!(sawtooth_blocks(1.0, 0.0).is_err());
    }
}
