//! Constant-price cost of a trajectory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interpolation::Trajectory;
use crate::simplex::{step_loss, LossKernelKind};

/// Per-step losses and summary statistics for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub per_step: Vec<f64>,
    pub total: f64,
    /// Population standard deviation of `per_step` over its mean.
    pub std_over_mean: f64,
    pub retained_fraction: f64,
}

impl CostReport {
    pub fn from_losses(per_step: Vec<f64>) -> Self {
        let n = per_step.len().max(1) as f64;
        let total: f64 = per_step.iter().sum();
        let mean = total / n;
        let var = per_step.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let std_over_mean = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
        CostReport {
            per_step,
            total,
            std_over_mean,
            retained_fraction: (-total).exp(),
        }
    }
}

/// Loss of every step; step `k` is charged `KL(w_k || w_{k-1})` under the exact kernel.
pub fn evaluate_trajectory(t: &Trajectory, kind: LossKernelKind) -> CostReport {
    let losses = t
        .points()
        .windows(2)
        .map(|p| step_loss(&p[0], &p[1], kind))
        .collect();
    CostReport::from_losses(losses)
}

/// Leading-order total SLERP loss `2 Omega^2 / f`.
pub fn analytic_slerp_cost(omega: f64, f: usize) -> f64 {
    2.0 * omega * omega / f as f64
}

/// Conservative constant of the sub-optimality bound, `86 N / eps^4`.
pub fn suboptimality_constant(n_tokens: usize, min_weight: f64) -> f64 {
    86.0 * n_tokens as f64 / min_weight.powi(4)
}

/// Upper bound `A Omega^4 / f^3` on how far SLERP can be from the optimal `f`-step path.
///
/// Valid only when `f >= 4 Omega / eps`; below that the bound's hypothesis
/// fails and an error is returned.
pub fn suboptimality_bound(omega: f64, f: usize, n_tokens: usize, min_weight: f64) -> Result<f64> {
    if !(min_weight > 0.0) {
        return Err(Error::invalid(format!("minimum weight {min_weight} must be positive")));
    }
    if f == 0 {
        return Err(Error::invalid("step count f must be at least 1"));
    }
    let needed = 4.0 * omega / min_weight;
    if (f as f64) < needed {
        return Err(Error::invalid(format!(
            "bound requires f >= 4 Omega / eps = {needed:.3}, got {f}"
        )));
    }
    Ok(suboptimality_constant(n_tokens, min_weight) * omega.powi(4) / (f as f64).powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::{amgm_path, geometric_path, linear_path, slerp_path};
    use crate::simplex::{geodesic_angle, WeightVector};

    fn three_token() -> (WeightVector, WeightVector) {
        (
            WeightVector::new(vec![0.05, 0.55, 0.40]).unwrap(),
            WeightVector::new(vec![0.40, 0.50, 0.10]).unwrap(),
        )
    }

    #[test]
    fn constant_trajectory_costs_nothing() {
        let (a, _) = three_token();
        let r = evaluate_trajectory(&slerp_path(&a, &a, 10).unwrap(), LossKernelKind::ExactKl);
        assert!(r.per_step.iter().all(|&x| x == 0.0));
        assert_eq!(r.std_over_mean, 0.0);
        assert_eq!(r.retained_fraction, 1.0);
    }

    #[test]
    fn uniformity_table() {
        let (a, b) = three_token();
        let cases = [
            (linear_path(&a, &b, 1000).unwrap(), 0.32355),
            (geometric_path(&a, &b, 1000).unwrap(), 0.21549),
            (amgm_path(&a, &b, 1000).unwrap(), 0.08601),
        ];
        for (t, want) in cases {
            let r = evaluate_trajectory(&t, LossKernelKind::ExactKl);
            assert!((r.std_over_mean - want).abs() < 1e-3 * want, "{} {}", t.method(), r.std_over_mean);
        }
        let r = evaluate_trajectory(&slerp_path(&a, &b, 1000).unwrap(), LossKernelKind::ExactKl);
        assert!(r.std_over_mean < 1e-3);
    }

    #[test]
    fn slerp_f50_retention() {
        let (a, b) = three_token();
        let r = evaluate_trajectory(&slerp_path(&a, &b, 50).unwrap(), LossKernelKind::ExactKl);
        assert!((r.retained_fraction - 0.989_047_93).abs() < 5e-8, "{}", r.retained_fraction);
        assert!((r.total - r.per_step.iter().sum::<f64>()).abs() <= 1e-12 * r.total);
    }

    #[test]
    fn analytic_cost_examples() {
        assert_eq!(analytic_slerp_cost(0.0, 5), 0.0);
        assert!((analytic_slerp_cost(0.21, 2400) - 3.675e-5).abs() < 1e-12);
        let (a, b) = three_token();
        let om = geodesic_angle(&a, &b).unwrap();
        let r = evaluate_trajectory(&slerp_path(&a, &b, 1000).unwrap(), LossKernelKind::ExactKl);
        let an = analytic_slerp_cost(om, 1000);
        assert!((r.total - an).abs() < 1e-3 * an);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(suboptimality_bound(0.0, 1, 3, 0.05).unwrap(), 0.0);
        let b = suboptimality_bound(0.52, 50, 3, 0.05).unwrap();
        assert!((suboptimality_constant(3, 0.05) - 4.128e7).abs() < 1.0);
        assert!((b - 24.1).abs() < 0.1, "{b}");
        assert!(suboptimality_bound(0.52, 40, 3, 0.05).is_err());
        assert!(suboptimality_bound(0.52, 50, 3, 0.0).is_err());
    }
}
