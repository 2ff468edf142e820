// The exact two-step optimum has a closed form in the Lambert W function.
// It differs from the SLERP midpoint most when a weight is near zero:
// the table below swaps `(w_min, 1 - w_min)` for `(1 - w_min, w_min)`.

use rebal::interpolation::{lambertw_midpoint, slerp_point};
use rebal::optimize::{optimize_from_slerp, OptimizeOptions, PathObjective};
use rebal::simplex::kl_divergence;
use rebal::WeightVector;

fn two_step_loss(a: &WeightVector, m: &WeightVector, b: &WeightVector) -> rebal::Result<f64> {
    Ok(kl_divergence(m, a)? + kl_divergence(b, m)?)
}

pub fn run() -> rebal::Result<()> {
    let opts = OptimizeOptions { w_floor: 1e-6, ..OptimizeOptions::default() };
    for (ws, we) in [(0.5, 0.9), (0.01, 0.99), (0.02, 0.98), (0.1, 0.9)] {
        let a = WeightVector::two_token(ws)?;
        let b = WeightVector::two_token(we)?;
        let slerp = slerp_point(&a, &b, 0.5)?;
        let lw = lambertw_midpoint(&a, &b)?;
        let opt = optimize_from_slerp(&a, &b, 2, &PathObjective::ExactKl, &opts)?;
        let best = opt.objective_value;
        println!(
            "{ws} -> {we}: slerp {:.5} ({:.4}x opt), lambert {:.5} ({:.4}x opt), optimum {:.5}",
            slerp[0],
            two_step_loss(&a, &slerp, &b)? / best,
            lw[0],
            two_step_loss(&a, &lw, &b)? / best,
            opt.trajectory.points()[1][0]
        );
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
