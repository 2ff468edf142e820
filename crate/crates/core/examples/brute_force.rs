// Optimise every interior weight vector directly and compare with SLERP.
// The gain is tiny, which is the point: SLERP is already within
// `O(1/f^3)` of the exact-KL optimum.

use rebal::cost::evaluate_trajectory;
use rebal::optimize::{optimize_from_slerp, OptimizeOptions, PathObjective};
use rebal::{LossKernelKind, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::new(vec![0.05, 0.55, 0.40])?;
    let end = WeightVector::new(vec![0.40, 0.50, 0.10])?;

    for f in [8, 16, 50] {
        let r = optimize_from_slerp(&start, &end, f, &PathObjective::ExactKl, &OptimizeOptions::default())?;
        let before = (-r.initial_objective).exp();
        let after = evaluate_trajectory(&r.trajectory, LossKernelKind::ExactKl).retained_fraction;
        println!(
            "f = {f:>3}: retained {before:.10} -> {after:.10}  (gap {:.2e} nats, {} iterations)",
            r.improvement_vs_init, r.iterations
        );
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
