// Per-step loss uniformity of the four interpolation rules on a
// three-token rebalance, and how close each total gets to the
// geodesic bound `2 Omega^2 / f`.
//
// ```text
// cargo run --example slerp_vs_heuristics
// ```

use rebal::interpolation::interpolate;
use rebal::simplex::geodesic_angle;
use rebal::{analytic_slerp_cost, evaluate_trajectory, LossKernelKind, Method, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::new(vec![0.05, 0.55, 0.40])?;
    let end = WeightVector::new(vec![0.40, 0.50, 0.10])?;
    let f = 1000;
    let omega = geodesic_angle(&start, &end)?;

    println!("Omega = {omega:.6} rad, f = {f}");
    println!("{:<10} {:>14} {:>12} {:>12}", "method", "total (nats)", "retained", "std/mean");
    for method in Method::HEURISTICS {
        let path = interpolate(method, &start, &end, f)?;
        let r = evaluate_trajectory(&path, LossKernelKind::ExactKl);
        println!(
            "{:<10} {:>14.8e} {:>12.9} {:>12.5}",
            method.name(),
            r.total,
            r.retained_fraction,
            r.std_over_mean
        );
    }
    println!("geodesic bound 2 Omega^2 / f = {:.8e}", analytic_slerp_cost(omega, f));
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
