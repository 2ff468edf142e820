// Monte-Carlo check of the analytic cost curve `C(f)` around `f*` for a
// 50%-annualised asset. Antithetic pairs keep the confidence interval
// well below the differences between grid points.

use rebal::simplex::geodesic_angle;
use rebal::stochastic::{
    analytic_cost, annual_to_daily, mean_lvr_along_path, monte_carlo_cost, optimal_step_count, round_steps,
    DT_BLOCK_12S,
};
use rebal::{MarketParams, Method, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::two_token(0.5)?;
    let end = WeightVector::two_token(0.7)?;
    let market = MarketParams::single_volatile(2, annual_to_daily(0.5), DT_BLOCK_12S)?;
    let omega = geodesic_angle(&start, &end)?;
    let lbar = mean_lvr_along_path(&start, &end, &market)?;
    let f_star = optimal_step_count(omega, lbar, DT_BLOCK_12S)?.f_star;

    println!("predicted f* = {f_star:.0}");
    println!("{:>7} {:>12} {:>10} {:>12}", "f", "MC", "ci95", "analytic");
    for k in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let f = round_steps(k * f_star);
        let mc = monte_carlo_cost(&start, &end, f, Method::Slerp, &market, 400, 42)?;
        let an = analytic_cost(f as f64, omega, lbar, DT_BLOCK_12S).total;
        println!("{f:>7} {:>12.4e} {:>10.1e} {an:>12.4e}", mc.mean_log_loss, mc.ci95_halfwidth);
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
