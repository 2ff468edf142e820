// The analytic cost assumes GBM. Simulate the same rebalance under Merton
// jumps and GARCH(1,1), both calibrated to the same daily variance.

use rebal::interpolation::slerp_path;
use rebal::simplex::geodesic_angle;
use rebal::stochastic::{
    analytic_cost, annual_to_daily, mean_lvr_along_path, monte_carlo_trajectory, optimal_step_count, round_steps,
    McOptions, PriceModel, DT_BLOCK_12S,
};
use rebal::{MarketParams, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::two_token(0.5)?;
    let end = WeightVector::two_token(0.7)?;
    let gbm = MarketParams::single_volatile(2, annual_to_daily(0.5), DT_BLOCK_12S)?;
    let omega = geodesic_angle(&start, &end)?;
    let lbar = mean_lvr_along_path(&start, &end, &gbm)?;
    let f = round_steps(optimal_step_count(omega, lbar, DT_BLOCK_12S)?.f_star);
    let t = slerp_path(&start, &end, f)?;

    println!("f = {f}, GBM analytic C(f) = {:.4e}", analytic_cost(f as f64, omega, lbar, DT_BLOCK_12S).total);
    for model in [PriceModel::Gbm, PriceModel::default_merton(), PriceModel::default_garch()] {
        let m = gbm.clone().with_model(model)?;
        let r = monte_carlo_trajectory(&t, &m, &McOptions::new(400, 1))?;
        println!("{:<7} MC {:.4e} +/- {:.1e}", model.name(), r.mean_log_loss, r.ci95_halfwidth);
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
