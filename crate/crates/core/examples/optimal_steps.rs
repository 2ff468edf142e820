// How many blocks should a rebalance take? Each extra step shrinks the
// arbitrage loss `2 Omega^2 / f` but exposes the pool to LVR for one more
// block; the balance point is `f* = Omega sqrt(2 / (dt l))`.

use rebal::simplex::geodesic_angle;
use rebal::stochastic::{
    analytic_cost, annual_to_daily, lambda_star, mean_lvr_along_path, optimal_step_count, round_steps,
    DT_BLOCK_12S,
};
use rebal::{MarketParams, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::two_token(0.5)?;
    let end = WeightVector::two_token(0.7)?;
    let omega = geodesic_angle(&start, &end)?;

    // One volatile asset at 3% per day against a stable one.
    let market = MarketParams::single_volatile(2, 0.03, DT_BLOCK_12S)?;
    let lbar = mean_lvr_along_path(&start, &end, &market)?;
    let opt = optimal_step_count(omega, lbar, DT_BLOCK_12S)?;
    println!("Omega = {omega:.4}, mean LVR = {lbar:.3e}/day");
    println!("f* = {:.1} blocks ({} rounded), C(f*) = {:.3e}", opt.f_star, round_steps(opt.f_star), opt.min_cost);
    println!("lambda* = {:.2}", lambda_star(0.03, lbar)?);

    for f in [opt.f_star / 4.0, opt.f_star, 4.0 * opt.f_star] {
        let c = analytic_cost(f, omega, lbar, DT_BLOCK_12S);
        println!("  f = {f:>8.0}: rebalance {:.3e} + lvr {:.3e} = {:.3e}", c.rebalance, c.lvr, c.total);
    }

    println!("annualised vol -> f*:");
    for ann in [0.3, 0.5, 0.8] {
        let m = MarketParams::single_volatile(2, annual_to_daily(ann), DT_BLOCK_12S)?;
        let l = mean_lvr_along_path(&start, &end, &m)?;
        println!("  {:>3.0}% -> {:.0}", ann * 100.0, optimal_step_count(omega, l, DT_BLOCK_12S)?.f_star);
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
