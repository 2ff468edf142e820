// Swap fees: above `f_thr` steps, individual weight changes sit inside the
// no-arbitrage band and stop being arbitraged one by one.

use rebal::fees::{
    f_threshold, fee_adjusted_cost, fee_adjusted_optimal_f, fee_revenue_along, fee_revenue_total, price_arb_rate,
    sawtooth_blocks, FeeParams, ThresholdMode,
};
use rebal::interpolation::slerp_path;
use rebal::simplex::geodesic_angle;
use rebal::stochastic::{mean_lvr_along_path, optimal_step_count, DT_BLOCK_12S};
use rebal::{MarketParams, WeightVector};

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::two_token(0.5)?;
    let end = WeightVector::two_token(0.7)?;
    let omega = geodesic_angle(&start, &end)?;
    let market = MarketParams::single_volatile(2, 0.03, DT_BLOCK_12S)?;
    let lbar = mean_lvr_along_path(&start, &end, &market)?;

    let gamma = 0.997;
    let f_thr = f_threshold(omega, 0.3, gamma, ThresholdMode::WorstCase)?;
    let nu = price_arb_rate(0.03, DT_BLOCK_12S, gamma)?;
    let f_star = optimal_step_count(omega, lbar, DT_BLOCK_12S)?.f_star;
    println!("f_thr = {f_thr:.0}, nu = {nu:.4} (one price-driven arb every {:.0} blocks)", 1.0 / nu);
    println!("f* = {f_star:.0}: about {:.1} blocks per sawtooth tooth", sawtooth_blocks(f_star, f_thr)?);

    for phi in [1.0, 0.2, -0.1] {
        let fee = FeeParams::new(gamma, phi, 1.0)?;
        let opt = fee_adjusted_optimal_f(omega, lbar, DT_BLOCK_12S, &fee, f_thr);
        let c = fee_adjusted_cost(f_thr, omega, lbar, DT_BLOCK_12S, &fee, f_thr);
        println!("phi = {phi:>4}: {opt:?}, C_phi(f_thr) = {c:.3e}");
    }

    let fee = FeeParams::new(gamma, 1.0, 1_000_000.0)?;
    let along = fee_revenue_along(&slerp_path(&start, &end, 100)?, &fee);
    println!("fee revenue: {along:.4} along SLERP vs {:.4} endpoint formula", fee_revenue_total(&start, &end, &fee)?);
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
