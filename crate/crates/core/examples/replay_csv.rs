// Write a simulated price path to CSV, read it back and replay a
// trajectory on it. The arbitrage (KL) part never depends on prices.

use std::fs::File;

use rebal::interpolation::slerp_path;
use rebal::stochastic::{
    annual_to_daily, read_price_csv, replay_rebalance, sample_paths, write_price_csv, Ordering, DT_BLOCK_12S,
};
use rebal::{MarketParams, WeightVector};

pub fn run() -> rebal::Result<()> {
    let market = MarketParams::single_volatile(2, annual_to_daily(0.8), DT_BLOCK_12S)?;
    let t = slerp_path(&WeightVector::two_token(0.5)?, &WeightVector::two_token(0.7)?, 20)?;
    let path = std::env::temp_dir().join(format!("rebal-replay-{}.csv", std::process::id()));

    write_price_csv(File::create(&path)?, &sample_paths(&market, 20, 1, 3).remove(0))?;
    let prices = read_price_csv(File::open(&path)?)?;
    let r = replay_rebalance(&t, &prices, Ordering::Simultaneous)?;
    std::fs::remove_file(&path)?;

    println!("{:>4} {:>12} {:>12} {:>12}", "step", "ln r", "price", "cumulative");
    for s in r.steps.iter().step_by(5) {
        println!("{:>4} {:>12.3e} {:>12.3e} {:>12.3e}", s.step, s.kl, s.price_term, s.cumulative);
    }
    println!("total {:.6e} = kl {:.6e} + price {:.6e}", r.log_value_change, r.kl_component, r.price_component);
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
