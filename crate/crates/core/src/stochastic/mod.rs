//! Stochastic prices: LVR, the rebalance/LVR trade-off, Monte-Carlo
//! simulation of pool value along a trajectory, and CSV replay.

mod market;
mod paths;
mod replay;
mod sim;
mod steps;

pub use market::{
    annual_to_daily, lvr_gradient, lvr_rate, mean_lvr_along_path, variance_drag, MarketParams, PriceModel,
    VolUnits, BLOCK_SECONDS, DAYS_PER_YEAR, DT_BLOCK_12S,
};
pub use paths::{sample_paths, PricePath};
pub use replay::{read_price_csv, replay_rebalance, write_price_csv, ReplayReport, StepDecomposition};
pub use sim::{
    abel_residual, monte_carlo_cost, monte_carlo_trajectory, simulate_rebalance, McOptions, Ordering,
    RebalanceOutcome, SimResult,
};
pub use steps::{analytic_cost, lambda_star, optimal_step_count, round_steps, CostSplit, OptimalSteps};
