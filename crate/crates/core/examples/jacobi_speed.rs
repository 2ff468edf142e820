// Variable speed along the SLERP curve: move faster where LVR is high.
// Interior rebalances barely benefit; ones that pass near a vertex do.

use rebal::dynamics::{jacobi_cost, jacobi_speed_profile};
use rebal::stochastic::{annual_to_daily, DT_BLOCK_12S};
use rebal::{MarketParams, WeightVector};

pub fn run() -> rebal::Result<()> {
    let sigma = annual_to_daily(0.5);

    let two = MarketParams::single_volatile(2, sigma, DT_BLOCK_12S)?;
    let j = jacobi_cost(&WeightVector::two_token(0.5)?, &WeightVector::two_token(0.7)?, &two)?;
    println!("interior pair: saving {:.4}%", 100.0 * j.relative_saving);

    let three = MarketParams::uncorrelated(vec![sigma; 3], DT_BLOCK_12S)?;
    let a = WeightVector::new(vec![0.01, 0.01, 0.98])?;
    let b = WeightVector::new(vec![0.49, 0.49, 0.02])?;
    let j = jacobi_cost(&a, &b, &three)?;
    println!(
        "boundary pair: constant {:.4e}, variable {:.4e}, saving {:.3}%",
        j.constant_speed,
        j.variable_speed,
        100.0 * j.relative_saving
    );
    let grid: Vec<f64> = (0..=4).map(|k| k as f64 / 4.0).collect();
    let v = jacobi_speed_profile(&a, &b, &three, &grid)?;
    let shown: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    println!("speed along curve: {}", shown.join(", "));
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
