//! Pool value along a weight trajectory under stochastic prices.
//!
//! Each step first loses the KL arbitrage cost of the weight change, then
//! earns the weighted log price return of the block. The Monte-Carlo
//! estimator targets `-ln E[V_T / V_0]`, the quantity the analytic
//! trade-off `2 Omega^2 / f + f dt l` describes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::market::MarketParams;
use super::paths::{PricePath, ShockGenerator};
use crate::error::{check_dims, Error, Result};
use crate::interpolation::{interpolate, Method, Trajectory};
use crate::simplex::{kl_raw, WeightVector};

/// Which weights earn the price return of block `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// The new weights `w_k` (weights update as the block's prices move).
    #[default]
    Simultaneous,
    /// The old weights `w_{k-1}` (prices move first, then the weights).
    PriceThenWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RebalanceOutcome {
    /// `ln(V_T / V_0)`.
    pub log_value_change: f64,
    /// Sum of `ln r_k`; depends on the weights only.
    pub kl_component: f64,
    pub price_component: f64,
}

pub(crate) fn check_path(t: &Trajectory, prices: &PricePath) -> Result<()> {
    check_dims(t.n_tokens(), prices.n_assets())?;
    if prices.n_blocks() < t.steps() {
        return Err(Error::invalid(format!(
            "price path has {} blocks, trajectory needs {}",
            prices.n_blocks(),
            t.steps()
        )));
    }
    Ok(())
}

pub(crate) fn step_terms(t: &Trajectory, prices: &PricePath, ordering: Ordering, k: usize) -> (f64, f64) {
    let pts = t.points();
    let (prev, next) = (&pts[k - 1], &pts[k]);
    let exposure = match ordering {
        Ordering::Simultaneous => next,
        Ordering::PriceThenWeight => prev,
    };
    let log_r = -kl_raw(next, prev);
    let price: f64 = exposure
        .iter()
        .enumerate()
        .map(|(i, w)| w * prices.log_return(i, k))
        .sum();
    (log_r, price)
}

/// Log value change of the pool along `t` on one price path.
pub fn simulate_rebalance(t: &Trajectory, prices: &PricePath, ordering: Ordering) -> Result<RebalanceOutcome> {
    check_path(t, prices)?;
    let mut kl = 0.0;
    let mut price = 0.0;
    for k in 1..=t.steps() {
        let (a, b) = step_terms(t, prices, ordering, k);
        kl += a;
        price += b;
    }
    Ok(RebalanceOutcome {
        log_value_change: kl + price,
        kl_component: kl,
        price_component: price,
    })
}

/// `sum_k sum_i (w_k - w_{k-1})_i ln(P_i(k) / P_i(k-1))`: the gap between the
/// two orderings, obtained by summation by parts.
pub fn abel_residual(t: &Trajectory, prices: &PricePath) -> Result<f64> {
    check_path(t, prices)?;
    let pts = t.points();
    let mut acc = 0.0;
    for k in 1..=t.steps() {
        for i in 0..t.n_tokens() {
            acc += (pts[k][i] - pts[k - 1][i]) * prices.log_return(i, k);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub n_paths: usize,
    pub seed: u64,
    /// Pair each path with its sign-flipped partner.
    pub antithetic: bool,
    pub ordering: Ordering,
    /// Cap on worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl McOptions {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        McOptions {
            n_paths,
            seed,
            antithetic: true,
            ordering: Ordering::Simultaneous,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    /// `-ln E[V_T / V_0]` estimated over the paths.
    pub mean_log_loss: f64,
    pub ci95_halfwidth: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Plain average of `-ln(V_T / V_0)`, for reference.
    pub mean_path_log_loss: f64,
    pub path_log_loss_ci95: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

fn path_log_value(t: &Trajectory, m: &MarketParams, kl_total: f64, ordering: Ordering, seed: u64, stream: u64, sign: f64) -> f64 {
    let n = t.n_tokens();
    let pts = t.points();
    let mut gen = ShockGenerator::new(m, seed, stream, sign);
    let mut inc = vec![0.0; n];
    let mut price = 0.0;
    for k in 1..=t.steps() {
        gen.next_block(&mut inc);
        let w = match ordering {
            Ordering::Simultaneous => &pts[k],
            Ordering::PriceThenWeight => &pts[k - 1],
        };
        price += w.iter().zip(&inc).map(|(w, x)| w * x).sum::<f64>();
    }
    price - kl_total
}

/// Monte-Carlo cost of a given trajectory.
pub fn monte_carlo_trajectory(t: &Trajectory, m: &MarketParams, opts: &McOptions) -> Result<SimResult> {
    check_dims(t.n_tokens(), m.n_assets())?;
    let per_unit = if opts.antithetic { 2 } else { 1 };
    let units = opts.n_paths.div_ceil(per_unit);
    if units < 2 {
        return Err(Error::invalid(format!(
            "need at least {} paths for a confidence interval",
            2 * per_unit
        )));
    }
    let pts = t.points();
    let kl_total: f64 = (1..pts.len()).map(|k| kl_raw(&pts[k], &pts[k - 1])).sum();

    let run = || -> Vec<(f64, f64)> {
        (0..units as u64)
            .into_par_iter()
            .map(|j| {
                let a = path_log_value(t, m, kl_total, opts.ordering, opts.seed, j, 1.0);
                let b = if opts.antithetic {
                    path_log_value(t, m, kl_total, opts.ordering, opts.seed, j, -1.0)
                } else {
                    a
                };
                (a, b)
            })
            .collect()
    };
    let logs = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let n = units as f64;
    let shift = logs.iter().map(|(a, b)| a.max(*b)).fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::NonFinite("simulated log value".into()));
    }
    let ys: Vec<f64> = logs
        .iter()
        .map(|(a, b)| 0.5 * ((a - shift).exp() + (b - shift).exp()))
        .collect();
    let (y_mean, y_sd) = mean_sd(&ys);
    let mean_log_loss = -(shift + y_mean.ln());
    let ci95_halfwidth = Z95 * y_sd / (y_mean * n.sqrt());

    let losses: Vec<f64> = logs.iter().map(|(a, b)| -0.5 * (a + b)).collect();
    let (l_mean, l_sd) = mean_sd(&losses);

    Ok(SimResult {
        mean_log_loss,
        ci95_halfwidth,
        n_paths: units * per_unit,
        seed: opts.seed,
        mean_path_log_loss: l_mean,
        path_log_loss_ci95: Z95 * l_sd / n.sqrt(),
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.iter().all(|x| *x == xs[0]) {
        return (xs[0], 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Monte-Carlo cost of the `method` trajectory with `f` steps.
pub fn monte_carlo_cost(
    w_start: &WeightVector,
    w_end: &WeightVector,
    f: usize,
    method: Method,
    m: &MarketParams,
    n_paths: usize,
    seed: u64,
) -> Result<SimResult> {
    let t = interpolate(method, w_start, w_end, f)?;
    monte_carlo_trajectory(&t, m, &McOptions::new(n_paths, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::evaluate_trajectory;
    use crate::interpolation::slerp_path;
    use crate::simplex::LossKernelKind;
    use crate::stochastic::market::DT_BLOCK_12S;
    use crate::stochastic::paths::sample_paths;

    fn wv(x: &[f64]) -> WeightVector {
        WeightVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn constant_prices_reduce_to_kl() {
        let t = slerp_path(&wv(&[0.05, 0.55, 0.40]), &wv(&[0.40, 0.50, 0.10]), 40).unwrap();
        let out = simulate_rebalance(&t, &PricePath::constant(3, 40), Ordering::Simultaneous).unwrap();
        let r = evaluate_trajectory(&t, LossKernelKind::ExactKl);
        assert!((out.log_value_change + r.total).abs() < 1e-15);
        assert_eq!(out.price_component, 0.0);
        assert!(simulate_rebalance(&t, &PricePath::constant(3, 39), Ordering::Simultaneous).is_err());
    }

    #[test]
    fn orderings_differ_by_abel_term() {
        let m = MarketParams::uncorrelated(vec![0.04, 0.02, 0.0], DT_BLOCK_12S).unwrap();
        let t = slerp_path(&wv(&[0.05, 0.55, 0.40]), &wv(&[0.40, 0.50, 0.10]), 30).unwrap();
        for p in sample_paths(&m, 30, 10, 5) {
            let a = simulate_rebalance(&t, &p, Ordering::Simultaneous).unwrap();
            let b = simulate_rebalance(&t, &p, Ordering::PriceThenWeight).unwrap();
            assert_eq!(a.kl_component.to_bits(), b.kl_component.to_bits());
            let gap = a.log_value_change - b.log_value_change;
            assert!((gap - abel_residual(&t, &p).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_vol_mc_is_exact() {
        let m = MarketParams::uncorrelated(vec![0.0, 0.0], DT_BLOCK_12S).unwrap();
        let (a, b) = (wv(&[0.5, 0.5]), wv(&[0.7, 0.3]));
        let r = monte_carlo_cost(&a, &b, 25, Method::Slerp, &m, 20, 3).unwrap();
        let t = slerp_path(&a, &b, 25).unwrap();
        let want: f64 = t.points().windows(2).map(|p| kl_raw(&p[1], &p[0])).sum();
        assert_eq!(r.mean_log_loss, want);
        assert_eq!(r.ci95_halfwidth, 0.0);
        assert_eq!(r.path_log_loss_ci95, 0.0);
    }

    #[test]
    fn mc_is_thread_count_independent() {
        let m = MarketParams::single_volatile(2, 0.03, DT_BLOCK_12S).unwrap();
        let t = slerp_path(&wv(&[0.5, 0.5]), &wv(&[0.7, 0.3]), 100).unwrap();
        let mut o = McOptions::new(64, 99);
        o.threads = Some(1);
        let one = monte_carlo_trajectory(&t, &m, &o).unwrap();
        o.threads = Some(4);
        let four = monte_carlo_trajectory(&t, &m, &o).unwrap();
        assert_eq!(one, four);
        assert!(monte_carlo_trajectory(&t, &m, &McOptions::new(2, 1)).is_err());
    }

    #[test]
    fn single_block_expected_value_identity() {
        // E[exp(sum w_i ln(P'_i / P_i))] = exp(-l(w) dt) for GBM
        let sigma = 0.2;
        let dt = 0.05;
        let m = MarketParams::equicorrelated(vec![sigma, 0.5 * sigma], 0.3, dt).unwrap();
        let w = [0.35, 0.65];
        let n = 200_000u64;
        let vals: Vec<f64> = (0..n)
            .map(|j| {
                let mut g = ShockGenerator::new(&m, 17, j, 1.0);
                let mut inc = [0.0; 2];
                g.next_block(&mut inc);
                (w[0] * inc[0] + w[1] * inc[1]).exp()
            })
            .collect();
        let (mean, sd) = mean_sd(&vals);
        let want = (-crate::stochastic::lvr_rate(&w, &m).unwrap() * dt).exp();
        assert!((mean - want).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean} {want}");
    }
}
