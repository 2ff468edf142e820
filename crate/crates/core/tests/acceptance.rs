//! Acceptance run: one PASS/FAIL line per criterion, each with its runtime
//! budget. Criteria listed in `KNOWN_DEVIATIONS` fail for documented
//! reasons (a quoted figure disagrees with its own closed form); they are
//! still checked and printed as FAIL, but do not abort the run. Any other
//! failure makes the process exit non-zero.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rebal::cost::evaluate_trajectory;
use rebal::dynamics::{greens_correction, jacobi_cost, solve_pendulum, DEFAULT_GRID};
use rebal::fees::{
    f_threshold, fee_adjusted_cost, fee_adjusted_optimal_f, price_arb_rate, sawtooth_blocks, FeeAdjustedOptimum,
    FeeParams, ThresholdMode,
};
use rebal::interpolation::{amgm_midpoint, bisection_path, interpolate, lambertw_midpoint, slerp_path};
use rebal::optimize::{optimize_from_slerp, OptimizeOptions, PathObjective};
use rebal::simplex::{geodesic_angle, kl_divergence, kl_kernel, pade_kernel, quadratic_kernel, retention_ratio};
use rebal::stochastic::{
    abel_residual, analytic_cost, annual_to_daily, mean_lvr_along_path, monte_carlo_trajectory, optimal_step_count,
    round_steps, sample_paths, simulate_rebalance, McOptions, Ordering, PriceModel, DT_BLOCK_12S,
};
use rebal::{suboptimality_bound, LossKernelKind, MarketParams, Method, WeightVector};

const KNOWN_DEVIATIONS: [usize; 2] = [7, 8];

type Outcome = Result<String, String>;

fn random_weights(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> WeightVector {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        if w.iter().all(|x| *x >= floor) {
            return WeightVector::new(w).expect("valid");
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn wv(x: &[f64]) -> WeightVector {
    WeightVector::new(x.to_vec()).expect("valid")
}

fn three_token_pair() -> (WeightVector, WeightVector) {
    (wv(&[0.05, 0.55, 0.40]), wv(&[0.40, 0.50, 0.10]))
}

fn two_token_market(sigma_daily: f64) -> MarketParams {
    MarketParams::single_volatile(2, sigma_daily, DT_BLOCK_12S).expect("valid market")
}

fn c1_midpoint_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for &n in &[2, 3, 5, 8] {
        for _ in 0..1000 {
            let a = random_weights(&mut rng, n, 1e-4);
            let b = random_weights(&mut rng, n, 1e-4);
            let t = slerp_path(&a, &b, 2).map_err(|e| e.to_string())?;
            worst = worst.max(max_abs_diff(&t.points()[1], &amgm_midpoint(&a, &b)));
        }
    }
    ensure(worst <= 1e-12, format!("max component error {worst:.2e}"))
}

fn c2_bisection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let a = random_weights(&mut rng, n, 1e-4);
        let b = random_weights(&mut rng, n, 1e-4);
        for depth in 1..=6u32 {
            let bis = bisection_path(&a, &b, depth).map_err(|e| e.to_string())?;
            let sl = slerp_path(&a, &b, 1 << depth).map_err(|e| e.to_string())?;
            for (p, q) in bis.points().iter().zip(sl.points()) {
                worst = worst.max(max_abs_diff(p, q));
            }
        }
    }
    ensure(worst <= 1e-10, format!("max per-point error {worst:.2e}"))
}

fn c3_retention() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=8);
        let a = random_weights(&mut rng, n, 1e-4);
        let b = random_weights(&mut rng, n, 1e-4);
        let r = retention_ratio(&a, &b).map_err(|e| e.to_string())?;
        let kl = kl_divergence(&b, &a).map_err(|e| e.to_string())?;
        worst = worst.max((-r.ln() - kl).abs());
    }
    ensure(worst <= 1e-12, format!("max |-ln r - KL| {worst:.2e}"))
}

fn c4_uniformity() -> Outcome {
    let (a, b) = three_token_pair();
    let targets = [(Method::Linear, 0.3236), (Method::Geometric, 0.2155), (Method::Amgm, 0.0860)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, target) in targets {
        let r = evaluate_trajectory(&interpolate(m, &a, &b, 1000).map_err(|e| e.to_string())?, LossKernelKind::ExactKl);
        ok &= (r.std_over_mean / target - 1.0).abs() <= 0.15;
        parts.push(format!("{} {:.4}", m.name(), r.std_over_mean));
    }
    let s = evaluate_trajectory(&slerp_path(&a, &b, 1000).map_err(|e| e.to_string())?, LossKernelKind::ExactKl);
    ok &= s.std_over_mean <= 0.001;
    parts.push(format!("slerp {:.2e}", s.std_over_mean));
    ensure(ok, parts.join(", "))
}

fn c5_brute_force() -> Outcome {
    let (a, b) = three_token_pair();
    let opts = OptimizeOptions::default();
    let r = optimize_from_slerp(&a, &b, 50, &PathObjective::ExactKl, &opts).map_err(|e| e.to_string())?;
    let before = (-r.initial_objective).exp();
    let after = evaluate_trajectory(&r.trajectory, LossKernelKind::ExactKl).retained_fraction;
    let r1000 = optimize_from_slerp(&a, &b, 1000, &PathObjective::ExactKl, &opts).map_err(|e| e.to_string())?;
    let ok = (before - 0.98904793).abs() <= 5e-8
        && (after - 0.98904806).abs() <= 5e-8
        && r1000.improvement_vs_init <= 1e-9
        && r1000.improvement_vs_init >= 0.0;
    ensure(
        ok,
        format!(
            "f=50 retained {before:.8} -> {after:.8}; f=1000 improvement {:.2e} nats",
            r1000.improvement_vs_init
        ),
    )
}

fn c6_gap_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fs = [8usize, 16, 32, 64];
    let mut gaps: Vec<Vec<f64>> = vec![Vec::new(); fs.len()];
    let mut bound_ok = true;
    let opts = OptimizeOptions { tol: 1e-13, ..OptimizeOptions::default() };
    let mut pairs = 0;
    while pairs < 20 {
        let a = random_weights(&mut rng, 3, 0.1);
        let b = random_weights(&mut rng, 3, 0.1);
        let eps = a.min_weight().min(b.min_weight());
        let omega = geodesic_angle(&a, &b).map_err(|e| e.to_string())?;
        // the bound needs f >= 4 Omega / eps for the smallest f
        if omega < 0.05 || 4.0 * omega / eps > fs[0] as f64 {
            continue;
        }
        pairs += 1;
        for (j, &f) in fs.iter().enumerate() {
            let r = optimize_from_slerp(&a, &b, f, &PathObjective::ExactKl, &opts).map_err(|e| e.to_string())?;
            let gap = r.improvement_vs_init;
            bound_ok &= gap <= suboptimality_bound(omega, f, 3, eps).map_err(|e| e.to_string())?;
            gaps[j].push(gap);
        }
    }
    let medians: Vec<f64> = gaps
        .iter_mut()
        .map(|g| {
            g.sort_by(|x, y| x.total_cmp(y));
            0.5 * (g[9] + g[10])
        })
        .collect();
    // least-squares slope of ln(median) against ln(f)
    let xs: Vec<f64> = fs.iter().map(|f| (*f as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|g| g.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let shown: Vec<String> = medians.iter().map(|g| format!("{g:.2e}")).collect();
    ensure(
        bound_ok && (slope + 3.0).abs() <= 0.5 && medians.iter().all(|g| *g > 0.0),
        format!("slope {slope:.3}, medians [{}], bound respected: {bound_ok}", shown.join(", ")),
    )
}

fn c7_lambert() -> Outcome {
    let a = WeightVector::two_token(0.5).map_err(|e| e.to_string())?;
    let b = WeightVector::two_token(0.9).map_err(|e| e.to_string())?;
    let slerp_mid = slerp_path(&a, &b, 2).map_err(|e| e.to_string())?.points()[1][0];
    let lw_mid = lambertw_midpoint(&a, &b).map_err(|e| e.to_string())?[0];

    let lo = WeightVector::two_token(0.01).map_err(|e| e.to_string())?;
    let hi = WeightVector::two_token(0.99).map_err(|e| e.to_string())?;
    let loss = |m: &WeightVector| kl_divergence(m, &lo).unwrap() + kl_divergence(&hi, m).unwrap();
    let opts = OptimizeOptions { w_floor: 1e-6, ..OptimizeOptions::default() };
    let best = optimize_from_slerp(&lo, &hi, 2, &PathObjective::ExactKl, &opts).map_err(|e| e.to_string())?;
    let s_ratio = loss(&slerp_path(&lo, &hi, 2).map_err(|e| e.to_string())?.points()[1]) / best.objective_value;
    let l_ratio = loss(&lambertw_midpoint(&lo, &hi).map_err(|e| e.to_string())?) / best.objective_value;

    let checks = [
        (slerp_mid - 0.729).abs() <= 0.001,
        (lw_mid - 0.717).abs() <= 0.001,
        (s_ratio / 1.178 - 1.0).abs() <= 0.05,
        (l_ratio / 1.053 - 1.0).abs() <= 0.05,
    ];
    ensure(
        checks.iter().all(|c| *c),
        format!(
            "midpoints slerp {slerp_mid:.7} (want 0.729), lambert {lw_mid:.7} (want 0.717); \
             w_min=0.01 ratios {s_ratio:.4} / {l_ratio:.4}; sub-checks {checks:?}"
        ),
    )
}

fn c8_optimal_steps() -> Outcome {
    let a = WeightVector::two_token(0.5).map_err(|e| e.to_string())?;
    let b = WeightVector::two_token(0.7).map_err(|e| e.to_string())?;
    let omega = geodesic_angle(&a, &b).map_err(|e| e.to_string())?;
    let lbar = mean_lvr_along_path(&a, &b, &two_token_market(0.03)).map_err(|e| e.to_string())?;
    let f_star = optimal_step_count(omega, lbar, DT_BLOCK_12S).map_err(|e| e.to_string())?.f_star;
    let mut grid = Vec::new();
    let mut grid_ok = true;
    for (ann, want) in [(0.3, 4574.0), (0.5, 2744.0), (0.8, 1715.0)] {
        let l = mean_lvr_along_path(&a, &b, &two_token_market(annual_to_daily(ann))).map_err(|e| e.to_string())?;
        let f = optimal_step_count(omega, l, DT_BLOCK_12S).map_err(|e| e.to_string())?.f_star;
        grid_ok &= (f / want - 1.0).abs() <= 0.01;
        grid.push(format!("{f:.0}"));
    }
    let checks = [
        (omega / 0.21 - 1.0).abs() <= 0.01,
        (lbar / 1.1e-4 - 1.0).abs() <= 0.10,
        (f_star / 2400.0 - 1.0).abs() <= 0.05,
        grid_ok,
    ];
    ensure(
        checks.iter().all(|c| *c),
        format!(
            "Omega {omega:.6} (want 0.21 +/- 1%), lbar {lbar:.3e}, f* {f_star:.1}, grid {}; sub-checks {checks:?}",
            grid.join("/")
        ),
    )
}

fn c9_monte_carlo() -> Outcome {
    let a = WeightVector::two_token(0.5).map_err(|e| e.to_string())?;
    let b = WeightVector::two_token(0.7).map_err(|e| e.to_string())?;
    let m = two_token_market(annual_to_daily(0.5));
    let omega = geodesic_angle(&a, &b).map_err(|e| e.to_string())?;
    let lbar = mean_lvr_along_path(&a, &b, &m).map_err(|e| e.to_string())?;
    let f_star = optimal_step_count(omega, lbar, DT_BLOCK_12S).map_err(|e| e.to_string())?.f_star;
    let grid: Vec<usize> = [0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|k| round_steps(k * f_star)).collect();
    let mut ok = true;
    let mut means = Vec::new();
    for &f in &grid {
        let t = slerp_path(&a, &b, f).map_err(|e| e.to_string())?;
        let r = monte_carlo_trajectory(&t, &m, &McOptions::new(2000, 2024)).map_err(|e| e.to_string())?;
        let an = analytic_cost(f as f64, omega, lbar, DT_BLOCK_12S).total;
        ok &= (r.mean_log_loss - an).abs() <= 2.0 * r.ci95_halfwidth;
        means.push((f, r.mean_log_loss, r.ci95_halfwidth, an));
    }
    let argmin = (0..means.len()).min_by(|&i, &j| means[i].1.total_cmp(&means[j].1)).unwrap_or(0);
    ok &= argmin.abs_diff(2) <= 1;
    let rows: Vec<String> = means.iter().map(|(f, mc, ci, an)| format!("{f}:{mc:.3e}+/-{ci:.1e} vs {an:.3e}")).collect();
    ensure(ok, format!("empirical min at f={}; {}", grid[argmin], rows.join(", ")))
}

fn c10_price_independence() -> Outcome {
    let (a, b) = three_token_pair();
    let t = slerp_path(&a, &b, 64).map_err(|e| e.to_string())?;
    let m = MarketParams::equicorrelated(vec![0.03, 0.05, 0.02], 0.3, DT_BLOCK_12S).map_err(|e| e.to_string())?;
    let mut bits = None;
    let mut same = true;
    let mut worst: f64 = 0.0;
    for p in sample_paths(&m, 64, 100, 10) {
        let s = simulate_rebalance(&t, &p, Ordering::Simultaneous).map_err(|e| e.to_string())?;
        let o = simulate_rebalance(&t, &p, Ordering::PriceThenWeight).map_err(|e| e.to_string())?;
        let b = s.kl_component.to_bits();
        same &= *bits.get_or_insert(b) == b && o.kl_component.to_bits() == b;
        let residual = abel_residual(&t, &p).map_err(|e| e.to_string())?;
        worst = worst.max(((s.log_value_change - o.log_value_change) - residual).abs());
    }
    ensure(
        same && worst <= 1e-15,
        format!("KL component bit-identical: {same}; max |ordering gap - Abel term| {worst:.1e}"),
    )
}

fn c11_fees() -> Outcome {
    let a = WeightVector::two_token(0.5).map_err(|e| e.to_string())?;
    let b = WeightVector::two_token(0.7).map_err(|e| e.to_string())?;
    let omega = geodesic_angle(&a, &b).map_err(|e| e.to_string())?;
    let lbar = mean_lvr_along_path(&a, &b, &two_token_market(0.03)).map_err(|e| e.to_string())?;
    let f_thr = f_threshold(omega, 0.3, 0.997, ThresholdMode::WorstCase).map_err(|e| e.to_string())?;
    let nu = price_arb_rate(0.03, DT_BLOCK_12S, 0.997).map_err(|e| e.to_string())?;
    let f_star = optimal_step_count(omega, lbar, DT_BLOCK_12S).map_err(|e| e.to_string())?.f_star;
    let tooth = sawtooth_blocks(f_star, f_thr).map_err(|e| e.to_string())?;
    let fee = FeeParams::new(0.997, 0.5, 1.0).map_err(|e| e.to_string())?;
    let c = |f: f64| fee_adjusted_cost(f, omega, lbar, DT_BLOCK_12S, &fee, f_thr);
    let jump = (c(f_thr * (1.0 + 1e-9)) - c(f_thr * (1.0 - 1e-9))).abs() / c(f_thr);
    let no_opt = [0.0, -0.1].iter().all(|&phi| {
        let fee = FeeParams::new(0.997, phi, 1.0).unwrap();
        fee_adjusted_optimal_f(omega, lbar, DT_BLOCK_12S, &fee, f_thr) == FeeAdjustedOptimum::NoFiniteOptimum
    });
    let ok = (f_thr / 510.0 - 1.0).abs() <= 0.02
        && (nu / 0.014 - 1.0).abs() <= 0.03
        && (tooth / 5.0 - 1.0).abs() <= 0.10
        && jump < 1e-8
        && no_opt;
    ensure(
        ok,
        format!("f_thr {f_thr:.1}, nu {nu:.5}, n_tooth {tooth:.2}, jump at f_thr {jump:.1e}, phi<=0 unbounded {no_opt}"),
    )
}

fn c12_pendulum() -> Outcome {
    let (ts, te) = (0.5f64.sqrt().asin(), 0.9f64.sqrt().asin());
    let dev = |mu: f64| -> Result<(f64, f64), String> {
        let sol = solve_pendulum(ts, te, mu, DEFAULT_GRID).map_err(|e| e.to_string())?;
        let s = sol.s_grid();
        let eps = greens_correction(ts, te - ts, mu, &s).map_err(|e| e.to_string())?;
        let (mut d, mut g) = (0.0f64, 0.0f64);
        for j in 0..s.len() {
            let line = ts + (te - ts) * s[j];
            d = d.max((sol.theta[j] - line).abs());
            g = g.max((sol.theta[j] - line - eps[j]).abs());
        }
        Ok((d, g))
    };
    let (d0, _) = dev(0.0)?;
    let mut bounded = true;
    for mu in [0.01, 0.1, 0.25, 0.5, 1.0] {
        bounded &= dev(mu)?.0 <= mu / 4.0;
    }
    let (_, g1) = dev(0.01)?;
    let (_, g4) = dev(0.04)?;
    let slope = (g4 / g1).ln() / 4f64.ln();
    ensure(
        d0 <= 1e-10 && bounded && (slope - 2.0).abs() <= 0.3,
        format!("mu=0 deviation {d0:.1e}, |theta - affine| <= mu/4: {bounded}, Green's gap slope {slope:.3}"),
    )
}

fn c13_jacobi() -> Outcome {
    let sigma = annual_to_daily(0.5);
    let interior = jacobi_cost(
        &WeightVector::two_token(0.5).map_err(|e| e.to_string())?,
        &WeightVector::two_token(0.7).map_err(|e| e.to_string())?,
        &two_token_market(sigma),
    )
    .map_err(|e| e.to_string())?;
    let m3 = MarketParams::uncorrelated(vec![sigma; 3], DT_BLOCK_12S).map_err(|e| e.to_string())?;
    let boundary = jacobi_cost(&wv(&[0.01, 0.01, 0.98]), &wv(&[0.49, 0.49, 0.02]), &m3).map_err(|e| e.to_string())?;
    let (si, sb) = (100.0 * interior.relative_saving, 100.0 * boundary.relative_saving);
    ensure(
        (si - 0.01).abs() <= 0.05 && (sb - 3.13).abs() <= 0.5,
        format!("interior saving {si:.4}%, boundary saving {sb:.3}%"),
    )
}

fn c14_non_gbm() -> Outcome {
    let a = WeightVector::two_token(0.5).map_err(|e| e.to_string())?;
    let b = WeightVector::two_token(0.7).map_err(|e| e.to_string())?;
    let gbm = two_token_market(annual_to_daily(0.5));
    let omega = geodesic_angle(&a, &b).map_err(|e| e.to_string())?;
    let lbar = mean_lvr_along_path(&a, &b, &gbm).map_err(|e| e.to_string())?;
    let f = round_steps(optimal_step_count(omega, lbar, DT_BLOCK_12S).map_err(|e| e.to_string())?.f_star);
    let an = analytic_cost(f as f64, omega, lbar, DT_BLOCK_12S).total;
    let t = slerp_path(&a, &b, f).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for model in [PriceModel::default_merton(), PriceModel::default_garch()] {
        let m = gbm.clone().with_model(model).map_err(|e| e.to_string())?;
        let r = monte_carlo_trajectory(&t, &m, &McOptions::new(2000, 14)).map_err(|e| e.to_string())?;
        ok &= (r.mean_log_loss - an).abs() <= 3.0 * r.ci95_halfwidth;
        parts.push(format!("{} {:.3e}+/-{:.1e}", model.name(), r.mean_log_loss, r.ci95_halfwidth));
    }
    ensure(ok, format!("f={f}, GBM analytic {an:.3e}; {}", parts.join(", ")))
}

fn c15_kernels() -> Outcome {
    let mut dominated = true;
    for k in -900..=900 {
        let u = k as f64 / 1000.0;
        let h = kl_kernel(u);
        dominated &= (pade_kernel(u) - h).abs() <= (quadratic_kernel(u) - h).abs();
    }
    let slope = |approx: fn(f64) -> f64| {
        let (u1, u2) = (0.02, 0.01);
        let e1 = (approx(u1) - kl_kernel(u1)).abs();
        let e2 = (approx(u2) - kl_kernel(u2)).abs();
        (e1 / e2).ln() / (u1 / u2).ln()
    };
    let (sq, sp) = (slope(quadratic_kernel), slope(pade_kernel));
    ensure(
        dominated && (sq - 3.0).abs() <= 0.2 && (sp - 5.0).abs() <= 0.2,
        format!("Pade dominates on |u|<=0.9: {dominated}; error slopes quadratic {sq:.3}, Pade {sp:.3}"),
    )
}

fn main() {
    let criteria: [(usize, &str, Duration, fn() -> Outcome); 15] = [
        (1, "midpoint identity", Duration::from_secs(1), c1_midpoint_identity),
        (2, "bisection equals SLERP", Duration::from_secs(1), c2_bisection),
        (3, "KL / retention identity", Duration::from_secs(1), c3_retention),
        (4, "loss uniformity table", Duration::from_secs(5), c4_uniformity),
        (5, "brute-force near-optimality", Duration::from_secs(120), c5_brute_force),
        (6, "gap scaling", Duration::from_secs(300), c6_gap_scaling),
        (7, "Lambert-W midpoint", Duration::from_secs(30), c7_lambert),
        (8, "optimal step count", Duration::from_secs(1), c8_optimal_steps),
        (9, "Monte-Carlo validation", Duration::from_secs(600), c9_monte_carlo),
        (10, "price independence and telescoping", Duration::from_secs(10), c10_price_independence),
        (11, "fee economics", Duration::from_secs(1), c11_fees),
        (12, "pendulum", Duration::from_secs(30), c12_pendulum),
        (13, "Jacobi savings", Duration::from_secs(10), c13_jacobi),
        (14, "non-GBM robustness", Duration::from_secs(300), c14_non_gbm),
        (15, "kernel hierarchy", Duration::from_secs(1), c15_kernels),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && KNOWN_DEVIATIONS.contains(&id) { " [known deviation]" } else { "" };
        println!(
            "{tag} {id:>2} {name} ({:.3}s / {}s budget{}){note}: {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", OVER BUDGET" }
        );
        if ok {
            passed += 1;
        } else if !KNOWN_DEVIATIONS.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("{passed}/15 criteria passed");
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
