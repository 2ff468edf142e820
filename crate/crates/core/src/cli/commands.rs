//! One function per subcommand. Each returns the text it wants written;
//! `mod.rs` decides where it goes.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::cost::{analytic_slerp_cost, evaluate_trajectory};
use crate::dynamics::{boundary_layer_width, greens_correction, guardrail_ratio, solve_pendulum, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::fees::{f_threshold, fee_adjusted_optimal_f, price_arb_rate, sawtooth_blocks, FeeAdjustedOptimum, ThresholdMode};
use crate::interpolation::{interpolate, slerp_path, Method, Trajectory};
use crate::optimize::{optimize_from_slerp, PathObjective};
use crate::simplex::{geodesic_angle, LossKernelKind};
use crate::stochastic::{
    analytic_cost, lambda_star, mean_lvr_along_path, monte_carlo_trajectory, optimal_step_count, read_price_csv,
    replay_rebalance, round_steps, sample_paths, write_price_csv, McOptions, ReplayReport,
};

use super::config::{ObjectiveName, PlanConfig};
use super::output::{float, to_json, Table};
use super::Format;

/// Default guardrail: at most 5% of a weight per block.
const DEFAULT_GUARDRAIL_CAP: f64 = 0.05;
const DEFAULT_PATHS: usize = 2000;

pub struct Rendered {
    pub body: String,
    /// Short summary for stderr when the body is CSV.
    pub notes: Vec<(String, f64)>,
}

fn cell(x: f64) -> String {
    format!("{x:?}")
}

fn render(format: Format, json: Value, table: impl FnOnce() -> Table, notes: Vec<(String, f64)>) -> Result<Rendered> {
    match format {
        Format::Json => Ok(Rendered { body: to_json(&json)?, notes: Vec::new() }),
        Format::Csv => {
            let mut buf = Vec::new();
            table().write(&mut buf)?;
            Ok(Rendered {
                body: String::from_utf8(buf).expect("csv is utf-8"),
                notes,
            })
        }
    }
}

fn trajectory_table(t: &Trajectory) -> Table {
    let mut tab = Table::new(std::iter::once("step".to_string()).chain((0..t.n_tokens()).map(|i| format!("w{i}"))));
    for (k, p) in t.points().iter().enumerate() {
        tab.push(std::iter::once(k.to_string()).chain(p.iter().map(|x| cell(*x))).collect());
    }
    tab
}

fn points_json(t: &Trajectory) -> Value {
    json!(t.points().iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>())
}

pub fn plan(c: &PlanConfig) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let f = c.steps()?;
    let method = c.method();
    let t = interpolate(method, &a, &b, f)?;
    let omega = geodesic_angle(&a, &b)?;
    let analytic = analytic_slerp_cost(omega, f);
    let j = json!({
        "method": method.name(),
        "f": f,
        "omega": omega,
        "step_angle": omega / f as f64,
        "analytic_total": analytic,
        "points": points_json(&t),
    });
    let notes = vec![
        ("omega".into(), omega),
        ("step_angle".into(), omega / f as f64),
        ("analytic_total".into(), analytic),
    ];
    render(c.format(), j, || trajectory_table(&t), notes)
}

pub fn cost(c: &PlanConfig, per_step: bool) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let f = c.steps()?;
    let methods = c.methods.clone().unwrap_or_else(|| Method::HEURISTICS.to_vec());
    if methods.is_empty() {
        return Err(Error::invalid("cost needs at least one method"));
    }
    let kernel = c.kernel.unwrap_or(LossKernelKind::ExactKl);
    let reports = methods
        .iter()
        .map(|&m| Ok((m, evaluate_trajectory(&interpolate(m, &a, &b, f)?, kernel))))
        .collect::<Result<Vec<_>>>()?;
    let j = json!({
        "f": f,
        "kernel": kernel.name(),
        "methods": reports.iter().map(|(m, r)| json!({
            "method": m.name(),
            "total": r.total,
            "retained_fraction": r.retained_fraction,
            "std_over_mean": r.std_over_mean,
            "per_step": r.per_step,
        })).collect::<Vec<_>>(),
    });
    render(
        c.format(),
        j,
        || {
            if per_step {
                let mut t = Table::new(std::iter::once("step").chain(methods.iter().map(|m| m.name())));
                for k in 0..f {
                    t.push(std::iter::once((k + 1).to_string()).chain(reports.iter().map(|(_, r)| cell(r.per_step[k]))).collect());
                }
                t
            } else {
                let mut t = Table::new(["method", "total", "retained_fraction", "std_over_mean"]);
                for (m, r) in &reports {
                    t.push(vec![m.name().into(), cell(r.total), cell(r.retained_fraction), cell(r.std_over_mean)]);
                }
                t
            }
        },
        Vec::new(),
    )
}

pub fn steps(c: &PlanConfig) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let m = c.market(a.len())?;
    let fee = c.fee_params()?;
    let dt = m.dt_block();
    let omega = geodesic_angle(&a, &b)?;
    let mean_lvr = mean_lvr_along_path(&a, &b, &m)?;
    let sigma = m.sigma_max();
    let w_min = a.min_weight().min(b.min_weight());
    let f_thr = f_threshold(omega, w_min, fee.gamma, ThresholdMode::WorstCase)?;
    let f_thr_typ = f_threshold(omega, w_min, fee.gamma, ThresholdMode::Typical { n_tokens: a.len() })?;
    let nu = price_arb_rate(sigma, dt, fee.gamma)?;
    let cap = c.guardrail_cap.unwrap_or(DEFAULT_GUARDRAIL_CAP);

    let mut report = serde_json::Map::new();
    let mut put = |k: &str, v: Value| {
        report.insert(k.to_string(), v);
    };
    put("omega", json!(omega));
    put("mean_lvr", json!(mean_lvr));
    put("sigma_max_daily", json!(sigma));
    put("dt_block", json!(dt));
    put("w_min", json!(w_min));
    put("f_threshold_worst_case", json!(f_thr));
    put("f_threshold_typical", json!(f_thr_typ));
    put("nu", json!(nu));
    put("inv_nu", if nu > 0.0 { json!(1.0 / nu) } else { Value::Null });
    put("guardrail_ratio", json!(guardrail_ratio(sigma, dt, cap)?));
    match optimal_step_count(omega, mean_lvr, dt) {
        Ok(opt) => {
            put("regime", json!("lvr_limited"));
            put("f_star", json!(opt.f_star));
            put("f_star_rounded", json!(round_steps(opt.f_star)));
            put("min_cost", json!(opt.min_cost));
            put("lambda_star", json!(lambda_star(sigma, mean_lvr)?));
            put("n_tooth", json!(sawtooth_blocks(opt.f_star, f_thr)?));
            put("boundary_layer_width", json!(boundary_layer_width(opt.f_star, opt.f_star * dt, sigma)));
        }
        Err(Error::NoFiniteOptimum(_)) => {
            put("regime", json!("constant_price_maximize_f"));
            for k in ["f_star", "f_star_rounded", "min_cost", "lambda_star", "n_tooth", "boundary_layer_width"] {
                put(k, Value::Null);
            }
        }
        Err(e) => return Err(e),
    }
    match fee_adjusted_optimal_f(omega, mean_lvr, dt, &fee, f_thr) {
        FeeAdjustedOptimum::Finite { f_star, capped } => {
            put("f_star_phi", json!(f_star));
            put("f_star_phi_capped", json!(capped));
        }
        FeeAdjustedOptimum::NoFiniteOptimum => {
            put("f_star_phi", json!("no_finite_optimum"));
            put("f_star_phi_capped", Value::Null);
        }
    }
    let report = Value::Object(report);
    render(
        c.format(),
        report.clone(),
        || {
            let mut t = Table::new(["key", "value"]);
            if let Value::Object(map) = &report {
                let mut keys: Vec<_> = map.keys().collect();
                keys.sort();
                for k in keys {
                    let v = match &map[k] {
                        Value::Number(n) if n.is_f64() => n.as_f64().map(cell).unwrap_or_default(),
                        Value::Number(n) => n.to_string(),
                        Value::String(s) => s.clone(),
                        Value::Bool(b) => b.to_string(),
                        _ => String::new(),
                    };
                    t.push(vec![k.clone(), v]);
                }
            }
            t
        },
        Vec::new(),
    )
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("REBAL_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(|n| Some(n.max(1)))
            .map_err(|_| Error::invalid(format!("REBAL_THREADS='{s}' is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn replay_table(r: &ReplayReport) -> Table {
    let mut t = Table::new(["step", "kl", "price_term", "cumulative"]);
    for s in &r.steps {
        t.push(vec![s.step.to_string(), cell(s.kl), cell(s.price_term), cell(s.cumulative)]);
    }
    t
}

fn replay_json(r: &ReplayReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

pub fn simulate(c: &PlanConfig) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let m = c.market(a.len())?;
    let method = c.method();
    let seed = c.seed();
    let sim = &c.simulate;

    if sim.single_path {
        let f = c.steps()?;
        let t = interpolate(method, &a, &b, f)?;
        let prices = sample_paths(&m, f, 1, seed).pop().expect("one path");
        if let Some(p) = &sim.prices_out {
            let file = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            write_price_csv(file, &prices)?;
        }
        let r = replay_rebalance(&t, &prices, sim.ordering)?;
        return render(c.format(), replay_json(&r), || replay_table(&r), vec![("log_value_change".into(), r.log_value_change)]);
    }

    let omega = geodesic_angle(&a, &b)?;
    let mean_lvr = mean_lvr_along_path(&a, &b, &m)?;
    let dt = m.dt_block();
    let grid: Vec<usize> = match (&sim.f_grid, c.f, c.depth) {
        (Some(g), _, _) => g.clone(),
        (None, Some(_), _) | (None, _, Some(_)) => vec![c.steps()?],
        (None, None, None) => {
            let fs = optimal_step_count(omega, mean_lvr, dt)
                .map_err(|_| Error::invalid("no LVR: give f or simulate.f_grid explicitly"))?
                .f_star;
            [0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|k| round_steps(k * fs)).collect()
        }
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(Error::invalid("step grid must be non-empty and positive"));
    }
    let opts = McOptions {
        n_paths: sim.n_paths.unwrap_or(DEFAULT_PATHS),
        seed,
        antithetic: sim.antithetic,
        ordering: sim.ordering,
        threads: threads_from_env()?,
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &f in &grid {
        let t = interpolate(method, &a, &b, f)?;
        let r = monte_carlo_trajectory(&t, &m, &opts)?;
        rows.push((f, r, analytic_cost(f as f64, omega, mean_lvr, dt).total));
    }
    let j = json!({
        "method": method.name(),
        "model": m.model().name(),
        "seed": seed,
        "n_paths": opts.n_paths,
        "omega": omega,
        "mean_lvr": mean_lvr,
        "rows": rows.iter().map(|(f, r, an)| json!({
            "f": f,
            "mc_mean": r.mean_log_loss,
            "ci95": r.ci95_halfwidth,
            "analytic": an,
            "mean_path_log_loss": r.mean_path_log_loss,
            "path_log_loss_ci95": r.path_log_loss_ci95,
        })).collect::<Vec<_>>(),
    });
    render(
        c.format(),
        j,
        || {
            let mut t = Table::new(["f", "mc_mean", "ci95", "analytic"]);
            for (f, r, an) in &rows {
                t.push(vec![f.to_string(), cell(r.mean_log_loss), cell(r.ci95_halfwidth), cell(*an)]);
            }
            t
        },
        Vec::new(),
    )
}

pub fn optimize(c: &PlanConfig) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let f = c.steps()?;
    let objective = match c.optimize.objective {
        ObjectiveName::ExactKl => PathObjective::ExactKl,
        ObjectiveName::KlPlusLvr => {
            let market = c.market(a.len())?;
            let horizon_days = c.optimize.horizon_days.unwrap_or(f as f64 * market.dt_block());
            PathObjective::KlPlusLvr { market, horizon_days }
        }
        ObjectiveName::Jacobi => PathObjective::Jacobi { market: c.market(a.len())? },
    };
    let r = optimize_from_slerp(&a, &b, f, &objective, &c.optimize_options())?;
    let slerp = slerp_path(&a, &b, f)?;
    let max_dw = r
        .trajectory
        .points()
        .iter()
        .zip(slerp.points())
        .flat_map(|(p, q)| p.iter().zip(q.iter()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let kl_init = evaluate_trajectory(&slerp, LossKernelKind::ExactKl);
    let kl_final = evaluate_trajectory(&r.trajectory, LossKernelKind::ExactKl);
    let j = json!({
        "objective": objective.name(),
        "f": f,
        "initial_objective": r.initial_objective,
        "objective_value": r.objective_value,
        "improvement_vs_init": r.improvement_vs_init,
        "iterations": r.iterations,
        "converged": r.converged,
        "gradient_norm": r.gradient_norm,
        "max_abs_dw_vs_slerp": max_dw,
        "retained_fraction_init": kl_init.retained_fraction,
        "retained_fraction_final": kl_final.retained_fraction,
        "points": points_json(&r.trajectory),
    });
    let notes = vec![
        ("initial_objective".into(), r.initial_objective),
        ("objective_value".into(), r.objective_value),
        ("max_abs_dw_vs_slerp".into(), max_dw),
    ];
    render(c.format(), j, || trajectory_table(&r.trajectory), notes)
}

pub fn pendulum(c: &PlanConfig) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    if a.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: a.len() });
    }
    let th_s = a[0].sqrt().asin();
    let th_e = b[0].sqrt().asin();
    let mu = match c.pendulum.mu {
        Some(mu) => mu,
        None => {
            let m = c.market(2)?;
            let f = c.steps()? as f64;
            let horizon = c.pendulum.horizon_days.unwrap_or(f * m.dt_block());
            crate::dynamics::pendulum_mu(f, horizon, m.sigma_max())
        }
    };
    let grid = c.pendulum.grid.unwrap_or(DEFAULT_GRID);
    let sol = solve_pendulum(th_s, th_e, mu, grid)?;
    let s = sol.s_grid();
    let eps = greens_correction(th_s, th_e - th_s, mu, &s)?;
    let affine: Vec<f64> = s.iter().map(|s| th_s + (th_e - th_s) * s).collect();
    let greens: Vec<f64> = affine.iter().zip(&eps).map(|(x, e)| x + e).collect();
    let w = sol.weights();
    let max_dev = sol.theta.iter().zip(&affine).map(|(t, x)| (t - x).abs()).fold(0.0, f64::max);
    let j = json!({
        "mu": mu,
        "grid": grid,
        "iterations": sol.iterations,
        "residual_norm": sol.residual_norm,
        "max_deviation_from_affine": max_dev,
        "s": s,
        "theta_bvp": sol.theta,
        "theta_greens": greens,
        "w": w,
    });
    let notes = vec![("mu".into(), mu), ("max_deviation_from_affine".into(), max_dev)];
    render(
        c.format(),
        j,
        || {
            let mut t = Table::new(["s", "theta_bvp", "theta_greens", "w"]);
            for i in 0..s.len() {
                t.push(vec![cell(s[i]), cell(sol.theta[i]), cell(greens[i]), cell(w[i])]);
            }
            t
        },
        notes,
    )
}

pub fn replay(c: &PlanConfig, csv_path: &Path) -> Result<Rendered> {
    let (a, b) = c.endpoints()?;
    let file = File::open(csv_path).map_err(|e| Error::Io(format!("{}: {e}", csv_path.display())))?;
    let prices = read_price_csv(file)?;
    let f = if c.f.is_some() || c.depth.is_some() { c.steps()? } else { prices.n_blocks() };
    let t = interpolate(c.method(), &a, &b, f)?;
    let r = replay_rebalance(&t, &prices, c.simulate.ordering)?;
    render(c.format(), replay_json(&r), || replay_table(&r), vec![("log_value_change".into(), r.log_value_change)])
}

pub fn write_notes(w: &mut dyn Write, notes: &[(String, f64)]) -> Result<()> {
    for (k, v) in notes {
        writeln!(w, "# {k} = {}", float(*v))?;
    }
    Ok(())
}
