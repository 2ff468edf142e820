//! Two-token dynamics under LVR forcing.
//!
//! With `theta = arcsin(sqrt(w))` the two-token cost-plus-LVR problem
//! becomes the pendulum boundary-value problem `theta'' = mu sin(4 theta)`
//! on `s in [0, 1]`, with `mu = f T sigma^2 / 16`. At `mu = 0` the solution
//! is the straight line in `theta`, i.e. SLERP.

use serde::Serialize;

use crate::error::{check_dims, Error, Result};
use crate::interpolation::slerp_point;
use crate::quadrature::{simpson_unit, DEFAULT_INTERVALS};
use crate::simplex::{angle_raw, WeightVector};
use crate::stochastic::{lvr_rate, mean_lvr_along_path, optimal_step_count, MarketParams};

pub const DEFAULT_GRID: usize = 512;
const NEWTON_MAX_ITER: usize = 100;
const RESIDUAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PendulumSolution {
    /// Angles at `s_j = j / M`, `j = 0..=M`.
    pub theta: Vec<f64>,
    pub mu: f64,
    /// Largest residual of the discrete equations
    /// `theta_{j-1} - 2 theta_j + theta_{j+1} - h^2 mu sin(4 theta_j)`.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl PendulumSolution {
    pub fn grid_intervals(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn s_grid(&self) -> Vec<f64> {
        let m = self.grid_intervals() as f64;
        (0..self.theta.len()).map(|j| j as f64 / m).collect()
    }

    /// Pool weight of the first token, `sin^2 theta`.
    pub fn weights(&self) -> Vec<f64> {
        self.theta.iter().map(|t| t.sin().powi(2)).collect()
    }
}

fn residuals(theta: &[f64], mu: f64, h2: f64, out: &mut [f64]) -> f64 {
    let m = theta.len() - 1;
    let mut worst: f64 = 0.0;
    for j in 1..m {
        let r = theta[j - 1] - 2.0 * theta[j] + theta[j + 1] - h2 * mu * (4.0 * theta[j]).sin();
        out[j] = r;
        worst = worst.max(r.abs());
    }
    worst
}

/// Thomas algorithm for a tridiagonal system with unit off-diagonals.
fn solve_unit_tridiagonal(diag: &[f64], rhs: &mut [f64]) -> bool {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    if d == 0.0 {
        return false;
    }
    c[0] = 1.0 / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - c[i - 1];
        if d == 0.0 || !d.is_finite() {
            return false;
        }
        c[i] = 1.0 / d;
        rhs[i] = (rhs[i] - rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    true
}

fn newton(theta: &mut [f64], mu: f64, iterations: &mut usize) -> Result<f64> {
    let m = theta.len() - 1;
    let h2 = 1.0 / (m * m) as f64;
    let mut r = vec![0.0; m + 1];
    let mut norm = residuals(theta, mu, h2, &mut r);
    let mut trial = theta.to_vec();
    let mut r_trial = vec![0.0; m + 1];
    for _ in 0..NEWTON_MAX_ITER {
        if norm <= RESIDUAL_TOL {
            return Ok(norm);
        }
        *iterations += 1;
        let diag: Vec<f64> = (1..m).map(|j| -2.0 - 4.0 * h2 * mu * (4.0 * theta[j]).cos()).collect();
        let mut step: Vec<f64> = (1..m).map(|j| -r[j]).collect();
        if !solve_unit_tridiagonal(&diag, &mut step) {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            trial.copy_from_slice(theta);
            for j in 1..m {
                trial[j] += lambda * step[j - 1];
            }
            let n_trial = residuals(&trial, mu, h2, &mut r_trial);
            if n_trial < norm || n_trial <= RESIDUAL_TOL {
                theta.copy_from_slice(&trial);
                std::mem::swap(&mut r, &mut r_trial);
                norm = n_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= RESIDUAL_TOL {
        Ok(norm)
    } else {
        Err(Error::NoConvergence {
            iterations: *iterations,
            residual: norm,
        })
    }
}

/// Solve `theta'' = mu sin(4 theta)`, `theta(0) = theta_start`, `theta(1) = theta_end`
/// by central-difference collocation on `grid` intervals and damped Newton.
///
/// For `mu > 1` the forcing is ramped up from `0.01` by doubling, each stage
/// starting from the previous solution.
pub fn solve_pendulum(theta_start: f64, theta_end: f64, mu: f64, grid: usize) -> Result<PendulumSolution> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    for th in [theta_start, theta_end] {
        if !(th > 0.0 && th < half_pi) {
            return Err(Error::invalid(format!("boundary angle {th} outside (0, pi/2)")));
        }
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("forcing {mu} must be finite and >= 0")));
    }
    if grid < 16 {
        return Err(Error::invalid(format!("grid needs at least 16 intervals, got {grid}")));
    }
    let mut theta: Vec<f64> = (0..=grid)
        .map(|j| theta_start + (theta_end - theta_start) * j as f64 / grid as f64)
        .collect();
    theta[grid] = theta_end;

    let mut schedule = Vec::new();
    if mu > 1.0 {
        let mut stage = 0.01;
        while stage < mu {
            schedule.push(stage);
            stage *= 2.0;
        }
    }
    schedule.push(mu);

    let mut iterations = 0;
    let mut residual = 0.0;
    for stage in schedule {
        residual = newton(&mut theta, stage, &mut iterations)?;
    }
    Ok(PendulumSolution {
        theta,
        mu,
        residual_norm: residual,
        iterations,
    })
}

/// Forcing strength `mu = f T sigma^2 / 16`.
pub fn pendulum_mu(f: f64, horizon_days: f64, sigma_daily: f64) -> f64 {
    f * horizon_days * sigma_daily * sigma_daily / 16.0
}

/// Boundary-layer width `delta = 4 / sqrt(f T sigma^2)` of the large-forcing regime.
pub fn boundary_layer_width(f: f64, horizon_days: f64, sigma_daily: f64) -> f64 {
    4.0 / (f * horizon_days * sigma_daily * sigma_daily).sqrt()
}

/// First-order correction `eps(s)` to the straight line `theta_start + delta_theta s`.
///
/// Solves `eps'' = mu sin(4 theta_0(s))` with `eps(0) = eps(1) = 0` in
/// closed form; equivalently `eps = -mu int G(s, s') sin(4 theta_0(s')) ds'`
/// with `G(s, s') = min(s, s') (1 - max(s, s'))`. The correction pushes the
/// path away from `pi/4` (where LVR peaks) and `|eps| <= mu / 8`.
pub fn greens_correction(theta_start: f64, delta_theta: f64, mu: f64, s_grid: &[f64]) -> Result<Vec<f64>> {
    if !(mu >= 0.0) {
        return Err(Error::invalid("forcing must be non-negative"));
    }
    if let Some(s) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::invalid(format!("grid point {s} outside [0, 1]")));
    }
    let a = 4.0 * theta_start;
    let b = 4.0 * delta_theta;
    if mu == 0.0 {
        return Ok(vec![0.0; s_grid.len()]);
    }
    Ok(s_grid
        .iter()
        .map(|&s| {
            if s == 0.0 || s == 1.0 {
                return 0.0;
            }
            let bracket = if b.abs() >= 1.0 {
                ((a + b * s).sin() - a.sin() - s * ((a + b).sin() - a.sin())) / (b * b)
            } else {
                // sum_{n>=2} sin^{(n)}(a) / n! * b^{n-2} (s^n - s)
                let mut acc = 0.0;
                let mut fact = 1.0;
                let mut bpow = 1.0;
                let mut spow = s;
                for n in 2..40 {
                    fact *= n as f64;
                    spow *= s;
                    let deriv = (a + n as f64 * std::f64::consts::FRAC_PI_2).sin();
                    let term = deriv / fact * bpow * (spow - s);
                    acc += term;
                    if n > 4 && term.abs() < 1e-18 * acc.abs() {
                        break;
                    }
                    bpow *= b;
                }
                acc
            };
            -mu * bracket
        })
        .collect())
}

/// Optimal traversal speed `sqrt(2 dt l)` (Fisher–Rao arc length per block)
/// at each curve parameter along the fixed SLERP curve.
pub fn jacobi_speed_profile(w_start: &WeightVector, w_end: &WeightVector, m: &MarketParams, s_grid: &[f64]) -> Result<Vec<f64>> {
    check_dims(m.n_assets(), w_start.len())?;
    s_grid
        .iter()
        .map(|&s| {
            let p = slerp_point(w_start, w_end, s)?;
            Ok((2.0 * m.dt_block() * lvr_rate(&p, m)?).sqrt())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiCost {
    /// Cost with speed adapted to the local LVR rate.
    pub variable_speed: f64,
    /// `C(f*)` at constant speed.
    pub constant_speed: f64,
    /// `(constant - variable) / constant`.
    pub relative_saving: f64,
    pub omega: f64,
    pub mean_lvr: f64,
}

/// Cost of traversing the SLERP curve at the LVR-optimal variable speed,
/// compared with the constant-speed optimum.
pub fn jacobi_cost(w_start: &WeightVector, w_end: &WeightVector, m: &MarketParams) -> Result<JacobiCost> {
    check_dims(m.n_assets(), w_start.len())?;
    check_dims(w_start.len(), w_end.len())?;
    let omega = angle_raw(w_start, w_end);
    let mean_lvr = mean_lvr_along_path(w_start, w_end, m)?;
    let constant_speed = optimal_step_count(omega, mean_lvr, m.dt_block())?.min_cost;
    let dt = m.dt_block();
    let mut failure = None;
    let avg_speed = simpson_unit(
        |s| match slerp_point(w_start, w_end, s) {
            Ok(p) => (2.0 * dt * lvr_rate(&p, m).unwrap_or(0.0)).sqrt(),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        DEFAULT_INTERVALS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    // Fisher–Rao length of the curve is 2 Omega.
    let variable_speed = 2.0 * omega * avg_speed;
    Ok(JacobiCost {
        variable_speed,
        constant_speed,
        relative_saving: if constant_speed > 0.0 {
            (constant_speed - variable_speed) / constant_speed
        } else {
            0.0
        },
        omega,
        mean_lvr,
    })
}

/// LVR-optimal speed relative to a guardrail cap `u_max` on per-block weight change.
pub fn guardrail_ratio(sigma_daily: f64, dt_block: f64, u_max: f64) -> Result<f64> {
    if !(u_max > 0.0) {
        return Err(Error::invalid("speed cap must be positive"));
    }
    Ok(sigma_daily * dt_block.sqrt() / u_max)
}
