//! Brute-force path optimiser over all interior weight vectors.
//!
//! The variables are the `f - 1` interior points of a trajectory, each kept
//! on the simplex with a per-component floor. Two solvers share one loop:
//!
//! - projected gradient with Armijo backtracking and exact Euclidean
//!   projection onto `{w >= floor, sum w = 1}`;
//! - a damped Newton step in reduced coordinates (last component
//!   eliminated). The Hessian of every objective here couples only
//!   neighbouring points, so it is block tridiagonal; it is assembled by
//!   central differences of the analytic gradient using a three-colouring
//!   of the chain and solved by block Cholesky.
//!
//! Newton is attempted whenever no floor is close to binding and the
//! Hessian is positive definite; otherwise the loop takes a projected
//! gradient step. Projected gradient alone stalls on long trajectories
//! because the chain Hessian has condition number `O(f^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::interpolation::{slerp_path, Method, Trajectory};
use crate::linalg::{cholesky_pd, cholesky_solve};
use crate::simplex::{kl_raw, WeightVector, PLANNER_FLOOR};
use crate::stochastic::{lvr_gradient, MarketParams};

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// What the optimiser minimises.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathObjective {
    /// Total arbitrage loss `sum_k KL(w_k || w_{k-1})`.
    ExactKl,
    /// Arbitrage loss plus LVR accrued at each step's new weights,
    /// `(horizon / f) sum_{k=1}^{f} l(w_k)`.
    KlPlusLvr { market: MarketParams, horizon_days: f64 },
    /// Joint path-and-speed cost `sqrt(f sum_k 2 dt lbar_k L_k^2)`, where
    /// `L_k` is the Fisher–Rao chord of step `k` and `lbar_k` the mean LVR
    /// rate of its endpoints. Its minimum over speeds on a fixed curve is
    /// the Jacobi-metric length of that curve.
    Jacobi { market: MarketParams },
}

impl PathObjective {
    /// KL + LVR with one block per step (`horizon = f * dt_block`).
    pub fn kl_plus_lvr_per_block(market: MarketParams, f: usize) -> Self {
        let horizon_days = f as f64 * market.dt_block();
        PathObjective::KlPlusLvr { market, horizon_days }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PathObjective::ExactKl => "exact_kl",
            PathObjective::KlPlusLvr { .. } => "kl_plus_lvr",
            PathObjective::Jacobi { .. } => "jacobi",
        }
    }

    fn market(&self) -> Option<&MarketParams> {
        match self {
            PathObjective::ExactKl => None,
            PathObjective::KlPlusLvr { market, .. } | PathObjective::Jacobi { market } => Some(market),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    ProjectedGradient,
    /// Projected gradient plus Newton steps when the Hessian allows.
    #[default]
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Threshold on the projected-gradient norm.
    pub tol: f64,
    pub max_iter: usize,
    pub w_floor: f64,
    pub solver: Solver,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tol: 1e-10,
            max_iter: 5000,
            w_floor: PLANNER_FLOOR,
            solver: Solver::Newton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub trajectory: Trajectory,
    pub objective_value: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub improvement_vs_init: f64,
    /// Final projected-gradient norm.
    pub gradient_norm: f64,
}

/// Fixed endpoints plus the flattened interior points.
struct Chain<'a> {
    obj: &'a PathObjective,
    n: usize,
    f: usize,
    start: &'a [f64],
    end: &'a [f64],
}

impl<'a> Chain<'a> {
    fn point<'b>(&'b self, x: &'b [f64], k: usize) -> &'b [f64] {
        if k == 0 {
            self.start
        } else if k == self.f {
            self.end
        } else {
            &x[(k - 1) * self.n..k * self.n]
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let f = self.f;
        match self.obj {
            PathObjective::ExactKl => (1..=f).map(|k| kl_raw(self.point(x, k), self.point(x, k - 1))).sum(),
            PathObjective::KlPlusLvr { market, horizon_days } => {
                let kl: f64 = (1..=f).map(|k| kl_raw(self.point(x, k), self.point(x, k - 1))).sum();
                let lvr: f64 = (1..=f).map(|k| lvr_of(self.point(x, k), market)).sum();
                kl + horizon_days / f as f64 * lvr
            }
            PathObjective::Jacobi { market } => self.jacobi_energy(x, market).sqrt(),
        }
    }

    /// `f sum_k dt (l_{k-1} + l_k) L_k^2`, the square of the Jacobi objective.
    fn jacobi_energy(&self, x: &[f64], m: &MarketParams) -> f64 {
        let dt = m.dt_block();
        let mut e = 0.0;
        let mut l_prev = lvr_of(self.start, m);
        for k in 1..=self.f {
            let l_next = lvr_of(self.point(x, k), m);
            e += dt * (l_prev + l_next) * chord2(self.point(x, k - 1), self.point(x, k));
            l_prev = l_next;
        }
        self.f as f64 * e
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let n = self.n;
        let f = self.f;
        match self.obj {
            PathObjective::ExactKl | PathObjective::KlPlusLvr { .. } => {
                for k in 1..f {
                    let (prev, cur, next) = (self.point(x, k - 1), self.point(x, k), self.point(x, k + 1));
                    let gk = &mut g[(k - 1) * n..k * n];
                    for i in 0..n {
                        gk[i] = (cur[i] / prev[i]).ln() + 1.0 - next[i] / cur[i];
                    }
                    if let PathObjective::KlPlusLvr { market, horizon_days } = self.obj {
                        let scale = horizon_days / f as f64;
                        for (gi, li) in gk.iter_mut().zip(lvr_gradient(cur, market)) {
                            *gi += scale * li;
                        }
                    }
                }
            }
            PathObjective::Jacobi { market } => {
                let dt = market.dt_block();
                let energy = self.jacobi_energy(x, market);
                let lv: Vec<f64> = (0..=f).map(|k| lvr_of(self.point(x, k), market)).collect();
                let seg: Vec<f64> = (1..=f).map(|k| chord2(self.point(x, k - 1), self.point(x, k))).collect();
                let j = energy.sqrt();
                let outer = if j > 0.0 { f as f64 / (2.0 * j) } else { 0.0 };
                for k in 1..f {
                    let (prev, cur, next) = (self.point(x, k - 1), self.point(x, k), self.point(x, k + 1));
                    let c_in = dt * (lv[k - 1] + lv[k]);
                    let c_out = dt * (lv[k] + lv[k + 1]);
                    let dl = lvr_gradient(cur, market);
                    let gk = &mut g[(k - 1) * n..k * n];
                    for i in 0..n {
                        let ec = cur[i].sqrt();
                        // d(L^2)/dw_i = 4 (eta_i - eta_nb,i) / eta_i per adjacent segment
                        let d_in = 4.0 * (ec - prev[i].sqrt()) / ec;
                        let d_out = 4.0 * (ec - next[i].sqrt()) / ec;
                        let de = c_in * d_in + c_out * d_out + dt * dl[i] * (seg[k - 1] + seg[k]);
                        gk[i] = outer * de;
                    }
                }
            }
        }
    }
}

fn lvr_of(w: &[f64], m: &MarketParams) -> f64 {
    crate::stochastic::lvr_rate(w, m).unwrap_or(0.0)
}

/// Squared Fisher–Rao chord `4 |sqrt(a) - sqrt(b)|^2`.
fn chord2(a: &[f64], b: &[f64]) -> f64 {
    4.0 * a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x.sqrt() - y.sqrt();
            d * d
        })
        .sum::<f64>()
}

fn check_market(obj: &PathObjective, n: usize) -> Result<()> {
    if let Some(m) = obj.market() {
        check_dims(n, m.n_assets())?;
    }
    if let PathObjective::KlPlusLvr { horizon_days, .. } = obj {
        if !(*horizon_days >= 0.0) || !horizon_days.is_finite() {
            return Err(Error::invalid("horizon must be finite and non-negative"));
        }
    }
    Ok(())
}

fn flatten_interior(t: &Trajectory) -> Vec<f64> {
    let pts = t.points();
    pts[1..pts.len() - 1].iter().flat_map(|p| p.iter().copied()).collect()
}

/// Objective value of a whole trajectory.
pub fn objective_value(t: &Trajectory, obj: &PathObjective) -> Result<f64> {
    check_market(obj, t.n_tokens())?;
    let x = flatten_interior(t);
    let chain = Chain {
        obj,
        n: t.n_tokens(),
        f: t.steps(),
        start: t.start(),
        end: t.end(),
    };
    Ok(chain.value(&x))
}

/// Ambient gradient with respect to each interior point (`f - 1` vectors of length `N`).
pub fn objective_gradient(t: &Trajectory, obj: &PathObjective) -> Result<Vec<Vec<f64>>> {
    check_market(obj, t.n_tokens())?;
    let n = t.n_tokens();
    let x = flatten_interior(t);
    let chain = Chain {
        obj,
        n,
        f: t.steps(),
        start: t.start(),
        end: t.end(),
    };
    let mut g = vec![0.0; x.len()];
    chain.gradient(&x, &mut g);
    Ok(g.chunks(n).map(|c| c.to_vec()).collect())
}

/// Euclidean projection onto `{x : x_i >= floor, sum x = 1}` (sort-based, exact).
pub fn project_capped_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let n = v.len();
    let mass = 1.0 - n as f64 * floor;
    let mut u: Vec<f64> = v.iter().map(|x| x - floor).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - mass) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - floor - theta).max(0.0) + floor).collect()
}

fn pg_norm(x: &[f64], g: &[f64], n: usize, floor: f64) -> f64 {
    let mut acc = 0.0;
    for (xc, gc) in x.chunks(n).zip(g.chunks(n)) {
        let moved: Vec<f64> = xc.iter().zip(gc).map(|(a, b)| a - b).collect();
        let p = project_capped_simplex(&moved, floor);
        acc += p.iter().zip(xc).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    acc.sqrt()
}

fn reduced(g: &[f64], n: usize) -> Vec<f64> {
    g.chunks(n)
        .flat_map(|c| {
            let last = c[n - 1];
            c[..n - 1].iter().map(move |v| v - last)
        })
        .collect()
}

/// Newton direction in reduced coordinates, or `None` if the Hessian is not
/// positive definite.
fn newton_direction(chain: &Chain, x: &[f64], g: &[f64]) -> Option<Vec<f64>> {
    let n = chain.n;
    let m = n - 1;
    let p_count = x.len() / n;
    let rg = reduced(g, n);

    // diag[p] is m x m; up[p] couples p (rows) with p + 1 (columns).
    let mut diag = vec![vec![0.0; m * m]; p_count];
    let mut up = vec![vec![0.0; m * m]; p_count.saturating_sub(1)];
    let mut low = vec![vec![0.0; m * m]; p_count.saturating_sub(1)];
    let steps: Vec<f64> = x
        .chunks(n)
        .map(|c| 1e-5 * c.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();

    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut gp = vec![0.0; x.len()];
    let mut gm = vec![0.0; x.len()];
    for colour in 0..3 {
        for j in 0..m {
            xp.copy_from_slice(x);
            xm.copy_from_slice(x);
            let mut any = false;
            for p in (colour..p_count).step_by(3) {
                let h = steps[p];
                xp[p * n + j] += h;
                xp[p * n + m] -= h;
                xm[p * n + j] -= h;
                xm[p * n + m] += h;
                any = true;
            }
            if !any {
                continue;
            }
            chain.gradient(&xp, &mut gp);
            chain.gradient(&xm, &mut gm);
            let rp = reduced(&gp, n);
            let rm = reduced(&gm, n);
            for q in (colour..p_count).step_by(3) {
                let inv = 1.0 / (2.0 * steps[q]);
                let lo = q.saturating_sub(1);
                let hi = (q + 1).min(p_count - 1);
                for p in lo..=hi {
                    for i in 0..m {
                        let v = (rp[p * m + i] - rm[p * m + i]) * inv;
                        // entry (row p,i ; column q,j)
                        if p == q {
                            diag[p][i * m + j] = v;
                        } else if p + 1 == q {
                            up[p][i * m + j] = v;
                        } else {
                            low[q][i * m + j] = v; // row q+1 w.r.t. column q, stored at index q
                        }
                    }
                }
            }
        }
    }
    // symmetrise
    for d in diag.iter_mut() {
        for i in 0..m {
            for j in 0..i {
                let s = 0.5 * (d[i * m + j] + d[j * m + i]);
                d[i * m + j] = s;
                d[j * m + i] = s;
            }
        }
    }
    for (u, l) in up.iter_mut().zip(&low) {
        for i in 0..m {
            for j in 0..m {
                u[i * m + j] = 0.5 * (u[i * m + j] + l[j * m + i]);
            }
        }
    }

    // Block LDL^T: S_p = D_p - U_{p-1}^T S_{p-1}^{-1} U_{p-1}.
    let mut chol: Vec<Vec<f64>> = Vec::with_capacity(p_count);
    let mut sinv_u: Vec<Vec<f64>> = Vec::with_capacity(p_count);
    let mut y: Vec<Vec<f64>> = Vec::with_capacity(p_count);
    for p in 0..p_count {
        let mut s = diag[p].clone();
        let mut rhs: Vec<f64> = rg[p * m..(p + 1) * m].iter().map(|v| -v).collect();
        if p > 0 {
            let u = &up[p - 1];
            let w = &sinv_u[p - 1]; // S_{p-1}^{-1} U_{p-1}, m x m
            for i in 0..m {
                for j in 0..m {
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += u[k * m + i] * w[k * m + j];
                    }
                    s[i * m + j] -= acc;
                }
            }
            // rhs -= U^T S^{-1} y_{p-1}
            let mut t = y[p - 1].clone();
            cholesky_solve(&chol[p - 1], m, &mut t);
            for i in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += u[k * m + i] * t[k];
                }
                rhs[i] -= acc;
            }
        }
        let l = cholesky_pd(&s, m)?;
        if p + 1 < p_count {
            let u = &up[p];
            let mut w = vec![0.0; m * m];
            for j in 0..m {
                let mut col: Vec<f64> = (0..m).map(|i| u[i * m + j]).collect();
                cholesky_solve(&l, m, &mut col);
                for i in 0..m {
                    w[i * m + j] = col[i];
                }
            }
            sinv_u.push(w);
        }
        chol.push(l);
        y.push(rhs);
    }
    let mut d = vec![0.0; p_count * m];
    for p in (0..p_count).rev() {
        let mut rhs = y[p].clone();
        if p + 1 < p_count {
            let u = &up[p];
            for i in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += u[i * m + k] * d[(p + 1) * m + k];
                }
                rhs[i] -= acc;
            }
        }
        cholesky_solve(&chol[p], m, &mut rhs);
        d[p * m..(p + 1) * m].copy_from_slice(&rhs);
    }
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let slope: f64 = d.iter().zip(&rg).map(|(a, b)| a * b).sum();
    if !(slope < 0.0) {
        return None;
    }
    // back to ambient coordinates
    let mut amb = vec![0.0; x.len()];
    for p in 0..p_count {
        let mut sum = 0.0;
        for j in 0..m {
            amb[p * n + j] = d[p * m + j];
            sum += d[p * m + j];
        }
        amb[p * n + m] = -sum;
    }
    Some(amb)
}

struct State {
    x: Vec<f64>,
    fx: f64,
    g: Vec<f64>,
    pg: f64,
}

fn try_newton(chain: &Chain, s: &State, floor: f64) -> Option<State> {
    let n = chain.n;
    let d = newton_direction(chain, &s.x, &s.g)?;
    let mut alpha_max: f64 = 1.0;
    for (xi, di) in s.x.iter().zip(&d) {
        if *di < 0.0 {
            alpha_max = alpha_max.min((xi - floor) / -di);
        }
    }
    if alpha_max < 1e-3 {
        return None;
    }
    let slope: f64 = d.iter().zip(&s.g).map(|(a, b)| a * b).sum();
    let mut alpha = alpha_max;
    let mut trial = vec![0.0; s.x.len()];
    let mut g = vec![0.0; s.x.len()];
    for attempt in 0..MAX_BACKTRACKS {
        for ((t, xi), di) in trial.iter_mut().zip(&s.x).zip(&d) {
            *t = xi + alpha * di;
        }
        // re-centre each point on the simplex to kill drift
        for c in trial.chunks_mut(n) {
            let sum: f64 = c.iter().sum();
            c.iter_mut().for_each(|v| *v /= sum);
        }
        if trial.iter().all(|v| *v >= floor * (1.0 - 1e-12)) {
            let ft = chain.value(&trial);
            if ft.is_finite() {
                if ft <= s.fx + ARMIJO_C * alpha * slope {
                    chain.gradient(&trial, &mut g);
                    let pg = pg_norm(&trial, &g, n, floor);
                    return Some(State { x: trial, fx: ft, g, pg });
                }
                let noise = (16.0 + (chain.f as f64).sqrt()) * f64::EPSILON * s.fx.abs();
                if attempt == 0 && ft <= s.fx + noise {
                    // Below the rounding floor of the objective: accept the
                    // full step if it reduces the stationarity measure.
                    chain.gradient(&trial, &mut g);
                    let pg = pg_norm(&trial, &g, n, floor);
                    if pg < s.pg {
                        return Some(State { x: trial, fx: ft, g, pg });
                    }
                }
            }
        }
        alpha *= 0.5;
    }
    None
}

fn try_gradient_step(chain: &Chain, s: &State, floor: f64, alpha: &mut f64) -> Option<State> {
    let n = chain.n;
    let mut trial = vec![0.0; s.x.len()];
    let mut g = vec![0.0; s.x.len()];
    let mut a = (*alpha * 2.0).min(1e6);
    for _ in 0..MAX_BACKTRACKS * 2 {
        for ((tc, xc), gc) in trial.chunks_mut(n).zip(s.x.chunks(n)).zip(s.g.chunks(n)) {
            let moved: Vec<f64> = xc.iter().zip(gc).map(|(x, g)| x - a * g).collect();
            tc.copy_from_slice(&project_capped_simplex(&moved, floor));
        }
        let decrease: f64 = trial.iter().zip(&s.x).zip(&s.g).map(|((t, x), g)| g * (t - x)).sum();
        let ft = chain.value(&trial);
        if ft.is_finite() && decrease < 0.0 && ft <= s.fx + ARMIJO_C * decrease {
            *alpha = a;
            chain.gradient(&trial, &mut g);
            let pg = pg_norm(&trial, &g, n, floor);
            return Some(State { x: trial, fx: ft, g, pg });
        }
        a *= 0.5;
        if a < 1e-30 {
            break;
        }
    }
    None
}

/// Minimise `objective` over the interior points of an `f`-step trajectory,
/// starting from `init`.
pub fn optimize_path(
    w_start: &WeightVector,
    w_end: &WeightVector,
    f: usize,
    objective: &PathObjective,
    init: &Trajectory,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    let n = w_start.len();
    check_dims(n, w_end.len())?;
    check_dims(n, init.n_tokens())?;
    check_market(objective, n)?;
    if init.steps() != f {
        return Err(Error::invalid(format!("initial trajectory has {} steps, expected {f}", init.steps())));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !(0.0..1.0 / n as f64).contains(&opts.w_floor) {
        return Err(Error::invalid(format!("floor {} infeasible for {n} tokens", opts.w_floor)));
    }
    for (a, b) in [(init.start(), w_start), (init.end(), w_end)] {
        if a.iter().zip(b.iter()).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(Error::invalid("initial trajectory endpoints do not match"));
        }
    }
    for (k, p) in init.points()[1..f].iter().enumerate() {
        if p.iter().any(|v| *v < opts.w_floor) {
            return Err(Error::InvalidWeights(format!(
                "initial point {} violates the floor {}",
                k + 1,
                opts.w_floor
            )));
        }
    }

    let chain = Chain {
        obj: objective,
        n,
        f,
        start: w_start,
        end: w_end,
    };
    let x0 = flatten_interior(init);
    let f0 = chain.value(&x0);
    if !f0.is_finite() {
        return Err(Error::NonFinite(format!("initial {} objective", objective.name())));
    }
    let mut g0 = vec![0.0; x0.len()];
    chain.gradient(&x0, &mut g0);
    let pg0 = pg_norm(&x0, &g0, n, opts.w_floor);
    let mut s = State { x: x0, fx: f0, g: g0, pg: pg0 };

    let mut iterations = 0;
    let mut alpha = 1.0;
    while iterations < opts.max_iter && s.pg > opts.tol && !s.x.is_empty() {
        let near_floor = s.x.iter().any(|v| *v < opts.w_floor + 1e-9);
        let mut next = None;
        if opts.solver == Solver::Newton && !near_floor {
            next = try_newton(&chain, &s, opts.w_floor);
        }
        if next.is_none() {
            next = try_gradient_step(&chain, &s, opts.w_floor, &mut alpha);
        }
        match next {
            Some(ns) => {
                iterations += 1;
                s = ns;
            }
            None => break,
        }
    }
    let mut points = Vec::with_capacity(f + 1);
    points.push(w_start.clone());
    for c in s.x.chunks(n) {
        points.push(WeightVector::normalized(c.to_vec(), 0.0)?);
    }
    points.push(w_end.clone());
    let trajectory = Trajectory::from_points(points, Method::Custom)?;
    let final_value = objective_value(&trajectory, objective)?;
    Ok(OptimizeResult {
        trajectory,
        objective_value: final_value,
        initial_objective: f0,
        iterations,
        converged: s.pg <= opts.tol,
        improvement_vs_init: (f0 - final_value).max(0.0),
        gradient_norm: s.pg,
    })
}

/// Optimise starting from the SLERP trajectory.
pub fn optimize_from_slerp(
    w_start: &WeightVector,
    w_end: &WeightVector,
    f: usize,
    objective: &PathObjective,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    let init = slerp_path(w_start, w_end, f)?;
    optimize_path(w_start, w_end, f, objective, &init, opts)
}
