//! Experiment configuration: one JSON document, then flag overrides.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fees::FeeParams;
use crate::interpolation::Method;
use crate::optimize::{OptimizeOptions, Solver};
use crate::simplex::{LossKernelKind, WeightVector, PLANNER_FLOOR};
use crate::stochastic::{MarketParams, Ordering, PriceModel, VolUnits, DT_BLOCK_12S};

use super::{Format, CommonArgs};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub sigma: Vec<f64>,
    #[serde(default)]
    pub sigma_units: VolUnits,
    /// Full correlation matrix; mutually exclusive with `rho`.
    pub correlation: Option<Vec<Vec<f64>>>,
    /// Common pairwise correlation.
    pub rho: Option<f64>,
    pub dt_block: Option<f64>,
    #[serde(default)]
    pub model: PriceModel,
}

impl MarketConfig {
    /// Build market parameters for an `n`-token pool. A single volatility
    /// with `n > 1` means one volatile asset against stable ones.
    pub fn build(&self, n: usize) -> Result<MarketParams> {
        let dt = self.dt_block.unwrap_or(DT_BLOCK_12S);
        let daily: Vec<f64> = self.sigma.iter().map(|s| self.sigma_units.to_daily(*s)).collect();
        let sigma = if daily.len() == 1 && n > 1 {
            let mut v = vec![0.0; n];
            v[0] = daily[0];
            v
        } else {
            daily
        };
        if sigma.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: sigma.len() });
        }
        let m = match (&self.correlation, self.rho) {
            (Some(_), Some(_)) => return Err(Error::invalid("give either a correlation matrix or rho, not both")),
            (Some(c), None) => MarketParams::new(sigma, c.clone(), dt, PriceModel::Gbm)?,
            (None, Some(rho)) => MarketParams::equicorrelated(sigma, rho, dt)?,
            (None, None) => MarketParams::uncorrelated(sigma, dt)?,
        };
        m.with_model(self.model)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeeConfig {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_phi")]
    pub phi: f64,
    #[serde(default = "default_pool_value")]
    pub pool_value: f64,
}

fn default_gamma() -> f64 {
    0.997
}
fn default_phi() -> f64 {
    1.0
}
fn default_pool_value() -> f64 {
    1.0
}

impl Default for FeeConfig {
    fn default() -> Self {
        FeeConfig {
            gamma: default_gamma(),
            phi: default_phi(),
            pool_value: default_pool_value(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n_paths: Option<usize>,
    pub f_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub ordering: Ordering,
    #[serde(default = "yes")]
    pub antithetic: bool,
    /// One seeded path, reported step by step like `replay`.
    #[serde(default)]
    pub single_path: bool,
    /// Where to write the sampled prices in single-path mode.
    pub prices_out: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            n_paths: None,
            f_grid: None,
            ordering: Ordering::default(),
            antithetic: true,
            single_path: false,
            prices_out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    #[default]
    ExactKl,
    KlPlusLvr,
    Jacobi,
}

impl FromStr for ObjectiveName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "exact_kl" => Ok(ObjectiveName::ExactKl),
            "kl_plus_lvr" => Ok(ObjectiveName::KlPlusLvr),
            "jacobi" => Ok(ObjectiveName::Jacobi),
            other => Err(Error::invalid(format!("unknown objective '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub objective: ObjectiveName,
    /// Defaults to one block per step.
    pub horizon_days: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub solver: Option<Solver>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PendulumConfig {
    /// Forcing strength; derived from `f`, the horizon and sigma when absent.
    pub mu: Option<f64>,
    pub horizon_days: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub w_start: Option<Vec<f64>>,
    pub w_end: Option<Vec<f64>>,
    pub f: Option<usize>,
    pub depth: Option<u32>,
    pub method: Option<Method>,
    /// Methods compared side by side by `cost`.
    pub methods: Option<Vec<Method>>,
    pub kernel: Option<LossKernelKind>,
    pub w_floor: Option<f64>,
    pub market: Option<MarketConfig>,
    pub fees: Option<FeeConfig>,
    /// Per-block weight-change cap for the guardrail ratio.
    pub guardrail_cap: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub optimize: OptimizeConfig,
    #[serde(default)]
    pub pendulum: PendulumConfig,
}

impl PlanConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    /// Load `--config` (if any) and apply the command-line overrides.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut c = match &args.config {
            Some(p) => Self::from_file(p)?,
            None => PlanConfig::default(),
        };
        if let Some(v) = &args.w_start {
            c.w_start = Some(v.clone());
        }
        if let Some(v) = &args.w_end {
            c.w_end = Some(v.clone());
        }
        if args.f.is_some() {
            c.f = args.f;
            c.depth = None;
        }
        if args.depth.is_some() {
            c.depth = args.depth;
            if args.f.is_none() {
                c.f = None;
            }
        }
        if let Some(m) = &args.method {
            let parsed = m.iter().map(|s| s.parse()).collect::<Result<Vec<Method>>>()?;
            c.method = parsed.first().copied();
            c.methods = Some(parsed);
        }
        if let Some(k) = &args.kernel {
            c.kernel = Some(k.parse()?);
        }
        if let Some(s) = &args.sigma {
            let market = c.market.get_or_insert_with(MarketConfig::default);
            market.sigma = s.clone();
        }
        if let Some(u) = &args.sigma_units {
            let market = c.market.get_or_insert_with(MarketConfig::default);
            market.sigma_units = u.parse()?;
        }
        if args.gamma.is_some() || args.phi.is_some() {
            let fee = c.fees.get_or_insert_with(FeeConfig::default);
            if let Some(g) = args.gamma {
                fee.gamma = g;
            }
            if let Some(p) = args.phi {
                fee.phi = p;
            }
        }
        if args.seed.is_some() {
            c.seed = args.seed;
        }
        if args.format.is_some() {
            c.format = args.format;
        }
        if args.out.is_some() {
            c.out = args.out.clone();
        }
        Ok(c)
    }

    pub fn floor(&self) -> f64 {
        self.w_floor.unwrap_or(PLANNER_FLOOR)
    }

    pub fn endpoints(&self) -> Result<(WeightVector, WeightVector)> {
        let floor = self.floor();
        let a = self.w_start.clone().ok_or_else(|| Error::invalid("missing w_start"))?;
        let b = self.w_end.clone().ok_or_else(|| Error::invalid("missing w_end"))?;
        Ok((WeightVector::with_floor(a, floor)?, WeightVector::with_floor(b, floor)?))
    }

    pub fn method(&self) -> Method {
        self.method.unwrap_or(Method::Slerp)
    }

    /// Step count from `f` or `depth` (exactly one of them).
    pub fn steps(&self) -> Result<usize> {
        match (self.f, self.depth) {
            (Some(_), Some(_)) => Err(Error::invalid("give either f or depth, not both")),
            (Some(f), None) => Ok(f),
            (None, Some(d)) => {
                if d == 0 || d > 30 {
                    return Err(Error::invalid(format!("bisection depth {d} outside 1..=30")));
                }
                Ok(1usize << d)
            }
            (None, None) => Err(Error::invalid("missing step count: give f or depth")),
        }
    }

    pub fn market(&self, n: usize) -> Result<MarketParams> {
        match &self.market {
            Some(m) => m.build(n),
            None => Err(Error::invalid("this command needs a market block (or --sigma)")),
        }
    }

    pub fn fee_params(&self) -> Result<FeeParams> {
        let f = self.fees.unwrap_or_default();
        FeeParams::new(f.gamma, f.phi, f.pool_value)
    }

    pub fn optimize_options(&self) -> OptimizeOptions {
        let d = OptimizeOptions::default();
        OptimizeOptions {
            tol: self.optimize.tol.unwrap_or(d.tol),
            max_iter: self.optimize.max_iter.unwrap_or(d.max_iter),
            w_floor: self.floor(),
            solver: self.optimize.solver.unwrap_or(d.solver),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}
