use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::interpolation::slerp_point;
use crate::linalg::cholesky_psd;
use crate::quadrature::{simpson_unit, DEFAULT_INTERVALS};
use crate::simplex::WeightVector;

pub const DAYS_PER_YEAR: f64 = 365.0;
pub const BLOCK_SECONDS: f64 = 12.0;
/// One 12-second block, in days.
pub const DT_BLOCK_12S: f64 = BLOCK_SECONDS / 86_400.0;

/// Units of a user-supplied volatility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VolUnits {
    #[default]
    Annual,
    Daily,
}

impl VolUnits {
    pub fn to_daily(self, sigma: f64) -> f64 {
        match self {
            VolUnits::Annual => annual_to_daily(sigma),
            VolUnits::Daily => sigma,
        }
    }
}

impl std::str::FromStr for VolUnits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "annual" | "annualized" | "annualised" => Ok(VolUnits::Annual),
            "daily" | "day" => Ok(VolUnits::Daily),
            other => Err(Error::invalid(format!("unknown volatility units '{other}'"))),
        }
    }
}

/// Annualised volatility to per-square-root-day.
pub fn annual_to_daily(sigma_annual: f64) -> f64 {
    sigma_annual / DAYS_PER_YEAR.sqrt()
}

/// Per-block return dynamics. Every model is calibrated so that its total
/// per-day variance equals `sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceModel {
    #[default]
    Gbm,
    /// Compound-Poisson log-normal jumps on top of a diffusion.
    MertonJump {
        /// Expected jumps per day.
        intensity: f64,
        jump_sigma: f64,
        jump_mean_log: f64,
    },
    /// GARCH(1,1) on per-block log returns. `omega = None` targets the
    /// stationary variance `sigma^2 dt`.
    Garch11 {
        omega: Option<f64>,
        alpha: f64,
        beta: f64,
    },
}

impl PriceModel {
    /// Jumps carrying roughly half the variance of a 50%-annualised asset,
    /// centred so the expected price jump is zero.
    pub fn default_merton() -> Self {
        PriceModel::MertonJump {
            intensity: 2.0,
            jump_sigma: 0.012,
            jump_mean_log: -0.5 * 0.012 * 0.012,
        }
    }

    pub fn default_garch() -> Self {
        PriceModel::Garch11 {
            omega: None,
            alpha: 0.1,
            beta: 0.85,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PriceModel::Gbm => "gbm",
            PriceModel::MertonJump { .. } => "merton",
            PriceModel::Garch11 { .. } => "garch",
        }
    }
}

/// Volatilities (per square-root day), correlations, block interval and price model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketParams {
    sigma: Vec<f64>,
    corr: Vec<f64>,
    dt_block: f64,
    model: PriceModel,
    #[serde(skip)]
    chol: Vec<f64>,
}

impl MarketParams {
    pub fn new(sigma: Vec<f64>, corr: Vec<Vec<f64>>, dt_block: f64, model: PriceModel) -> Result<Self> {
        let n = sigma.len();
        if n < 2 {
            return Err(Error::invalid("market needs at least two assets"));
        }
        if let Some(s) = sigma.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(Error::invalid(format!("volatility {s} must be finite and >= 0")));
        }
        if !(dt_block > 0.0) || !dt_block.is_finite() {
            return Err(Error::invalid(format!("block interval {dt_block} must be positive")));
        }
        check_dims(n, corr.len())?;
        let mut flat = Vec::with_capacity(n * n);
        for row in &corr {
            check_dims(n, row.len())?;
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            if (flat[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("correlation diagonal [{i}] is not 1")));
            }
            for j in 0..i {
                let (a, b) = (flat[i * n + j], flat[j * n + i]);
                if (a - b).abs() > 1e-12 || !(-1.0..=1.0).contains(&a) {
                    return Err(Error::invalid(format!("correlation [{i},{j}] invalid or asymmetric")));
                }
            }
        }
        let chol = cholesky_psd(&flat, n, 1e-10)?;
        let m = MarketParams {
            sigma,
            corr: flat,
            dt_block,
            model,
            chol,
        };
        m.check_model()?;
        Ok(m)
    }

    /// Independent assets under GBM.
    pub fn uncorrelated(sigma: Vec<f64>, dt_block: f64) -> Result<Self> {
        let n = sigma.len();
        let corr = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(sigma, corr, dt_block, PriceModel::Gbm)
    }

    /// Equal pairwise correlation `rho`.
    pub fn equicorrelated(sigma: Vec<f64>, rho: f64, dt_block: f64) -> Result<Self> {
        let n = sigma.len();
        let corr = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect()).collect();
        Self::new(sigma, corr, dt_block, PriceModel::Gbm)
    }

    /// Asset 0 volatile against a numeraire (and any further stable assets).
    pub fn single_volatile(n: usize, sigma_daily: f64, dt_block: f64) -> Result<Self> {
        let mut s = vec![0.0; n];
        if n > 0 {
            s[0] = sigma_daily;
        }
        Self::uncorrelated(s, dt_block)
    }

    pub fn with_model(self, model: PriceModel) -> Result<Self> {
        let m = MarketParams { model, ..self };
        m.check_model()?;
        Ok(m)
    }

    fn check_model(&self) -> Result<()> {
        match self.model {
            PriceModel::Gbm => Ok(()),
            PriceModel::MertonJump {
                intensity,
                jump_sigma,
                jump_mean_log,
            } => {
                if !(intensity >= 0.0) || !(jump_sigma >= 0.0) || !jump_mean_log.is_finite() {
                    return Err(Error::invalid("merton parameters must be finite, intensity and jump_sigma >= 0"));
                }
                let jump_var = intensity * (jump_sigma * jump_sigma + jump_mean_log * jump_mean_log);
                for (i, &s) in self.sigma.iter().enumerate() {
                    if s > 0.0 && jump_var > s * s {
                        return Err(Error::invalid(format!(
                            "jump variance {jump_var:e}/day exceeds total variance {:e}/day of asset {i}",
                            s * s
                        )));
                    }
                }
                Ok(())
            }
            PriceModel::Garch11 { omega, alpha, beta } => {
                if !(alpha >= 0.0) || !(beta >= 0.0) || alpha + beta >= 1.0 {
                    return Err(Error::invalid("garch needs alpha, beta >= 0 and alpha + beta < 1"));
                }
                if let Some(w) = omega {
                    if !(w > 0.0) {
                        return Err(Error::invalid("garch omega must be positive"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn n_assets(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn dt_block(&self) -> f64 {
        self.dt_block
    }

    pub fn model(&self) -> PriceModel {
        self.model
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.corr[i * self.n_assets() + j]
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.sigma[i] * self.sigma[j] * self.correlation(i, j)
    }

    /// Largest single-asset volatility.
    pub fn sigma_max(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn cholesky(&self) -> &[f64] {
        &self.chol
    }
}

/// LVR rate `l(w) = (sum w_i sigma_i^2 - w' Sigma w) / 2`, in nats per day.
pub fn lvr_rate(w: &[f64], m: &MarketParams) -> Result<f64> {
    check_dims(m.n_assets(), w.len())?;
    Ok(lvr_raw(w, m))
}

pub(crate) fn lvr_raw(w: &[f64], m: &MarketParams) -> f64 {
    let n = w.len();
    let mut diag = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        diag += w[i] * m.sigma[i] * m.sigma[i];
        for j in 0..n {
            quad += w[i] * w[j] * m.covariance(i, j);
        }
    }
    (0.5 * (diag - quad)).max(0.0)
}

/// Ambient gradient of the LVR rate: `sigma_i^2 / 2 - (Sigma w)_i`.
pub fn lvr_gradient(w: &[f64], m: &MarketParams) -> Vec<f64> {
    let n = w.len();
    (0..n)
        .map(|i| {
            let sw: f64 = (0..n).map(|j| m.covariance(i, j) * w[j]).sum();
            0.5 * m.sigma[i] * m.sigma[i] - sw
        })
        .collect()
}

/// Expected log drift lost to volatility, `sum w_i sigma_i^2 / 2`.
pub fn variance_drag(w: &[f64], m: &MarketParams) -> Result<f64> {
    check_dims(m.n_assets(), w.len())?;
    Ok(0.5 * w.iter().zip(&m.sigma).map(|(w, s)| w * s * s).sum::<f64>())
}

/// Average LVR rate along the continuous SLERP curve (256-interval Simpson).
pub fn mean_lvr_along_path(w_start: &WeightVector, w_end: &WeightVector, m: &MarketParams) -> Result<f64> {
    mean_lvr_with(w_start, w_end, m, DEFAULT_INTERVALS)
}

pub(crate) fn mean_lvr_with(w_start: &WeightVector, w_end: &WeightVector, m: &MarketParams, intervals: usize) -> Result<f64> {
    check_dims(m.n_assets(), w_start.len())?;
    check_dims(m.n_assets(), w_end.len())?;
    let mut failure = None;
    let v = simpson_unit(
        |s| match slerp_point(w_start, w_end, s) {
            Ok(p) => lvr_raw(&p, m),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        intervals,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
