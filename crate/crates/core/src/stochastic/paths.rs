//! Deterministic price-path generation.
//!
//! Every path owns one ChaCha8 stream selected by its index, so a path's
//! draws do not depend on how paths are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::market::{MarketParams, PriceModel};
use crate::error::{Error, Result};
use crate::linalg::lower_mul;

/// Prices of every asset at blocks `0..=n_blocks`, starting at 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricePath {
    /// `prices[asset][block]`
    prices: Vec<Vec<f64>>,
}

impl PricePath {
    pub fn new(prices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = prices.first() else {
            return Err(Error::invalid("price path needs at least one asset"));
        };
        let len = first.len();
        if len == 0 || prices.iter().any(|p| p.len() != len) {
            return Err(Error::invalid("every asset needs the same non-zero number of blocks"));
        }
        if prices.iter().flatten().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::invalid("prices must be finite and positive"));
        }
        Ok(PricePath { prices })
    }

    /// Constant prices of one for `n_blocks` blocks.
    pub fn constant(n_assets: usize, n_blocks: usize) -> Self {
        PricePath {
            prices: vec![vec![1.0; n_blocks + 1]; n_assets],
        }
    }

    pub fn n_assets(&self) -> usize {
        self.prices.len()
    }

    /// Number of block transitions.
    pub fn n_blocks(&self) -> usize {
        self.prices[0].len() - 1
    }

    pub fn asset(&self, i: usize) -> &[f64] {
        &self.prices[i]
    }

    pub fn price(&self, asset: usize, block: usize) -> f64 {
        self.prices[asset][block]
    }

    /// `ln(P_i(block) / P_i(block - 1))`.
    pub fn log_return(&self, asset: usize, block: usize) -> f64 {
        (self.prices[asset][block] / self.prices[asset][block - 1]).ln()
    }
}

/// Per-path shock generator. `sign = -1` produces the antithetic partner:
/// every normal draw is negated while Poisson counts are shared.
pub(crate) struct ShockGenerator<'a> {
    market: &'a MarketParams,
    rng: ChaCha8Rng,
    sign: f64,
    garch_var: Vec<f64>,
    eps: Vec<f64>,
    z: Vec<f64>,
}

impl<'a> ShockGenerator<'a> {
    pub(crate) fn new(market: &'a MarketParams, seed: u64, stream: u64, sign: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let n = market.n_assets();
        let dt = market.dt_block();
        let garch_var = match market.model() {
            PriceModel::Garch11 { omega, alpha, beta } => market
                .sigma()
                .iter()
                .map(|s| match omega {
                    Some(w) if *s > 0.0 => w / (1.0 - alpha - beta),
                    _ => s * s * dt,
                })
                .collect(),
            _ => Vec::new(),
        };
        ShockGenerator {
            market,
            rng,
            sign,
            garch_var,
            eps: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    fn normal(&mut self) -> f64 {
        let x: f64 = self.rng.sample(StandardNormal);
        self.sign * x
    }

    /// Fill `out` with the next block's log price increments.
    pub(crate) fn next_block(&mut self, out: &mut [f64]) {
        let m = self.market;
        let n = m.n_assets();
        let dt = m.dt_block();
        for i in 0..n {
            self.eps[i] = self.normal();
        }
        lower_mul(m.cholesky(), n, &self.eps, &mut self.z);
        match m.model() {
            PriceModel::Gbm => {
                for i in 0..n {
                    let s = m.sigma()[i];
                    out[i] = -0.5 * s * s * dt + s * dt.sqrt() * self.z[i];
                }
            }
            PriceModel::MertonJump {
                intensity,
                jump_sigma,
                jump_mean_log,
            } => {
                let jump_var = intensity * (jump_sigma * jump_sigma + jump_mean_log * jump_mean_log);
                let kappa = (jump_mean_log + 0.5 * jump_sigma * jump_sigma).exp() - 1.0;
                let poisson = Poisson::new(intensity * dt).ok();
                for i in 0..n {
                    let s = m.sigma()[i];
                    if s == 0.0 {
                        out[i] = 0.0;
                        continue;
                    }
                    let diff_var = (s * s - jump_var).max(0.0);
                    let mut x = -0.5 * diff_var * dt - intensity * kappa * dt + diff_var.sqrt() * dt.sqrt() * self.z[i];
                    let count = poisson.as_ref().map_or(0.0, |p| p.sample(&mut self.rng));
                    for _ in 0..count as u64 {
                        x += jump_mean_log + jump_sigma * self.normal();
                    }
                    out[i] = x;
                }
            }
            PriceModel::Garch11 { omega, alpha, beta } => {
                for i in 0..n {
                    let s = m.sigma()[i];
                    let h = self.garch_var[i];
                    let shock = h.sqrt() * self.z[i];
                    out[i] = -0.5 * h + shock;
                    let w = match omega {
                        Some(w) if s > 0.0 => w,
                        _ => s * s * dt * (1.0 - alpha - beta),
                    };
                    self.garch_var[i] = w + alpha * shock * shock + beta * h;
                }
            }
        }
    }
}

/// Generate one price path from `(seed, stream)`.
pub(crate) fn generate_path(m: &MarketParams, n_blocks: usize, seed: u64, stream: u64, sign: f64) -> PricePath {
    let n = m.n_assets();
    let mut gen = ShockGenerator::new(m, seed, stream, sign);
    let mut log_p = vec![0.0; n];
    let mut inc = vec![0.0; n];
    let mut prices = vec![Vec::with_capacity(n_blocks + 1); n];
    for p in prices.iter_mut() {
        p.push(1.0);
    }
    for _ in 0..n_blocks {
        gen.next_block(&mut inc);
        for i in 0..n {
            log_p[i] += inc[i];
            prices[i].push(log_p[i].exp());
        }
    }
    PricePath { prices }
}

/// `n_paths` independent price paths of `n_blocks` steps; path `j` uses stream `j`.
pub fn sample_paths(m: &MarketParams, n_blocks: usize, n_paths: usize, seed: u64) -> Vec<PricePath> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|j| generate_path(m, n_blocks, seed, j, 1.0))
        .collect()
}
