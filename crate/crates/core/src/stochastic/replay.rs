//! Block-wise price CSV input/output and replay of a trajectory on real data.
//!
//! Format: header `block,asset_0,...,asset_{N-1}`, one row per block.

use std::io::{Read, Write};

use serde::Serialize;

use super::paths::PricePath;
use super::sim::{check_path, step_terms, Ordering};
use crate::error::{Error, Result};
use crate::interpolation::Trajectory;

fn data_err(line: usize, message: impl Into<String>) -> Error {
    Error::PriceData {
        line,
        message: message.into(),
    }
}

/// Parse a price CSV. Line numbers in errors are 1-based and count the header.
pub fn read_price_csv<R: Read>(reader: R) -> Result<PricePath> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| data_err(1, e.to_string()))?.clone();
    if headers.get(0).map(str::trim) != Some("block") {
        return Err(data_err(1, "first column must be 'block'"));
    }
    let n = headers.len() - 1;
    if n < 1 {
        return Err(data_err(1, "no asset columns"));
    }
    for (i, h) in headers.iter().skip(1).enumerate() {
        if h.trim() != format!("asset_{i}") {
            return Err(data_err(1, format!("column {} must be 'asset_{i}', found '{h}'", i + 1)));
        }
    }
    let mut prices = vec![Vec::new(); n];
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| data_err(line, e.to_string()))?;
        if rec.len() != n + 1 {
            return Err(data_err(line, format!("expected {} fields, found {}", n + 1, rec.len())));
        }
        rec[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| data_err(line, format!("block '{}' is not a non-negative integer", &rec[0])))?;
        for i in 0..n {
            let field = rec[i + 1].trim();
            let p: f64 = field
                .parse()
                .map_err(|_| data_err(line, format!("asset_{i} value '{field}' is not a number")))?;
            if p.is_nan() {
                return Err(data_err(line, format!("asset_{i} is NaN")));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(data_err(line, format!("asset_{i} price {p} is not positive and finite")));
            }
            prices[i].push(p);
        }
    }
    if prices[0].is_empty() {
        return Err(data_err(2, "no price rows"));
    }
    PricePath::new(prices)
}

/// Write a price path in the replay CSV format with round-trip float formatting.
pub fn write_price_csv<W: Write>(writer: W, path: &PricePath) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = path.n_assets();
    let mut header = vec!["block".to_string()];
    header.extend((0..n).map(|i| format!("asset_{i}")));
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for b in 0..=path.n_blocks() {
        let mut rec = vec![b.to_string()];
        rec.extend((0..n).map(|i| format!("{:?}", path.price(i, b))));
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDecomposition {
    pub step: usize,
    /// `ln r_k`, the arbitrage loss of the weight change (non-positive).
    pub kl: f64,
    pub price_term: f64,
    /// Running `ln(V_k / V_0)`.
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub log_value_change: f64,
    pub kl_component: f64,
    pub price_component: f64,
    pub steps: Vec<StepDecomposition>,
}

/// Replay `t` on the first `f + 1` rows of `prices`.
pub fn replay_rebalance(t: &Trajectory, prices: &PricePath, ordering: Ordering) -> Result<ReplayReport> {
    check_path(t, prices)?;
    let mut kl = 0.0;
    let mut price = 0.0;
    let mut steps = Vec::with_capacity(t.steps());
    for k in 1..=t.steps() {
        let (a, b) = step_terms(t, prices, ordering, k);
        kl += a;
        price += b;
        steps.push(StepDecomposition {
            step: k,
            kl: a,
            price_term: b,
            cumulative: kl + price,
        });
    }
    Ok(ReplayReport {
        log_value_change: kl + price,
        kl_component: kl,
        price_component: price,
        steps,
    })
}
