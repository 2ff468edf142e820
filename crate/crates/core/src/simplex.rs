//! Points on the probability simplex, their Hellinger (square-root)
//! coordinates, and the closed-form losses a G3M pool pays when its
//! weights jump.
//!
//! All losses are in nats.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};

/// Minimum weight used by planners and the CLI (a 1% floor, as deployed pools enforce).
pub const PLANNER_FLOOR: f64 = 0.01;

/// Raw inputs whose sum is further than this from one are rejected rather
/// than silently renormalised.
pub const SUM_GATE: f64 = 1e-6;

/// Below this Bhattacharyya gap the angle is computed from the chord length.
const SMALL_ANGLE_GAP: f64 = 1e-12;

/// Pool weights: a point on the open probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    /// Weights on the open simplex (every component strictly positive).
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        Self::with_floor(raw, 0.0)
    }

    /// Weights with every component at least `floor` (after renormalisation).
    ///
    /// A `floor` of zero means "strictly positive".
    pub fn with_floor(raw: Vec<f64>, floor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&floor) {
            return Err(Error::invalid(format!("weight floor {floor} outside [0, 1)")));
        }
        if raw.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "need at least two weights, got {}",
                raw.len()
            )));
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights("non-finite weight".into()));
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > SUM_GATE {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Self::normalized(raw, floor)
    }

    /// Divide by the sum and validate; no gate on the raw sum.
    pub(crate) fn normalized(mut raw: Vec<f64>, floor: f64) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidWeights(format!("cannot normalise sum {sum}")));
        }
        for x in raw.iter_mut() {
            *x /= sum;
        }
        for (i, &x) in raw.iter().enumerate() {
            if !(x > 0.0) {
                return Err(Error::InvalidWeights(format!(
                    "component {i} = {x} is not strictly positive"
                )));
            }
            if x < floor {
                return Err(Error::InvalidWeights(format!(
                    "component {i} = {x} below floor {floor}"
                )));
            }
        }
        Ok(WeightVector { w: raw })
    }

    /// The barycentre `(1/N, ..., 1/N)`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Two-token pool `(w, 1 - w)`.
    pub fn two_token(w: f64) -> Result<Self> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidWeights(format!("two-token weight {w} outside (0, 1)")));
        }
        Self::new(vec![w, 1.0 - w])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    pub fn min_weight(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.w
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        WeightVector::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.w.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:.6}")?;
        }
        write!(f, ")")
    }
}

/// A point on the positive orthant of the unit sphere, `eta_i = sqrt(w_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HellingerPoint {
    eta: Vec<f64>,
}

impl HellingerPoint {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::invalid("need at least two coordinates"));
        }
        if let Some(i) = eta.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid(format!(
                "coordinate {i} = {} is not a finite non-negative number",
                eta[i]
            )));
        }
        let norm2: f64 = eta.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("squared norm {norm2} is not 1")));
        }
        Ok(HellingerPoint { eta })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.eta
    }
}

pub fn hellinger_embed(w: &WeightVector) -> HellingerPoint {
    HellingerPoint {
        eta: w.iter().map(|x| x.sqrt()).collect(),
    }
}

pub fn hellinger_unembed(eta: &HellingerPoint) -> Result<WeightVector> {
    WeightVector::normalized(eta.eta.iter().map(|x| x * x).collect(), 0.0)
}

/// `KL(p || q) = sum p_i ln(p_i / q_i)`.
pub fn kl_divergence(p: &WeightVector, q: &WeightVector) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    Ok(kl_raw(p, q))
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| a * (a / b).ln()).sum()
}

/// Fraction of value kept after arbitrageurs move reserves from the
/// `start` equilibrium to the `end` weights: `prod (s_j / e_j)^{e_j}`.
pub fn retention_ratio(w_start: &WeightVector, w_end: &WeightVector) -> Result<f64> {
    check_dims(w_start.len(), w_end.len())?;
    Ok(w_start
        .iter()
        .zip(w_end.iter())
        .map(|(&s, &e)| (s / e).powf(e))
        .product())
}

/// Reserves after the arbitrage that follows a weight change at fixed prices.
pub fn arbitraged_reserves(
    reserves: &[f64],
    w_start: &WeightVector,
    w_end: &WeightVector,
) -> Result<Vec<f64>> {
    check_dims(w_start.len(), reserves.len())?;
    check_dims(w_start.len(), w_end.len())?;
    if let Some(r) = reserves.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid(format!("reserve {r} is not positive")));
    }
    let ratio = retention_ratio(w_start, w_end)?;
    Ok(reserves
        .iter()
        .zip(w_start.iter().zip(w_end.iter()))
        .map(|(&r, (&s, &e))| r * (e / s) * ratio)
        .collect())
}

/// Which approximation of the per-step KL loss to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKernelKind {
    ExactKl,
    Quadratic,
    Pade,
}

impl LossKernelKind {
    pub const ALL: [LossKernelKind; 3] = [Self::ExactKl, Self::Quadratic, Self::Pade];

    pub fn name(self) -> &'static str {
        match self {
            Self::ExactKl => "exact_kl",
            Self::Quadratic => "quadratic",
            Self::Pade => "pade",
        }
    }

    /// Per-component kernel as a function of the relative change `u = dw / w`.
    pub fn component(self, u: f64) -> f64 {
        match self {
            Self::ExactKl => kl_kernel(u),
            Self::Quadratic => quadratic_kernel(u),
            Self::Pade => pade_kernel(u),
        }
    }
}

impl fmt::Display for LossKernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LossKernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exact_kl" | "exact" | "kl" => Ok(Self::ExactKl),
            "quadratic" => Ok(Self::Quadratic),
            "pade" => Ok(Self::Pade),
            other => Err(Error::invalid(format!("unknown loss kernel '{other}'"))),
        }
    }
}

/// `h(u) = (1 + u) ln(1 + u) - u`, the exact per-component KL kernel.
///
/// Uses the alternating series for small `|u|` to avoid cancellation.
pub fn kl_kernel(u: f64) -> f64 {
    if u.abs() < 0.01 {
        // h(u) = sum_{n>=2} (-1)^n u^n / (n (n - 1))
        let mut term = u * u;
        let mut acc = 0.0;
        for n in 2..16 {
            let nf = n as f64;
            acc += term / (nf * (nf - 1.0));
            term *= -u;
        }
        acc
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

pub fn quadratic_kernel(u: f64) -> f64 {
    0.5 * u * u
}

/// Padé approximant of `h`, exact through fourth order.
pub fn pade_kernel(u: f64) -> f64 {
    0.5 * u * u * (1.0 + u / 6.0) / (1.0 + 0.5 * u)
}

/// Loss of moving from `w_base` to `w_base + delta` under the chosen kernel.
pub fn loss_kernel(w_base: &WeightVector, delta: &[f64], kind: LossKernelKind) -> Result<f64> {
    check_dims(w_base.len(), delta.len())?;
    let drift: f64 = delta.iter().sum();
    if drift.abs() > 1e-10 {
        return Err(Error::invalid(format!("weight changes sum to {drift}, expected 0")));
    }
    let mut acc = 0.0;
    for (i, (&w, &d)) in w_base.iter().zip(delta).enumerate() {
        let u = d / w;
        if kind != LossKernelKind::Quadratic && u <= -1.0 {
            return Err(Error::invalid(format!(
                "relative change {u} <= -1 at component {i}"
            )));
        }
        acc += w * kind.component(u);
    }
    Ok(acc)
}

/// Kernel loss of a step between two valid weight vectors (infallible form).
pub(crate) fn step_loss(prev: &[f64], next: &[f64], kind: LossKernelKind) -> f64 {
    match kind {
        LossKernelKind::ExactKl => kl_raw(next, prev),
        _ => prev
            .iter()
            .zip(next)
            .map(|(&w, &n)| w * kind.component((n - w) / w))
            .sum(),
    }
}

/// Bhattacharyya coefficient `sum sqrt(a_i b_i)`.
pub fn bhattacharyya(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum()
}

/// Fisher–Rao half-angle `Omega = arccos(BC)` between two weight vectors.
pub fn geodesic_angle(w_start: &WeightVector, w_end: &WeightVector) -> Result<f64> {
    check_dims(w_start.len(), w_end.len())?;
    Ok(angle_raw(w_start, w_end))
}

pub(crate) fn angle_raw(a: &[f64], b: &[f64]) -> f64 {
    let bc = bhattacharyya(a, b);
    if bc > 1.0 - SMALL_ANGLE_GAP {
        // Nearly coincident: arccos loses half the digits. The chord between
        // the Hellinger points is 2 sin(Omega / 2), which is well conditioned.
        let chord2: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x.sqrt() - y.sqrt();
                d * d
            })
            .sum();
        return 2.0 * (0.5 * chord2.sqrt()).min(1.0).asin();
    }
    bc.clamp(-1.0, 1.0).acos()
}
