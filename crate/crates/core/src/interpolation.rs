//! Weight trajectories between two simplex points.
//!
//! SLERP in Hellinger coordinates is the Fisher–Rao geodesic and spreads
//! the KL loss evenly across steps. The other generators are the common
//! heuristics it is compared against, plus two trig-free constructions
//! (the Lambert-W midpoint and recursive AM+GM bisection).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::simplex::{angle_raw, WeightVector};
use crate::special::lambert_w0;

/// Below this geodesic angle SLERP falls back to affine interpolation of `eta`.
pub const SLERP_FALLBACK_ANGLE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Linear,
    Geometric,
    Amgm,
    Slerp,
    Bisection,
    LambertwMidpoint,
    Custom,
}

impl Method {
    /// The four generators compared in the uniformity table.
    pub const HEURISTICS: [Method; 4] = [Method::Linear, Method::Geometric, Method::Amgm, Method::Slerp];

    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Geometric => "geometric",
            Method::Amgm => "amgm",
            Method::Slerp => "slerp",
            Method::Bisection => "bisection",
            Method::LambertwMidpoint => "lambertw_midpoint",
            Method::Custom => "custom",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "linear" | "am" => Ok(Method::Linear),
            "geometric" | "gm" => Ok(Method::Geometric),
            "amgm" | "am+gm" => Ok(Method::Amgm),
            "slerp" => Ok(Method::Slerp),
            "bisection" => Ok(Method::Bisection),
            "lambertw_midpoint" | "lambertw" | "lambert" => Ok(Method::LambertwMidpoint),
            "custom" => Ok(Method::Custom),
            other => Err(Error::invalid(format!("unknown interpolation method '{other}'"))),
        }
    }
}

/// `f + 1` weight vectors from `points[0]` to `points[f]`, one per block step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    points: Vec<WeightVector>,
    method: Method,
}

impl Trajectory {
    /// Build a trajectory from explicit points (at least two, same dimension).
    pub fn from_points(points: Vec<WeightVector>, method: Method) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a trajectory needs at least two points"));
        }
        let n = points[0].len();
        for p in &points {
            check_dims(n, p.len())?;
        }
        Ok(Trajectory { points, method })
    }

    pub fn points(&self) -> &[WeightVector] {
        &self.points
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Number of steps `f`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn n_tokens(&self) -> usize {
        self.points[0].len()
    }

    pub fn start(&self) -> &WeightVector {
        &self.points[0]
    }

    pub fn end(&self) -> &WeightVector {
        self.points.last().expect("non-empty")
    }

    pub fn into_points(self) -> Vec<WeightVector> {
        self.points
    }
}

fn check_endpoints(w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<()> {
    check_dims(w_start.len(), w_end.len())?;
    if f == 0 {
        return Err(Error::invalid("step count f must be at least 1"));
    }
    Ok(())
}

/// Build `f + 1` points with exact endpoints and `point(t)` in between.
fn build<F>(w_start: &WeightVector, w_end: &WeightVector, f: usize, method: Method, mut point: F) -> Result<Trajectory>
where
    F: FnMut(f64) -> Vec<f64>,
{
    check_endpoints(w_start, w_end, f)?;
    if w_start == w_end {
        return Ok(Trajectory { points: vec![w_start.clone(); f + 1], method });
    }
    let mut points = Vec::with_capacity(f + 1);
    points.push(w_start.clone());
    for k in 1..f {
        let t = k as f64 / f as f64;
        points.push(WeightVector::normalized(point(t), 0.0)?);
    }
    points.push(w_end.clone());
    Ok(Trajectory { points, method })
}

pub fn linear_path(w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<Trajectory> {
    build(w_start, w_end, f, Method::Linear, |t| {
        w_start.iter().zip(w_end.iter()).map(|(&a, &b)| (1.0 - t) * a + t * b).collect()
    })
}

pub fn geometric_path(w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<Trajectory> {
    build(w_start, w_end, f, Method::Geometric, |t| {
        w_start.iter().zip(w_end.iter()).map(|(&a, &b)| a.powf(1.0 - t) * b.powf(t)).collect()
    })
}

/// `normalise(AM_t + GM_t)`.
pub fn amgm_path(w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<Trajectory> {
    build(w_start, w_end, f, Method::Amgm, |t| {
        w_start
            .iter()
            .zip(w_end.iter())
            .map(|(&a, &b)| (1.0 - t) * a + t * b + a.powf(1.0 - t) * b.powf(t))
            .collect()
    })
}

/// Unnormalised point at parameter `t` on the Hellinger great circle.
fn slerp_raw(w_start: &[f64], w_end: &[f64], omega: f64, t: f64) -> Vec<f64> {
    if omega < SLERP_FALLBACK_ANGLE {
        let eta: Vec<f64> = w_start
            .iter()
            .zip(w_end)
            .map(|(&a, &b)| (1.0 - t) * a.sqrt() + t * b.sqrt())
            .collect();
        return eta.iter().map(|e| e * e).collect();
    }
    let s = omega.sin();
    let ca = ((1.0 - t) * omega).sin() / s;
    let cb = (t * omega).sin() / s;
    w_start
        .iter()
        .zip(w_end)
        .map(|(&a, &b)| {
            let e = ca * a.sqrt() + cb * b.sqrt();
            e * e
        })
        .collect()
}

/// Point at parameter `t in [0, 1]` on the continuous SLERP curve.
pub fn slerp_point(w_start: &WeightVector, w_end: &WeightVector, t: f64) -> Result<WeightVector> {
    check_dims(w_start.len(), w_end.len())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("curve parameter {t} outside [0, 1]")));
    }
    let omega = angle_raw(w_start, w_end);
    WeightVector::normalized(slerp_raw(w_start, w_end, omega, t), 0.0)
}

/// Constant-speed great-circle path in Hellinger coordinates.
pub fn slerp_path(w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<Trajectory> {
    check_dims(w_start.len(), w_end.len())?;
    let omega = angle_raw(w_start, w_end);
    build(w_start, w_end, f, Method::Slerp, |t| slerp_raw(w_start, w_end, omega, t))
}

/// Two-token SLERP as linear interpolation of `theta = arcsin(sqrt(w))`.
pub fn two_token_theta_path(w_start: f64, w_end: f64, f: usize) -> Result<Trajectory> {
    let a = WeightVector::two_token(w_start)?;
    let b = WeightVector::two_token(w_end)?;
    let th_s = w_start.sqrt().asin();
    let th_e = w_end.sqrt().asin();
    build(&a, &b, f, Method::Slerp, |t| {
        let w = (th_s + t * (th_e - th_s)).sin().powi(2);
        vec![w, 1.0 - w]
    })
}

/// Unnormalised two-step optimum `m_i = e_i / W0(e * e_i / s_i)`.
pub(crate) fn lambertw_midpoint_raw(w_start: &[f64], w_end: &[f64]) -> Result<Vec<f64>> {
    w_start
        .iter()
        .zip(w_end)
        .map(|(&s, &e)| Ok(e / lambert_w0(std::f64::consts::E * e / s)?))
        .collect()
}

/// Loss-minimising intermediate point for a two-step rebalance, renormalised.
pub fn lambertw_midpoint(w_start: &WeightVector, w_end: &WeightVector) -> Result<WeightVector> {
    check_dims(w_start.len(), w_end.len())?;
    WeightVector::normalized(lambertw_midpoint_raw(w_start, w_end)?, 0.0)
}

/// Three-point trajectory `[start, lambert midpoint, end]`.
pub fn lambertw_midpoint_path(w_start: &WeightVector, w_end: &WeightVector) -> Result<Trajectory> {
    let mid = lambertw_midpoint(w_start, w_end)?;
    Trajectory::from_points(vec![w_start.clone(), mid, w_end.clone()], Method::LambertwMidpoint)
}

/// `normalise((a + b) / 2 + sqrt(a b))`: the exact SLERP midpoint.
pub fn amgm_midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    let m: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| 0.5 * (x + y) + (x * y).sqrt()).collect();
    let s: f64 = m.iter().sum();
    m.into_iter().map(|x| x / s).collect()
}

/// SLERP at `f = 2^depth` using only `+`, `*`, `sqrt` and normalisation.
pub fn bisection_path(w_start: &WeightVector, w_end: &WeightVector, depth: u32) -> Result<Trajectory> {
    check_dims(w_start.len(), w_end.len())?;
    if depth == 0 {
        return Err(Error::invalid("bisection depth must be at least 1"));
    }
    if depth > 24 {
        return Err(Error::invalid(format!("bisection depth {depth} too large")));
    }
    let f = 1usize << depth;
    let mut pts: Vec<Option<Vec<f64>>> = vec![None; f + 1];
    pts[0] = Some(w_start.to_vec());
    pts[f] = Some(w_end.to_vec());
    let mut stride = f;
    while stride > 1 {
        let half = stride / 2;
        let mut lo = 0;
        while lo < f {
            let hi = lo + stride;
            let m = amgm_midpoint(pts[lo].as_ref().unwrap(), pts[hi].as_ref().unwrap());
            pts[lo + half] = Some(m);
            lo = hi;
        }
        stride = half;
    }
    let mut points = Vec::with_capacity(f + 1);
    for (k, p) in pts.into_iter().enumerate() {
        let p = p.expect("every dyadic slot filled");
        if k == 0 {
            points.push(w_start.clone());
        } else if k == f {
            points.push(w_end.clone());
        } else {
            points.push(WeightVector::normalized(p, 0.0)?);
        }
    }
    Ok(Trajectory { points, method: Method::Bisection })
}

/// Dispatch on `method` for an `f`-step trajectory.
///
/// `Bisection` requires `f` to be a power of two; `LambertwMidpoint` requires `f = 2`.
pub fn interpolate(method: Method, w_start: &WeightVector, w_end: &WeightVector, f: usize) -> Result<Trajectory> {
    match method {
        Method::Linear => linear_path(w_start, w_end, f),
        Method::Geometric => geometric_path(w_start, w_end, f),
        Method::Amgm => amgm_path(w_start, w_end, f),
        Method::Slerp => slerp_path(w_start, w_end, f),
        Method::Bisection => {
            if f < 2 || !f.is_power_of_two() {
                return Err(Error::invalid(format!(
                    "bisection needs a power-of-two step count >= 2, got {f}"
                )));
            }
            bisection_path(w_start, w_end, f.trailing_zeros())
        }
        Method::LambertwMidpoint => {
            if f != 2 {
                return Err(Error::invalid(format!(
                    "the Lambert-W midpoint is a two-step construction, got f = {f}"
                )));
            }
            lambertw_midpoint_path(w_start, w_end)
        }
        Method::Custom => Err(Error::invalid("custom trajectories are built with Trajectory::from_points")),
    }
}
