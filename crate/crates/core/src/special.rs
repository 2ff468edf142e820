//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

const INV_E: f64 = 0.367_879_441_171_442_33;
const MAX_ITER: usize = 50;

/// Principal branch `W0(x)`: the solution `W >= -1` of `W e^W = x`.
///
/// Starts from a branch-point series near `-1/e`, `ln(1 + x)` in the middle
/// range and the asymptotic `ln x - ln ln x` for large `x`, then polishes
/// with Halley's method.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite("lambert_w0 argument is NaN".into()));
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // Allow a rounding-sized undershoot of the branch point.
    if x < -INV_E {
        if x >= -INV_E - 4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::invalid(format!(
            "lambert_w0 requires x >= -1/e, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = if x < -0.25 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p() * (1.0 - 0.25 * x.ln_1p() / (1.0 + x.ln_1p()))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    if w <= -1.0 {
        return Ok(-1.0);
    }

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 <= 0.0 {
            return Ok(-1.0);
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if w < -1.0 {
            w = -1.0;
        }
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    let residual = w * w.exp() - x;
    if residual.abs() <= 1e-12 * x.abs().max(1.0) {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
            residual: residual.abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_below_branch_point() {
        assert!(lambert_w0(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn back_substitution_on_log_grid() {
        // negative side: -1/e + 10^-k
        for k in 1..=9 {
            let x = -INV_E + 10f64.powi(-k);
            let w = lambert_w0(x).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-12, "x={x}");
        }
        let mut x = 1e-12;
        while x <= 1e6 {
            for sign in [1.0, -1.0] {
                let xv = sign * x;
                if xv < -INV_E {
                    continue;
                }
                let w = lambert_w0(xv).unwrap();
                assert!(
                    (w * w.exp() - xv).abs() <= 1e-12 * xv.abs().max(1.0),
                    "x={xv}"
                );
            }
            x *= 1.37;
        }
    }
}
