//! Fixed-grid composite Simpson quadrature on `[0, 1]`.

/// Default number of Simpson intervals used for path averages.
pub const DEFAULT_INTERVALS: usize = 256;

/// Composite Simpson rule over `[0, 1]` with `intervals` sub-intervals.
///
/// `intervals` is rounded up to the next even number.
pub fn simpson_unit<F: FnMut(f64) -> f64>(mut f: F, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for j in 1..n {
        let weight = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(j as f64 * h);
    }
    acc * h / 3.0
}
