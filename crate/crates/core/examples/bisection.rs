// Trig-free SLERP: repeatedly take the normalised AM+GM midpoint of
// neighbouring points. Depth `d` reproduces the `2^d`-step geodesic.

use rebal::interpolation::{amgm_midpoint, bisection_path, slerp_path};
use rebal::WeightVector;

pub fn run() -> rebal::Result<()> {
    let start = WeightVector::new(vec![0.05, 0.55, 0.40])?;
    let end = WeightVector::new(vec![0.40, 0.50, 0.10])?;

    let mid = amgm_midpoint(&start, &end);
    println!("AM+GM midpoint: {mid:.6?}");

    for depth in 1..=6 {
        let b = bisection_path(&start, &end, depth)?;
        let s = slerp_path(&start, &end, 1 << depth)?;
        let err = b
            .points()
            .iter()
            .zip(s.points())
            .flat_map(|(p, q)| p.iter().zip(q.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        println!("depth {depth}: {:>3} steps, max |bisection - slerp| = {err:.2e}", b.steps());
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
