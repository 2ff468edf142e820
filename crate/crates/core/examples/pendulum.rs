// Two-token trajectories under LVR forcing. With `theta = arcsin(sqrt(w))`
// the optimal path solves `theta'' = mu sin(4 theta)`; small `mu` bends the
// geodesic slightly (captured by the Green's-function correction), large
// `mu` drives it to a vertex.

use rebal::dynamics::{greens_correction, solve_pendulum, DEFAULT_GRID};

pub fn run() -> rebal::Result<()> {
    let (ts, te) = (0.5f64.sqrt().asin(), 0.9f64.sqrt().asin());
    println!("{:>6} {:>12} {:>14} {:>10}", "mu", "max|dtheta|", "|bvp - greens|", "w(1/2)");
    for mu in [0.0, 0.004, 0.1, 1.0, 10.0, 100.0] {
        let sol = solve_pendulum(ts, te, mu, DEFAULT_GRID)?;
        let s = sol.s_grid();
        let eps = greens_correction(ts, te - ts, mu, &s)?;
        let (mut dev, mut gap) = (0.0f64, 0.0f64);
        for (j, sj) in s.iter().enumerate() {
            let line = ts + (te - ts) * sj;
            dev = dev.max((sol.theta[j] - line).abs());
            gap = gap.max((sol.theta[j] - line - eps[j]).abs());
        }
        let mid = sol.weights()[DEFAULT_GRID / 2];
        println!("{mu:>6} {dev:>12.4e} {gap:>14.4e} {mid:>10.6}");
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
