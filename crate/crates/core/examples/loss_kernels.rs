// The per-component loss `h(u) = (1 + u) ln(1 + u) - u` against its
// quadratic and Padé approximations.

use rebal::simplex::{kl_kernel, pade_kernel, quadratic_kernel};

pub fn run() -> rebal::Result<()> {
    println!("{:>8} {:>14} {:>12} {:>12}", "u", "h(u)", "quad err", "pade err");
    for u in [-0.9, -0.5, -0.1, 0.01, 0.1, 0.5, 0.9] {
        let h = kl_kernel(u);
        println!(
            "{u:>8} {h:>14.6e} {:>12.2e} {:>12.2e}",
            (quadratic_kernel(u) - h).abs(),
            (pade_kernel(u) - h).abs()
        );
    }
    Ok(())
}

fn main() -> rebal::Result<()> {
    run()
}
