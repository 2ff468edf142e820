//! Every cargo example must keep running: each is included here and its
//! `run` called.

#[allow(dead_code)]
mod slerp_vs_heuristics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/slerp_vs_heuristics.rs"));
}

#[test]
fn slerp_vs_heuristics_runs() {
    slerp_vs_heuristics::run().expect("slerp_vs_heuristics example");
}

#[allow(dead_code)]
mod bisection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bisection.rs"));
}

#[test]
fn bisection_runs() {
    bisection::run().expect("bisection example");
}

#[allow(dead_code)]
mod optimal_steps {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/optimal_steps.rs"));
}

#[test]
fn optimal_steps_runs() {
    optimal_steps::run().expect("optimal_steps example");
}

#[allow(dead_code)]
mod monte_carlo {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/monte_carlo.rs"));
}

#[test]
fn monte_carlo_runs() {
    monte_carlo::run().expect("monte_carlo example");
}

#[allow(dead_code)]
mod brute_force {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/brute_force.rs"));
}

#[test]
fn brute_force_runs() {
    brute_force::run().expect("brute_force example");
}

#[allow(dead_code)]
mod pendulum {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pendulum.rs"));
}

#[test]
fn pendulum_runs() {
    pendulum::run().expect("pendulum example");
}

#[allow(dead_code)]
mod fee_bands {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fee_bands.rs"));
}

#[test]
fn fee_bands_runs() {
    fee_bands::run().expect("fee_bands example");
}

#[allow(dead_code)]
mod jacobi_speed {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/jacobi_speed.rs"));
}

#[test]
fn jacobi_speed_runs() {
    jacobi_speed::run().expect("jacobi_speed example");
}

#[allow(dead_code)]
mod replay_csv {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/replay_csv.rs"));
}

#[test]
fn replay_csv_runs() {
    replay_csv::run().expect("replay_csv example");
}

#[allow(dead_code)]
mod lambert_midpoint {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lambert_midpoint.rs"));
}

#[test]
fn lambert_midpoint_runs() {
    lambert_midpoint::run().expect("lambert_midpoint example");
}

#[allow(dead_code)]
mod loss_kernels {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/loss_kernels.rs"));
}

#[test]
fn loss_kernels_runs() {
    loss_kernels::run().expect("loss_kernels example");
}

#[allow(dead_code)]
mod price_models {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/price_models.rs"));
}

#[test]
fn price_models_runs() {
    price_models::run().expect("price_models example");
}
