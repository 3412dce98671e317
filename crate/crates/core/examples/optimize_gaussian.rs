//! Swarm search for the Gaussian-train blockade optimum over the standard
//! ranges. A full run (20 particles, 50 iterations) takes a few minutes.
//!
//!     cargo run --release --example optimize_gaussian [seed] [iterations]

use kerr_blockade::fitness::{evaluate_report, objective, FitnessSpec, ParamVector, PulseFamily};
use kerr_blockade::pso::{optimize_with, PsoConfig};

fn main() -> kerr_blockade::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let n_iters = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);

    let family = PulseFamily::Gaussian;
    let spec = FitnessSpec::default();
    let cfg = PsoConfig {
        seed,
        n_iters,
        ..Default::default()
    };
    let res = optimize_with(&family.default_bounds(), &cfg, objective(family, spec), |s| {
        println!("iter {:>3}  best g2min {:.4e}", s.iter, s.global_best_fit);
    })?;

    let best = ParamVector::from_slice(family, &res.best_pos)?;
    for (name, v) in family.param_names().iter().zip(&res.best_pos) {
        println!("{name:>6} = {v:.4}");
    }
    let r = evaluate_report(&best, &spec)?;
    println!("g2min {:.4e} at t = {:.4}, n_min {:.4e}", r.g2min, r.t_at_min, r.n_min);
    Ok(())
}
