//! The particle swarm on a 3-D sphere function, printing the global-best
//! history. Same seed, same history.
//!
//!     cargo run --release --example pso_sphere [seed]

use kerr_blockade::pso::{optimize, Bounds, PsoConfig};

fn main() -> kerr_blockade::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let bounds = Bounds::new(vec![-5.0; 3], vec![5.0; 3])?;
    let cfg = PsoConfig { seed, ..Default::default() };
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let res = optimize(&bounds, &cfg, sphere)?;
    for (k, f) in res.history.iter().enumerate().step_by(5) {
        println!("iter {k:>3}  best {f:.3e}");
    }
    println!("best {:.3e} at {:?}", res.best_fit, res.best_pos);
    Ok(())
}
