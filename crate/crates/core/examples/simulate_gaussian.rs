//! Evolve the Kerr mode under a Gaussian pulse train and print the
//! periodic-window minima of n and g².
//!
//!     cargo run --release --example simulate_gaussian [out.csv]

use kerr_blockade::fock::SystemParams;
use kerr_blockade::pulse::{GaussianTrain, PulseSpec};
use kerr_blockade::run::{simulate, RunConfig};

fn main() -> kerr_blockade::Result<()> {
    let pulse = PulseSpec::Gaussian(GaussianTrain {
        eps_p: 0.1,
        a_param: 5.27,
        period: 5.0,
    });
    let cfg = RunConfig::new(SystemParams::new(0.5, 0.05), pulse);
    let (traj, s) = simulate(&cfg)?;

    println!("samples       {}", traj.len());
    println!("window        [{}, {}]", s.window_start, s.t_end);
    println!("n_min         {:.4e} at t = {:.4}", s.n_min.unwrap_or(f64::NAN), s.t_n_min.unwrap_or(f64::NAN));
    println!("g2_min        {:.4e} at t = {:.4}", s.g2_min.unwrap_or(f64::NAN), s.t_g2_min.unwrap_or(f64::NAN));
    if let Some((t, g)) = traj.g2_min(s.window_start) {
        println!("g2_min (grid) {g:.4e} at t = {t:.4}");
    }

    if let Some(path) = std::env::args().nth(1) {
        traj.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
