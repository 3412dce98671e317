//! Weak-excitation populations against the master equation in the periodic
//! regime, at the blockade point and without the Kerr term.
//!
//!     cargo run --release --example analytic_compare

use kerr_blockade::fock::SystemParams;
use kerr_blockade::pulse::{GaussianTrain, PulseSpec};
use kerr_blockade::run::{analytic_compare, RunConfig};

fn main() -> kerr_blockade::Result<()> {
    let pulse = PulseSpec::Gaussian(GaussianTrain {
        eps_p: 0.1,
        a_param: 5.27,
        period: 5.0,
    });
    for u in [0.05, 0.0] {
        let cfg = RunConfig::new(SystemParams::new(0.5, u), pulse);
        let (rows, r) = analytic_compare(&cfg, pulse.default_k_max())?;
        println!("U = {u}");
        println!("  compared {} of {} samples", r.points_compared, rows.len());
        println!("  max |dP1|/P1 = {:.3e}", r.max_rel_dev_p1);
        println!("  max |dP2|/P2 = {:.3e}", r.max_rel_dev_p2);
        let p2_min = rows.iter().map(|x| x[2]).fold(f64::INFINITY, f64::min);
        println!("  min P2 (numerical, grid) = {p2_min:.3e}");
    }
    Ok(())
}
