//! The two-photon population dip from destructive interference: minimum of
//! P₂ with and without the Kerr term, resolved between samples.
//!
//!     cargo run --release --example interference

use kerr_blockade::fock::{self, EvolveOptions, Observable, SystemParams};
use kerr_blockade::pulse::{GaussianTrain, PulseSpec};

fn main() -> kerr_blockade::Result<()> {
    let pulse = PulseSpec::Gaussian(GaussianTrain {
        eps_p: 0.1,
        a_param: 5.27,
        period: 5.0,
    });
    let opts = EvolveOptions {
        keep_snapshots: true,
        ..Default::default()
    };
    let mut mins = Vec::new();
    for u in [0.05, 0.0] {
        let p = SystemParams::new(0.5, u);
        let traj = fock::evolve(&p, &pulse, 50.0, 0.01, &opts)?;
        let m = fock::refine_minimum(&p, &pulse, &traj, 25.0, Observable::Population(2), &opts)?
            .expect("window has samples");
        println!("U = {u:<5} min P2 = {:.3e} at t = {:.4}", m.value, m.t);
        mins.push(m.value);
    }
    println!("suppression factor {:.0}", mins[1] / mins[0]);
    Ok(())
}
