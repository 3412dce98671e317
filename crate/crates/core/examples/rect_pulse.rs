//! Trapezoidal pulse train: envelope over one period, then the periodic
//! minima of n and g² from a full simulation.
//!
//!     cargo run --release --example rect_pulse

use kerr_blockade::fock::SystemParams;
use kerr_blockade::pulse::{PulseSpec, RectTrain};
use kerr_blockade::run::{simulate, RunConfig};

fn main() -> kerr_blockade::Result<()> {
    let rect = RectTrain {
        eps_m: 0.465,
        t_r: 0.468,
        t_w: 0.372,
        t_f: 0.016,
        period: 4.365,
    };
    let pulse = PulseSpec::Rect(rect);
    println!("corners {:?}", rect.corners());
    for k in 0..=9 {
        let t = k as f64 * 0.1;
        println!("  eps({t:.1}) = {:.4}", pulse.envelope(1.0, t));
    }

    let mut cfg = RunConfig::new(SystemParams::new(0.617, 0.05), pulse);
    cfg.sim.t_end = Some(10.0 * rect.period);
    let (_, s) = simulate(&cfg)?;
    println!("n_min  {:.4e} at t = {:.4}", s.n_min.unwrap_or(f64::NAN), s.t_n_min.unwrap_or(f64::NAN));
    println!("g2_min {:.4e} at t = {:.4}", s.g2_min.unwrap_or(f64::NAN), s.t_g2_min.unwrap_or(f64::NAN));
    Ok(())
}
