//! g2min against detuning around the Gaussian blockade point, and the many
//! local minima of the trapezoidal train.
//!
//!     cargo run --release --example sweep_detuning

use kerr_blockade::fitness::{linspace, sweep, FitnessSpec, ParamVector, PulseFamily};

fn local_minima(curve: &[(f64, f64)]) -> Vec<f64> {
    curve
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .collect()
}

fn main() -> kerr_blockade::Result<()> {
    let spec = FitnessSpec::default();

    let gaussian = ParamVector::from_slice(PulseFamily::Gaussian, &[0.5, 0.1, 5.0, 5.27])?;
    let curve = sweep(&gaussian, "delta", &linspace(0.0, 1.0, 21), &spec)?;
    for (d, g) in &curve {
        println!("delta {d:>5.2}  g2min {g:.4e}");
    }
    println!("gaussian minima at {:?}", local_minima(&curve));

    let rect = ParamVector::from_slice(PulseFamily::Rect, &[0.617, 0.465, 0.468, 0.372, 0.016, 4.365])?;
    let curve = sweep(&rect, "delta", &linspace(-5.0, 5.0, 100), &spec)?;
    let mins = local_minima(&curve);
    println!("rect: {} local minima at {:.2?}", mins.len(), mins);
    Ok(())
}
