//! Fourier coefficients of both pulse families and how well the truncated
//! series rebuilds the envelope.
//!
//!     cargo run --release --example fourier_series

use kerr_blockade::pulse::{fourier_coeffs, reconstruct, GaussianTrain, PulseSpec, RectTrain};

fn main() -> kerr_blockade::Result<()> {
    let gaussian = PulseSpec::Gaussian(GaussianTrain {
        eps_p: 0.1,
        a_param: 5.27,
        period: 5.0,
    });
    let rect = PulseSpec::Rect(RectTrain {
        eps_m: 0.465,
        t_r: 0.468,
        t_w: 0.372,
        t_f: 0.016,
        period: 4.365,
    });

    for (name, pulse) in [("gaussian", gaussian), ("rect", rect)] {
        println!("{name}");
        let series = fourier_coeffs(&pulse, 1.0, pulse.default_k_max())?;
        for k in [0, 1, 2, 5, 10, 20] {
            let c = series.coeff(k);
            println!("  eps_{k:<3} = {:+.6e} {:+.6e}i", c.re, c.im);
        }
        println!("  reality error {:.2e}", series.reality_error());
        for k_max in [10, 50, 200] {
            let s = fourier_coeffs(&pulse, 1.0, k_max)?;
            let worst = (0..400)
                .map(|j| j as f64 * pulse.period() / 400.0)
                .map(|t| Ok((reconstruct(&s, t)? - pulse.envelope(1.0, t)).abs()))
                .collect::<kerr_blockade::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            println!("  K = {k_max:<4} max reconstruction error {worst:.3e}");
        }
    }
    Ok(())
}
