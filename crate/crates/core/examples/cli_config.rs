//! Build a run configuration in code, save it as JSON and run the
//! simulate and analytic-compare commands into a directory.
//!
//!     cargo run --release --example cli_config [out_dir]

use std::path::PathBuf;

use kerr_blockade::fock::SystemParams;
use kerr_blockade::pulse::{GaussianTrain, PulseSpec};
use kerr_blockade::run::{cmd_analytic_compare, cmd_simulate, RunConfig, RunOptions};

fn main() -> kerr_blockade::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "out/fig".into());
    let pulse = PulseSpec::Gaussian(GaussianTrain {
        eps_p: 0.1,
        a_param: 5.27,
        period: 5.0,
    });
    let cfg = RunConfig::new(SystemParams::new(0.5, 0.05), pulse);
    std::fs::create_dir_all(&out)?;
    let path = out.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg)?)?;

    let cfg = RunConfig::load(&path)?;
    let opts = RunOptions {
        out_dir: Some(out.clone()),
        seed: None,
        svg: true,
    };
    let s = cmd_simulate(&cfg, &opts)?;
    let r = cmd_analytic_compare(&cfg, &opts)?;
    println!("g2_min {:?}, max P2 deviation {:.3e}", s.g2_min, r.max_rel_dev_p2);
    println!("artifacts in {}", out.display());
    Ok(())
}
