//! Run configuration files and the four commands behind the `blockade` binary.
//!
//! Every command writes its artifacts into one output directory, including a
//! `run.json` with the resolved configuration, seed and crate version.

pub mod svg;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::fitness::{self, FitnessSpec, ParamVector, PulseFamily};
use crate::fock::{self, EvolveOptions, Observable, SystemParams, Trajectory};
use crate::pso::{self, Bounds, PsoConfig};
use crate::pulse::PulseSpec;
use svg::{LinePlot, Series};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_OUTPUT_DIR: &str = "out";
/// Analytic comparison only counts samples where `P₁` exceeds this.
pub const COMPARE_P1_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSettings {
    /// `None` means `max(10 T, 30/γ)`.
    pub t_end: Option<f64>,
    pub dt_out: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            t_end: None,
            dt_out: fock::DEFAULT_DT_OUT,
            rtol: fock::DEFAULT_RTOL,
            atol: fock::DEFAULT_ATOL,
        }
    }
}

/// Optimizer settings plus per-parameter search ranges by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoSection {
    pub n_particles: usize,
    pub n_iters: usize,
    pub w: f64,
    pub f1: f64,
    pub f2: f64,
    pub seed: u64,
    pub v_max_frac: f64,
    pub parallel: bool,
    /// Overrides of the family's default ranges, e.g. `{"delta": [-2, 2]}`.
    pub bounds: BTreeMap<String, [f64; 2]>,
}

impl Default for PsoSection {
    fn default() -> Self {
        Self::from_config(&PsoConfig::default())
    }
}

impl PsoSection {
    fn from_config(c: &PsoConfig) -> Self {
        Self {
            n_particles: c.n_particles,
            n_iters: c.n_iters,
            w: c.w,
            f1: c.f1,
            f2: c.f2,
            seed: c.seed,
            v_max_frac: c.v_max_frac,
            parallel: c.parallel,
            bounds: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> PsoConfig {
        PsoConfig {
            n_particles: self.n_particles,
            n_iters: self.n_iters,
            w: self.w,
            f1: self.f1,
            f2: self.f2,
            seed: self.seed,
            v_max_frac: self.v_max_frac,
            parallel: self.parallel,
        }
    }

    pub fn bounds(&self, family: PulseFamily) -> Result<Bounds> {
        let mut b = family.default_bounds();
        for (name, [lo, hi]) in &self.bounds {
            let j = family.param_index(name)?;
            b.lo[j] = *lo;
            b.hi[j] = *hi;
        }
        Bounds::new(b.lo, b.hi)
    }
}

/// Fitness settings; unset tolerances and sampling fall back to `sim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitnessSettings {
    pub window_start_frac: f64,
    pub n_floor: f64,
    /// `None` means `max(10 T, 30/γ)` for each candidate's own period.
    pub t_end: Option<f64>,
    pub dt_out: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

impl Default for FitnessSettings {
    fn default() -> Self {
        Self {
            window_start_frac: fitness::DEFAULT_WINDOW_START_FRAC,
            n_floor: fock::DEFAULT_N_FLOOR,
            t_end: None,
            dt_out: None,
            rtol: None,
            atol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub pulse: PulseSpec,
    #[serde(default)]
    pub sim: SimSettings,
    #[serde(default)]
    pub pso: PsoSection,
    #[serde(default)]
    pub fitness: FitnessSettings,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(system: SystemParams, pulse: PulseSpec) -> Self {
        Self {
            system,
            pulse,
            sim: SimSettings::default(),
            pso: PsoSection::default(),
            fitness: FitnessSettings::default(),
            output_dir: None,
        }
    }

    /// Parses and validates; unknown keys are rejected by name.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.pulse.validate()?;
        if !(self.sim.dt_out > 0.0) || self.sim.t_end.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Config("sim.t_end and sim.dt_out must be positive".into()));
        }
        self.pso.config().validate()?;
        self.pso.bounds(self.family())?;
        self.fitness_spec().window(self.pulse.period())?;
        Ok(())
    }

    pub fn family(&self) -> PulseFamily {
        PulseFamily::of(&self.pulse)
    }

    pub fn t_end(&self) -> f64 {
        self.sim
            .t_end
            .unwrap_or_else(|| fitness::default_t_end(self.pulse.period(), self.system.gamma))
    }

    /// Start of the periodic window for this configuration's horizon.
    pub fn window_start(&self) -> f64 {
        self.fitness.window_start_frac * self.t_end()
    }

    pub fn fitness_spec(&self) -> FitnessSpec {
        FitnessSpec {
            u: self.system.u,
            gamma: self.system.gamma,
            fock_dim: self.system.fock_dim,
            window_start_frac: self.fitness.window_start_frac,
            n_floor: self.fitness.n_floor,
            dt_out: self.fitness.dt_out.unwrap_or(self.sim.dt_out),
            rtol: self.fitness.rtol.unwrap_or(self.sim.rtol),
            atol: self.fitness.atol.unwrap_or(self.sim.atol),
            t_end: self.fitness.t_end,
        }
    }

    pub fn base_vector(&self) -> ParamVector {
        ParamVector::from_parts(self.system.delta, &self.pulse)
    }

    fn evolve_options(&self, keep_snapshots: bool) -> EvolveOptions {
        EvolveOptions {
            rtol: self.sim.rtol,
            atol: self.sim.atol,
            n_floor: self.fitness.n_floor,
            keep_snapshots,
            check_invariants: true,
        }
    }
}

/// Command-line overrides shared by all commands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub svg: bool,
}

impl RunOptions {
    fn resolve(&self, cfg: &RunConfig) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = cfg.clone();
        if let Some(seed) = self.seed {
            cfg.pso.seed = seed;
        }
        let dir = self
            .out_dir
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        cfg.output_dir = Some(dir.clone());
        fs::create_dir_all(&dir)?;
        Ok((cfg, dir))
    }
}

/// Record written as `run.json` by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub best_params: Option<BTreeMap<String, f64>>,
    pub best_vector: Option<Vec<f64>>,
    pub best_fitness: Option<f64>,
}

impl RunResult {
    fn new(command: &str, cfg: &RunConfig, started: Instant) -> Self {
        Self {
            command: command.into(),
            version: VERSION.into(),
            seed: cfg.pso.seed,
            wall_time_s: started.elapsed().as_secs_f64(),
            config: cfg.clone(),
            best_params: None,
            best_vector: None,
            best_fitness: None,
        }
    }
}

/// Minima of `n` and `g²` over the periodic window, resolved below the sampling step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub t_end: f64,
    pub window_start: f64,
    pub n_min: Option<f64>,
    pub t_n_min: Option<f64>,
    pub g2_min: Option<f64>,
    pub t_g2_min: Option<f64>,
}

/// Evolves the configured system from vacuum and summarizes the periodic window.
pub fn simulate(cfg: &RunConfig) -> Result<(Trajectory, Summary)> {
    let opts = cfg.evolve_options(true);
    let t_end = cfg.t_end();
    let window_start = cfg.window_start();
    let traj = fock::evolve(&cfg.system, &cfg.pulse, t_end, cfg.sim.dt_out, &opts)?;
    let n = fock::refine_minimum(&cfg.system, &cfg.pulse, &traj, window_start, Observable::MeanPhoton, &opts)?;
    let g = fock::refine_minimum(
        &cfg.system,
        &cfg.pulse,
        &traj,
        window_start,
        Observable::G2 {
            n_floor: cfg.fitness.n_floor,
        },
        &opts,
    )?;
    let summary = Summary {
        t_end,
        window_start,
        n_min: n.map(|e| e.value),
        t_n_min: n.map(|e| e.t),
        g2_min: g.map(|e| e.value),
        t_g2_min: g.map(|e| e.t),
    };
    Ok((traj, summary))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_svg(dir: &Path, name: &str, plot: &LinePlot) -> Result<()> {
    fs::write(dir.join(name), plot.render())?;
    Ok(())
}

fn write_trajectory(dir: &Path, traj: &Trajectory, summary: &Summary, svg: bool) -> Result<()> {
    let mut w = create(dir, "trajectory.csv")?;
    traj.write_csv(&mut w)?;
    drop(w);
    write_json(dir, "summary.json", summary)?;
    if svg {
        let pts = |ys: &[f64]| traj.times.iter().copied().zip(ys.iter().copied()).collect::<Vec<_>>();
        let g2: Vec<f64> = traj.g2.iter().map(|g| g.unwrap_or(f64::NAN)).collect();
        write_svg(
            dir,
            "trajectory_n.svg",
            &LinePlot::new("mean photon number", "γt", "n").with(Series::new("n", pts(&traj.n))),
        )?;
        write_svg(
            dir,
            "trajectory_g2.svg",
            &LinePlot::new("second-order correlation", "γt", "g2").log_y().with(Series::new("g2", pts(&g2))),
        )?;
        let mut pops = LinePlot::new("Fock populations", "γt", "P").log_y();
        for (k, p) in traj.populations.iter().enumerate() {
            pops = pops.with(Series::new(format!("P{k}"), pts(p)));
        }
        write_svg(dir, "trajectory_populations.svg", &pops)?;
    }
    Ok(())
}

/// Writes `trajectory.csv`, `summary.json` and `run.json`.
pub fn cmd_simulate(cfg: &RunConfig, opts: &RunOptions) -> Result<Summary> {
    let started = Instant::now();
    let (cfg, dir) = opts.resolve(cfg)?;
    let (traj, summary) = simulate(&cfg)?;
    write_trajectory(&dir, &traj, &summary, opts.svg)?;
    write_json(&dir, "run.json", &RunResult::new("simulate", &cfg, started))?;
    Ok(summary)
}

/// Runs the swarm over the configured family and bounds; writes `history.csv`,
/// `run.json` and the trajectory at the optimum.
pub fn cmd_optimize(cfg: &RunConfig, opts: &RunOptions) -> Result<RunResult> {
    let started = Instant::now();
    let (cfg, dir) = opts.resolve(cfg)?;
    let family = cfg.family();
    let bounds = cfg.pso.bounds(family)?;
    let pso_cfg = cfg.pso.config();
    let objective = fitness::objective(family, cfg.fitness_spec());
    let res = pso::optimize_with(&bounds, &pso_cfg, objective, |s| {
        log::info!("iteration {}: best g2min {:.4e}", s.iter, s.global_best_fit);
    })?;

    pso::write_history_csv(&res.history, create(&dir, "history.csv")?)?;
    if opts.svg {
        let pts = res.history.iter().enumerate().map(|(k, f)| (k as f64, *f)).collect();
        write_svg(
            &dir,
            "history.svg",
            &LinePlot::new("global best fitness", "iteration", "g2min").log_y().with(Series::new("best", pts)),
        )?;
    }

    let best = ParamVector::from_slice(family, &res.best_pos)?;
    let mut at_best = cfg.clone();
    at_best.system.delta = best.delta();
    at_best.pulse = best.pulse();
    at_best.sim.t_end = cfg.fitness.t_end;
    let (traj, summary) = simulate(&at_best)?;
    write_trajectory(&dir, &traj, &summary, opts.svg)?;

    let mut result = RunResult::new("optimize", &cfg, started);
    result.best_params = Some(
        family
            .param_names()
            .iter()
            .map(|n| n.to_string())
            .zip(res.best_pos.iter().copied())
            .collect(),
    );
    result.best_vector = Some(res.best_pos.clone());
    result.best_fitness = Some(res.best_fit);
    write_json(&dir, "run.json", &result)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepArgs {
    pub param: String,
    /// Defaults to the parameter's search range.
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: usize,
}

/// Sweeps one named parameter around the configured point; writes `sweep_<param>.csv`.
pub fn cmd_sweep(cfg: &RunConfig, opts: &RunOptions, args: &SweepArgs) -> Result<Vec<(f64, f64)>> {
    let started = Instant::now();
    let (cfg, dir) = opts.resolve(cfg)?;
    let family = cfg.family();
    let (lo, hi) = family.default_ranges()[family.param_index(&args.param)?];
    if args.points == 0 {
        return Err(Error::InvalidParameter("a sweep needs at least one point".into()));
    }
    let grid = fitness::linspace(args.min.unwrap_or(lo), args.max.unwrap_or(hi), args.points);
    let curve = fitness::sweep(&cfg.base_vector(), &args.param, &grid, &cfg.fitness_spec())?;
    fitness::write_sweep_csv(&curve, create(&dir, &format!("sweep_{}.csv", args.param))?)?;
    if opts.svg {
        write_svg(
            &dir,
            &format!("sweep_{}.svg", args.param),
            &LinePlot::new(&format!("g2min versus {}", args.param), &args.param, "g2min")
                .log_y()
                .with(Series::new("g2min", curve.clone())),
        )?;
    }
    write_json(&dir, "run.json", &RunResult::new("sweep", &cfg, started))?;
    Ok(curve)
}

/// Master-equation versus weak-excitation populations over the periodic window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub window_start: f64,
    pub t_end: f64,
    pub p1_floor: f64,
    /// Samples with analytic `P₁` above the floor.
    pub points_compared: usize,
    pub max_rel_dev_p1: f64,
    pub max_rel_dev_p2: f64,
    pub max_p1: f64,
    pub weak_excitation_violated: bool,
    pub k_max: usize,
}

/// Rows are `(t, P1_num, P2_num, P1_ana, P2_ana)`.
pub fn analytic_compare(cfg: &RunConfig, k_max: usize) -> Result<(Vec<[f64; 5]>, CompareReport)> {
    let t_end = cfg.t_end();
    let window_start = cfg.window_start();
    let traj = fock::evolve(&cfg.system, &cfg.pulse, t_end, cfg.sim.dt_out, &cfg.evolve_options(false))?;
    let i0 = traj.first_index_at(window_start);
    let times = &traj.times[i0..];
    let ana = analytic::analytic_populations(times, &cfg.system, &cfg.pulse, k_max)?;
    let rows: Vec<[f64; 5]> = (0..times.len())
        .map(|j| {
            [
                times[j],
                traj.populations[1][i0 + j],
                traj.populations[2][i0 + j],
                ana.p1[j],
                ana.p2[j],
            ]
        })
        .collect();
    let rel = |num: f64, ana: f64| if num == ana { 0.0 } else { (num - ana).abs() / ana.abs() };
    let compared: Vec<&[f64; 5]> = rows.iter().filter(|r| r[3] > COMPARE_P1_FLOOR).collect();
    let report = CompareReport {
        window_start,
        t_end,
        p1_floor: COMPARE_P1_FLOOR,
        points_compared: compared.len(),
        max_rel_dev_p1: compared.iter().map(|r| rel(r[1], r[3])).fold(0.0, f64::max),
        max_rel_dev_p2: compared.iter().map(|r| rel(r[2], r[4])).fold(0.0, f64::max),
        max_p1: ana.p1.iter().copied().fold(0.0, f64::max),
        weak_excitation_violated: ana.weak_excitation_violated,
        k_max,
    };
    Ok((rows, report))
}

/// Writes `analytic_compare.csv` and `analytic_compare.json`.
pub fn cmd_analytic_compare(cfg: &RunConfig, opts: &RunOptions) -> Result<CompareReport> {
    let started = Instant::now();
    let (cfg, dir) = opts.resolve(cfg)?;
    let (rows, report) = analytic_compare(&cfg, cfg.pulse.default_k_max())?;
    {
        use std::io::Write;
        let mut w = create(&dir, "analytic_compare.csv")?;
        writeln!(w, "t,P1_num,P2_num,P1_ana,P2_ana")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{}", r[0], r[1], r[2], r[3], r[4])?;
        }
        w.flush()?;
    }
    write_json(&dir, "analytic_compare.json", &report)?;
    if opts.svg {
        let col = |c: usize| rows.iter().map(|r| (r[0], r[c])).collect::<Vec<_>>();
        let plot = LinePlot::new("numerical versus analytical populations", "γt", "P")
            .log_y()
            .with(Series::new("P1 numerical", col(1)))
            .with(Series::new("P1 analytical", col(3)))
            .with(Series::new("P2 numerical", col(2)))
            .with(Series::new("P2 analytical", col(4)));
        write_svg(&dir, "analytic_compare.svg", &plot)?;
    }
    write_json(&dir, "run.json", &RunResult::new("analytic-compare", &cfg, started))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSSIAN: &str = r#"{
        "system": {"delta": 0.5, "u": 0.05},
        "pulse": {"type": "gaussian", "eps_p": 0.1, "A": 5.27, "T": 5}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(GAUSSIAN).unwrap();
        assert_eq!(cfg.system.gamma, 1.0);
        assert_eq!(cfg.system.fock_dim, 10);
        assert_eq!(cfg.t_end(), 50.0);
        assert_eq!(cfg.window_start(), 25.0);
        assert_eq!(cfg.pso.config(), PsoConfig::default());
        assert_eq!(cfg.fitness_spec().dt_out, cfg.sim.dt_out);
    }

    #[test]
    fn unknown_keys_are_named() {
        let bad = GAUSSIAN.replace("\"u\": 0.05", "\"u\": 0.05, \"kerr\": 1");
        let msg = RunConfig::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("kerr"), "{msg}");
        let bad = GAUSSIAN.replace("\"T\": 5}", "\"T\": 5}, \"pso\": {\"particles\": 3}");
        assert!(RunConfig::from_json(&bad).unwrap_err().to_string().contains("particles"));
    }

    #[test]
    fn bounds_overrides_by_name() {
        let text = GAUSSIAN.replace("\"T\": 5}", "\"T\": 5}, \"pso\": {\"bounds\": {\"A\": [1, 6]}}");
        let cfg = RunConfig::from_json(&text).unwrap();
        let b = cfg.pso.bounds(cfg.family()).unwrap();
        assert_eq!((b.lo[3], b.hi[3]), (1.0, 6.0));
        assert_eq!((b.lo[0], b.hi[0]), (-5.0, 5.0));
        let bad = GAUSSIAN.replace("\"T\": 5}", "\"T\": 5}, \"pso\": {\"bounds\": {\"eps_m\": [0.1, 0.2]}}");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::UnknownParameter { .. })));
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::from_json(GAUSSIAN).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
