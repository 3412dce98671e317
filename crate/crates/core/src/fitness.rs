//! The blockade objective: minimum of g²(t) over the periodic regime, as a
//! function of the pulse parameters and the detuning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, EvolveOptions, Observable, SystemParams, DEFAULT_DT_OUT, DEFAULT_N_FLOOR};
use crate::pso::Bounds;
use crate::pulse::{GaussianTrain, PulseSpec, RectTrain};

pub const DEFAULT_WINDOW_START_FRAC: f64 = 0.5;
pub const DEFAULT_SWEEP_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseFamily {
    Gaussian,
    Rect,
}

impl PulseFamily {
    pub fn of(pulse: &PulseSpec) -> Self {
        match pulse {
            PulseSpec::Gaussian(_) => Self::Gaussian,
            PulseSpec::Rect(_) => Self::Rect,
        }
    }

    /// Parameter names in optimization order.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Self::Gaussian => &["delta", "eps_p", "T", "A"],
            Self::Rect => &["delta", "eps_m", "t_r", "t_w", "t_f", "T"],
        }
    }

    /// Search ranges used for optimization and default sweeps.
    pub fn default_ranges(&self) -> &'static [(f64, f64)] {
        match self {
            Self::Gaussian => &[(-5.0, 5.0), (0.1, 0.5), (3.0, 8.0), (0.001, 10.0)],
            Self::Rect => &[(-5.0, 5.0), (0.1, 0.5), (0.01, 0.5), (0.01, 0.5), (0.01, 0.5), (3.0, 8.0)],
        }
    }

    pub fn default_bounds(&self) -> Bounds {
        let r = self.default_ranges();
        Bounds {
            lo: r.iter().map(|x| x.0).collect(),
            hi: r.iter().map(|x| x.1).collect(),
        }
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.param_names()
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::UnknownParameter {
                name: name.to_string(),
                valid: self.param_names().join(", "),
            })
    }
}

/// Point in the search space: detuning plus the pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamVector {
    Gaussian { delta: f64, eps_p: f64, period: f64, a: f64 },
    Rect { delta: f64, eps_m: f64, t_r: f64, t_w: f64, t_f: f64, period: f64 },
}

impl ParamVector {
    pub fn family(&self) -> PulseFamily {
        match self {
            Self::Gaussian { .. } => PulseFamily::Gaussian,
            Self::Rect { .. } => PulseFamily::Rect,
        }
    }

    pub fn from_slice(family: PulseFamily, x: &[f64]) -> Result<Self> {
        let want = family.param_names().len();
        if x.len() != want {
            return Err(Error::InvalidParameter(format!(
                "{family:?} parameter vector needs {want} entries, got {}",
                x.len()
            )));
        }
        Ok(match family {
            PulseFamily::Gaussian => Self::Gaussian {
                delta: x[0],
                eps_p: x[1],
                period: x[2],
                a: x[3],
            },
            PulseFamily::Rect => Self::Rect {
                delta: x[0],
                eps_m: x[1],
                t_r: x[2],
                t_w: x[3],
                t_f: x[4],
                period: x[5],
            },
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match *self {
            Self::Gaussian { delta, eps_p, period, a } => vec![delta, eps_p, period, a],
            Self::Rect {
                delta,
                eps_m,
                t_r,
                t_w,
                t_f,
                period,
            } => vec![delta, eps_m, t_r, t_w, t_f, period],
        }
    }

    pub fn from_parts(delta: f64, pulse: &PulseSpec) -> Self {
        match *pulse {
            PulseSpec::Gaussian(g) => Self::Gaussian {
                delta,
                eps_p: g.eps_p,
                period: g.period,
                a: g.a_param,
            },
            PulseSpec::Rect(r) => Self::Rect {
                delta,
                eps_m: r.eps_m,
                t_r: r.t_r,
                t_w: r.t_w,
                t_f: r.t_f,
                period: r.period,
            },
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            Self::Gaussian { delta, .. } | Self::Rect { delta, .. } => delta,
        }
    }

    pub fn pulse(&self) -> PulseSpec {
        match *self {
            Self::Gaussian { eps_p, period, a, .. } => PulseSpec::Gaussian(GaussianTrain {
                eps_p,
                a_param: a,
                period,
            }),
            Self::Rect {
                eps_m,
                t_r,
                t_w,
                t_f,
                period,
                ..
            } => PulseSpec::Rect(RectTrain {
                eps_m,
                t_r,
                t_w,
                t_f,
                period,
            }),
        }
    }

    /// Copy with the named component replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let family = self.family();
        let idx = family.param_index(name)?;
        let mut x = self.to_vec();
        x[idx] = value;
        Self::from_slice(family, &x)
    }
}

/// Everything besides the search vector needed to score a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitnessSpec {
    pub u: f64,
    pub gamma: f64,
    pub fock_dim: usize,
    /// Fraction of the horizon discarded as start-up transient.
    pub window_start_frac: f64,
    pub n_floor: f64,
    pub dt_out: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Fixed horizon; `None` means `max(10 T, 30/γ)`.
    pub t_end: Option<f64>,
}

impl Default for FitnessSpec {
    fn default() -> Self {
        Self {
            u: 0.05,
            gamma: 1.0,
            fock_dim: fock::DEFAULT_FOCK_DIM,
            window_start_frac: DEFAULT_WINDOW_START_FRAC,
            n_floor: DEFAULT_N_FLOOR,
            dt_out: DEFAULT_DT_OUT,
            rtol: fock::DEFAULT_RTOL,
            atol: fock::DEFAULT_ATOL,
            t_end: None,
        }
    }
}

/// `max(10 T, 30/γ)`.
pub fn default_t_end(period: f64, gamma: f64) -> f64 {
    (10.0 * period).max(30.0 / gamma)
}

impl FitnessSpec {
    pub fn system(&self, delta: f64) -> SystemParams {
        SystemParams {
            delta,
            u: self.u,
            gamma: self.gamma,
            fock_dim: self.fock_dim,
        }
    }

    pub fn horizon(&self, period: f64) -> f64 {
        self.t_end.unwrap_or_else(|| default_t_end(period, self.gamma))
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            rtol: self.rtol,
            atol: self.atol,
            n_floor: self.n_floor,
            keep_snapshots: true,
            check_invariants: true,
        }
    }

    /// Start of the scored window and the horizon, checking the window spans two periods.
    pub fn window(&self, period: f64) -> Result<(f64, f64)> {
        if !(self.window_start_frac > 0.0 && self.window_start_frac < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "window_start_frac must lie in (0, 1), got {}",
                self.window_start_frac
            )));
        }
        let t_end = self.horizon(period);
        let start = self.window_start_frac * t_end;
        if t_end - start < 2.0 * period {
            return Err(Error::InvalidParameter(format!(
                "scoring window [{start}, {t_end}] is shorter than two periods (T = {period})"
            )));
        }
        Ok((start, t_end))
    }
}

/// Detailed outcome of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G2MinReport {
    pub g2min: f64,
    pub t_at_min: f64,
    pub n_min: f64,
    pub t_at_n_min: f64,
}

/// Simulates `v` and returns the resolved minima of g² and n over the window.
///
/// `g2min` is `+∞` when no sample in the window has `n ≥ n_floor`.
pub fn evaluate_report(v: &ParamVector, spec: &FitnessSpec) -> Result<G2MinReport> {
    let pulse = v.pulse();
    let p = spec.system(v.delta());
    let (start, t_end) = spec.window(pulse.period())?;
    let opts = spec.evolve_options();
    let traj = fock::evolve(&p, &pulse, t_end, spec.dt_out, &opts)?;
    let g = fock::refine_minimum(&p, &pulse, &traj, start, Observable::G2 { n_floor: spec.n_floor }, &opts)?;
    let n = fock::refine_minimum(&p, &pulse, &traj, start, Observable::MeanPhoton, &opts)?;
    let (g2min, t_at_min) = g.map_or((f64::INFINITY, f64::NAN), |e| (e.value, e.t));
    let (n_min, t_at_n_min) = n.map_or((f64::NAN, f64::NAN), |e| (e.value, e.t));
    Ok(G2MinReport {
        g2min,
        t_at_min,
        n_min,
        t_at_n_min,
    })
}

/// Fitness for the optimizer: the resolved `g²_min`, or `+∞` on any failure.
pub fn evaluate_g2min(v: &ParamVector, spec: &FitnessSpec) -> f64 {
    match evaluate_report(v, spec) {
        Ok(r) => {
            log::debug!(
                "{}",
                serde_json::json!({"param_vector": v.to_vec(), "g2min": finite_or_null(r.g2min), "t_at_min": finite_or_null(r.t_at_min)})
            );
            r.g2min
        }
        Err(e) => {
            log::warn!(
                "{}",
                serde_json::json!({"param_vector": v.to_vec(), "g2min": null, "error": e.to_string()})
            );
            f64::INFINITY
        }
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        x.into()
    } else {
        serde_json::Value::Null
    }
}

/// Objective over raw position vectors of the given family.
pub fn objective(family: PulseFamily, spec: FitnessSpec) -> impl Fn(&[f64]) -> f64 + Sync {
    move |x| match ParamVector::from_slice(family, x) {
        Ok(v) => evaluate_g2min(&v, &spec),
        Err(_) => f64::INFINITY,
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Default sweep grid for a named parameter: 100 points across its search range.
pub fn default_grid(family: PulseFamily, which: &str) -> Result<Vec<f64>> {
    let (lo, hi) = family.default_ranges()[family.param_index(which)?];
    Ok(linspace(lo, hi, DEFAULT_SWEEP_POINTS))
}

/// Scores `v0` with one component replaced by each grid value.
pub fn sweep(v0: &ParamVector, which: &str, grid: &[f64], spec: &FitnessSpec) -> Result<Vec<(f64, f64)>> {
    v0.family().param_index(which)?;
    spec.window(v0.pulse().period())?;
    Ok(grid
        .par_iter()
        .map(|&value| {
            let g = match v0.with(which, value) {
                Ok(v) => evaluate_g2min(&v, spec),
                Err(_) => f64::INFINITY,
            };
            (value, g)
        })
        .collect())
}

/// Writes `param_value,g2_min` rows.
pub fn write_sweep_csv<W: std::io::Write>(curve: &[(f64, f64)], mut w: W) -> Result<()> {
    writeln!(w, "param_value,g2_min")?;
    for (x, g) in curve {
        writeln!(w, "{x},{g}")?;
    }
    Ok(())
}
