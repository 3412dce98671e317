use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{fock_population, g2_from_moments, DensityMatrix, SystemParams, Trajectory, DEFAULT_N_FLOOR};
use crate::error::{Error, Result};
use crate::integrator::{self, Tolerances};
use crate::pulse::PulseSpec;

/// Default spacing of output samples, in units of `1/γ`.
pub const DEFAULT_DT_OUT: f64 = 0.01;

/// Integration tolerances. The absolute one must sit well below the
/// two-photon population at the blockade instant (about 1e-13).
pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_ATOL: f64 = 1e-13;

/// Sub-intervals used when re-sampling around a candidate minimum.
const REFINE_SUBDIVISIONS: usize = 200;
/// Number of sampled local minima that get re-sampled.
const REFINE_CANDIDATES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub n_floor: f64,
    /// Keep a copy of ρ at every output sample.
    pub keep_snapshots: bool,
    /// Check Hermiticity, trace and positivity at every output sample.
    pub check_invariants: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            n_floor: DEFAULT_N_FLOOR,
            keep_snapshots: false,
            check_invariants: true,
        }
    }
}

/// Precomputed master-equation generator exploiting the banded structure of
/// the Kerr Hamiltonian: `O(N²)` per evaluation instead of dense products.
#[derive(Debug, Clone)]
pub struct KerrModel {
    dim: usize,
    gamma: f64,
    energies: Vec<f64>,
    sqrt_n: Vec<f64>,
}

impl KerrModel {
    pub fn new(p: &SystemParams) -> Result<Self> {
        p.validate()?;
        let dim = p.fock_dim;
        let energies = (0..dim)
            .map(|n| {
                let n = n as f64;
                p.delta * n + p.u * n * (n - 1.0)
            })
            .collect();
        let sqrt_n = (0..=dim).map(|n| (n as f64).sqrt()).collect();
        Ok(Self {
            dim,
            gamma: p.gamma,
            energies,
            sqrt_n,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `dρ/dt` for drive amplitude `eps` into `out`; both slices are
    /// column-major `dim x dim`.
    pub fn rhs(&self, eps: f64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        let at = |m: usize, n: usize| rho[m + n * d];
        let mi = Complex64::new(0.0, -1.0);
        let half_gamma = 0.5 * self.gamma;
        for n in 0..d {
            for m in 0..d {
                let r = at(m, n);
                // (a + a†) ρ - ρ (a + a†)
                let mut drive = Complex64::new(0.0, 0.0);
                if m + 1 < d {
                    drive += at(m + 1, n) * self.sqrt_n[m + 1];
                }
                if m > 0 {
                    drive += at(m - 1, n) * self.sqrt_n[m];
                }
                if n + 1 < d {
                    drive -= at(m, n + 1) * self.sqrt_n[n + 1];
                }
                if n > 0 {
                    drive -= at(m, n - 1) * self.sqrt_n[n];
                }
                let coherent = mi * (r * (self.energies[m] - self.energies[n]) + drive * eps);
                let mut jump = -r * (half_gamma * (m + n) as f64);
                if m + 1 < d && n + 1 < d {
                    jump += at(m + 1, n + 1) * (self.gamma * self.sqrt_n[m + 1] * self.sqrt_n[n + 1]);
                }
                out[m + n * d] = coherent + jump;
            }
        }
    }
}

/// Uniform grid `t0, t0 + dt, …` up to and including `t_end` (within round-off).
pub fn uniform_grid(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let n = ((t_end - t0) / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| t0 + i as f64 * dt).collect()
}

/// Integrates the master equation from the vacuum over `[0, t_end]`.
pub fn evolve(
    p: &SystemParams,
    pulse: &PulseSpec,
    t_end: f64,
    dt_out: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !(dt_out > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end and dt_out must be positive (got {t_end}, {dt_out})"
        )));
    }
    let times = uniform_grid(0.0, t_end, dt_out);
    evolve_from(p, pulse, &DensityMatrix::vacuum(p.fock_dim), 0.0, &times, opts)
}

/// Integrates from `rho0` at `t0`, sampling at `times`.
pub fn evolve_from(
    p: &SystemParams,
    pulse: &PulseSpec,
    rho0: &DensityMatrix,
    t0: f64,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    pulse.validate()?;
    let model = KerrModel::new(p)?;
    let d = model.dim();
    if rho0.dim() != d {
        return Err(Error::Shape {
            expected: d,
            rows: rho0.dim(),
            cols: rho0.dim(),
        });
    }
    let t_last = times.last().copied().unwrap_or(t0);
    let stops = pulse.kinks(t_last);
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: opts.atol,
        h_max: pulse.max_step(p.gamma),
        ..Tolerances::default()
    };
    let gamma = p.gamma;
    let mut traj = Trajectory::with_capacity(times.len(), opts.keep_snapshots);

    integrator::integrate(
        |t, y, dy| model.rhs(pulse.envelope(gamma, t), y, dy),
        t0,
        rho0.matrix().as_slice(),
        times,
        &stops,
        &tol,
        |_, t, y| {
            let rho = DensityMatrix(DMatrix::from_column_slice(d, d, y));
            if opts.check_invariants {
                rho.check_invariants(t)?;
            }
            traj.push_sample(t, pulse.envelope(gamma, t), &rho, opts.n_floor);
            if opts.keep_snapshots {
                traj.push_snapshot(rho);
            }
            Ok(())
        },
    )?;
    Ok(traj)
}

/// Scalar observable extracted from a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    MeanPhoton,
    G2 { n_floor: f64 },
    Population(usize),
}

impl Observable {
    pub fn value(&self, rho: &DensityMatrix) -> Option<f64> {
        match *self {
            Self::MeanPhoton => Some(super::mean_photon(rho)),
            Self::G2 { n_floor } => g2_from_moments(super::mean_photon(rho), super::pair_moment(rho), n_floor),
            Self::Population(k) => fock_population(rho, k).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
}

/// Minimum of `obs` over `t >= t_start`, resolved below the sampling grid.
///
/// The lowest sampled local minima are bracketed by their neighbouring
/// samples and re-integrated from the stored snapshot on a grid
/// `REFINE_SUBDIVISIONS` times finer. `traj` must carry snapshots.
pub fn refine_minimum(
    p: &SystemParams,
    pulse: &PulseSpec,
    traj: &Trajectory,
    t_start: f64,
    obs: Observable,
    opts: &EvolveOptions,
) -> Result<Option<Extremum>> {
    let snapshots = traj.snapshots.as_ref().ok_or_else(|| {
        Error::InvalidParameter("minimum refinement needs a trajectory with snapshots".into())
    })?;
    let values: Vec<Option<f64>> = snapshots
        .iter()
        .zip(&traj.times)
        .map(|(rho, &t)| if t >= t_start { obs.value(rho) } else { None })
        .collect();

    let len = values.len();
    let get = |i: usize| values[i].unwrap_or(f64::INFINITY);
    let mut candidates: Vec<usize> = (0..len)
        .filter(|&i| values[i].is_some())
        .filter(|&i| (i == 0 || get(i) <= get(i - 1)) && (i + 1 == len || get(i) <= get(i + 1)))
        .collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    candidates.sort_by(|&a, &b| get(a).total_cmp(&get(b)));
    candidates.truncate(REFINE_CANDIDATES);

    let mut best = Extremum {
        t: traj.times[candidates[0]],
        value: get(candidates[0]),
    };
    let fine_opts = EvolveOptions {
        keep_snapshots: false,
        ..*opts
    };
    for &i in &candidates {
        let lo = if i > 0 && values[i - 1].is_some() { i - 1 } else { i };
        let hi = (i + 1).min(len - 1);
        if hi == lo {
            continue;
        }
        let (t_lo, t_hi) = (traj.times[lo], traj.times[hi]);
        let step = (t_hi - t_lo) / REFINE_SUBDIVISIONS as f64;
        let fine: Vec<f64> = (0..=REFINE_SUBDIVISIONS).map(|j| t_lo + j as f64 * step).collect();
        let mut local = Vec::with_capacity(fine.len());
        let model = KerrModel::new(p)?;
        let d = model.dim();
        let tol = Tolerances {
            rtol: opts.rtol,
            atol: opts.atol,
            h_max: pulse.max_step(p.gamma),
            ..Tolerances::default()
        };
        integrator::integrate(
            |t, y, dy| model.rhs(pulse.envelope(p.gamma, t), y, dy),
            t_lo,
            snapshots[lo].matrix().as_slice(),
            &fine,
            &pulse.kinks(t_hi),
            &tol,
            |_, t, y| {
                let rho = DensityMatrix(DMatrix::from_column_slice(d, d, y));
                if fine_opts.check_invariants {
                    rho.check_invariants(t)?;
                }
                if let Some(v) = obs.value(&rho) {
                    local.push(Extremum { t, value: v });
                }
                Ok(())
            },
        )?;
        for e in local {
            if e.value < best.value {
                best = e;
            }
        }
    }
    Ok(Some(best))
}
