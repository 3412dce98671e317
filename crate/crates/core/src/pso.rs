//! Global-best particle swarm optimizer.
//!
//! Minimizes a fitness function over a box. All random draws come from one
//! seeded ChaCha stream consumed in a fixed order (particle-major,
//! dimension-minor), and fitness evaluations are merged in particle order,
//! so a run is reproducible bit for bit whether or not evaluations happen
//! in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search box, one `[lo, hi]` interval per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "bounds need matching non-empty lo/hi (got {} and {})",
                lo.len(),
                hi.len()
            )));
        }
        if let Some(j) = (0..lo.len()).find(|&j| !(lo[j] < hi[j]) || !lo[j].is_finite() || !hi[j].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bounds for dimension {j} are not an interval: [{}, {}]",
                lo[j], hi[j]
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(j, v)| *v >= self.lo[j] && *v <= self.hi[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub n_iters: usize,
    /// Inertial weight.
    pub w: f64,
    /// Cognitive (personal-best) factor.
    pub f1: f64,
    /// Social (global-best) factor.
    pub f2: f64,
    pub seed: u64,
    /// Velocity limit as a fraction of each dimension's range.
    pub v_max_frac: f64,
    /// Evaluate the swarm's fitness in parallel.
    pub parallel: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 20,
            n_iters: 50,
            w: 0.5,
            f1: 1.5,
            f2: 1.5,
            seed: 0,
            v_max_frac: 0.2,
            parallel: true,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParameter("n_particles must be positive".into()));
        }
        if !(self.v_max_frac > 0.0 && self.v_max_frac <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "v_max_frac must lie in (0, 1], got {}",
                self.v_max_frac
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub personal_best_pos: Vec<Vec<f64>>,
    pub personal_best_fit: Vec<f64>,
    pub global_best_pos: Vec<f64>,
    pub global_best_fit: f64,
    pub iter: usize,
    rng: ChaCha8Rng,
}

fn sanitize(f: f64) -> f64 {
    if f.is_finite() {
        f
    } else {
        f64::INFINITY
    }
}

fn evaluate_all<F>(positions: &[Vec<f64>], parallel: bool, fitness: &F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if parallel {
        positions.par_iter().map(|x| sanitize(fitness(x))).collect()
    } else {
        positions.iter().map(|x| sanitize(fitness(x))).collect()
    }
}

impl Swarm {
    /// Uniform random positions, zero velocities, bests from the first evaluation.
    pub fn init<F>(bounds: &Bounds, cfg: &PsoConfig, fitness: &F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        cfg.validate()?;
        let d = bounds.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let positions: Vec<Vec<f64>> = (0..cfg.n_particles)
            .map(|_| {
                (0..d)
                    .map(|j| bounds.lo[j] + rng.random::<f64>() * (bounds.hi[j] - bounds.lo[j]))
                    .collect()
            })
            .collect();
        let fits = evaluate_all(&positions, cfg.parallel, fitness);

        let mut swarm = Self {
            velocities: vec![vec![0.0; d]; cfg.n_particles],
            personal_best_pos: positions.clone(),
            personal_best_fit: fits,
            global_best_pos: positions[0].clone(),
            global_best_fit: f64::INFINITY,
            positions,
            iter: 0,
            rng,
        };
        swarm.update_global_best();
        Ok(swarm)
    }

    fn update_global_best(&mut self) {
        for i in 0..self.positions.len() {
            if self.personal_best_fit[i] < self.global_best_fit {
                self.global_best_fit = self.personal_best_fit[i];
                self.global_best_pos = self.personal_best_pos[i].clone();
            }
        }
    }

    /// One velocity/position update of every particle followed by re-evaluation.
    pub fn step<F>(&mut self, bounds: &Bounds, cfg: &PsoConfig, fitness: &F)
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = bounds.dim();
        for i in 0..self.positions.len() {
            for j in 0..d {
                let r1: f64 = self.rng.random();
                let r2: f64 = self.rng.random();
                let x = self.positions[i][j];
                let v_lim = cfg.v_max_frac * (bounds.hi[j] - bounds.lo[j]);
                let v = cfg.w * self.velocities[i][j]
                    + cfg.f1 * r1 * (self.personal_best_pos[i][j] - x)
                    + cfg.f2 * r2 * (self.global_best_pos[j] - x);
                let mut v = v.clamp(-v_lim, v_lim);
                let mut x_new = x + v;
                if x_new < bounds.lo[j] {
                    x_new = bounds.lo[j];
                    v = 0.0;
                } else if x_new > bounds.hi[j] {
                    x_new = bounds.hi[j];
                    v = 0.0;
                }
                self.velocities[i][j] = v;
                self.positions[i][j] = x_new;
            }
        }

        let fits = evaluate_all(&self.positions, cfg.parallel, fitness);
        for (i, f) in fits.into_iter().enumerate() {
            if f < self.personal_best_fit[i] {
                self.personal_best_fit[i] = f;
                self.personal_best_pos[i] = self.positions[i].clone();
            }
        }
        self.update_global_best();
        self.iter += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub best_pos: Vec<f64>,
    pub best_fit: f64,
    /// Global-best fitness after initialization and after every step.
    pub history: Vec<f64>,
}

pub fn optimize<F>(bounds: &Bounds, cfg: &PsoConfig, fitness: F) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    optimize_with(bounds, cfg, fitness, |_| {})
}

/// [`optimize`] with a callback invoked after initialization and every step.
pub fn optimize_with<F, C>(bounds: &Bounds, cfg: &PsoConfig, fitness: F, mut on_iter: C) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    C: FnMut(&Swarm),
{
    let mut swarm = Swarm::init(bounds, cfg, &fitness)?;
    let mut history = Vec::with_capacity(cfg.n_iters + 1);
    history.push(swarm.global_best_fit);
    on_iter(&swarm);
    for _ in 0..cfg.n_iters {
        swarm.step(bounds, cfg, &fitness);
        history.push(swarm.global_best_fit);
        on_iter(&swarm);
    }
    Ok(OptimizeResult {
        best_pos: swarm.global_best_pos,
        best_fit: swarm.global_best_fit,
        history,
    })
}

/// Writes `iter,best_fit` rows.
pub fn write_history_csv<W: std::io::Write>(history: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "iter,best_fit")?;
    for (k, f) in history.iter().enumerate() {
        writeln!(w, "{k},{f}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn init_is_reproducible() {
        let b = Bounds::new(vec![0.0], vec![1.0]).unwrap();
        let cfg = PsoConfig {
            seed: 42,
            ..PsoConfig::default()
        };
        let a = Swarm::init(&b, &cfg, &sphere).unwrap();
        let c = Swarm::init(&b, &cfg, &sphere).unwrap();
        assert_eq!(a.positions, c.positions);
        assert!(a.velocities.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(a.iter, 0);
    }

    #[test]
    fn init_counts_evaluations_and_constant_fitness() {
        let calls = AtomicUsize::new(0);
        let b = Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let s = Swarm::init(&b, &PsoConfig::default(), &|_: &[f64]| {
            calls.fetch_add(1, Ordering::Relaxed);
            3.5
        })
        .unwrap();
        assert_eq!(calls.load(Ordering::Relaxed), 20);
        assert_eq!(s.global_best_fit, 3.5);
        // the incumbent is the first particle on ties
        assert_eq!(s.global_best_pos, s.positions[0]);
    }

    #[test]
    fn non_finite_fitness_never_becomes_best() {
        let b = Bounds::new(vec![0.0], vec![1.0]).unwrap();
        let s = Swarm::init(&b, &PsoConfig::default(), &|x: &[f64]| if x[0] < 0.5 { f64::NAN } else { x[0] }).unwrap();
        assert!(s.global_best_fit.is_finite());
        assert!(s.global_best_pos[0] >= 0.5);
    }

    #[test]
    fn converged_swarm_is_a_fixed_point() {
        let b = Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let cfg = PsoConfig::default();
        let mut s = Swarm::init(&b, &cfg, &sphere).unwrap();
        let g = vec![0.25, -0.5];
        for i in 0..s.positions.len() {
            s.positions[i] = g.clone();
            s.personal_best_pos[i] = g.clone();
            s.personal_best_fit[i] = sphere(&g);
        }
        s.global_best_pos = g.clone();
        s.global_best_fit = sphere(&g);
        s.step(&b, &cfg, &sphere);
        assert!(s.positions.iter().all(|x| *x == g));
        assert!(s.velocities.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn sphere_converges() {
        let b = Bounds::new(vec![-5.0; 3], vec![5.0; 3]).unwrap();
        let r = optimize(&b, &PsoConfig::default(), sphere).unwrap();
        assert!(r.best_fit < 1e-3, "{}", r.best_fit);
        assert_eq!(r.history.len(), 51);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn finds_known_point() {
        let target = [0.3, -1.7];
        let b = Bounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let cfg = PsoConfig {
            n_iters: 100,
            seed: 7,
            ..PsoConfig::default()
        };
        let r = optimize(&b, &cfg, |x| ((x[0] - target[0]).powi(2) + (x[1] - target[1]).powi(2)).sqrt()).unwrap();
        assert!((r.best_pos[0] - target[0]).abs() < 1e-4 && (r.best_pos[1] - target[1]).abs() < 1e-4, "{:?}", r.best_pos);
    }

    #[test]
    fn zero_iterations_returns_initial_best() {
        let b = Bounds::new(vec![0.0], vec![1.0]).unwrap();
        let cfg = PsoConfig {
            n_particles: 1,
            n_iters: 0,
            seed: 3,
            ..PsoConfig::default()
        };
        let s = Swarm::init(&b, &cfg, &sphere).unwrap();
        let r = optimize(&b, &cfg, sphere).unwrap();
        assert_eq!(r.best_pos, s.positions[0]);
        assert_eq!(r.history, vec![sphere(&s.positions[0])]);
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn history_csv() {
        let mut buf = Vec::new();
        write_history_csv(&[2.0, 1.5], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,best_fit\n0,2\n1,1.5\n");
    }
}
