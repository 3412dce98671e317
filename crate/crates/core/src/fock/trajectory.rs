use std::io::Write;

use super::{fock_population, g2, mean_photon, DensityMatrix};
use crate::error::Result;

/// Observables sampled on a time grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub drive: Vec<f64>,
    pub n: Vec<f64>,
    /// `None` where the photon number is below the floor.
    pub g2: Vec<Option<f64>>,
    /// `P0`, `P1`, `P2`.
    pub populations: [Vec<f64>; 3],
    pub snapshots: Option<Vec<DensityMatrix>>,
}

pub const CSV_HEADER: &str = "t,eps,n,g2,P0,P1,P2";

impl Trajectory {
    pub(crate) fn with_capacity(len: usize, snapshots: bool) -> Self {
        Self {
            times: Vec::with_capacity(len),
            drive: Vec::with_capacity(len),
            n: Vec::with_capacity(len),
            g2: Vec::with_capacity(len),
            populations: std::array::from_fn(|_| Vec::with_capacity(len)),
            snapshots: snapshots.then(|| Vec::with_capacity(len)),
        }
    }

    pub(crate) fn push_sample(&mut self, t: f64, eps: f64, rho: &DensityMatrix, n_floor: f64) {
        self.times.push(t);
        self.drive.push(eps);
        self.n.push(mean_photon(rho));
        self.g2.push(g2(rho, n_floor));
        for (k, pop) in self.populations.iter_mut().enumerate() {
            pop.push(fock_population(rho, k).unwrap_or(0.0));
        }
    }

    pub(crate) fn push_snapshot(&mut self, rho: DensityMatrix) {
        if let Some(s) = self.snapshots.as_mut() {
            s.push(rho);
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the first sample at or after `t`.
    pub fn first_index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x < t)
    }

    /// Sampled minimum of the photon number over `t >= t_start`, as `(t, n)`.
    pub fn n_min(&self, t_start: f64) -> Option<(f64, f64)> {
        let from = self.first_index_at(t_start);
        argmin(self.times[from..].iter().copied().zip(self.n[from..].iter().copied()))
    }

    /// Sampled minimum of g² over `t >= t_start`, skipping undefined samples.
    pub fn g2_min(&self, t_start: f64) -> Option<(f64, f64)> {
        let from = self.first_index_at(t_start);
        argmin(
            self.times[from..]
                .iter()
                .zip(&self.g2[from..])
                .filter_map(|(&t, g)| g.map(|g| (t, g))),
        )
    }

    /// Sampled minimum of `P_k` over `t >= t_start`.
    pub fn population_min(&self, k: usize, t_start: f64) -> Option<(f64, f64)> {
        let from = self.first_index_at(t_start);
        argmin(self.times[from..].iter().copied().zip(self.populations[k][from..].iter().copied()))
    }

    /// Writes `t,eps,n,g2,P0,P1,P2`; undefined g² is an empty field.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for i in 0..self.len() {
            let g2 = self.g2[i].map(|g| g.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.times[i],
                self.drive[i],
                self.n[i],
                g2,
                self.populations[0][i],
                self.populations[1][i],
                self.populations[2][i]
            )?;
        }
        Ok(())
    }
}

fn argmin(it: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    it.fold(None, |best, (t, v)| match best {
        Some((_, bv)) if bv <= v => best,
        _ => Some((t, v)),
    })
}
