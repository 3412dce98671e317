//! Truncated Fock-space algebra for a single driven Kerr mode.
//!
//! All quantities are expressed in the frame rotating at the drive
//! frequency, so only the detuning ever appears. Matrices are dense
//! `fock_dim x fock_dim` complex matrices indexed by photon number.

mod evolve;
mod trajectory;

pub use evolve::{evolve, evolve_from, uniform_grid, DEFAULT_ATOL, DEFAULT_DT_OUT, DEFAULT_RTOL, refine_minimum, EvolveOptions, Extremum, KerrModel, Observable};
pub use trajectory::Trajectory;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Smallest truncation that still holds the two-photon manifold.
pub const MIN_FOCK_DIM: usize = 3;
pub const DEFAULT_FOCK_DIM: usize = 10;

/// Physical constants of the mode, in units where the decay rate sets the scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Detuning between the mode and the drive.
    pub delta: f64,
    /// Kerr strength.
    pub u: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_fock_dim")]
    pub fock_dim: usize,
}

fn default_gamma() -> f64 {
    1.0
}

fn default_fock_dim() -> usize {
    DEFAULT_FOCK_DIM
}

impl SystemParams {
    pub fn new(delta: f64, u: f64) -> Self {
        Self {
            delta,
            u,
            gamma: 1.0,
            fock_dim: DEFAULT_FOCK_DIM,
        }
    }

    pub fn with_fock_dim(mut self, fock_dim: usize) -> Self {
        self.fock_dim = fock_dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            )));
        }
        if !self.delta.is_finite() || !self.u.is_finite() {
            return Err(Error::InvalidParameter("delta and u must be finite".into()));
        }
        if self.fock_dim < MIN_FOCK_DIM {
            return Err(Error::InvalidDimension(self.fock_dim, MIN_FOCK_DIM));
        }
        Ok(())
    }
}

/// Ladder and number operators of a truncated mode.
#[derive(Debug, Clone)]
pub struct Operators {
    pub annihilation: CMatrix,
    pub creation: CMatrix,
    pub number: CMatrix,
}

pub fn build_operators(fock_dim: usize) -> Result<Operators> {
    if fock_dim < 2 {
        return Err(Error::InvalidDimension(fock_dim, 2));
    }
    let mut annihilation = CMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        annihilation[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let creation = annihilation.adjoint();
    let number = &creation * &annihilation;
    Ok(Operators {
        annihilation,
        creation,
        number,
    })
}

/// `Δ a†a + U a†a†aa + ε (a† + a)` in the truncated basis.
pub fn hamiltonian(p: &SystemParams, eps: f64) -> Result<CMatrix> {
    let ops = build_operators(p.fock_dim)?;
    let a = &ops.annihilation;
    let ad = &ops.creation;
    let kerr = ad * ad * a * a;
    let drive = ad + a;
    Ok(ops.number * Complex64::from(p.delta) + kerr * Complex64::from(p.u) + drive * Complex64::from(eps))
}

/// Right-hand side of the master equation with a single decay channel `a` at rate `gamma`.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &CMatrix, gamma: f64) -> Result<CMatrix> {
    let r = rho.matrix();
    let dim = r.nrows();
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::Shape {
            expected: dim,
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let ops = build_operators(dim)?;
    let a = &ops.annihilation;
    let ad = &ops.creation;
    let n = &ops.number;
    let i = Complex64::i();
    let commutator = h * r - r * h;
    let dissipator = (a * r * ad) * Complex64::from(2.0) - n * r - r * n;
    Ok(commutator * (-i) + dissipator * Complex64::from(gamma / 2.0))
}

/// Tolerances on the density-matrix invariants checked during evolution.
pub const HERMITICITY_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-6;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// State of the mode in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape {
                expected: m.nrows(),
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::fock(dim, 0)
    }

    /// Projector onto `|k⟩`.
    pub fn fock(dim: usize, k: usize) -> Self {
        assert!(k < dim, "Fock index {k} out of range for dimension {dim}");
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// Coherent state `|α⟩` restricted to the basis and renormalized.
    pub fn coherent(dim: usize, alpha: Complex64) -> Self {
        let mut amps = Vec::with_capacity(dim);
        let mut c = Complex64::new(1.0, 0.0);
        for n in 0..dim {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            amps.push(c);
        }
        Self::pure(&amps)
    }

    /// `|ψ⟩⟨ψ|` for the normalized amplitudes.
    pub fn pure(amps: &[Complex64]) -> Self {
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let dim = amps.len();
        Self(CMatrix::from_fn(dim, dim, |i, j| {
            amps[i] * amps[j].conj() / (norm * norm)
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `max |ρ - ρ†|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.0 + self.0.adjoint()) * Complex64::from(0.5);
        herm.symmetric_eigenvalues().min()
    }

    /// True when the Hermitian part has no eigenvalue below `-tol`.
    ///
    /// Runs a Cholesky factorization of the shifted Hermitian part, failing
    /// on the first non-positive pivot.
    pub fn is_positive_within(&self, tol: f64) -> bool {
        let d = self.dim();
        let mut l = CMatrix::zeros(d, d);
        for j in 0..d {
            let mut pivot = self.0[(j, j)].re + tol;
            for k in 0..j {
                pivot -= l[(j, k)].norm_sqr();
            }
            if !(pivot > 0.0) {
                return false;
            }
            let root = pivot.sqrt();
            l[(j, j)] = Complex64::new(root, 0.0);
            for i in j + 1..d {
                let herm = 0.5 * (self.0[(i, j)] + self.0[(j, i)].conj());
                let mut s = herm;
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / root;
            }
        }
        true
    }

    /// Checks Hermiticity, unit trace and positivity; `t` labels the error.
    pub fn check_invariants(&self, t: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm >= HERMITICITY_TOL {
            return Err(Error::Invariant {
                t,
                what: format!("hermiticity error {herm:e}"),
            });
        }
        let tr = self.trace();
        if (tr - 1.0).norm() >= TRACE_TOL {
            return Err(Error::Invariant {
                t,
                what: format!("trace {tr}"),
            });
        }
        if !self.is_positive_within(POSITIVITY_TOL) {
            return Err(Error::Invariant {
                t,
                what: format!("negative eigenvalue {:e}", self.min_eigenvalue()),
            });
        }
        Ok(())
    }
}

/// `Tr(ρ a†a)`, with round-off below zero clamped away.
pub fn mean_photon(rho: &DensityMatrix) -> f64 {
    let n = weighted_diagonal(rho, |k| k as f64);
    if n < 0.0 && n > -1e-12 {
        0.0
    } else {
        n
    }
}

/// `Tr(ρ a†a†aa)`.
pub fn pair_moment(rho: &DensityMatrix) -> f64 {
    weighted_diagonal(rho, |k| (k * k.saturating_sub(1)) as f64)
}

fn weighted_diagonal(rho: &DensityMatrix, weight: impl Fn(usize) -> f64) -> f64 {
    (0..rho.dim()).map(|k| weight(k) * rho.0[(k, k)].re).sum()
}

/// Default photon-number floor below which g² is reported as undefined.
pub const DEFAULT_N_FLOOR: f64 = 1e-6;

/// Equal-time second-order correlation, `None` when `⟨a†a⟩ < n_floor`.
pub fn g2(rho: &DensityMatrix, n_floor: f64) -> Option<f64> {
    g2_from_moments(mean_photon(rho), pair_moment(rho), n_floor)
}

pub(crate) fn g2_from_moments(n: f64, pair: f64, n_floor: f64) -> Option<f64> {
    if n < n_floor {
        None
    } else {
        Some(pair / (n * n))
    }
}

/// Real part of `⟨k|ρ|k⟩`.
pub fn fock_population(rho: &DensityMatrix, k: usize) -> Result<f64> {
    if k >= rho.dim() {
        return Err(Error::Index {
            index: k,
            dim: rho.dim(),
        });
    }
    Ok(rho.0[(k, k)].re)
}
