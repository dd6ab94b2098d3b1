//! Position-representation state containers.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{MomentumGrid, PhysicalConstants, PositionGrid};
use crate::spectral::{self, FftPair};

/// Tolerance on `Σ|ψ_j|² Δq - 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Largest probability density allowed in the outermost samples of a state.
pub const BOUNDARY_DENSITY_TOL: f64 = 1e-12;
/// Width (in samples) of the edge region examined by the boundary check.
const EDGE_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: PositionGrid,
    samples: Vec<Complex64>,
    constants: PhysicalConstants,
}

impl Wavefunction {
    pub fn new(grid: PositionGrid, samples: Vec<Complex64>, constants: PhysicalConstants) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.len()
            )));
        }
        let psi = Self {
            grid,
            samples,
            constants,
        };
        let norm = psi.norm_squared();
        if norm.is_nan() || (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(psi)
    }

    /// Rescales arbitrary (non-zero) samples to unit norm.
    pub fn normalized(grid: PositionGrid, mut samples: Vec<Complex64>, constants: PhysicalConstants) -> Result<Self> {
        let norm: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.spacing();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        let scale = norm.sqrt().recip();
        samples.iter_mut().for_each(|z| *z *= scale);
        Self::new(grid, samples, constants)
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::new(&self.grid, &self.constants)
    }

    pub fn norm_squared(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `⟨self|other⟩ = Σ conj(ψ_j) χ_j Δq`.
    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.spacing()
    }

    /// Momentum-space amplitudes `φ(p_k)` on the ascending momentum grid.
    pub fn to_momentum_representation(&self) -> Vec<Complex64> {
        let plans = FftPair::new(self.grid.len());
        spectral::to_momentum(&self.samples, &self.grid, &self.constants, &plans)
    }

    pub fn from_momentum_representation(
        grid: PositionGrid,
        momentum: &[Complex64],
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let plans = FftPair::new(grid.len());
        let samples = spectral::from_momentum(momentum, &grid, &constants, &plans);
        Self::new(grid, samples, constants)
    }

    /// Largest probability density among the outermost samples on either side.
    pub fn boundary_density(&self) -> f64 {
        let n = self.samples.len();
        let edge = EDGE_SAMPLES.min(n / 2);
        self.samples[..edge]
            .iter()
            .chain(&self.samples[n - edge..])
            .map(|z| z.norm_sqr())
            .fold(0.0, f64::max)
    }

    pub fn check_boundary(&self) -> Result<()> {
        let residual = self.boundary_density();
        if residual > BOUNDARY_DENSITY_TOL {
            return Err(Error::BoundaryLeak {
                what: "state density at grid edge",
                residual,
                tolerance: BOUNDARY_DENSITY_TOL,
            });
        }
        Ok(())
    }
}

/// Hermiticity tolerance on density matrix elements.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `Σ ρ_ii Δq - 1`.
pub const TRACE_TOL: f64 = 1e-9;

/// Kernel `⟨q_i|ρ̂|q_j⟩` sampled on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: PositionGrid,
    elements: Array2<Complex64>,
    constants: PhysicalConstants,
}

impl DensityMatrix {
    pub fn new(grid: PositionGrid, elements: Array2<Complex64>, constants: PhysicalConstants) -> Result<Self> {
        let n = grid.len();
        if elements.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "kernel of shape {:?} for a grid of {n}",
                elements.dim()
            )));
        }
        let rho = Self {
            grid,
            elements,
            constants,
        };
        let herm = rho.hermiticity_residual();
        if herm.is_nan() || herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity {
                what: "hermiticity",
                residual: herm,
            });
        }
        let trace = rho.trace();
        if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidDensity {
                what: "unit trace",
                residual: (trace - 1.0).norm(),
            });
        }
        Ok(rho)
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn elements(&self) -> &Array2<Complex64> {
        &self.elements
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::new(&self.grid, &self.constants)
    }

    /// `Σ_i ρ_ii Δq`.
    pub fn trace(&self) -> Complex64 {
        self.elements.diag().sum() * self.grid.spacing()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let r = (self.elements[[i, j]] - self.elements[[j, i]].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Position density `ρ(q_j, q_j)`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.elements.diag().iter().map(|z| z.re).collect()
    }

    /// Eigenvalues of the operator `ρ̂` (kernel times `Δq`), in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.grid.len();
        let dq = self.grid.spacing();
        let m = DMatrix::from_fn(n, n, |i, j| {
            // Hermitian part; the solver only reads one triangle
            0.5 * (self.elements[[i, j]] + self.elements[[j, i]].conj()) * dq
        });
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }

    pub fn check_positive(&self, tolerance: f64) -> Result<()> {
        let smallest = self.eigenvalues().last().copied().unwrap_or(0.0);
        if smallest < -tolerance {
            return Err(Error::InvalidDensity {
                what: "positive semidefinite",
                residual: -smallest,
            });
        }
        Ok(())
    }
}
