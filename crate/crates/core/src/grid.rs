//! Physical constants and the paired position/momentum grids.
//!
//! Grids are periodic: `n` samples `q_j = q_min + j Δq` with `Δq = (q_max - q_min) / n`,
//! so `q_max` itself is not a sample. The momentum grid is fixed by the grid spacing
//! through `Δp Δq n = 2πħ`, which makes every position/momentum integral an exact
//! discrete Fourier sum.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidConstants(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Grid used for static (time-independent) analysis: wide enough that HO levels up to 6
/// and their coherences fit inside the half-period window the Wigner transform needs.
pub const STATIC_GRID: (f64, f64, usize) = (-12.0, 12.0, 256);

/// Grid used for time evolution at `dt = 1e-3`: keeps the explicit RK4 stepping of the
/// Wigner equation inside its stability region for the quartic test potential.
pub const DYNAMICS_GRID: (f64, f64, usize) = (-10.0, 10.0, 256);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionGrid {
    q_min: f64,
    q_max: f64,
    n: usize,
}

impl PositionGrid {
    pub fn new(q_min: f64, q_max: f64, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(n));
        }
        if !(q_min.is_finite() && q_max.is_finite() && q_max > q_min) {
            return Err(Error::DegenerateInterval { q_min, q_max });
        }
        Ok(Self { q_min, q_max, n })
    }

    pub fn static_default() -> Self {
        let (a, b, n) = STATIC_GRID;
        Self { q_min: a, q_max: b, n }
    }

    pub fn dynamics_default() -> Self {
        let (a, b, n) = DYNAMICS_GRID;
        Self { q_min: a, q_max: b, n }
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Index of the sample closest to `q`, if `q` lies inside the periodic window.
    pub fn nearest_index(&self, q: f64) -> Option<usize> {
        if !(q >= self.q_min && q < self.q_max) {
            return None;
        }
        let j = ((q - self.q_min) / self.spacing()).round() as usize;
        Some(j.min(self.n - 1))
    }
}

/// Momentum samples `p_k = 2πħ k / (n Δq)` for `k = -n/2 .. n/2 - 1`, stored ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    n: usize,
    dp: f64,
}

impl MomentumGrid {
    pub fn new(grid: &PositionGrid, constants: &PhysicalConstants) -> Self {
        let n = grid.len();
        Self {
            n,
            dp: 2.0 * PI * constants.hbar / (n as f64 * grid.spacing()),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.dp
    }

    /// Signed wave index of storage slot `k`.
    pub fn wave_index(&self, k: usize) -> i64 {
        k as i64 - (self.n / 2) as i64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.wave_index(k) as f64 * self.dp
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    pub fn p_min(&self) -> f64 {
        self.point(0)
    }

    /// Largest |p| on the grid (the Nyquist momentum).
    pub fn p_max(&self) -> f64 {
        self.point(0).abs()
    }

    pub fn nearest_index(&self, p: f64) -> Option<usize> {
        let k = (p / self.dp).round() + (self.n / 2) as f64;
        if k < 0.0 || k >= self.n as f64 {
            return None;
        }
        Some(k as usize)
    }
}
