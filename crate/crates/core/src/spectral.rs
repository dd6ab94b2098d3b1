//! FFT plumbing shared by the transforms: spectral interpolation onto a doubled grid,
//! fractional shifts, and the position/momentum change of representation.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{MomentumGrid, PhysicalConstants, PositionGrid};

/// Forward (`e^{-i}`) and inverse (`e^{+i}`) transforms of one length, both unnormalized.
#[derive(Clone)]
pub struct FftPair {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms every consecutive length-`n` chunk of `buf` in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
    }
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("n", &self.n).finish()
    }
}

/// Signed frequency index of FFT bin `a` (the Nyquist bin maps to `-n/2`).
pub fn signed_index(a: usize, n: usize) -> i64 {
    if a < n / 2 {
        a as i64
    } else {
        a as i64 - n as i64
    }
}

/// Band-limited interpolation of periodic samples onto a grid with twice the resolution.
/// Even output samples reproduce the input; the Nyquist bin is split symmetrically so the
/// operator is real (it commutes with complex conjugation).
pub fn interpolate_double(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let small = FftPair::new(n);
    let large = FftPair::new(2 * n);
    interpolate_double_with(samples, &small, &large)
}

pub(crate) fn interpolate_double_with(samples: &[Complex64], small: &FftPair, large: &FftPair) -> Vec<Complex64> {
    let n = samples.len();
    let mut spec = samples.to_vec();
    small.forward(&mut spec);
    let mut padded = vec![Complex64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    padded[..half].copy_from_slice(&spec[..half]);
    padded[2 * n - half + 1..].copy_from_slice(&spec[half + 1..]);
    padded[half] = spec[half] * 0.5;
    padded[2 * n - half] = spec[half] * 0.5;
    large.inverse(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter_mut().for_each(|z| *z *= scale);
    padded
}

/// Two-dimensional version of [`interpolate_double`], applied along both axes.
pub fn interpolate_double_2d(matrix: &Array2<Complex64>) -> Array2<Complex64> {
    let (rows, cols) = matrix.dim();
    assert_eq!(rows, cols, "square kernels only");
    let n = rows;
    let small = FftPair::new(n);
    let large = FftPair::new(2 * n);

    let mut half_done = Array2::<Complex64>::zeros((n, 2 * n));
    for (i, row) in matrix.outer_iter().enumerate() {
        let row: Vec<Complex64> = row.iter().copied().collect();
        let fine = interpolate_double_with(&row, &small, &large);
        half_done.row_mut(i).iter_mut().zip(fine).for_each(|(d, s)| *d = s);
    }
    let mut out = Array2::<Complex64>::zeros((2 * n, 2 * n));
    for c in 0..2 * n {
        let col: Vec<Complex64> = half_done.column(c).iter().copied().collect();
        let fine = interpolate_double_with(&col, &small, &large);
        out.column_mut(c).iter_mut().zip(fine).for_each(|(d, s)| *d = s);
    }
    out
}

/// Evaluates the band-limited periodic interpolant of `samples` at `c + shift` for every
/// integer `c`, with `shift` in units of the sample spacing. The multiplier is unitary,
/// so a shift followed by its negative is the identity up to round-off.
pub fn shift_fractional(samples: &[Complex64], shift: f64, plans: &FftPair) -> Vec<Complex64> {
    let n = samples.len();
    let mut spec = samples.to_vec();
    plans.forward(&mut spec);
    for (a, z) in spec.iter_mut().enumerate() {
        let phase = 2.0 * PI * signed_index(a, n) as f64 * shift / n as f64;
        *z *= Complex64::from_polar(1.0 / n as f64, phase);
    }
    plans.inverse(&mut spec);
    spec
}

/// `φ(p_k) = (2πħ)^{-1/2} Σ_j e^{-i p_k q_j / ħ} ψ_j Δq` on the ascending momentum grid.
pub fn to_momentum(
    samples: &[Complex64],
    grid: &PositionGrid,
    constants: &PhysicalConstants,
    plans: &FftPair,
) -> Vec<Complex64> {
    let n = grid.len();
    let pgrid = MomentumGrid::new(grid, constants);
    let mut spec = samples.to_vec();
    plans.forward(&mut spec);
    let prefactor = grid.spacing() / (2.0 * PI * constants.hbar).sqrt();
    (0..n)
        .map(|k| {
            let wave = pgrid.wave_index(k);
            let bin = wave.rem_euclid(n as i64) as usize;
            let phase = -pgrid.point(k) * grid.q_min() / constants.hbar;
            spec[bin] * Complex64::from_polar(prefactor, phase)
        })
        .collect()
}

/// Inverse of [`to_momentum`].
pub fn from_momentum(
    momentum: &[Complex64],
    grid: &PositionGrid,
    constants: &PhysicalConstants,
    plans: &FftPair,
) -> Vec<Complex64> {
    let n = grid.len();
    let pgrid = MomentumGrid::new(grid, constants);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let prefactor = grid.spacing() / (2.0 * PI * constants.hbar).sqrt();
    for (k, &phi) in momentum.iter().enumerate() {
        let bin = pgrid.wave_index(k).rem_euclid(n as i64) as usize;
        let phase = pgrid.point(k) * grid.q_min() / constants.hbar;
        spec[bin] = phi * Complex64::from_polar(1.0 / (prefactor * n as f64), phase);
    }
    plans.inverse(&mut spec);
    spec
}
