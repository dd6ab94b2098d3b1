//! Wigner and Sobouti-Nasiri distributions, the unitary map between them, marginals and
//! normalization.
//!
//! All integrals over the displacement `y` are periodic Riemann sums. For the Wigner
//! transform the half displacements `q ± y/2` are taken on the doubled-resolution grid
//! produced by spectral interpolation, so `y = m Δq` runs over `m = -n/2 .. n/2` and the
//! phase `e^{i p_k y / ħ}` is an exact `n`-point DFT. The two end points `m = ±n/2` share
//! one phase and each get half weight, which keeps the sum Hermitian-symmetric in `m`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::distribution::{DistributionKind, MarginalAxis, MarginalVector, PhaseSpaceDistribution};
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::spectral::{self, signed_index, FftPair};
use crate::state::{DensityMatrix, Wavefunction};

/// Orientation of the exponent in the Sobouti-Nasiri → Wigner multiplier
/// `exp(s · iħ σ θ / 2)`, where `σ`, `θ` are the angular frequencies conjugate to `q`
/// and `p` in the `f(x) = Σ F e^{+iκx}` convention. Pinned by the path-equivalence test.
pub const SN_TO_WIGNER_SIGN: f64 = -1.0;

/// Largest coherence `|ψ(a) ψ(a + L/2)| / max|ψ|²` tolerated by the Wigner transform.
/// Coherences at half-period separation fall outside the displacement window.
pub const WINDOW_LEAK_TOL: f64 = 1e-6;

/// Assembles Wigner-type rows from a fetcher of the doubled-grid kernel
/// `K(2j - m, 2j + m)` (fine indices, taken modulo `2n`).
fn centered_rows<F>(n: usize, scale: f64, fetch: F) -> Array2<Complex64>
where
    F: Fn(usize, i64) -> Complex64,
{
    let plans = FftPair::new(n);
    let half = (n / 2) as i64;
    let mut out = Array2::<Complex64>::zeros((n, n));
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for m in (1 - half)..half {
            row[m.rem_euclid(n as i64) as usize] = fetch(j, m);
        }
        row[n / 2] = 0.5 * (fetch(j, -half) + fetch(j, half));
        plans.inverse(&mut row);
        store_ascending(&mut out, j, &row, scale);
    }
    out
}

/// Copies DFT bins into storage row `j` with momentum ascending.
fn store_ascending(out: &mut Array2<Complex64>, j: usize, bins: &[Complex64], scale: f64) {
    let n = bins.len();
    for k in 0..n {
        out[[j, k]] = bins[(k + n / 2) % n] * scale;
    }
}

fn fine_index(j: usize, offset: i64, n: usize) -> usize {
    (2 * j as i64 + offset).rem_euclid(2 * n as i64) as usize
}

/// Half-period coherence of a doubled-grid wavefunction, relative to its peak density.
fn window_leak(fine: &[Complex64]) -> f64 {
    let n2 = fine.len();
    let peak = fine.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let worst = (0..n2)
        .map(|a| fine[a].norm() * fine[(a + n2 / 2) % n2].norm())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        0.0
    } else {
        worst / peak
    }
}

/// Wigner distribution of a pure state,
/// `W(q, p) = (2πħ)^{-1} ∫ ψ*(q + y/2) ψ(q - y/2) e^{ipy/ħ} dy`.
pub fn wigner_from_wavefunction(psi: &Wavefunction) -> Result<PhaseSpaceDistribution> {
    psi.check_boundary()?;
    let grid = *psi.grid();
    let constants = *psi.constants();
    let n = grid.len();
    let fine = spectral::interpolate_double(psi.samples());
    let leak = window_leak(&fine);
    if leak > WINDOW_LEAK_TOL {
        return Err(Error::BoundaryLeak {
            what: "coherence at half-period displacement",
            residual: leak,
            tolerance: WINDOW_LEAK_TOL,
        });
    }
    let scale = grid.spacing() / (2.0 * PI * constants.hbar);
    let values = centered_rows(n, scale, |j, m| {
        fine[fine_index(j, -m, n)] * fine[fine_index(j, m, n)].conj()
    });
    PhaseSpaceDistribution::new(DistributionKind::Wigner, grid, constants, values)
}

/// Wigner distribution of a density kernel,
/// `W(q, p) = (2πħ)^{-1} ∫ ⟨q - y/2|ρ̂|q + y/2⟩ e^{ipy/ħ} dy`.
pub fn wigner_from_density(rho: &DensityMatrix) -> PhaseSpaceDistribution {
    let grid = *rho.grid();
    let constants = *rho.constants();
    let n = grid.len();
    let fine = spectral::interpolate_double_2d(rho.elements());
    let scale = grid.spacing() / (2.0 * PI * constants.hbar);
    let values = centered_rows(n, scale, |j, m| fine[[fine_index(j, -m, n), fine_index(j, m, n)]]);
    PhaseSpaceDistribution::new(DistributionKind::Wigner, grid, constants, values).expect("shape follows the grid")
}

/// Sobouti-Nasiri distribution `P(q, p) = (2πħ)^{-1} ∫ ⟨q|ρ̂|q + y⟩ e^{ipy/ħ} dy`.
pub fn sn_from_density(rho: &DensityMatrix) -> PhaseSpaceDistribution {
    let grid = *rho.grid();
    let constants = *rho.constants();
    let n = grid.len();
    let plans = FftPair::new(n);
    let scale = grid.spacing() / (2.0 * PI * constants.hbar);
    let elements = rho.elements();
    let mut values = Array2::<Complex64>::zeros((n, n));
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for (m, slot) in row.iter_mut().enumerate() {
            *slot = elements[[j, (j + m) % n]];
        }
        plans.inverse(&mut row);
        store_ascending(&mut values, j, &row, scale);
    }
    PhaseSpaceDistribution::new(DistributionKind::SobutiNasiri, grid, constants, values)
        .expect("shape follows the grid")
}

/// Closed form of the Sobouti-Nasiri distribution of a pure state,
/// `(2πħ)^{-1/2} ψ(q) φ*(p) e^{-ipq/ħ}`, evaluated from the sampled `ψ` and its
/// discrete momentum amplitudes.
pub fn sn_pure_factorized(psi: &Wavefunction) -> Array2<Complex64> {
    let grid = psi.grid();
    let c = psi.constants();
    let pgrid = psi.momentum_grid();
    let phi = psi.to_momentum_representation();
    let pref = (2.0 * PI * c.hbar).sqrt().recip();
    let s = psi.samples();
    Array2::from_shape_fn((grid.len(), grid.len()), |(j, k)| {
        let phase = -pgrid.point(k) * grid.point(j) / c.hbar;
        s[j] * phi[k].conj() * Complex64::from_polar(pref, phase)
    })
}

/// Applies `exp(iħ/2 ∂²/∂q∂p)` as the diagonal multiplier `exp(s · iħ σ θ / 2)` on the
/// double spectral transform, mapping a Sobouti-Nasiri distribution to a Wigner one.
pub fn sn_to_wigner(psn: &PhaseSpaceDistribution) -> Result<PhaseSpaceDistribution> {
    if psn.kind() != DistributionKind::SobutiNasiri {
        return Err(Error::WrongKind {
            expected: DistributionKind::SobutiNasiri,
            found: psn.kind(),
        });
    }
    let values = apply_ordering_multiplier(psn, SN_TO_WIGNER_SIGN);
    PhaseSpaceDistribution::new(DistributionKind::Wigner, *psn.qgrid(), *psn.constants(), values)
}

/// Multiplier `exp(sign · iħ σ θ / 2)` applied to an arbitrary distribution.
pub fn apply_ordering_multiplier(dist: &PhaseSpaceDistribution, sign: f64) -> Array2<Complex64> {
    let qgrid = dist.qgrid();
    let pgrid = dist.pgrid();
    let hbar = dist.constants().hbar;
    let n = qgrid.len();
    let plans = FftPair::new(n);
    let mut spec = dist.values().clone();

    fft_rows(&mut spec, &plans, false);
    fft_cols(&mut spec, &plans, false);
    let dsigma = 2.0 * PI / (n as f64 * qgrid.spacing());
    let dtheta = 2.0 * PI / (n as f64 * pgrid.spacing());
    let norm = 1.0 / (n * n) as f64;
    for ((a, b), z) in spec.indexed_iter_mut() {
        let sigma = signed_index(a, n) as f64 * dsigma;
        let theta = signed_index(b, n) as f64 * dtheta;
        *z *= Complex64::from_polar(norm, sign * hbar * sigma * theta / 2.0);
    }
    fft_cols(&mut spec, &plans, true);
    fft_rows(&mut spec, &plans, true);
    spec
}

pub(crate) fn fft_rows(a: &mut Array2<Complex64>, plans: &FftPair, inverse: bool) {
    if !a.is_standard_layout() {
        *a = a.as_standard_layout().into_owned();
    }
    let buf = a.as_slice_mut().expect("standard layout");
    if inverse {
        plans.inverse(buf);
    } else {
        plans.forward(buf);
    }
}

pub(crate) fn fft_cols(a: &mut Array2<Complex64>, plans: &FftPair, inverse: bool) {
    let mut t = a.t().as_standard_layout().into_owned();
    fft_rows(&mut t, plans, inverse);
    a.assign(&t.t());
}

/// `P_mom(p_k) = Re Σ_j P(q_j, p_k) Δq`.
pub fn momentum_marginal(dist: &PhaseSpaceDistribution) -> MarginalVector {
    let dq = dist.qgrid().spacing();
    let sums: Vec<Complex64> = dist.values().columns().into_iter().map(|c| c.sum() * dq).collect();
    MarginalVector {
        axis: MarginalAxis::Momentum,
        points: dist.pgrid().points(),
        spacing: dist.pgrid().spacing(),
        values: sums.iter().map(|z| z.re).collect(),
        imag_residual: sums.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
    }
}

/// `P_pos(q_j) = Re Σ_k P(q_j, p_k) Δp`.
pub fn position_marginal(dist: &PhaseSpaceDistribution) -> MarginalVector {
    let dp = dist.pgrid().spacing();
    let sums: Vec<Complex64> = dist.values().rows().into_iter().map(|r| r.sum() * dp).collect();
    MarginalVector {
        axis: MarginalAxis::Position,
        points: dist.qgrid().points(),
        spacing: dist.qgrid().spacing(),
        values: sums.iter().map(|z| z.re).collect(),
        imag_residual: sums.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
    }
}

/// `Tr(ρ̂ δ(p - p̂)) = ⟨p|ρ̂|p⟩`, read off the diagonal of `ρ̂` in the momentum basis.
pub fn momentum_density_oracle(rho: &DensityMatrix) -> MarginalVector {
    let grid = *rho.grid();
    let constants = *rho.constants();
    let n = grid.len();
    let plans = FftPair::new(n);
    let elements = rho.elements();

    // T = U ρ, one column at a time
    let mut t = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let col: Vec<Complex64> = elements.column(j).iter().copied().collect();
        let tc = spectral::to_momentum(&col, &grid, &constants, &plans);
        t.column_mut(j).iter_mut().zip(tc).for_each(|(d, s)| *d = s);
    }
    // (U ρ U†)_kk = conj((U conj(T_k·))_k)
    let diag: Vec<Complex64> = (0..n)
        .map(|k| {
            let row: Vec<Complex64> = t.row(k).iter().map(|z| z.conj()).collect();
            spectral::to_momentum(&row, &grid, &constants, &plans)[k].conj()
        })
        .collect();
    let pgrid = MomentumGrid::new(&grid, &constants);
    MarginalVector {
        axis: MarginalAxis::Momentum,
        points: pgrid.points(),
        spacing: pgrid.spacing(),
        values: diag.iter().map(|z| z.re).collect(),
        imag_residual: diag.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
    }
}

/// Position density of `ρ̂` as a marginal vector (its diagonal).
pub fn position_density(rho: &DensityMatrix) -> MarginalVector {
    let grid = rho.grid();
    MarginalVector {
        axis: MarginalAxis::Position,
        points: grid.points(),
        spacing: grid.spacing(),
        values: rho.diagonal(),
        imag_residual: rho.elements().diag().iter().map(|z| z.im.abs()).fold(0.0, f64::max),
    }
}

/// `ΣΣ P Δq Δp`.
pub fn normalization(dist: &PhaseSpaceDistribution) -> Complex64 {
    dist.values().sum() * dist.cell()
}

/// Convenience for tests and the verifier: both distributions of one density.
pub fn both_distributions(rho: &DensityMatrix) -> (PhaseSpaceDistribution, PhaseSpaceDistribution) {
    (wigner_from_density(rho), sn_from_density(rho))
}
