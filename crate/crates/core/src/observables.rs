//! Weyl symbols of operators and expectation values.
//!
//! Kernels follow the grid delta convention `δ(q_i - q_j) ↦ δ_ij / Δq`, so an operator
//! acts on samples as `(Âψ)_i = Σ_j A_ij ψ_j Δq`. The Weyl transform needs kernel values
//! at half-integer offsets; each diagonal band `b_m(c) = A(c, c + m)` is shifted by half
//! a cell spectrally when `m` is odd. Working band by band keeps diagonal kernels (such as
//! functions of `q̂`) exact, which a two-dimensional interpolation of the kernel would not.

use ndarray::Array2;
use num_complex::Complex64;

use crate::distribution::PhaseSpaceDistribution;
use crate::dynamics::PolynomialPotential;
use crate::error::{Error, Result};
use crate::grid::{MomentumGrid, PhysicalConstants, PositionGrid};
use crate::spectral::{shift_fractional, FftPair};
use crate::state::DensityMatrix;

/// Kernel `⟨q_i|Â|q_j⟩` of a (not necessarily Hermitian) operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    grid: PositionGrid,
    elements: Array2<Complex64>,
}

impl OperatorKernel {
    pub fn new(grid: PositionGrid, elements: Array2<Complex64>) -> Result<Self> {
        let n = grid.len();
        if elements.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "kernel of shape {:?} for a grid of {n}",
                elements.dim()
            )));
        }
        if elements.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::GridMismatch("kernel has non-finite entries".into()));
        }
        Ok(Self { grid, elements })
    }

    /// Kernel of the operator whose action on sample vectors is `matrix`.
    pub fn from_matrix(grid: PositionGrid, matrix: Array2<Complex64>) -> Result<Self> {
        let dq = grid.spacing();
        Self::new(grid, matrix.mapv(|z| z / dq))
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn elements(&self) -> &Array2<Complex64> {
        &self.elements
    }

    /// Matrix acting on sample vectors (`A Δq`).
    pub fn matrix(&self) -> Array2<Complex64> {
        let dq = self.grid.spacing();
        self.elements.mapv(|z| z * dq)
    }

    pub fn identity(grid: PositionGrid) -> Self {
        Self::function_of_position(grid, |_| 1.0)
    }

    pub fn position(grid: PositionGrid) -> Self {
        Self::function_of_position(grid, |q| q)
    }

    pub fn function_of_position(grid: PositionGrid, f: impl Fn(f64) -> f64) -> Self {
        let n = grid.len();
        let dq = grid.spacing();
        let mut elements = Array2::<Complex64>::zeros((n, n));
        for j in 0..n {
            elements[[j, j]] = Complex64::new(f(grid.point(j)) / dq, 0.0);
        }
        Self { grid, elements }
    }

    /// `f(p̂)` realized spectrally: a circulant with entries
    /// `(n Δq)^{-1} Σ_k f(p_k) e^{i p_k (q_i - q_j) / ħ}`.
    pub fn function_of_momentum(grid: PositionGrid, constants: &PhysicalConstants, f: impl Fn(f64) -> f64) -> Self {
        let n = grid.len();
        let pgrid = MomentumGrid::new(&grid, constants);
        let plans = FftPair::new(n);
        let mut bins = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            bins[pgrid.wave_index(k).rem_euclid(n as i64) as usize] = Complex64::new(f(pgrid.point(k)), 0.0);
        }
        plans.inverse(&mut bins);
        let scale = 1.0 / (n as f64 * grid.spacing());
        let elements = Array2::from_shape_fn((n, n), |(i, j)| bins[(i + n - j) % n] * scale);
        Self { grid, elements }
    }

    pub fn momentum(grid: PositionGrid, constants: &PhysicalConstants) -> Self {
        Self::function_of_momentum(grid, constants, |p| p)
    }

    pub fn hamiltonian(grid: PositionGrid, constants: &PhysicalConstants, v: &PolynomialPotential) -> Self {
        let m = constants.mass;
        let kinetic = Self::function_of_momentum(grid, constants, |p| p * p / (2.0 * m));
        let potential = Self::function_of_position(grid, |q| v.eval(q));
        kinetic.add(&potential)
    }

    pub fn add(&self, other: &OperatorKernel) -> Self {
        Self {
            grid: self.grid,
            elements: &self.elements + &other.elements,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            elements: self.elements.mapv(|z| z * factor),
        }
    }

    /// Kernel of the operator product `Â B̂`.
    pub fn compose(&self, other: &OperatorKernel) -> Self {
        let dq = self.grid.spacing();
        Self {
            grid: self.grid,
            elements: self.elements.dot(&other.elements).mapv(|z| z * dq),
        }
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        let n = self.grid.len();
        (0..n).all(|i| (i..n).all(|j| (self.elements[[i, j]] - self.elements[[j, i]].conj()).norm() <= tolerance))
    }
}

/// Phase-space function `A(q_j, p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylSymbol {
    pub qgrid: PositionGrid,
    pub pgrid: MomentumGrid,
    pub values: Array2<Complex64>,
}

impl WeylSymbol {
    pub fn from_fn(qgrid: PositionGrid, constants: &PhysicalConstants, f: impl Fn(f64, f64) -> f64) -> Self {
        let pgrid = MomentumGrid::new(&qgrid, constants);
        let n = qgrid.len();
        let values = Array2::from_shape_fn((n, n), |(j, k)| Complex64::new(f(qgrid.point(j), pgrid.point(k)), 0.0));
        Self { qgrid, pgrid, values }
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_distance(&self, other: &WeylSymbol) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinObservable {
    Position,
    Momentum,
    Kinetic,
    Potential(PolynomialPotential),
    Hamiltonian(PolynomialPotential),
}

/// Closed-form symbols `q`, `p`, `p²/2m`, `V(q)`, `p²/2m + V(q)`.
pub fn builtin_symbol(name: &BuiltinObservable, qgrid: PositionGrid, constants: &PhysicalConstants) -> WeylSymbol {
    let m = constants.mass;
    match name {
        BuiltinObservable::Position => WeylSymbol::from_fn(qgrid, constants, |q, _| q),
        BuiltinObservable::Momentum => WeylSymbol::from_fn(qgrid, constants, |_, p| p),
        BuiltinObservable::Kinetic => WeylSymbol::from_fn(qgrid, constants, |_, p| p * p / (2.0 * m)),
        BuiltinObservable::Potential(v) => WeylSymbol::from_fn(qgrid, constants, |q, _| v.eval(q)),
        BuiltinObservable::Hamiltonian(v) => {
            WeylSymbol::from_fn(qgrid, constants, |q, p| p * p / (2.0 * m) + v.eval(q))
        }
    }
}

/// Bands of a kernel at the centred positions: `B(j, m) = A(j - m/2, j + m/2)` for
/// `m = -n/2 ..= n/2`, returned as rows indexed by `m + n/2`.
fn centred_bands(a: &Array2<Complex64>, plans: &FftPair) -> Array2<Complex64> {
    let n = a.nrows();
    let half = (n / 2) as i64;
    let mut out = Array2::<Complex64>::zeros((n + 1, n));
    let mut band = vec![Complex64::new(0.0, 0.0); n];
    for m in -half..=half {
        for (c, slot) in band.iter_mut().enumerate() {
            *slot = a[[c, (c as i64 + m).rem_euclid(n as i64) as usize]];
        }
        let (source, offset) = if m % 2 == 0 {
            (band.clone(), m / 2)
        } else {
            // h(c) = b(c + 1/2), so b(j - m/2) = h(j - (m + 1)/2)
            (shift_fractional(&band, 0.5, plans), (m + 1) / 2)
        };
        let mut row = out.row_mut((m + half) as usize);
        for j in 0..n {
            row[j] = source[(j as i64 - offset).rem_euclid(n as i64) as usize];
        }
    }
    out
}

/// `A(q, p) = Σ_y ⟨q - y/2|Â|q + y/2⟩ e^{ipy/ħ} Δy`, without the `1/2πħ` of the Wigner
/// function.
pub fn weyl_symbol_of_kernel(a: &OperatorKernel, constants: &PhysicalConstants) -> WeylSymbol {
    let qgrid = *a.grid();
    let n = qgrid.len();
    let half = n / 2;
    let plans = FftPair::new(n);
    let bands = centred_bands(a.elements(), &plans);
    let dq = qgrid.spacing();
    let mut values = Array2::<Complex64>::zeros((n, n));
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for m in 1..half {
            row[m] = bands[[half + m, j]];
            row[n - m] = bands[[half - m, j]];
        }
        row[0] = bands[[half, j]];
        row[half] = 0.5 * (bands[[0, j]] + bands[[n, j]]);
        plans.inverse(&mut row);
        for k in 0..n {
            values[[j, k]] = row[(k + half) % n] * dq;
        }
    }
    WeylSymbol {
        qgrid,
        pgrid: MomentumGrid::new(&qgrid, constants),
        values,
    }
}

/// Inverse Weyl transform. The half-period band is only determined through the average
/// of its two centred copies, so it is reconstructed symmetrically.
pub fn kernel_from_symbol(symbol: &WeylSymbol) -> OperatorKernel {
    let qgrid = symbol.qgrid;
    let n = qgrid.len();
    let half = n / 2;
    let plans = FftPair::new(n);
    let scale = 1.0 / (n as f64 * qgrid.spacing());

    // centred[j][m mod n] = B(j, m)
    let mut centred = Array2::<Complex64>::zeros((n, n));
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for k in 0..n {
            row[(k + half) % n] = symbol.values[[j, k]];
        }
        plans.forward(&mut row);
        for (m, z) in row.iter().enumerate() {
            centred[[j, m]] = z * scale;
        }
    }

    let mut elements = Array2::<Complex64>::zeros((n, n));
    let mut placed = vec![Complex64::new(0.0, 0.0); n];
    for m in -(half as i64)..(half as i64) {
        let col = m.rem_euclid(n as i64) as usize;
        let offset = if m % 2 == 0 { m / 2 } else { (m + 1) / 2 };
        for j in 0..n {
            placed[(j as i64 - offset).rem_euclid(n as i64) as usize] = centred[[j, col]];
        }
        let band = if m % 2 == 0 {
            placed.clone()
        } else {
            shift_fractional(&placed, -0.5, &plans)
        };
        if m == -(half as i64) {
            // B(j, -n/2) = b(j + n/4) and B(j, n/2) = b(j - n/4) refer to the same band
            for c in 0..n {
                let v = 0.5 * (band[c] + band[(c + half) % n]);
                elements[[c, (c + half) % n]] = v;
            }
        } else {
            for c in 0..n {
                elements[[c, (c as i64 + m).rem_euclid(n as i64) as usize]] = band[c];
            }
        }
    }
    OperatorKernel { grid: qgrid, elements }
}

/// Phase-space average `ΣΣ P(q, p) A(q, p) Δq Δp`.
pub fn expect_phase_space(dist: &PhaseSpaceDistribution, symbol: &WeylSymbol) -> Result<Complex64> {
    if dist.qgrid() != &symbol.qgrid || dist.pgrid() != &symbol.pgrid {
        return Err(Error::GridMismatch("distribution and symbol grids differ".into()));
    }
    let sum: Complex64 = dist.values().iter().zip(symbol.values.iter()).map(|(p, a)| p * a).sum();
    Ok(sum * dist.cell())
}

/// `Tr(ρ̂ Â) = Σ_ij ρ_ij A_ji Δq²`.
pub fn expect_operator_oracle(rho: &DensityMatrix, a: &OperatorKernel) -> Result<Complex64> {
    if rho.grid() != a.grid() {
        return Err(Error::GridMismatch("density and operator grids differ".into()));
    }
    let n = rho.grid().len();
    let dq = rho.grid().spacing();
    let r = rho.elements();
    let k = a.elements();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += r[[i, j]] * k[[j, i]];
        }
    }
    Ok(acc * dq * dq)
}

/// Kernel of the density operator itself.
pub fn density_kernel(rho: &DensityMatrix) -> OperatorKernel {
    OperatorKernel {
        grid: *rho.grid(),
        elements: rho.elements().clone(),
    }
}
