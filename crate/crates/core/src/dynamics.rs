//! Time evolution of Wigner functions under the Wigner (Moyal) equation for polynomial
//! potentials,
//!
//! ```text
//! ∂W/∂t = -(p/m) ∂W/∂q + Σ_{n=0}^{N} (-1)^n (ħ/2)^{2n} / (2n+1)! · V^{(2n+1)}(q) · ∂^{2n+1}W/∂p^{2n+1}
//! ```
//!
//! integrated with fixed-step RK4, and a split-step Schrödinger propagator that serves
//! as the independent reference.

use std::f64::consts::PI;

use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::distribution::{DistributionKind, PhaseSpaceDistribution};
use crate::error::{Error, Result};
use crate::grid::{MomentumGrid, PhysicalConstants, PositionGrid};
use crate::spectral::{signed_index, FftPair};
use crate::state::Wavefunction;
use crate::transforms::fft_rows;

pub const MAX_DEGREE: usize = 8;

/// `V(q) = Σ_k c_k q^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    coefficients: Vec<f64>,
}

impl PolynomialPotential {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("coefficients must be finite".into()));
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidPotential(format!(
                "degree {} exceeds {MAX_DEGREE}",
                coefficients.len() - 1
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn zero() -> Self {
        Self {
            coefficients: Vec::new(),
        }
    }

    /// `m ω² q² / 2`.
    pub fn harmonic(omega: f64, mass: f64) -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.5 * mass * omega * omega],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    pub fn derivative(&self) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |v, _| v.derivative())
    }

    /// Number of series terms beyond `n = 0` that are not identically zero.
    pub fn exact_truncation(&self) -> usize {
        self.degree().saturating_sub(1).div_ceil(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    /// Highest series index `n` kept; `None` keeps every non-vanishing term.
    pub truncation: Option<usize>,
    pub constants: PhysicalConstants,
    /// Multiplies the step-size bounds; 1.0 is the default guard.
    pub cfl_factor: f64,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize, constants: PhysicalConstants) -> Result<Self> {
        let cfg = Self {
            dt,
            steps,
            truncation: None,
            constants,
            cfl_factor: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.cfl_factor.is_finite() && self.cfl_factor > 0.0) {
            return Err(Error::InvalidConfig("cfl factor must be positive".into()));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn effective_truncation(&self, v: &PolynomialPotential) -> usize {
        self.truncation.unwrap_or_else(|| v.exact_truncation())
    }
}

/// Largest `|W|` tolerated in the outermost momentum columns during evolution.
pub const MOMENTUM_EDGE_TOL: f64 = 1e-10;
const EDGE_COLUMNS: usize = 2;
const BOUNDARY_CHECK_INTERVAL: usize = 100;

/// Real-input transforms of one length.
#[derive(Clone)]
struct RealPlans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
}

impl std::fmt::Debug for RealPlans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealPlans").field("n", &self.r2c.len()).finish()
    }
}

impl RealPlans {
    fn new(n: usize) -> Self {
        let mut planner = RealFftPlanner::new();
        Self {
            r2c: planner.plan_fft_forward(n),
            c2r: planner.plan_fft_inverse(n),
        }
    }

    /// Replaces every row of `rows` by `c2r(multiplier[row] · r2c(row))`.
    fn filter_rows(&self, rows: &mut Array2<f64>, multiplier: &Array2<Complex64>) {
        let n = rows.ncols();
        let mut input = vec![0.0; n];
        let mut spectrum = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
        for (mut row, mult) in rows.rows_mut().into_iter().zip(multiplier.rows()) {
            input.iter_mut().zip(row.iter()).for_each(|(d, s)| *d = *s);
            self.r2c
                .process(&mut input, &mut spectrum)
                .expect("buffer lengths match the plan");
            spectrum.iter_mut().zip(mult.iter()).for_each(|(z, m)| *z *= m);
            // the multipliers vanish at the zero and Nyquist bins, as c2r requires
            self.c2r
                .process(&mut spectrum, &mut input)
                .expect("buffer lengths match the plan");
            row.iter_mut().zip(&input).for_each(|(d, s)| *d = *s);
        }
    }
}

/// Precomputed spectral operator for the right-hand side of the Wigner equation.
#[derive(Debug, Clone)]
pub struct WignerRhs {
    n: usize,
    plans: FftPair,
    real: RealPlans,
    /// nonnegative-frequency halves of `streaming` and `force`, scaled by `1/n`
    streaming_half: Array2<Complex64>,
    force_half: Array2<Complex64>,
    /// `-(p_k/m) i σ_a`, indexed `[k, a]` (momentum column, q-frequency)
    streaming: Array2<Complex64>,
    /// `Σ_n c_n V^{(2n+1)}(q_j) (iθ_b)^{2n+1}`, indexed `[j, b]`
    force: Array2<Complex64>,
}

impl WignerRhs {
    pub fn new(
        qgrid: &PositionGrid,
        constants: &PhysicalConstants,
        v: &PolynomialPotential,
        truncation: usize,
    ) -> Self {
        let n = qgrid.len();
        let pgrid = MomentumGrid::new(qgrid, constants);
        let dsigma = 2.0 * PI / (n as f64 * qgrid.spacing());
        let dtheta = 2.0 * PI / (n as f64 * pgrid.spacing());
        // odd derivatives drop the Nyquist bin
        let freq = |a: usize, step: f64| {
            if a == n / 2 {
                0.0
            } else {
                signed_index(a, n) as f64 * step
            }
        };

        let streaming = Array2::from_shape_fn((n, n), |(k, a)| {
            Complex64::new(0.0, -pgrid.point(k) / constants.mass * freq(a, dsigma))
        });

        let terms: Vec<(f64, PolynomialPotential, i32)> = (0..=truncation)
            .map(|s| {
                let order = 2 * s + 1;
                let coeff = (-1f64).powi(s as i32) * (constants.hbar / 2.0).powi(2 * s as i32) / factorial(order);
                (coeff, v.nth_derivative(order), order as i32)
            })
            .filter(|(_, d, _)| !d.is_zero())
            .collect();
        let force = Array2::from_shape_fn((n, n), |(j, b)| {
            let q = qgrid.point(j);
            let theta = freq(b, dtheta);
            terms
                .iter()
                .map(|(c, d, order)| Complex64::new(0.0, theta).powi(*order) * (c * d.eval(q)))
                .sum()
        });

        let scale = 1.0 / n as f64;
        let half = |m: &Array2<Complex64>| m.slice(ndarray::s![.., ..=n / 2]).mapv(|z| z * scale);
        Self {
            n,
            plans: FftPair::new(n),
            real: RealPlans::new(n),
            streaming_half: half(&streaming),
            force_half: half(&force),
            streaming,
            force,
        }
    }

    /// Largest moduli of the streaming and force multipliers.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let max = |a: &Array2<Complex64>| a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (max(&self.streaming), max(&self.force))
    }

    pub fn apply(&self, w: &Array2<Complex64>) -> Array2<Complex64> {
        let scale = 1.0 / self.n as f64;
        // streaming differentiates along q, i.e. along the rows of the transpose
        let mut stream = w.t().as_standard_layout().into_owned();
        fft_rows(&mut stream, &self.plans, false);
        stream.zip_mut_with(&self.streaming, |z, m| *z *= m * scale);
        fft_rows(&mut stream, &self.plans, true);

        let mut force = w.clone();
        fft_rows(&mut force, &self.plans, false);
        force.zip_mut_with(&self.force, |z, m| *z *= m * scale);
        fft_rows(&mut force, &self.plans, true);

        force + stream.t()
    }

    /// Same operator restricted to real `W`, which it maps to real `W`.
    pub fn apply_real(&self, w: &Array2<f64>) -> Array2<f64> {
        let mut stream = w.t().as_standard_layout().into_owned();
        self.real.filter_rows(&mut stream, &self.streaming_half);
        let mut force = w.as_standard_layout().into_owned();
        self.real.filter_rows(&mut force, &self.force_half);
        force + stream.t()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn require_wigner(dist: &PhaseSpaceDistribution) -> Result<()> {
    if dist.kind() != DistributionKind::Wigner {
        return Err(Error::WrongKind {
            expected: DistributionKind::Wigner,
            found: dist.kind(),
        });
    }
    Ok(())
}

/// Time derivative of a Wigner function under `v`.
pub fn wigner_rhs(
    dist: &PhaseSpaceDistribution,
    v: &PolynomialPotential,
    cfg: &EvolutionConfig,
) -> Result<Array2<Complex64>> {
    require_wigner(dist)?;
    let rhs = WignerRhs::new(dist.qgrid(), dist.constants(), v, cfg.effective_truncation(v));
    Ok(rhs.apply(dist.values()))
}

/// Extent of the stability region of classical RK4 along the imaginary axis.
pub const RK4_IMAGINARY_LIMIT: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Step-size guard: `dt (max|streaming| + max|force|) ≤ f · 2√2`.
///
/// Both multipliers are purely imaginary, so their summed moduli bound the spectral
/// radius of the right-hand side.
pub fn check_step(qgrid: &PositionGrid, v: &PolynomialPotential, cfg: &EvolutionConfig) -> Result<()> {
    let rhs = WignerRhs::new(qgrid, &cfg.constants, v, cfg.effective_truncation(v));
    check_rhs_step(&rhs, cfg)
}

fn check_rhs_step(rhs: &WignerRhs, cfg: &EvolutionConfig) -> Result<()> {
    let (streaming, force) = rhs.spectral_bounds();
    let limit = cfg.cfl_factor * RK4_IMAGINARY_LIMIT;
    let bound = limit / (streaming + force);
    if cfg.dt > bound {
        let what = if cfg.dt * streaming > limit {
            "streaming"
        } else {
            "force"
        };
        return Err(Error::StepTooLarge {
            what,
            dt: cfg.dt,
            bound,
        });
    }
    Ok(())
}

/// Fixed-step RK4 integrator for the Wigner equation.
#[derive(Debug, Clone)]
///
/// The state is kept real; the imaginary part of the initial distribution is rounding
/// noise and is dropped.
pub struct WignerStepper {
    template: PhaseSpaceDistribution,
    rhs: WignerRhs,
    state: Array2<f64>,
    dt: f64,
    step: usize,
}

impl WignerStepper {
    pub fn new(dist0: &PhaseSpaceDistribution, v: &PolynomialPotential, cfg: &EvolutionConfig) -> Result<Self> {
        require_wigner(dist0)?;
        cfg.validate()?;
        if dist0.constants() != &cfg.constants {
            return Err(Error::GridMismatch(
                "distribution and config use different constants".into(),
            ));
        }
        let rhs = WignerRhs::new(dist0.qgrid(), dist0.constants(), v, cfg.effective_truncation(v));
        check_rhs_step(&rhs, cfg)?;
        Ok(Self {
            template: dist0.clone(),
            rhs,
            state: dist0.values().mapv(|z| z.re),
            dt: cfg.dt,
            step: 0,
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.state
    }

    pub fn current(&self) -> PhaseSpaceDistribution {
        self.template.with_values(self.state.mapv(|x| Complex64::new(x, 0.0)))
    }

    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        let k1 = self.rhs.apply_real(&self.state);
        let k2 = self.rhs.apply_real(&(&self.state + &(&k1 * (0.5 * dt))));
        let k3 = self.rhs.apply_real(&(&self.state + &(&k2 * (0.5 * dt))));
        let k4 = self.rhs.apply_real(&(&self.state + &(&k3 * dt)));
        let w = dt / 6.0;
        Zip::from(&mut self.state)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|s, a, b, c, d| *s += (a + b * 2.0 + c * 2.0 + d) * w);
        self.step += 1;
        if self.step.is_multiple_of(BOUNDARY_CHECK_INTERVAL) {
            self.check_momentum_edges()?;
        }
        Ok(())
    }

    pub fn check_momentum_edges(&self) -> Result<()> {
        let n = self.state.ncols();
        let residual = (0..EDGE_COLUMNS)
            .chain(n - EDGE_COLUMNS..n)
            .flat_map(|k| self.state.column(k).iter().map(|x| x.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        if residual > MOMENTUM_EDGE_TOL {
            return Err(Error::BoundaryLeak {
                what: "Wigner function at momentum edge",
                residual,
                tolerance: MOMENTUM_EDGE_TOL,
            });
        }
        Ok(())
    }
}

pub fn evolve_wigner(
    dist0: &PhaseSpaceDistribution,
    v: &PolynomialPotential,
    cfg: &EvolutionConfig,
) -> Result<PhaseSpaceDistribution> {
    let mut stepper = WignerStepper::new(dist0, v, cfg)?;
    for _ in 0..cfg.steps {
        stepper.step()?;
    }
    Ok(stepper.current())
}

/// Strang splitting `e^{-iVdt/2ħ} e^{-iTdt/ħ} e^{-iVdt/2ħ}` with the kinetic factor
/// applied in the momentum representation.
#[derive(Debug, Clone)]
pub struct SchrodingerStepper {
    grid: PositionGrid,
    constants: PhysicalConstants,
    plans: FftPair,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    samples: Vec<Complex64>,
    dt: f64,
    step: usize,
}

impl SchrodingerStepper {
    pub fn new(psi0: &Wavefunction, v: &PolynomialPotential, cfg: &EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = *psi0.grid();
        let c = *psi0.constants();
        let n = grid.len();
        let pgrid = MomentumGrid::new(&grid, &c);
        let max_kinetic_phase = cfg.dt * pgrid.p_max().powi(2) / (2.0 * c.mass * c.hbar);
        let kinetic_bound = cfg.cfl_factor * PI;
        if max_kinetic_phase > kinetic_bound {
            return Err(Error::StepTooLarge {
                what: "kinetic phase",
                dt: cfg.dt,
                bound: cfg.dt * kinetic_bound / max_kinetic_phase,
            });
        }
        let vmax = grid.points().iter().map(|&q| v.eval(q).abs()).fold(0.0, f64::max);
        if cfg.dt * vmax / c.hbar > kinetic_bound {
            return Err(Error::StepTooLarge {
                what: "potential phase",
                dt: cfg.dt,
                bound: kinetic_bound * c.hbar / vmax,
            });
        }
        let half_potential = grid
            .points()
            .iter()
            .map(|&q| Complex64::from_polar(1.0, -v.eval(q) * cfg.dt / (2.0 * c.hbar)))
            .collect();
        let mut kinetic = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let p = pgrid.point(k);
            let bin = pgrid.wave_index(k).rem_euclid(n as i64) as usize;
            kinetic[bin] = Complex64::from_polar(1.0 / n as f64, -p * p * cfg.dt / (2.0 * c.mass * c.hbar));
        }
        Ok(Self {
            grid,
            constants: c,
            plans: FftPair::new(n),
            half_potential,
            kinetic,
            samples: psi0.samples().to_vec(),
            dt: cfg.dt,
            step: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn step(&mut self) {
        for (z, f) in self.samples.iter_mut().zip(&self.half_potential) {
            *z *= f;
        }
        self.plans.forward(&mut self.samples);
        for (z, f) in self.samples.iter_mut().zip(&self.kinetic) {
            *z *= f;
        }
        self.plans.inverse(&mut self.samples);
        for (z, f) in self.samples.iter_mut().zip(&self.half_potential) {
            *z *= f;
        }
        self.step += 1;
    }

    pub fn current(&self) -> Result<Wavefunction> {
        Wavefunction::new(self.grid, self.samples.clone(), self.constants)
    }
}

pub fn evolve_schrodinger_oracle(
    psi0: &Wavefunction,
    v: &PolynomialPotential,
    cfg: &EvolutionConfig,
) -> Result<Wavefunction> {
    let mut stepper = SchrodingerStepper::new(psi0, v, cfg)?;
    for _ in 0..cfg.steps {
        stepper.step();
    }
    stepper.current()
}

/// `ΣΣ W (p²/2m + V(q)) Δq Δp`.
pub fn phase_space_energy(dist: &PhaseSpaceDistribution, v: &PolynomialPotential) -> Complex64 {
    let q = dist.qgrid().points();
    let p = dist.pgrid().points();
    let m = dist.constants().mass;
    let vq: Vec<f64> = q.iter().map(|&x| v.eval(x)).collect();
    let kin: Vec<f64> = p.iter().map(|&x| x * x / (2.0 * m)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for ((j, k), w) in dist.values().indexed_iter() {
        acc += w * (kin[k] + vq[j]);
    }
    acc * dist.cell()
}

/// Phase-space centroid `(⟨q⟩, ⟨p⟩)` (real parts).
pub fn centroid(dist: &PhaseSpaceDistribution) -> (f64, f64) {
    let q = dist.qgrid().points();
    let p = dist.pgrid().points();
    let mut mq = 0.0;
    let mut mp = 0.0;
    for ((j, k), w) in dist.values().indexed_iter() {
        mq += w.re * q[j];
        mp += w.re * p[k];
    }
    (mq * dist.cell(), mp * dist.cell())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_basics() {
        let v = PolynomialPotential::new(vec![1.0, 0.0, 0.0, 0.0, 0.1, 0.0]).unwrap();
        assert_eq!(v.degree(), 4);
        assert!((v.eval(2.0) - 2.6).abs() < 1e-15);
        assert_eq!(v.derivative().coefficients(), &[0.0, 0.0, 0.0, 0.4]);
        assert_eq!(v.nth_derivative(3).coefficients(), &[0.0, 2.4000000000000004]);
        assert!(v.nth_derivative(5).is_zero());
        assert_eq!(v.exact_truncation(), 2);
        assert_eq!(PolynomialPotential::harmonic(1.0, 1.0).exact_truncation(), 1);
        assert_eq!(PolynomialPotential::zero().exact_truncation(), 0);
        assert!(PolynomialPotential::new(vec![1.0; 10]).is_err());
        assert!(PolynomialPotential::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn config_validation() {
        let c = PhysicalConstants::default();
        assert!(EvolutionConfig::new(0.0, 1, c).is_err());
        assert!(EvolutionConfig::new(1e-3, 0, c).is_err());
        let cfg = EvolutionConfig::new(1e-3, 10, c).unwrap();
        assert_eq!(cfg.effective_truncation(&PolynomialPotential::harmonic(1.0, 1.0)), 1);
        assert_eq!(cfg.with_truncation(0).truncation, Some(0));
    }

    #[test]
    fn real_path_matches_complex_path() {
        let g = PositionGrid::new(-6.0, 6.0, 32).unwrap();
        let c = PhysicalConstants::default();
        let v = PolynomialPotential::new(vec![0.0, 0.3, -0.2, 0.0, 0.1]).unwrap();
        let rhs = WignerRhs::new(&g, &c, &v, 1);
        let w = Array2::from_shape_fn((32, 32), |(j, k)| {
            let (q, p) = (g.point(j), 0.4 * (k as f64 - 16.0));
            (-(q - 0.5).powi(2) - p * p / 2.0).exp() * (1.0 + 0.2 * q * p)
        });
        let real = rhs.apply_real(&w);
        let complex = rhs.apply(&w.mapv(|x| Complex64::new(x, 0.0)));
        let scale = complex.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in real.iter().zip(complex.iter()) {
            assert!((a - b.re).abs() <= 1e-13 * scale);
            assert!(b.im.abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn step_guard() {
        let g = PositionGrid::dynamics_default();
        let c = PhysicalConstants::default();
        let quartic = PolynomialPotential::new(vec![0.0, 0.0, 0.0, 0.0, 0.1]).unwrap();
        let harmonic = PolynomialPotential::harmonic(1.0, 1.0);
        assert!(check_step(&g, &harmonic, &EvolutionConfig::new(1e-3, 1, c).unwrap()).is_ok());
        assert!(check_step(&g, &quartic, &EvolutionConfig::new(2.5e-4, 1, c).unwrap()).is_ok());
        // streaming and force overlap in the corners of the box
        assert!(matches!(
            check_step(&g, &quartic, &EvolutionConfig::new(1e-3, 1, c).unwrap()),
            Err(Error::StepTooLarge { what: "force", .. })
        ));
        assert!(matches!(
            check_step(
                &g,
                &PolynomialPotential::zero(),
                &EvolutionConfig::new(2e-3, 1, c).unwrap()
            ),
            Err(Error::StepTooLarge { what: "streaming", .. })
        ));
        let wide = PositionGrid::static_default();
        assert!(matches!(
            check_step(&wide, &quartic, &EvolutionConfig::new(1e-3, 1, c).unwrap()),
            Err(Error::StepTooLarge { what: "force", .. })
        ));
    }
}
