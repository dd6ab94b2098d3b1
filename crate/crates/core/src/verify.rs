//! The invariant suite behind `phasespace verify`.
//!
//! Every check is deterministic: fixed grids, a fixed mixture seed, and summation orders
//! that do not depend on scheduling. Rendering the same report twice yields identical
//! bytes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    centroid, evolve_schrodinger_oracle, phase_space_energy, EvolutionConfig, PolynomialPotential, WignerStepper,
};
use crate::error::Result;
use crate::grid::{PhysicalConstants, PositionGrid};
use crate::observables::{expect_operator_oracle, expect_phase_space, weyl_symbol_of_kernel, OperatorKernel};
use crate::state::{DensityMatrix, Wavefunction};
use crate::states::{build_state, density_from_pure, density_mixture, StateSpec};
use crate::transforms::{
    momentum_density_oracle, momentum_marginal, normalization, position_density, position_marginal, sn_from_density,
    sn_pure_factorized, sn_to_wigner, wigner_from_density, wigner_from_wavefunction,
};
use crate::PhaseSpaceDistribution;

/// Seed for the random mixtures of oscillator levels.
pub const MIXTURE_SEED: u64 = 0x5eed_0007;

/// Step used for the quartic runs.
pub const QUARTIC_DT: f64 = 2.5e-4;

/// Text forms of the factory states exercised by the suite.
pub const FACTORY_STATES: &[&str] = &[
    "ho:n=0,omega=1",
    "ho:n=1,omega=1",
    "ho:n=2,omega=1",
    "ho:n=3,omega=1",
    "ho:n=4,omega=1",
    "gauss:q0=1,p0=0.5,sigma=1",
    "gauss:q0=-1.5,p0=1,sigma=0.7",
    "cat:q0=2,p0=0,sigma=0.5",
    "cat:q0=1,p0=1.5,sigma=0.8",
];

pub mod tol {
    pub const REALITY: f64 = 1e-9;
    pub const NORMALIZATION: f64 = 1e-7;
    pub const NORMALIZATION_IMAG: f64 = 1e-9;
    pub const MARGINAL: f64 = 1e-6;
    pub const PATH_EQUIVALENCE: f64 = 1e-8;
    pub const SN_CLOSED_FORM: f64 = 1e-9;
    pub const SN_MIN_IMAG: f64 = 0.01;
    pub const AVERAGING: f64 = 1e-6;
    pub const AVERAGING_IMAG: f64 = 1e-8;
    pub const ENERGY_LEVEL: f64 = 1e-6;
    pub const NEGATIVITY: f64 = 1e-6;
    pub const STATIONARITY: f64 = 1e-6;
    pub const ROTATION: f64 = 1e-4;
    pub const QUARTIC_ORACLE: f64 = 1e-3;
    pub const HARMONIC_ORACLE: f64 = 1e-4;
    pub const DRIFT_PER_TIME: f64 = 1e-6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub bound: Bound,
    pub tolerance: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            bound: Bound::AtMost,
            tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            bound: Bound::AtLeast,
            tolerance,
        }
    }

    pub fn status(&self) -> Status {
        let ok = match self.bound {
            Bound::AtMost => self.residual <= self.tolerance,
            Bound::AtLeast => self.residual >= self.tolerance,
        };
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status() == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status() == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status() {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let _ = writeln!(
                out,
                "{status} {:<40} {:.6e} {op} {:.1e}",
                c.name, c.residual, c.tolerance
            );
        }
        let passed = self.checks.iter().filter(|c| c.status() == Status::Pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub static_grid: PositionGrid,
    pub dynamics_grid: PositionGrid,
    pub constants: PhysicalConstants,
    pub seed: u64,
    pub reality_mixtures: usize,
    pub path_mixtures: usize,
    pub dynamics: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            static_grid: PositionGrid::static_default(),
            dynamics_grid: PositionGrid::dynamics_default(),
            constants: PhysicalConstants::default(),
            seed: MIXTURE_SEED,
            reality_mixtures: 5,
            path_mixtures: 10,
            dynamics: true,
        }
    }
}

/// Random convex mixtures of oscillator levels `0..=4`.
pub fn random_mixtures(levels: &[Wavefunction], count: usize, seed: u64) -> Result<Vec<DensityMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let raw: Vec<f64> = levels.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            density_mixture(&weights, levels)
        })
        .collect()
}

pub fn factory_states(grid: &PositionGrid, constants: PhysicalConstants) -> Result<Vec<(String, Wavefunction)>> {
    FACTORY_STATES
        .iter()
        .map(|s| Ok((s.to_string(), build_state(&StateSpec::parse(s, constants)?, grid)?)))
        .collect()
}

/// The four observables of the averaging checks: `q̂`, `p̂`, `q̂²`, and the oscillator
/// Hamiltonian.
pub fn averaging_observables(grid: PositionGrid, constants: &PhysicalConstants) -> Vec<(&'static str, OperatorKernel)> {
    vec![
        ("q", OperatorKernel::position(grid)),
        ("p", OperatorKernel::momentum(grid, constants)),
        ("q2", OperatorKernel::function_of_position(grid, |q| q * q)),
        (
            "H",
            OperatorKernel::hamiltonian(grid, constants, &PolynomialPotential::harmonic(1.0, constants.mass)),
        ),
    ]
}

fn norm_residual(dist: &PhaseSpaceDistribution) -> (f64, f64) {
    let n = normalization(dist);
    ((n.re - 1.0).abs(), n.im.abs())
}

struct Worst(f64);

impl Worst {
    fn new() -> Self {
        Worst(0.0)
    }

    fn add(&mut self, v: f64) {
        // NaN must not hide behind max
        self.0 = if v.is_nan() || self.0.is_nan() {
            f64::NAN
        } else {
            self.0.max(v)
        };
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<Report> {
    let mut report = Report::default();
    static_checks(cfg, &mut report)?;
    if cfg.dynamics {
        dynamics_checks(cfg, &mut report)?;
    }
    Ok(report)
}

fn static_checks(cfg: &VerifyConfig, report: &mut Report) -> Result<()> {
    let grid = cfg.static_grid;
    let c = cfg.constants;
    let states = factory_states(&grid, c)?;
    let levels: Vec<Wavefunction> = (0..=4)
        .map(|n| build_state(&StateSpec::ho(n, 1.0, c)?, &grid))
        .collect::<Result<_>>()?;
    let reality_mixes = random_mixtures(&levels, cfg.reality_mixtures, cfg.seed)?;
    let path_mixes = random_mixtures(&levels, cfg.path_mixtures, cfg.seed.wrapping_add(1))?;

    let mut reality = Worst::new();
    let mut norm_w = Worst::new();
    let mut norm_sn = Worst::new();
    let mut norm_imag = Worst::new();
    let mut marg_w = Worst::new();
    let mut marg_sn = Worst::new();
    let mut marg_pos = Worst::new();
    let mut pure_routes = Worst::new();
    let mut sn_closed = Worst::new();
    let mut avg_w = Worst::new();
    let mut avg_sn = Worst::new();
    let mut avg_imag = Worst::new();
    let observables = averaging_observables(grid, &c);
    let symbols: Vec<_> = observables.iter().map(|(_, k)| weyl_symbol_of_kernel(k, &c)).collect();

    let mut densities: Vec<DensityMatrix> = Vec::new();
    for (_, psi) in &states {
        let rho = density_from_pure(psi);
        let w_pure = wigner_from_wavefunction(psi)?;
        let w = wigner_from_density(&rho);
        pure_routes.add(w_pure.max_distance(&w));
        let sn = sn_from_density(&rho);
        let closed = sn_pure_factorized(psi);
        sn_closed.add(
            sn.values()
                .iter()
                .zip(closed.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        );

        let oracle = momentum_density_oracle(&rho);
        let density = position_density(&rho);
        marg_w.add(momentum_marginal(&w).max_distance(&oracle));
        marg_sn.add(momentum_marginal(&sn).max_distance(&oracle));
        marg_pos.add(position_marginal(&w).max_distance(&density));
        marg_pos.add(position_marginal(&sn).max_distance(&density));

        for ((_, kernel), symbol) in observables.iter().zip(&symbols) {
            let truth = expect_operator_oracle(&rho, kernel)?;
            let via_w = expect_phase_space(&w, symbol)?;
            let via_sn = expect_phase_space(&sn, symbol)?;
            avg_w.add((via_w - truth).norm());
            avg_sn.add((via_sn.re - truth.re).abs());
            avg_imag.add(via_sn.im.abs());
        }
        densities.push(rho);
    }
    densities.extend(reality_mixes);

    for rho in &densities {
        let w = wigner_from_density(rho);
        let sn = sn_from_density(rho);
        reality.add(w.relative_imag());
        let (rw, iw) = norm_residual(&w);
        let (rs, is) = norm_residual(&sn);
        norm_w.add(rw);
        norm_sn.add(rs);
        norm_imag.add(iw.max(is));
    }

    let mut path = Worst::new();
    for rho in &path_mixes {
        let direct = wigner_from_density(rho);
        path.add(sn_to_wigner(&sn_from_density(rho))?.max_distance(&direct));
    }

    // ground-state SN is genuinely complex
    let ground_sn = sn_from_density(&density_from_pure(&levels[0]));

    // oscillator energies from the Wigner function
    let h_symbol = &symbols[3];
    let mut energies = Worst::new();
    for (n, psi) in levels.iter().enumerate() {
        let w = wigner_from_wavefunction(psi)?;
        let e = expect_phase_space(&w, h_symbol)?;
        energies.add((e - Complex64::new(c.hbar * (n as f64 + 0.5), 0.0)).norm());
    }

    let w1 = wigner_from_wavefunction(&levels[1])?;
    let at_origin = w1.value_near(0.0, 0.0).map(|z| z.re).unwrap_or(f64::NAN);

    // ħ = 2 repeat of the ground-state checks
    let h2 = PhysicalConstants::new(2.0 * c.hbar, c.mass)?;
    let psi_h2 = build_state(&StateSpec::ho(0, 1.0, h2)?, &grid)?;
    let rho_h2 = density_from_pure(&psi_h2);
    let w_h2 = wigner_from_density(&rho_h2);
    let hbar_residual = w_h2
        .relative_imag()
        .max(norm_residual(&w_h2).0)
        .max(momentum_marginal(&w_h2).max_distance(&momentum_density_oracle(&rho_h2)));

    report.push(Check::at_most("reality.wigner", reality.0, tol::REALITY));
    report.push(Check::at_most("normalization.wigner", norm_w.0, tol::NORMALIZATION));
    report.push(Check::at_most("normalization.sn", norm_sn.0, tol::NORMALIZATION));
    report.push(Check::at_most(
        "normalization.imag",
        norm_imag.0,
        tol::NORMALIZATION_IMAG,
    ));
    report.push(Check::at_most("marginal.momentum.wigner", marg_w.0, tol::MARGINAL));
    report.push(Check::at_most("marginal.momentum.sn", marg_sn.0, tol::MARGINAL));
    report.push(Check::at_most("marginal.position", marg_pos.0, tol::MARGINAL));
    report.push(Check::at_most("wigner.pure_vs_density", pure_routes.0, 1e-10));
    report.push(Check::at_most(
        "path_equivalence.sn_to_wigner",
        path.0,
        tol::PATH_EQUIVALENCE,
    ));
    report.push(Check::at_most("sn.closed_form", sn_closed.0, tol::SN_CLOSED_FORM));
    report.push(Check::at_least(
        "sn.ground_max_imag",
        ground_sn.max_abs_imag(),
        tol::SN_MIN_IMAG,
    ));
    report.push(Check::at_most("averaging.wigner", avg_w.0, tol::AVERAGING));
    report.push(Check::at_most("averaging.sn", avg_sn.0, tol::AVERAGING));
    report.push(Check::at_most("averaging.sn_imag", avg_imag.0, tol::AVERAGING_IMAG));
    report.push(Check::at_most("energy.ho_levels", energies.0, tol::ENERGY_LEVEL));
    report.push(Check::at_most(
        "negativity.ho1_origin",
        (at_origin + 1.0 / (PI * c.hbar)).abs(),
        tol::NEGATIVITY,
    ));
    report.push(Check::at_most("hbar2.ground_state", hbar_residual, tol::MARGINAL));
    Ok(())
}

/// Outcome of one Wigner-equation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: PhaseSpaceDistribution,
    pub last: PhaseSpaceDistribution,
    /// Largest `|N(t) - N(0)| / |N(0)|` seen along the run.
    pub norm_drift: f64,
    /// Largest `|E(t) - E(0)| / |E(0)|` seen along the run.
    pub energy_drift: f64,
    pub duration: f64,
}

impl Trajectory {
    pub fn norm_drift_rate(&self) -> f64 {
        self.norm_drift / self.duration
    }

    pub fn energy_drift_rate(&self) -> f64 {
        self.energy_drift / self.duration
    }
}

/// Runs the Wigner equation, sampling the conserved quantities every `sample_every` steps.
pub fn run_trajectory(
    psi0: &Wavefunction,
    v: &PolynomialPotential,
    cfg: &EvolutionConfig,
    sample_every: usize,
) -> Result<Trajectory> {
    let initial = wigner_from_wavefunction(psi0)?;
    let n0 = normalization(&initial);
    let e0 = phase_space_energy(&initial, v);
    let mut stepper = WignerStepper::new(&initial, v, cfg)?;
    let mut norm_drift = 0.0f64;
    let mut energy_drift = 0.0f64;
    for s in 1..=cfg.steps {
        stepper.step()?;
        if s % sample_every == 0 || s == cfg.steps {
            let cur = stepper.current();
            norm_drift = norm_drift.max((normalization(&cur) - n0).norm() / n0.norm());
            energy_drift = energy_drift.max((phase_space_energy(&cur, v) - e0).norm() / e0.norm());
        }
    }
    Ok(Trajectory {
        initial,
        last: stepper.current(),
        norm_drift,
        energy_drift,
        duration: cfg.duration(),
    })
}

/// The quartic comparison: L∞ distance at `t = steps·dt` between the evolved Wigner
/// function and the Wigner function of the split-step reference state.
pub fn quartic_oracle_distance(
    psi0: &Wavefunction,
    v: &PolynomialPotential,
    cfg: &EvolutionConfig,
) -> Result<(f64, Trajectory)> {
    let traj = run_trajectory(psi0, v, cfg, 10)?;
    let reference = wigner_from_wavefunction(&evolve_schrodinger_oracle(psi0, v, cfg)?)?;
    Ok((traj.last.max_distance(&reference), traj))
}

fn dynamics_checks(cfg: &VerifyConfig, report: &mut Report) -> Result<()> {
    let grid = cfg.dynamics_grid;
    let c = cfg.constants;
    let harmonic = PolynomialPotential::harmonic(1.0, c.mass);
    let quartic = PolynomialPotential::new(vec![0.0, 0.0, 0.0, 0.0, 0.1])?;

    // (a) stationarity of the ground state over t = 1
    let ground = build_state(&StateSpec::gaussian(0.0, 0.0, 1.0, c)?, &grid)?;
    let run_a = run_trajectory(&ground, &harmonic, &EvolutionConfig::new(1e-3, 1000, c)?, 10)?;
    report.push(Check::at_most(
        "dynamics.ground_stationary",
        run_a.last.max_distance(&run_a.initial),
        tol::STATIONARITY,
    ));

    // (b) coherent packet rotates to (0, -1) at t = π/2
    let coherent = build_state(&StateSpec::gaussian(1.0, 0.0, 1.0, c)?, &grid)?;
    let steps_b = 1571;
    let cfg_b = EvolutionConfig::new(0.5 * PI / steps_b as f64, steps_b, c)?;
    let run_b = run_trajectory(&coherent, &harmonic, &cfg_b, 10)?;
    let (mq, mp) = centroid(&run_b.last);
    report.push(Check::at_most("dynamics.coherent_q", mq.abs(), tol::ROTATION));
    report.push(Check::at_most("dynamics.coherent_p", (mp + 1.0).abs(), tol::ROTATION));

    // harmonic oracle agreement at t = 0.5
    let cfg_h = EvolutionConfig::new(1e-3, 500, c)?;
    let (d_harm, _) = quartic_oracle_distance(&coherent, &harmonic, &cfg_h)?;
    report.push(Check::at_most("dynamics.harmonic_oracle", d_harm, tol::HARMONIC_ORACLE));

    // (c) quartic potential, truncation N = 1 versus N = 0; dt = 1e-3 is outside the
    // RK4 stability region on this grid
    let cfg_c = EvolutionConfig::new(QUARTIC_DT, (0.5 / QUARTIC_DT).round() as usize, c)?;
    let (d1, run_c) = quartic_oracle_distance(&coherent, &quartic, &cfg_c.clone().with_truncation(1))?;
    let (d0, _) = quartic_oracle_distance(&coherent, &quartic, &cfg_c.with_truncation(0))?;
    report.push(Check::at_most("dynamics.quartic_oracle_n1", d1, tol::QUARTIC_ORACLE));
    report.push(Check::at_least(
        "dynamics.quartic_truncation_gain",
        d0 - d1,
        f64::MIN_POSITIVE,
    ));

    let mut norm_rate = Worst::new();
    let mut energy_rate = Worst::new();
    for t in [&run_a, &run_b, &run_c] {
        norm_rate.add(t.norm_drift_rate());
        energy_rate.add(t.energy_drift_rate());
    }
    report.push(Check::at_most(
        "conservation.normalization",
        norm_rate.0,
        tol::DRIFT_PER_TIME,
    ));
    report.push(Check::at_most(
        "conservation.energy",
        energy_rate.0,
        tol::DRIFT_PER_TIME,
    ));
    Ok(())
}
