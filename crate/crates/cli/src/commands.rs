//! Subcommand implementations.
//!
//! Every command resolves its settings as flag, then config file, then default; writes
//! its files into the output directory; and finishes with `<command>.manifest.json`
//! listing each file with its SHA-256. A failed check still writes the manifest before
//! the command reports failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use phasespace::dynamics::{
    evolve_schrodinger_oracle, phase_space_energy, EvolutionConfig, PolynomialPotential, WignerStepper,
};
use phasespace::grid::{DYNAMICS_GRID, STATIC_GRID};
use phasespace::observables::{builtin_symbol, expect_operator_oracle, expect_phase_space, BuiltinObservable};
use phasespace::states::{build_state, density_from_pure};
use phasespace::transforms::{
    momentum_density_oracle, momentum_marginal, normalization, position_density, position_marginal, sn_from_density,
    sn_to_wigner, wigner_from_wavefunction,
};
use phasespace::verify::{self, Check, Report, VerifyConfig};
use phasespace::{DistributionKind, OperatorKernel, PhaseSpaceDistribution, PhysicalConstants, StateSpec};
use serde::Serialize;

use crate::args::{Cli, Command, DistChoice, ObservableChoice};
use crate::csvio::{fmt_float, read_distribution, write_distribution, write_marginal};
use crate::error::{io_error, CliError};
use crate::lists::{Coefficients, GridTriple};
use crate::manifest::{sha256_hex, CheckRecord, ConfigFile, Constants, Evolution, OutputFile, RunManifest};

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("reality", verify::tol::REALITY),
    ("normalization", verify::tol::NORMALIZATION),
    ("marginal", verify::tol::MARGINAL),
    ("averaging", verify::tol::AVERAGING),
    ("averaging_imag", verify::tol::AVERAGING_IMAG),
    ("drift_per_time", verify::tol::DRIFT_PER_TIME),
    ("oracle", verify::tol::QUARTIC_ORACLE),
];

fn triple(g: (f64, f64, usize)) -> GridTriple {
    GridTriple {
        q_min: g.0,
        q_max: g.1,
        n: g.2,
    }
}

struct Session {
    config: ConfigFile,
    hbar: Option<f64>,
    mass: Option<f64>,
    grid: Option<GridTriple>,
    out: PathBuf,
    tolerances: BTreeMap<String, f64>,
    outputs: Vec<OutputFile>,
    report: Report,
    stdout: String,
}

impl Session {
    fn new(cli: &Cli, names: &[&str]) -> Result<Self, CliError> {
        let config = match &cli.global.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(cmd) = &config.command {
            if cmd != cli.command.name() {
                return Err(CliError::Config(format!(
                    "config is for {cmd:?} but the command is {:?}",
                    cli.command.name()
                )));
            }
        }
        let mut tolerances: BTreeMap<String, f64> = DEFAULT_TOLERANCES
            .iter()
            .filter(|(k, _)| names.contains(k))
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (k, v) in config.tolerances.iter().flatten() {
            if !tolerances.contains_key(k) {
                return Err(CliError::Config(format!(
                    "unknown tolerance {k:?} for {}",
                    cli.command.name()
                )));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance {k:?} must be a non-negative number"
                )));
            }
            tolerances.insert(k.clone(), *v);
        }
        Ok(Self {
            config,
            hbar: cli.global.hbar,
            mass: cli.global.mass,
            grid: cli.global.grid,
            out: cli.global.out.clone(),
            tolerances,
            outputs: Vec::new(),
            report: Report::default(),
            stdout: String::new(),
        })
    }

    fn constants(&self) -> Result<PhysicalConstants, CliError> {
        let base = self.config.constants.unwrap_or(Constants { hbar: 1.0, mass: 1.0 });
        Ok(PhysicalConstants::new(
            self.hbar.unwrap_or(base.hbar),
            self.mass.unwrap_or(base.mass),
        )?)
    }

    fn grid(&self, default: (f64, f64, usize)) -> GridTriple {
        self.grid.or(self.config.grid).unwrap_or(triple(default))
    }

    fn state_text(&self, flag: &Option<String>) -> Result<String, CliError> {
        flag.clone()
            .or_else(|| self.config.state_spec.clone())
            .ok_or_else(|| CliError::Usage("--state is required".into()))
    }

    fn state(&self, flag: &Option<String>, grid: GridTriple) -> Result<(String, phasespace::Wavefunction), CliError> {
        let text = self.state_text(flag)?;
        let spec = StateSpec::parse(&text, self.constants()?)?;
        let psi = build_state(&spec, &grid.to_grid()?)?;
        Ok((text, psi))
    }

    fn potential(&self, flag: &Option<Coefficients>, mass: f64) -> Result<PolynomialPotential, CliError> {
        match flag.as_ref().map(|c| &c.0).or(self.config.potential.as_ref()) {
            Some(c) => Ok(PolynomialPotential::new(c.clone())?),
            None => Ok(PolynomialPotential::harmonic(1.0, mass)),
        }
    }

    fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    fn check(&mut self, name: &str, residual: f64, tol_name: &str) {
        let tol = self.tol(tol_name);
        self.report.push(Check::at_most(name, residual, tol));
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out).map_err(io_error(&self.out))?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(io_error(&path))?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    fn finish(mut self, manifest: ManifestParts) -> Result<String, CliError> {
        let m = RunManifest {
            command: manifest.command.to_string(),
            state_spec: manifest.state_spec,
            grid: manifest.grid,
            constants: manifest.constants,
            potential: manifest.potential,
            evolution: manifest.evolution,
            tolerances: std::mem::take(&mut self.tolerances),
            outputs: std::mem::take(&mut self.outputs),
            checks: self.report.checks.iter().map(CheckRecord::from).collect(),
        };
        std::fs::create_dir_all(&self.out).map_err(io_error(&self.out))?;
        let path = self.out.join(format!("{}.manifest.json", manifest.command));
        std::fs::write(&path, m.to_json()).map_err(io_error(&path))?;
        if self.report.all_passed() {
            Ok(self.stdout)
        } else {
            let mut msg = String::new();
            for c in self.report.failures() {
                let _ = write!(
                    msg,
                    "{}{} residual {:.3e} exceeds {:.1e}",
                    if msg.is_empty() { "" } else { "; " },
                    c.name,
                    c.residual,
                    c.tolerance
                );
            }
            eprint!("{}", self.stdout);
            Err(CliError::Check(msg))
        }
    }
}

struct ManifestParts {
    command: &'static str,
    state_spec: Option<String>,
    grid: GridTriple,
    constants: Constants,
    potential: Vec<f64>,
    evolution: Option<Evolution>,
}

fn constants_record(c: &PhysicalConstants) -> Constants {
    Constants {
        hbar: c.hbar,
        mass: c.mass,
    }
}

fn grid_record(d: &PhaseSpaceDistribution) -> GridTriple {
    let g = d.qgrid();
    GridTriple {
        q_min: g.q_min(),
        q_max: g.q_max(),
        n: g.len(),
    }
}

fn unit_norm_residual(d: &PhaseSpaceDistribution) -> f64 {
    (normalization(d) - 1.0).norm()
}

/// Runs a parsed command and returns what it prints on stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Wigner { state } => distribution(cli, state, DistributionKind::Wigner),
        Command::Sn { state } => distribution(cli, state, DistributionKind::SobutiNasiri),
        Command::Convert { input } => convert(cli, input),
        Command::Marginals { state, dist } => marginals(cli, state, *dist),
        Command::Expect {
            state,
            observable,
            potential,
        } => expect(cli, state, *observable, potential),
        Command::Evolve {
            state,
            potential,
            dt,
            steps,
            truncation,
            oracle,
            snapshot_every,
            log_every,
        } => evolve(
            cli,
            &EvolveArgs {
                state,
                potential,
                dt: *dt,
                steps: *steps,
                truncation: *truncation,
                oracle: *oracle,
                snapshot_every: *snapshot_every,
                log_every: *log_every as usize,
            },
        ),
        Command::Verify { no_dynamics } => run_verify(cli, !no_dynamics),
    }
}

fn distribution(cli: &Cli, state: &Option<String>, kind: DistributionKind) -> Result<String, CliError> {
    let mut s = Session::new(cli, &["reality", "normalization"])?;
    let grid = s.grid(STATIC_GRID);
    let (spec, psi) = s.state(state, grid)?;
    let (command, file, dist) = match kind {
        DistributionKind::Wigner => ("wigner", "wigner.csv", wigner_from_wavefunction(&psi)?),
        DistributionKind::SobutiNasiri => ("sn", "sn.csv", sn_from_density(&density_from_pure(&psi))),
    };
    if kind == DistributionKind::Wigner {
        s.check("wigner reality", dist.relative_imag(), "reality");
    }
    s.check("normalization", unit_norm_residual(&dist), "normalization");
    s.write(file, &write_distribution(&dist))?;
    s.stdout = s.report.render();
    let c = constants_record(dist.constants());
    s.finish(ManifestParts {
        command,
        state_spec: Some(spec),
        grid,
        constants: c,
        potential: vec![],
        evolution: None,
    })
}

fn convert(cli: &Cli, input: &Path) -> Result<String, CliError> {
    let mut s = Session::new(cli, &["reality", "normalization"])?;
    let text =
        std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let psn = read_distribution(&text)?;
    let grid = grid_record(&psn);
    if let Some(g) = s.grid.or(s.config.grid) {
        if g != grid {
            return Err(CliError::Usage(format!(
                "--grid {g:?} conflicts with the input file grid {grid:?}"
            )));
        }
    }
    if s.hbar.is_some() || s.mass.is_some() || s.config.constants.is_some() {
        let c = s.constants()?;
        if &c != psn.constants() {
            return Err(CliError::Usage("constants conflict with the input file header".into()));
        }
    }
    let w = sn_to_wigner(&psn)?;
    s.check("wigner reality", w.relative_imag(), "reality");
    s.check("normalization", unit_norm_residual(&w), "normalization");
    s.write("wigner.csv", &write_distribution(&w))?;
    s.stdout = s.report.render();
    let c = constants_record(w.constants());
    s.finish(ManifestParts {
        command: "convert",
        state_spec: None,
        grid,
        constants: c,
        potential: vec![],
        evolution: None,
    })
}

fn marginals(cli: &Cli, state: &Option<String>, choice: DistChoice) -> Result<String, CliError> {
    let mut s = Session::new(cli, &["marginal"])?;
    let grid = s.grid(STATIC_GRID);
    let (spec, psi) = s.state(state, grid)?;
    let rho = density_from_pure(&psi);
    let dist = match choice {
        DistChoice::Wigner => wigner_from_wavefunction(&psi)?,
        DistChoice::Sn => sn_from_density(&rho),
    };
    let mq = position_marginal(&dist);
    let mp = momentum_marginal(&dist);
    s.check(
        "position marginal",
        mq.max_distance(&position_density(&rho)),
        "marginal",
    );
    s.check(
        "momentum marginal",
        mp.max_distance(&momentum_density_oracle(&rho)),
        "marginal",
    );
    s.write("marginal-position.csv", &write_marginal(&mq))?;
    s.write("marginal-momentum.csv", &write_marginal(&mp))?;
    s.stdout = s.report.render();
    let c = constants_record(dist.constants());
    s.finish(ManifestParts {
        command: "marginals",
        state_spec: Some(spec),
        grid,
        constants: c,
        potential: vec![],
        evolution: None,
    })
}

#[derive(Debug, Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
struct Expectation {
    observable: &'static str,
    state_spec: String,
    value: f64,
    phase_space: ComplexValue,
    trace_oracle: ComplexValue,
    residual: f64,
}

fn expect(
    cli: &Cli,
    state: &Option<String>,
    observable: ObservableChoice,
    potential: &Option<Coefficients>,
) -> Result<String, CliError> {
    let mut s = Session::new(cli, &["averaging", "averaging_imag"])?;
    let grid = s.grid(STATIC_GRID);
    let (spec, psi) = s.state(state, grid)?;
    let c = *psi.constants();
    let qgrid = *psi.grid();
    let (name, symbol_name, kernel, coefficients) = match observable {
        ObservableChoice::Q => (
            "q",
            BuiltinObservable::Position,
            OperatorKernel::position(qgrid),
            vec![],
        ),
        ObservableChoice::P => (
            "p",
            BuiltinObservable::Momentum,
            OperatorKernel::momentum(qgrid, &c),
            vec![],
        ),
        ObservableChoice::Q2 => {
            let sq = PolynomialPotential::new(vec![0.0, 0.0, 1.0])?;
            (
                "q2",
                BuiltinObservable::Potential(sq),
                OperatorKernel::function_of_position(qgrid, |q| q * q),
                vec![],
            )
        }
        ObservableChoice::H => {
            let v = s.potential(potential, c.mass)?;
            let kernel = OperatorKernel::hamiltonian(qgrid, &c, &v);
            let coefficients = v.coefficients().to_vec();
            ("H", BuiltinObservable::Hamiltonian(v), kernel, coefficients)
        }
    };
    let w = wigner_from_wavefunction(&psi)?;
    let ps = expect_phase_space(&w, &builtin_symbol(&symbol_name, qgrid, &c))?;
    let tr = expect_operator_oracle(&density_from_pure(&psi), &kernel)?;
    let residual = (ps - tr).norm();
    s.check("averaging", residual, "averaging");
    s.check("averaging imaginary part", ps.im.abs(), "averaging_imag");
    let record = Expectation {
        observable: name,
        state_spec: spec.clone(),
        value: ps.re,
        phase_space: ps.into(),
        trace_oracle: tr.into(),
        residual,
    };
    let mut json = serde_json::to_string_pretty(&record).expect("finite expectation values");
    json.push('\n');
    s.write("expect.json", &json)?;
    s.stdout = json;
    s.finish(ManifestParts {
        command: "expect",
        state_spec: Some(spec),
        grid,
        constants: constants_record(&c),
        potential: coefficients,
        evolution: None,
    })
}

struct EvolveArgs<'a> {
    state: &'a Option<String>,
    potential: &'a Option<Coefficients>,
    dt: Option<f64>,
    steps: Option<usize>,
    truncation: Option<usize>,
    oracle: bool,
    snapshot_every: usize,
    log_every: usize,
}

fn conserved_row(out: &mut String, step: usize, time: f64, d: &PhaseSpaceDistribution, v: &PolynomialPotential) {
    let n = normalization(d);
    let e = phase_space_energy(d, v);
    let _ = writeln!(
        out,
        "{step},{},{},{},{},{}",
        fmt_float(time),
        fmt_float(n.re),
        fmt_float(n.im),
        fmt_float(e.re),
        fmt_float(e.im)
    );
}

fn evolve(cli: &Cli, a: &EvolveArgs<'_>) -> Result<String, CliError> {
    let names: &[&str] = if a.oracle {
        &["drift_per_time", "oracle"]
    } else {
        &["drift_per_time"]
    };
    let mut s = Session::new(cli, names)?;
    let grid = s.grid(DYNAMICS_GRID);
    let (spec, psi) = s.state(a.state, grid)?;
    let c = *psi.constants();
    let v = s.potential(a.potential, c.mass)?;
    let from_config = s.config.evolution.clone();
    let dt =
        a.dt.or(from_config.as_ref().map(|e| e.dt))
            .ok_or_else(|| CliError::Usage("--dt is required".into()))?;
    let steps = a
        .steps
        .or(from_config.as_ref().map(|e| e.steps))
        .ok_or_else(|| CliError::Usage("--steps is required".into()))?;
    let truncation = a.truncation.or(from_config.as_ref().and_then(|e| e.truncation));
    let mut cfg = EvolutionConfig::new(dt, steps, c)?;
    cfg.truncation = truncation;

    let w0 = wigner_from_wavefunction(&psi)?;
    let n0 = normalization(&w0);
    let e0 = phase_space_energy(&w0, &v);
    let mut stepper = WignerStepper::new(&w0, &v, &cfg)?;
    let mut log = String::from("# columns=step,time,norm_re,norm_im,energy_re,energy_im\n");
    conserved_row(&mut log, 0, 0.0, &w0, &v);
    let mut snapshots = vec![(0usize, write_distribution(&w0))];
    let mut norm_drift = 0.0f64;
    let mut energy_drift = 0.0f64;
    for step in 1..=steps {
        stepper.step()?;
        let logged = step % a.log_every == 0 || step == steps;
        let snap = step == steps || (a.snapshot_every > 0 && step % a.snapshot_every == 0);
        if logged || snap {
            let cur = stepper.current();
            if logged {
                conserved_row(&mut log, step, stepper.time(), &cur, &v);
                norm_drift = norm_drift.max((normalization(&cur) - n0).norm() / n0.norm());
                energy_drift =
                    energy_drift.max((phase_space_energy(&cur, &v) - e0).norm() / e0.norm().max(f64::MIN_POSITIVE));
            }
            if snap {
                snapshots.push((step, write_distribution(&cur)));
            }
        }
    }
    stepper.check_momentum_edges()?;
    let duration = cfg.duration();
    s.check(
        "normalization drift per unit time",
        norm_drift / duration,
        "drift_per_time",
    );
    s.check("energy drift per unit time", energy_drift / duration, "drift_per_time");
    if a.oracle {
        let reference = wigner_from_wavefunction(&evolve_schrodinger_oracle(&psi, &v, &cfg)?)?;
        s.check(
            "split-step oracle distance",
            stepper.current().max_distance(&reference),
            "oracle",
        );
    }
    for (step, text) in &snapshots {
        s.write(&format!("snapshot-{step:06}.csv"), text)?;
    }
    s.write("conserved.csv", &log)?;
    s.stdout = s.report.render();
    s.finish(ManifestParts {
        command: "evolve",
        state_spec: Some(spec),
        grid,
        constants: constants_record(&c),
        potential: v.coefficients().to_vec(),
        evolution: Some(Evolution { dt, steps, truncation }),
    })
}

fn run_verify(cli: &Cli, dynamics: bool) -> Result<String, CliError> {
    let mut s = Session::new(cli, &[])?;
    let mut cfg = VerifyConfig {
        constants: s.constants()?,
        dynamics,
        ..VerifyConfig::default()
    };
    let grid = s.grid(STATIC_GRID);
    cfg.static_grid = grid.to_grid()?;
    let report = verify::run(&cfg)?;
    s.tolerances = report.checks.iter().map(|c| (c.name.clone(), c.tolerance)).collect();
    s.report = report;
    s.stdout = s.report.render();
    let text = s.stdout.clone();
    s.write("verify.txt", &text)?;
    let c = constants_record(&cfg.constants);
    s.finish(ManifestParts {
        command: "verify",
        state_spec: None,
        grid,
        constants: c,
        potential: vec![],
        evolution: None,
    })
}
