//! Analytic test states: harmonic-oscillator eigenstates, Gaussian packets and even cat
//! states, plus the density matrices built from them.
//!
//! Text form (used on the command line):
//!
//! ```text
//! ho:n=2,omega=1
//! gauss:q0=1,p0=0,sigma=1
//! cat:q0=2,p0=0,sigma=0.5
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{PhysicalConstants, PositionGrid};
use crate::state::{DensityMatrix, Wavefunction};

/// Upper bound on the oscillator level; the recurrence costs `O(level)` per sample.
/// Whether a level actually fits a grid is decided by the boundary check.
pub const MAX_HO_LEVEL: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateVariant {
    HoEigenstate { level: usize, omega: f64 },
    GaussianPacket { q0: f64, p0: f64, sigma: f64 },
    CatState { q0: f64, p0: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub variant: StateVariant,
    pub constants: PhysicalConstants,
}

impl StateSpec {
    pub fn new(variant: StateVariant, constants: PhysicalConstants) -> Result<Self> {
        variant.validate()?;
        Ok(Self { variant, constants })
    }

    pub fn ho(level: usize, omega: f64, constants: PhysicalConstants) -> Result<Self> {
        Self::new(StateVariant::HoEigenstate { level, omega }, constants)
    }

    pub fn gaussian(q0: f64, p0: f64, sigma: f64, constants: PhysicalConstants) -> Result<Self> {
        Self::new(StateVariant::GaussianPacket { q0, p0, sigma }, constants)
    }

    pub fn cat(q0: f64, p0: f64, sigma: f64, constants: PhysicalConstants) -> Result<Self> {
        Self::new(StateVariant::CatState { q0, p0, sigma }, constants)
    }

    pub fn parse(text: &str, constants: PhysicalConstants) -> Result<Self> {
        Self::new(text.parse()?, constants)
    }
}

impl StateVariant {
    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be finite")))
            }
        };
        match *self {
            StateVariant::HoEigenstate { level, omega } => {
                if level > MAX_HO_LEVEL {
                    return Err(Error::InvalidSpec(format!(
                        "level {level} above the supported maximum {MAX_HO_LEVEL}"
                    )));
                }
                if !(omega.is_finite() && omega > 0.0) {
                    return Err(Error::InvalidSpec("omega must be positive".into()));
                }
            }
            StateVariant::GaussianPacket { q0, p0, sigma } | StateVariant::CatState { q0, p0, sigma } => {
                finite("q0", q0)?;
                finite("p0", p0)?;
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidSpec("sigma must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for StateVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("missing ':' in {s:?}")))?;

        let mut fields: Vec<(&str, &str)> = Vec::new();
        if !rest.trim().is_empty() {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {item:?}")))?;
                let k = k.trim();
                if fields.iter().any(|(seen, _)| *seen == k) {
                    return Err(Error::InvalidSpec(format!("duplicate key {k:?}")));
                }
                fields.push((k, v.trim()));
            }
        }

        let allowed: &[&str] = match tag.trim() {
            "ho" => &["n", "omega"],
            "gauss" | "cat" => &["q0", "p0", "sigma"],
            other => return Err(Error::InvalidSpec(format!("unknown state kind {other:?}"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::InvalidSpec(format!("unknown key {k:?} for {tag}")));
        }
        let real = |key: &str, default: Option<f64>| -> Result<f64> {
            match fields.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => v
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("{key}={v:?} is not a number"))),
                None => default.ok_or_else(|| Error::InvalidSpec(format!("missing key {key:?}"))),
            }
        };

        let variant = match tag.trim() {
            "ho" => {
                let raw = fields
                    .iter()
                    .find(|(k, _)| *k == "n")
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::InvalidSpec("missing key \"n\"".into()))?;
                let level = raw
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSpec(format!("n={raw:?} is not a level")))?;
                StateVariant::HoEigenstate {
                    level,
                    omega: real("omega", Some(1.0))?,
                }
            }
            "gauss" => StateVariant::GaussianPacket {
                q0: real("q0", Some(0.0))?,
                p0: real("p0", Some(0.0))?,
                sigma: real("sigma", Some(1.0))?,
            },
            _ => StateVariant::CatState {
                q0: real("q0", None)?,
                p0: real("p0", Some(0.0))?,
                sigma: real("sigma", Some(1.0))?,
            },
        };
        variant.validate()?;
        Ok(variant)
    }
}

impl fmt::Display for StateVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateVariant::HoEigenstate { level, omega } => write!(f, "ho:n={level},omega={omega}"),
            StateVariant::GaussianPacket { q0, p0, sigma } => {
                write!(f, "gauss:q0={q0},p0={p0},sigma={sigma}")
            }
            StateVariant::CatState { q0, p0, sigma } => write!(f, "cat:q0={q0},p0={p0},sigma={sigma}"),
        }
    }
}

/// Normalized Hermite function `h_n(x)` by the three-term recurrence
/// `h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}`.
pub fn hermite_function(level: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..level {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn packet(q: f64, q0: f64, p0: f64, sigma: f64, hbar: f64) -> Complex64 {
    let amp = (PI * sigma * sigma).powf(-0.25) * (-(q - q0).powi(2) / (2.0 * sigma * sigma)).exp();
    Complex64::from_polar(amp, p0 * q / hbar)
}

/// Samples the state on the grid, normalizes it, and checks that it fits the grid.
pub fn build_state(spec: &StateSpec, grid: &PositionGrid) -> Result<Wavefunction> {
    spec.variant.validate()?;
    let c = spec.constants;
    let samples: Vec<Complex64> = grid
        .points()
        .into_iter()
        .map(|q| match spec.variant {
            StateVariant::HoEigenstate { level, omega } => {
                let alpha = c.mass * omega / c.hbar;
                Complex64::new(alpha.powf(0.25) * hermite_function(level, alpha.sqrt() * q), 0.0)
            }
            StateVariant::GaussianPacket { q0, p0, sigma } => packet(q, q0, p0, sigma, c.hbar),
            StateVariant::CatState { q0, p0, sigma } => {
                packet(q, q0, p0, sigma, c.hbar) + packet(q, -q0, -p0, sigma, c.hbar)
            }
        })
        .collect();
    let psi = Wavefunction::normalized(*grid, samples, c)?;
    psi.check_boundary()?;
    Ok(psi)
}

/// `ρ_ij = ψ_i conj(ψ_j)`.
pub fn density_from_pure(psi: &Wavefunction) -> DensityMatrix {
    let s = psi.samples();
    let n = s.len();
    let elements = Array2::from_shape_fn((n, n), |(i, j)| s[i] * s[j].conj());
    DensityMatrix::new(*psi.grid(), elements, *psi.constants())
        .expect("outer product of a normalized state is a valid density")
}

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

pub fn density_mixture(weights: &[f64], states: &[Wavefunction]) -> Result<DensityMatrix> {
    if weights.is_empty() || weights.len() != states.len() {
        return Err(Error::WeightMismatch(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::WeightMismatch(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightMismatch(format!("weights sum to {total}")));
    }
    let grid = *states[0].grid();
    let constants = *states[0].constants();
    if states.iter().any(|s| *s.grid() != grid || *s.constants() != constants) {
        return Err(Error::GridMismatch("mixture states live on different grids".into()));
    }
    let n = grid.len();
    let mut elements = Array2::<Complex64>::zeros((n, n));
    for (w, psi) in weights.iter().zip(states) {
        let s = psi.samples();
        for ((i, j), e) in elements.indexed_iter_mut() {
            *e += *w * s[i] * s[j].conj();
        }
    }
    DensityMatrix::new(grid, elements, constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    fn grid() -> PositionGrid {
        PositionGrid::static_default()
    }

    #[test]
    fn ground_state_value_at_origin() {
        let psi = build_state(&StateSpec::ho(0, 1.0, unit()).unwrap(), &grid()).unwrap();
        let j = grid().nearest_index(0.0).unwrap();
        assert_abs_diff_eq!(psi.samples()[j].re, PI.powf(-0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(PI.powf(-0.25), 0.751126, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_matches_ground_state() {
        let a = build_state(&StateSpec::ho(0, 1.0, unit()).unwrap(), &grid()).unwrap();
        let b = build_state(&StateSpec::gaussian(0.0, 0.0, 1.0, unit()).unwrap(), &grid()).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn first_level_is_odd() {
        let psi = build_state(&StateSpec::ho(1, 1.0, unit()).unwrap(), &grid()).unwrap();
        let j = grid().nearest_index(0.0).unwrap();
        assert_eq!(psi.samples()[j].re, 0.0);
    }

    #[test]
    fn parity_of_levels() {
        let g = grid();
        let n = g.len();
        let mid = g.nearest_index(0.0).unwrap();
        for level in 0..=6 {
            let psi = build_state(&StateSpec::ho(level, 1.0, unit()).unwrap(), &g).unwrap();
            let s = psi.samples();
            let sign = if level % 2 == 0 { 1.0 } else { -1.0 };
            for d in 1..n / 2 {
                assert!((s[mid + d] - sign * s[mid - d]).norm() <= 1e-12, "level {level}");
            }
        }
    }

    #[test]
    fn oscillator_levels_are_orthonormal() {
        let g = grid();
        let states: Vec<Wavefunction> = (0..=6)
            .map(|l| build_state(&StateSpec::ho(l, 1.0, unit()).unwrap(), &g).unwrap())
            .collect();
        for (m, a) in states.iter().enumerate() {
            for (n, b) in states.iter().enumerate() {
                let overlap = a.inner(b).norm();
                if m == n {
                    assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
                } else {
                    assert!(overlap <= 1e-9, "<{m}|{n}> = {overlap}");
                }
            }
        }
    }

    #[test]
    fn hermite_recurrence_survives_high_levels() {
        let v = hermite_function(60, 3.0);
        assert!(v.is_finite());
        // normalization by quadrature on a wide fine grid
        let dx = 0.01;
        let norm: f64 = (-2500..2500)
            .map(|i| hermite_function(40, i as f64 * dx).powi(2) * dx)
            .sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn boundary_leak_is_reported() {
        let narrow = PositionGrid::new(-3.0, 3.0, 64).unwrap();
        let err = build_state(&StateSpec::ho(4, 1.0, unit()).unwrap(), &narrow).unwrap_err();
        assert!(matches!(err, Error::BoundaryLeak { .. }));
    }

    #[test]
    fn cat_state_is_normalized_even_with_overlap() {
        let psi = build_state(&StateSpec::cat(0.3, 0.0, 1.0, unit()).unwrap(), &grid()).unwrap();
        assert_abs_diff_eq!(psi.norm_squared(), 1.0, epsilon = 1e-13);
        let s = psi.samples();
        let mid = grid().nearest_index(0.0).unwrap();
        assert!((s[mid + 5] - s[mid - 5]).norm() < 1e-14);
    }

    #[test]
    fn pure_density_examples() {
        let psi = build_state(&StateSpec::ho(0, 1.0, unit()).unwrap(), &grid()).unwrap();
        let rho = density_from_pure(&psi);
        let j = grid().nearest_index(0.0).unwrap();
        assert_abs_diff_eq!(rho.elements()[[j, j]].re, 1.0 / PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(1.0 / PI.sqrt(), 0.564190, epsilon = 1e-6);
        assert!(rho.hermiticity_residual() <= 1e-15);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-10);
        let ev = rho.eigenvalues();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-10);
        assert!(ev[1] <= 1e-9);
    }

    #[test]
    fn mixture_examples() {
        let g = grid();
        let s0 = build_state(&StateSpec::ho(0, 1.0, unit()).unwrap(), &g).unwrap();
        let s1 = build_state(&StateSpec::ho(1, 1.0, unit()).unwrap(), &g).unwrap();

        let single = density_mixture(&[1.0], std::slice::from_ref(&s0)).unwrap();
        assert_eq!(single, density_from_pure(&s0));

        let mix = density_mixture(&[0.5, 0.5], &[s0.clone(), s1.clone()]).unwrap();
        assert_abs_diff_eq!(mix.trace().re, 1.0, epsilon = 1e-12);
        let ev = mix.eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(ev[1], 0.5, epsilon = 1e-10);
        assert!(ev[2].abs() <= 1e-10);
        mix.check_positive(1e-9).unwrap();

        assert!(matches!(
            density_mixture(&[0.3, 0.8], &[s0.clone(), s1.clone()]),
            Err(Error::WeightMismatch(_))
        ));
        assert!(matches!(
            density_mixture(&[1.0], &[s0.clone(), s1]),
            Err(Error::WeightMismatch(_))
        ));
        let other = build_state(
            &StateSpec::ho(0, 1.0, unit()).unwrap(),
            &PositionGrid::new(-10.0, 10.0, 256).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            density_mixture(&[0.5, 0.5], &[s0, other]),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn parse_text_forms() {
        let v: StateVariant = "ho:n=2,omega=1".parse().unwrap();
        assert_eq!(v, StateVariant::HoEigenstate { level: 2, omega: 1.0 });
        let v: StateVariant = "gauss:q0=1,p0=0,sigma=1".parse().unwrap();
        assert_eq!(
            v,
            StateVariant::GaussianPacket {
                q0: 1.0,
                p0: 0.0,
                sigma: 1.0
            }
        );
        let v: StateVariant = "cat:q0=2,p0=0,sigma=0.5".parse().unwrap();
        assert_eq!(
            v,
            StateVariant::CatState {
                q0: 2.0,
                p0: 0.0,
                sigma: 0.5
            }
        );
        assert_eq!(v.to_string().parse::<StateVariant>().unwrap(), v);

        for bad in [
            "",
            "ho",
            "ho:",
            "ho:n=-1",
            "ho:n=1,n=2",
            "ho:n=1,omega=0",
            "gauss:sigma=0",
            "gauss:x=1",
            "cat:p0=1",
            "wave:n=1",
            "ho:n=5000",
            "gauss:q0=nan",
            "gauss:q0",
        ] {
            assert!(bad.parse::<StateVariant>().is_err(), "{bad:?} should be rejected");
        }
    }
}
