#![allow(clippy::type_complexity)]

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use phasespace::dynamics::PolynomialPotential;
use phasespace::observables::{
    builtin_symbol, density_kernel, expect_operator_oracle, expect_phase_space, kernel_from_symbol,
    weyl_symbol_of_kernel, BuiltinObservable, OperatorKernel, WeylSymbol,
};
use phasespace::states::{build_state, density_from_pure, density_mixture};
use phasespace::transforms::{sn_from_density, wigner_from_density, wigner_from_wavefunction};
use phasespace::verify::{averaging_observables, factory_states};
use phasespace::*;
use std::f64::consts::PI;

fn unit() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn grid() -> PositionGrid {
    PositionGrid::static_default()
}

fn level(n: usize) -> Wavefunction {
    build_state(&StateSpec::ho(n, 1.0, unit()).unwrap(), &grid()).unwrap()
}

fn hamiltonian() -> OperatorKernel {
    OperatorKernel::hamiltonian(grid(), &unit(), &PolynomialPotential::harmonic(1.0, 1.0))
}

#[test]
fn averaging_equivalence_over_factory_states() {
    let c = unit();
    let observables = averaging_observables(grid(), &c);
    for (label, psi) in factory_states(&grid(), c).unwrap() {
        let rho = density_from_pure(&psi);
        let w = wigner_from_density(&rho);
        let sn = sn_from_density(&rho);
        for (name, kernel) in &observables {
            let symbol = weyl_symbol_of_kernel(kernel, &c);
            let truth = expect_operator_oracle(&rho, kernel).unwrap();
            let via_w = expect_phase_space(&w, &symbol).unwrap();
            let via_sn = expect_phase_space(&sn, &symbol).unwrap();
            assert!(
                (via_w - truth).norm() <= 1e-6,
                "{label} {name} wigner {via_w} vs {truth}"
            );
            assert!(
                (via_sn.re - truth.re).abs() <= 1e-6,
                "{label} {name} sn {via_sn} vs {truth}"
            );
            assert!(via_sn.im.abs() <= 1e-8, "{label} {name} sn imag {}", via_sn.im);
        }
    }
}

#[test]
fn averaging_holds_for_mixtures() {
    let c = unit();
    let levels: Vec<_> = (0..3).map(level).collect();
    let rho = density_mixture(&[0.5, 0.3, 0.2], &levels).unwrap();
    let h = hamiltonian();
    let e = expect_phase_space(&wigner_from_density(&rho), &weyl_symbol_of_kernel(&h, &c)).unwrap();
    assert_abs_diff_eq!(e.re, 0.5 * 0.5 + 0.3 * 1.5 + 0.2 * 2.5, epsilon = 1e-8);
}

#[test]
fn oscillator_energies() {
    let c = unit();
    let symbol = builtin_symbol(
        &BuiltinObservable::Hamiltonian(PolynomialPotential::harmonic(1.0, 1.0)),
        grid(),
        &c,
    );
    for n in 0..=4 {
        let w = wigner_from_wavefunction(&level(n)).unwrap();
        let e = expect_phase_space(&w, &symbol).unwrap();
        assert_abs_diff_eq!(e.re, n as f64 + 0.5, epsilon = 1e-6);
        assert!(e.im.abs() <= 1e-12);
    }
}

#[test]
fn oscillator_energies_scale_with_frequency() {
    let c = PhysicalConstants::new(0.7, 1.3).unwrap();
    let omega = 1.6;
    let psi = build_state(&StateSpec::ho(2, omega, c).unwrap(), &grid()).unwrap();
    let rho = density_from_pure(&psi);
    let h = OperatorKernel::hamiltonian(grid(), &c, &PolynomialPotential::harmonic(omega, c.mass));
    let truth = expect_operator_oracle(&rho, &h).unwrap();
    assert_abs_diff_eq!(truth.re, 0.7 * omega * 2.5, epsilon = 1e-8);
    let e = expect_phase_space(&wigner_from_density(&rho), &weyl_symbol_of_kernel(&h, &c)).unwrap();
    assert_abs_diff_eq!(e.re, truth.re, epsilon = 1e-8);
}

#[test]
fn trace_oracle_examples() {
    let h = hamiltonian();
    let e0 = expect_operator_oracle(&density_from_pure(&level(0)), &h).unwrap();
    let e2 = expect_operator_oracle(&density_from_pure(&level(2)), &h).unwrap();
    assert_abs_diff_eq!(e0.re, 0.5, epsilon = 1e-8);
    assert_abs_diff_eq!(e2.re, 2.5, epsilon = 1e-8);
    assert!(e0.im.abs() <= 1e-12 && e2.im.abs() <= 1e-12);
    let one = expect_operator_oracle(&density_from_pure(&level(3)), &OperatorKernel::identity(grid())).unwrap();
    assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-12);
}

#[test]
fn identity_symbol_gives_normalization() {
    let c = unit();
    let rho = density_from_pure(&level(1));
    let one = weyl_symbol_of_kernel(&OperatorKernel::identity(grid()), &c);
    let sn = sn_from_density(&rho);
    let total = expect_phase_space(&sn, &one).unwrap();
    assert_abs_diff_eq!(total.re, 1.0, epsilon = 1e-12);
    assert!(total.im.abs() <= 1e-12);
}

#[test]
fn density_symbol_is_scaled_wigner() {
    let c = unit();
    let rho = density_from_pure(&level(0));
    let symbol = weyl_symbol_of_kernel(&density_kernel(&rho), &c);
    let w = wigner_from_density(&rho);
    let scale = 2.0 * PI * c.hbar;
    let worst = symbol
        .values
        .iter()
        .zip(w.values().iter())
        .map(|(a, b)| (a - b * scale).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

/// `Σ_y K(q - y/2, q + y/2) e^{ipy/ħ} Δy` for a Gaussian kernel given in closed form,
/// summed directly over the doubled lattice of displacements.
fn direct_symbol(kernel: impl Fn(f64, f64) -> f64, q: f64, p: f64, dy: f64) -> Complex64 {
    (-4000..=4000)
        .map(|m| {
            let y = m as f64 * dy;
            Complex64::from_polar(kernel(q - y / 2.0, q + y / 2.0) * dy, p * y)
        })
        .sum()
}

#[test]
fn smooth_kernel_symbol_matches_quadrature() {
    let c = unit();
    let g = grid();
    // a positive smooth non-diagonal kernel, far below the grid edges
    let k = |x: f64, y: f64| (-(x * x + y * y) / 2.0 - (x - y).powi(2) / 4.0).exp() * (1.0 + 0.3 * (x + y));
    let matrix = ndarray::Array2::from_shape_fn((g.len(), g.len()), |(i, j)| {
        Complex64::new(k(g.point(i), g.point(j)), 0.0)
    });
    let symbol = weyl_symbol_of_kernel(&OperatorKernel::new(g, matrix).unwrap(), &c);
    for (j, kk) in [(128, 128), (140, 131), (115, 120)] {
        let direct = direct_symbol(k, g.point(j), symbol.pgrid.point(kk), 0.01);
        let got = symbol.values[[j, kk]];
        assert!((got - direct).norm() <= 1e-8, "({j}, {kk}): {got} vs {direct}");
    }
}

#[test]
fn position_symbol_matches_quadrature() {
    let c = unit();
    let g = grid();
    let symbol = weyl_symbol_of_kernel(&OperatorKernel::position(g), &c);
    for (j, k) in [(128, 128), (40, 200), (230, 7)] {
        assert_abs_diff_eq!(symbol.values[[j, k]].re, g.point(j), epsilon = 1e-8);
        assert!(symbol.values[[j, k]].im.abs() <= 1e-8);
    }
}

#[test]
fn hermitian_kernels_have_real_symbols() {
    let c = unit();
    for (_, kernel) in averaging_observables(grid(), &c) {
        let s = weyl_symbol_of_kernel(&kernel, &c);
        let peak = s.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(s.max_abs_imag() <= 1e-9 * peak);
    }
}

#[test]
fn symbol_round_trip_for_separable_quadratics() {
    let c = unit();
    let g = grid();
    let cases: Vec<(&str, Box<dyn Fn(f64, f64) -> f64>)> = vec![
        ("1", Box::new(|_, _| 1.0)),
        ("q", Box::new(|q, _| q)),
        ("p", Box::new(|_, p| p)),
        ("q2", Box::new(|q, _| q * q)),
        ("p2", Box::new(|_, p| p * p)),
        (
            "1+q-2p+q2/2+p2/3",
            Box::new(|q, p| 1.0 + q - 2.0 * p + q * q / 2.0 + p * p / 3.0),
        ),
    ];
    for (name, f) in cases {
        let symbol = WeylSymbol::from_fn(g, &c, f);
        let back = weyl_symbol_of_kernel(&kernel_from_symbol(&symbol), &c);
        let peak = symbol.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = back.max_distance(&symbol);
        assert!(err <= 1e-8 * peak.max(1.0), "{name}: {err}");
    }
}

#[test]
fn mixed_symbol_averages_symmetrized_product() {
    let c = unit();
    let g = grid();
    let q = OperatorKernel::position(g);
    let p = OperatorKernel::momentum(g, &c);
    let sym = q.compose(&p).add(&p.compose(&q)).scale(Complex64::new(0.5, 0.0));
    let psi = build_state(&StateSpec::gaussian(1.0, 0.5, 0.8, c).unwrap(), &g).unwrap();
    let rho = density_from_pure(&psi);
    let truth = expect_operator_oracle(&rho, &sym).unwrap();
    assert_abs_diff_eq!(truth.re, 0.5, epsilon = 1e-8);
    let qp = WeylSymbol::from_fn(g, &c, |q, p| q * p);
    let e = expect_phase_space(&wigner_from_density(&rho), &qp).unwrap();
    assert_abs_diff_eq!(e.re, truth.re, epsilon = 1e-8);
    assert!(e.im.abs() <= 1e-12);
}

#[test]
fn grid_mismatch() {
    let c = unit();
    let rho = density_from_pure(&level(0));
    let other = PositionGrid::new(-12.0, 12.0, 128).unwrap();
    let symbol = builtin_symbol(&BuiltinObservable::Position, other, &c);
    assert!(matches!(
        expect_phase_space(&wigner_from_density(&rho), &symbol),
        Err(Error::GridMismatch(_))
    ));
    assert!(matches!(
        expect_operator_oracle(&rho, &OperatorKernel::identity(other)),
        Err(Error::GridMismatch(_))
    ));
}
