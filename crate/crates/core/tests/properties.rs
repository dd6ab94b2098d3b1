use num_complex::Complex64;
use phasespace::dynamics::PolynomialPotential;
use phasespace::states::{build_state, density_from_pure};
use phasespace::transforms::{
    momentum_density_oracle, momentum_marginal, normalization, position_marginal, sn_from_density, sn_to_wigner,
    wigner_from_density, wigner_from_wavefunction,
};
use phasespace::*;
use proptest::prelude::*;

fn grid() -> PositionGrid {
    PositionGrid::new(-12.0, 12.0, 128).unwrap()
}

fn packet() -> impl Strategy<Value = (f64, f64, f64)> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.6..1.4f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn momentum_transform_is_unitary((q0, p0, s) in packet()) {
        let c = PhysicalConstants::default();
        let psi = build_state(&StateSpec::gaussian(q0, p0, s, c).unwrap(), &grid()).unwrap();
        let phi = psi.to_momentum_representation();
        let dp = psi.momentum_grid().spacing();
        let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dp;
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        let back = Wavefunction::from_momentum_representation(*psi.grid(), &phi, c).unwrap();
        let err = back.samples().iter().zip(psi.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn packet_distributions_are_consistent((q0, p0, s) in packet()) {
        let c = PhysicalConstants::default();
        let psi = build_state(&StateSpec::gaussian(q0, p0, s, c).unwrap(), &grid()).unwrap();
        let rho = density_from_pure(&psi);
        let w = wigner_from_wavefunction(&psi).unwrap();
        let sn = sn_from_density(&rho);
        prop_assert!(w.relative_imag() <= 1e-9);
        prop_assert!((normalization(&w) - Complex64::new(1.0, 0.0)).norm() <= 1e-7);
        prop_assert!((normalization(&sn) - Complex64::new(1.0, 0.0)).norm() <= 1e-7);
        let oracle = momentum_density_oracle(&rho);
        prop_assert!(momentum_marginal(&w).max_distance(&oracle) <= 1e-6);
        prop_assert!(momentum_marginal(&sn).max_distance(&oracle) <= 1e-6);
        prop_assert!(position_marginal(&sn).max_distance_to(&psi.density()) <= 1e-6);
        prop_assert!(sn_to_wigner(&sn).unwrap().max_distance(&wigner_from_density(&rho)) <= 1e-8);
    }

    #[test]
    fn wigner_is_bounded_by_inverse_pi_hbar(
        q0 in 1.0..2.0f64,
        p0 in -2.0..2.0f64,
        s in 0.5..0.9f64,
        hbar in 0.5..2.0f64,
    ) {
        // lobe tails must stay clear of the half-period displacement
        let c = PhysicalConstants::new(hbar, 1.0).unwrap();
        let psi = build_state(&StateSpec::cat(q0, p0, s, c).unwrap(), &grid()).unwrap();
        let w = wigner_from_wavefunction(&psi).unwrap();
        prop_assert!(w.max_abs() <= 1.0 / (std::f64::consts::PI * hbar) + 1e-9);
    }

    #[test]
    fn spec_text_round_trips(level in 0usize..40, omega in 0.1..5.0f64, (q0, p0, s) in packet()) {
        let c = PhysicalConstants::default();
        for spec in [StateSpec::ho(level, omega, c).unwrap(), StateSpec::gaussian(q0, p0, s, c).unwrap()] {
            let text = spec.variant.to_string();
            prop_assert_eq!(StateSpec::parse(&text, c).unwrap(), spec);
        }
    }

    #[test]
    fn spec_parser_never_panics(text in "\\PC{0,40}") {
        let _ = StateSpec::parse(&text, PhysicalConstants::default());
    }

    #[test]
    fn potential_derivative_matches_difference(coeffs in proptest::collection::vec(-2.0..2.0f64, 1..6), x in -2.0..2.0f64) {
        let v = PolynomialPotential::new(coeffs).unwrap();
        let h = 1e-5;
        let fd = (v.eval(x + h) - v.eval(x - h)) / (2.0 * h);
        prop_assert!((v.derivative().eval(x) - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn nearest_index_is_nearest(x in -12.0..12.0f64) {
        let g = grid();
        let j = g.nearest_index(x).unwrap();
        prop_assert!((g.point(j) - x).abs() <= 0.5 * g.spacing() + 1e-12);
    }
}
