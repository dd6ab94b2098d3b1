use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use phasespace::{DistributionKind, PhaseSpaceDistribution, PhysicalConstants, PositionGrid};
use phasespace_cli::csvio::{read_distribution, write_distribution};
use phasespace_cli::lists::{parse_coefficients, parse_grid, GridTriple};
use phasespace_cli::manifest::{CheckRecord, CheckStatus, ConfigFile, Constants, Evolution, OutputFile, RunManifest};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn manifests() -> impl Strategy<Value = RunManifest> {
    (
        "[a-z]{1,8}",
        proptest::option::of("[ -~]{0,24}"),
        (finite(), finite(), 0usize..1 << 20),
        (finite(), finite()),
        proptest::collection::vec(finite(), 0..6),
        proptest::option::of((finite(), any::<usize>(), proptest::option::of(any::<usize>()))),
        proptest::collection::btree_map("[a-z_.]{1,12}", finite(), 0..5),
        proptest::collection::vec(("[a-z0-9-]{1,12}\\.csv", "[0-9a-f]{64}"), 0..4),
        proptest::collection::vec(("[a-z. ]{1,16}", any::<bool>(), proptest::option::of(finite())), 0..5),
    )
        .prop_map(
            |(command, state_spec, g, c, potential, evolution, tolerances, outputs, checks)| RunManifest {
                command,
                state_spec,
                grid: GridTriple {
                    q_min: g.0,
                    q_max: g.1,
                    n: g.2,
                },
                constants: Constants { hbar: c.0, mass: c.1 },
                potential,
                evolution: evolution.map(|(dt, steps, truncation)| Evolution { dt, steps, truncation }),
                tolerances: tolerances.into_iter().collect::<BTreeMap<_, _>>(),
                outputs: outputs
                    .into_iter()
                    .map(|(path, sha256)| OutputFile { path, sha256 })
                    .collect(),
                checks: checks
                    .into_iter()
                    .map(|(name, pass, residual)| CheckRecord {
                        name,
                        status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
                        residual,
                    })
                    .collect(),
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn manifest_round_trips(m in manifests()) {
        let text = m.to_json();
        let back = RunManifest::from_json(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json(), text.clone());
        prop_assert!(ConfigFile::parse(&text).is_ok());
    }

    #[test]
    fn distribution_csv_round_trips(
        q_min in -50.0..0.0f64,
        width in 0.5..100.0f64,
        log_n in 3u32..6,
        hbar in 0.01..10.0f64,
        mass in 0.01..10.0f64,
        sn in any::<bool>(),
        seed in proptest::collection::vec(finite(), 2),
    ) {
        let n = 1usize << log_n;
        let grid = PositionGrid::new(q_min, q_min + width, n).unwrap();
        let c = PhysicalConstants::new(hbar, mass).unwrap();
        let values = Array2::from_shape_fn((n, n), |(j, k)| {
            Complex64::new(seed[0] * (j as f64 + 0.1).sin(), seed[1] / (k as f64 + 1.0))
        });
        let kind = if sn { DistributionKind::SobutiNasiri } else { DistributionKind::Wigner };
        let d = PhaseSpaceDistribution::new(kind, grid, c, values).unwrap();
        let text = write_distribution(&d);
        let back = read_distribution(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(write_distribution(&back), text);
    }

    #[test]
    fn grid_lists_round_trip(q_min in finite(), q_max in finite(), n in any::<usize>()) {
        let text = format!("{q_min:e},{q_max:e},{n}");
        prop_assert_eq!(parse_grid(&text).unwrap(), GridTriple { q_min, q_max, n });
    }

    #[test]
    fn coefficient_lists_round_trip(c in proptest::collection::vec(finite(), 1..9)) {
        let text = c.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_coefficients(&text).unwrap().0, c);
    }

    #[test]
    fn reader_never_panics(text in "[#a-z=0-9.,e\\-\n ]{0,300}") {
        let _ = read_distribution(&text);
    }
}
