use proptest::prelude::*;

use liouskin::liouvillian::build_effective_liouvillian;
use liouskin::observables::{density_profile, imbalance, steady_state_of, Weighting};
use liouskin::scenario::{DeltaRule, MRule, ScenarioConfig, ScenarioKind};
use liouskin::spectra::{dense_spectrum, multiset_distance, SteadyOptions};
use liouskin::{build_sector, Boundary, ModelParams};

fn chain() -> impl Strategy<Value = ModelParams> {
    (
        2usize..=7,
        0usize..=7,
        -1.5f64..1.5,
        0.0f64..1.5,
        0.05f64..1.5,
        prop::bool::ANY,
    )
        .prop_map(|(l, m, phi, dl, dr, open)| {
            let m = m.min(l);
            if open {
                ModelParams::open(l, m, phi)
            } else {
                ModelParams::generalized(l, m, phi, dl, dr)
            }
        })
}

fn steady_profile(p: &ModelParams) -> Vec<f64> {
    let (basis, st) = steady_state_of(p, &SteadyOptions::default()).unwrap();
    density_profile(&st.probabilities, &basis, Weighting::Probability).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Reflecting the chain flips φ and swaps the boundary couplings.
    #[test]
    fn inversion_reverses_the_steady_profile(p in chain()) {
        prop_assume!(p.m >= 1 && p.m < p.l);
        let a = steady_profile(&p);
        let mut b = steady_profile(&p.inverted());
        b.reverse();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn inversion_preserves_the_spectrum(p in chain()) {
        let basis = build_sector(p.l, p.m).unwrap();
        let a = dense_spectrum(&build_effective_liouvillian(&p, &basis).unwrap(), false).unwrap().eigenvalues;
        let b = dense_spectrum(&build_effective_liouvillian(&p.inverted(), &basis).unwrap(), false).unwrap().eigenvalues;
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&a, &b) < 1e-8 * scale);
    }

    #[test]
    fn steady_profile_sums_to_the_particle_number(p in chain()) {
        prop_assume!(p.m >= 1);
        let prof = steady_profile(&p);
        prop_assert!((prof.iter().sum::<f64>() - p.m as f64).abs() < 1e-9);
        prop_assert!(prof.iter().all(|&n| (-1e-12..=1.0 + 1e-12).contains(&n)));
    }

    #[test]
    fn imbalance_is_odd_under_reversal(prof in prop::collection::vec(0.0f64..1.0, 2..24)) {
        prop_assume!(prof.iter().sum::<f64>() > 1e-6);
        let mut rev = prof.clone();
        rev.reverse();
        let (a, b) = (imbalance(&prof).unwrap(), imbalance(&rev).unwrap());
        prop_assert!((a + b).abs() < 1e-12);
        prop_assert!(a.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn configs_survive_a_toml_round_trip(
        kind in prop::sample::select(ScenarioKind::ALL.to_vec()),
        ls in prop::collection::btree_set(1usize..=7, 1..4),
        phis in prop::collection::vec(-2.0f64..2.0, 1..4),
        frac in 1usize..=2,
        c in 0.0f64..2.0,
        tol in 1e-14f64..1e-6,
    ) {
        let mut cfg = ScenarioConfig::defaults(kind);
        cfg.grid.l = ls.into_iter().map(|h| 2 * h).collect();
        cfg.grid.phi = phis;
        cfg.grid.m = vec![MRule::Fraction(frac), MRule::Fixed(1)];
        cfg.grid.delta_l = vec![DeltaRule::Left(c), DeltaRule::Value(c)];
        cfg.solver.steady_tolerance = tol;
        if kind.takes_bc() {
            cfg.grid.bc = vec![Boundary::Open, Boundary::Generalized];
        }
        prop_assume!(cfg.validate().is_ok());
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string());
        prop_assert!(back.is_ok(), "{:?}", back.err());
        let back = back.unwrap();
        prop_assert_eq!(back, cfg);
    }
}
