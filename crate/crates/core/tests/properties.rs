//! Randomized invariants across the public API.

mod common;

use common::{dense_update, disc, max_abs, random_state, REGIMES};
use num_complex::Complex64;
use ostrovsky_hdg::experiments::{ExperimentKind, Overrides, RunConfig};
use ostrovsky_hdg::hdg::{assemble, solve_linearized, tilde_tau, UTreatment};
use ostrovsky_hdg::linalg::Fft;
use ostrovsky_hdg::mesh_basis::{build_mesh, eval_field, l2_project, BasisSpec, FieldCoeffs, Mesh};
use ostrovsky_hdg::time_stepper::{discrete_energy, ThetaConfig};
use proptest::prelude::*;
use rand::SeedableRng;

fn kind() -> impl Strategy<Value = ExperimentKind> {
    prop_oneof![
        Just(ExperimentKind::Convergence),
        Just(ExperimentKind::Soliton),
        Just(ExperimentKind::PeakonLimit),
        Just(ExperimentKind::Custom),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tilde_tau_is_bounded(u in -50.0f64..50.0, uh in -50.0f64..50.0, right in any::<bool>(), alpha in 0.0f64..10.0) {
        let n = if right { 1.0 } else { -1.0 };
        let bound = 0.5 * alpha * u.abs().max(uh.abs());
        prop_assert!(tilde_tau(u, uh, n, alpha).abs() <= bound * (1.0 + 1e-14) + 1e-300);
    }

    #[test]
    fn fft_round_trip(exp in 0u32..10, seed in any::<u64>()) {
        let len = 1usize << exp;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let orig: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
            .collect();
        let plan = Fft::new(len).unwrap();
        let mut data = orig.clone();
        plan.forward_in_place(&mut data);
        plan.inverse_in_place(&mut data);
        let err = orig.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-13);
    }

    #[test]
    fn steps_land_on_final_time(theta in 0.5f64..=1.0, dt in 1e-4f64..0.5, t_final in 0.0f64..20.0) {
        let cfg = ThetaConfig::new(theta, dt, t_final).unwrap();
        let n = cfg.n_steps();
        prop_assert!((n as f64 * cfg.effective_dt() - t_final).abs() <= 1e-12 * t_final.max(1.0));
        prop_assert!(cfg.effective_dt() <= dt * (1.0 + 1e-9));
    }

    #[test]
    fn theta_outside_range_rejected(theta in prop_oneof![-1.0f64..0.4999, 1.0001f64..3.0]) {
        prop_assert!(ThetaConfig::new(theta, 0.01, 1.0).is_err());
    }

    #[test]
    fn projection_reproduces_polynomials(
        k in 1usize..=4,
        ne in 2usize..12,
        coeffs in prop::collection::vec(-2.0f64..2.0, 5),
        xi in -1.0f64..1.0,
    ) {
        let mesh = build_mesh(-1.0, 2.5, ne, false).unwrap();
        let basis = BasisSpec::new(k).unwrap();
        let poly = |x: f64| coeffs[..=k].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let proj = l2_project(poly, &mesh, &basis);
        for e in 0..ne {
            let x = mesh.map_to_physical(e, xi);
            prop_assert!((eval_field(&proj, e, xi).unwrap() - poly(x)).abs() <= 1e-11);
        }
    }

    #[test]
    fn energy_is_nonnegative(seed in any::<u64>(), ne in 2usize..10) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mesh: Mesh = build_mesh(0.0, 1.0, ne, true).unwrap();
        let mut u = FieldCoeffs::zeros(ne, 3);
        u.as_mut_slice().iter_mut().for_each(|c| *c = rand::Rng::gen_range(&mut rng, -5.0..5.0));
        let state = ostrovsky_hdg::hdg::FieldState::from_u(u);
        prop_assert!(discrete_energy(&state, &mesh) >= 0.0);
    }

    #[test]
    fn config_survives_json(kind in kind(), theta in 0.5f64..=1.0, dt in 1e-4f64..0.1, degree in 1usize..=3) {
        let ov = Overrides { theta: Some(theta), dt: Some(dt), degree: Some(degree), ..Overrides::default() };
        let cfg = RunConfig::default_for(kind, &ov).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(RunConfig::from_json_str(&text).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn condensed_matches_dense(regime in 0usize..REGIMES.len(), k in 1usize..=3, ne in 2usize..7, seed in any::<u64>()) {
        let d = disc(&REGIMES[regime], k, ne);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let (s, tr) = random_state(&d, &mut rng);
        let u_old = s.u.clone();
        let ut = UTreatment::Evolve { inv_dt: 20.0, u_old: &u_old };
        let (locals, trans) = assemble(&d, &s, &tr, 0.0, ut, false).unwrap();
        let (dx, dl) = solve_linearized(&locals, &trans, d.layout()).unwrap();
        let (dx_ref, dl_ref) = dense_update(&locals, &trans, d.layout());
        let scale = max_abs(dl_ref.iter().chain(dx_ref.iter().flatten()).copied());
        let diff = max_abs(
            dl.iter().zip(&dl_ref).chain(dx.iter().flatten().zip(dx_ref.iter().flatten())).map(|(a, b)| a - b),
        );
        prop_assert!(diff <= 1e-10 * scale, "relative difference {}", diff / scale);
    }
}
