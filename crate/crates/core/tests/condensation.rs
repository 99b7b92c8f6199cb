//! Condensed trace solve plus local recovery against a dense monolithic solve
//! of the same linearized system.

mod common;

use common::{dense_update, disc, max_abs, random_state, with_adaptive, REGIMES};
use ostrovsky_hdg::hdg::{assemble, condense, recover_local, solve_linearized, Discretization, UTreatment};
use ostrovsky_hdg::mesh_basis::FieldCoeffs;
use rand::{Rng, SeedableRng};

fn mismatch(d: &Discretization, rng: &mut impl Rng, steady: bool) -> f64 {
    let (state, traces) = random_state(d, rng);
    let mut u_old = FieldCoeffs::zeros(d.n_elements(), d.n_modes());
    for c in u_old.as_mut_slice() {
        *c = rng.gen_range(-1.0..1.0);
    }
    let ut = if steady {
        UTreatment::Steady
    } else {
        UTreatment::Evolve { inv_dt: 50.0, u_old: &u_old }
    };
    let (locals, trans) = assemble(d, &state, &traces, 0.3, ut, false).unwrap();
    let (dx, dl) = solve_linearized(&locals, &trans, d.layout()).unwrap();
    let (dx_ref, dl_ref) = dense_update(&locals, &trans, d.layout());
    let scale = max_abs(dl_ref.iter().copied().chain(dx_ref.iter().flatten().copied())).max(1e-300);
    let diff = max_abs(
        dl.iter()
            .zip(&dl_ref)
            .map(|(a, b)| a - b)
            .chain(dx.iter().flatten().zip(dx_ref.iter().flatten()).map(|(a, b)| a - b)),
    );
    diff / scale
}

#[test]
fn condensed_equals_dense_all_regimes() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for r in &REGIMES {
        for k in 1..=3 {
            for ne in [2, 4, 8] {
                let base = disc(r, k, ne);
                for d in [base.clone(), with_adaptive(base)] {
                    let m = mismatch(&d, &mut rng, false);
                    assert!(m <= 1e-10, "{} k={k} ne={ne} {:?}: {m:e}", r.name, d.stab.tau_f);
                    if !r.bc.is_periodic() {
                        let m = mismatch(&d, &mut rng, true);
                        assert!(m <= 1e-10, "{} steady k={k} ne={ne}: {m:e}", r.name);
                    }
                }
            }
        }
    }
}

#[test]
fn mismatched_inputs_are_usage_errors() {
    let d = disc(&REGIMES[0], 1, 4);
    let (s, tr) = d.zero_state();
    let (locals, trans) = assemble(&d, &s, &tr, 0.0, UTreatment::Steady, false).unwrap();
    assert!(condense(&locals[1..], &trans, d.layout()).is_err());
    let blocks = condense(&locals, &trans, d.layout()).unwrap();
    assert!(recover_local(&[0.0; 2], &blocks).is_err());
}
