use num_complex::Complex64;
use proptest::prelude::*;
use qutrit_esd::channels::ChannelKind;
use qutrit_esd::esd::negativity_on_axis;
use qutrit_esd::evolution::{evolve_state, ChannelScenario, Mode, NoiseSetting};
use qutrit_esd::linalg::{hermitian_eigenvalues, partial_transpose_b, ComplexMatrix};
use qutrit_esd::negativity::negativity_numeric;
use qutrit_esd::states::{initial_state, DensityMatrix, StateParams};
use qutrit_esd::sweep::{rows_from_csv, rows_to_csv, SweepRow};

fn kind() -> impl Strategy<Value = ChannelKind> {
    prop::sample::select(ChannelKind::ALL.to_vec())
}

fn entangled() -> impl Strategy<Value = StateParams> {
    (0.0f64..1.0 / 6.0, 0.0f64..=1.0)
        .prop_map(|(b, t)| StateParams::new(b, 3.0 * b + (1.0 - 6.0 * b) * t + 1e-15).unwrap())
}

fn random_state() -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36).prop_map(|v| {
        let g = ComplexMatrix::from_row_major(
            6,
            v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect(),
        )
        .unwrap();
        let w = g.matmul(&g.dagger()).unwrap();
        let tr = w.trace().re;
        DensityMatrix::new(w.scale_real(1.0 / tr).hermitian_part()).unwrap()
    })
}

proptest! {
    #[test]
    fn channels_preserve_trace_and_positivity(
        rho in random_state(),
        kind in kind(),
        ga in 0.0f64..=1.0,
        gb in 0.0f64..=1.0,
    ) {
        let s = ChannelScenario::multi_local(kind, ga, gb).unwrap();
        let out = evolve_state(&s, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eigenvalues(out.matrix(), 1e-10).unwrap().min() > -1e-12);
    }

    #[test]
    fn initial_state_is_affine(
        b1 in 0.0f64..0.25, c1 in 0.0f64..0.25,
        b2 in 0.0f64..0.25, c2 in 0.0f64..0.25,
        t in 0.0f64..=1.0,
    ) {
        let p1 = StateParams::new(b1, c1).unwrap();
        let p2 = StateParams::new(b2, c2).unwrap();
        let mix = StateParams::new(t * b1 + (1.0 - t) * b2, t * c1 + (1.0 - t) * c2).unwrap();
        let combo = &initial_state(&p1).matrix().scale_real(t) + &initial_state(&p2).matrix().scale_real(1.0 - t);
        prop_assert!(initial_state(&mix).matrix().max_abs_diff(&combo).unwrap() < 1e-14);
    }

    #[test]
    fn negativity_never_increases_along_gamma(
        p in entangled(),
        kind in kind(),
        mode in prop::sample::select(Mode::ALL.to_vec()),
        g1 in 0.0f64..=1.0,
        g2 in 0.0f64..=1.0,
    ) {
        let setting = NoiseSetting::new(kind, mode);
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let n_lo = negativity_on_axis(setting, &p, lo).unwrap();
        let n_hi = negativity_on_axis(setting, &p, hi).unwrap();
        prop_assert!(n_hi <= n_lo + 1e-12, "{} at {}: {} -> {}", setting, p, n_lo, n_hi);
    }

    #[test]
    fn ppt_states_have_zero_negativity(rho in random_state(), kind in kind(), g in 0.0f64..=1.0) {
        let out = evolve_state(&ChannelScenario::multi_local(kind, g, g).unwrap(), &rho).unwrap();
        let min = hermitian_eigenvalues(&partial_transpose_b(out.matrix()).unwrap(), 1e-10).unwrap().min();
        let n = negativity_numeric(&out);
        if min >= -1e-12 {
            prop_assert_eq!(n.value, 0.0);
        } else {
            prop_assert!(n.value > 0.0);
        }
        prop_assert!(n.route_disagreement() < 1e-10);
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec(
        (0.0f64..=1.0, 0.0f64..1.0, prop::option::of(0.0f64..1.0), 0.0f64..2.0),
        0..40,
    )) {
        let rows: Vec<SweepRow> = rows
            .into_iter()
            .map(|(gamma, negativity, negativity_analytic, coherence)| SweepRow {
                gamma,
                negativity,
                negativity_analytic,
                coherence,
            })
            .collect();
        let text = rows_to_csv(&rows).unwrap();
        prop_assert_eq!(rows_from_csv(&text).unwrap(), rows);
    }
}

#[test]
fn entangled_predicate_matches_ppt_on_a_grid() {
    for i in 0..100 {
        for j in 0..100 {
            let (b, c) = (i as f64 / 396.0, j as f64 / 99.0);
            let Ok(p) = StateParams::new(b, c) else {
                continue;
            };
            if (c - 3.0 * b).abs() < 1e-12 {
                continue;
            }
            let n = negativity_numeric(&initial_state(&p)).value;
            assert_eq!(p.is_entangled(), n > 1e-12, "b={b} c={c} N={n}");
        }
    }
}

#[test]
fn semigroup_holds_except_qutrit_bit_phase_flip() {
    use qutrit_esd::channels::{KrausChannel, NoiseStrength, Side};
    let rho = initial_state(&StateParams::new(0.05, 0.6).unwrap());
    let (rate, t1, t2) = (0.7, 0.4, 0.9);
    for kind in ChannelKind::ALL {
        for side in [Side::Qubit, Side::Qutrit] {
            let ch = |t: f64| {
                KrausChannel::new(kind, side, NoiseStrength::from_rate(rate, t).unwrap()).unwrap()
            };
            let direct = ch(t1 + t2).apply_to(rho.matrix());
            let stepped = ch(t2).apply_to(&ch(t1).apply_to(rho.matrix()));
            let err = direct.max_abs_diff(&stepped).unwrap();
            if kind == ChannelKind::BitPhaseFlip && side == Side::Qutrit {
                assert!(err > 1e-3, "expected a composition defect, got {err:e}");
            } else {
                assert!(err < 1e-13, "{kind} on {side}: {err:e}");
            }
        }
    }
}
