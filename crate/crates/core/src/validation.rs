//! Cross-validation of the Kraus numerics against every closed form, with a
//! section listing where the literature formulas disagree with the numerics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{ChannelKind, KrausChannel, NoiseStrength, Side};
use crate::esd::{
    canonical_params, esd_report, reproduce_table1, DEFAULT_BISECTION_TOL, THRESHOLD_AGREEMENT_TOL,
};
use crate::evolution::{
    analytic_evolved, coherence_l1, evolve, evolve_state, ChannelScenario, EvolutionError, Mode,
    NoiseSetting, Transcription, EVOLVED_MISPRINTS,
};
use crate::negativity::{negativity_analytic, negativity_numeric};
use crate::states::{initial_negativity, initial_state, DensityMatrix, StateParams};

pub const ORACLE_TOL: f64 = 1e-12;
pub const NEGATIVITY_TOL: f64 = 1e-10;

const SEED: u64 = 0x5eed_0fe5;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn bounded(name: &str, max_error: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed: max_error <= tolerance,
            max_error,
            tolerance,
            detail: detail.into(),
        }
    }
}

/// A literature formula or claim that the numerics contradict.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub source: String,
    pub printed: String,
    pub measured: String,
    /// Worst printed-vs-numeric deviation on the sample grid.
    pub max_deviation: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub discrepancies: Vec<Discrepancy>,
}

/// 20 entangled (b, c) points spread over the regime.
pub fn parameter_grid() -> Vec<StateParams> {
    let mut out = Vec::new();
    for i in 0..5 {
        let b = i as f64 / 30.0;
        for j in 0..4 {
            let lo = 3.0 * b;
            let hi = 1.0 - 3.0 * b;
            let c = lo + (hi - lo) * (j as f64 + 1.0) / 4.0;
            out.push(StateParams::new(b, c).expect("grid stays inside the regime"));
        }
    }
    out
}

/// 32 γ values on [0, 1].
pub fn gamma_grid() -> Vec<f64> {
    (0..32).map(|k| k as f64 / 31.0).collect()
}

/// (γ_A, γ_B) pairs: the diagonal plus the anti-diagonal of the γ grid.
pub fn gamma_pairs() -> Vec<(f64, f64)> {
    let g = gamma_grid();
    let n = g.len();
    (0..n)
        .flat_map(|i| [(g[i], g[i]), (g[i], g[n - 1 - i])])
        .collect()
}

fn oracle_error(kind: ChannelKind, transcription: Transcription) -> Result<f64, EvolutionError> {
    let mut worst: f64 = 0.0;
    for p in parameter_grid() {
        for (ga, gb) in gamma_pairs() {
            let rho = evolve(&ChannelScenario::multi_local(kind, ga, gb)?, &p)?;
            let oracle = analytic_evolved(kind, &p, ga, gb, transcription);
            worst = worst.max(rho.matrix().max_abs_diff(&oracle).expect("6x6"));
        }
    }
    Ok(worst)
}

/// Worst deviation from the printed closed form, split into the flagged
/// entries and everything else.
fn printed_entry_errors(kind: ChannelKind) -> Result<(f64, f64), EvolutionError> {
    let flagged: Vec<(usize, usize)> = EVOLVED_MISPRINTS
        .iter()
        .filter(|m| m.kind == kind)
        .flat_map(|m| m.entries.iter().map(|&(i, j)| (i - 1, j - 1)))
        .collect();
    let (mut on, mut off) = (0.0f64, 0.0f64);
    for p in parameter_grid() {
        for (ga, gb) in gamma_pairs() {
            let rho = evolve(&ChannelScenario::multi_local(kind, ga, gb)?, &p)?;
            let printed = analytic_evolved(kind, &p, ga, gb, Transcription::AsPrinted);
            for i in 0..6 {
                for j in 0..6 {
                    let e = (rho.matrix()[(i, j)] - printed[(i, j)]).norm();
                    if flagged.contains(&(i, j)) {
                        on = on.max(e);
                    } else {
                        off = off.max(e);
                    }
                }
            }
        }
    }
    Ok((on, off))
}

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    use crate::linalg::ComplexMatrix;
    use num_complex::Complex64;
    let g = ComplexMatrix::from_fn(6, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let w = g.matmul(&g.dagger()).expect("6x6");
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr).hermitian_part()).expect("Wishart sample is a state")
}

pub fn random_entangled_params(rng: &mut ChaCha8Rng) -> StateParams {
    let b = rng.gen_range(0.0..1.0 / 6.0);
    let c = rng.gen_range(3.0 * b..=1.0 - 3.0 * b);
    StateParams::new(b, c).expect("sampled inside the regime")
}

fn completeness_check() -> Result<Check, EvolutionError> {
    let mut worst: f64 = 0.0;
    for kind in ChannelKind::ALL {
        for side in [Side::Qubit, Side::Qutrit] {
            for k in 0..=10 {
                let ch = KrausChannel::new(kind, side, NoiseStrength::new(k as f64 / 10.0)?)?;
                worst = worst.max(ch.completeness_error());
            }
        }
    }
    Ok(Check::bounded(
        "kraus_completeness",
        worst,
        ORACLE_TOL,
        "5 kinds x 2 sides x 11 gamma values",
    ))
}

fn threshold_checks() -> Result<Check, EvolutionError> {
    let p = StateParams::new(0.05, 0.6).expect("valid");
    let cells = [
        (ChannelKind::Dephasing, Mode::QubitOnly),
        (ChannelKind::PhaseFlip, Mode::QubitOnly),
        (ChannelKind::PhaseFlip, Mode::QutritOnly),
        (ChannelKind::Depolarizing, Mode::QubitOnly),
        (ChannelKind::Depolarizing, Mode::QutritOnly),
        (ChannelKind::BitFlip, Mode::QutritOnly),
    ];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (kind, mode) in cells {
        let r = esd_report(NoiseSetting::new(kind, mode), &p, DEFAULT_BISECTION_TOL)?;
        let err = r.agreement().unwrap_or(f64::INFINITY);
        worst = worst.max(err);
        detail.push(format!(
            "{}: bisection {:?} analytic {:?}",
            r.setting, r.esd_gamma, r.analytic_gamma
        ));
    }
    Ok(Check::bounded(
        "esd_threshold_agreement",
        worst,
        THRESHOLD_AGREEMENT_TOL,
        detail.join("; "),
    ))
}

fn analytic_negativity_check() -> Result<Check, EvolutionError> {
    let mut worst: f64 = 0.0;
    let mut cases = 0usize;
    for p in parameter_grid() {
        for setting in NoiseSetting::all() {
            for &g in &gamma_grid() {
                let s = setting.at(g)?;
                if let Ok(analytic) = negativity_analytic(&s, &p, Transcription::Corrected) {
                    let numeric = negativity_numeric(&evolve(&s, &p)?).value;
                    worst = worst.max((numeric - analytic).abs());
                    cases += 1;
                }
            }
        }
    }
    Ok(Check::bounded(
        "negativity_closed_forms",
        worst,
        NEGATIVITY_TOL,
        format!("{cases} (params, scenario, gamma) cases with a closed form"),
    ))
}

fn route_agreement_check() -> Result<Check, EvolutionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let settings = NoiseSetting::all();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_entangled_params(&mut rng);
        let setting = settings[rng.gen_range(0..settings.len())];
        let (ga, gb) = (rng.gen::<f64>(), rng.gen::<f64>());
        let s = match setting.mode {
            Mode::MultiLocal => ChannelScenario::multi_local(setting.kind, ga, gb)?,
            Mode::QubitOnly => ChannelScenario::qubit_only(setting.kind, ga)?,
            Mode::QutritOnly => ChannelScenario::qutrit_only(setting.kind, gb)?,
        };
        worst = worst.max(negativity_numeric(&evolve(&s, &p)?).route_disagreement());
    }
    Ok(Check::bounded(
        "negativity_route_agreement",
        worst,
        NEGATIVITY_TOL,
        "1000 randomized evolved states",
    ))
}

fn commutation_check() -> Result<Check, EvolutionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst: f64 = 0.0;
    for kind in ChannelKind::ALL {
        for _ in 0..20 {
            let rho = random_state(&mut rng);
            let s = ChannelScenario::multi_local(kind, rng.gen(), rng.gen())?;
            let (qa, qb) = (s.qubit_channel()?, s.qutrit_channel()?);
            let ab = qb.apply_to(&qa.apply_to(rho.matrix()));
            let ba = qa.apply_to(&qb.apply_to(rho.matrix()));
            worst = worst.max(ab.max_abs_diff(&ba).expect("6x6"));
        }
    }
    Ok(Check::bounded(
        "side_commutation",
        worst,
        1e-13,
        "qubit and qutrit channels on random states",
    ))
}

fn coherence_check() -> Result<Check, EvolutionError> {
    let mut worst_vanishing: f64 = 0.0;
    let mut weakest_surviving = f64::INFINITY;
    for p in parameter_grid() {
        for kind in ChannelKind::ALL {
            let coh = coherence_l1(&evolve(&ChannelScenario::multi_local(kind, 1.0, 1.0)?, &p)?);
            match kind {
                ChannelKind::BitFlip | ChannelKind::BitPhaseFlip => {
                    weakest_surviving = weakest_surviving.min(coh)
                }
                _ => worst_vanishing = worst_vanishing.max(coh),
            }
        }
    }
    let mut check = Check::bounded(
        "coherence_at_full_noise",
        worst_vanishing,
        ORACLE_TOL,
        format!("dephasing/phase-flip/depolarizing max {worst_vanishing:e}; bit-flip/bit-phase-flip min {weakest_surviving:e} (must exceed 1e-3)"),
    );
    check.passed &= weakest_surviving > 1e-3;
    Ok(check)
}

fn semigroup_deviation(kind: ChannelKind, side: Side) -> Result<f64, EvolutionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let rho = random_state(&mut rng);
        let rate = rng.gen_range(0.1..2.0);
        let (t1, t2) = (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5));
        let channel = |t: f64| KrausChannel::new(kind, side, NoiseStrength::from_rate(rate, t)?);
        let direct = channel(t1 + t2)?.apply_to(rho.matrix());
        let stepped = channel(t2)?.apply_to(&channel(t1)?.apply_to(rho.matrix()));
        worst = worst.max(direct.max_abs_diff(&stepped).expect("6x6"));
    }
    Ok(worst)
}

pub fn run_validation() -> Result<ValidationReport, EvolutionError> {
    let mut checks = vec![completeness_check()?];

    for (kind, name) in [
        (ChannelKind::Dephasing, "oracle_dephasing"),
        (ChannelKind::PhaseFlip, "oracle_phase_flip"),
        (ChannelKind::BitFlip, "oracle_bit_flip"),
    ] {
        checks.push(Check::bounded(
            name,
            oracle_error(kind, Transcription::AsPrinted)?,
            ORACLE_TOL,
            "Kraus evolution vs printed matrix, 20 params x 64 (gA, gB) pairs",
        ));
    }
    let mut discrepancies = Vec::new();
    for (kind, name) in [
        (ChannelKind::BitPhaseFlip, "bit_phase_flip"),
        (ChannelKind::Depolarizing, "depolarizing"),
    ] {
        let (flagged, rest) = printed_entry_errors(kind)?;
        checks.push(Check::bounded(
            &format!("oracle_{name}_unflagged_entries"),
            rest,
            ORACLE_TOL,
            "printed matrix vs Kraus evolution, excluding known misprints",
        ));
        checks.push(Check::bounded(
            &format!("oracle_{name}_corrected"),
            oracle_error(kind, Transcription::Corrected)?,
            ORACLE_TOL,
            "Kraus evolution vs repaired matrix",
        ));
        for m in EVOLVED_MISPRINTS.iter().filter(|m| m.kind == kind) {
            let entries: Vec<String> = m
                .entries
                .iter()
                .map(|(i, j)| format!("rho_{i}{j}"))
                .collect();
            discrepancies.push(Discrepancy {
                source: format!("{kind} evolved matrix, {}", entries.join("/")),
                printed: m.printed.to_string(),
                measured: m.corrected.to_string(),
                max_deviation: flagged,
                note: "numerics reproduce the corrected expression to within 1e-12".into(),
            });
        }
    }

    let mut initial_worst: f64 = 0.0;
    for p in parameter_grid() {
        let n = negativity_numeric(&initial_state(&p)).value;
        initial_worst = initial_worst.max((n - initial_negativity(&p)).abs());
    }
    checks.push(Check::bounded(
        "initial_negativity",
        initial_worst,
        NEGATIVITY_TOL,
        "N(rho_bc(0)) = c - 3b",
    ));
    checks.push(threshold_checks()?);
    checks.push(analytic_negativity_check()?);
    checks.push(route_agreement_check()?);
    checks.push(commutation_check()?);
    checks.push(coherence_check()?);

    // printed trit-flip numerator
    let mut trit_worst: f64 = 0.0;
    for p in parameter_grid() {
        for &g in &gamma_grid() {
            let s = ChannelScenario::qutrit_only(ChannelKind::BitFlip, g)?;
            let printed =
                negativity_analytic(&s, &p, Transcription::AsPrinted).expect("closed form");
            let numeric = negativity_numeric(&evolve(&s, &p)?).value;
            trit_worst = trit_worst.max((printed - numeric).abs());
        }
    }
    discrepancies.push(Discrepancy {
        source: "qutrit-only trit-flip negativity".into(),
        printed: "2 max{0, (3b - 9c - (1 - 8b + 2c) gB)/6}".into(),
        measured: "2 max{0, (3c - 9b - (1 - 8b + 2c) gB)/6}".into(),
        max_deviation: trit_worst,
        note: "printed numerator is negative for every entangled state; the stated threshold (3c-9b)/(1-8b+2c) matches the corrected form".into(),
    });

    for kind in ChannelKind::ALL {
        for side in [Side::Qubit, Side::Qutrit] {
            let dev = semigroup_deviation(kind, side)?;
            if dev > ORACLE_TOL {
                discrepancies.push(Discrepancy {
                    source: format!("{kind} on the {side}: semigroup in t at fixed rate"),
                    printed: "gamma = 1 - exp(-t Gamma) composes as a semigroup".into(),
                    measured: format!("composition deviates by {dev:e}"),
                    max_deviation: dev,
                    note: "documented non-property: the phased shift operators do not compose within the family"
                        .into(),
                });
            }
        }
    }

    let table = reproduce_table1(&canonical_params())?;
    for cell in table.cells.iter().filter(|c| !c.holds) {
        let outcome: Vec<String> = cell
            .reports
            .iter()
            .map(|r| format!("{} -> {:?}", r.params, r.esd_gamma))
            .collect();
        discrepancies.push(Discrepancy {
            source: format!("ESD table cell {}", cell.setting),
            printed: cell.label.clone(),
            measured: outcome.join("; "),
            max_deviation: 0.0,
            note: "negativity reaches zero only at gamma = 1 for at least one tested state".into(),
        });
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        passed,
        checks,
        discrepancies,
    })
}

/// Runs one state through a random scenario; used by property tests.
pub fn evolve_random(rng: &mut ChaCha8Rng) -> Result<DensityMatrix, EvolutionError> {
    let rho = random_state(rng);
    let kind = ChannelKind::ALL[rng.gen_range(0..5)];
    let s = ChannelScenario::multi_local(kind, rng.gen(), rng.gen())?;
    evolve_state(&s, &rho)
}
