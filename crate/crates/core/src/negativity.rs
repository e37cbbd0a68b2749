//! Negativity of qubit⊗qutrit states, numerically and in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::ChannelKind;
use crate::evolution::{ChannelScenario, Mode, NoiseSetting, Transcription};
use crate::linalg::{hermitian_eigenvalues, partial_transpose_b, HERMITIAN_TOL};
use crate::states::{DensityMatrix, StateParams};

/// Eigenvalues of ρ^{T_B} above −1e-12 are treated as eigensolver dust.
pub const NEGATIVE_EIGENVALUE_CUTOFF: f64 = 1e-12;

/// A threshold this close to 1 is asymptotic decay (t → ∞), not sudden death.
const ASYMPTOTIC_EDGE: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no closed-form negativity for {0}; use the numerical route")]
pub struct NoClosedForm(pub NoiseSetting);

/// Negativity by both routes: `2·max{0, −λ_S}` and `‖ρ^{T_B}‖₁ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    pub value: f64,
    pub negative_eigenvalue_sum: f64,
    pub via_trace_norm: f64,
}

impl NegativityResult {
    /// `max{0, ‖ρ^{T_B}‖₁ − 1}`
    pub fn trace_norm_route(&self) -> f64 {
        (self.via_trace_norm - 1.0).max(0.0)
    }

    pub fn route_disagreement(&self) -> f64 {
        (self.value - self.trace_norm_route()).abs()
    }
}

pub fn negativity_numeric(rho: &DensityMatrix) -> NegativityResult {
    let pt = partial_transpose_b(rho.matrix()).expect("density matrices are 6x6");
    let spectrum = hermitian_eigenvalues(&pt, HERMITIAN_TOL)
        .expect("partial transpose of a Hermitian matrix is Hermitian");
    let lambda_s = spectrum.negative_sum(NEGATIVE_EIGENVALUE_CUTOFF);
    NegativityResult {
        value: 2.0 * (-lambda_s).max(0.0),
        negative_eigenvalue_sum: lambda_s,
        via_trace_norm: spectrum.abs_sum(),
    }
}

fn clamp2(x: f64) -> f64 {
    2.0 * x.max(0.0)
}

/// Closed-form negativity for the scenarios that have one. Multi-local
/// bit-flip and bit-phase-flip have none.
///
/// The qutrit-only trit-flip formula is used in its sign-corrected form
/// `(3c − 9b − (1 − 8b + 2c)γ_B)/6` unless `AsPrinted` is requested, in which
/// case the numerator reads `3b − 9c − …`.
pub fn negativity_analytic(
    scenario: &ChannelScenario,
    p: &StateParams,
    transcription: Transcription,
) -> Result<f64, NoClosedForm> {
    let (b, c) = (p.b(), p.c());
    let (ga, gb) = (scenario.gamma_a(), scenario.gamma_b());
    let setting = NoiseSetting::new(scenario.kind(), scenario.mode());
    let phase_flip_qubit = clamp2((c - 3.0 * b - ga * (c - b)) / 2.0);
    let trit_flip_qutrit = || {
        let lead = match transcription {
            Transcription::Corrected => 3.0 * c - 9.0 * b,
            Transcription::AsPrinted => 3.0 * b - 9.0 * c,
        };
        clamp2((lead - (1.0 - 8.0 * b + 2.0 * c) * gb) / 6.0)
    };
    let value = match (scenario.kind(), scenario.mode()) {
        (ChannelKind::Dephasing, _) => clamp2((c - b) / 2.0 * ((1.0 - ga) * (1.0 - gb)).sqrt() - b),
        (ChannelKind::PhaseFlip, Mode::MultiLocal) => {
            clamp2(((c - 3.0 * b) + (c - b) * ((1.0 - ga) * (1.0 - gb) - 1.0)) / 2.0)
        }
        (ChannelKind::PhaseFlip, Mode::QubitOnly) => phase_flip_qubit,
        (ChannelKind::PhaseFlip, Mode::QutritOnly) => clamp2((c - 3.0 * b - gb * (c - b)) / 2.0),
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::QubitOnly) => phase_flip_qubit,
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::QutritOnly) => trit_flip_qutrit(),
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::MultiLocal) => {
            return Err(NoClosedForm(setting))
        }
        (ChannelKind::Depolarizing, Mode::MultiLocal) => {
            let lambda =
                (9.0 * (b - c) * ga * (gb - 1.0) + 2.0 * gb * (1.0 - 9.0 * b + 3.0 * c) + 18.0 * b
                    - 6.0 * c)
                    / 12.0;
            clamp2(-lambda)
        }
        (ChannelKind::Depolarizing, Mode::QubitOnly) => {
            clamp2((2.0 * c - 6.0 * b - 3.0 * ga * (c - b)) / 4.0)
        }
        (ChannelKind::Depolarizing, Mode::QutritOnly) => {
            clamp2((3.0 * c - 9.0 * b - (1.0 - 9.0 * b + 3.0 * c) * gb) / 6.0)
        }
    };
    Ok(value)
}

/// Closed-form death point on the equal-γ axis, or `None` when the
/// closed form never reaches zero before γ = 1 (or no closed form exists).
pub fn analytic_threshold(setting: NoiseSetting, p: &StateParams) -> Option<f64> {
    if !p.is_entangled() {
        return None;
    }
    let (b, c) = (p.b(), p.c());
    let ratio = 2.0 * b / (c - b);
    let flip_local = (c - 3.0 * b) / (c - b);
    let gamma = match (setting.kind, setting.mode) {
        // (1 − γ)² ≤ (2b/(c − b))²
        (ChannelKind::Dephasing, Mode::MultiLocal) => 1.0 - ratio,
        (ChannelKind::Dephasing, _) => 1.0 - ratio * ratio,
        // (1 − γ)² ≤ 2b/(c − b)
        (ChannelKind::PhaseFlip, Mode::MultiLocal) => 1.0 - ratio.sqrt(),
        (ChannelKind::PhaseFlip, _) => flip_local,
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::QubitOnly) => flip_local,
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::QutritOnly) => {
            (3.0 * c - 9.0 * b) / (1.0 - 8.0 * b + 2.0 * c)
        }
        (ChannelKind::BitFlip | ChannelKind::BitPhaseFlip, Mode::MultiLocal) => return None,
        (ChannelKind::Depolarizing, Mode::QubitOnly) => (2.0 * c - 6.0 * b) / (3.0 * (c - b)),
        (ChannelKind::Depolarizing, Mode::QutritOnly) => {
            (3.0 * c - 9.0 * b) / (1.0 - 9.0 * b + 3.0 * c)
        }
        (ChannelKind::Depolarizing, Mode::MultiLocal) => depolarizing_diagonal_root(b, c)?,
    };
    (gamma < 1.0 - ASYMPTOTIC_EDGE).then_some(gamma)
}

/// Root in [0, 1] of 12λ(γ, γ) = 9(b−c)γ(γ−1) + 2γ(1−9b+3c) + 18b − 6c.
fn depolarizing_diagonal_root(b: f64, c: f64) -> Option<f64> {
    let qa = 9.0 * (b - c);
    let qb = -9.0 * (b - c) + 2.0 * (1.0 - 9.0 * b + 3.0 * c);
    let qc = 18.0 * b - 6.0 * c;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    // Cancellation-free pair of roots.
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let roots = [q / qa, qc / q];
    roots
        .into_iter()
        .filter(|r| (0.0..=1.0).contains(r))
        .reduce(f64::min)
}
