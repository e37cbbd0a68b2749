//! Channel application and the closed-form evolved states.
//!
//! Numerical evolution applies the qubit-side Kraus set and then the
//! qutrit-side set: ρ(t) = Σᵢⱼ Fⱼ Eᵢ ρ(0) Eᵢ† Fⱼ†. Local scenarios run the
//! same path with the idle side pinned to γ = 0.
//!
//! [`analytic_evolved`] writes the literature matrices down entry by entry so
//! they can act as independent oracles for the Kraus numerics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{ChannelError, ChannelKind, KrausChannel, NoiseStrength, Side};
use crate::linalg::ComplexMatrix;
use crate::states::{initial_state, DensityMatrix, StateError, StateParams, DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("{mode} scenario requires gamma_{side}=0, got {gamma}")]
    IdleSideActive { mode: Mode, side: char, gamma: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("channel output is not a density matrix: {0}")]
    State(#[from] StateError),
}

/// Which subsystem(s) the noise acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    MultiLocal,
    QubitOnly,
    QutritOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::MultiLocal, Mode::QubitOnly, Mode::QutritOnly];

    pub fn name(self) -> &'static str {
        match self {
            Mode::MultiLocal => "multilocal",
            Mode::QubitOnly => "qubitonly",
            Mode::QutritOnly => "qutritonly",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "multilocal" | "both" => Ok(Mode::MultiLocal),
            "qubitonly" | "qubit" => Ok(Mode::QubitOnly),
            "qutritonly" | "qutrit" => Ok(Mode::QutritOnly),
            _ => Err(format!(
                "unknown mode '{s}' (expected multilocal, qubitonly or qutritonly)"
            )),
        }
    }
}

/// A channel kind, the sides it acts on, and the strength on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelScenario {
    kind: ChannelKind,
    mode: Mode,
    strength_a: NoiseStrength,
    strength_b: NoiseStrength,
}

impl ChannelScenario {
    pub fn new(
        kind: ChannelKind,
        mode: Mode,
        strength_a: NoiseStrength,
        strength_b: NoiseStrength,
    ) -> Result<Self, EvolutionError> {
        match mode {
            Mode::QubitOnly if strength_b.gamma() != 0.0 => Err(EvolutionError::IdleSideActive {
                mode,
                side: 'B',
                gamma: strength_b.gamma(),
            }),
            Mode::QutritOnly if strength_a.gamma() != 0.0 => Err(EvolutionError::IdleSideActive {
                mode,
                side: 'A',
                gamma: strength_a.gamma(),
            }),
            _ => Ok(ChannelScenario {
                kind,
                mode,
                strength_a,
                strength_b,
            }),
        }
    }

    pub fn multi_local(
        kind: ChannelKind,
        gamma_a: f64,
        gamma_b: f64,
    ) -> Result<Self, EvolutionError> {
        Self::new(
            kind,
            Mode::MultiLocal,
            NoiseStrength::new(gamma_a)?,
            NoiseStrength::new(gamma_b)?,
        )
    }

    pub fn qubit_only(kind: ChannelKind, gamma: f64) -> Result<Self, EvolutionError> {
        Self::new(
            kind,
            Mode::QubitOnly,
            NoiseStrength::new(gamma)?,
            NoiseStrength::NONE,
        )
    }

    pub fn qutrit_only(kind: ChannelKind, gamma: f64) -> Result<Self, EvolutionError> {
        Self::new(
            kind,
            Mode::QutritOnly,
            NoiseStrength::NONE,
            NoiseStrength::new(gamma)?,
        )
    }

    /// One point on the equal-rate axis: γ_A = γ_B = γ for multi-local noise,
    /// or γ on the active side for local noise.
    pub fn on_axis(kind: ChannelKind, mode: Mode, gamma: f64) -> Result<Self, EvolutionError> {
        match mode {
            Mode::MultiLocal => Self::multi_local(kind, gamma, gamma),
            Mode::QubitOnly => Self::qubit_only(kind, gamma),
            Mode::QutritOnly => Self::qutrit_only(kind, gamma),
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn gamma_a(&self) -> f64 {
        self.strength_a.gamma()
    }

    pub fn gamma_b(&self) -> f64 {
        self.strength_b.gamma()
    }

    pub fn qubit_channel(&self) -> Result<KrausChannel, ChannelError> {
        KrausChannel::new(self.kind, Side::Qubit, self.strength_a)
    }

    pub fn qutrit_channel(&self) -> Result<KrausChannel, ChannelError> {
        KrausChannel::new(self.kind, Side::Qutrit, self.strength_b)
    }
}

/// A (kind, mode) pair: one cell of the ESD table, swept along γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NoiseSetting {
    pub kind: ChannelKind,
    pub mode: Mode,
}

impl NoiseSetting {
    pub fn new(kind: ChannelKind, mode: Mode) -> Self {
        NoiseSetting { kind, mode }
    }

    /// All 15 settings, kind-major.
    pub fn all() -> Vec<NoiseSetting> {
        ChannelKind::ALL
            .iter()
            .flat_map(|&kind| {
                Mode::ALL
                    .iter()
                    .map(move |&mode| NoiseSetting { kind, mode })
            })
            .collect()
    }

    pub fn at(&self, gamma: f64) -> Result<ChannelScenario, EvolutionError> {
        ChannelScenario::on_axis(self.kind, self.mode, gamma)
    }
}

impl fmt::Display for NoiseSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind, self.mode)
    }
}

/// Σᵢ Kᵢ ρ Kᵢ†, revalidated as a density matrix.
pub fn apply_channel(
    channel: &KrausChannel,
    rho: &DensityMatrix,
) -> Result<DensityMatrix, EvolutionError> {
    Ok(DensityMatrix::new(channel.apply_to(rho.matrix()))?)
}

/// Evolves ρ_bc(0) through the scenario: qubit channel first, then qutrit.
pub fn evolve(
    scenario: &ChannelScenario,
    p: &StateParams,
) -> Result<DensityMatrix, EvolutionError> {
    evolve_state(scenario, &initial_state(p))
}

/// As [`evolve`], from an arbitrary starting state.
pub fn evolve_state(
    scenario: &ChannelScenario,
    rho: &DensityMatrix,
) -> Result<DensityMatrix, EvolutionError> {
    let after_qubit = apply_channel(&scenario.qubit_channel()?, rho)?;
    apply_channel(&scenario.qutrit_channel()?, &after_qubit)
}

/// ℓ₁ coherence: Σ_{i≠j} |ρ_ij| in the product basis.
pub fn coherence_l1(rho: &DensityMatrix) -> f64 {
    rho.matrix().offdiagonal_l1()
}

/// Whether to reproduce the literature formulas exactly as printed or with
/// the misprints repaired against the Kraus numerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transcription {
    AsPrinted,
    #[default]
    Corrected,
}

/// A printed closed-form entry that disagrees with the Kraus numerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnownMisprint {
    pub kind: ChannelKind,
    /// 1-based (row, column) positions carrying the entry.
    pub entries: &'static [(usize, usize)],
    pub printed: &'static str,
    pub corrected: &'static str,
}

pub const EVOLVED_MISPRINTS: [KnownMisprint; 2] = [
    KnownMisprint {
        kind: ChannelKind::BitPhaseFlip,
        entries: &[(2, 6), (6, 2), (3, 4), (4, 3)],
        printed: "(b-c)*gA*gB/12",
        corrected: "(b-c)*gA*gB/24",
    },
    KnownMisprint {
        kind: ChannelKind::Depolarizing,
        entries: &[(2, 4), (4, 2)],
        printed: "(b-c)*(1-gA)*(-gB)/2",
        corrected: "(b-c)*(1-gA)*(1-gB)/2",
    },
];

/// Closed-form ρ(t) under multi-local noise of the given kind. Local
/// scenarios are the γ_A = 0 or γ_B = 0 specialisations. Every entry not set
/// here is zero; all entries are real.
///
/// The result is a plain matrix: [`Transcription::AsPrinted`] may not be a
/// valid state.
pub fn analytic_evolved(
    kind: ChannelKind,
    p: &StateParams,
    gamma_a: f64,
    gamma_b: f64,
    transcription: Transcription,
) -> ComplexMatrix {
    let (b, c) = (p.b(), p.c());
    let (ga, gb) = (gamma_a, gamma_b);
    let d = b - c;
    let mut m = ComplexMatrix::zeros(DIM);
    // 1-based symmetric setter, matching the ρ_ij labels of the formulas.
    let mut set = |i: usize, j: usize, v: f64| {
        m[(i - 1, j - 1)] = Complex64::new(v, 0.0);
        m[(j - 1, i - 1)] = Complex64::new(v, 0.0);
    };
    let printed = transcription == Transcription::AsPrinted;

    match kind {
        ChannelKind::Dephasing | ChannelKind::PhaseFlip => {
            set(1, 1, b);
            set(5, 5, b);
            set(2, 2, (b + c) / 2.0);
            set(4, 4, (b + c) / 2.0);
            set(3, 3, (1.0 - c - 3.0 * b) / 2.0);
            set(6, 6, (1.0 - c - 3.0 * b) / 2.0);
            let damping = if kind == ChannelKind::Dephasing {
                ((1.0 - ga) * (1.0 - gb)).sqrt()
            } else {
                (1.0 - ga) * (1.0 - gb)
            };
            set(2, 4, d * damping / 2.0);
        }
        ChannelKind::BitFlip | ChannelKind::BitPhaseFlip | ChannelKind::Depolarizing => {
            let d11 = if kind == ChannelKind::BitPhaseFlip {
                b + 0.25 * d * ga * (gb - 1.0) + (1.0 / 6.0 - b) * gb
            } else {
                (12.0 * b + 3.0 * d * ga * (gb - 1.0) + 2.0 * (1.0 - 6.0 * b) * gb) / 12.0
            };
            let d22 =
                (6.0 * (b + c) - 3.0 * d * ga * (gb - 1.0) + (2.0 - 6.0 * b - 6.0 * c) * gb) / 12.0;
            let d33 = (3.0 * (1.0 - 3.0 * b - c) + (9.0 * b + 3.0 * c - 2.0) * gb) / 6.0;
            set(1, 1, d11);
            set(5, 5, d11);
            set(2, 2, d22);
            set(4, 4, d22);
            set(3, 3, d33);
            set(6, 6, d33);
            match kind {
                ChannelKind::BitFlip => {
                    set(1, 5, d * ga * (3.0 - 2.0 * gb) / 12.0);
                    let r16 = d * (2.0 - ga) * gb / 12.0;
                    set(3, 5, r16);
                    set(1, 6, r16);
                    let r26 = d * ga * gb / 12.0;
                    set(2, 6, r26);
                    set(3, 4, r26);
                    set(2, 4, d * (2.0 - ga) * (3.0 - 2.0 * gb) / 12.0);
                }
                ChannelKind::BitPhaseFlip => {
                    set(1, 5, -d * ga * (3.0 - 2.0 * gb) / 12.0);
                    let r16 = d * (ga - 2.0) * gb / 24.0;
                    set(1, 6, r16);
                    set(3, 5, r16);
                    set(2, 4, d * (2.0 - ga) * (3.0 - 2.0 * gb) / 12.0);
                    let r26 = d * ga * gb / if printed { 12.0 } else { 24.0 };
                    set(2, 6, r26);
                    set(3, 4, r26);
                }
                _ => {
                    let survive_b = if printed { -gb } else { 1.0 - gb };
                    set(2, 4, 0.5 * d * (1.0 - ga) * survive_b);
                }
            }
        }
    }
    m
}
