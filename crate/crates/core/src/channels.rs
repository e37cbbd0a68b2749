//! Kraus operator sets for the five noise models, on either subsystem.
//!
//! Qubit-side operators are materialised as `E ⊗ I₃`, qutrit-side ones as
//! `I₂ ⊗ F`, so every channel acts on the full 6×6 space. Operators keep the
//! conventional subscript order `E₁, E₂, …` / `F₁, F₂, …`, and zero operators
//! (e.g. the dephasing `E₂` at γ = 0) are retained.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, ONE, ZERO};
use crate::states::{DIM, QUBIT_DIM, QUTRIT_DIM};

/// Completeness tolerance: ‖Σ K†K − I‖_max.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("noise strength gamma={0} outside [0, 1]")]
    GammaOutOfRange(f64),
    #[error("rate and time must be finite and non-negative (rate={rate}, time={time})")]
    BadRateTime { rate: f64, time: f64 },
    #[error("{kind} on the {side} violates completeness by {error:e}")]
    Incomplete {
        kind: ChannelKind,
        side: Side,
        error: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Dephasing,
    PhaseFlip,
    BitFlip,
    BitPhaseFlip,
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Dephasing,
        ChannelKind::PhaseFlip,
        ChannelKind::BitFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::Depolarizing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::PhaseFlip => "phaseflip",
            ChannelKind::BitFlip => "bitflip",
            ChannelKind::BitPhaseFlip => "bitphaseflip",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }

    /// Number of Kraus operators on the given side.
    pub fn operator_count(self, side: Side) -> usize {
        match (self, side) {
            (ChannelKind::Depolarizing, Side::Qubit) => 4,
            (ChannelKind::Depolarizing, Side::Qutrit) => 9,
            (ChannelKind::BitPhaseFlip, Side::Qutrit) => 5,
            (_, Side::Qubit) => 2,
            (_, Side::Qutrit) => 3,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "dephasing" => Ok(ChannelKind::Dephasing),
            "phaseflip" => Ok(ChannelKind::PhaseFlip),
            "bitflip" | "tritflip" => Ok(ChannelKind::BitFlip),
            "bitphaseflip" | "tritphaseflip" => Ok(ChannelKind::BitPhaseFlip),
            "depolarizing" | "depolarising" => Ok(ChannelKind::Depolarizing),
            _ => Err(format!(
                "unknown channel kind '{s}' (expected dephasing, phaseflip, bitflip, bitphaseflip or depolarizing)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Qubit,
    Qutrit,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Qubit => "qubit",
            Side::Qutrit => "qutrit",
        })
    }
}

/// Noise strength γ ∈ [0, 1], optionally derived from a decay rate and a time
/// through γ = 1 − e^{−tΓ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseStrength {
    gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate_time: Option<(f64, f64)>,
}

impl NoiseStrength {
    pub const NONE: NoiseStrength = NoiseStrength {
        gamma: 0.0,
        rate_time: None,
    };

    pub fn new(gamma: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(ChannelError::GammaOutOfRange(gamma));
        }
        Ok(NoiseStrength {
            gamma,
            rate_time: None,
        })
    }

    pub fn from_rate(rate: f64, time: f64) -> Result<Self, ChannelError> {
        if !(rate.is_finite() && time.is_finite() && rate >= 0.0 && time >= 0.0) {
            return Err(ChannelError::BadRateTime { rate, time });
        }
        Ok(NoiseStrength {
            gamma: -(-time * rate).exp_m1(),
            rate_time: Some((rate, time)),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rate_time(&self) -> Option<(f64, f64)> {
        self.rate_time
    }
}

/// A set of 6×6 Kraus operators for one side of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    kind: ChannelKind,
    side: Side,
    strength: NoiseStrength,
    completeness_error: f64,
}

impl KrausChannel {
    pub fn new(
        kind: ChannelKind,
        side: Side,
        strength: NoiseStrength,
    ) -> Result<Self, ChannelError> {
        let local = local_operators(kind, side, strength.gamma());
        let operators: Vec<ComplexMatrix> = local
            .iter()
            .map(|op| match side {
                Side::Qubit => op.kron(&ComplexMatrix::identity(QUTRIT_DIM)),
                Side::Qutrit => ComplexMatrix::identity(QUBIT_DIM).kron(op),
            })
            .collect();
        debug_assert_eq!(operators.len(), kind.operator_count(side));
        let completeness_error = completeness_error(&operators);
        if completeness_error > COMPLETENESS_TOL {
            return Err(ChannelError::Incomplete {
                kind,
                side,
                error: completeness_error,
            });
        }
        Ok(KrausChannel {
            operators,
            kind,
            side,
            strength,
            completeness_error,
        })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn strength(&self) -> NoiseStrength {
        self.strength
    }

    /// ‖Σ K†K − I₆‖_max, measured at construction.
    pub fn completeness_error(&self) -> f64 {
        self.completeness_error
    }

    /// Σᵢ Kᵢ X Kᵢ† on an arbitrary 6×6 operator.
    pub fn apply_to(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(DIM);
        for k in &self.operators {
            out = &out + &k.sandwich(x).expect("6x6 operands");
        }
        out
    }
}

pub fn dephasing(side: Side, strength: NoiseStrength) -> Result<KrausChannel, ChannelError> {
    KrausChannel::new(ChannelKind::Dephasing, side, strength)
}

pub fn phase_flip(side: Side, strength: NoiseStrength) -> Result<KrausChannel, ChannelError> {
    KrausChannel::new(ChannelKind::PhaseFlip, side, strength)
}

pub fn bit_flip(side: Side, strength: NoiseStrength) -> Result<KrausChannel, ChannelError> {
    KrausChannel::new(ChannelKind::BitFlip, side, strength)
}

pub fn bit_phase_flip(side: Side, strength: NoiseStrength) -> Result<KrausChannel, ChannelError> {
    KrausChannel::new(ChannelKind::BitPhaseFlip, side, strength)
}

pub fn depolarizing(side: Side, strength: NoiseStrength) -> Result<KrausChannel, ChannelError> {
    KrausChannel::new(ChannelKind::Depolarizing, side, strength)
}

fn completeness_error(operators: &[ComplexMatrix]) -> f64 {
    let mut sum = ComplexMatrix::zeros(DIM);
    for k in operators {
        sum = &sum + &k.dagger().matmul(k).expect("6x6 operands");
    }
    sum.max_abs_diff(&ComplexMatrix::identity(DIM))
        .expect("6x6 operands")
}

/// ω = e^{i2π/3}
pub fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::i();
    ComplexMatrix::from_row_major(2, vec![ZERO, -i, i, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, -1.0])
}

/// Qutrit shift: |0⟩ ↦ |2⟩, |1⟩ ↦ |0⟩, |2⟩ ↦ |1⟩.
pub fn weyl_shift() -> ComplexMatrix {
    ComplexMatrix::from_real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]).unwrap()
}

/// Qutrit clock diag(1, ω, ω²).
pub fn weyl_clock() -> ComplexMatrix {
    let w = omega();
    ComplexMatrix::diagonal(&[ONE, w, w.conj()])
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Operators on the bare 2- or 3-level factor.
fn local_operators(kind: ChannelKind, side: Side, gamma: f64) -> Vec<ComplexMatrix> {
    let w = omega();
    let wb = w.conj();
    match side {
        Side::Qubit => {
            let id = ComplexMatrix::identity(2);
            match kind {
                ChannelKind::Dephasing => vec![
                    ComplexMatrix::real_diagonal(&[1.0, (1.0 - gamma).sqrt()]),
                    ComplexMatrix::real_diagonal(&[0.0, gamma.sqrt()]),
                ],
                ChannelKind::PhaseFlip | ChannelKind::BitFlip | ChannelKind::BitPhaseFlip => {
                    let flip = match kind {
                        ChannelKind::PhaseFlip => pauli_z(),
                        ChannelKind::BitFlip => pauli_x(),
                        _ => pauli_y(),
                    };
                    vec![
                        id.scale_real((1.0 - gamma / 2.0).sqrt()),
                        flip.scale_real((gamma / 2.0).sqrt()),
                    ]
                }
                ChannelKind::Depolarizing => {
                    let p = (gamma / 4.0).sqrt();
                    vec![
                        id.scale_real((1.0 - 0.75 * gamma).sqrt()),
                        pauli_x().scale_real(p),
                        pauli_y().scale_real(p),
                        pauli_z().scale_real(p),
                    ]
                }
            }
        }
        Side::Qutrit => {
            let id = ComplexMatrix::identity(3);
            let keep = (1.0 - 2.0 * gamma / 3.0).sqrt();
            match kind {
                ChannelKind::Dephasing => {
                    let s = (1.0 - gamma).sqrt();
                    let g = gamma.sqrt();
                    vec![
                        ComplexMatrix::real_diagonal(&[1.0, s, s]),
                        ComplexMatrix::real_diagonal(&[0.0, g, 0.0]),
                        ComplexMatrix::real_diagonal(&[0.0, 0.0, g]),
                    ]
                }
                ChannelKind::PhaseFlip => {
                    let p = (gamma / 3.0).sqrt();
                    vec![
                        id.scale_real(keep),
                        ComplexMatrix::diagonal(&[ONE, wb, w]).scale_real(p),
                        ComplexMatrix::diagonal(&[ONE, w, wb]).scale_real(p),
                    ]
                }
                ChannelKind::BitFlip => {
                    let p = (gamma / 3.0).sqrt();
                    let shift = weyl_shift();
                    vec![
                        id.scale_real(keep),
                        shift.dagger().scale_real(p),
                        shift.scale_real(p),
                    ]
                }
                ChannelKind::BitPhaseFlip => {
                    let p = real((gamma / 6.0).sqrt());
                    let z = ZERO;
                    let o = ONE;
                    let ops = [
                        [z, z, w, o, z, z, z, wb, z],
                        [z, z, wb, o, z, z, z, w, z],
                        [z, wb, z, z, z, w, o, z, z],
                        [z, w, z, z, z, wb, o, z, z],
                    ];
                    std::iter::once(id.scale_real(keep))
                        .chain(ops.iter().map(|e| {
                            ComplexMatrix::from_row_major(3, e.to_vec())
                                .unwrap()
                                .scale(p)
                        }))
                        .collect()
                }
                ChannelKind::Depolarizing => {
                    let y = weyl_shift();
                    let zc = weyl_clock();
                    let mul = |a: &ComplexMatrix, b: &ComplexMatrix| a.matmul(b).unwrap();
                    let y2 = mul(&y, &y);
                    let z2 = mul(&zc, &zc);
                    let p = gamma.sqrt() / 3.0;
                    let weyl = [
                        y.clone(),
                        zc.clone(),
                        y2.clone(),
                        mul(&y, &zc),
                        mul(&y2, &zc),
                        mul(&y, &z2),
                        mul(&y2, &z2),
                        z2,
                    ];
                    std::iter::once(id.scale_real((1.0 - 8.0 * gamma / 9.0).sqrt()))
                        .chain(weyl.iter().map(|op| op.scale_real(p)))
                        .collect()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{initial_state, StateParams};
    use approx::assert_abs_diff_eq;

    fn strength(g: f64) -> NoiseStrength {
        NoiseStrength::new(g).unwrap()
    }

    fn all_channels(g: f64) -> Vec<KrausChannel> {
        let mut out = Vec::new();
        for kind in ChannelKind::ALL {
            for side in [Side::Qubit, Side::Qutrit] {
                out.push(KrausChannel::new(kind, side, strength(g)).unwrap());
            }
        }
        out
    }

    #[test]
    fn operator_counts() {
        for ch in all_channels(0.3) {
            assert_eq!(
                ch.operators().len(),
                ch.kind().operator_count(ch.side()),
                "{:?}",
                ch.kind()
            );
        }
        assert_eq!(ChannelKind::BitPhaseFlip.operator_count(Side::Qutrit), 5);
        assert_eq!(ChannelKind::Depolarizing.operator_count(Side::Qutrit), 9);
    }

    #[test]
    fn completeness_on_a_gamma_ladder() {
        for step in 0..=10 {
            for ch in all_channels(step as f64 / 10.0) {
                assert!(ch.completeness_error() <= COMPLETENESS_TOL);
            }
        }
    }

    #[test]
    fn zero_strength_is_identity() {
        let rho = initial_state(&StateParams::new(0.05, 0.6).unwrap()).into_matrix();
        for ch in all_channels(0.0) {
            assert!(
                ch.apply_to(&rho).max_abs_diff(&rho).unwrap() <= 1e-14,
                "{}",
                ch.kind()
            );
        }
    }

    #[test]
    fn zero_operators_are_kept() {
        let ch = dephasing(Side::Qubit, NoiseStrength::NONE).unwrap();
        assert_eq!(ch.operators().len(), 2);
        assert_eq!(ch.operators()[1], ComplexMatrix::zeros(6));
    }

    #[test]
    fn all_channels_are_unital() {
        let mixed = ComplexMatrix::identity(6).scale_real(1.0 / 6.0);
        for g in [0.0, 0.25, 0.7, 1.0] {
            for ch in all_channels(g) {
                assert!(ch.apply_to(&mixed).max_abs_diff(&mixed).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn full_qubit_dephasing_kills_singlet_coherence() {
        let rho = initial_state(&StateParams::new(0.05, 0.6).unwrap()).into_matrix();
        let out = dephasing(Side::Qubit, strength(1.0))
            .unwrap()
            .apply_to(&rho);
        assert!(out[(1, 3)].norm() < 1e-16);
        assert!(out[(3, 1)].norm() < 1e-16);
        for i in 0..6 {
            assert_abs_diff_eq!(out[(i, i)].re, rho[(i, i)].re, epsilon = 1e-15);
        }
    }

    #[test]
    fn qutrit_phase_flip_operators_are_diagonal() {
        let ch = phase_flip(Side::Qutrit, strength(0.6)).unwrap();
        for k in ch.operators() {
            assert_abs_diff_eq!(k.offdiagonal_l1(), 0.0);
        }
        // diagonal weights: (1 − 2γ/3) + 2·(γ/3) = 1
        let w: f64 = ch.operators().iter().map(|k| k[(4, 4)].norm_sqr()).sum();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qutrit_phase_flip_uses_conjugate_pair_of_phases() {
        let ch = phase_flip(Side::Qutrit, strength(1.0)).unwrap();
        let f2 = &ch.operators()[1];
        let f3 = &ch.operators()[2];
        let p = (1.0f64 / 3.0).sqrt();
        assert!((f2[(1, 1)] - omega().conj() * p).norm() < 1e-15);
        assert!((f3[(1, 1)] - omega() * p).norm() < 1e-15);
    }

    #[test]
    fn full_trit_flip_equalises_qutrit_populations() {
        // I₂ ⊗ diag(1, 0, 0) restricted to the qubit |0⟩ row: populations → 1/3 each.
        let mut rho = ComplexMatrix::zeros(6);
        rho[(0, 0)] = ONE;
        let out = bit_flip(Side::Qutrit, strength(1.0))
            .unwrap()
            .apply_to(&rho);
        for t in 0..3 {
            assert_abs_diff_eq!(out[(t, t)].re, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn bit_phase_flip_weights() {
        let ch = bit_phase_flip(Side::Qutrit, strength(0.9)).unwrap();
        let weights: Vec<f64> = ch
            .operators()
            .iter()
            .map(|k| k.dagger().matmul(k).unwrap()[(0, 0)].re)
            .collect();
        assert_abs_diff_eq!(weights[0], 1.0 - 0.6, epsilon = 1e-15);
        for w in &weights[1..] {
            assert_abs_diff_eq!(*w, 0.15, epsilon = 1e-15);
        }
    }

    #[test]
    fn qubit_bit_phase_flip_is_phase_conjugated_bit_flip() {
        // σ₂ = −i · S σ₁ S† with S = diag(1, i)
        let s = ComplexMatrix::diagonal(&[ONE, Complex64::i()]).kron(&ComplexMatrix::identity(3));
        let bpf = bit_phase_flip(Side::Qubit, strength(0.4)).unwrap();
        let bf = bit_flip(Side::Qubit, strength(0.4)).unwrap();
        for (a, b) in bpf.operators().iter().zip(bf.operators()) {
            let conj = s.sandwich(b).unwrap();
            let phase = (0..36)
                .map(|n| (n / 6, n % 6))
                .find(|&ij| conj[ij].norm() > 1e-12)
                .map(|ij| a[ij] / conj[ij])
                .unwrap();
            assert_abs_diff_eq!(phase.norm(), 1.0, epsilon = 1e-14);
            assert!(a.max_abs_diff(&conj.scale(phase)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn full_depolarizing_twirls_marginals() {
        use crate::states::DensityMatrix;
        let rho = initial_state(&StateParams::new(0.02, 0.8).unwrap());
        let q = depolarizing(Side::Qubit, strength(1.0)).unwrap();
        let out = DensityMatrix::new(q.apply_to(rho.matrix())).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(out.qubit_marginal().max_abs_diff(&half).unwrap() < 1e-14);

        let t = depolarizing(Side::Qutrit, strength(1.0)).unwrap();
        let out = DensityMatrix::new(t.apply_to(rho.matrix())).unwrap();
        let third = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(out.qutrit_marginal().max_abs_diff(&third).unwrap() < 1e-14);
    }

    #[test]
    fn strength_validation() {
        assert!(NoiseStrength::new(-0.1).is_err());
        assert!(NoiseStrength::new(1.0001).is_err());
        assert!(NoiseStrength::from_rate(-1.0, 1.0).is_err());
        let s = NoiseStrength::from_rate(0.5, 2.0).unwrap();
        assert_abs_diff_eq!(s.gamma(), 1.0 - (-1.0f64).exp(), epsilon = 1e-12);
        assert_eq!(s.rate_time(), Some((0.5, 2.0)));
        assert_eq!(NoiseStrength::from_rate(3.0, 0.0).unwrap().gamma(), 0.0);
    }

    #[test]
    fn kind_parsing_is_lenient() {
        assert_eq!(
            "bit-phase-flip".parse::<ChannelKind>().unwrap(),
            ChannelKind::BitPhaseFlip
        );
        assert_eq!(
            "PhaseFlip".parse::<ChannelKind>().unwrap(),
            ChannelKind::PhaseFlip
        );
        assert_eq!(
            "trit_flip".parse::<ChannelKind>().unwrap(),
            ChannelKind::BitFlip
        );
        assert!("amplitude-damping".parse::<ChannelKind>().is_err());
        for kind in ChannelKind::ALL {
            assert_eq!(kind.name().parse::<ChannelKind>().unwrap(), kind);
        }
    }

    #[test]
    fn weyl_generators() {
        let y = weyl_shift();
        let z = weyl_clock();
        let y3 = y.matmul(&y).unwrap().matmul(&y).unwrap();
        assert!(y3.max_abs_diff(&ComplexMatrix::identity(3)).unwrap() < 1e-15);
        // YZ = ω ZY
        let zy = z.matmul(&y).unwrap().scale(omega());
        let yz = y.matmul(&z).unwrap();
        assert!(zy.max_abs_diff(&yz).unwrap() < 1e-15);
    }
}
