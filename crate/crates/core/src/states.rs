//! The two-parameter qubit⊗qutrit state family and its Bell-like constituents.
//!
//! Basis ordering is `index = 3·q + t` (qubit level `q`, qutrit level `t`):
//! |00⟩, |01⟩, |02⟩, |10⟩, |11⟩, |12⟩.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, LinalgError, ONE, ZERO};

pub const QUBIT_DIM: usize = 2;
pub const QUTRIT_DIM: usize = 3;
pub const DIM: usize = QUBIT_DIM * QUTRIT_DIM;

/// Tolerance for Hermiticity, trace and positivity of a [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;

/// Float dust admitted on the parameter-domain boundaries.
const PARAM_DUST: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("invalid state parameters b={b}, c={c}: {reason}")]
    InvalidParams {
        b: f64,
        c: f64,
        reason: &'static str,
    },
    #[error("not a density matrix: {0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Basis index of |q t⟩.
#[inline]
pub fn basis_index(qubit: usize, qutrit: usize) -> usize {
    QUTRIT_DIM * qubit + qutrit
}

/// Parameters `(b, c)` of the family; `a = (1 − 3b − c)/2` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StateParams {
    b: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    b: f64,
    c: f64,
}

impl TryFrom<RawParams> for StateParams {
    type Error = StateError;

    fn try_from(raw: RawParams) -> Result<Self, StateError> {
        StateParams::new(raw.b, raw.c)
    }
}

impl From<StateParams> for RawParams {
    fn from(p: StateParams) -> Self {
        RawParams { b: p.b, c: p.c }
    }
}

impl StateParams {
    pub fn new(b: f64, c: f64) -> Result<Self, StateError> {
        let invalid = |reason| Err(StateError::InvalidParams { b, c, reason });
        if !b.is_finite() || !c.is_finite() {
            return invalid("parameters must be finite");
        }
        if !(0.0..=1.0 / 3.0 + PARAM_DUST).contains(&b) {
            return invalid("b must lie in [0, 1/3]");
        }
        if !(0.0..=1.0).contains(&c) {
            return invalid("c must lie in [0, 1]");
        }
        if 1.0 - 3.0 * b - c < -2.0 * PARAM_DUST {
            return invalid("a = (1 - 3b - c)/2 must be non-negative");
        }
        Ok(StateParams { b, c })
    }

    /// The `a = 0` (Werner-like) slice: `c = 1 − 3b`.
    pub fn a_zero(b: f64) -> Result<Self, StateError> {
        Self::new(b, 1.0 - 3.0 * b)
    }

    pub fn a(&self) -> f64 {
        (0.5 * (1.0 - 3.0 * self.b - self.c)).max(0.0)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `3b < c ≤ 1 − 3b`. The boundary `c = 3b` counts as separable.
    pub fn is_entangled(&self) -> bool {
        3.0 * self.b < self.c && self.c <= 1.0 - 3.0 * self.b + PARAM_DUST
    }
}

impl fmt::Display for StateParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(b={}, c={})", self.b, self.c)
    }
}

/// A validated 6×6 density matrix on qubit⊗qutrit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, each to [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        if matrix.dim() != DIM {
            return Err(LinalgError::WrongDimension {
                expected: DIM,
                got: matrix.dim(),
            }
            .into());
        }
        let dev = matrix.hermiticity_deviation();
        if dev > STATE_TOL {
            return Err(StateError::Invalid(format!(
                "Hermiticity deviation {dev:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(StateError::Invalid(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&matrix, STATE_TOL)?.min();
        if min < -STATE_TOL {
            return Err(StateError::Invalid(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(matrix))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMatrix::identity(DIM).scale_real(1.0 / DIM as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).expect("square 6x6").trace().re
    }

    /// Reduced state of the qubit (trace over the qutrit).
    pub fn qubit_marginal(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(QUBIT_DIM, |q, r| {
            (0..QUTRIT_DIM)
                .map(|t| self.0[(basis_index(q, t), basis_index(r, t))])
                .sum()
        })
    }

    /// Reduced state of the qutrit (trace over the qubit).
    pub fn qutrit_marginal(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(QUTRIT_DIM, |t, u| {
            (0..QUBIT_DIM)
                .map(|q| self.0[(basis_index(q, t), basis_index(q, u))])
                .sum()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Amplitudes in the 6-dimensional basis; qutrit level |2⟩ is unpopulated.
    pub fn vector(self) -> [Complex64; DIM] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = [ZERO; DIM];
        let (first, second, sign) = match self {
            BellKind::PhiPlus => ((0, 0), (1, 1), 1.0),
            BellKind::PhiMinus => ((0, 0), (1, 1), -1.0),
            BellKind::PsiPlus => ((0, 1), (1, 0), 1.0),
            BellKind::PsiMinus => ((0, 1), (1, 0), -1.0),
        };
        v[basis_index(first.0, first.1)] = h;
        v[basis_index(second.0, second.1)] = h * sign;
        v
    }
}

impl FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" => Ok(BellKind::PhiPlus),
            "phi-" | "phiminus" => Ok(BellKind::PhiMinus),
            "psi+" | "psiplus" => Ok(BellKind::PsiPlus),
            "psi-" | "psiminus" => Ok(BellKind::PsiMinus),
            other => Err(format!("unknown Bell state '{other}'")),
        }
    }
}

pub fn bell_state(kind: BellKind) -> DensityMatrix {
    DensityMatrix(ComplexMatrix::outer(&kind.vector()))
}

/// ρ_bc(0) = a(|02⟩⟨02| + |12⟩⟨12|) + b(φ⁺ + φ⁻ + ψ⁺) + c·ψ⁻.
pub fn initial_state(p: &StateParams) -> DensityMatrix {
    let mut rho = ComplexMatrix::zeros(DIM);
    let a = Complex64::new(p.a(), 0.0);
    rho[(basis_index(0, 2), basis_index(0, 2))] += a;
    rho[(basis_index(1, 2), basis_index(1, 2))] += a;
    for kind in BellKind::ALL {
        let weight = if kind == BellKind::PsiMinus {
            p.c()
        } else {
            p.b()
        };
        rho = &rho + &bell_state(kind).0.scale_real(weight);
    }
    DensityMatrix::new(rho).expect("family member is a valid state")
}

/// `max{0, c − 3b}`, the negativity of ρ_bc(0).
pub fn initial_negativity(p: &StateParams) -> f64 {
    (p.c() - 3.0 * p.b()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn params_derive_a() {
        let p = StateParams::new(1.0 / 6.0, 0.5).unwrap();
        assert_abs_diff_eq!(p.a(), 0.0, epsilon = 1e-15);
        let p = StateParams::new(0.05, 0.6).unwrap();
        assert_abs_diff_eq!(p.a(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn params_reject_out_of_domain() {
        assert!(StateParams::new(-0.01, 0.5).is_err());
        assert!(StateParams::new(0.4, 0.0).is_err());
        assert!(StateParams::new(0.0, 1.1).is_err());
        assert!(StateParams::new(0.2, 0.5).is_err()); // a < 0
        assert!(StateParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn params_tolerate_boundary_dust() {
        let p = StateParams::new(1.0 / 30.0, 0.9).unwrap();
        assert!(p.a() >= 0.0);
        assert!(p.is_entangled());
        let p = StateParams::a_zero(2.0 / 30.0).unwrap();
        assert_eq!(p.a(), 0.0);
    }

    #[test]
    fn entangled_regime_predicate() {
        assert!(StateParams::new(0.0, 1.0).unwrap().is_entangled());
        assert!(!StateParams::new(0.1, 0.3).unwrap().is_entangled()); // c = 3b boundary
        assert!(!StateParams::new(0.0, 0.0).unwrap().is_entangled());
        assert!(StateParams::new(0.05, 0.6).unwrap().is_entangled());
    }

    #[test]
    fn psi_minus_layout() {
        let rho = bell_state(BellKind::PsiMinus);
        let m = rho.matrix();
        assert_abs_diff_eq!(m[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 3)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 3)].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 1)].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn phi_plus_layout() {
        let m = bell_state(BellKind::PhiPlus).into_matrix();
        for (i, j) in [(0, 0), (4, 4), (0, 4), (4, 0)] {
            assert_abs_diff_eq!(m[(i, j)].re, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(m.offdiagonal_l1(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bell_states_are_pure() {
        for kind in BellKind::ALL {
            let rho = bell_state(kind);
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn bell_kind_parsing() {
        assert_eq!("psi-".parse::<BellKind>().unwrap(), BellKind::PsiMinus);
        assert_eq!("PhiPlus".parse::<BellKind>().unwrap(), BellKind::PhiPlus);
        assert!("chi".parse::<BellKind>().is_err());
    }

    #[test]
    fn singlet_corner_of_family() {
        let rho = initial_state(&StateParams::new(0.0, 1.0).unwrap());
        let singlet = bell_state(BellKind::PsiMinus);
        assert!(rho.matrix().max_abs_diff(singlet.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn family_entries_at_a_zero() {
        let rho = initial_state(&StateParams::new(1.0 / 6.0, 0.5).unwrap()).into_matrix();
        let diag: Vec<f64> = rho.diag().iter().map(|z| z.re).collect();
        let expected = [1.0 / 6.0, 1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0 / 6.0, 0.0];
        for (got, want) in diag.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(rho[(1, 3)].re, -1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[(3, 1)].re, -1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn only_one_coherence_pair() {
        let rho = initial_state(&StateParams::new(0.05, 0.6).unwrap()).into_matrix();
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j && !matches!((i, j), (1, 3) | (3, 1)) {
                    assert!(rho[(i, j)].norm() < 1e-16, "({i},{j}) = {}", rho[(i, j)]);
                }
            }
        }
        assert_abs_diff_eq!(rho.offdiagonal_l1(), 0.55, epsilon = 1e-15);
    }

    #[test]
    fn initial_negativity_closed_form() {
        assert_eq!(
            initial_negativity(&StateParams::new(0.0, 1.0).unwrap()),
            1.0
        );
        assert_abs_diff_eq!(
            initial_negativity(&StateParams::new(0.05, 0.6).unwrap()),
            0.45,
            epsilon = 1e-15
        );
        assert_eq!(
            initial_negativity(&StateParams::new(0.1, 0.3).unwrap()),
            0.0
        );
        assert_eq!(
            initial_negativity(&StateParams::new(1.0 / 6.0, 1.0 / 6.0).unwrap()),
            0.0
        );
    }

    #[test]
    fn density_validation_catches_bad_inputs() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(6)).is_err()); // trace 6
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25)).is_err());
        let neg = ComplexMatrix::real_diagonal(&[1.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(StateError::Invalid(_))
        ));
        let mut skew = ComplexMatrix::real_diagonal(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        skew[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn marginals_of_singlet_are_maximally_mixed() {
        let rho = bell_state(BellKind::PsiMinus);
        let qubit = rho.qubit_marginal();
        assert!(
            qubit
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                .unwrap()
                < 1e-15
        );
        let qutrit = rho.qutrit_marginal();
        let expected = ComplexMatrix::real_diagonal(&[0.5, 0.5, 0.0]);
        assert!(qutrit.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn params_serde_validates() {
        let p: StateParams = serde_json::from_str(r#"{"b":0.05,"c":0.6}"#).unwrap();
        assert_eq!(p, StateParams::new(0.05, 0.6).unwrap());
        assert!(serde_json::from_str::<StateParams>(r#"{"b":0.3,"c":0.9}"#).is_err());
    }
}
