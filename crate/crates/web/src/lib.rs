//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the
//! logic is testable on the host.

use qutrit_esd::channels::ChannelKind;
use qutrit_esd::esd::{esd_gamma, DEFAULT_BISECTION_TOL};
use qutrit_esd::evolution::{coherence_l1, evolve, Mode, NoiseSetting};
use qutrit_esd::negativity::negativity_numeric;
use qutrit_esd::states::StateParams;
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 4096;

fn setting(kind: &str, mode: &str) -> Result<NoiseSetting, String> {
    Ok(NoiseSetting::new(
        kind.parse::<ChannelKind>()?,
        mode.parse::<Mode>()?,
    ))
}

fn params(b: f64, c: f64) -> Result<StateParams, String> {
    StateParams::new(b, c).map_err(|e| e.to_string())
}

/// `[γ, N, C_l1]` triples, flattened, for `steps + 1` points on [0, 1].
pub fn curve(kind: &str, mode: &str, b: f64, c: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be in 1..={MAX_STEPS}"));
    }
    let s = setting(kind, mode)?;
    let p = params(b, c)?;
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for k in 0..=steps {
        let g = k as f64 / steps as f64;
        let rho = evolve(&s.at(g).map_err(|e| e.to_string())?, &p).map_err(|e| e.to_string())?;
        out.extend([g, negativity_numeric(&rho).value, coherence_l1(&rho)]);
    }
    Ok(out)
}

pub fn threshold(kind: &str, mode: &str, b: f64, c: f64) -> Result<Option<f64>, String> {
    esd_gamma(setting(kind, mode)?, &params(b, c)?, DEFAULT_BISECTION_TOL)
        .map_err(|e| e.to_string())
}

/// Row-major |ρ_ij| of the 6×6 evolved state.
pub fn state_moduli(
    kind: &str,
    mode: &str,
    b: f64,
    c: f64,
    gamma: f64,
) -> Result<Vec<f64>, String> {
    let scenario = setting(kind, mode)?.at(gamma).map_err(|e| e.to_string())?;
    let rho = evolve(&scenario, &params(b, c)?).map_err(|e| e.to_string())?;
    Ok(rho.matrix().entries().iter().map(|z| z.norm()).collect())
}

#[wasm_bindgen]
pub fn negativity_curve(
    kind: &str,
    mode: &str,
    b: f64,
    c: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    curve(kind, mode, b, c, steps).map_err(|e| JsError::new(&e))
}

/// Death point on the equal-γ axis, or `undefined` when there is none.
#[wasm_bindgen]
pub fn esd_threshold(kind: &str, mode: &str, b: f64, c: f64) -> Result<Option<f64>, JsError> {
    threshold(kind, mode, b, c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn evolved_state(
    kind: &str,
    mode: &str,
    b: f64,
    c: f64,
    gamma: f64,
) -> Result<Vec<f64>, JsError> {
    state_moduli(kind, mode, b, c, gamma).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_layout() {
        let v = curve("dephasing", "qubitonly", 0.0, 0.75, 4).unwrap();
        assert_eq!(v.len(), 15);
        assert_eq!(&v[..2], &[0.0, 0.75]);
        assert!((v[2] - 0.75).abs() < 1e-12);
        assert_eq!(v[12], 1.0);
        assert!(v[13].abs() < 1e-12);
    }

    #[test]
    fn bell_bit_phase_flip_threshold() {
        let g = threshold("bit-phase-flip", "multilocal", 0.0, 1.0)
            .unwrap()
            .unwrap();
        assert!((g - 0.720136).abs() < 1e-5);
        assert_eq!(
            threshold("dephasing", "multilocal", 0.0, 1.0).unwrap(),
            None
        );
    }

    #[test]
    fn moduli_of_initial_state() {
        let m = state_moduli("bitflip", "multilocal", 0.05, 0.6, 0.0).unwrap();
        assert_eq!(m.len(), 36);
        let trace: f64 = (0..6).map(|i| m[7 * i]).sum();
        assert!((trace - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(curve("nope", "multilocal", 0.0, 1.0, 8).is_err());
        assert!(curve("bitflip", "multilocal", 0.4, 0.6, 8).is_err());
        assert!(curve("bitflip", "multilocal", 0.0, 1.0, 0).is_err());
        assert!(state_moduli("bitflip", "multilocal", 0.0, 1.0, 1.5).is_err());
    }
}
