use serde::{Deserialize, Serialize};

use crate::geometry::ModelParams;

use super::constants::PeierlsConstants;

/// The per-contour probability bound `(π δ² z / 4)^{-⌈cK⌉}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Lemma3Bound {
    /// The base `π δ² z / 4`.
    pub base: f64,
    /// `⌈cK⌉`.
    pub exponent: u64,
    pub value: f64,
    /// True when the base is at most 1, so the bound exceeds 1 and says
    /// nothing.
    pub vacuous: bool,
}

/// Probability bound for contours of size `size` at the given activity.
pub fn lemma3_bound(
    size: usize,
    params: &ModelParams,
    constants: &PeierlsConstants,
) -> Lemma3Bound {
    assert!(size >= 1);
    let base = std::f64::consts::PI * params.delta * params.delta * params.z / 4.0;
    let exponent = constants.insertion_count(size) as u64;
    let value = base.powi(-(exponent as i32));
    Lemma3Bound {
        base,
        exponent,
        value,
        vacuous: base <= 1.0,
    }
}

/// Natural log of the count bound `((K+1) H / ε)² (H / ε)^{2(K-1)}` on
/// origin-enclosing contours of size `K`.
pub fn lemma4_bound_ln(size: usize, params: &ModelParams, constants: &PeierlsConstants) -> f64 {
    assert!(size >= 1);
    let k = size as f64;
    let h_over_eps = constants.h / params.epsilon;
    2.0 * ((k + 1.0) * h_over_eps).ln() + 2.0 * (k - 1.0) * h_over_eps.ln()
}

/// The count bound itself; overflows to infinity for very large `K`
/// (use [`lemma4_bound_ln`] there).
pub fn lemma4_bound(size: usize, params: &ModelParams, constants: &PeierlsConstants) -> f64 {
    lemma4_bound_ln(size, params, constants).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peierls::compute_constants;

    fn reference() -> (ModelParams, PeierlsConstants) {
        let p = ModelParams::new(0.5, 2.1, 0.2, 0.09, 1.0, 10.0).unwrap();
        let k = compute_constants(&p);
        (p, k)
    }

    #[test]
    fn direct_substitution() {
        // base = 2 with exponent 1 gives 1/2.
        let (mut p, k) = reference();
        p.z = 8.0 / (std::f64::consts::PI * p.delta * p.delta);
        let b = lemma3_bound(5, &p, &k);
        assert_eq!(b.exponent, 1);
        assert!((b.base - 2.0).abs() < 1e-12);
        assert!((b.value - 0.5).abs() < 1e-12);
        assert!(!b.vacuous);
    }

    #[test]
    fn vacuous_flagged() {
        let (p, k) = reference(); // z = 1: base = π 0.04 / 4 ≈ 0.0314
        let b = lemma3_bound(3, &p, &k);
        assert!(b.vacuous);
        assert!(b.value > 1.0);
    }

    #[test]
    fn high_activity_reference_value() {
        // delta = 0.2, z = 1000: base = 10π ≈ 31.42, M = 1 for small K,
        // bound ≈ 0.0318.
        let (mut p, k) = reference();
        p.z = 1000.0;
        let b = lemma3_bound(10, &p, &k);
        assert!((b.base - 10.0 * std::f64::consts::PI).abs() < 1e-9);
        assert_eq!(b.exponent, 1);
        assert!((b.value - 0.03183).abs() < 1e-4);
    }

    #[test]
    fn count_bound_small_sizes() {
        let (p, k) = reference();
        let h_over_eps = k.h / p.epsilon;
        // K = 1: (2 H / ε)².
        let b1 = lemma4_bound(1, &p, &k);
        assert!((b1 - (2.0 * h_over_eps).powi(2)).abs() < 1e-6 * b1);
        // K = 2: (3 H / ε)² (H / ε)².
        let b2 = lemma4_bound(2, &p, &k);
        assert!((b2 - (3.0 * h_over_eps).powi(2) * h_over_eps.powi(2)).abs() < 1e-6 * b2);
    }

    #[test]
    fn log_form_stays_finite() {
        let (p, k) = reference();
        let ln = lemma4_bound_ln(100_000, &p, &k);
        assert!(ln.is_finite() && ln > 0.0);
        assert!(lemma4_bound(100_000, &p, &k).is_infinite());
    }
}
