//! Bosonic entropy kernels.
//!
//! A single-mode thermal state with mean photon number `x` has von Neumann
//! entropy
//!
//! ```text
//! g(x) = (x + 1) log2(x + 1) - x log2(x)
//! ```
//!
//! in bits. Everything in the capacity formulas reduces to differences of
//! `g` evaluated at effective photon numbers, plus the inverse-temperature
//! map `beta` used by the extremum conditions.

use std::f64::consts::LN_2;

/// Von Neumann entropy, in bits, of a thermal state with mean photon number
/// `x`; `g(0) = 0`.
///
/// Uses `ln_1p` so the `(x+1) ln(x+1)` term stays accurate for small `x`.
///
/// # Panics
///
/// Panics if `x` is negative or NaN.
pub fn g(x: f64) -> f64 {
    assert!(x >= 0.0, "g: mean photon number must be >= 0, got {x}");
    if x == 0.0 {
        return 0.0;
    }
    ((x + 1.0) * x.ln_1p() - x * x.ln()) / LN_2
}

/// Derivative `g'(x) = log2((x + 1) / x)`.
///
/// Diverges as `x -> 0+`; the caller decides how to handle the boundary.
///
/// # Panics
///
/// Panics if `x <= 0` or NaN.
pub fn g_prime(x: f64) -> f64 {
    assert!(x > 0.0, "g': mean photon number must be > 0, got {x}");
    (1.0 / x).ln_1p() / LN_2
}

/// Inverse temperature of a thermal mode of frequency `omega` with mean
/// occupation `m`:
///
/// ```text
/// beta(m, omega) = ln((m + 1) / m) / omega
/// ```
///
/// (natural units). This is the unique `beta` with
/// `m = 1 / (exp(omega beta) - 1)`. The zero-occupation boundary `m = 0`
/// maps to `+inf`, which callers treat as the zero-temperature flag.
///
/// # Panics
///
/// Panics if `m < 0`, if `omega <= 0`, or if either is NaN.
pub fn beta(m: f64, omega: f64) -> f64 {
    assert!(m >= 0.0, "beta: mean occupation must be >= 0, got {m}");
    assert!(omega > 0.0, "beta: frequency must be > 0, got {omega}");
    if m == 0.0 {
        return f64::INFINITY;
    }
    (1.0 / m).ln_1p() / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn g_vanishes_at_zero() {
        assert_eq!(g(0.0), 0.0);
    }

    #[test]
    fn g_matches_reference_values() {
        // High-precision evaluations of (x+1)log2(x+1) - x log2(x).
        assert_relative_eq!(g(0.1), 0.483446685613664634, max_relative = 1e-12);
        assert_relative_eq!(g(0.5), 1.37744375108173427, max_relative = 1e-12);
        assert_relative_eq!(g(5.0), 3.90013452989012535, max_relative = 1e-12);
    }

    #[test]
    fn g_is_monotone_and_concave_on_samples() {
        let xs: Vec<f64> = (1..200).map(|i| i as f64 * 0.05).collect();
        for w in xs.windows(3) {
            let (a, b, c) = (g(w[0]), g(w[1]), g(w[2]));
            assert!(b > a, "g must increase: g({}) <= g({})", w[1], w[0]);
            assert!(b - a > c - b, "g must be concave around x = {}", w[1]);
        }
    }

    #[test]
    fn g_prime_matches_log_ratio() {
        // g'(3) = log2(4/3)
        assert_relative_eq!(g_prime(3.0), 0.415037499278843819, max_relative = 1e-12);
        // finite-difference cross-check at a handful of points
        for &x in &[0.05, 0.4, 1.7, 12.0] {
            let h = 1e-6 * x;
            let fd = (g(x + h) - g(x - h)) / (2.0 * h);
            assert_relative_eq!(g_prime(x), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn beta_matches_bose_einstein_inversion() {
        // m = 1 at unit frequency inverts to exactly ln 2.
        assert_relative_eq!(beta(1.0, 1.0), std::f64::consts::LN_2, max_relative = 1e-12);
        for &(m, w) in &[(0.3, 0.7), (2.5, 1.0), (0.01, 0.2), (40.0, 3.0)] {
            let b = beta(m, w);
            let back = 1.0 / ((w * b).exp() - 1.0);
            assert_relative_eq!(back, m, max_relative = 1e-9);
        }
    }

    #[test]
    fn beta_flags_zero_occupation_as_infinite() {
        assert!(beta(0.0, 0.5).is_infinite());
    }

    #[test]
    #[should_panic(expected = "mean photon number must be >= 0")]
    fn g_rejects_negative_input() {
        g(-0.1);
    }

    #[test]
    #[should_panic(expected = "frequency must be > 0")]
    fn beta_rejects_nonpositive_frequency() {
        beta(1.0, 0.0);
    }
}
