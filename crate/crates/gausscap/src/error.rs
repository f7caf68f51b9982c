//! Error type shared across the crate.
//!
//! Domain violations on plain math kernels (negative mean photon numbers,
//! non-positive frequencies) panic via debug-friendly asserts instead, since
//! they indicate a bug in the caller rather than bad user input; everything
//! reachable from user-supplied parameters reports through [`Error`].

use std::fmt;

/// Everything that can go wrong while constructing channels or solving for
/// the capacity.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its mathematical domain.
    Domain {
        /// Name of the offending parameter.
        what: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// The requested `(tau, y)` pair lies below the complete-positivity
    /// floor `y >= |1 - tau| / 2`.
    UnphysicalChannel {
        tau: f64,
        y: f64,
        /// How far below the floor the pair sits: `|1 - tau|/2 - y`.
        deficit: f64,
    },
    /// `tau = 0`: the output carries no trace of the input, so the requested
    /// quantity is undefined or identically trivial.
    DegenerateChannel,
    /// An operation that only makes sense on one side of the energy
    /// threshold was called on the other side.
    WrongRegime {
        n_bar: f64,
        threshold: f64,
        /// `true` when the callee needed an above-threshold budget.
        wanted_above: bool,
    },
    /// The sign scan for the input-frequency equation found no sign change.
    NoBracket {
        lo: f64,
        hi: f64,
        /// Value at the lowest feasible scan point, if any.
        f_lo: Option<f64>,
        /// Value at the highest scan point, if any.
        f_hi: Option<f64>,
        points: usize,
    },
    /// Bisection ran out of iterations before the interval shrank to the
    /// requested tolerance.
    NoConvergence { iterations: usize, width: f64 },
    /// The two channels handed to `compose` fall outside the concatenation
    /// rule's validity region for `(tau_1, tau_2)`.
    LemmaCondition { tau1: f64, tau2: f64 },
    /// The two channels handed to `compose` see different environments.
    EnvironmentMismatch {
        m_env1: f64,
        m_env2: f64,
        omega_env1: f64,
        omega_env2: f64,
    },
    /// A factor channel's added noise is not of the form
    /// `y = |1 - tau| (M_env + 1/2)`, so the concatenation rule does not
    /// apply to it.
    NotLemmaForm {
        tau: f64,
        y: f64,
        /// The value `|1 - tau| (M_env + 1/2)` the rule would need.
        expected_y: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => {
                write!(f, "parameter `{what}` out of domain: {value}")
            }
            Error::UnphysicalChannel { tau, y, deficit } => write!(
                f,
                "channel (tau={tau}, y={y}) violates the complete-positivity \
                 floor y >= |1-tau|/2 by {deficit:.3e}"
            ),
            Error::DegenerateChannel => {
                write!(f, "tau = 0: output is independent of the input")
            }
            Error::WrongRegime {
                n_bar,
                threshold,
                wanted_above,
            } => {
                let side = if *wanted_above { "above" } else { "below" };
                write!(
                    f,
                    "energy budget n_bar={n_bar} is not {side} the threshold \
                     {threshold}; use the solver for the other regime"
                )
            }
            Error::NoBracket {
                lo,
                hi,
                f_lo,
                f_hi,
                points,
            } => write!(
                f,
                "no sign change over {points} scan points on ({lo:.6e}, {hi:.6e}); \
                 endpoint values {f_lo:?}, {f_hi:?}"
            ),
            Error::NoConvergence { iterations, width } => write!(
                f,
                "bisection did not converge after {iterations} iterations \
                 (interval width {width:.3e})"
            ),
            Error::LemmaCondition { tau1, tau2 } => write!(
                f,
                "(tau1={tau1}, tau2={tau2}) is outside the validity region of \
                 the concatenation rule"
            ),
            Error::EnvironmentMismatch {
                m_env1,
                m_env2,
                omega_env1,
                omega_env2,
            } => write!(
                f,
                "factors see different environments: (M_env={m_env1}, \
                 omega_env={omega_env1}) vs (M_env={m_env2}, omega_env={omega_env2})"
            ),
            Error::NotLemmaForm { tau, y, expected_y } => write!(
                f,
                "channel (tau={tau}, y={y}) is not of the form \
                 y = |1-tau|(M_env+1/2) required by the concatenation rule \
                 (expected y={expected_y})"
            ),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Validates that `value` is finite, returning a domain error naming the
/// parameter otherwise.
pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
