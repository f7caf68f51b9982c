//! Single-mode phase-sensitive Gaussian channels in fiducial form.
//!
//! Every channel handled by this crate acts on a diagonal covariance matrix
//! `V` as
//!
//! ```text
//! V  ->  |tau| V + Y,      Y = y diag(1/omega_env, omega_env)
//! ```
//!
//! where `tau` is the transmissivity (`0 <= tau <= 1`: lossy), gain
//! (`tau > 1`: amplifier), or phase-conjugating gain (`tau < 0`), and the
//! added noise `Y` is a squeezed thermal environment of frequency
//! `omega_env` with mean occupation `M_env`:
//!
//! ```text
//! y = |1 - tau| (M_env + 1/2)   for tau != 1,
//! y = M_env                     for tau  = 1 (additive classical noise).
//! ```
//!
//! Complete positivity requires `y >= |1 - tau| / 2` for `tau != 1`; the
//! constructors reject anything below that floor.
//!
//! The convention throughout is `omega_env <= 1` (noise squeezed in `p`).
//! Inputs with `omega_env > 1` are accepted and canonicalized to
//! `1/omega_env` with a recorded quadrature-swap flag, since relabeling
//! `q <-> p` leaves every capacity quantity unchanged.

use crate::error::{ensure_finite, Error, Result};
use crate::state::CovMat2;

/// Relative slack for the complete-positivity floor check, so that channels
/// constructed exactly on the floor (pure loss, `M_env = 0`) survive
/// round-off in `y`.
const CPTP_SLACK: f64 = 1e-12;

/// A single-mode phase-sensitive Gaussian channel in fiducial form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FiducialChannel {
    tau: f64,
    m_env: f64,
    omega_env: f64,
    y: f64,
    quadrature_swapped: bool,
}

impl FiducialChannel {
    /// Builds a channel from the environment occupation `M_env >= 0`.
    ///
    /// `omega_env > 1` is canonicalized to `1/omega_env` with the swap flag
    /// set. The result is always physical: the noise floor is built into the
    /// `y = |1 - tau| (M_env + 1/2)` parameterization.
    pub fn from_m_env(tau: f64, m_env: f64, omega_env: f64) -> Result<Self> {
        ensure_finite("tau", tau)?;
        ensure_finite("m_env", m_env)?;
        if m_env < 0.0 {
            return Err(Error::Domain {
                what: "m_env",
                value: m_env,
            });
        }
        let (omega_env, swapped) = canonical_omega(omega_env)?;
        let y = if tau == 1.0 {
            m_env
        } else {
            (1.0 - tau).abs() * (m_env + 0.5)
        };
        Ok(Self::assemble(tau, m_env, omega_env, y, swapped))
    }

    /// Builds a channel from the total squeezed-noise strength `y >= 0`.
    ///
    /// This parameterization is natural when `y` is held fixed while `tau`
    /// varies. Rejects pairs below the complete-positivity floor
    /// `y >= |1 - tau| / 2` (`tau != 1`).
    pub fn from_y(tau: f64, y: f64, omega_env: f64) -> Result<Self> {
        ensure_finite("tau", tau)?;
        ensure_finite("y", y)?;
        if y < 0.0 {
            return Err(Error::Domain {
                what: "y",
                value: y,
            });
        }
        let (omega_env, swapped) = canonical_omega(omega_env)?;
        let m_env = if tau == 1.0 {
            y
        } else {
            let floor = 0.5 * (1.0 - tau).abs();
            if y < floor - CPTP_SLACK * (1.0 + floor) {
                return Err(Error::UnphysicalChannel {
                    tau,
                    y,
                    deficit: floor - y,
                });
            }
            // Clamp round-off for channels sitting exactly on the floor.
            (y / (2.0 * floor) - 0.5).max(0.0)
        };
        Ok(Self::assemble(tau, m_env, omega_env, y, swapped))
    }

    fn assemble(tau: f64, m_env: f64, omega_env: f64, y: f64, swapped: bool) -> Self {
        // The perfect channel adds no noise at all; its environment
        // frequency is meaningless, so pin it to 1 to keep equality and
        // threshold logic trivial.
        let omega_env = if tau == 1.0 && y == 0.0 {
            1.0
        } else {
            omega_env
        };
        FiducialChannel {
            tau,
            m_env,
            omega_env,
            y,
            quadrature_swapped: swapped,
        }
    }

    /// Transmissivity (`|tau| <= 1`) or gain (`|tau| > 1`); negative values
    /// are phase-conjugating.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Mean occupation of the squeezed thermal environment.
    pub fn m_env(&self) -> f64 {
        self.m_env
    }

    /// Environment frequency, canonicalized to `(0, 1]`.
    pub fn omega_env(&self) -> f64 {
        self.omega_env
    }

    /// Total squeezed-noise strength `y = sqrt(det Y)`.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Whether the constructor swapped `q <-> p` to canonicalize
    /// `omega_env <= 1`.
    pub fn quadrature_swapped(&self) -> bool {
        self.quadrature_swapped
    }

    /// The noise matrix `Y = y diag(1/omega_env, omega_env)`.
    pub fn noise_matrix(&self) -> CovMat2 {
        CovMat2::diag(self.y / self.omega_env, self.y * self.omega_env)
    }

    /// The quadrature scaling matrix
    /// `X = diag(sqrt|tau|, sign(tau) sqrt|tau|)`.
    pub fn scaling_matrix(&self) -> [[f64; 2]; 2] {
        let s = self.tau.abs().sqrt();
        [[s, 0.0], [0.0, s.copysign(self.tau)]]
    }

    /// `tau = 1`, `y = 0`: the identity channel.
    pub fn is_perfect(&self) -> bool {
        self.tau == 1.0 && self.y == 0.0
    }
}

fn canonical_omega(omega_env: f64) -> Result<(f64, bool)> {
    ensure_finite("omega_env", omega_env)?;
    if omega_env <= 0.0 {
        return Err(Error::Domain {
            what: "omega_env",
            value: omega_env,
        });
    }
    if omega_env > 1.0 {
        Ok((1.0 / omega_env, true))
    } else {
        Ok((omega_env, false))
    }
}

/// Reduces an explicit `(X, Y)` matrix pair to fiducial form:
/// `tau = det X`, `y = sqrt(det Y)`, and `omega_env` is the ratio of the
/// principal standard deviations of `Y`, canonicalized to `(0, 1]`.
///
/// `y_mat` must be diagonal (the crate-wide basis convention) with
/// nonnegative entries; a singular `y_mat` is accepted only when it is the
/// zero matrix, which forces `tau = 1` (perfect channel). The
/// complete-positivity floor is enforced as in [`FiducialChannel::from_y`].
pub fn normalize_channel(x_mat: [[f64; 2]; 2], y_mat: CovMat2) -> Result<FiducialChannel> {
    for (i, row) in x_mat.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            ensure_finite(["x00", "x01", "x10", "x11"][2 * i + j], e)?;
        }
    }
    let tau = x_mat[0][0] * x_mat[1][1] - x_mat[0][1] * x_mat[1][0];
    if y_mat.vqp != 0.0 {
        return Err(Error::Domain {
            what: "y_mat.vqp",
            value: y_mat.vqp,
        });
    }
    if y_mat.vqq < 0.0 || y_mat.vpp < 0.0 {
        return Err(Error::Domain {
            what: "y_mat variance",
            value: y_mat.vqq.min(y_mat.vpp),
        });
    }
    if y_mat.vqq == 0.0 || y_mat.vpp == 0.0 {
        // Noiseless channel: only the zero matrix qualifies, and complete
        // positivity then requires tau = 1.
        if y_mat.vqq != y_mat.vpp {
            return Err(Error::Domain {
                what: "y_mat (singular but nonzero)",
                value: y_mat.vqq.max(y_mat.vpp),
            });
        }
        return FiducialChannel::from_y(tau, 0.0, 1.0);
    }
    let y = y_mat.det().sqrt();
    let omega_env = (y_mat.vpp / y_mat.vqq).sqrt();
    FiducialChannel::from_y(tau, y, omega_env)
}

/// Action of the channel on a diagonal covariance matrix:
/// `|tau| v + Y`. Phase conjugation (`tau < 0`) flips the sign of the
/// `p`-quadrature, which leaves a diagonal covariance matrix unchanged, so
/// the same formula covers all `tau`.
pub fn apply_channel(ch: &FiducialChannel, v: &CovMat2) -> CovMat2 {
    debug_assert_eq!(v.vqp, 0.0, "apply_channel requires a diagonal input");
    let t = ch.tau.abs();
    CovMat2::diag(
        t * v.vqq + ch.y / ch.omega_env,
        t * v.vpp + ch.y * ch.omega_env,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn additive_noise_channel_from_m_env() {
        let ch = FiducialChannel::from_m_env(1.0, 0.1, 1.0).unwrap();
        assert_eq!(ch.y(), 0.1);
        assert_eq!(ch.m_env(), 0.1);
        assert!(!ch.is_perfect());
    }

    #[test]
    fn lossy_channel_noise_strength() {
        // tau = 0.5, M_env = 0.1: y = 0.5 * 0.6 = 0.3
        let ch = FiducialChannel::from_m_env(0.5, 0.1, 0.5).unwrap();
        assert_relative_eq!(ch.y(), 0.3, max_relative = 1e-15);
    }

    #[test]
    fn from_y_round_trips_m_env() {
        for &(tau, m_env, we) in &[(0.5, 0.1, 0.5), (-1.25, 2.0, 0.8), (3.0, 0.0, 1.0)] {
            let a = FiducialChannel::from_m_env(tau, m_env, we).unwrap();
            let b = FiducialChannel::from_y(tau, a.y(), we).unwrap();
            assert_relative_eq!(b.m_env(), m_env, max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn from_y_rejects_sub_floor_noise() {
        // floor at tau = 0.5 is 0.25
        let err = FiducialChannel::from_y(0.5, 0.2, 1.0).unwrap_err();
        match err {
            Error::UnphysicalChannel { deficit, .. } => {
                assert_relative_eq!(deficit, 0.05, max_relative = 1e-12)
            }
            other => panic!("expected UnphysicalChannel, got {other:?}"),
        }
    }

    #[test]
    fn pure_loss_floor_is_accepted_exactly() {
        let ch = FiducialChannel::from_y(0.5, 0.25, 1.0).unwrap();
        assert_eq!(ch.m_env(), 0.0);
    }

    #[test]
    fn omega_env_canonicalization_swaps() {
        let ch = FiducialChannel::from_m_env(0.5, 0.1, 2.0).unwrap();
        assert_relative_eq!(ch.omega_env(), 0.5, max_relative = 1e-15);
        assert!(ch.quadrature_swapped());
    }

    #[test]
    fn perfect_channel_pins_environment_frequency() {
        let ch = FiducialChannel::from_m_env(1.0, 0.0, 0.3).unwrap();
        assert!(ch.is_perfect());
        assert_eq!(ch.omega_env(), 1.0);
    }

    #[test]
    fn normalize_perfect_channel() {
        let ch = normalize_channel([[1.0, 0.0], [0.0, 1.0]], CovMat2::diag(0.0, 0.0)).unwrap();
        assert!(ch.is_perfect());
    }

    #[test]
    fn normalize_pure_loss_floor() {
        let s = 0.5f64.sqrt();
        let ch = normalize_channel([[s, 0.0], [0.0, s]], CovMat2::diag(0.25, 0.25)).unwrap();
        assert_relative_eq!(ch.tau(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(ch.y(), 0.25, max_relative = 1e-15);
        // tau reconstructed through det(x) is one ulp off 0.5, so the
        // recovered occupation is round-off above the exact floor value 0.
        assert!(ch.m_env().abs() < 1e-12, "m_env = {}", ch.m_env());
        assert_eq!(ch.omega_env(), 1.0);
    }

    #[test]
    fn normalize_squeezed_noise() {
        let s = 0.5f64.sqrt();
        let ch = normalize_channel([[s, 0.0], [0.0, s]], CovMat2::diag(0.6, 0.15)).unwrap();
        assert_relative_eq!(ch.tau(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(ch.y(), 0.3, max_relative = 1e-12);
        assert_relative_eq!(ch.omega_env(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn normalize_inverts_explicit_construction() {
        for &(tau, m_env, we) in &[(0.7, 0.4, 0.6), (-2.0, 0.05, 0.9), (1.5, 1.3, 0.2)] {
            let ch = FiducialChannel::from_m_env(tau, m_env, we).unwrap();
            let back = normalize_channel(ch.scaling_matrix(), ch.noise_matrix()).unwrap();
            assert_relative_eq!(back.tau(), ch.tau(), max_relative = 1e-12);
            assert_relative_eq!(back.y(), ch.y(), max_relative = 1e-12);
            assert_relative_eq!(back.omega_env(), ch.omega_env(), max_relative = 1e-12);
        }
    }

    #[test]
    fn apply_additive_noise() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 1.0).unwrap();
        let out = apply_channel(&ch, &CovMat2::diag(0.5, 0.5));
        assert_relative_eq!(out.vqq, 0.6, max_relative = 1e-15);
        assert_relative_eq!(out.vpp, 0.6, max_relative = 1e-15);
    }

    #[test]
    fn vacuum_is_fixed_point_of_pure_loss() {
        let ch = FiducialChannel::from_y(0.5, 0.25, 1.0).unwrap();
        let out = apply_channel(&ch, &CovMat2::diag(0.5, 0.5));
        assert_relative_eq!(out.vqq, 0.5, max_relative = 1e-15);
        assert_relative_eq!(out.vpp, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_channel_is_constructible() {
        // tau = 0 is a valid (if useless) channel: pure environment noise.
        let ch = FiducialChannel::from_m_env(0.0, 0.5, 0.8).unwrap();
        assert_eq!(ch.y(), 1.0);
    }
}
