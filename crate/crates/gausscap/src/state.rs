//! Single-mode Gaussian states in the thermal-mode parameterization.
//!
//! A zero-mean single-mode Gaussian state is described here by a mean
//! occupation `m >= 0` and a mode frequency `omega > 0`, with covariance
//! matrix (natural units, `hbar = 1`)
//!
//! ```text
//! V = (m + 1/2) diag(1/omega, omega)
//! ```
//!
//! so `omega` measures the squeeze of the state's principal axes and
//! `m = 0` is a pure squeezed-vacuum state. Covariance matrices stay
//! diagonal throughout the crate: the channels considered here never mix
//! the quadratures.

use crate::error::{ensure_finite, Error, Result};

/// Diagonal 2x2 covariance matrix of the `(q, p)` quadratures.
///
/// The off-diagonal entry is carried for completeness but must be zero for
/// every operation in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CovMat2 {
    /// Variance of the position quadrature.
    pub vqq: f64,
    /// Variance of the momentum quadrature.
    pub vpp: f64,
    /// Cross covariance; zero everywhere in this crate.
    pub vqp: f64,
}

impl CovMat2 {
    /// Diagonal covariance matrix with the given quadrature variances.
    ///
    /// # Panics
    ///
    /// Panics if either variance is negative or NaN.
    pub fn diag(vqq: f64, vpp: f64) -> Self {
        assert!(
            vqq >= 0.0 && vpp >= 0.0,
            "covariance variances must be >= 0, got ({vqq}, {vpp})"
        );
        CovMat2 { vqq, vpp, vqp: 0.0 }
    }

    /// Determinant `vqq * vpp - vqp^2`.
    pub fn det(&self) -> f64 {
        self.vqq * self.vpp - self.vqp * self.vqp
    }

    /// Trace `vqq + vpp`.
    pub fn trace(&self) -> f64 {
        self.vqq + self.vpp
    }

    /// Whether the matrix satisfies the uncertainty bound `det V >= 1/4`
    /// (up to a small tolerance for round-off on the pure boundary).
    pub fn is_quantum(&self) -> bool {
        self.det() >= 0.25 * (1.0 - 1e-12)
    }
}

/// Mean-photon-number constraint on the modulated channel input: the
/// time-averaged input covariance matrix must satisfy
/// `Tr V_in_mod = 2 n_bar + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnergyBudget {
    n_bar: f64,
}

impl EnergyBudget {
    /// Creates a budget of `n_bar >= 0` mean photons.
    pub fn new(n_bar: f64) -> Result<Self> {
        ensure_finite("n_bar", n_bar)?;
        if n_bar < 0.0 {
            return Err(Error::Domain {
                what: "n_bar",
                value: n_bar,
            });
        }
        Ok(EnergyBudget { n_bar })
    }

    /// Mean photon number of the modulated input.
    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }
}

/// Zero-mean single-mode Gaussian state: mean occupation `m` of a thermal
/// mode at frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModeState {
    m: f64,
    omega: f64,
}

impl ModeState {
    /// Creates a state with mean occupation `m >= 0` and frequency
    /// `omega > 0`.
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        ensure_finite("m", m)?;
        ensure_finite("omega", omega)?;
        if m < 0.0 {
            return Err(Error::Domain {
                what: "m",
                value: m,
            });
        }
        if omega <= 0.0 {
            return Err(Error::Domain {
                what: "omega",
                value: omega,
            });
        }
        Ok(ModeState { m, omega })
    }

    /// Mean occupation of the thermal mode.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Mode frequency (squeeze parameter of the principal axes).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Covariance matrix `(m + 1/2) diag(1/omega, omega)`.
    pub fn cov(&self) -> CovMat2 {
        let s = self.m + 0.5;
        CovMat2::diag(s / self.omega, s * self.omega)
    }

    /// Recovers the `(m, omega)` parameterization from a diagonal
    /// covariance matrix: `m = sqrt(det V) - 1/2`, `omega = sqrt(vpp/vqq)`.
    ///
    /// Fails if the matrix has a cross term, is not strictly positive, or
    /// violates the uncertainty bound `det V >= 1/4` beyond round-off.
    pub fn from_cov(v: &CovMat2) -> Result<Self> {
        if v.vqp != 0.0 {
            return Err(Error::Domain {
                what: "vqp",
                value: v.vqp,
            });
        }
        if v.vqq <= 0.0 || v.vpp <= 0.0 {
            return Err(Error::Domain {
                what: "variance",
                value: v.vqq.min(v.vpp),
            });
        }
        let det = v.det();
        if det < 0.25 * (1.0 - 1e-12) {
            return Err(Error::Domain {
                what: "det V",
                value: det,
            });
        }
        // Clamp round-off on the pure boundary to exactly m = 0.
        let m = (det.sqrt() - 0.5).max(0.0);
        ModeState::new(m, (v.vpp / v.vqq).sqrt())
    }

    /// Mean photon number `(Tr V - 1) / 2 = (m + 1/2)(omega + 1/omega)/2 - 1/2`.
    ///
    /// Exceeds `m` whenever `omega != 1`: squeezing costs photons.
    pub fn photon_number(&self) -> f64 {
        (self.cov().trace() - 1.0) / 2.0
    }
}
