//! The Gaussian capacity solver.
//!
//! For a fiducial channel `(tau, y, omega_env)` and an input energy budget
//! `n_bar`, the Gaussian capacity is the maximum of the Holevo quantity
//! `g(M_out_mod) - g(M_out)` over pure Gaussian input states and Gaussian
//! displacement modulations. The optimum has two regimes separated by the
//! energy threshold
//!
//! ```text
//! N_thr = (1/(2 omega_env)) [1 + (y/|tau|) |1 - omega_env^2|] - 1/2 .
//! ```
//!
//! **Above threshold** (`n_bar >= N_thr`) the solution is closed-form
//! "quantum water-filling": the input mode is in resonance with the
//! environment (`omega_in = omega_env`), the modulated output is exactly
//! thermal (`omega_out_mod = 1`), and
//!
//! ```text
//! C = g(|tau| (n_bar + 1/2) + (Tr Y - 1)/2) - g(|tau|/2 + y - 1/2) .
//! ```
//!
//! **Below threshold** the budget cannot fill both quadratures; the
//! optimal encoding leaves the input q-quadrature unmodulated,
//! `1/(2 omega_in) = (m_in_mod + 1/2)/omega_in_mod`, and the optimal
//! `omega_in` solves the transcendental stationarity condition
//!
//! ```text
//! F(omega_in) = beta_out_mod (1 - omega_out_mod^2)
//!             - beta_out (omega_in^2 - omega_out^2) = 0
//! ```
//!
//! solved here by a sign scan plus bisection (see [`SolverConfig`]).

use crate::channel::FiducialChannel;
use crate::entropy::{beta, g};
use crate::error::{Error, Result};
use crate::state::EnergyBudget;

/// Which branch of the solution a [`CapacitySolution`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Regime {
    /// Closed-form quantum water-filling solution.
    AboveThreshold,
    /// Transcendental single-quadrature-modulation solution.
    BelowThreshold,
    /// `tau = 0`: capacity identically zero.
    Degenerate,
}

/// Controls for the below-threshold root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverConfig {
    /// Absolute tolerance on the bracket width for `omega_in`.
    pub abs_tol: f64,
    /// Iteration cap for the bisection.
    pub max_iter: usize,
    /// Number of points in the geometric sign scan of the bracket.
    pub bracket_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tol: 1e-12,
            max_iter: 200,
            bracket_grid: 64,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.abs_tol <= 0.0 || self.abs_tol.is_nan() {
            return Err(Error::Domain {
                what: "abs_tol",
                value: self.abs_tol,
            });
        }
        if self.max_iter == 0 {
            return Err(Error::Domain {
                what: "max_iter",
                value: 0.0,
            });
        }
        if self.bracket_grid < 2 {
            return Err(Error::Domain {
                what: "bracket_grid",
                value: self.bracket_grid as f64,
            });
        }
        Ok(())
    }
}

/// The full optimal-encoding description returned by the solver.
///
/// Bare quantities (`m_out`, `omega_out`, `beta_out`) describe the channel
/// output for the un-modulated pure input; `*_bar` quantities describe the
/// modulated (time-averaged) counterparts. `beta_out`/`beta_bar_out` are
/// `+inf` on the pure-output boundary (perfect channel).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CapacitySolution {
    pub regime: Regime,
    /// The Gaussian capacity in bits: `g(m_bar_out) - g(m_out)`.
    pub capacity_bits: f64,
    /// Optimal pure-input frequency.
    pub omega_in: f64,
    /// Frequency of the modulated input's covariance ellipse.
    pub omega_bar_in: f64,
    /// Output frequency for the bare input.
    pub omega_out: f64,
    /// Output frequency including modulation; exactly 1 above threshold.
    pub omega_bar_out: f64,
    /// Mean occupation of the modulated input mode.
    pub m_bar_in: f64,
    /// Mean occupation of the bare output.
    pub m_out: f64,
    /// Mean occupation of the modulated output.
    pub m_bar_out: f64,
    /// Inverse temperature of the bare output (`+inf` when pure).
    pub beta_out: f64,
    /// Inverse temperature of the modulated output.
    pub beta_bar_out: f64,
    /// Mean photon number of the modulated output.
    pub n_bar_out: f64,
    /// Final value of the stationarity condition at the returned
    /// `omega_in`; identically 0 for the closed-form branches.
    pub residual: f64,
}

/// Relative slack used when comparing a budget against the threshold, so
/// that boundary probes land on the closed-form branch instead of tripping
/// the precondition.
const THRESHOLD_SLACK: f64 = 1e-12;

/// The energy threshold `N_thr` separating the two solution regimes.
///
/// Decreasing in `omega_env`, zero at `omega_env = 1` for `y = 0`.
pub fn energy_threshold(ch: &FiducialChannel) -> Result<f64> {
    if ch.tau() == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    let we = ch.omega_env();
    let r = ch.y() / ch.tau().abs();
    Ok((1.0 + r * (1.0 - we * we).abs()) / (2.0 * we) - 0.5)
}

/// The threshold environment frequency: the unique `omega_env` at which a
/// budget of `n_bar` photons sits exactly on the energy threshold,
///
/// ```text
/// omega_thr = (1 + y/|tau|) / (sqrt((y/|tau|)^2 + y/|tau| + (n_bar+1/2)^2)
///                              + n_bar + 1/2) .
/// ```
///
/// Budgets above threshold correspond to `omega_env >= omega_thr`. For
/// `n_bar = 0` this equals 1 identically; it decreases in `n_bar` toward
/// the zero-noise floor `1/(1 + 2 n_bar)`.
pub fn threshold_frequency(tau: f64, y: f64, n_bar: f64) -> Result<f64> {
    if tau == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    crate::error::ensure_finite("tau", tau)?;
    if y < 0.0 || y.is_nan() {
        return Err(Error::Domain {
            what: "y",
            value: y,
        });
    }
    if n_bar < 0.0 || n_bar.is_nan() {
        return Err(Error::Domain {
            what: "n_bar",
            value: n_bar,
        });
    }
    let r = y / tau.abs();
    let s = n_bar + 0.5;
    Ok((1.0 + r) / ((r * r + r + s * s).sqrt() + s))
}

/// Closed-form above-threshold solution (quantum water-filling).
///
/// Requires `n.n_bar >= energy_threshold(ch)` (up to round-off slack) and
/// `tau != 0`.
pub fn capacity_above(ch: &FiducialChannel, n: &EnergyBudget) -> Result<CapacitySolution> {
    let thr = energy_threshold(ch)?;
    let n_bar = n.n_bar();
    if n_bar < thr - THRESHOLD_SLACK * (1.0 + thr) {
        return Err(Error::WrongRegime {
            n_bar,
            threshold: thr,
            wanted_above: true,
        });
    }
    let t = ch.tau().abs();
    let y = ch.y();
    let we = ch.omega_env();
    let tr_y = y * (we + 1.0 / we);

    let m_out = t / 2.0 + y - 0.5;
    let m_bar_out = t * (n_bar + 0.5) + (tr_y - 1.0) / 2.0;

    // Modulated input: Tr = 2 n_bar + 1 split so that the q/p output
    // variances level to a thermal state. delta is the noise-anisotropy
    // photon count (y/|tau|)(1/omega_env - omega_env).
    let delta = y / t * (1.0 / we - we);
    let tt = 2.0 * n_bar + 1.0;
    // Above threshold tt >= 1/omega_env + delta > delta, so both clamps
    // below only absorb round-off.
    let omega_bar_in = (((tt + delta) / (tt - delta)).max(0.0)).sqrt();
    let m_bar_in = 0.5 * ((tt * tt - delta * delta).max(0.0)).sqrt() - 0.5;

    Ok(CapacitySolution {
        regime: Regime::AboveThreshold,
        capacity_bits: g(m_bar_out) - g(m_out),
        omega_in: we,
        omega_bar_in,
        omega_out: we,
        omega_bar_out: 1.0,
        m_bar_in: m_bar_in.max(0.0),
        m_out,
        m_bar_out,
        beta_out: beta(m_out, we),
        beta_bar_out: beta(m_bar_out, 1.0),
        n_bar_out: m_bar_out,
        residual: 0.0,
    })
}

/// Output-side quantities of the below-threshold trial encoding at a given
/// input frequency.
struct TrialOutput {
    /// Common q-variance of bare and modulated output.
    q: f64,
    /// Modulated output p-variance.
    p_bar: f64,
    m_out: f64,
    m_bar_out: f64,
    omega_out: f64,
    omega_bar_out: f64,
}

fn trial_output(ch: &FiducialChannel, n_bar: f64, omega_in: f64) -> TrialOutput {
    let t = ch.tau().abs();
    let y = ch.y();
    let we = ch.omega_env();
    let q = t / (2.0 * omega_in) + y / we;
    let p = t * omega_in / 2.0 + y * we;
    let p_bar = t * (2.0 * n_bar + 1.0 - 1.0 / (2.0 * omega_in)) + y * we;
    TrialOutput {
        q,
        p_bar,
        m_out: (q * p).sqrt() - 0.5,
        m_bar_out: (q * p_bar).sqrt() - 0.5,
        omega_out: (p / q).sqrt(),
        omega_bar_out: (p_bar / q).sqrt(),
    }
}

/// Stationarity condition; NaN marks an infeasible trial point (negative
/// p-modulation, possible for `omega_in` between the formal lower bracket
/// bound and the zero-modulation frequency).
fn residual_raw(ch: &FiducialChannel, n_bar: f64, omega_in: f64) -> f64 {
    let out = trial_output(ch, n_bar, omega_in);
    if out.m_bar_out <= 0.0 || out.m_bar_out.is_nan() || out.m_out < 0.0 {
        return f64::NAN;
    }
    let lead =
        beta(out.m_bar_out, out.omega_bar_out) * (1.0 - out.omega_bar_out * out.omega_bar_out);
    // The bare output is pure only on the pure-loss floor at resonance,
    // where the co-factor (omega_in^2 - omega_out^2) vanishes too; the
    // product's limit is 0.
    let lag = if out.m_out == 0.0 {
        0.0
    } else {
        beta(out.m_out, out.omega_out) * (omega_in * omega_in - out.omega_out * out.omega_out)
    };
    lead - lag
}

/// The transcendental stationarity condition `F(omega_in)` whose root
/// fixes the below-threshold optimum.
///
/// Feasibility requires `omega_in > 1/(2 (2 n_bar + 1))` (reality of the
/// modulated input frequency) and a nonnegative p-modulation; both
/// violations report as domain errors on `omega_in`.
pub fn below_residual(omega_in: f64, ch: &FiducialChannel, n: &EnergyBudget) -> Result<f64> {
    if ch.tau() == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    if ch.omega_env() >= 1.0 {
        return Err(Error::Domain {
            what: "omega_env",
            value: ch.omega_env(),
        });
    }
    let n_bar = n.n_bar();
    if omega_in <= 0.0 || omega_in.is_nan() || 2.0 * (2.0 * n_bar + 1.0) * omega_in - 1.0 <= 0.0 {
        return Err(Error::Domain {
            what: "omega_in",
            value: omega_in,
        });
    }
    let f = residual_raw(ch, n_bar, omega_in);
    if f.is_nan() {
        return Err(Error::Domain {
            what: "omega_in",
            value: omega_in,
        });
    }
    Ok(f)
}

fn solution_below(
    ch: &FiducialChannel,
    n_bar: f64,
    omega_in: f64,
    residual: f64,
) -> CapacitySolution {
    let out = trial_output(ch, n_bar, omega_in);
    let m_out = out.m_out.max(0.0);
    let omega_bar_in = (2.0 * (2.0 * n_bar + 1.0) * omega_in - 1.0).sqrt();
    CapacitySolution {
        regime: Regime::BelowThreshold,
        capacity_bits: g(out.m_bar_out) - g(m_out),
        omega_in,
        omega_bar_in,
        omega_out: out.omega_out,
        omega_bar_out: out.omega_bar_out,
        m_bar_in: (omega_bar_in / (2.0 * omega_in) - 0.5).max(0.0),
        m_out,
        m_bar_out: out.m_bar_out,
        beta_out: beta(m_out, out.omega_out),
        beta_bar_out: beta(out.m_bar_out, out.omega_bar_out),
        n_bar_out: (out.q + out.p_bar - 1.0) / 2.0,
        residual,
    }
}

/// Below-threshold solver: sign scan + bisection on the stationarity
/// condition over `omega_in in (1/(2(2 n_bar + 1)), 1)`.
///
/// Requires `n.n_bar < energy_threshold(ch)`, `omega_env < 1`, `tau != 0`.
/// If the scan exposes several stationary points, the one with the largest
/// Holevo quantity wins and a warning is logged.
pub fn capacity_below(
    ch: &FiducialChannel,
    n: &EnergyBudget,
    cfg: &SolverConfig,
) -> Result<CapacitySolution> {
    cfg.validate()?;
    if ch.tau() == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    if ch.omega_env() >= 1.0 {
        return Err(Error::Domain {
            what: "omega_env",
            value: ch.omega_env(),
        });
    }
    let thr = energy_threshold(ch)?;
    let n_bar = n.n_bar();
    if n_bar >= thr {
        return Err(Error::WrongRegime {
            n_bar,
            threshold: thr,
            wanted_above: false,
        });
    }

    let lo = 1.0 / (2.0 * (2.0 * n_bar + 1.0)) + 1e-12;
    let hi = 1.0;
    let b = cfg.bracket_grid;
    let ratio = hi / lo;
    // Endpoint pinned exactly: at zero budget the only stationary point is
    // omega_in = 1 itself (zero modulation), which the scan must hit
    // bitwise for the exact-zero branch below to catch it.
    let grid: Vec<f64> = (0..b)
        .map(|i| {
            if i == b - 1 {
                hi
            } else {
                lo * ratio.powf(i as f64 / (b - 1) as f64)
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&w| residual_raw(ch, n_bar, w)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..b - 1 {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa.is_nan() || fb.is_nan() {
            continue;
        }
        if fa == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if fa * fb < 0.0 {
            roots.push(bisect(ch, n_bar, grid[i], grid[i + 1], fa, cfg)?);
        }
    }
    if vals[b - 1] == 0.0 {
        roots.push(grid[b - 1]);
    }

    if roots.is_empty() {
        return Err(Error::NoBracket {
            lo,
            hi,
            f_lo: vals.iter().copied().find(|v| !v.is_nan()),
            f_hi: vals.iter().rev().copied().find(|v| !v.is_nan()),
            points: b,
        });
    }
    if roots.len() > 1 {
        log::warn!(
            "stationarity condition has {} roots for tau={}, y={}, omega_env={}, n_bar={}; \
             keeping the one with the largest Holevo quantity",
            roots.len(),
            ch.tau(),
            ch.y(),
            ch.omega_env(),
            n_bar
        );
    }
    let best = roots
        .into_iter()
        .map(|w| solution_below(ch, n_bar, w, residual_raw(ch, n_bar, w)))
        .max_by(|a, b| a.capacity_bits.total_cmp(&b.capacity_bits))
        .expect("roots is non-empty");
    Ok(best)
}

fn bisect(
    ch: &FiducialChannel,
    n_bar: f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (a + b);
        if b - a < cfg.abs_tol {
            return Ok(mid);
        }
        let fm = residual_raw(ch, n_bar, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        width: b - a,
    })
}

/// Regime dispatch: degenerate (`tau = 0`), perfect channel, then
/// above/below by comparing the budget against [`energy_threshold`].
pub fn capacity(
    ch: &FiducialChannel,
    n: &EnergyBudget,
    cfg: &SolverConfig,
) -> Result<CapacitySolution> {
    if ch.tau() == 0.0 {
        return Ok(degenerate_solution(ch, n));
    }
    if ch.is_perfect() {
        // Zero threshold: always the closed form, with capacity g(n_bar).
        return capacity_above(ch, n);
    }
    let thr = energy_threshold(ch)?;
    if n.n_bar() >= thr {
        capacity_above(ch, n)
    } else {
        capacity_below(ch, n, cfg)
    }
}

/// `tau = 0`: the output is the environment state no matter the input, so
/// the capacity is zero. The encoding fields are filled with the natural
/// conventions (thermal modulated input, output = noise matrix) so sweeps
/// across `tau = 0` stay total.
fn degenerate_solution(ch: &FiducialChannel, n: &EnergyBudget) -> CapacitySolution {
    let y = ch.y();
    let we = ch.omega_env();
    // Output covariance is exactly Y: occupation y - 1/2 (y >= 1/2 from
    // the positivity floor at tau = 0), frequency omega_env.
    let m_out = (y - 0.5).max(0.0);
    CapacitySolution {
        regime: Regime::Degenerate,
        capacity_bits: 0.0,
        omega_in: we,
        omega_bar_in: 1.0,
        omega_out: we,
        omega_bar_out: we,
        m_bar_in: n.n_bar(),
        m_out,
        m_bar_out: m_out,
        beta_out: beta(m_out, we),
        beta_bar_out: beta(m_out, we),
        n_bar_out: (y * (we + 1.0 / we) - 1.0) / 2.0,
        residual: 0.0,
    }
}
