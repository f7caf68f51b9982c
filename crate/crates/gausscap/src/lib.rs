//! Gaussian capacity of single-mode phase-sensitive bosonic channels.
//!
//! A channel in this crate acts on a one-mode Gaussian state's covariance
//! matrix `V` as `V -> |tau| V + Y`, where `tau` is the transmissivity
//! (gain when `|tau| > 1`, phase-conjugating when negative) and
//! `Y = y diag(1/omega_env, omega_env)` is the squeezed environment
//! noise. Given a mean photon budget `n_bar` for the modulated input, the
//! crate computes the Gaussian capacity — the largest Holevo rate over
//! Gaussian encodings — together with the optimal encoding itself.
//!
//! The organizing fact is an energy threshold: above it
//! ([`Regime::AboveThreshold`]) the optimum is a closed form whose
//! modulated output is exactly thermal; below it the optimal input
//! frequency solves a transcendental equation handled by a bracketing
//! scan plus bisection. [`capacity`] dispatches between the two.
//!
//! Layered on top:
//!
//! * [`oracle`] — a brute-force grid maximizer over explicit Gaussian
//!   encodings; slow, order-of-magnitude independent of the solver, used
//!   to validate it.
//! * [`analysis`] — extrema and shape classification of the
//!   capacity-vs-`omega_env` curve, its small-`omega_env` Taylor
//!   coefficients, critical constants, and parameter sweeps.
//! * [`limits`] — closed forms for `tau -> +-inf` and infinite
//!   squeezing, channel concatenation, and the pipelining inequality.
//!
//! Covariance conventions: vacuum variance `1/2`, so a thermal state with
//! occupation `m` has `V = (m + 1/2) I`. All covariance matrices here are
//! diagonal; `omega > 1` environments are canonicalized to `1/omega` by a
//! quadrature swap recorded on the channel.
//!
//! Heavy scans (the oracle grid and parameter sweeps) run data-parallel
//! over rayon when the default `parallel` feature is enabled, and fall
//! back to equivalent sequential loops without it; results are bitwise
//! identical either way.

pub mod analysis;
pub mod capacity;
pub mod channel;
pub mod entropy;
pub mod error;
pub mod limits;
pub mod oracle;
pub mod state;

pub use analysis::{
    classify_scenario, critical_constants, extremum_residual, find_extrema, sweep_capacity,
    sweep_capacity_serial, taylor_coefficients, y_tilde, CriticalConstants, ExtremumKind,
    NoiseSpec, Scale, Scenario, ScenarioKind, SweepFamily, SweepParam, SweepRow, SweepTable,
    TaylorCoeffs, ThresholdMark,
};
pub use capacity::{
    capacity, energy_threshold, threshold_frequency, CapacitySolution, Regime, SolverConfig,
};
pub use channel::{apply_channel, normalize_channel, FiducialChannel};
pub use entropy::{beta, g, g_prime};
pub use error::{Error, Result};
pub use limits::{
    capacity_limit_squeeze, capacity_limit_tau_inf, compose, pipelining_check, LimitResult,
    PipelineReport,
};
pub use oracle::{grid_argmax, grid_capacity, grid_capacity_serial, EncodingPoint, GridSolution};
pub use state::{CovMat2, EnergyBudget, ModeState};
