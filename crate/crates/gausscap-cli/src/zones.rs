//! Scenario raster over the `(tau, y)` plane at a fixed photon budget.
//!
//! Cell labels match [`gausscap::classify_scenario`] up to its saddle
//! tolerances, but the raster resolves the wedge `0 < tau < 2/sqrt(15)`,
//! `y >= y_c` with one fold-locus bisection per `tau` column instead of one
//! residual scan per cell: inside the wedge the scenario depends on `y`
//! only through its position relative to `y_tilde(tau, n_bar)` — within
//! [`gausscap::analysis::SADDLE_Y_TOL`] of it a saddle, below it
//! max-then-min, above it monotonic — so a whole column shares the single
//! bisection. Cells below the complete-positivity floor
//! `y >= |1 - tau| / 2` are labeled `Unphysical`.
//!
//! Columns run data-parallel when the `parallel` feature is on; row order
//! is `tau`-major ascending either way.

use gausscap::analysis::SADDLE_Y_TOL;
use gausscap::{critical_constants, y_tilde, EnergyBudget, ScenarioKind};

use crate::emit::scenario_name;
use crate::CliError;

/// One raster cell.
pub struct ZoneCell {
    pub tau: f64,
    pub y: f64,
    pub label: &'static str,
}

/// The rasterized plane, `tau`-major ascending, `y` ascending within a
/// column.
pub struct ZoneGrid {
    pub cells: Vec<ZoneCell>,
}

const UNPHYSICAL: &str = "Unphysical";

fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Labels one `tau` column. `y_c` and `tau_tilde_r` are the budget- and
/// environment-independent scenario boundaries, precomputed by the caller.
fn column(
    tau: f64,
    ys: &[f64],
    n_bar: f64,
    y_c: f64,
    tau_tilde_r: f64,
) -> gausscap::Result<Vec<&'static str>> {
    let floor = 0.5 * (1.0 - tau).abs();
    let wedge = tau > 0.0 && tau < tau_tilde_r;
    let fold = if wedge && ys.iter().any(|&y| y >= floor && y >= y_c) {
        y_tilde(tau, n_bar)?
    } else {
        None
    };
    Ok(ys
        .iter()
        .map(|&y| {
            if y < floor {
                UNPHYSICAL
            } else if tau <= 0.0 {
                scenario_name(ScenarioKind::Monotonic)
            } else if y < y_c {
                scenario_name(ScenarioKind::OneMaximum)
            } else if tau >= tau_tilde_r {
                scenario_name(ScenarioKind::Monotonic)
            } else {
                match fold {
                    Some(yt) if (y - yt).abs() <= SADDLE_Y_TOL => {
                        scenario_name(ScenarioKind::Saddle)
                    }
                    Some(yt) if y < yt => scenario_name(ScenarioKind::MaxThenMin),
                    _ => scenario_name(ScenarioKind::Monotonic),
                }
            }
        })
        .collect())
}

/// Rasterizes scenario labels over `[tau_lo, tau_hi] x [y_lo, y_hi]` at
/// fixed `n_bar`.
pub fn rasterize(
    tau_lo: f64,
    tau_hi: f64,
    tau_steps: usize,
    y_lo: f64,
    y_hi: f64,
    y_steps: usize,
    n_bar: f64,
) -> Result<ZoneGrid, CliError> {
    for (flag, value) in [
        ("--tau-lo", tau_lo),
        ("--tau-hi", tau_hi),
        ("--y-lo", y_lo),
        ("--y-hi", y_hi),
    ] {
        if !value.is_finite() {
            return Err(CliError::Invalid(format!(
                "{flag} must be finite, got {value}"
            )));
        }
    }
    for (flag, steps) in [("--tau-steps", tau_steps), ("--y-steps", y_steps)] {
        if steps < 2 {
            return Err(CliError::Invalid(format!(
                "{flag} must be at least 2, got {steps}"
            )));
        }
    }
    if tau_lo >= tau_hi {
        return Err(CliError::Invalid(format!(
            "--tau-lo must be below --tau-hi, got {tau_lo} >= {tau_hi}"
        )));
    }
    if y_lo >= y_hi {
        return Err(CliError::Invalid(format!(
            "--y-lo must be below --y-hi, got {y_lo} >= {y_hi}"
        )));
    }
    if y_lo < 0.0 {
        return Err(CliError::Invalid(format!(
            "--y-lo must be >= 0 (noise strengths are nonnegative), got {y_lo}"
        )));
    }
    let budget = EnergyBudget::new(n_bar)?;
    let n_bar = budget.n_bar();

    let taus = linear_grid(tau_lo, tau_hi, tau_steps);
    let ys = linear_grid(y_lo, y_hi, y_steps);
    // y_c and tau_tilde_r do not depend on the budget or environment
    // arguments; any valid budget recovers them.
    let consts = critical_constants(n_bar, 0.0);

    #[cfg(feature = "parallel")]
    let columns: gausscap::Result<Vec<Vec<&'static str>>> = {
        use rayon::prelude::*;
        taus.par_iter()
            .map(|&tau| column(tau, &ys, n_bar, consts.y_c, consts.tau_tilde_r))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let columns: gausscap::Result<Vec<Vec<&'static str>>> = taus
        .iter()
        .map(|&tau| column(tau, &ys, n_bar, consts.y_c, consts.tau_tilde_r))
        .collect();

    let mut cells = Vec::with_capacity(tau_steps * y_steps);
    for (tau, labels) in taus.iter().zip(columns?) {
        for (y, label) in ys.iter().zip(labels) {
            cells.push(ZoneCell {
                tau: *tau,
                y: *y,
                label,
            });
        }
    }
    Ok(ZoneGrid { cells })
}
