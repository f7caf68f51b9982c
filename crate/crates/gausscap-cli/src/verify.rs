//! Built-in self-check suite.
//!
//! Re-derives a table of frozen reference values (compiled into the binary,
//! so the check needs no data files and no network) and cross-checks the
//! closed-form/transcendental solver against the brute-force grid oracle on
//! a reduced parameter lattice. Prints one line per check and a summary;
//! any failure makes the command exit nonzero. The whole suite is
//! deterministic and finishes in seconds.

use std::time::Instant;

use gausscap::{
    capacity, capacity_limit_squeeze, critical_constants, energy_threshold, find_extrema,
    grid_capacity, sweep_capacity, threshold_frequency, y_tilde, EnergyBudget, ExtremumKind,
    FiducialChannel, NoiseSpec, Regime, Scale, SolverConfig, SweepFamily, SweepParam,
};
use serde_json::Value;

use crate::CliError;

/// The frozen reference table, compiled in from the library's golden file.
const GOLDEN_JSON: &str = include_str!("../../gausscap/tests/golden/values.json");

/// Gate on |solver - oracle| over the reduced lattice. The oracle's
/// discretization error at resolution 400 is below 1e-5 bits on these
/// channels; 1e-4 leaves an order of magnitude while still catching any
/// real formula defect.
const ORACLE_TOL_BITS: f64 = 1e-4;

/// Grid resolution for the oracle cross-check; fast enough to keep the
/// whole suite in seconds.
const ORACLE_RESOLUTION: usize = 400;

/// The oracle maximizes over a subset of encodings, so it can only
/// undershoot the capacity; this slack absorbs its final-refinement jitter.
const LOWER_BOUND_SLACK: f64 = 1e-9;

fn num(golden: &Value, key: &str) -> f64 {
    golden[key]
        .as_f64()
        .unwrap_or_else(|| panic!("golden key `{key}` is a number"))
}

fn channel(golden: &Value, key: &str) -> (FiducialChannel, EnergyBudget) {
    let class = &golden[key];
    let ch = FiducialChannel::from_y(num(class, "tau"), num(class, "y"), num(class, "omega_env"))
        .expect("golden channels are physical");
    let n = EnergyBudget::new(num(class, "n_bar")).expect("golden budgets are valid");
    (ch, n)
}

fn check_abs(failures: &mut Vec<String>, label: &str, got: f64, want: f64, tol: f64) {
    let gap = (got - want).abs();
    if gap > tol || gap.is_nan() {
        failures.push(format!(
            "{label}: got {got:.17e}, want {want:.17e} (tol {tol:.1e})"
        ));
    }
}

fn solve(ch: &FiducialChannel, n: &EnergyBudget) -> gausscap::Result<gausscap::CapacitySolution> {
    capacity(ch, n, &SolverConfig::default())
}

/// Runs the suite, printing one `check NN PASS|FAIL <name>` line per check.
pub fn run() -> Result<(), CliError> {
    let started = Instant::now();
    let golden: Value = serde_json::from_str(GOLDEN_JSON).expect("embedded reference table parses");
    let cfg = SolverConfig::default();

    let mut total = 0usize;
    let mut failed = 0usize;
    let mut report = |name: &str, note: Option<String>, failures: Vec<String>| {
        total += 1;
        let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
        match note {
            Some(note) => println!("check {total:02} {verdict} {name} ({note})"),
            None => println!("check {total:02} {verdict} {name}"),
        }
        for line in &failures {
            println!("    {line}");
        }
        if !failures.is_empty() {
            failed += 1;
        }
    };

    // 1: the noiseless channel attains the absolute ceiling g(n_bar).
    {
        let mut f = Vec::new();
        let ch = FiducialChannel::from_y(1.0, 0.0, 1.0).expect("perfect channel is physical");
        match solve(&ch, &EnergyBudget::new(1.0).expect("budget")) {
            Ok(sol) => {
                check_abs(&mut f, "capacity", sol.capacity_bits, 2.0, 1e-12);
                if sol.regime != Regime::AboveThreshold {
                    f.push(format!("regime {:?}, want AboveThreshold", sol.regime));
                }
            }
            Err(e) => f.push(format!("solver error: {e}")),
        }
        report("perfect channel reaches the noiseless ceiling", None, f);
    }

    // 2: energy threshold at the canonical squeezed-noise channel.
    {
        let mut f = Vec::new();
        let (ch, _) = channel(&golden, "canonical_channel");
        match energy_threshold(&ch) {
            Ok(thr) => check_abs(
                &mut f,
                "n_thr",
                thr,
                num(&golden, "energy_threshold_canonical"),
                1e-12,
            ),
            Err(e) => f.push(format!("threshold error: {e}")),
        }
        report("energy threshold at the canonical channel", None, f);
    }

    // 3: transcendental below-threshold solve at the canonical channel.
    {
        let mut f = Vec::new();
        let (ch, n) = channel(&golden, "canonical_channel");
        match solve(&ch, &n) {
            Ok(sol) => {
                check_abs(
                    &mut f,
                    "capacity",
                    sol.capacity_bits,
                    num(&golden, "capacity_below_canonical"),
                    1e-10,
                );
                check_abs(
                    &mut f,
                    "omega_in",
                    sol.omega_in,
                    num(&golden, "omega_in_canonical"),
                    1e-9,
                );
                if sol.regime != Regime::BelowThreshold {
                    f.push(format!("regime {:?}, want BelowThreshold", sol.regime));
                }
            }
            Err(e) => f.push(format!("solver error: {e}")),
        }
        report("below-threshold solve at the canonical channel", None, f);
    }

    // 4: closed-form above-threshold solve at a generous budget.
    {
        let mut f = Vec::new();
        let (ch, _) = channel(&golden, "canonical_channel");
        match solve(&ch, &EnergyBudget::new(3.0).expect("budget")) {
            Ok(sol) => check_abs(
                &mut f,
                "capacity",
                sol.capacity_bits,
                num(&golden, "capacity_above_canonical_n3"),
                1e-12,
            ),
            Err(e) => f.push(format!("solver error: {e}")),
        }
        report("closed-form solve above threshold", None, f);
    }

    // 5: deep-squeezing solve near omega_env = 0.
    {
        let mut f = Vec::new();
        let (ch, n) = channel(&golden, "small_squeeze_point");
        match solve(&ch, &n) {
            Ok(sol) => check_abs(
                &mut f,
                "capacity",
                sol.capacity_bits,
                num(&golden, "capacity_small_squeeze"),
                1e-10,
            ),
            Err(e) => f.push(format!("solver error: {e}")),
        }
        report("deep-squeezing solve near omega_env = 0", None, f);
    }

    // 6: small-omega_env Taylor coefficients and the sign cross-check.
    {
        let mut f = Vec::new();
        let reference = &golden["taylor_tau1_y01_n01"];
        match gausscap::taylor_coefficients(1.0, 0.1, 0.1) {
            Ok(t) => {
                check_abs(&mut f, "a", t.a, num(reference, "a"), 1e-12);
                check_abs(&mut f, "b", t.b, num(reference, "b"), 1e-12);
                check_abs(&mut f, "c", t.c, num(reference, "c"), 1e-12);
                check_abs(&mut f, "alpha", t.alpha, num(reference, "alpha"), 1e-12);
                check_abs(&mut f, "beta", t.beta_coef, num(reference, "beta"), 1e-12);
                if !t.sign_agrees {
                    f.push("closed-form slope sign disagrees with the solver".into());
                }
            }
            Err(e) => f.push(format!("expansion error: {e}")),
        }
        match gausscap::taylor_coefficients(-1.0, 1.2, 1.0) {
            Ok(t) => {
                let want = num(&golden, "a_sign_phase_conj_tau_m1_y12_n1");
                if t.a.signum() != want {
                    f.push(format!(
                        "sign(a) at tau=-1: got {}, want {want}",
                        t.a.signum()
                    ));
                }
            }
            Err(e) => f.push(format!("expansion error: {e}")),
        }
        report("capacity expansion about omega_env = 0", None, f);
    }

    // 7: the critical constants separating the scenario zones.
    {
        let mut f = Vec::new();
        let c = critical_constants(0.1, 1e-3);
        check_abs(&mut f, "y_c", c.y_c, 0.288675134594812882, 1e-12);
        check_abs(&mut f, "n_c", c.n_c, 0.357813451890045906, 1e-12);
        check_abs(&mut f, "m_c", c.m_c, 0.0969268178565439027, 1e-12);
        check_abs(&mut f, "tau_l", c.tau_l, 0.422649730810374235, 1e-12);
        check_abs(&mut f, "tau_r", c.tau_r, 1.57735026918962576, 1e-12);
        check_abs(
            &mut f,
            "tau_tilde_l",
            c.tau_tilde_l,
            0.365148371670110742,
            1e-12,
        );
        check_abs(
            &mut f,
            "tau_tilde_r",
            c.tau_tilde_r,
            0.516397779494322251,
            1e-12,
        );
        report("critical constants of the zone boundaries", None, f);
    }

    // 8: the fold locus where the two-extremum band closes.
    {
        let mut f = Vec::new();
        match y_tilde(0.3759, 0.1) {
            Ok(Some(yt)) => check_abs(
                &mut f,
                "y_tilde",
                yt,
                num(&golden, "y_tilde_tau03759_n01"),
                1e-6,
            ),
            Ok(None) => f.push("no fold found at tau = 0.3759".into()),
            Err(e) => f.push(format!("fold search error: {e}")),
        }
        report("fold locus of the two-extremum band", None, f);
    }

    // 9: extremum locations at three fixed probe channels (the probe `y`
    // values are part of the frozen inputs).
    {
        let mut f = Vec::new();
        let probes = [
            (
                0.41,
                0.295295,
                "tau=0.41",
                vec![
                    (num(&golden["extrema_tau041"], "min"), ExtremumKind::Min),
                    (num(&golden["extrema_tau041"], "max"), ExtremumKind::Max),
                ],
            ),
            (
                0.455,
                0.2727725,
                "tau=0.455",
                vec![(num(&golden, "extrema_tau0455_max"), ExtremumKind::Max)],
            ),
            (
                1.2,
                0.1001,
                "tau=1.2",
                vec![(num(&golden, "extrema_tau12_max"), ExtremumKind::Max)],
            ),
        ];
        for (tau, y, label, want) in probes {
            match find_extrema(tau, y, 0.1) {
                Ok(found) => {
                    if found.len() != want.len() {
                        f.push(format!(
                            "{label}: found {} extrema, want {}",
                            found.len(),
                            want.len()
                        ));
                        continue;
                    }
                    for ((loc, kind), (want_loc, want_kind)) in found.iter().zip(&want) {
                        if kind != want_kind {
                            f.push(format!("{label}: kind {kind:?}, want {want_kind:?}"));
                        }
                        check_abs(&mut f, label, *loc, *want_loc, 1e-7);
                    }
                }
                Err(e) => f.push(format!("{label}: {e}")),
            }
        }
        report("extremum locations at the frozen probes", None, f);
    }

    // 10: the infinite-squeezing ceiling log2(1 + 2 n_bar).
    {
        let mut f = Vec::new();
        check_abs(
            &mut f,
            "limit",
            capacity_limit_squeeze(1.0),
            3f64.log2(),
            1e-12,
        );
        report("infinite-squeezing ceiling", None, f);
    }

    // 11: solver vs brute-force oracle on the reduced lattice.
    {
        let mut f = Vec::new();
        let mut worst: f64 = 0.0;
        for tau in [-1.0f64, 0.5, 2.0] {
            for noise_factor in [1.0, 1.7, 2.6] {
                for omega_env in [0.25, 0.6, 1.0] {
                    for n_bar in [0.1, 2.0] {
                        let label = format!(
                            "tau={tau}, y/floor={noise_factor}, omega_env={omega_env}, \
                             n_bar={n_bar}"
                        );
                        let y = 0.5 * (1.0 - tau).abs() * noise_factor;
                        let n = EnergyBudget::new(n_bar).expect("budget");
                        let sol = match FiducialChannel::from_y(tau, y, omega_env)
                            .and_then(|ch| capacity(&ch, &n, &cfg))
                        {
                            Ok(sol) => sol,
                            Err(e) => {
                                f.push(format!("{label}: {e}"));
                                continue;
                            }
                        };
                        let ch = FiducialChannel::from_y(tau, y, omega_env).expect("validated");
                        let grid = grid_capacity(&ch, &n, ORACLE_RESOLUTION);
                        let gap = (sol.capacity_bits - grid).abs();
                        worst = worst.max(gap);
                        if gap > ORACLE_TOL_BITS {
                            f.push(format!(
                                "{label}: solver {} vs oracle {grid} (gap {gap:.3e})",
                                sol.capacity_bits
                            ));
                        }
                        if grid > sol.capacity_bits + LOWER_BOUND_SLACK {
                            f.push(format!(
                                "{label}: oracle exceeds the solver by {:.3e}",
                                grid - sol.capacity_bits
                            ));
                        }
                    }
                }
            }
        }
        report(
            "solver matches the brute-force oracle on the reduced lattice",
            Some(format!("worst gap {worst:.2e} bits over 54 channels")),
            f,
        );
    }

    // 12: sweep ordering and the threshold-frequency mark.
    {
        let mut f = Vec::new();
        let family = SweepFamily {
            param: SweepParam::OmegaEnv,
            lo: 0.01,
            hi: 1.0,
            steps: 50,
            scale: Scale::Linear,
            tau: -1.0,
            noise: NoiseSpec::MEnv(0.1),
            omega_env: 1.0,
            n_bar: 1.0,
        };
        match sweep_capacity(&family, &cfg) {
            Ok(table) => {
                if table.rows.len() != 50 {
                    f.push(format!("{} rows, want 50", table.rows.len()));
                }
                if !table.rows.windows(2).all(|w| w[0].value < w[1].value) {
                    f.push("row values are not strictly ascending".into());
                }
                if let Some(bad) = table.rows.iter().find(|r| r.solution.is_none()) {
                    f.push(format!(
                        "row at {} failed: {}",
                        bad.value,
                        bad.error.as_deref().unwrap_or("?")
                    ));
                }
                match &table.threshold {
                    Some(mark) => {
                        if mark.kind != "omega_thr" {
                            f.push(format!("mark kind `{}`, want omega_thr", mark.kind));
                        }
                        // y = |1 - (-1)| (0.1 + 1/2) = 1.2 at tau = -1.
                        match threshold_frequency(-1.0, 1.2, 1.0) {
                            Ok(thr) => {
                                check_abs(&mut f, "mark", mark.value, thr, 1e-12);
                                check_abs(&mut f, "omega_thr", mark.value, 0.59, 5e-3);
                            }
                            Err(e) => f.push(format!("threshold error: {e}")),
                        }
                    }
                    None => f.push("no threshold mark inside (0.01, 1)".into()),
                }
            }
            Err(e) => f.push(format!("sweep error: {e}")),
        }
        report("sweep ordering and threshold mark", None, f);
    }

    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "verify: {}/{total} checks passed in {elapsed:.2} s",
        total - failed
    );
    if failed > 0 {
        Err(CliError::Verify { failed, total })
    } else {
        Ok(())
    }
}
