//! End-to-end tests of the `gausscap` binary: the documented invocation
//! examples, output-format contracts (CSV round trip, JSON metadata), exit
//! codes, and the worker-thread cap.

use std::process::{Command, Output};

fn run_with<F: FnOnce(&mut Command)>(args: &[&str], configure: F) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gausscap"));
    cmd.args(args).env_remove("GAUSSCAP_THREADS");
    configure(&mut cmd);
    cmd.output().expect("binary launches")
}

fn run(args: &[&str]) -> Output {
    run_with(args, |_| {})
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "exit {:?} for {args:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn run_err(args: &[&str]) -> (i32, String) {
    let out = run(args);
    let code = out.status.code().expect("no signal");
    assert_ne!(code, 0, "expected failure for {args:?}");
    (code, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    rdr.records()
        .map(|r| r.expect("CSV parses").iter().map(str::to_string).collect())
        .collect()
}

/// The emitted-CSV contract: re-parsing and re-emitting reproduces the
/// bytes, and every numeric field is a fixed point of the 12-significant-
/// digit projection.
fn assert_csv_round_trip(text: &str, check_numbers: bool) {
    let records = parse_csv(text);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for record in &records {
        w.write_record(record).expect("re-emit");
    }
    let reemitted = String::from_utf8(w.into_inner().expect("flush")).expect("UTF-8");
    assert_eq!(text, reemitted, "re-emitted CSV differs from the original");
    if !check_numbers {
        return;
    }
    for record in records.iter().skip(1) {
        for field in record {
            if let Ok(x) = field.parse::<f64>() {
                assert_eq!(
                    &format!("{x:.11e}"),
                    field,
                    "numeric field is not a fixed point of the 12-digit projection"
                );
            }
        }
    }
}

#[test]
fn help_lists_every_subcommand() {
    let text = run_ok(&["--help"]);
    for sub in ["capacity", "sweep", "classify", "zones", "verify"] {
        assert!(text.contains(sub), "--help does not mention `{sub}`");
    }
}

#[test]
fn perfect_channel_capacity_matches_the_noiseless_bound() {
    let text = run_ok(&[
        "capacity",
        "--tau",
        "1",
        "--m-env",
        "0",
        "--omega-env",
        "1",
        "--n-bar",
        "1",
    ]);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "regime");
    assert_eq!(rows[1][0], "AboveThreshold");
    let bits: f64 = rows[1][1].parse().expect("capacity_bits parses");
    assert!((bits - 2.0).abs() <= 1e-12, "capacity {bits}");
    assert_csv_round_trip(&text, true);
}

#[test]
fn sweep_marks_the_threshold_frequency() {
    let text = run_ok(&[
        "sweep",
        "--param",
        "omega-env",
        "--lo",
        "0.01",
        "--hi",
        "1",
        "--steps",
        "200",
        "--tau",
        "-1",
        "--m-env",
        "0.1",
        "--n-bar",
        "1",
    ]);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 201, "header plus one row per step");
    let header = &rows[0];
    assert_eq!(header[0], "param");
    assert_eq!(header[16], "threshold_kind");
    let mut previous = f64::NEG_INFINITY;
    for row in &rows[1..] {
        assert_eq!(row[0], "omega_env");
        assert_eq!(row[2], "ok", "row at {} failed: {}", row[1], row[2]);
        let value: f64 = row[1].parse().expect("swept value parses");
        assert!(value > previous, "rows are not ascending");
        previous = value;
        assert_eq!(row[16], "omega_thr");
        let mark: f64 = row[17].parse().expect("threshold parses");
        assert!((mark - 0.59).abs() <= 5e-3, "threshold mark {mark}");
        // The mark is the threshold frequency of the fixed channel
        // y = |1 - (-1)| (0.1 + 1/2) = 1.2 at n_bar = 1.
        let expected = gausscap::threshold_frequency(-1.0, 1.2, 1.0).expect("threshold");
        assert!((mark - expected).abs() <= 1e-12);
    }
}

#[test]
fn classification_finds_the_engineered_saddle() {
    let text = run_ok(&[
        "classify", "--tau", "0.3759", "--m-env", "0.001", "--n-bar", "0.1",
    ]);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "Saddle");
    assert_eq!(rows[1][3], "Saddle");
    let location: f64 = rows[1][2].parse().expect("location parses");
    assert!(
        location > 0.1 && location < 0.9,
        "saddle at boundary: {location}"
    );
    assert_csv_round_trip(&text, false);
}

#[test]
fn classification_lists_both_extrema_of_the_band() {
    let text = run_ok(&[
        "classify", "--tau", "0.41", "--y", "0.295295", "--n-bar", "0.1",
    ]);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 3, "one row per extremum:\n{text}");
    assert_eq!(rows[1][0], "MaxThenMin");
    assert_eq!(rows[1][3], "Min");
    assert_eq!(rows[2][3], "Max");
    let min_at: f64 = rows[1][2].parse().expect("location parses");
    let max_at: f64 = rows[2][2].parse().expect("location parses");
    assert!((min_at - 0.0959).abs() <= 1e-3, "minimum at {min_at}");
    assert!((max_at - 0.5904).abs() <= 1e-3, "maximum at {max_at}");
}

#[test]
fn emitted_csv_reparses_and_reemits_byte_identically() {
    // A sweep across the complete-positivity floor: the low rows carry
    // quoted error messages in the status column, the high rows real
    // solutions, and every row the threshold columns.
    let text = run_ok(&[
        "sweep",
        "--param",
        "y",
        "--lo",
        "0.2",
        "--hi",
        "0.8",
        "--steps",
        "7",
        "--tau",
        "2",
        "--omega-env",
        "0.5",
        "--n-bar",
        "1",
    ]);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 8);
    assert!(
        rows[1][2].contains("complete-positivity"),
        "sub-floor row must name the violated constraint, got `{}`",
        rows[1][2]
    );
    assert!(
        rows[1][3].is_empty(),
        "error rows leave solution fields empty"
    );
    assert_eq!(rows[7][2], "ok");
    assert_csv_round_trip(&text, true);

    // Budget sweep across the energy threshold: both regimes in one table.
    let text = run_ok(&[
        "sweep",
        "--param",
        "n-bar",
        "--lo",
        "0.5",
        "--hi",
        "4",
        "--steps",
        "8",
        "--tau",
        "1",
        "--y",
        "0.1",
        "--omega-env",
        "0.2",
    ]);
    let rows = parse_csv(&text);
    let regimes: Vec<&str> = rows[1..].iter().map(|r| r[3].as_str()).collect();
    assert!(regimes.contains(&"BelowThreshold") && regimes.contains(&"AboveThreshold"));
    assert_eq!(rows[1][16], "n_thr");
    assert_csv_round_trip(&text, true);
}

#[test]
fn json_payload_carries_metadata_and_nulls_nonfinite() {
    let text = run_ok(&[
        "capacity", "--tau", "1", "--y", "0", "--n-bar", "1", "--format", "json",
    ]);
    let payload: serde_json::Value = serde_json::from_str(&text).expect("JSON parses");
    assert_eq!(payload["metadata"]["tool"], "gausscap");
    assert_eq!(payload["metadata"]["version"], env!("CARGO_PKG_VERSION"));
    let config = &payload["metadata"]["config"];
    assert_eq!(config["command"], "capacity");
    assert_eq!(config["n_bar"], 1.0);
    assert_eq!(config["y"], 0.0);
    assert!(config["m_env"].is_null());
    let solution = &payload["solution"];
    assert_eq!(solution["regime"], "AboveThreshold");
    assert!((solution["capacity_bits"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    // The bare output is pure, so its inverse temperature is +inf -> null.
    assert!(solution["beta_out"].is_null());
}

#[test]
fn sweep_json_includes_threshold_and_rows() {
    let text = run_ok(&[
        "sweep",
        "--param",
        "omega-env",
        "--lo",
        "0.3",
        "--hi",
        "0.9",
        "--steps",
        "4",
        "--tau",
        "-1",
        "--m-env",
        "0.1",
        "--n-bar",
        "1",
        "--format",
        "json",
    ]);
    let payload: serde_json::Value = serde_json::from_str(&text).expect("JSON parses");
    assert_eq!(payload["param"], "omega_env");
    assert_eq!(payload["threshold"]["kind"], "omega_thr");
    let mark = payload["threshold"]["value"].as_f64().unwrap();
    assert!((mark - 0.59).abs() <= 5e-3);
    let rows = payload["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["status"], "ok");
        assert!(row["solution"]["capacity_bits"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn invalid_parameters_exit_2_naming_the_constraint() {
    let (code, stderr) = run_err(&["capacity", "--tau", "2", "--y", "0.1", "--n-bar", "1"]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("complete-positivity"), "{stderr}");

    let (code, stderr) = run_err(&[
        "capacity", "--tau", "1", "--m-env", "0.1", "--y", "0.2", "--n-bar", "1",
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(
        stderr.contains("--m-env") && stderr.contains("--y"),
        "{stderr}"
    );

    let (code, stderr) = run_err(&["capacity", "--tau", "1", "--n-bar", "1"]);
    assert_eq!(code, 2, "{stderr}");

    let (code, stderr) = run_err(&["capacity", "--tau", "1", "--y", "0.1", "--n-bar=-1"]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("n_bar"), "{stderr}");
}

#[test]
fn solver_failure_exits_3_with_diagnostics() {
    let (code, stderr) = run_err(&[
        "capacity",
        "--tau",
        "1",
        "--y",
        "0.1",
        "--omega-env",
        "0.2",
        "--n-bar",
        "1",
        "--max-iter",
        "1",
    ]);
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("bisection"), "{stderr}");
    assert!(stderr.contains("iteration"), "{stderr}");
}

#[test]
fn sweeping_a_fixed_parameter_is_rejected() {
    let (code, stderr) = run_err(&[
        "sweep", "--param", "tau", "--lo", "0.1", "--hi", "1", "--steps", "5", "--tau", "1", "--y",
        "0.1", "--n-bar", "1",
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("--tau"), "{stderr}");

    let (code, stderr) = run_err(&[
        "sweep", "--param", "m-env", "--lo", "0.1", "--hi", "1", "--steps", "5", "--tau", "1",
        "--y", "0.1", "--n-bar", "1",
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("--m-env/--y"), "{stderr}");

    // The budget has no default: omitting it must be rejected, not guessed.
    let (code, stderr) = run_err(&[
        "sweep",
        "--param",
        "omega-env",
        "--lo",
        "0.1",
        "--hi",
        "1",
        "--steps",
        "5",
        "--tau",
        "1",
        "--y",
        "0.1",
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("--n-bar"), "{stderr}");
}

#[test]
fn zone_raster_labels_the_plane_deterministically() {
    let args = [
        "zones",
        "--tau-lo",
        "0.3",
        "--tau-hi",
        "1.2",
        "--tau-steps",
        "4",
        "--y-lo",
        "0.1",
        "--y-hi",
        "0.45",
        "--y-steps",
        "4",
        "--n-bar",
        "0.1",
    ];
    let text = run_ok(&args);
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 17, "header plus 4 x 4 cells");
    let label = |tau: &str, y: &str| {
        rows[1..]
            .iter()
            .find(|r| r[0].starts_with(tau) && r[1].starts_with(y))
            .unwrap_or_else(|| panic!("no cell ({tau}, {y})"))[2]
            .clone()
    };
    // Below the floor y >= |1 - tau|/2 = 0.35 at tau = 0.3.
    assert_eq!(label("3.0", "1.0"), "Unphysical");
    // Weak noise, positive tau: the single-maximum zone.
    assert_eq!(label("9.0", "1.0"), "OneMaximum");
    // Strong noise at tau above 2/sqrt(15): monotonic.
    assert_eq!(label("1.2", "4.5"), "Monotonic");
    for row in &rows[1..] {
        assert!(
            [
                "Unphysical",
                "Monotonic",
                "OneMaximum",
                "Saddle",
                "MaxThenMin"
            ]
            .contains(&row[2].as_str()),
            "unknown label {}",
            row[2]
        );
    }
    assert_csv_round_trip(&text, true);
    assert_eq!(text, run_ok(&args), "raster is not deterministic");
}

#[test]
fn verify_reports_every_check_passing() {
    let text = run_ok(&["verify"]);
    assert!(text.contains("12/12 checks passed"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn thread_cap_is_validated_and_preserves_results() {
    let args = [
        "sweep",
        "--param",
        "omega-env",
        "--lo",
        "0.05",
        "--hi",
        "1",
        "--steps",
        "40",
        "--tau",
        "0.8",
        "--m-env",
        "0.2",
        "--n-bar",
        "0.5",
    ];
    let baseline = run_ok(&args);
    let capped = run_with(&args, |cmd| {
        cmd.env("GAUSSCAP_THREADS", "1");
    });
    assert!(capped.status.success());
    assert_eq!(
        baseline,
        String::from_utf8(capped.stdout).unwrap(),
        "worker count changed the output"
    );

    let bad = run_with(&["verify"], |cmd| {
        cmd.env("GAUSSCAP_THREADS", "abc");
    });
    assert_eq!(bad.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&bad.stderr).contains("GAUSSCAP_THREADS"),
        "the message must name the variable"
    );
}

#[test]
fn output_flag_writes_the_table_to_a_file() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("capacity.csv");
    let args = [
        "capacity",
        "--tau",
        "0.5",
        "--m-env",
        "0.3",
        "--omega-env",
        "0.7",
        "--n-bar",
        "2",
    ];
    let stdout_text = run_ok(&args);
    let mut file_args: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    file_args.extend(["--output", path_str]);
    let silent = run_ok(&file_args);
    assert!(silent.is_empty(), "file mode must not also print the table");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout_text);

    let (code, stderr) = run_err(&[
        "capacity",
        "--tau",
        "1",
        "--y",
        "0",
        "--n-bar",
        "1",
        "--output",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("cannot write"), "{stderr}");
}
