//! Table and JSON emitters.
//!
//! Every number prints through [`sig12`], a fixed 12-significant-digit
//! projection under which parse-then-reformat is the identity: re-parsing
//! an emitted CSV and re-emitting it reproduces the bytes exactly. CSV uses
//! `,` as the delimiter, `.` as the decimal separator, LF line endings, and
//! a `status` column on sweep rows so failed points never leave silent
//! gaps. Non-finite values print as `inf`/`-inf`/`NaN` in CSV and become
//! `null` in JSON (which has no representation for them).

use gausscap::{
    CapacitySolution, ExtremumKind, Regime, Scenario, ScenarioKind, SweepParam, SweepTable,
};
use serde_json::{json, Map, Value};

use crate::zones::ZoneGrid;

/// Formats `x` at 12 significant digits. Non-finite values keep their
/// standard spellings (`inf`, `-inf`, `NaN`), which `f64::from_str`
/// round-trips.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// The same 12-digit projection as a JSON value; non-finite becomes null.
fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = sig12(x).parse().expect("sig12 emits parseable numbers");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::AboveThreshold => "AboveThreshold",
        Regime::BelowThreshold => "BelowThreshold",
        Regime::Degenerate => "Degenerate",
    }
}

pub fn scenario_name(k: ScenarioKind) -> &'static str {
    match k {
        ScenarioKind::Monotonic => "Monotonic",
        ScenarioKind::OneMaximum => "OneMaximum",
        ScenarioKind::Saddle => "Saddle",
        ScenarioKind::MaxThenMin => "MaxThenMin",
    }
}

fn extremum_name(k: ExtremumKind) -> &'static str {
    match k {
        ExtremumKind::Max => "Max",
        ExtremumKind::Min => "Min",
        ExtremumKind::Saddle => "Saddle",
    }
}

pub fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::Tau => "tau",
        SweepParam::Y => "y",
        SweepParam::MEnv => "m_env",
        SweepParam::OmegaEnv => "omega_env",
        SweepParam::NBar => "n_bar",
    }
}

/// Column order for a [`CapacitySolution`]; CSV headers and JSON row keys
/// both follow it.
pub const SOLUTION_FIELDS: [&str; 13] = [
    "regime",
    "capacity_bits",
    "omega_in",
    "omega_bar_in",
    "omega_out",
    "omega_bar_out",
    "m_bar_in",
    "m_out",
    "m_bar_out",
    "beta_out",
    "beta_bar_out",
    "n_bar_out",
    "residual",
];

fn solution_numbers(s: &CapacitySolution) -> [f64; 12] {
    [
        s.capacity_bits,
        s.omega_in,
        s.omega_bar_in,
        s.omega_out,
        s.omega_bar_out,
        s.m_bar_in,
        s.m_out,
        s.m_bar_out,
        s.beta_out,
        s.beta_bar_out,
        s.n_bar_out,
        s.residual,
    ]
}

fn solution_record(s: &CapacitySolution) -> Vec<String> {
    let mut rec = vec![regime_name(s.regime).to_string()];
    rec.extend(solution_numbers(s).iter().map(|&x| sig12(x)));
    rec
}

fn solution_object(s: &CapacitySolution) -> Value {
    let mut obj = Map::new();
    obj.insert("regime".into(), Value::String(regime_name(s.regime).into()));
    for (key, &x) in SOLUTION_FIELDS[1..].iter().zip(solution_numbers(s).iter()) {
        obj.insert((*key).into(), json_num(x));
    }
    Value::Object(obj)
}

/// Writes records as CSV with LF terminators; quoting only where needed,
/// so re-emitting parsed records is byte-stable.
fn csv_text<I, R, F>(records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = F>,
    F: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for record in records {
        w.write_record(record).expect("writing CSV to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing CSV to memory")).expect("CSV output is UTF-8")
}

fn json_text(payload: Value) -> String {
    let mut text = serde_json::to_string_pretty(&payload).expect("payload serializes");
    text.push('\n');
    text
}

pub fn solution_csv(s: &CapacitySolution) -> String {
    let header: Vec<String> = SOLUTION_FIELDS.iter().map(|f| f.to_string()).collect();
    csv_text([header, solution_record(s)])
}

pub fn solution_json(metadata: Value, s: &CapacitySolution) -> String {
    json_text(json!({ "metadata": metadata, "solution": solution_object(s) }))
}

/// Sweep CSV columns: the swept parameter's name and value, a `status`
/// column (`ok` or the row-level error message), the thirteen solution
/// fields (empty on error rows), and the table-level threshold mark
/// repeated on every row (empty when no threshold falls in range).
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut header = vec!["param".to_string(), "value".into(), "status".into()];
    header.extend(SOLUTION_FIELDS.iter().map(|f| f.to_string()));
    header.push("threshold_kind".into());
    header.push("threshold_value".into());
    let (thr_kind, thr_value) = match &table.threshold {
        Some(mark) => (mark.kind.clone(), sig12(mark.value)),
        None => (String::new(), String::new()),
    };
    let mut records = vec![header];
    for row in &table.rows {
        let mut rec = vec![param_name(table.param).to_string(), sig12(row.value)];
        match (&row.solution, &row.error) {
            (Some(sol), None) => {
                rec.push("ok".into());
                rec.extend(solution_record(sol));
            }
            (None, Some(err)) => {
                rec.push(err.clone());
                rec.extend(std::iter::repeat_n(String::new(), SOLUTION_FIELDS.len()));
            }
            _ => unreachable!("a sweep row carries exactly one of solution/error"),
        }
        rec.push(thr_kind.clone());
        rec.push(thr_value.clone());
        records.push(rec);
    }
    csv_text(records)
}

pub fn sweep_json(metadata: Value, table: &SweepTable) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("value".into(), json_num(row.value));
            match (&row.solution, &row.error) {
                (Some(sol), None) => {
                    obj.insert("status".into(), Value::String("ok".into()));
                    obj.insert("solution".into(), solution_object(sol));
                }
                (None, Some(err)) => {
                    obj.insert("status".into(), Value::String(err.clone()));
                    obj.insert("solution".into(), Value::Null);
                }
                _ => unreachable!("a sweep row carries exactly one of solution/error"),
            }
            Value::Object(obj)
        })
        .collect();
    let threshold = match &table.threshold {
        Some(mark) => json!({ "kind": mark.kind, "value": json_num(mark.value) }),
        None => Value::Null,
    };
    json_text(json!({
        "metadata": metadata,
        "param": param_name(table.param),
        "threshold": threshold,
        "rows": rows,
    }))
}

/// Scenario CSV: one row per extremum (ascending `omega_env`) with the
/// scenario label repeated; a single row with empty extremum columns when
/// the curve is monotonic.
pub fn scenario_csv(s: &Scenario) -> String {
    let header = vec![
        "scenario".to_string(),
        "extremum_index".into(),
        "omega_env".into(),
        "kind".into(),
    ];
    let name = scenario_name(s.kind).to_string();
    let mut records = vec![header];
    if s.extrema.is_empty() {
        records.push(vec![name, String::new(), String::new(), String::new()]);
    } else {
        for (i, (location, kind)) in s.extrema.iter().enumerate() {
            records.push(vec![
                name.clone(),
                i.to_string(),
                sig12(*location),
                extremum_name(*kind).to_string(),
            ]);
        }
    }
    csv_text(records)
}

pub fn scenario_json(metadata: Value, s: &Scenario) -> String {
    let extrema: Vec<Value> = s
        .extrema
        .iter()
        .map(|(location, kind)| {
            json!({ "omega_env": json_num(*location), "kind": extremum_name(*kind) })
        })
        .collect();
    json_text(json!({
        "metadata": metadata,
        "scenario": scenario_name(s.kind),
        "extrema": extrema,
    }))
}

/// Zone-raster CSV: `tau,y,scenario` rows, `tau`-major ascending.
pub fn zones_csv(grid: &ZoneGrid) -> String {
    let header = vec!["tau".to_string(), "y".into(), "scenario".into()];
    let mut records = vec![header];
    for cell in &grid.cells {
        records.push(vec![sig12(cell.tau), sig12(cell.y), cell.label.to_string()]);
    }
    csv_text(records)
}

pub fn zones_json(metadata: Value, grid: &ZoneGrid) -> String {
    let rows: Vec<Value> = grid
        .cells
        .iter()
        .map(|cell| {
            json!({
                "tau": json_num(cell.tau),
                "y": json_num(cell.y),
                "scenario": cell.label,
            })
        })
        .collect();
    json_text(json!({ "metadata": metadata, "rows": rows }))
}
