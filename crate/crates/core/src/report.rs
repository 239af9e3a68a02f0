//! Machine-readable emission of series, wall events, scenario reports, and
//! oracle tables.
//!
//! JSON documents are built on sorted-key maps and rendered by one function,
//! so parsing an emitted file and re-rendering it is byte identical.  CSV
//! columns never contain separators; curve coordinates are joined with `:`.

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::oracles::VariableMap;
use crate::series::{ConeSeries, Mismatch};
use crate::wallcross::{ScenarioReport, WallEvent};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Canonical rendering of every JSON document this crate emits.
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory value serializes");
    text.push('\n');
    text
}

fn int_part(value: &num_bigint::BigInt, what: &str) -> Result<i64> {
    value.to_i64().ok_or_else(|| {
        Error::Range(format!("{what} {value} does not fit a 64-bit report field"))
    })
}

fn rat_json(q: &Rat) -> Result<Value> {
    Ok(json!({
        "num": int_part(q.numer(), "numerator")?,
        "den": int_part(q.denom(), "denominator")?,
    }))
}

fn beta_csv(beta: &[i64]) -> String {
    beta.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn term_records(series: &ConeSeries) -> Result<Vec<Value>> {
    series
        .box_terms()
        .into_iter()
        .map(|(n, beta, c)| {
            Ok(json!({
                "n": n,
                "beta": beta,
                "num": int_part(c.numer(), "numerator")?,
                "den": int_part(c.denom(), "denominator")?,
            }))
        })
        .collect()
}

/// Series document: model, box, and the sorted in-box coefficient records.
pub fn series_json(series: &ConeSeries) -> Result<Value> {
    Ok(json!({
        "model": series.model().name,
        "box": [series.truncation().n_max(), series.truncation().m_max()],
        "terms": term_records(series)?,
    }))
}

/// Series table with header `n,beta,num,den`.
pub fn series_csv(series: &ConeSeries) -> String {
    let mut out = String::from("n,beta,num,den\n");
    for (n, beta, c) in series.box_terms() {
        out.push_str(&format!("{n},{},{},{}\n", beta_csv(&beta), c.numer(), c.denom()));
    }
    out
}

fn mismatch_json(mm: &Mismatch) -> Result<Value> {
    Ok(json!({
        "n": mm.n,
        "beta": mm.beta,
        "left": rat_json(&mm.left)?,
        "right": rat_json(&mm.right)?,
    }))
}

/// Wall event array: exact rational times, the product-side classes, and
/// the crossing sign.
pub fn wall_events_json(events: &[WallEvent]) -> Result<Value> {
    let rows = events
        .iter()
        .map(|ev| {
            Ok(json!({
                "t_num": int_part(ev.t_star.numer(), "wall time numerator")?,
                "t_den": int_part(ev.t_star.denom(), "wall time denominator")?,
                "classes": ev
                    .multiples
                    .iter()
                    .map(|v| json!({"n": v.n, "beta": v.beta}))
                    .collect::<Vec<_>>(),
                "epsilon": ev.epsilon,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

/// Wall event table with one row per class: `t_num,t_den,n,beta,epsilon`.
pub fn wall_events_csv(events: &[WallEvent]) -> String {
    let mut out = String::from("t_num,t_den,n,beta,epsilon\n");
    for ev in events {
        for v in &ev.multiples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                ev.t_star.numer(),
                ev.t_star.denom(),
                v.n,
                beta_csv(&v.beta),
                ev.epsilon
            ));
        }
    }
    out
}

/// Scenario document: `{scenario, box, status, first_mismatch?, series, notes}`.
pub fn scenario_json(report: &ScenarioReport) -> Result<Value> {
    let mut doc = serde_json::Map::new();
    doc.insert("scenario".into(), json!(report.scenario));
    doc.insert("box".into(), json!([report.box_n, report.box_m]));
    doc.insert(
        "status".into(),
        json!(if report.passed { "pass" } else { "fail" }),
    );
    if let Some(mm) = &report.first_mismatch {
        doc.insert("first_mismatch".into(), mismatch_json(mm)?);
    }
    doc.insert("series".into(), Value::Array(term_records(&report.series)?));
    doc.insert("notes".into(), json!(report.notes));
    Ok(Value::Object(doc))
}

/// Scenario summary plus the series table; notes become comment lines.
pub fn scenario_csv(report: &ScenarioReport) -> String {
    let mut out = format!(
        "# scenario {} box {} {} status {}\n",
        report.scenario,
        report.box_n,
        report.box_m,
        if report.passed { "pass" } else { "fail" }
    );
    for note in &report.notes {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str(&series_csv(&report.series));
    out
}

/// Plane partition table `[{n, count}]`.
pub fn plane_json(counts: &[u64]) -> Value {
    Value::Array(
        counts
            .iter()
            .enumerate()
            .map(|(n, c)| json!({"n": n, "count": c}))
            .collect(),
    )
}

/// Plane partition table with header `n,count`.
pub fn plane_csv(counts: &[u64]) -> String {
    let mut out = String::from("n,count\n");
    for (n, c) in counts.iter().enumerate() {
        out.push_str(&format!("{n},{c}\n"));
    }
    out
}

/// Pyramid bucket table `[{w, b, count}]`.
pub fn pyramid_json(buckets: &BTreeMap<(u32, u32), u64>) -> Value {
    Value::Array(
        buckets
            .iter()
            .map(|((w, b), c)| json!({"w": w, "b": b, "count": c}))
            .collect(),
    )
}

/// Pyramid bucket table with header `w,b,count`.
pub fn pyramid_csv(buckets: &BTreeMap<(u32, u32), u64>) -> String {
    let mut out = String::from("w,b,count\n");
    for ((w, b), c) in buckets {
        out.push_str(&format!("{w},{b},{c}\n"));
    }
    out
}

/// Fitted dictionary document with the rendered formula.
pub fn variable_map_json(map: &VariableMap) -> Value {
    json!({
        "n_row": map.n_row,
        "m_row": map.m_row,
        "sign_rule": map.sign_rule,
        "rendered": map.to_string(),
    })
}
