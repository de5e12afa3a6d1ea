use serde::Serialize;
use serde_json::json;

use super::{csv_bytes, json_bytes, md_table, round, unsupported, Format};
use crate::analysis::{PsSummary, TopEntry, WeightStat};
use crate::error::Result;
use crate::ingest::{Check, ValidationReport};
use crate::model::{Phase, PsId, SpsResult, Table4Row, UsStatus};

fn scope(check: &Check) -> (String, String) {
    (
        check.entity.map(|e| e.code().to_string()).unwrap_or_default(),
        check.ps.map(|p| p.to_string()).unwrap_or_default(),
    )
}

fn num(v: f64, decimals: usize) -> String {
    if v.is_finite() {
        format!("{v:.decimals$}")
    } else {
        String::new()
    }
}

/// Validation summary. Plain text (no format) lists only failures.
pub fn render_validation(report: &ValidationReport, format: Option<Format>) -> Result<Vec<u8>> {
    let failures: Vec<&Check> = report.failures().collect();
    let errata: Vec<&Check> = report.errata_hits().collect();
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let row = |c: &Check| {
        let (entity, ps) = scope(c);
        vec![
            c.id.name().to_string(),
            entity,
            ps,
            num(c.expected, 4),
            num(c.actual, 4),
            num(c.tolerance, 4),
            c.erratum.clone().unwrap_or_default(),
        ]
    };
    let header = ["check", "state", "ps", "expected", "actual", "tolerance", "erratum"];
    match format {
        None => {
            let mut out = format!(
                "validation {status}: {} checks, {} failures, {} covered by errata\n",
                report.checks.len(),
                failures.len(),
                errata.len()
            );
            for c in &failures {
                let (entity, ps) = scope(c);
                out.push_str(&format!(
                    "FAIL {} {entity} {ps}: expected {} actual {} (tolerance {})\n",
                    c.id.name(),
                    num(c.expected, 4),
                    num(c.actual, 4),
                    num(c.tolerance, 4)
                ));
            }
            Ok(out.into_bytes())
        }
        Some(Format::Md) => {
            let mut out = format!(
                "# Validation: {status}\n\n{} checks, {} failures outside the errata registry, {} covered by errata.\n",
                report.checks.len(),
                failures.len(),
                errata.len()
            );
            let align = [false, false, false, true, true, true, false];
            if !failures.is_empty() {
                out.push_str("\n## Failures\n\n");
                let rows: Vec<_> = failures.iter().map(|c| row(c)).collect();
                out.push_str(&md_table(&header, &align, &rows));
            }
            if !errata.is_empty() {
                out.push_str("\n## Known errata\n\n");
                let rows: Vec<_> = errata.iter().map(|c| row(c)).collect();
                out.push_str(&md_table(&header, &align, &rows));
            }
            Ok(out.into_bytes())
        }
        Some(Format::Json) => Ok(json_bytes(&json!({
            "status": status,
            "failures": failures.len(),
            "errata_hits": errata.len(),
            "checks": report.checks,
            "errata": report.errata,
        }))),
        Some(Format::Csv) => {
            let mut h = header.to_vec();
            h.insert(6, "passed");
            let rows: Vec<_> = report
                .checks
                .iter()
                .map(|c| {
                    let mut r = row(c);
                    r.insert(6, c.passed.to_string());
                    r
                })
                .collect();
            Ok(csv_bytes(&h, &rows))
        }
        Some(f @ Format::Svg) => Err(unsupported("validation report", f)),
    }
}

/// Mean/min/max/range/relative-range grid. Plain text uses one decimal.
pub fn render_stats(rows: &[PsSummary], format: Option<Format>) -> Result<Vec<u8>> {
    let cells = |s: &PsSummary, d: usize| {
        vec![
            s.ps_id.to_string(),
            format!("{:.d$}", s.mean),
            format!("{:.d$}", s.min),
            format!("{:.d$}", s.max),
            format!("{:.d$}", s.range),
            format!("{:.d$}", s.relative_range),
        ]
    };
    let header = ["ps", "mean", "min", "max", "range", "relative_range"];
    match format {
        None => {
            let mut out = header.join(" ") + "\n";
            for s in rows {
                out.push_str(&cells(s, 1).join(" "));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        Some(Format::Md) => {
            let table: Vec<_> = rows.iter().map(|s| cells(s, 1)).collect();
            let mut out = String::from("# Process statistics over the 50 states and DC\n\n");
            out.push_str(&md_table(&header, &[false, true, true, true, true, true], &table));
            Ok(out.into_bytes())
        }
        Some(Format::Json) => {
            let v: Vec<_> = rows
                .iter()
                .map(|s| {
                    json!({
                        "ps_id": s.ps_id.get(),
                        "mean": round(s.mean, 6),
                        "min": s.min,
                        "max": s.max,
                        "range": round(s.range, 6),
                        "relative_range": round(s.relative_range, 6),
                    })
                })
                .collect();
            Ok(json_bytes(&v))
        }
        Some(Format::Csv) => {
            let table: Vec<_> = rows.iter().map(|s| cells(s, 6)).collect();
            Ok(csv_bytes(&header, &table))
        }
        Some(f @ Format::Svg) => Err(unsupported("summary statistics", f)),
    }
}

/// Top-k list with relative differences.
pub fn render_top(ps: PsId, rows: &[TopEntry], format: Option<Format>) -> Result<Vec<u8>> {
    let cells = |i: usize, t: &TopEntry| {
        vec![
            (i + 1).to_string(),
            t.entity.code().to_string(),
            format!("{:.2}", t.value),
            format!("{:.2}", t.rel_diff),
        ]
    };
    let header = ["rank", "state", "value", "rel_diff"];
    let table: Vec<_> = rows.iter().enumerate().map(|(i, t)| cells(i, t)).collect();
    match format {
        None => {
            let mut out = format!("top {} for {ps}\n", rows.len());
            for r in &table {
                out.push_str(&r.join(" "));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        Some(Format::Md) => {
            let mut out = format!("# Highest {} states for {ps}\n\n", rows.len());
            out.push_str(&md_table(&header, &[true, false, true, true], &table));
            Ok(out.into_bytes())
        }
        Some(Format::Json) => {
            let v: Vec<_> = rows
                .iter()
                .map(|t| json!({"state": t.entity.code(), "value": t.value, "rel_diff": t.rel_diff}))
                .collect();
            Ok(json_bytes(&json!({"ps_id": ps.get(), "rows": v})))
        }
        Some(Format::Csv) => Ok(csv_bytes(&header, &table)),
        Some(f @ Format::Svg) => Err(unsupported("top list", f)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    pub method: &'static str,
    pub x: String,
    pub y: String,
    pub n: usize,
    pub value: f64,
}

pub fn render_correlation(c: &Correlation, format: Option<Format>) -> Result<Vec<u8>> {
    match format {
        None => Ok(format!("{} correlation of {} and {} (n = {}): {:.4}\n", c.method, c.x, c.y, c.n, c.value).into_bytes()),
        Some(Format::Md) => Ok(md_table(
            &["method", "x", "y", "n", "value"],
            &[false, false, false, true, true],
            &[vec![c.method.into(), c.x.clone(), c.y.clone(), c.n.to_string(), format!("{:.4}", c.value)]],
        )
        .into_bytes()),
        Some(Format::Json) => Ok(json_bytes(&json!({
            "method": c.method, "x": c.x, "y": c.y, "n": c.n, "value": round(c.value, 6),
        }))),
        Some(Format::Csv) => Ok(csv_bytes(
            &["method", "x", "y", "n", "value"],
            &[vec![c.method.into(), c.x.clone(), c.y.clone(), c.n.to_string(), format!("{:.6}", c.value)]],
        )),
        Some(f @ Format::Svg) => Err(unsupported("correlation", f)),
    }
}

fn zeroed_list(ids: &[PsId]) -> String {
    ids.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

fn us_label(status: &UsStatus) -> String {
    match status {
        UsStatus::Skipped => "skipped".into(),
        UsStatus::Derived => "derived".into(),
        UsStatus::Underivable { reason } => format!("underivable ({reason})"),
    }
}

/// Per-entity SPS, zeroed set and phase shares. `warning` stamps forced runs.
pub fn render_sps(result: &SpsResult, format: Format, warning: Option<&str>) -> Result<Vec<u8>> {
    let mut header = vec!["state", "sps", "zeroed"];
    header.extend(Phase::ALL.iter().map(|p| match p.column() {
        "maf" => "maf_pct",
        "sr" => "sr_pct",
        "nrfu" => "nrfu_pct",
        "dp" => "dp_pct",
        _ => "gq_pct",
    }));
    let rows: Vec<Vec<String>> = result
        .entities
        .iter()
        .map(|r| {
            let mut row = vec![r.entity.code().to_string(), format!("{:.4}", r.sps), zeroed_list(&r.zeroed)];
            row.extend(r.phase_pct.iter().map(|p| format!("{p:.2}")));
            row
        })
        .collect();
    match format {
        Format::Csv => {
            if let Some(w) = warning {
                header.push("warning");
                let rows: Vec<_> = rows
                    .into_iter()
                    .map(|mut r| {
                        r.push(w.to_string());
                        r
                    })
                    .collect();
                return Ok(csv_bytes(&header, &rows));
            }
            Ok(csv_bytes(&header, &rows))
        }
        Format::Json => {
            let entities: Vec<_> = result
                .entities
                .iter()
                .map(|r| {
                    let mut o = json!({
                        "state": r.entity.code(),
                        "sps": round(r.sps, 6),
                        "zeroed": r.zeroed.iter().map(|p| p.get()).collect::<Vec<_>>(),
                    });
                    for (p, v) in Phase::ALL.iter().zip(r.phase_pct) {
                        o[format!("{}_pct", p.column())] = json!(round(v, 6));
                    }
                    o
                })
                .collect();
            let mut doc = json!({
                "variant": result.config.label(),
                "config": result.config,
                "us": result.us_status,
                "rows": entities,
            });
            if let Some(w) = warning {
                doc["warning"] = json!(w);
            }
            Ok(json_bytes(&doc))
        }
        Format::Md => {
            let mut out = format!("# Summary Process Statistic (`{}`)\n\n", result.config.label());
            if let Some(w) = warning {
                out.push_str(&format!("> Warning: {w}\n\n"));
            }
            out.push_str(&format!("US: {}\n\n", us_label(&result.us_status)));
            out.push_str(&md_table(&header, &[false, true, false, true, true, true, true, true], &rows));
            Ok(out.into_bytes())
        }
        Format::Svg => Err(unsupported("SPS table", format)),
    }
}

/// Computed phase shares next to the published decomposition rows.
pub fn render_decomposition(result: &SpsResult, published: &[Table4Row], format: Format) -> Result<Vec<u8>> {
    let phases: Vec<&str> = Phase::ALL.iter().map(|p| p.column()).collect();
    let rows: Vec<Vec<String>> = published
        .iter()
        .filter_map(|t| {
            let c = result.get(t.entity)?;
            let mut row = vec![t.entity.code().to_string(), format!("{:.1}", t.sps), format!("{:.2}", c.sps)];
            for i in 0..phases.len() {
                row.push(format!("{:.1}", t.phase_pct[i]));
                row.push(format!("{:.1}", c.phase_pct[i]));
            }
            Some(row)
        })
        .collect();
    let mut header = vec!["state".to_string(), "sps_published".into(), "sps_computed".into()];
    for p in &phases {
        header.push(format!("{p}_published"));
        header.push(format!("{p}_computed"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    match format {
        Format::Md => {
            let mut out = format!(
                "# Phase contributions (`{}`)\n\nPublished rows next to the computed shares, in percent of SPS.\n\n",
                result.config.label()
            );
            let mut align = vec![false];
            align.extend(std::iter::repeat(true).take(header.len() - 1));
            out.push_str(&md_table(&header_refs, &align, &rows));
            Ok(out.into_bytes())
        }
        Format::Csv => Ok(csv_bytes(&header_refs, &rows)),
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    let obj: serde_json::Map<_, _> = header
                        .iter()
                        .zip(r)
                        .map(|(h, c)| (h.clone(), json!(c)))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            Ok(json_bytes(&v))
        }
        Format::Svg => Err(unsupported("decomposition", format)),
    }
}

/// Mean and range of scaled weights per PS.
pub fn render_weight_profile(stats: &[WeightStat], format: Format) -> Result<Vec<u8>> {
    let header = ["ps", "mean", "min", "max"];
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| vec![s.ps_id.to_string(), format!("{:.4}", s.mean), format!("{:.4}", s.min), format!("{:.4}", s.max)])
        .collect();
    match format {
        Format::Md => {
            let mut out = String::from("# Scaled weights by process statistic\n\n");
            out.push_str(&md_table(&header, &[false, true, true, true], &rows));
            Ok(out.into_bytes())
        }
        Format::Csv => Ok(csv_bytes(&header, &rows)),
        Format::Json => Ok(json_bytes(
            &stats
                .iter()
                .map(|s| json!({"ps_id": s.ps_id.get(), "mean": round(s.mean, 6), "min": round(s.min, 6), "max": round(s.max, 6)}))
                .collect::<Vec<_>>(),
        )),
        Format::Svg => Err(unsupported("weight profile", format)),
    }
}
