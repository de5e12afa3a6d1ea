use serde_json::json;

use super::{csv_bytes, json_bytes, md_table, round, unsupported, Format};
use crate::aggregate::ReconciliationReport;
use crate::error::Result;
use crate::model::UsStatus;

/// Marker placed on the best variant's summary row.
pub const BEST_MARKER: &str = "(best)";

fn us_note(status: &UsStatus) -> String {
    match status {
        UsStatus::Skipped => "skipped".into(),
        UsStatus::Derived => "derived".into(),
        UsStatus::Underivable { reason } => format!("underivable: {reason}"),
    }
}

fn al_for(report: &ReconciliationReport, label: &str) -> Option<f64> {
    report
        .al_anomaly
        .computed
        .iter()
        .find(|(l, _)| l == label)
        .map(|(_, v)| *v)
}

fn render_md(report: &ReconciliationReport) -> Vec<u8> {
    let summary: Vec<Vec<String>> = report
        .variants
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vec![
                format!("`{}`", v.label),
                format!("{:.3}", v.max_abs_delta),
                format!("{:.3}", v.mean_abs_delta),
                format!("{:.4}", v.spearman),
                al_for(report, &v.label).map(|a| format!("{a:.3}")).unwrap_or_default(),
                us_note(&v.us_status),
                if i == report.best { BEST_MARKER.into() } else { String::new() },
            ]
        })
        .collect();

    let best = report.best_variant();
    let deviations: Vec<Vec<String>> = best
        .deviations
        .iter()
        .map(|d| {
            vec![
                d.entity.code().to_string(),
                format!("{:.2}", d.published),
                format!("{:.3}", d.computed),
                format!("{:+.3}", d.delta),
            ]
        })
        .collect();
    let worst: Vec<String> = best
        .worst
        .iter()
        .map(|d| format!("{} ({:+.3})", d.entity.code(), d.delta))
        .collect();

    let a = &report.al_anomaly;
    let mut out = String::from("# SPS reconciliation\n\n");
    out.push_str("Computed SPS against the published SPS column over the 50 states and DC.\n\n");
    out.push_str(&md_table(
        &["Variant", "max abs delta", "mean abs delta", "Spearman", "AL computed", "US", "Selected"],
        &[false, true, true, true, true, false, false],
        &summary,
    ));
    out.push_str("\n## Alabama anomaly\n\n");
    out.push_str(&format!(
        "The published SPS column gives AL {:.2}, while the step-by-step weighting example arrives at {:.2}. \
         No variant in this grid can match both.\n\n",
        a.published, a.worked_example
    ));
    out.push_str(&format!(
        "## Deviations under `{}`\n\nLargest: {}\n\n",
        best.label,
        worst.join(", ")
    ));
    out.push_str(&md_table(
        &["State", "Published", "Computed", "Delta"],
        &[false, true, true, true],
        &deviations,
    ));
    out.into_bytes()
}

fn render_json(report: &ReconciliationReport) -> Vec<u8> {
    let variants: Vec<_> = report
        .variants
        .iter()
        .map(|v| {
            json!({
                "label": v.label,
                "config": v.config,
                "max_abs_delta": round(v.max_abs_delta, 6),
                "mean_abs_delta": round(v.mean_abs_delta, 6),
                "spearman": round(v.spearman, 6),
                "us": v.us_status,
                "worst": v.worst.iter().map(|d| json!({
                    "state": d.entity.code(),
                    "published": d.published,
                    "computed": round(d.computed, 6),
                    "delta": round(d.delta, 6),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let best = report.best_variant();
    let a = &report.al_anomaly;
    json_bytes(&json!({
        "variants": variants,
        "best_variant": best.label,
        "al_anomaly": {
            "published": a.published,
            "worked_example": a.worked_example,
            "computed": a.computed.iter().map(|(l, v)| json!({"variant": l, "sps": round(*v, 6)})).collect::<Vec<_>>(),
        },
        "deviations": best.deviations.iter().map(|d| json!({
            "state": d.entity.code(),
            "published": d.published,
            "computed": round(d.computed, 6),
            "delta": round(d.delta, 6),
        })).collect::<Vec<_>>(),
    }))
}

fn render_csv(report: &ReconciliationReport) -> Vec<u8> {
    let a = &report.al_anomaly;
    let rows: Vec<Vec<String>> = report
        .variants
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vec![
                v.label.clone(),
                format!("{:.6}", v.max_abs_delta),
                format!("{:.6}", v.mean_abs_delta),
                format!("{:.6}", v.spearman),
                al_for(report, &v.label).map(|x| format!("{x:.6}")).unwrap_or_default(),
                format!("{:.2}", a.published),
                format!("{:.2}", a.worked_example),
                if i == report.best { "1".into() } else { "0".into() },
            ]
        })
        .collect();
    csv_bytes(
        &[
            "variant",
            "max_abs_delta",
            "mean_abs_delta",
            "spearman",
            "al_computed",
            "al_published",
            "al_worked_example",
            "best",
        ],
        &rows,
    )
}

/// Per-variant summary, the AL callout and the best variant's deviations.
pub fn render_reconciliation(report: &ReconciliationReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Md => Ok(render_md(report)),
        Format::Json => Ok(render_json(report)),
        Format::Csv => Ok(render_csv(report)),
        Format::Svg => Err(unsupported("reconciliation", format)),
    }
}
