use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{csv_bytes, json_bytes, md_table, round, Format};
use crate::error::{Error, Result};
use crate::ingest::DataBundle;
use crate::model::{EntityId, PsId, SpsResult};
use crate::transform::rank_entities;

#[derive(Debug, Deserialize)]
struct ProfileStrings {
    profile: Vec<ProfileText>,
}

#[derive(Debug, Deserialize)]
struct ProfileText {
    id: u8,
    calc: String,
    reading: String,
}

fn strings() -> &'static ProfileStrings {
    static STRINGS: OnceLock<ProfileStrings> = OnceLock::new();
    STRINGS.get_or_init(|| {
        toml::from_str(include_str!("../../strings/profiles.toml")).expect("bundled strings parse")
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProfileOptions {
    /// Number the US row among the states (52 ranked rows).
    pub rank_us: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub rank: u32,
    pub entity: EntityId,
    pub value: f64,
    pub component_2020: Option<f64>,
    /// `(v − min) / (max − min)` over the ranked rows.
    pub bar: f64,
    pub quintile: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UsRow {
    pub value: f64,
    pub component_2020: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDoc {
    pub ps_id: PsId,
    pub title: String,
    pub calc_note: String,
    pub interpretation: String,
    pub rows: Vec<ProfileRow>,
    pub us: UsRow,
}

/// Builds the ranked profile of one PS under the result's tie-break and quintiles.
pub fn build_profile(
    ps: PsId,
    bundle: &DataBundle,
    result: &SpsResult,
    opts: ProfileOptions,
) -> Result<ProfileDoc> {
    let def = ps.def();
    let text = strings()
        .profile
        .iter()
        .find(|p| p.id == ps.get())
        .ok_or_else(|| Error::InvalidInput(format!("no profile text for {ps}")))?;
    let ranked = rank_entities(&bundle.ps, ps, opts.rank_us, result.config.tie_break);
    let (min, max) = match (ranked.entries.first(), ranked.entries.last()) {
        (Some(lo), Some(hi)) => (lo.value, hi.value),
        _ => return Err(Error::InvalidInput(format!("{ps} has no ranked rows"))),
    };
    let span = max - min;

    let mut rows = Vec::with_capacity(ranked.n());
    for entry in &ranked.entries {
        let quintile = result.quintiles.get(entry.entity, ps).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "{} has no quintile for {ps}; ranking US requires US in the quintiles",
                entry.entity
            ))
        })?;
        rows.push(ProfileRow {
            rank: entry.rank,
            entity: entry.entity,
            value: entry.value,
            component_2020: bundle.components.get(entry.entity, ps),
            bar: if span > 0.0 { (entry.value - min) / span } else { 0.0 },
            quintile,
        });
    }

    Ok(ProfileDoc {
        ps_id: ps,
        title: format!("{ps}: {}", def.short_name),
        calc_note: text.calc.clone(),
        interpretation: text.reading.clone(),
        rows,
        us: UsRow {
            value: bundle.ps.get(EntityId::US, ps),
            component_2020: bundle.components.get(EntityId::US, ps),
        },
    })
}

fn opt2(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.2}")).unwrap_or_default()
}

fn profile_json(doc: &ProfileDoc) -> Vec<u8> {
    let rows: Vec<_> = doc
        .rows
        .iter()
        .map(|r| {
            let mut row = json!({
                "rank": r.rank,
                "state": r.entity.code(),
                "value": r.value,
            });
            if let Some(c) = r.component_2020 {
                row["component_2020"] = json!(c);
            }
            row["bar"] = json!(round(r.bar, 4));
            row["quintile"] = json!(r.quintile);
            row
        })
        .collect();
    json_bytes(&json!({
        "ps_id": doc.ps_id.get(),
        "rows": rows,
        "us": { "value": doc.us.value },
    }))
}

fn profile_csv(doc: &ProfileDoc) -> Vec<u8> {
    let mut rows: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|r| {
            vec![
                r.rank.to_string(),
                r.entity.code().to_string(),
                format!("{:.2}", r.value),
                opt2(r.component_2020),
                format!("{:.4}", r.bar),
                r.quintile.to_string(),
            ]
        })
        .collect();
    if !doc.rows.iter().any(|r| r.entity.is_us()) {
        rows.push(vec![
            String::new(),
            EntityId::US.code().to_string(),
            format!("{:.2}", doc.us.value),
            opt2(doc.us.component_2020),
            String::new(),
            String::new(),
        ]);
    }
    csv_bytes(
        &["rank", "state", "value", "component_2020", "bar", "quintile"],
        &rows,
    )
}

fn bar_glyphs(bar: f64) -> String {
    const WIDTH: f64 = 20.0;
    "█".repeat((bar * WIDTH).round() as usize)
}

fn profile_md(doc: &ProfileDoc) -> Vec<u8> {
    let def = doc.ps_id.def();
    let with_component = doc.rows.iter().any(|r| r.component_2020.is_some());
    let mut header = vec!["Rank", "State", "Value"];
    if with_component {
        header.push("2020 component");
    }
    header.extend(["Bar", "Quintile"]);
    let align: Vec<bool> = header.iter().map(|h| *h != "State" && *h != "Bar").collect();

    let mut rows = Vec::with_capacity(doc.rows.len() + 1);
    for r in &doc.rows {
        let mut row = vec![
            r.rank.to_string(),
            r.entity.display_name().to_string(),
            format!("{:.2}", r.value),
        ];
        if with_component {
            row.push(opt2(r.component_2020));
        }
        row.extend([bar_glyphs(r.bar), r.quintile.to_string()]);
        rows.push(row);
    }
    if !doc.rows.iter().any(|r| r.entity.is_us()) {
        let mut row = vec![
            String::new(),
            EntityId::US.display_name().to_string(),
            format!("{:.2}", doc.us.value),
        ];
        if with_component {
            row.push(opt2(doc.us.component_2020));
        }
        row.extend([String::new(), String::new()]);
        rows.push(row);
    }

    let mut out = format!("# {}\n\n", doc.title);
    out.push_str(&format!(
        "Phase: {}. Universe: {}.\n\n",
        def.phase.label(),
        def.universe
    ));
    out.push_str(&format!("**Calculation.** {}\n\n", doc.calc_note));
    out.push_str(&format!("**Interpretation.** {}\n\n", doc.interpretation));
    out.push_str(&md_table(&header, &align, &rows));
    out.into_bytes()
}

/// Serializes a profile as markdown, JSON or CSV; SVG gives the bar chart.
pub fn render_profile(
    ps: PsId,
    bundle: &DataBundle,
    result: &SpsResult,
    format: Format,
    opts: ProfileOptions,
) -> Result<Vec<u8>> {
    let doc = build_profile(ps, bundle, result, opts)?;
    Ok(match format {
        Format::Md => profile_md(&doc),
        Format::Json => profile_json(&doc),
        Format::Csv => profile_csv(&doc),
        Format::Svg => super::render_bar_svg(&doc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_ps_has_strings() {
        for ps in PsId::all() {
            let text = strings().profile.iter().find(|p| p.id == ps.get()).unwrap();
            assert!(!text.calc.is_empty() && !text.reading.is_empty());
        }
    }

    #[test]
    fn glyph_width() {
        assert_eq!(bar_glyphs(0.0), "");
        assert_eq!(bar_glyphs(1.0).chars().count(), 20);
    }
}
