use std::collections::BTreeMap;
use std::path::PathBuf;

use riskdex_core::aggregate::{reconcile, run_variant};
use riskdex_core::analysis::ps_summary;
use riskdex_core::report::{
    build_profile, render_bar_svg, render_grid_cartogram_svg, render_profile,
    render_reconciliation, render_sps, render_stats, render_validation, render_waffle_svg,
    CartogramCell, Census, Format, ProfileOptions,
};
use riskdex_core::{validate, DataBundle, EntityId, PsId, VariantConfig};

fn bundle() -> DataBundle {
    DataBundle::load(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")).unwrap()
}

fn text(bytes: Vec<u8>) -> String {
    String::from_utf8(bytes).unwrap()
}

#[test]
fn profiles_are_byte_deterministic() {
    let b = bundle();
    let result = run_variant(&b, &VariantConfig::default()).unwrap();
    for ps in PsId::all() {
        for format in [Format::Md, Format::Json, Format::Csv, Format::Svg] {
            let a = render_profile(ps, &b, &result, format, ProfileOptions::default()).unwrap();
            let again = render_profile(ps, &b, &result.clone(), format, ProfileOptions::default()).unwrap();
            assert_eq!(a, again, "{ps} {format}");
        }
    }
}

#[test]
fn profile_json_schema() {
    let b = bundle();
    let result = run_variant(&b, &VariantConfig::default()).unwrap();
    let json: serde_json::Value = serde_json::from_slice(
        &render_profile(PsId::new(3).unwrap(), &b, &result, Format::Json, ProfileOptions::default()).unwrap(),
    )
    .unwrap();
    let top: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(top, ["ps_id", "rows", "us"]);
    assert_eq!(json["ps_id"], 3);
    assert_eq!(json["us"]["value"], 17.53);
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 51);
    let mut keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["bar", "component_2020", "quintile", "rank", "state", "value"]);

    let level: serde_json::Value = serde_json::from_slice(
        &render_profile(PsId::new(1).unwrap(), &b, &result, Format::Json, ProfileOptions::default()).unwrap(),
    )
    .unwrap();
    assert!(level["rows"][0].get("component_2020").is_none());
    assert_eq!(level["rows"][0]["state"], "MD");
    assert_eq!(level["rows"][0]["bar"], 0.0);
    assert_eq!(level["rows"][50]["bar"], 1.0);
}

#[test]
fn ranking_us_needs_us_quintiles() {
    let b = bundle();
    let opts = ProfileOptions { rank_us: true };
    let with_us = run_variant(&b, &VariantConfig::default()).unwrap();
    let doc = build_profile(PsId::new(4).unwrap(), &b, &with_us, opts).unwrap();
    assert_eq!(doc.rows.len(), 52);
    let without = run_variant(
        &b,
        &VariantConfig {
            include_us_in_quintiles: false,
            ..VariantConfig::default()
        },
    )
    .unwrap();
    assert!(build_profile(PsId::new(4).unwrap(), &b, &without, opts).is_err());
}

#[test]
fn bar_chart_endpoints() {
    let b = bundle();
    let result = run_variant(&b, &VariantConfig::default()).unwrap();
    let doc = build_profile(PsId::new(1).unwrap(), &b, &result, ProfileOptions::default()).unwrap();
    let svg = text(render_bar_svg(&doc));
    assert!(svg.starts_with("<svg"));
    let widths: Vec<&str> = svg
        .lines()
        .filter_map(|l| l.split(" width=\"").nth(1))
        .filter_map(|w| w.split('"').next())
        .collect();
    // First width attribute belongs to the root element.
    assert_eq!(widths[1], "0.00");
    assert_eq!(widths.last().copied(), Some("400.00"));
    assert_eq!(svg, text(render_bar_svg(&doc)));
}

#[test]
fn cartogram_shades() {
    let cells: BTreeMap<_, _> = EntityId::states()
        .map(|e| {
            let q = if e.code() == "AL" { 5 } else if e.code() == "AK" { 1 } else { 3 };
            (e, CartogramCell { value: 1.0, quintile: q })
        })
        .collect();
    let svg = text(render_grid_cartogram_svg("test", &cells).unwrap());
    let tile = |code: &str| {
        svg.lines()
            .find(|l| l.contains(&format!(">{code}</text>")))
            .unwrap()
            .to_string()
    };
    assert!(tile("AL").contains(r#"class="q5""#));
    assert!(tile("AK").contains(r#"class="q1""#));
    assert!(svg.contains(".q5 { fill: #08519c; }"));
    assert_eq!(svg, text(render_grid_cartogram_svg("test", &cells).unwrap()));

    let uniform: BTreeMap<_, _> = EntityId::states()
        .map(|e| (e, CartogramCell { value: 2.0, quintile: 2 }))
        .collect();
    let svg = text(render_grid_cartogram_svg("u", &uniform).unwrap());
    let tiles = svg.lines().filter(|l| l.starts_with("<g><rect")).count();
    let q2 = svg.lines().filter(|l| l.starts_with(r#"<g><rect class="q2""#)).count();
    assert_eq!((tiles, q2), (51, 51));
}

#[test]
fn waffle_cells() {
    let b = bundle();
    let svg = text(render_waffle_svg(&b.published.table2, Census::Y2020, 500).unwrap());
    let count = |class: &str| svg.matches(&format!(r#"<rect class="{class}" x"#)).count() - 1;
    assert_eq!(
        [count("c0"), count("c1"), count("c2"), count("c3"), count("c4")],
        [386, 65, 27, 19, 3]
    );
    assert_eq!(svg, text(render_waffle_svg(&b.published.table2, Census::Y2020, 500).unwrap()));
}

#[test]
fn reconciliation_rendering() {
    let b = bundle();
    let report = reconcile(&b, &VariantConfig::default_grid()).unwrap();
    let md = text(render_reconciliation(&report, Format::Md).unwrap());
    assert_eq!(md.matches("(best)").count(), 1);
    assert!(md.contains("2.28") && md.contains("2.38"));
    let summary_rows = md.lines().filter(|l| l.starts_with("| `us-")).count();
    assert_eq!(summary_rows, 4);

    let csv = text(render_reconciliation(&report, Format::Csv).unwrap());
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 1);

    let json: serde_json::Value =
        serde_json::from_slice(&render_reconciliation(&report, Format::Json).unwrap()).unwrap();
    assert_eq!(json["variants"].as_array().unwrap().len(), 4);
    assert_eq!(json["best_variant"], report.best_variant().label.as_str());
    for f in [Format::Md, Format::Json, Format::Csv] {
        assert_eq!(render_reconciliation(&report, f).unwrap(), render_reconciliation(&report, f).unwrap());
    }
    assert!(render_reconciliation(&report, Format::Svg).is_err());
}

#[test]
fn tables_are_deterministic() {
    let b = bundle();
    let result = run_variant(&b, &VariantConfig::default()).unwrap();
    let stats: Vec<_> = PsId::all().map(|p| ps_summary(&b.ps, p)).collect();
    let plain = text(render_stats(&stats, None).unwrap());
    assert!(plain.lines().any(|l| l == "ps1 11.3 5.9 26.6 20.7 1.8"), "{plain}");
    for f in [None, Some(Format::Md), Some(Format::Json), Some(Format::Csv)] {
        assert_eq!(render_stats(&stats, f).unwrap(), render_stats(&stats, f).unwrap());
    }
    let report = validate(&b);
    for f in [None, Some(Format::Md), Some(Format::Json), Some(Format::Csv)] {
        assert_eq!(render_validation(&report, f).unwrap(), render_validation(&report, f).unwrap());
    }
    let csv = text(render_sps(&result, Format::Csv, None).unwrap());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("state,sps,zeroed,maf_pct,sr_pct,nrfu_pct,dp_pct,gq_pct"));
    assert!(lines.next().unwrap().starts_with("AL,"));
    assert_eq!(csv.lines().count(), 52);
}
