use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::ProfileDoc;
use crate::error::{Error, Result};
use crate::model::{EntityId, MethodShare};

/// Light-to-dark fills for quintiles 1..=5.
const QUINTILE_FILLS: [&str; 5] = ["#eff3ff", "#bdd7e7", "#6baed6", "#3182bd", "#08519c"];
const CATEGORY_FILLS: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open_svg(out: &mut String, width: u32, height: u32) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {width} {height}" width="{width}" height="{height}">"#
    );
}

fn quintile_style(out: &mut String) {
    out.push_str("<style>\n");
    for (i, fill) in QUINTILE_FILLS.iter().enumerate() {
        let _ = writeln!(out, ".q{} {{ fill: {fill}; }}", i + 1);
    }
    out.push_str("text { font-family: sans-serif; font-size: 10px; fill: #222; }\n");
    out.push_str("text.on-dark { fill: #fff; }\n");
    out.push_str("</style>\n");
}

/// Horizontal bar chart of a profile, one bar per ranked row.
pub fn render_bar_svg(profile: &ProfileDoc) -> Vec<u8> {
    const LABEL_W: f64 = 130.0;
    const BAR_W: f64 = 400.0;
    const ROW_H: f64 = 14.0;
    const TOP: f64 = 24.0;
    let width = (LABEL_W + BAR_W + 60.0) as u32;
    let height = (TOP + ROW_H * profile.rows.len() as f64 + 8.0) as u32;

    let mut out = String::new();
    open_svg(&mut out, width, height);
    quintile_style(&mut out);
    let _ = writeln!(out, r#"<text x="4" y="14">{}</text>"#, escape(&profile.title));
    for (i, row) in profile.rows.iter().enumerate() {
        let y = TOP + ROW_H * i as f64;
        let _ = writeln!(
            out,
            r#"<g><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text><rect class="q{}" x="{LABEL_W:.1}" y="{:.1}" width="{:.2}" height="{:.1}"/><text x="{:.2}" y="{:.1}">{:.2}</text></g>"#,
            LABEL_W - 4.0,
            y + 10.0,
            escape(row.entity.display_name()),
            row.quintile,
            y + 1.0,
            row.bar * BAR_W,
            ROW_H - 2.0,
            LABEL_W + row.bar * BAR_W + 4.0,
            y + 10.0,
            row.value,
        );
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

/// Tile (row, column) of each state in the grid cartogram.
pub fn tile_position(entity: EntityId) -> Option<(u32, u32)> {
    let pos = match entity.code() {
        "AK" => (0, 0),
        "ME" => (0, 11),
        "VT" => (1, 10),
        "NH" => (1, 11),
        "WA" => (2, 1),
        "ID" => (2, 2),
        "MT" => (2, 3),
        "ND" => (2, 4),
        "MN" => (2, 5),
        "IL" => (2, 6),
        "WI" => (2, 7),
        "MI" => (2, 8),
        "NY" => (2, 9),
        "RI" => (2, 10),
        "MA" => (2, 11),
        "OR" => (3, 1),
        "NV" => (3, 2),
        "WY" => (3, 3),
        "SD" => (3, 4),
        "IA" => (3, 5),
        "IN" => (3, 6),
        "OH" => (3, 7),
        "PA" => (3, 8),
        "NJ" => (3, 9),
        "CT" => (3, 10),
        "CA" => (4, 1),
        "UT" => (4, 2),
        "CO" => (4, 3),
        "NE" => (4, 4),
        "MO" => (4, 5),
        "KY" => (4, 6),
        "WV" => (4, 7),
        "VA" => (4, 8),
        "MD" => (4, 9),
        "DE" => (4, 10),
        "AZ" => (5, 2),
        "NM" => (5, 3),
        "KS" => (5, 4),
        "AR" => (5, 5),
        "TN" => (5, 6),
        "NC" => (5, 7),
        "SC" => (5, 8),
        "DC" => (5, 9),
        "OK" => (6, 4),
        "LA" => (6, 5),
        "MS" => (6, 6),
        "AL" => (6, 7),
        "GA" => (6, 8),
        "HI" => (7, 0),
        "TX" => (7, 4),
        "FL" => (7, 9),
        _ => return None,
    };
    Some(pos)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartogramCell {
    pub value: f64,
    /// Shade class 1..=5.
    pub quintile: u8,
}

/// Labeled state tiles in an approximate US layout, shaded by quintile.
pub fn render_grid_cartogram_svg(
    title: &str,
    cells: &BTreeMap<EntityId, CartogramCell>,
) -> Result<Vec<u8>> {
    const TILE: u32 = 48;
    const GAP: u32 = 2;
    const TOP: u32 = 24;
    for e in EntityId::states() {
        match cells.get(&e) {
            None => return Err(Error::InvalidInput(format!("cartogram has no value for {e}"))),
            Some(c) if !(1..=5).contains(&c.quintile) => {
                return Err(Error::InvalidInput(format!(
                    "cartogram shade {} for {e} is outside 1..=5",
                    c.quintile
                )))
            }
            Some(_) => {}
        }
    }
    let width = 12 * (TILE + GAP) + GAP;
    let height = TOP + 8 * (TILE + GAP) + GAP + 24;

    let mut out = String::new();
    open_svg(&mut out, width, height);
    quintile_style(&mut out);
    let _ = writeln!(out, r#"<text x="4" y="14">{}</text>"#, escape(title));
    for e in EntityId::states() {
        let cell = cells[&e];
        let (row, col) = tile_position(e).expect("every state has a tile");
        let x = GAP + col * (TILE + GAP);
        let y = TOP + GAP + row * (TILE + GAP);
        let text_class = if cell.quintile >= 4 { r#" class="on-dark""# } else { "" };
        let _ = writeln!(
            out,
            r#"<g><rect class="q{}" x="{x}" y="{y}" width="{TILE}" height="{TILE}"/><text{text_class} x="{}" y="{}" text-anchor="middle">{}</text><text{text_class} x="{}" y="{}" text-anchor="middle">{:.2}</text></g>"#,
            cell.quintile,
            x + TILE / 2,
            y + 20,
            e.code(),
            x + TILE / 2,
            y + 34,
            cell.value,
        );
    }
    // Legend.
    let ly = TOP + 8 * (TILE + GAP) + GAP + 4;
    for q in 1..=5u32 {
        let lx = GAP + (q - 1) * 60;
        let _ = writeln!(
            out,
            r#"<rect class="q{q}" x="{lx}" y="{ly}" width="14" height="14"/><text x="{}" y="{}">Q{q}</text>"#,
            lx + 18,
            ly + 11
        );
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

/// Largest-remainder allocation of `n` items over percentage shares.
///
/// Shares are taken to thousandths of a percent and apportioned with exact
/// integer arithmetic; equal remainders go to the earlier category.
pub fn apportion(shares: &[f64], n: u32) -> Result<Vec<u32>> {
    let total: f64 = shares.iter().sum();
    if shares.is_empty() || (total - 100.0).abs() > 0.1 + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "shares sum to {total:.3}, expected 100 +/- 0.1"
        )));
    }
    if shares.iter().any(|s| *s < 0.0 || !s.is_finite()) {
        return Err(Error::InvalidInput("shares must be nonnegative".into()));
    }
    let units: Vec<u64> = shares.iter().map(|s| (s * 1000.0).round() as u64).collect();
    let denom: u64 = units.iter().sum();
    let n64 = u64::from(n);
    let mut counts: Vec<u32> = units.iter().map(|u| (n64 * u / denom) as u32).collect();
    let remainders: Vec<u64> = units.iter().map(|u| n64 * u % denom).collect();
    let leftover = n - counts.iter().sum::<u32>();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| remainders[b].cmp(&remainders[a]).then(a.cmp(&b)));
    for &i in order.iter().take(leftover as usize) {
        counts[i] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Census {
    Y2020,
    Y2010,
}

impl Census {
    fn label(self) -> &'static str {
        match self {
            Census::Y2020 => "2020",
            Census::Y2010 => "2010",
        }
    }
}

/// Icon grid of `n_icons` cells split across enumeration methods.
pub fn render_waffle_svg(shares: &[MethodShare], census: Census, n_icons: u32) -> Result<Vec<u8>> {
    const COLS: u32 = 25;
    const CELL: u32 = 14;
    const TOP: u32 = 24;
    let pct: Vec<f64> = shares
        .iter()
        .map(|m| match census {
            Census::Y2020 => m.pct_2020,
            Census::Y2010 => m.pct_2010,
        })
        .collect();
    let counts = apportion(&pct, n_icons)?;
    let rows = n_icons.div_ceil(COLS);
    let grid_h = rows * CELL;
    let width = COLS * CELL + 8;
    let height = TOP + grid_h + 8 + 16 * shares.len() as u32;

    let mut out = String::new();
    open_svg(&mut out, width, height);
    out.push_str("<style>\n");
    for i in 0..shares.len() {
        let _ = writeln!(out, ".c{i} {{ fill: {}; }}", CATEGORY_FILLS[i % CATEGORY_FILLS.len()]);
    }
    out.push_str("text { font-family: sans-serif; font-size: 10px; fill: #222; }\n</style>\n");
    let _ = writeln!(
        out,
        r#"<text x="4" y="14">Enumeration method, {} census ({n_icons} units)</text>"#,
        census.label()
    );
    let mut cell = 0u32;
    for (cat, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let x = 4 + (cell % COLS) * CELL;
            let y = TOP + (cell / COLS) * CELL;
            let _ = writeln!(
                out,
                r#"<rect class="c{cat}" x="{x}" y="{y}" width="{}" height="{}"/>"#,
                CELL - 2,
                CELL - 2
            );
            cell += 1;
        }
    }
    for (i, (m, count)) in shares.iter().zip(&counts).enumerate() {
        let y = TOP + grid_h + 8 + 16 * i as u32;
        let _ = writeln!(
            out,
            r#"<rect class="c{i}" x="4" y="{y}" width="12" height="12"/><text x="22" y="{}">{} ({count})</text>"#,
            y + 10,
            escape(&m.method)
        );
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}
