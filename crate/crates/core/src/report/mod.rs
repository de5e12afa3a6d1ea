//! Rendering of profiles, tables, charts and reports.
//!
//! Every renderer is a pure function of its inputs and produces bytes. Floats
//! are printed with fixed precision so repeated renders are byte-identical.

mod profile;
mod reconcile;
mod svg;
mod tables;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub use profile::{build_profile, render_profile, ProfileDoc, ProfileOptions, ProfileRow, UsRow};
pub use reconcile::render_reconciliation;
pub use svg::{
    apportion, render_bar_svg, render_grid_cartogram_svg, render_waffle_svg, tile_position,
    CartogramCell, Census,
};
pub use tables::{
    render_correlation, render_decomposition, render_sps, render_stats, render_top,
    render_validation, render_weight_profile, Correlation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Md,
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Md => "md",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(Format::Md),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::InvalidInput(format!(
                "unknown format `{other}` (expected md, json, csv or svg)"
            ))),
        }
    }
}

pub(crate) fn unsupported(what: &str, format: Format) -> Error {
    Error::InvalidInput(format!("{what} cannot be rendered as {format}"))
}

/// Rounds to `decimals` places so JSON output carries no float noise.
pub(crate) fn round(v: f64, decimals: i32) -> f64 {
    let p = 10f64.powi(decimals);
    let r = (v * p).round() / p;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable report");
    out.push(b'\n');
    out
}

pub(crate) fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(row).expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

/// A GitHub-flavored markdown table.
pub(crate) fn md_table(header: &[&str], align_right: &[bool], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n|", header.join(" | "));
    for &right in align_right {
        out.push_str(if right { "---:|" } else { "---|" });
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trip() {
        for f in [Format::Md, Format::Json, Format::Csv, Format::Svg] {
            assert_eq!(f.to_string().parse::<Format>().unwrap(), f);
        }
        assert!("pdf".parse::<Format>().is_err());
    }

    #[test]
    fn rounding_drops_negative_zero() {
        assert_eq!(round(-0.00001, 2).to_string(), "0");
        assert_eq!(round(0.12345, 4), 0.1235);
    }

    #[test]
    fn markdown_table_shape() {
        let t = md_table(&["a", "b"], &[false, true], &[vec!["x".into(), "1".into()]]);
        assert_eq!(t, "| a | b |\n|---|---:|\n| x | 1 |\n");
    }
}
