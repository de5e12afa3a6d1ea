use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use riskdex_core::report::Format;
use riskdex_core::{PsId, TieBreak, UsSps, VariantConfig};

/// Process-statistic risk scores for the 50 states and DC.
#[derive(Debug, Parser)]
#[command(name = "riskdex", version, about, propagate_version = true)]
pub struct Cli {
    /// Directory holding the fixture tables.
    #[arg(long, global = true, env = "RISKDEX_DATA_DIR", default_value = "./data")]
    pub data_dir: PathBuf,

    /// Where artifacts are written (compute, profile, report; optional for others).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Output format. Table commands print plain text when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Skip the validation gate; outputs carry a warning field.
    #[arg(long, global = true)]
    pub force: bool,

    #[command(flatten)]
    pub variant: VariantArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct VariantArgs {
    /// Rank the US row together with the states (52 entities). Default.
    #[arg(long, global = true, overrides_with = "no_include_us")]
    pub include_us: bool,

    /// Rank only the 50 states and DC (51 entities).
    #[arg(long, global = true, overrides_with = "include_us")]
    pub no_include_us: bool,

    /// Zero the weight of a difference statistic whose value is negative. Default.
    #[arg(long, global = true, overrides_with = "no_zeroing")]
    pub zeroing: bool,

    /// Keep every raw weight.
    #[arg(long, global = true, overrides_with = "zeroing")]
    pub no_zeroing: bool,

    /// Order of entities with equal values.
    #[arg(long, global = true, value_enum, default_value_t = TieBreakArg::Canonical)]
    pub tie_break: TieBreakArg,

    /// Bucket sizes for 51 entities, e.g. 11,10,10,10,10. Needs --no-include-us.
    #[arg(long, global = true, value_parser = parse_scheme)]
    pub n51_scheme: Option<[usize; 5]>,

    /// Whether to attempt a national SPS.
    #[arg(long, global = true, value_enum, default_value_t = UsSpsArg::Skip)]
    pub us_sps: UsSpsArg,
}

impl VariantArgs {
    pub fn config(&self) -> Result<VariantConfig> {
        let include_us = !self.no_include_us;
        if include_us && self.n51_scheme.is_some() {
            bail!("--n51-scheme only applies together with --no-include-us");
        }
        let cfg = VariantConfig {
            include_us_in_quintiles: include_us,
            zero_negative_weights: !self.no_zeroing,
            tie_break: match self.tie_break {
                TieBreakArg::Canonical => TieBreak::ByCanonicalOrder,
                TieBreakArg::Reverse => TieBreak::ByReverseCanonical,
            },
            us_sps: match self.us_sps {
                UsSpsArg::Skip => UsSps::Skip,
                UsSpsArg::Derive => UsSps::DeriveWhereAvailable,
            },
            quintile_n51_scheme: self.n51_scheme.unwrap_or(VariantConfig::default().quintile_n51_scheme),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_scheme(s: &str) -> Result<[usize; 5], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not a bucket size")))
        .collect::<Result<_, _>>()?;
    let scheme: [usize; 5] = parts
        .try_into()
        .map_err(|_| "expected five comma-separated bucket sizes".to_string())?;
    if scheme.iter().sum::<usize>() != 51 || scheme.contains(&0) {
        return Err(format!("bucket sizes {scheme:?} must be positive and sum to 51"));
    }
    Ok(scheme)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Canonical,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UsSpsArg {
    Skip,
    Derive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Md,
    Json,
    Csv,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Md => Format::Md,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
        }
    }
}

/// `--ps` value: one statistic or all ten.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsSelection {
    All,
    One(PsId),
}

impl PsSelection {
    pub fn ids(self) -> Vec<PsId> {
        match self {
            PsSelection::All => PsId::all().collect(),
            PsSelection::One(id) => vec![id],
        }
    }
}

impl FromStr for PsSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(PsSelection::All);
        }
        s.parse::<PsId>()
            .map(PsSelection::One)
            .map_err(|_| format!("`{s}` is not a process statistic (expected 1..10 or all)"))
    }
}

fn parse_single_ps(s: &str) -> Result<PsId, String> {
    match s.parse::<PsSelection>()? {
        PsSelection::One(id) => Ok(id),
        PsSelection::All => Err("this command takes a single process statistic".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Series {
    /// Published SPS column.
    PublishedSps,
    /// Census minus population estimate, relative.
    RelDiff,
    /// SPS computed under the selected variant.
    Sps,
    Ps1,
    Ps2,
    Ps3,
    Ps4,
    Ps5,
    Ps6,
    Ps7,
    Ps8,
    Ps9,
    Ps10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pearson,
    Spearman,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-check the fixture tables; exit 1 on failures outside the errata list.
    Validate,
    /// Compute SPS and phase shares; writes sps.csv and sps.json.
    Compute,
    /// Ranked profile of one or all statistics.
    Profile {
        #[arg(long, default_value = "all")]
        ps: PsSelection,
        /// Number the US row among the states.
        #[arg(long)]
        rank_us: bool,
    },
    /// Mean, minimum, maximum, range and relative range over the states and DC.
    Stats {
        #[arg(long, default_value = "all")]
        ps: PsSelection,
    },
    /// Highest-k states for a statistic with their relative differences.
    Top {
        #[arg(long, value_parser = parse_single_ps)]
        ps: PsId,
        #[arg(long, default_value_t = 11)]
        k: usize,
    },
    /// Correlation between two series over the 50 states and DC.
    Correlate {
        #[arg(long, value_enum, default_value_t = Series::PublishedSps)]
        x: Series,
        #[arg(long, value_enum, default_value_t = Series::RelDiff)]
        y: Series,
        #[arg(long, value_enum, default_value_t = Method::Pearson)]
        method: Method,
    },
    /// Compare the default rule variants against the published SPS column.
    Reconcile,
    /// Write the full artifact set: profiles, charts, tables and reconciliation.
    Report,
}
