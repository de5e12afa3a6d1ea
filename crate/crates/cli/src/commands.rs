use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use riskdex_core::aggregate::{reconcile, run_variant, sps_quintiles};
use riskdex_core::analysis::{pearson, ps_summary, spearman, top_quintile, weight_profile};
use riskdex_core::report::{
    self, render_bar_svg, render_correlation, render_decomposition, render_grid_cartogram_svg,
    render_profile, render_reconciliation, render_sps, render_stats, render_top,
    render_validation, render_waffle_svg, render_weight_profile, CartogramCell, Census,
    Correlation, Format, ProfileOptions,
};
use riskdex_core::{validate, DataBundle, EntityId, PsId, SpsResult, VariantConfig};

use crate::args::{Cli, Command, Method, Series};
use crate::output::{stdout, OutDir};

const DEFAULT_OUT_DIR: &str = "./out";

/// The validation gate refused to continue.
#[derive(Debug)]
pub struct ValidationFailed(pub usize);

impl fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "validation found {} failure(s) outside the errata registry; run `riskdex validate` for details or pass --force",
            self.0
        )
    }
}

impl std::error::Error for ValidationFailed {}

struct Ctx<'a> {
    cli: &'a Cli,
    cfg: VariantConfig,
    format: Option<Format>,
}

impl Ctx<'_> {
    fn out_dir(&self) -> PathBuf {
        self.cli
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    fn load(&self) -> Result<DataBundle> {
        DataBundle::load(&self.cli.data_dir)
            .with_context(|| format!("loading fixtures from {}", self.cli.data_dir.display()))
    }

    /// Loads the bundle and applies the validation gate. Returns the warning
    /// to stamp on outputs when the gate was bypassed.
    fn gated(&self) -> Result<(DataBundle, Option<String>)> {
        let bundle = self.load()?;
        let failures = validate(&bundle).failures().count();
        if self.cli.force {
            let warning = format!(
                "validation gate bypassed with --force ({failures} unexplained failure(s))"
            );
            eprintln!("warning: {warning}");
            return Ok((bundle, Some(warning)));
        }
        if failures > 0 {
            return Err(ValidationFailed(failures).into());
        }
        Ok((bundle, None))
    }

    /// Prints a table, or writes it to `<out-dir>/<stem>.<ext>` when an out dir is given.
    fn emit(&self, stem: &str, bytes: &[u8]) -> Result<()> {
        match &self.cli.out_dir {
            Some(dir) => {
                let ext = self.format.map_or("txt", Format::extension);
                let path = OutDir::create(dir)?.write(&format!("{stem}.{ext}"), bytes)?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
            None => stdout(bytes),
        }
    }
}

fn reject_format(format: Option<Format>, allowed: &[Format], command: &str) -> Result<()> {
    if let Some(f) = format {
        if !allowed.contains(&f) {
            bail!("`{command}` does not support --format {f}");
        }
    }
    Ok(())
}

/// Checks flag combinations up front so nothing is written on bad input.
fn preflight(cli: &Cli, cfg: &VariantConfig, format: Option<Format>) -> Result<()> {
    use Format::*;
    match &cli.command {
        Command::Validate | Command::Stats { .. } | Command::Top { .. } | Command::Correlate { .. } => {
            reject_format(format, &[Md, Json, Csv], command_name(&cli.command))?
        }
        Command::Reconcile => reject_format(format, &[Md, Json, Csv], "reconcile")?,
        Command::Compute => {
            if format.is_some() {
                bail!("`compute` always writes sps.csv and sps.json; drop --format");
            }
        }
        Command::Report => {
            if format.is_some() {
                bail!("`report` writes every format; drop --format");
            }
        }
        Command::Profile { rank_us, .. } => {
            if *rank_us && !cfg.include_us_in_quintiles {
                bail!("--rank-us needs the US row in the quintiles; drop --no-include-us");
            }
        }
    }
    if let Command::Top { k, .. } = cli.command {
        if k == 0 || k > 51 {
            bail!("--k must be between 1 and 51, got {k}");
        }
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Compute => "compute",
        Command::Profile { .. } => "profile",
        Command::Stats { .. } => "stats",
        Command::Top { .. } => "top",
        Command::Correlate { .. } => "correlate",
        Command::Reconcile => "reconcile",
        Command::Report => "report",
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.variant.config()?;
    let format = cli.format.map(Format::from);
    preflight(cli, &cfg, format)?;
    let ctx = Ctx { cli, cfg, format };

    match &cli.command {
        Command::Validate => cmd_validate(&ctx),
        Command::Compute => cmd_compute(&ctx),
        Command::Profile { ps, rank_us } => cmd_profile(&ctx, &ps.ids(), *rank_us),
        Command::Stats { ps } => cmd_stats(&ctx, &ps.ids()),
        Command::Top { ps, k } => cmd_top(&ctx, *ps, *k),
        Command::Correlate { x, y, method } => cmd_correlate(&ctx, *x, *y, *method),
        Command::Reconcile => cmd_reconcile(&ctx),
        Command::Report => cmd_report(&ctx),
    }
}

fn cmd_validate(ctx: &Ctx) -> Result<()> {
    let bundle = ctx.load()?;
    let report = validate(&bundle);
    ctx.emit("validation", &render_validation(&report, ctx.format)?)?;
    let failures = report.failures().count();
    if failures > 0 {
        for c in report.failures().take(10) {
            eprintln!(
                "failed: {} at {} {}",
                c.id.name(),
                c.entity.map_or("-", |e| e.code()),
                c.ps.map_or_else(|| "-".to_string(), |p| p.to_string())
            );
        }
        return Err(ValidationFailed(failures).into());
    }
    Ok(())
}

fn cmd_compute(ctx: &Ctx) -> Result<()> {
    let (bundle, warning) = ctx.gated()?;
    let result = run_variant(&bundle, &ctx.cfg)?;
    let csv = render_sps(&result, Format::Csv, warning.as_deref())?;
    let json = render_sps(&result, Format::Json, warning.as_deref())?;
    let out = OutDir::create(&ctx.out_dir())?;
    for path in [out.write("sps.csv", &csv)?, out.write("sps.json", &json)?] {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_profile(ctx: &Ctx, ids: &[PsId], rank_us: bool) -> Result<()> {
    let (bundle, _warning) = ctx.gated()?;
    let result = run_variant(&bundle, &ctx.cfg)?;
    let format = ctx.format.unwrap_or(Format::Md);
    let opts = ProfileOptions { rank_us };
    // Render everything before touching the output directory.
    let docs: Vec<(String, Vec<u8>)> = ids
        .iter()
        .map(|&ps| {
            let bytes = render_profile(ps, &bundle, &result, format, opts)?;
            Ok((format!("{ps}.{}", format.extension()), bytes))
        })
        .collect::<Result<_>>()?;
    let out = OutDir::create(&ctx.out_dir())?;
    for (name, bytes) in docs {
        eprintln!("wrote {}", out.write(&name, &bytes)?.display());
    }
    Ok(())
}

fn cmd_stats(ctx: &Ctx, ids: &[PsId]) -> Result<()> {
    let (bundle, _warning) = ctx.gated()?;
    let rows: Vec<_> = ids.iter().map(|&ps| ps_summary(&bundle.ps, ps)).collect();
    ctx.emit("stats", &render_stats(&rows, ctx.format)?)
}

fn cmd_top(ctx: &Ctx, ps: PsId, k: usize) -> Result<()> {
    let (bundle, _warning) = ctx.gated()?;
    let rows = top_quintile(&bundle.ps, ps, k, ctx.cfg.tie_break)?;
    ctx.emit(&format!("top_{ps}"), &render_top(ps, &rows, ctx.format)?)
}

fn series_name(s: Series) -> String {
    match s {
        Series::PublishedSps => "published_sps".into(),
        Series::RelDiff => "rel_diff".into(),
        Series::Sps => "sps".into(),
        other => series_ps(other).expect("ps series").to_string(),
    }
}

fn series_ps(s: Series) -> Option<PsId> {
    let id = match s {
        Series::Ps1 => 1,
        Series::Ps2 => 2,
        Series::Ps3 => 3,
        Series::Ps4 => 4,
        Series::Ps5 => 5,
        Series::Ps6 => 6,
        Series::Ps7 => 7,
        Series::Ps8 => 8,
        Series::Ps9 => 9,
        Series::Ps10 => 10,
        _ => return None,
    };
    PsId::new(id).ok()
}

fn series_values(s: Series, bundle: &DataBundle, computed: &mut Option<SpsResult>, cfg: &VariantConfig) -> Result<Vec<f64>> {
    let states = EntityId::states();
    Ok(match s {
        Series::PublishedSps => states
            .map(|e| {
                bundle
                    .published
                    .published_sps
                    .get(&e)
                    .copied()
                    .with_context(|| format!("no published SPS for {e}"))
            })
            .collect::<Result<_>>()?,
        Series::RelDiff => states.map(|e| bundle.ps.rel_diff(e)).collect(),
        Series::Sps => {
            if computed.is_none() {
                *computed = Some(run_variant(bundle, cfg)?);
            }
            let result = computed.as_ref().expect("just computed");
            states
                .map(|e| result.get(e).map(|r| r.sps).with_context(|| format!("no SPS for {e}")))
                .collect::<Result<_>>()?
        }
        other => {
            let ps = series_ps(other).expect("ps series");
            states.map(|e| bundle.ps.get(e, ps)).collect()
        }
    })
}

fn cmd_correlate(ctx: &Ctx, x: Series, y: Series, method: Method) -> Result<()> {
    let (bundle, _warning) = ctx.gated()?;
    let mut computed = None;
    let xs = series_values(x, &bundle, &mut computed, &ctx.cfg)?;
    let ys = series_values(y, &bundle, &mut computed, &ctx.cfg)?;
    let (name, value) = match method {
        Method::Pearson => ("pearson", pearson(&xs, &ys)?),
        Method::Spearman => ("spearman", spearman(&xs, &ys)?),
    };
    let c = Correlation {
        method: name,
        x: series_name(x),
        y: series_name(y),
        n: xs.len(),
        value,
    };
    ctx.emit("correlation", &render_correlation(&c, ctx.format)?)
}

/// The default grid with the user's tie-break and 51-entity scheme applied.
fn grid(cfg: &VariantConfig) -> Vec<VariantConfig> {
    VariantConfig::default_grid()
        .into_iter()
        .map(|v| VariantConfig {
            tie_break: cfg.tie_break,
            us_sps: cfg.us_sps,
            quintile_n51_scheme: cfg.quintile_n51_scheme,
            ..v
        })
        .collect()
}

fn cmd_reconcile(ctx: &Ctx) -> Result<()> {
    let (bundle, _warning) = ctx.gated()?;
    let report = reconcile(&bundle, &grid(&ctx.cfg))?;
    let format = ctx.format.unwrap_or(Format::Md);
    let bytes = render_reconciliation(&report, format)?;
    match &ctx.cli.out_dir {
        Some(dir) => {
            let path = OutDir::create(dir)?.write(&format!("reconciliation.{}", format.extension()), &bytes)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => stdout(&bytes),
    }
}

fn cartogram_cells(values: impl Fn(EntityId) -> f64, shade: impl Fn(EntityId) -> Option<u8>) -> Result<BTreeMap<EntityId, CartogramCell>> {
    EntityId::states()
        .map(|e| {
            let quintile = shade(e).with_context(|| format!("no shade for {e}"))?;
            Ok((e, CartogramCell { value: values(e), quintile }))
        })
        .collect()
}

fn cmd_report(ctx: &Ctx) -> Result<()> {
    let (bundle, warning) = ctx.gated()?;
    let result = run_variant(&bundle, &ctx.cfg)?;
    let opts = ProfileOptions::default();
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();

    for ps in PsId::all() {
        for format in [Format::Md, Format::Json, Format::Csv] {
            files.push((
                format!("profiles/{ps}.{}", format.extension()),
                render_profile(ps, &bundle, &result, format, opts)?,
            ));
        }
        let doc = report::build_profile(ps, &bundle, &result, opts)?;
        files.push((format!("profiles/{ps}_bar.svg"), render_bar_svg(&doc)));
        let cells = cartogram_cells(|e| bundle.ps.get(e, ps), |e| result.quintiles.get(e, ps))?;
        files.push((
            format!("profiles/{ps}_map.svg"),
            render_grid_cartogram_svg(&doc.title, &cells)?,
        ));
    }

    let shades = sps_quintiles(&result);
    let sps = result.sps_map();
    let cells = cartogram_cells(|e| sps[&e], |e| shades.get(&e).copied())?;
    files.push((
        "sps_map.svg".into(),
        render_grid_cartogram_svg(&format!("Summary Process Statistic ({})", result.config.label()), &cells)?,
    ));
    for format in [Format::Md, Format::Csv, Format::Json] {
        files.push((format!("sps.{}", format.extension()), render_sps(&result, format, warning.as_deref())?));
    }
    files.push(("decomposition.md".into(), render_decomposition(&result, &bundle.published.table4, Format::Md)?));
    files.push(("weights.md".into(), render_weight_profile(&weight_profile(&result), Format::Md)?));

    let stats: Vec<_> = PsId::all().map(|ps| ps_summary(&bundle.ps, ps)).collect();
    files.push(("stats.md".into(), render_stats(&stats, Some(Format::Md))?));
    for id in [3, 1] {
        let ps = PsId::new(id)?;
        let top = top_quintile(&bundle.ps, ps, 11, ctx.cfg.tie_break)?;
        files.push((format!("top_{ps}.md"), render_top(ps, &top, Some(Format::Md))?));
    }

    files.push(("waffle_2020.svg".into(), render_waffle_svg(&bundle.published.table2, Census::Y2020, 500)?));
    files.push(("waffle_2010.svg".into(), render_waffle_svg(&bundle.published.table2, Census::Y2010, 500)?));

    let rec = reconcile(&bundle, &grid(&ctx.cfg))?;
    files.push(("reconciliation.md".into(), render_reconciliation(&rec, Format::Md)?));
    files.push(("validation.md".into(), render_validation(&validate(&bundle), Some(Format::Md))?));

    let out = OutDir::create(&ctx.out_dir())?;
    for (name, bytes) in &files {
        out.write(name, bytes)?;
    }
    eprintln!("wrote {} files to {}", files.len(), ctx.out_dir().display());
    Ok(())
}
