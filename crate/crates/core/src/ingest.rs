//! Fixture loading, re-serialization and cross-table validation.
//!
//! Every table is a small UTF-8 CSV with one header row. Loaders check the
//! header, the column count, numeric parsing and completeness, and report the
//! offending row and column. The `write_*` functions emit the exact layout the
//! loaders accept, so load → write is byte-identical on the shipped fixtures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    catalog, Components2020, EntityId, MethodShare, ProfileEntry, PsId, PsKind, PsMatrix,
    PublishedReference, Table4Row, WeightMatrix, WeightSource, DIFFERENCE_PS, ENTITY_COUNT,
    PHASE_COUNT, PS_COUNT,
};
use crate::transform::derive_2010_component;

pub const A1_FILE: &str = "a1_process_statistics.csv";
pub const A2_FILE: &str = "a2_weights.csv";
pub const A3_FILE: &str = "a3_components_2020.csv";
pub const SPS_FILE: &str = "published_sps.csv";
pub const TABLE4_FILE: &str = "published_table4.csv";
pub const TABLE2_FILE: &str = "published_table2.csv";
pub const ERRATA_FILE: &str = "errata.csv";

const A1_HEADER: &str = "state,rel_diff,ps1,ps2,ps3,ps4,ps5,ps6,ps7,ps8,ps9,ps10";
const A2_HEADER: &str = "state,ps1,ps2,ps3,ps4,ps5,ps6,ps7,ps8,ps9,ps10";
const A3_HEADER: &str = "state,ps3,ps4,ps5,ps6,ps8,ps9";
const SPS_HEADER: &str = "state,sps";
const TABLE4_HEADER: &str = "state,sps,maf_pct,sr_pct,nrfu_pct,dp_pct,gq_pct";
const TABLE2_HEADER: &str = "method,pct_2020,pct_2010";
const PROFILE_HEADER: &str = "rank,state,value";
const ERRATA_HEADER: &str = "check,state,ps,note";

/// Tolerance for weight-vs-component and weight-vs-value agreement.
pub const CROSS_CHECK_TOLERANCE: f64 = 0.015;
pub use crate::transform::DERIVED_2010_SLACK;

/// Tolerance for published profile values against the process-statistics table.
pub const PROFILE_VALUE_TOLERANCE: f64 = 0.005;

pub fn profile_file(ps: PsId) -> String {
    format!("published_profile_order_ps{}.csv", ps.get())
}

/// Everything loaded from one data directory.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBundle {
    pub ps: PsMatrix,
    pub weights: WeightMatrix,
    pub components: Components2020,
    pub published: PublishedReference,
    pub errata: Vec<Erratum>,
}

impl DataBundle {
    /// Loads every fixture from `dir`. The errata registry is optional.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let errata_path = dir.join(ERRATA_FILE);
        let errata = if errata_path.exists() {
            load_errata(&errata_path)?
        } else {
            Vec::new()
        };
        Ok(Self {
            ps: load_ps_matrix(dir.join(A1_FILE))?,
            weights: load_weights(dir.join(A2_FILE))?,
            components: load_components(dir.join(A3_FILE))?,
            published: load_published(dir)?,
            errata,
        })
    }
}

struct Table {
    file: String,
    rows: Vec<(u64, Vec<String>)>,
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_table(path: &Path, header: &str) -> Result<Table> {
    let file = file_label(path);
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes.as_slice());
    let expected: Vec<&str> = header.split(',').collect();
    let mut rows = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv {
            file: file.clone(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let cells: Vec<String> = record.iter().map(|c| c.trim().to_string()).collect();
        if !saw_header {
            if cells != expected {
                return Err(Error::Header {
                    file,
                    expected: header.to_string(),
                    found: cells.join(","),
                });
            }
            saw_header = true;
            continue;
        }
        if cells.len() == 1 && cells[0].is_empty() {
            continue;
        }
        if cells.len() != expected.len() {
            return Err(Error::ColumnCount {
                file,
                line,
                expected: expected.len(),
                found: cells.len(),
            });
        }
        rows.push((line, cells));
    }
    if !saw_header {
        return Err(Error::Header {
            file,
            expected: header.to_string(),
            found: String::new(),
        });
    }
    Ok(Table { file, rows })
}

impl Table {
    fn number(&self, line: u64, column: &str, cell: &str) -> Result<f64> {
        cell.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::NonNumeric {
                file: self.file.clone(),
                line,
                column: column.to_string(),
                value: cell.to_string(),
            })
    }

    fn entity(&self, line: u64, cell: &str) -> Result<EntityId> {
        EntityId::from_code(cell).map_err(|_| Error::Csv {
            file: self.file.clone(),
            message: format!("line {line}: unknown entity code `{cell}`"),
        })
    }

    fn numbers<const N: usize>(
        &self,
        line: u64,
        header: &str,
        cells: &[String],
    ) -> Result<[f64; N]> {
        let columns: Vec<&str> = header.split(',').skip(1).collect();
        let mut out = [0.0; N];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.number(line, columns[i], &cells[i + 1])?;
        }
        Ok(out)
    }

    /// Keyed rows, rejecting duplicates and checking completeness over `expected`.
    fn keyed<const N: usize>(
        &self,
        header: &str,
        expected: impl Iterator<Item = EntityId>,
    ) -> Result<BTreeMap<EntityId, (u64, [f64; N])>> {
        let mut out = BTreeMap::new();
        for (line, cells) in &self.rows {
            let entity = self.entity(*line, &cells[0])?;
            let values = self.numbers::<N>(*line, header, cells)?;
            if out.insert(entity, (*line, values)).is_some() {
                return Err(Error::DuplicateEntity {
                    file: self.file.clone(),
                    line: *line,
                    entity: entity.code().to_string(),
                });
            }
        }
        for e in expected {
            if !out.contains_key(&e) {
                return Err(Error::MissingEntity {
                    file: self.file.clone(),
                    entity: e.code().to_string(),
                });
            }
        }
        Ok(out)
    }

    fn reject_negative(&self, entity: EntityId, line: u64, header: &str, values: &[f64]) -> Result<()> {
        let columns: Vec<&str> = header.split(',').skip(1).collect();
        match values.iter().position(|v| *v < 0.0) {
            Some(i) => Err(Error::NegativeValue {
                file: self.file.clone(),
                line,
                entity: entity.code().to_string(),
                column: columns[i].to_string(),
                value: values[i],
            }),
            None => Ok(()),
        }
    }
}

/// Loads the process-statistics table (52 rows, relative difference + 10 PSs).
pub fn load_ps_matrix(path: impl AsRef<Path>) -> Result<PsMatrix> {
    let table = read_table(path.as_ref(), A1_HEADER)?;
    let rows = table.keyed::<11>(A1_HEADER, EntityId::all())?;
    let mut values = [[0.0; PS_COUNT]; ENTITY_COUNT];
    let mut rel_diff = [0.0; ENTITY_COUNT];
    for (entity, (_, row)) in rows {
        rel_diff[entity.index()] = row[0];
        values[entity.index()].copy_from_slice(&row[1..]);
    }
    Ok(PsMatrix::new(values, rel_diff))
}

/// Loads the raw weight table (51 rows, no US).
pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let table = read_table(path.as_ref(), A2_HEADER)?;
    if let Some((line, _)) = table.rows.iter().find(|(_, c)| c[0] == "US") {
        return Err(Error::UnexpectedUsRow {
            file: table.file.clone(),
            line: *line,
        });
    }
    let rows = table.keyed::<PS_COUNT>(A2_HEADER, EntityId::states())?;
    let mut out = BTreeMap::new();
    for (entity, (line, row)) in rows {
        table.reject_negative(entity, line, A2_HEADER, &row)?;
        out.insert(entity, row);
    }
    Ok(WeightMatrix::new(out))
}

/// Loads the 2020 components of the six difference PSs (52 rows).
pub fn load_components(path: impl AsRef<Path>) -> Result<Components2020> {
    let table = read_table(path.as_ref(), A3_HEADER)?;
    let rows = table.keyed::<6>(A3_HEADER, EntityId::all())?;
    let mut out = BTreeMap::new();
    for (entity, (line, row)) in rows {
        table.reject_negative(entity, line, A3_HEADER, &row)?;
        out.insert(entity, row);
    }
    Ok(Components2020::new(out))
}

fn load_published_sps(path: &Path) -> Result<BTreeMap<EntityId, f64>> {
    let table = read_table(path, SPS_HEADER)?;
    let rows = table.keyed::<1>(SPS_HEADER, EntityId::all())?;
    Ok(rows.into_iter().map(|(e, (_, v))| (e, v[0])).collect())
}

fn load_table4(path: &Path) -> Result<Vec<Table4Row>> {
    let table = read_table(path, TABLE4_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, cells) in &table.rows {
        let entity = table.entity(*line, &cells[0])?;
        let v = table.numbers::<6>(*line, TABLE4_HEADER, cells)?;
        let mut phase_pct = [0.0; PHASE_COUNT];
        phase_pct.copy_from_slice(&v[1..]);
        out.push(Table4Row {
            entity,
            sps: v[0],
            phase_pct,
        });
    }
    if out.len() != 7 {
        return Err(Error::RowCount {
            file: table.file,
            expected: 7,
            found: out.len(),
        });
    }
    Ok(out)
}

fn load_table2(path: &Path) -> Result<Vec<MethodShare>> {
    let table = read_table(path, TABLE2_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, cells) in &table.rows {
        out.push(MethodShare {
            method: cells[0].clone(),
            pct_2020: table.number(*line, "pct_2020", &cells[1])?,
            pct_2010: table.number(*line, "pct_2010", &cells[2])?,
        });
    }
    for (column, sum) in [
        ("pct_2020", out.iter().map(|m| m.pct_2020).sum::<f64>()),
        ("pct_2010", out.iter().map(|m| m.pct_2010).sum::<f64>()),
    ] {
        if (sum - 100.0).abs() > 0.1 + 1e-9 {
            return Err(Error::ColumnSum {
                file: table.file.clone(),
                column: column.to_string(),
                sum,
            });
        }
    }
    Ok(out)
}

fn load_profile_order(path: &Path) -> Result<Vec<ProfileEntry>> {
    let table = read_table(path, PROFILE_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, cells) in &table.rows {
        let rank = if cells[0].is_empty() {
            None
        } else {
            Some(cells[0].parse::<u32>().map_err(|_| Error::NonNumeric {
                file: table.file.clone(),
                line: *line,
                column: "rank".into(),
                value: cells[0].clone(),
            })?)
        };
        out.push(ProfileEntry {
            rank,
            entity: table.entity(*line, &cells[1])?,
            value: table.number(*line, "value", &cells[2])?,
        });
    }
    Ok(out)
}

/// Loads the published reference tables from `dir`.
///
/// The SPS column, Table 4 and Table 2 are required; profile orders are
/// loaded for each PS whose file exists, and at least one must.
pub fn load_published(dir: impl AsRef<Path>) -> Result<PublishedReference> {
    let dir = dir.as_ref();
    let mut profile_orders = BTreeMap::new();
    for ps in PsId::all() {
        let path = dir.join(profile_file(ps));
        if path.exists() {
            profile_orders.insert(ps, load_profile_order(&path)?);
        }
    }
    if profile_orders.is_empty() {
        return Err(Error::Io {
            path: dir.join("published_profile_order_ps*.csv"),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no profile order files"),
        });
    }
    Ok(PublishedReference {
        published_sps: load_published_sps(&dir.join(SPS_FILE))?,
        table4: load_table4(&dir.join(TABLE4_FILE))?,
        table2: load_table2(&dir.join(TABLE2_FILE))?,
        profile_orders,
    })
}

/// Loads the known-errata registry.
pub fn load_errata(path: impl AsRef<Path>) -> Result<Vec<Erratum>> {
    let table = read_table(path.as_ref(), ERRATA_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, cells) in &table.rows {
        let check = CheckId::from_name(&cells[0]).ok_or_else(|| Error::Csv {
            file: table.file.clone(),
            message: format!("line {line}: unknown check `{}`", cells[0]),
        })?;
        let entity = if cells[1].is_empty() {
            None
        } else {
            Some(table.entity(*line, &cells[1])?)
        };
        let ps = if cells[2].is_empty() {
            None
        } else {
            Some(cells[2].parse::<PsId>().map_err(|_| Error::NonNumeric {
                file: table.file.clone(),
                line: *line,
                column: "ps".into(),
                value: cells[2].clone(),
            })?)
        };
        out.push(Erratum {
            check,
            entity,
            ps,
            note: cells[3].clone(),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn join_fixed(values: &[f64], decimals: usize) -> String {
    values
        .iter()
        .map(|v| format!("{v:.decimals$}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_ps_matrix(ps: &PsMatrix) -> String {
    let mut out = format!("{A1_HEADER}\n");
    for e in EntityId::all() {
        let mut row = vec![ps.rel_diff(e)];
        row.extend_from_slice(ps.row(e));
        let _ = writeln!(out, "{},{}", e.code(), join_fixed(&row, 2));
    }
    out
}

pub fn write_weights(weights: &WeightMatrix) -> String {
    let mut out = format!("{A2_HEADER}\n");
    for (e, row) in weights.rows() {
        let _ = writeln!(out, "{},{}", e.code(), join_fixed(row, 2));
    }
    out
}

pub fn write_components(components: &Components2020) -> String {
    let mut out = format!("{A3_HEADER}\n");
    for (e, row) in components.rows() {
        let _ = writeln!(out, "{},{}", e.code(), join_fixed(row, 2));
    }
    out
}

pub fn write_published_sps(sps: &BTreeMap<EntityId, f64>) -> String {
    let mut out = format!("{SPS_HEADER}\n");
    for (e, v) in sps {
        let _ = writeln!(out, "{},{v:.2}", e.code());
    }
    out
}

pub fn write_table4(rows: &[Table4Row]) -> String {
    let mut out = format!("{TABLE4_HEADER}\n");
    for r in rows {
        let mut v = vec![r.sps];
        v.extend_from_slice(&r.phase_pct);
        let _ = writeln!(out, "{},{}", r.entity.code(), join_fixed(&v, 1));
    }
    out
}

pub fn write_table2(rows: &[MethodShare]) -> String {
    let mut out = format!("{TABLE2_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.1},{:.1}", r.method, r.pct_2020, r.pct_2010);
    }
    out
}

pub fn write_profile_order(rows: &[ProfileEntry]) -> String {
    let mut out = format!("{PROFILE_HEADER}\n");
    for r in rows {
        let rank = r.rank.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{rank},{},{:.2}", r.entity.code(), r.value);
    }
    out
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    /// Weight equals the 2020 component, PS 3, 5, 6, 8, 9.
    WeightEqComponent,
    /// Weight equals the PS value, PS 1 and 7.
    WeightEqValue,
    /// 2020 component minus the difference PS is a valid percentage.
    Derived2010NonNegative,
    /// Level PSs are nonnegative.
    LevelNonNegative,
    /// The published profile order is nondecreasing in the table values.
    ProfileRankOrder,
    /// Published profile values agree with the table values.
    ProfileValue,
}

impl CheckId {
    pub fn name(self) -> &'static str {
        match self {
            CheckId::WeightEqComponent => "weight_eq_component",
            CheckId::WeightEqValue => "weight_eq_value",
            CheckId::Derived2010NonNegative => "derived_2010_nonnegative",
            CheckId::LevelNonNegative => "level_nonnegative",
            CheckId::ProfileRankOrder => "profile_rank_order",
            CheckId::ProfileValue => "profile_value",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            CheckId::WeightEqComponent,
            CheckId::WeightEqValue,
            CheckId::Derived2010NonNegative,
            CheckId::LevelNonNegative,
            CheckId::ProfileRankOrder,
            CheckId::ProfileValue,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

/// A documented, known deviation in the source tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Erratum {
    pub check: CheckId,
    /// `None` matches any entity.
    pub entity: Option<EntityId>,
    /// `None` matches any PS.
    pub ps: Option<PsId>,
    pub note: String,
}

impl Erratum {
    fn covers(&self, check: &Check) -> bool {
        self.check == check.id
            && self.entity.map_or(true, |e| check.entity == Some(e))
            && self.ps.map_or(true, |p| check.ps == Some(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: CheckId,
    pub entity: Option<EntityId>,
    pub ps: Option<PsId>,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Note of the erratum covering this failure, if any.
    pub erratum: Option<String>,
}

impl Check {
    /// Failed and not explained by the errata registry.
    pub fn is_unexplained_failure(&self) -> bool {
        !self.passed && self.erratum.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub errata: Vec<Erratum>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.is_unexplained_failure())
    }

    pub fn errata_hits(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && c.erratum.is_some())
    }

    pub fn is_ok(&self) -> bool {
        self.failures().next().is_none()
    }
}

struct Checks<'a> {
    errata: &'a [Erratum],
    out: Vec<Check>,
}

impl Checks<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        id: CheckId,
        entity: Option<EntityId>,
        ps: Option<PsId>,
        expected: f64,
        actual: f64,
        tolerance: f64,
        passed: bool,
    ) {
        let mut check = Check {
            id,
            entity,
            ps,
            expected,
            actual,
            tolerance,
            passed,
            erratum: None,
        };
        if !passed {
            check.erratum = self
                .errata
                .iter()
                .find(|e| e.covers(&check))
                .map(|e| e.note.clone());
        }
        self.out.push(check);
    }
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    // Two-decimal fixtures: compare with a hair of float slack.
    (a - b).abs() <= tol + 1e-9
}

/// Runs every cross-table check. Failures become report entries.
pub fn validate(bundle: &DataBundle) -> ValidationReport {
    let mut checks = Checks {
        errata: &bundle.errata,
        out: Vec::new(),
    };
    let cat = catalog();

    for e in EntityId::all() {
        for def in cat {
            let ps = def.id;
            let value = bundle.ps.get(e, ps);
            let weight = bundle.weights.get(e, ps);
            let component = bundle.components.get(e, ps);

            if def.kind == PsKind::Level2020 {
                checks.push(CheckId::LevelNonNegative, Some(e), Some(ps), 0.0, value, 0.0, value >= 0.0);
            }
            match (def.weight_source, weight) {
                (WeightSource::Component2020, Some(w)) => {
                    let c = component.unwrap_or(f64::NAN);
                    checks.push(
                        CheckId::WeightEqComponent,
                        Some(e),
                        Some(ps),
                        c,
                        w,
                        CROSS_CHECK_TOLERANCE,
                        within(w, c, CROSS_CHECK_TOLERANCE),
                    );
                }
                (WeightSource::SelfValue, Some(w)) => checks.push(
                    CheckId::WeightEqValue,
                    Some(e),
                    Some(ps),
                    value,
                    w,
                    CROSS_CHECK_TOLERANCE,
                    within(w, value, CROSS_CHECK_TOLERANCE),
                ),
                _ => {}
            }
            if let Some(c) = component {
                let derived = derive_2010_component(c, value);
                checks.push(
                    CheckId::Derived2010NonNegative,
                    Some(e),
                    Some(ps),
                    0.0,
                    derived.value,
                    DERIVED_2010_SLACK,
                    !derived.inconsistent,
                );
            }
        }
    }

    for ps in PsId::all() {
        match bundle.published.profile_orders.get(&ps) {
            Some(rows) => check_profile(&mut checks, bundle, ps, rows),
            // No published table: one file expected, none found.
            None => checks.push(CheckId::ProfileRankOrder, None, Some(ps), 1.0, 0.0, 0.0, false),
        }
    }

    ValidationReport {
        checks: checks.out,
        errata: bundle.errata.clone(),
    }
}

fn check_profile(checks: &mut Checks<'_>, bundle: &DataBundle, ps: PsId, rows: &[ProfileEntry]) {
    let ranked: Vec<&ProfileEntry> = rows.iter().filter(|r| r.rank.is_some()).collect();
    let us_ranked = ranked.iter().any(|r| r.entity.is_us());

    // Ranks are 1..n in printed order and cover exactly the expected entities.
    let mut seen = [false; ENTITY_COUNT];
    for (i, r) in ranked.iter().enumerate() {
        let rank_ok = r.rank == Some(i as u32 + 1) && !seen[r.entity.index()];
        seen[r.entity.index()] = true;
        if !rank_ok {
            checks.push(
                CheckId::ProfileRankOrder,
                Some(r.entity),
                Some(ps),
                (i + 1) as f64,
                r.rank.unwrap_or(0) as f64,
                0.0,
                false,
            );
        }
    }
    for e in EntityId::all().filter(|e| us_ranked || !e.is_us()) {
        if !seen[e.index()] {
            checks.push(CheckId::ProfileRankOrder, Some(e), Some(ps), 1.0, 0.0, 0.0, false);
        }
    }

    // Table values must be nondecreasing along the published order.
    let mut previous = f64::NEG_INFINITY;
    for r in &ranked {
        let value = bundle.ps.get(r.entity, ps);
        checks.push(
            CheckId::ProfileRankOrder,
            Some(r.entity),
            Some(ps),
            previous,
            value,
            0.0,
            value >= previous,
        );
        previous = previous.max(value);
    }

    for r in rows {
        let value = bundle.ps.get(r.entity, ps);
        checks.push(
            CheckId::ProfileValue,
            Some(r.entity),
            Some(ps),
            value,
            r.value,
            PROFILE_VALUE_TOLERANCE,
            within(r.value, value, PROFILE_VALUE_TOLERANCE),
        );
    }
}

/// Difference-kind PS ids as [`PsId`]s.
pub fn difference_ps() -> impl Iterator<Item = PsId> {
    DIFFERENCE_PS.iter().map(|&p| PsId::new(p as u32).expect("static id"))
}
