//! Entity universe, process-statistic catalog and the shared value types.
//!
//! Everything here is immutable once built. Per-entity tables are stored in
//! canonical order (the row order of the process-statistics table: US first,
//! then the states with DC after DE), so iteration is deterministic without
//! any sorting at the call site.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of entities: 50 states, DC and the national row.
pub const ENTITY_COUNT: usize = 52;
/// Number of process statistics.
pub const PS_COUNT: usize = 10;
/// Number of census phases.
pub const PHASE_COUNT: usize = 5;

const ENTITIES: [(&str, &str); ENTITY_COUNT] = [
    ("US", "United States"),
    ("AL", "Alabama"),
    ("AK", "Alaska"),
    ("AZ", "Arizona"),
    ("AR", "Arkansas"),
    ("CA", "California"),
    ("CO", "Colorado"),
    ("CT", "Connecticut"),
    ("DE", "Delaware"),
    ("DC", "Washington, D.C."),
    ("FL", "Florida"),
    ("GA", "Georgia"),
    ("HI", "Hawaii"),
    ("ID", "Idaho"),
    ("IL", "Illinois"),
    ("IN", "Indiana"),
    ("IA", "Iowa"),
    ("KS", "Kansas"),
    ("KY", "Kentucky"),
    ("LA", "Louisiana"),
    ("ME", "Maine"),
    ("MD", "Maryland"),
    ("MA", "Massachusetts"),
    ("MI", "Michigan"),
    ("MN", "Minnesota"),
    ("MS", "Mississippi"),
    ("MO", "Missouri"),
    ("MT", "Montana"),
    ("NE", "Nebraska"),
    ("NV", "Nevada"),
    ("NH", "New Hampshire"),
    ("NJ", "New Jersey"),
    ("NM", "New Mexico"),
    ("NY", "New York"),
    ("NC", "North Carolina"),
    ("ND", "North Dakota"),
    ("OH", "Ohio"),
    ("OK", "Oklahoma"),
    ("OR", "Oregon"),
    ("PA", "Pennsylvania"),
    ("RI", "Rhode Island"),
    ("SC", "South Carolina"),
    ("SD", "South Dakota"),
    ("TN", "Tennessee"),
    ("TX", "Texas"),
    ("UT", "Utah"),
    ("VT", "Vermont"),
    ("VA", "Virginia"),
    ("WA", "Washington"),
    ("WV", "West Virginia"),
    ("WI", "Wisconsin"),
    ("WY", "Wyoming"),
];

/// A state, DC, or the national total.
///
/// Ordering follows the canonical row order, so a `BTreeMap<EntityId, _>`
/// iterates exactly like the source tables.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(u8);

impl EntityId {
    pub const US: EntityId = EntityId(0);

    pub fn from_code(code: &str) -> Result<Self> {
        ENTITIES
            .iter()
            .position(|(c, _)| *c == code)
            .map(|i| EntityId(i as u8))
            .ok_or_else(|| Error::UnknownEntity(code.to_string()))
    }

    pub fn from_index(index: usize) -> Option<Self> {
        (index < ENTITY_COUNT).then_some(EntityId(index as u8))
    }

    pub fn code(self) -> &'static str {
        ENTITIES[self.0 as usize].0
    }

    pub fn display_name(self) -> &'static str {
        ENTITIES[self.0 as usize].1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_us(self) -> bool {
        self == Self::US
    }

    /// All 52 entities in canonical order.
    pub fn all() -> impl DoubleEndedIterator<Item = EntityId> + ExactSizeIterator + Clone {
        (0..ENTITY_COUNT as u8).map(EntityId)
    }

    /// The 51 states plus DC, in canonical order.
    pub fn states() -> impl DoubleEndedIterator<Item = EntityId> + Clone {
        (1..ENTITY_COUNT as u8).map(EntityId)
    }
}

/// Canonical position of an entity code; `"US"` is 0.
pub fn canonical_index(code: &str) -> Result<usize> {
    EntityId::from_code(code).map(EntityId::index)
}

impl fmt::Debug for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for EntityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityId::from_code(s.trim())
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let code = String::deserialize(d)?;
        EntityId::from_code(&code).map_err(serde::de::Error::custom)
    }
}

/// Process statistic identifier, 1 through 10.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PsId(u8);

impl PsId {
    pub fn new(id: u32) -> Result<Self> {
        if (1..=PS_COUNT as u32).contains(&id) {
            Ok(PsId(id as u8))
        } else {
            Err(Error::UnknownPs(id))
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        (index < PS_COUNT).then_some(PsId(index as u8 + 1))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based column position.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl DoubleEndedIterator<Item = PsId> + ExactSizeIterator + Clone {
        (1..=PS_COUNT as u8).map(PsId)
    }

    pub fn def(self) -> &'static PsDef {
        &catalog()[self.index()]
    }
}

impl fmt::Debug for PsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ps{}", self.0)
    }
}

impl fmt::Display for PsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ps{}", self.0)
    }
}

impl FromStr for PsId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches("ps");
        let n: u32 = digits
            .parse()
            .map_err(|_| Error::InvalidInput(format!("`{s}` is not a process statistic id")))?;
        PsId::new(n)
    }
}

impl<'de> Deserialize<'de> for PsId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = u32::deserialize(d)?;
        PsId::new(n).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    MafDevelopment,
    SelfResponse,
    Nrfu,
    DataProcessing,
    GroupQuarters,
}

impl Phase {
    pub const ALL: [Phase; PHASE_COUNT] = [
        Phase::MafDevelopment,
        Phase::SelfResponse,
        Phase::Nrfu,
        Phase::DataProcessing,
        Phase::GroupQuarters,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::MafDevelopment => "MAF Development",
            Phase::SelfResponse => "Self-Response",
            Phase::Nrfu => "Nonresponse Follow-up",
            Phase::DataProcessing => "Data Processing",
            Phase::GroupQuarters => "Group Quarters",
        }
    }

    /// Column stem used in CSV headers (`maf_pct`, `sr_pct`, ...).
    pub fn column(self) -> &'static str {
        match self {
            Phase::MafDevelopment => "maf",
            Phase::SelfResponse => "sr",
            Phase::Nrfu => "nrfu",
            Phase::DataProcessing => "dp",
            Phase::GroupQuarters => "gq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsKind {
    /// A 2020 percentage.
    Level2020,
    /// 2020 percentage minus the matching 2010 percentage.
    Difference2020Minus2010,
}

/// Where a PS weight comes from, relative to the other tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    /// The weight equals the PS value itself.
    SelfValue,
    /// The weight equals the 2020 component of a difference PS.
    Component2020,
    /// Rebased to the whole state count; no reproducible relation to other tables.
    RebasedIndependent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsDef {
    pub id: PsId,
    pub short_name: &'static str,
    pub phase: Phase,
    pub kind: PsKind,
    pub weight_source: WeightSource,
    pub universe: &'static str,
}

impl PsDef {
    pub fn is_difference(&self) -> bool {
        self.kind == PsKind::Difference2020Minus2010
    }
}

const fn def(
    id: u8,
    short_name: &'static str,
    phase: Phase,
    kind: PsKind,
    weight_source: WeightSource,
    universe: &'static str,
) -> PsDef {
    PsDef {
        id: PsId(id),
        short_name,
        phase,
        kind,
        weight_source,
        universe,
    }
}

static CATALOG: [PsDef; PS_COUNT] = {
    use PsKind::*;
    use WeightSource::*;
    [
        def(1, "MAF Revisions", Phase::MafDevelopment, Level2020, SelfValue, "all addresses on the address file"),
        def(2, "Questionnaires Without ID not on MAF", Phase::SelfResponse, Level2020, RebasedIndependent, "housing units returning a questionnaire without a census ID"),
        def(3, "Multiple Responses", Phase::SelfResponse, Difference2020Minus2010, Component2020, "occupied housing units"),
        def(4, "Usual Residence at College", Phase::SelfResponse, Difference2020Minus2010, RebasedIndependent, "occupied housing units with two or more people"),
        def(5, "Responses Obtained by Proxy", Phase::Nrfu, Difference2020Minus2010, Component2020, "persons in occupied housing units"),
        def(6, "Enumerations With Only a Population Count", Phase::Nrfu, Difference2020Minus2010, Component2020, "occupied housing units"),
        def(7, "Enumerations via Administrative Records", Phase::Nrfu, Level2020, SelfValue, "occupied housing units"),
        def(8, "MAF Addresses Having Imputed Status", Phase::DataProcessing, Difference2020Minus2010, Component2020, "address file units"),
        def(9, "Occupied Housing Units With Imputed Population Counts", Phase::DataProcessing, Difference2020Minus2010, Component2020, "occupied housing units with known status"),
        def(10, "Group Quarters With Imputed Count", Phase::GroupQuarters, Level2020, RebasedIndependent, "group quarters population"),
    ]
};

/// The ten process-statistic definitions, ordered by id.
pub fn catalog() -> &'static [PsDef; PS_COUNT] {
    &CATALOG
}

/// The six difference-kind PSs, in the column order of the 2020-component table.
pub const DIFFERENCE_PS: [u8; 6] = [3, 4, 5, 6, 8, 9];

/// Entity × PS values plus the census-vs-estimate relative difference.
#[derive(Debug, Clone, PartialEq)]
pub struct PsMatrix {
    values: [[f64; PS_COUNT]; ENTITY_COUNT],
    rel_diff: [f64; ENTITY_COUNT],
}

impl PsMatrix {
    pub fn new(values: [[f64; PS_COUNT]; ENTITY_COUNT], rel_diff: [f64; ENTITY_COUNT]) -> Self {
        Self { values, rel_diff }
    }

    pub fn get(&self, entity: EntityId, ps: PsId) -> f64 {
        self.values[entity.index()][ps.index()]
    }

    pub fn row(&self, entity: EntityId) -> &[f64; PS_COUNT] {
        &self.values[entity.index()]
    }

    pub fn rel_diff(&self, entity: EntityId) -> f64 {
        self.rel_diff[entity.index()]
    }

    /// One PS column in canonical order, optionally including the US row.
    pub fn column(&self, ps: PsId, include_us: bool) -> Vec<(EntityId, f64)> {
        EntityId::all()
            .filter(|e| include_us || !e.is_us())
            .map(|e| (e, self.get(e, ps)))
            .collect()
    }

    /// Copy with one cell replaced.
    pub fn with_value(&self, entity: EntityId, ps: PsId, value: f64) -> Self {
        let mut out = self.clone();
        out.values[entity.index()][ps.index()] = value;
        out
    }
}

/// Raw (unscaled) weights, percent of the state count affected. No US row in
/// the source table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightMatrix {
    rows: BTreeMap<EntityId, [f64; PS_COUNT]>,
}

impl WeightMatrix {
    pub fn new(rows: BTreeMap<EntityId, [f64; PS_COUNT]>) -> Self {
        Self { rows }
    }

    pub fn row(&self, entity: EntityId) -> Option<&[f64; PS_COUNT]> {
        self.rows.get(&entity)
    }

    pub fn get(&self, entity: EntityId, ps: PsId) -> Option<f64> {
        self.row(entity).map(|r| r[ps.index()])
    }

    pub fn rows(&self) -> impl Iterator<Item = (EntityId, &[f64; PS_COUNT])> {
        self.rows.iter().map(|(e, r)| (*e, r))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// 2020 percentages behind the six difference PSs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Components2020 {
    rows: BTreeMap<EntityId, [f64; 6]>,
}

impl Components2020 {
    pub fn new(rows: BTreeMap<EntityId, [f64; 6]>) -> Self {
        Self { rows }
    }

    /// Position of a PS within [`DIFFERENCE_PS`], if it is a difference PS.
    pub fn slot(ps: PsId) -> Option<usize> {
        DIFFERENCE_PS.iter().position(|&p| p == ps.get())
    }

    pub fn get(&self, entity: EntityId, ps: PsId) -> Option<f64> {
        let slot = Self::slot(ps)?;
        self.rows.get(&entity).map(|r| r[slot])
    }

    pub fn row(&self, entity: EntityId) -> Option<&[f64; 6]> {
        self.rows.get(&entity)
    }

    pub fn rows(&self) -> impl Iterator<Item = (EntityId, &[f64; 6])> {
        self.rows.iter().map(|(e, r)| (*e, r))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Quintile ranks 1..=5 per entity and PS. Entities left out of the ranking
/// (US, when excluded) have no entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuintileMatrix {
    q: [[u8; PS_COUNT]; ENTITY_COUNT],
}

impl Default for QuintileMatrix {
    fn default() -> Self {
        Self {
            q: [[0; PS_COUNT]; ENTITY_COUNT],
        }
    }
}

impl QuintileMatrix {
    pub fn get(&self, entity: EntityId, ps: PsId) -> Option<u8> {
        match self.q[entity.index()][ps.index()] {
            0 => None,
            q => Some(q),
        }
    }

    pub fn set(&mut self, entity: EntityId, ps: PsId, quintile: u8) {
        debug_assert!((1..=5).contains(&quintile));
        self.q[entity.index()][ps.index()] = quintile;
    }

    /// The full row, if every PS has a quintile for this entity.
    pub fn row(&self, entity: EntityId) -> Option<[u8; PS_COUNT]> {
        let row = self.q[entity.index()];
        row.iter().all(|&q| q != 0).then_some(row)
    }

    /// Number of entities in each quintile bucket for one PS.
    pub fn bucket_sizes(&self, ps: PsId) -> [usize; 5] {
        let mut sizes = [0; 5];
        for e in EntityId::all() {
            if let Some(q) = self.get(e, ps) {
                sizes[q as usize - 1] += 1;
            }
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Equal values keep canonical entity order.
    #[default]
    ByCanonicalOrder,
    /// Equal values take reverse canonical order.
    ByReverseCanonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsSps {
    #[default]
    Skip,
    DeriveWhereAvailable,
}

/// Bucket sizes for the 52-entity ranking.
pub const SCHEME_52: [usize; 5] = [11, 10, 10, 10, 11];
/// Default bucket sizes when the US row is left out of the ranking.
pub const DEFAULT_SCHEME_51: [usize; 5] = [11, 10, 10, 10, 10];

/// Rule choices the source methodology leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub include_us_in_quintiles: bool,
    pub zero_negative_weights: bool,
    pub tie_break: TieBreak,
    pub us_sps: UsSps,
    pub quintile_n51_scheme: [usize; 5],
}

impl Default for VariantConfig {
    fn default() -> Self {
        Self {
            include_us_in_quintiles: true,
            zero_negative_weights: true,
            tie_break: TieBreak::ByCanonicalOrder,
            us_sps: UsSps::Skip,
            quintile_n51_scheme: DEFAULT_SCHEME_51,
        }
    }
}

impl VariantConfig {
    pub fn validate(&self) -> Result<()> {
        let total: usize = self.quintile_n51_scheme.iter().sum();
        if total != ENTITY_COUNT - 1 {
            return Err(Error::InvalidConfig(format!(
                "51-entity quintile scheme {:?} sums to {total}, not 51",
                self.quintile_n51_scheme
            )));
        }
        if self.quintile_n51_scheme.contains(&0) {
            return Err(Error::InvalidConfig(
                "51-entity quintile scheme has an empty bucket".into(),
            ));
        }
        Ok(())
    }

    /// Short stable label, e.g. `us-in/zero-on`.
    pub fn label(&self) -> String {
        let mut label = format!(
            "us-{}/zero-{}",
            if self.include_us_in_quintiles { "in" } else { "out" },
            if self.zero_negative_weights { "on" } else { "off" },
        );
        if self.tie_break == TieBreak::ByReverseCanonical {
            label.push_str("/tie-rev");
        }
        if !self.include_us_in_quintiles && self.quintile_n51_scheme != DEFAULT_SCHEME_51 {
            let s = self.quintile_n51_scheme;
            label.push_str(&format!("/n51-{}-{}-{}-{}-{}", s[0], s[1], s[2], s[3], s[4]));
        }
        label
    }

    /// {US in, US out} × {zeroing on, off} with canonical tie-break.
    pub fn default_grid() -> Vec<VariantConfig> {
        let mut grid = Vec::with_capacity(4);
        for include_us in [true, false] {
            for zero in [true, false] {
                grid.push(VariantConfig {
                    include_us_in_quintiles: include_us,
                    zero_negative_weights: zero,
                    ..VariantConfig::default()
                });
            }
        }
        grid
    }
}

/// SPS and decomposition for one entity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntitySps {
    pub entity: EntityId,
    pub sps: f64,
    /// Percent of the SPS contributed by each phase, in [`Phase::ALL`] order.
    pub phase_pct: [f64; PHASE_COUNT],
    pub zeroed: Vec<PsId>,
    pub scaled_weights: [f64; PS_COUNT],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UsStatus {
    Skipped,
    Derived,
    /// Derivation was requested but these inputs were unavailable.
    Underivable { reason: String },
}

/// Output of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpsResult {
    pub config: VariantConfig,
    pub quintiles: QuintileMatrix,
    /// Computed entities in canonical order.
    pub entities: Vec<EntitySps>,
    pub us_status: UsStatus,
}

impl SpsResult {
    pub fn get(&self, entity: EntityId) -> Option<&EntitySps> {
        self.entities.iter().find(|r| r.entity == entity)
    }

    pub fn sps_map(&self) -> BTreeMap<EntityId, f64> {
        self.entities.iter().map(|r| (r.entity, r.sps)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table4Row {
    pub entity: EntityId,
    pub sps: f64,
    pub phase_pct: [f64; PHASE_COUNT],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodShare {
    pub method: String,
    pub pct_2020: f64,
    pub pct_2010: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEntry {
    /// `None` for the unranked national row.
    pub rank: Option<u32>,
    pub entity: EntityId,
    pub value: f64,
}

/// Published tables used as golden and reconciliation targets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PublishedReference {
    pub published_sps: BTreeMap<EntityId, f64>,
    pub table4: Vec<Table4Row>,
    pub table2: Vec<MethodShare>,
    /// Published profile tables in printed order; a PS may be absent.
    pub profile_orders: BTreeMap<PsId, Vec<ProfileEntry>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_endpoints() {
        let c = catalog();
        assert_eq!(c[0].id.get(), 1);
        assert_eq!(c[0].phase, Phase::MafDevelopment);
        assert_eq!(c[0].kind, PsKind::Level2020);
        assert_eq!(c[9].id.get(), 10);
        assert_eq!(c[9].phase, Phase::GroupQuarters);
        assert_eq!(c[9].kind, PsKind::Level2020);
        assert_eq!(c.iter().filter(|d| d.is_difference()).count(), 6);
    }

    #[test]
    fn catalog_invariants() {
        let c = catalog();
        for (i, d) in c.iter().enumerate() {
            assert_eq!(d.id.index(), i);
            let id = d.id.get();
            assert_eq!(d.is_difference(), DIFFERENCE_PS.contains(&id), "kind of {id}");
            let phase = match id {
                1 => Phase::MafDevelopment,
                2..=4 => Phase::SelfResponse,
                5..=7 => Phase::Nrfu,
                8 | 9 => Phase::DataProcessing,
                _ => Phase::GroupQuarters,
            };
            assert_eq!(d.phase, phase);
            let source = match id {
                1 | 7 => WeightSource::SelfValue,
                2 | 4 | 10 => WeightSource::RebasedIndependent,
                _ => WeightSource::Component2020,
            };
            assert_eq!(d.weight_source, source);
        }
        assert!(std::ptr::eq(catalog(), catalog()));
    }

    #[test]
    fn canonical_index_examples() {
        assert_eq!(canonical_index("US").unwrap(), 0);
        assert_eq!(canonical_index("AL").unwrap(), 1);
        assert_eq!(
            canonical_index("DC").unwrap(),
            canonical_index("DE").unwrap() + 1
        );
        match canonical_index("ZZ") {
            Err(Error::UnknownEntity(code)) => assert_eq!(code, "ZZ"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn canonical_index_is_bijective() {
        let mut seen = [false; ENTITY_COUNT];
        for e in EntityId::all() {
            let i = canonical_index(e.code()).unwrap();
            assert_eq!(i, e.index());
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(EntityId::all().filter(|e| e.is_us()).count(), 1);
        assert_eq!(EntityId::states().count(), 51);
    }

    #[test]
    fn ps_id_parsing() {
        assert_eq!("ps3".parse::<PsId>().unwrap().get(), 3);
        assert_eq!("10".parse::<PsId>().unwrap().get(), 10);
        assert!(matches!(PsId::new(0), Err(Error::UnknownPs(0))));
        assert!(matches!(PsId::new(11), Err(Error::UnknownPs(11))));
    }

    #[test]
    fn variant_labels_and_grid() {
        let grid = VariantConfig::default_grid();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[0], VariantConfig::default());
        let labels: Vec<_> = grid.iter().map(VariantConfig::label).collect();
        assert_eq!(
            labels,
            ["us-in/zero-on", "us-in/zero-off", "us-out/zero-on", "us-out/zero-off"]
        );
    }

    #[test]
    fn n51_scheme_must_sum_to_51() {
        let cfg = VariantConfig {
            quintile_n51_scheme: [10, 10, 10, 10, 10],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        assert!(VariantConfig::default().validate().is_ok());
    }
}
