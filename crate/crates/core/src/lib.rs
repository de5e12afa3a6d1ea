//! Process-statistic risk scoring for census operations.
//!
//! The pipeline ranks each process statistic into positional quintiles,
//! weights them by the share of the state count each one touches, and sums
//! the result into a Summary Process Statistic (SPS) per state. Supporting
//! modules load and cross-check the source tables, reproduce the summary
//! analyses, and render profiles and charts.

pub mod aggregate;
pub mod analysis;
pub mod error;
pub mod ingest;
pub mod model;
pub mod report;
pub mod transform;

pub use aggregate::{reconcile, run_variant, ReconciliationReport};
pub use error::{Error, ErrorClass, Result};
pub use ingest::{validate, DataBundle, ValidationReport};
pub use model::{
    catalog, canonical_index, Components2020, EntityId, EntitySps, Phase, PsDef, PsId, PsKind,
    PsMatrix, PublishedReference, QuintileMatrix, SpsResult, TieBreak, UsSps, UsStatus,
    VariantConfig, WeightMatrix, WeightSource,
};
