//! Shared setup for the pipeline benchmarks.

use std::path::PathBuf;

use riskdex_core::DataBundle;

/// The data directory shipped at the workspace root.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Loads the shipped fixtures, panicking if they are missing.
pub fn fixture_bundle() -> DataBundle {
    DataBundle::load(fixture_dir()).expect("shipped fixtures load")
}
