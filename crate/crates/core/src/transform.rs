//! Ranking, quintile bucketing, 2010 components and weight rules.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    catalog, EntityId, PsId, PsMatrix, QuintileMatrix, TieBreak, VariantConfig, ENTITY_COUNT,
    PS_COUNT, SCHEME_52,
};

/// Slack below zero tolerated for a derived 2010 component (2-decimal inputs).
pub const DERIVED_2010_SLACK: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedEntry {
    pub entity: EntityId,
    pub value: f64,
    /// 1-based position in the ascending order.
    pub rank: u32,
}

/// A PS column sorted ascending, ranks 1..n without gaps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedColumn {
    pub ps: PsId,
    pub entries: Vec<RankedEntry>,
}

impl RankedColumn {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entities(&self) -> impl DoubleEndedIterator<Item = EntityId> + '_ {
        self.entries.iter().map(|e| e.entity)
    }
}

/// Sorts an arbitrary `(entity, value)` column ascending, breaking ties by
/// canonical order (or its reverse). Input order is irrelevant.
pub fn rank_column(ps: PsId, column: &[(EntityId, f64)], tie_break: TieBreak) -> RankedColumn {
    let mut sorted = column.to_vec();
    sorted.sort_by(|(ea, va), (eb, vb)| {
        va.total_cmp(vb).then_with(|| match tie_break {
            TieBreak::ByCanonicalOrder => ea.cmp(eb),
            TieBreak::ByReverseCanonical => eb.cmp(ea),
        })
    });
    RankedColumn {
        ps,
        entries: sorted
            .into_iter()
            .enumerate()
            .map(|(i, (entity, value))| RankedEntry {
                entity,
                value,
                rank: i as u32 + 1,
            })
            .collect(),
    }
}

/// Ranks one PS column of the process-statistics table.
pub fn rank_entities(
    matrix: &PsMatrix,
    ps: PsId,
    include_us: bool,
    tie_break: TieBreak,
) -> RankedColumn {
    rank_column(ps, &matrix.column(ps, include_us), tie_break)
}

/// Bucket sizes for `n` ranked entities under `cfg`.
pub fn bucket_sizes(n: usize, cfg: &VariantConfig) -> Result<[usize; 5]> {
    match n {
        ENTITY_COUNT => Ok(SCHEME_52),
        n if n == ENTITY_COUNT - 1 => {
            cfg.validate()?;
            Ok(cfg.quintile_n51_scheme)
        }
        n => Err(Error::InvalidInput(format!(
            "quintile schemes exist for 52 or 51 entities, not {n}"
        ))),
    }
}

/// Positional quintiles for a column, returned in ascending rank order.
pub fn quintile_transform(
    ps: PsId,
    column: &[(EntityId, f64)],
    cfg: &VariantConfig,
) -> Result<Vec<(EntityId, u8)>> {
    let sizes = bucket_sizes(column.len(), cfg)?;
    Ok(bucket_ranked(&rank_column(ps, column, cfg.tie_break), sizes))
}

/// Cuts an ascending ranking into five consecutive buckets of the given sizes.
/// Entries past the last bucket are dropped.
pub fn bucket_ranked(ranked: &RankedColumn, sizes: [usize; 5]) -> Vec<(EntityId, u8)> {
    let mut out = Vec::with_capacity(ranked.n());
    let mut entries = ranked.entries.iter();
    for (bucket, &size) in sizes.iter().enumerate() {
        for entry in entries.by_ref().take(size) {
            out.push((entry.entity, bucket as u8 + 1));
        }
    }
    out
}

/// Quintiles for every PS. The US row is ranked only if the config says so.
pub fn quintile_matrix(matrix: &PsMatrix, cfg: &VariantConfig) -> Result<QuintileMatrix> {
    let mut q = QuintileMatrix::default();
    for ps in PsId::all() {
        let column = matrix.column(ps, cfg.include_us_in_quintiles);
        for (entity, quintile) in quintile_transform(ps, &column, cfg)? {
            q.set(entity, ps, quintile);
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived2010 {
    pub value: f64,
    /// Set when the derived percentage is negative beyond rounding slack.
    pub inconsistent: bool,
}

/// 2010 component implied by a 2020 component and the 2020−2010 difference.
pub fn derive_2010_component(c2020: f64, diff: f64) -> Derived2010 {
    let value = c2020 - diff;
    Derived2010 {
        value,
        inconsistent: value < -DERIVED_2010_SLACK - 1e-9,
    }
}

/// Sets the weight of each difference PS with a negative value to zero.
/// Returns the adjusted row and the zeroed ids.
pub fn zero_negative_weights(
    weights: &[f64; PS_COUNT],
    values: &[f64; PS_COUNT],
) -> ([f64; PS_COUNT], Vec<PsId>) {
    let mut out = *weights;
    let mut zeroed = Vec::new();
    for def in catalog() {
        let i = def.id.index();
        if def.is_difference() && values[i] < 0.0 {
            out[i] = 0.0;
            zeroed.push(def.id);
        }
    }
    (out, zeroed)
}

/// Divides a weight row by its sum.
pub fn scale_weights(row: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = row.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateWeights(format!(
            "row of {} weights sums to {total}",
            row.len()
        )));
    }
    Ok(row.iter().map(|w| w / total).collect())
}

/// Percent of addresses revised between the two address-file snapshots.
pub fn ps1_from_maf_counts(deletes: u64, adds: u64, common: u64) -> Result<f64> {
    let revised = deletes as f64 + adds as f64;
    let total = revised + common as f64;
    if total == 0.0 {
        return Err(Error::InvalidInput(
            "address counts are all zero".to_string(),
        ));
    }
    Ok(100.0 * revised / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(id: u32) -> PsId {
        PsId::new(id).unwrap()
    }

    fn e(code: &str) -> EntityId {
        EntityId::from_code(code).unwrap()
    }

    #[test]
    fn constant_column_follows_canonical_order() {
        let column: Vec<_> = EntityId::states().rev().map(|e| (e, 3.0)).collect();
        let ranked = rank_column(ps(1), &column, TieBreak::ByCanonicalOrder);
        let order: Vec<_> = ranked.entities().collect();
        assert_eq!(order, EntityId::states().collect::<Vec<_>>());
        let rev = rank_column(ps(1), &column, TieBreak::ByReverseCanonical);
        assert_eq!(rev.entries[0].entity, e("WY"));
    }

    #[test]
    fn increasing_column_endpoints() {
        let column: Vec<_> = EntityId::all().map(|e| (e, e.index() as f64)).collect();
        let q = quintile_transform(ps(1), &column, &VariantConfig::default()).unwrap();
        assert_eq!(q.first().unwrap().1, 1);
        assert_eq!(q.last().unwrap().1, 5);
        let counts = q.iter().fold([0; 5], |mut acc, (_, b)| {
            acc[*b as usize - 1] += 1;
            acc
        });
        assert_eq!(counts, [11, 10, 10, 10, 11]);
    }

    #[test]
    fn fifty_one_uses_configured_scheme() {
        let column: Vec<_> = EntityId::states().map(|e| (e, e.index() as f64)).collect();
        let cfg = VariantConfig {
            include_us_in_quintiles: false,
            quintile_n51_scheme: [10, 10, 11, 10, 10],
            ..VariantConfig::default()
        };
        let q = quintile_transform(ps(2), &column, &cfg).unwrap();
        assert_eq!(q.iter().filter(|(_, b)| *b == 3).count(), 11);
        assert!(bucket_sizes(40, &cfg).is_err());
    }

    #[test]
    fn derive_examples() {
        let d = derive_2010_component(25.44, 15.18);
        assert!((d.value - 10.26).abs() < 1e-9 && !d.inconsistent);
        assert_eq!(derive_2010_component(4.2, 0.0).value, 4.2);
        let bad = derive_2010_component(1.00, 1.10);
        assert!((bad.value + 0.10).abs() < 1e-9 && bad.inconsistent);
        assert!(!derive_2010_component(1.00, 1.005).inconsistent);
    }

    #[test]
    fn zeroing_scope() {
        // AL rows of the value and weight tables.
        let values = [14.38, 7.21, 15.18, 0.60, -1.72, -0.26, 3.51, 0.90, -0.44, 4.98];
        let weights = [14.38, 0.76, 25.44, 1.05, 4.34, 2.01, 3.51, 1.09, 0.10, 0.13];
        let (out, zeroed) = zero_negative_weights(&weights, &values);
        assert_eq!(out[0], 14.38);
        assert_eq!(out[4], 0.0);
        assert_eq!(zeroed, vec![ps(5), ps(6), ps(9)]);
        assert!((out.iter().sum::<f64>() - 46.36).abs() < 1e-9);
        let scaled = scale_weights(&out).unwrap();
        assert!((scaled[2] - 25.44 / 46.36).abs() < 1e-12);
        let (again, _) = zero_negative_weights(&out, &values);
        assert_eq!(again, out);
    }

    #[test]
    fn scaling_examples() {
        let row = [1.09, 54.32 - 1.09];
        let s = scale_weights(&row).unwrap();
        assert!((s[0] - 0.0201).abs() < 5e-4);
        assert_eq!(format!("{:.2}", s[0]), "0.02");
        let uniform = scale_weights(&[2.5; 10]).unwrap();
        assert!(uniform.iter().all(|w| (w - 0.1).abs() < 1e-15));
        assert!(matches!(scale_weights(&[0.0; 10]), Err(Error::DegenerateWeights(_))));
    }

    #[test]
    fn maf_counts() {
        assert_eq!(ps1_from_maf_counts(0, 0, 1000).unwrap(), 0.0);
        assert_eq!(ps1_from_maf_counts(40, 40, 0).unwrap(), 100.0);
        let v = ps1_from_maf_counts(500, 422, 9078).unwrap();
        assert_eq!(format!("{v:.2}"), "9.22");
        assert!(ps1_from_maf_counts(0, 0, 0).is_err());
    }
}
