//! Summary Process Statistic, phase decomposition and variant reconciliation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::spearman;
use crate::error::{Error, Result};
use crate::ingest::DataBundle;
use crate::model::{
    catalog, EntityId, EntitySps, Phase, SpsResult, UsSps, UsStatus, VariantConfig, DEFAULT_SCHEME_51,
    PHASE_COUNT, PS_COUNT,
};
use crate::transform::{quintile_matrix, scale_weights, zero_negative_weights};

/// AL value from the step-by-step weighting example, which disagrees with
/// the published SPS column (2.28).
pub const WORKED_EXAMPLE_AL_SPS: f64 = 2.38;

/// Number of largest deviations kept per variant.
pub const WORST_COUNT: usize = 5;

/// Weighted sum of quintiles, `Σ w·q`.
pub fn compute_sps(q: &[u8], w: &[f64]) -> Result<f64> {
    if q.len() != w.len() {
        return Err(Error::Misaligned {
            left: q.len(),
            right: w.len(),
        });
    }
    if let Some(bad) = q.iter().find(|q| !(1..=5).contains(*q)) {
        return Err(Error::InvalidInput(format!("quintile {bad} outside 1..=5")));
    }
    Ok(q.iter().zip(w).map(|(&q, w)| w * q as f64).sum())
}

/// Phase sums expressed as percentages of `sps`.
pub fn phase_percentages(phase_sums: &[f64; PHASE_COUNT], sps: f64) -> [f64; PHASE_COUNT] {
    phase_sums.map(|s| 100.0 * s / sps)
}

/// Share of the SPS contributed by each phase; `phases[i]` is the phase of term `i`.
pub fn decompose(q: &[u8], w: &[f64], phases: &[Phase]) -> Result<[f64; PHASE_COUNT]> {
    if phases.len() != q.len() {
        return Err(Error::Misaligned {
            left: q.len(),
            right: phases.len(),
        });
    }
    let sps = compute_sps(q, w)?;
    if sps <= 0.0 {
        return Err(Error::DegenerateWeights("weights sum to zero".into()));
    }
    let mut sums = [0.0; PHASE_COUNT];
    for ((&q, w), phase) in q.iter().zip(w).zip(phases) {
        sums[phase.index()] += w * q as f64;
    }
    Ok(phase_percentages(&sums, sps))
}

fn catalog_phases() -> [Phase; PS_COUNT] {
    std::array::from_fn(|i| catalog()[i].phase)
}

fn entity_sps(
    entity: EntityId,
    raw: &[f64; PS_COUNT],
    values: &[f64; PS_COUNT],
    q: &[u8; PS_COUNT],
    cfg: &VariantConfig,
) -> Result<EntitySps> {
    let (adjusted, zeroed) = if cfg.zero_negative_weights {
        zero_negative_weights(raw, values)
    } else {
        (*raw, Vec::new())
    };
    let scaled = scale_weights(&adjusted)
        .map_err(|_| Error::DegenerateWeights(entity.code().to_string()))?;
    let sps = compute_sps(q, &scaled)?;
    let phase_pct = decompose(q, &scaled, &catalog_phases())?;
    let mut scaled_weights = [0.0; PS_COUNT];
    scaled_weights.copy_from_slice(&scaled);
    Ok(EntitySps {
        entity,
        sps,
        phase_pct,
        zeroed,
        scaled_weights,
    })
}

/// Full pipeline for one rule variant.
pub fn run_variant(bundle: &DataBundle, cfg: &VariantConfig) -> Result<SpsResult> {
    cfg.validate()?;
    let quintiles = quintile_matrix(&bundle.ps, cfg)?;
    let mut entities = Vec::with_capacity(bundle.weights.len() + 1);

    let us_status = match cfg.us_sps {
        UsSps::Skip => UsStatus::Skipped,
        UsSps::DeriveWhereAvailable => match (us_weights(bundle), quintiles.row(EntityId::US)) {
            (Ok(raw), Some(q)) => {
                let us = EntityId::US;
                entities.push(entity_sps(us, &raw, bundle.ps.row(us), &q, cfg)?);
                UsStatus::Derived
            }
            (Err(reason), _) => UsStatus::Underivable { reason },
            (Ok(_), None) => UsStatus::Underivable {
                reason: "US is not ranked in the quintiles".into(),
            },
        },
    };

    for (entity, raw) in bundle.weights.rows() {
        let q = quintiles
            .row(entity)
            .ok_or_else(|| Error::InvalidInput(format!("{entity} has no quintile row")))?;
        entities.push(entity_sps(entity, raw, bundle.ps.row(entity), &q, cfg)?);
    }

    Ok(SpsResult {
        config: *cfg,
        quintiles,
        entities,
        us_status,
    })
}

/// National weights. The self-valued and component-based weights follow from
/// the value and component tables, but the rebased ones have no source.
fn us_weights(bundle: &DataBundle) -> std::result::Result<[f64; PS_COUNT], String> {
    use crate::model::WeightSource::*;
    let us = EntityId::US;
    let mut missing = Vec::new();
    let mut w = [0.0; PS_COUNT];
    for def in catalog() {
        let value = match def.weight_source {
            SelfValue => Some(bundle.ps.get(us, def.id)),
            Component2020 => bundle.components.get(us, def.id),
            RebasedIndependent => bundle.weights.get(us, def.id),
        };
        match value {
            Some(v) => w[def.id.index()] = v,
            None => missing.push(def.id.to_string()),
        }
    }
    if missing.is_empty() {
        Ok(w)
    } else {
        Err(format!("no national weight for {}", missing.join(", ")))
    }
}

/// Shade classes for the SPS map: positional quintiles of the non-US SPS
/// values (11/10/10/10/10), ties in canonical order.
pub fn sps_quintiles(result: &SpsResult) -> BTreeMap<EntityId, u8> {
    let mut states: Vec<(EntityId, f64)> = result
        .entities
        .iter()
        .filter(|r| !r.entity.is_us())
        .map(|r| (r.entity, r.sps))
        .collect();
    states.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let sizes = if states.len() == DEFAULT_SCHEME_51.iter().sum::<usize>() {
        DEFAULT_SCHEME_51
    } else {
        // Spread any other count as evenly as possible, front-loaded.
        let n = states.len();
        std::array::from_fn(|i| n / 5 + usize::from(i < n % 5))
    };
    let mut out = BTreeMap::new();
    let mut it = states.into_iter();
    for (bucket, size) in sizes.into_iter().enumerate() {
        for (entity, _) in it.by_ref().take(size) {
            out.insert(entity, bucket as u8 + 1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub entity: EntityId,
    pub published: f64,
    pub computed: f64,
    /// `computed − published`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    pub label: String,
    pub config: VariantConfig,
    pub max_abs_delta: f64,
    pub mean_abs_delta: f64,
    pub spearman: f64,
    /// Per-entity deviations in canonical order.
    pub deviations: Vec<Deviation>,
    /// Largest absolute deviations, biggest first.
    pub worst: Vec<Deviation>,
    pub us_status: UsStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlAnomaly {
    pub published: f64,
    pub worked_example: f64,
    /// Computed AL value under each variant, in report order.
    pub computed: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconciliationReport {
    pub variants: Vec<VariantSummary>,
    /// Index into `variants` of the smallest max |Δ|; first wins on ties.
    pub best: usize,
    pub al_anomaly: AlAnomaly,
}

impl ReconciliationReport {
    pub fn best_variant(&self) -> &VariantSummary {
        &self.variants[self.best]
    }
}

/// Runs each variant and measures its distance to the published SPS column
/// over the 51 non-US entities.
pub fn reconcile(bundle: &DataBundle, cfgs: &[VariantConfig]) -> Result<ReconciliationReport> {
    if cfgs.is_empty() {
        return Err(Error::InvalidConfig("no variants to reconcile".into()));
    }
    let al = EntityId::from_code("AL")?;
    let published = &bundle.published.published_sps;
    let mut variants = Vec::with_capacity(cfgs.len());
    let mut al_computed = Vec::with_capacity(cfgs.len());

    for cfg in cfgs {
        let result = run_variant(bundle, cfg)?;
        let deviations: Vec<Deviation> = result
            .entities
            .iter()
            .filter(|r| !r.entity.is_us())
            .map(|r| {
                let target = published.get(&r.entity).copied().ok_or_else(|| {
                    Error::InvalidInput(format!("no published SPS for {}", r.entity))
                })?;
                Ok(Deviation {
                    entity: r.entity,
                    published: target,
                    computed: r.sps,
                    delta: r.sps - target,
                })
            })
            .collect::<Result<_>>()?;

        let n = deviations.len() as f64;
        let max_abs_delta = deviations.iter().map(|d| d.delta.abs()).fold(0.0, f64::max);
        let mean_abs_delta = deviations.iter().map(|d| d.delta.abs()).sum::<f64>() / n;
        let computed: Vec<f64> = deviations.iter().map(|d| d.computed).collect();
        let targets: Vec<f64> = deviations.iter().map(|d| d.published).collect();
        let rho = spearman(&targets, &computed)?;

        let mut worst = deviations.clone();
        worst.sort_by(|a, b| b.delta.abs().total_cmp(&a.delta.abs()).then(a.entity.cmp(&b.entity)));
        worst.truncate(WORST_COUNT);

        let label = cfg.label();
        if let Some(r) = result.get(al) {
            al_computed.push((label.clone(), r.sps));
        }
        variants.push(VariantSummary {
            label,
            config: *cfg,
            max_abs_delta,
            mean_abs_delta,
            spearman: rho,
            deviations,
            worst,
            us_status: result.us_status,
        });
    }

    let best = variants
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| {
            if v.max_abs_delta < variants[best].max_abs_delta {
                i
            } else {
                best
            }
        });

    Ok(ReconciliationReport {
        variants,
        best,
        al_anomaly: AlAnomaly {
            published: published.get(&al).copied().unwrap_or(f64::NAN),
            worked_example: WORKED_EXAMPLE_AL_SPS,
            computed: al_computed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_anchor() {
        let w = [0.1; 10];
        assert!((compute_sps(&[5; 10], &w).unwrap() - 5.0).abs() < 1e-12);
        assert!((compute_sps(&[5], &[0.02]).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(compute_sps(&[1, 2], &[1.0]), Err(Error::Misaligned { .. })));
        assert!(compute_sps(&[0], &[1.0]).is_err());
    }

    #[test]
    fn worked_decomposition() {
        let pct = phase_percentages(&[0.5, 2.8, 0.6, 0.1, 0.1], 4.1);
        assert!((pct[0] - 12.2).abs() < 0.05);
        assert!((pct[1] - 68.3).abs() < 0.05);
    }

    #[test]
    fn single_phase_gets_everything() {
        let phases = catalog_phases();
        let mut w = [0.0; 10];
        w[4] = 1.0;
        let pct = decompose(&[3; 10], &w, &phases).unwrap();
        assert_eq!(pct, [0.0, 0.0, 100.0, 0.0, 0.0]);
    }
}
