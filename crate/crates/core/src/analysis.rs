//! Summary statistics, top lists, correlations and weight profiles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EntityId, PsId, PsMatrix, SpsResult, TieBreak, ENTITY_COUNT};
use crate::transform::rank_entities;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsSummary {
    pub ps_id: PsId,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    /// `range / mean`, keeping the sign of the mean. Zero for a constant column.
    pub relative_range: f64,
}

/// Mean, extremes and relative range of a column of values.
pub fn summary_stats(ps_id: PsId, values: &[f64]) -> Result<PsSummary> {
    if values.is_empty() {
        return Err(Error::InvalidInput("summary of an empty column".into()));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let relative_range = if range == 0.0 { 0.0 } else { range / mean };
    Ok(PsSummary {
        ps_id,
        mean,
        min,
        max,
        range,
        relative_range,
    })
}

/// Summary of one PS over the 51 non-US entities.
pub fn ps_summary(matrix: &PsMatrix, ps: PsId) -> PsSummary {
    let values: Vec<f64> = matrix.column(ps, false).into_iter().map(|(_, v)| v).collect();
    summary_stats(ps, &values).expect("51 values")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopEntry {
    pub entity: EntityId,
    pub value: f64,
    pub rel_diff: f64,
}

/// The `k` highest entities (US excluded) by descending value, with their
/// relative differences. Equal values list in reverse tie-break order, so the
/// result is a prefix of the reversed ascending ranking.
pub fn top_quintile(
    matrix: &PsMatrix,
    ps: PsId,
    k: usize,
    tie_break: TieBreak,
) -> Result<Vec<TopEntry>> {
    if k == 0 || k > ENTITY_COUNT - 1 {
        return Err(Error::InvalidInput(format!("k must be in 1..=51, got {k}")));
    }
    let ranked = rank_entities(matrix, ps, false, tie_break);
    Ok(ranked
        .entries
        .iter()
        .rev()
        .take(k)
        .map(|e| TopEntry {
            entity: e.entity,
            value: e.value,
            rel_diff: matrix.rel_diff(e.entity),
        })
        .collect())
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Misaligned {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "correlation needs at least two observations".into(),
        ));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative threshold: a column of identical values can leave rounding dust.
    let scale = |v: &[f64], m: f64| v.iter().map(|a| a.abs()).fold(m.abs(), f64::max);
    if sxx <= (scale(x, mx) * 1e-12).powi(2) * n {
        return Err(Error::ZeroVariance("x"));
    }
    if syy <= (scale(y, my) * 1e-12).powi(2) * n {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Rank correlation: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightStat {
    pub ps_id: PsId,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean and range of each PS's scaled weight over the non-US entities.
pub fn weight_profile(result: &SpsResult) -> Vec<WeightStat> {
    let rows: Vec<_> = result.entities.iter().filter(|r| !r.entity.is_us()).collect();
    PsId::all()
        .map(|ps| {
            let column: Vec<f64> = rows.iter().map(|r| r.scaled_weights[ps.index()]).collect();
            let n = column.len().max(1) as f64;
            WeightStat {
                ps_id: ps,
                mean: column.iter().sum::<f64>() / n,
                min: column.iter().copied().fold(f64::INFINITY, f64::min),
                max: column.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}
