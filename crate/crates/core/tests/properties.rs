use std::collections::BTreeMap;

use proptest::prelude::*;

use riskdex_core::aggregate::{compute_sps, decompose, run_variant};
use riskdex_core::analysis::{pearson, spearman, summary_stats, top_quintile};
use riskdex_core::report::apportion;
use riskdex_core::transform::{
    ps1_from_maf_counts, quintile_transform, rank_column, scale_weights, zero_negative_weights,
};
use riskdex_core::{
    catalog, Components2020, DataBundle, EntityId, Phase, PsId, PsMatrix, PublishedReference,
    TieBreak, VariantConfig, WeightMatrix,
};

fn ps(id: u32) -> PsId {
    PsId::new(id).unwrap()
}

/// Values drawn from a small grid so that ties are common.
fn value() -> impl Strategy<Value = f64> {
    prop_oneof![(-20i32..20).prop_map(|v| v as f64 / 4.0), -30.0f64..30.0]
}

fn column(n: usize) -> impl Strategy<Value = Vec<(EntityId, f64)>> {
    prop::collection::vec(value(), n).prop_map(move |vals| {
        let entities: Vec<EntityId> = if n == 52 {
            EntityId::all().collect()
        } else {
            EntityId::states().collect()
        };
        entities.into_iter().zip(vals).collect()
    })
}

fn tie_break() -> impl Strategy<Value = TieBreak> {
    prop_oneof![Just(TieBreak::ByCanonicalOrder), Just(TieBreak::ByReverseCanonical)]
}

fn scheme_51() -> impl Strategy<Value = [usize; 5]> {
    prop::collection::vec(1usize..=15, 4).prop_filter_map("fifth bucket must be nonempty", |v| {
        let head: usize = v.iter().sum();
        (head < 51).then(|| [v[0], v[1], v[2], v[3], 51 - head])
    })
}

fn quintiles(col: &[(EntityId, f64)], cfg: &VariantConfig) -> BTreeMap<EntityId, u8> {
    quintile_transform(ps(1), col, cfg).unwrap().into_iter().collect()
}

fn sizes(q: &BTreeMap<EntityId, u8>) -> [usize; 5] {
    q.values().fold([0; 5], |mut acc, b| {
        acc[*b as usize - 1] += 1;
        acc
    })
}

proptest! {
    #[test]
    fn bucket_law_52(col in column(52), tb in tie_break()) {
        let cfg = VariantConfig { tie_break: tb, ..VariantConfig::default() };
        prop_assert_eq!(sizes(&quintiles(&col, &cfg)), [11, 10, 10, 10, 11]);
    }

    #[test]
    fn bucket_law_51(col in column(51), scheme in scheme_51()) {
        let cfg = VariantConfig {
            include_us_in_quintiles: false,
            quintile_n51_scheme: scheme,
            ..VariantConfig::default()
        };
        prop_assert_eq!(sizes(&quintiles(&col, &cfg)), scheme);
    }

    #[test]
    fn monotone_transform_invariance(col in column(52), tb in tie_break()) {
        let cfg = VariantConfig { tie_break: tb, ..VariantConfig::default() };
        let mapped: Vec<_> = col.iter().map(|(e, v)| (*e, v * v * v + 3.0 * v + 7.0)).collect();
        let exp: Vec<_> = col.iter().map(|(e, v)| (*e, (v / 10.0).exp())).collect();
        let base = quintiles(&col, &cfg);
        prop_assert_eq!(&base, &quintiles(&mapped, &cfg));
        prop_assert_eq!(&base, &quintiles(&exp, &cfg));
    }

    #[test]
    fn quintiles_are_monotone_in_value(col in column(52)) {
        let q = quintiles(&col, &VariantConfig::default());
        for (a, va) in &col {
            for (b, vb) in &col {
                if va < vb {
                    prop_assert!(q[a] <= q[b]);
                }
            }
        }
    }

    #[test]
    fn permutation_invariance(
        (col, shuffled) in column(52).prop_flat_map(|c| (Just(c.clone()), Just(c).prop_shuffle())),
        tb in tie_break(),
    ) {
        let cfg = VariantConfig { tie_break: tb, ..VariantConfig::default() };
        prop_assert_eq!(quintiles(&col, &cfg), quintiles(&shuffled, &cfg));
        let a = rank_column(ps(2), &col, tb);
        let b = rank_column(ps(2), &shuffled, tb);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scaling_ignores_row_multiplier(
        row in prop::collection::vec(0.0f64..50.0, 10).prop_filter("positive sum", |r| r.iter().sum::<f64>() > 1e-3),
        c in 1e-3f64..1e3,
    ) {
        let a = scale_weights(&row).unwrap();
        let scaled: Vec<f64> = row.iter().map(|w| w * c).collect();
        let b = scale_weights(&scaled).unwrap();
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zeroing_is_idempotent(
        w in prop::array::uniform10(0.0f64..30.0),
        v in prop::array::uniform10(-5.0f64..5.0),
    ) {
        let (once, zeroed) = zero_negative_weights(&w, &v);
        let (twice, _) = zero_negative_weights(&once, &v);
        prop_assert_eq!(once, twice);
        for def in catalog() {
            let i = def.id.index();
            if def.is_difference() && v[i] < 0.0 {
                prop_assert_eq!(once[i], 0.0);
                prop_assert!(zeroed.contains(&def.id));
            } else {
                prop_assert_eq!(once[i], w[i]);
            }
        }
    }

    #[test]
    fn maf_share_symmetry_and_homogeneity(d in 0u64..100_000, a in 0u64..100_000, c in 1u64..1_000_000, k in 1u64..50) {
        let base = ps1_from_maf_counts(d, a, c).unwrap();
        prop_assert_eq!(base, ps1_from_maf_counts(a, d, c).unwrap());
        let scaled = ps1_from_maf_counts(d * k, a * k, c * k).unwrap();
        prop_assert!((base - scaled).abs() < 1e-9);
        prop_assert!((0.0..=100.0).contains(&base));
    }

    #[test]
    fn correlation_invariances(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
        scale in 0.1f64..10.0,
        shift in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let Ok(r) = pearson(&x, &y) {
            prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&r));
            let x2: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            prop_assert!((r - pearson(&x2, &y).unwrap()).abs() < 1e-9);
        }
        if let Ok(rho) = spearman(&x, &y) {
            prop_assert!((rho - spearman(&y, &x).unwrap()).abs() < 1e-12);
            let x3: Vec<f64> = x.iter().map(|v| v * v * v).collect();
            prop_assert!((rho - spearman(&x3, &y).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn waffle_counts_sum_and_stay_proportional(
        raw in prop::collection::vec(0u32..1000, 1..7).prop_filter("nonzero", |v| v.iter().any(|x| *x > 0)),
        n in 1u32..2000,
    ) {
        // Shares in tenths of a percent that sum to exactly 100.0.
        let total: u32 = raw.iter().sum();
        let mut tenths: Vec<u32> = raw.iter().map(|r| r * 1000 / total).collect();
        let gap = 1000 - tenths.iter().sum::<u32>();
        tenths[0] += gap;
        let shares: Vec<f64> = tenths.iter().map(|t| *t as f64 / 10.0).collect();
        let counts = apportion(&shares, n).unwrap();
        prop_assert_eq!(counts.iter().sum::<u32>(), n);
        for (c, s) in counts.iter().zip(&shares) {
            let exact = f64::from(n) * s / 100.0;
            prop_assert!((f64::from(*c) - exact).abs() < 1.0 + 1e-9);
        }
    }

    #[test]
    fn sps_bounds_and_extremes(
        q in prop::array::uniform10(1u8..=5),
        w in prop::array::uniform10(0.0f64..10.0).prop_filter("positive", |w| w.iter().sum::<f64>() > 1e-3),
    ) {
        let scaled = scale_weights(&w).unwrap();
        let sps = compute_sps(&q, &scaled).unwrap();
        prop_assert!((1.0 - 1e-12..=5.0 + 1e-12).contains(&sps));
        let active: Vec<u8> = q.iter().zip(&scaled).filter(|(_, w)| **w > 0.0).map(|(q, _)| *q).collect();
        prop_assert_eq!((sps - 1.0).abs() < 1e-12, active.iter().all(|q| *q == 1));
        prop_assert_eq!((sps - 5.0).abs() < 1e-12, active.iter().all(|q| *q == 5));

        let phases: Vec<Phase> = catalog().iter().map(|d| d.phase).collect();
        let pct = decompose(&q, &scaled, &phases).unwrap();
        prop_assert!((pct.iter().sum::<f64>() - 100.0).abs() < 1e-6);
        prop_assert!(pct.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn zeroing_moves_sps_toward_the_remaining_terms(
        q in prop::array::uniform10(1u8..=5),
        w in prop::array::uniform10(0.1f64..10.0),
        k in 0usize..10,
    ) {
        let base = compute_sps(&q, &scale_weights(&w).unwrap()).unwrap();
        let mut dropped = w;
        dropped[k] = 0.0;
        let after = compute_sps(&q, &scale_weights(&dropped).unwrap()).unwrap();
        let qk = f64::from(q[k]);
        if qk < base - 1e-9 {
            prop_assert!(after > base);
        } else if qk > base + 1e-9 {
            prop_assert!(after < base);
        }
    }

    /// Three entities, two PSs (one level, one difference): the library
    /// result against a written-out weighted average.
    #[test]
    fn sps_matches_hand_oracle(
        rows in prop::array::uniform3((1u8..=5, 1u8..=5, 0.01f64..40.0, 0.01f64..40.0, -3.0f64..3.0)),
    ) {
        for (q_level, q_diff, w_level, w_diff, diff_value) in rows {
            // Positions 0 (PS1, level) and 2 (PS3, difference) of a full row.
            let mut weights = [0.0; 10];
            let mut values = [0.0; 10];
            weights[0] = w_level;
            weights[2] = w_diff;
            values[2] = diff_value;
            let (adjusted, _) = zero_negative_weights(&weights, &values);
            let scaled = scale_weights(&[adjusted[0], adjusted[2]]).unwrap();
            let got = compute_sps(&[q_level, q_diff], &scaled).unwrap();

            let kept_diff = if diff_value < 0.0 { 0.0 } else { w_diff };
            let hand = (w_level * f64::from(q_level) + kept_diff * f64::from(q_diff)) / (w_level + kept_diff);
            prop_assert!((got - hand).abs() < 1e-12, "{got} vs {hand}");
        }
    }

    #[test]
    fn summary_commutes_with_permutation(
        (vals, shuffled) in prop::collection::vec(value(), 2..60).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
    ) {
        let a = summary_stats(ps(1), &vals).unwrap();
        let b = summary_stats(ps(1), &shuffled).unwrap();
        prop_assert_eq!(a.min, b.min);
        prop_assert_eq!(a.max, b.max);
        prop_assert!((a.mean - b.mean).abs() < 1e-9);
        prop_assert_eq!(a.range, a.max - a.min);
    }

    #[test]
    fn top_list_is_prefix_of_reversed_ranking(matrix in matrix(), k in 1usize..=51, tb in tie_break()) {
        let top = top_quintile(&matrix, ps(4), k, tb).unwrap();
        let ranked = rank_column(ps(4), &matrix.column(ps(4), false), tb);
        let reversed: Vec<EntityId> = ranked.entities().rev().take(k).collect();
        prop_assert_eq!(top.iter().map(|t| t.entity).collect::<Vec<_>>(), reversed);
    }
}

fn matrix() -> impl Strategy<Value = PsMatrix> {
    (
        prop::collection::vec(prop::array::uniform10(value()), 52),
        prop::collection::vec(-5.0f64..5.0, 52),
    )
        .prop_map(|(rows, rel)| {
            let mut values = [[0.0; 10]; 52];
            let mut rel_diff = [0.0; 52];
            for i in 0..52 {
                // Level statistics stay nonnegative.
                values[i] = rows[i];
                for d in catalog() {
                    if !d.is_difference() {
                        values[i][d.id.index()] = rows[i][d.id.index()].abs();
                    }
                }
                rel_diff[i] = rel[i];
            }
            PsMatrix::new(values, rel_diff)
        })
}

fn synthetic_bundle() -> impl Strategy<Value = DataBundle> {
    (matrix(), prop::collection::vec(prop::array::uniform10(0.0f64..30.0), 51)).prop_map(|(ps, w)| {
        let weights = EntityId::states()
            .zip(w)
            .map(|(e, mut row)| {
                // Keep every row nondegenerate even when all difference weights get zeroed.
                row[0] += 0.5;
                (e, row)
            })
            .collect();
        DataBundle {
            ps,
            weights: WeightMatrix::new(weights),
            components: Components2020::new(BTreeMap::new()),
            published: PublishedReference::default(),
            errata: Vec::new(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pipeline_invariants_hold_for_every_grid_variant(bundle in synthetic_bundle()) {
        for cfg in VariantConfig::default_grid() {
            let result = run_variant(&bundle, &cfg).unwrap();
            prop_assert_eq!(result.entities.len(), 51);
            for p in PsId::all() {
                let expected = if cfg.include_us_in_quintiles { [11, 10, 10, 10, 11] } else { cfg.quintile_n51_scheme };
                prop_assert_eq!(result.quintiles.bucket_sizes(p), expected);
            }
            for s in &result.entities {
                prop_assert!((s.scaled_weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert!((1.0 - 1e-12..=5.0 + 1e-12).contains(&s.sps));
                prop_assert!((s.phase_pct.iter().sum::<f64>() - 100.0).abs() < 1e-6);
            }
            prop_assert_eq!(&result, &run_variant(&bundle, &cfg).unwrap());
        }
    }
}
