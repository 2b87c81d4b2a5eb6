use nmdistill::harness::{
    build_heatmap, export_heatmap, extract_extremes, read_heatmap, run_sweep, sample_ensemble, sample_pair,
    sort_pairs, sorting_score, write_sweep_outputs, EnsembleKind, EnsembleSpec, ExportContext, HeatmapMetric,
    PairJson, SweepConfig, SweepRecord,
};
use nmdistill::{computational_pair, trace_norm, OptimizerConfig, RegimeLabel};
use proptest::prelude::*;

const KINDS: [EnsembleKind; 3] = [EnsembleKind::Mixed, EnsembleKind::RandomPure, EnsembleKind::OrthogonalPure];

fn purity(rho: &nmdistill::HermitianOperator64) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

fn record(k: usize, ei: usize, eps: f64, n: usize, value: f64) -> SweepRecord {
    SweepRecord {
        pair_index: k,
        epsilon_index: ei,
        epsilon: eps,
        n,
        delta_d: 0.0,
        delta_d_prime: value,
        beta: 1.0,
        beta_sharp: 1.0,
        tightness: value,
        gain: value,
        regime: None,
        task_seed: 0,
        best_restart: 0,
        converged_restarts: 0,
        evaluations: 0,
    }
}

fn fast_optimizer(restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        n_restarts: restarts,
        ..Default::default()
    }
}

fn small_config(kind: EnsembleKind, n_pairs: usize, grid: Vec<f64>) -> SweepConfig {
    let mut c = SweepConfig::new(EnsembleSpec { kind, n_pairs, seed: 7 });
    c.epsilon_grid = grid;
    c.optimizer = fast_optimizer(2);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampled_states_are_valid(seed in any::<u64>(), k in 0usize..50) {
        for kind in KINDS {
            let (a, b) = sample_pair(kind, seed, k);
            for rho in [&a, &b] {
                prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
                prop_assert!(rho.min_eigenvalue() >= -1e-12);
            }
            match kind {
                EnsembleKind::RandomPure => {
                    prop_assert!((purity(&a) - 1.0).abs() <= 1e-10);
                    prop_assert!((purity(&b) - 1.0).abs() <= 1e-10);
                }
                EnsembleKind::OrthogonalPure => {
                    prop_assert!((0.5 * trace_norm(&(&a - &b)) - 1.0).abs() <= 1e-10);
                }
                EnsembleKind::Mixed => {}
            }
        }
    }

    #[test]
    fn pair_k_does_not_depend_on_ensemble_size(seed in any::<u64>(), n in 1usize..20, extra in 1usize..20) {
        for kind in KINDS {
            let small = sample_ensemble(&EnsembleSpec { kind, n_pairs: n, seed });
            let big = sample_ensemble(&EnsembleSpec { kind, n_pairs: n + extra, seed });
            prop_assert_eq!(&small[..], &big[..n]);
        }
    }

    #[test]
    fn sort_pairs_is_a_sorting_permutation(scores in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let pi = sort_pairs(&scores);
        let mut seen = pi.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..scores.len()).collect::<Vec<_>>());
        prop_assert!(pi.windows(2).all(|w| scores[w[0]] <= scores[w[1]]));
    }

    /// Raising one pair's weak-regime peak above all others makes it the best.
    #[test]
    fn extremes_follow_the_peak(values in prop::collection::vec(0.0f64..0.5, 3..8), pick in any::<prop::sample::Index>()) {
        let n_pairs = values.len();
        let mut records: Vec<SweepRecord> =
            (0..n_pairs).map(|k| record(k, 0, 0.1, 3, values[k])).collect();
        records.extend((0..n_pairs).map(|k| record(k, 1, 0.3, 3, 10.0)));
        let (best, worst) = extract_extremes(&records, 3).unwrap();
        prop_assert!(values.iter().all(|&v| v <= values[best] && v >= values[worst]));
        let j = pick.index(n_pairs);
        records[j].delta_d_prime = 1.0;
        prop_assert_eq!(extract_extremes(&records, 3).unwrap().0, j);
    }
}

#[test]
fn ensembles_are_deterministic() {
    for kind in KINDS {
        let spec = EnsembleSpec { kind, n_pairs: 10, seed: 3 };
        assert_eq!(sample_ensemble(&spec), sample_ensemble(&spec));
        assert_ne!(sample_ensemble(&spec), sample_ensemble(&EnsembleSpec { seed: 4, ..spec }));
    }
}

#[test]
fn mixed_ensemble_is_not_pure() {
    let pairs = sample_ensemble(&EnsembleSpec { kind: EnsembleKind::Mixed, n_pairs: 100, seed: 11 });
    let mean = pairs.iter().map(|(a, b)| purity(a) + purity(b)).sum::<f64>() / 200.0;
    assert!(mean < 0.99, "mean purity {mean}");
}

#[test]
fn single_point_sweep() {
    let mut c = small_config(EnsembleKind::RandomPure, 1, vec![0.3]);
    c.copy_numbers = vec![1];
    let out = run_sweep(&c).unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.records.len(), 1);
    let r = &out.records[0];
    assert!(r.delta_d_prime >= r.delta_d - 1e-9 && r.delta_d_prime <= r.beta_sharp + 1e-9, "{r:?}");
    assert!((r.gain - (r.delta_d_prime - r.delta_d)).abs() <= 1e-15);
    assert_eq!(r.regime, Some(RegimeLabel::Essential));
}

#[test]
fn fixed_computational_pair_reproduces_anchors() {
    let mut c = small_config(EnsembleKind::Mixed, 1, vec![0.1, 0.3]);
    c.optimizer = fast_optimizer(4);
    c.fixed_pairs = Some(vec![PairJson::from_pair(&computational_pair())]);
    let out = run_sweep(&c).unwrap();
    assert_eq!(out.records.len(), 2);
    assert!(out.records[0].delta_d_prime <= 1e-4);
    assert_eq!(out.records[0].regime, Some(RegimeLabel::Weak));
    assert!((out.records[1].delta_d_prime - 0.12).abs() <= 1e-3);
    assert!((out.records[1].tightness - 0.12 / out.records[1].beta).abs() <= 1e-12);
}

#[test]
fn empty_copy_numbers_give_no_records() {
    let mut c = small_config(EnsembleKind::Mixed, 2, vec![0.1]);
    c.copy_numbers.clear();
    let out = run_sweep(&c).unwrap();
    assert!(out.records.is_empty() && out.failures.is_empty());
}

#[test]
fn invalid_configs_are_rejected() {
    for grid in [vec![0.0], vec![0.5], vec![0.3, 0.2]] {
        assert!(run_sweep(&small_config(EnsembleKind::Mixed, 1, grid)).is_err());
    }
    let mut c = small_config(EnsembleKind::Mixed, 1, vec![0.1]);
    c.copy_numbers = vec![4];
    assert!(run_sweep(&c).is_err());
    assert!(run_sweep(&small_config(EnsembleKind::Mixed, 0, vec![0.1])).is_err());
    assert!(serde_json::from_str::<SweepConfig>(r#"{"ensemble":{"kind":"MIXED","n_pairs":1,"seed":0},"bogus":1}"#).is_err());
}

#[test]
fn config_json_defaults() {
    let c: SweepConfig = serde_json::from_str(r#"{"ensemble":{"kind":"ORTHOGONAL_PURE","n_pairs":3,"seed":5}}"#).unwrap();
    assert_eq!(c.epsilon_grid.len(), 24);
    assert!(c.epsilon_grid.iter().all(|e| (e - 0.25).abs() > 1e-12));
    assert_eq!(c.copy_numbers, vec![2]);
    assert_eq!((c.dim_r, c.dim_d), (2, 2));
    assert_eq!(c, SweepConfig::new(c.ensemble));
}

/// Changing pair 1 leaves every record of pair 0 unchanged.
#[test]
fn cells_are_independent_of_other_pairs() {
    let a = sample_pair(EnsembleKind::RandomPure, 1, 0);
    let b = sample_pair(EnsembleKind::RandomPure, 1, 1);
    let c = sample_pair(EnsembleKind::RandomPure, 2, 5);
    let run = |second: &_| {
        let mut cfg = small_config(EnsembleKind::Mixed, 2, vec![0.1, 0.3]);
        cfg.copy_numbers = vec![1, 2];
        cfg.fixed_pairs = Some(vec![PairJson::from_pair(&a), PairJson::from_pair(second)]);
        run_sweep(&cfg).unwrap().records
    };
    let first: Vec<_> = run(&b).into_iter().filter(|r| r.pair_index == 0).collect();
    let second: Vec<_> = run(&c).into_iter().filter(|r| r.pair_index == 0).collect();
    assert_eq!(first.len(), 4);
    assert_eq!(first, second);
}

#[test]
fn sorting_score_examples() {
    let records = vec![
        record(0, 0, 0.1, 2, 9.0),
        record(0, 1, 0.3, 2, 0.2),
        record(0, 2, 0.4, 2, 0.4),
        record(1, 1, 0.3, 2, 0.1),
        record(1, 2, 0.4, 2, 0.1),
        record(1, 1, 0.3, 3, 5.0),
    ];
    let s = sorting_score(&records, 2).unwrap();
    assert!((s[0] - 0.3).abs() <= 1e-15 && (s[1] - 0.1).abs() <= 1e-15);
    assert_eq!(sort_pairs(&s), vec![1, 0]);
    assert!(sorting_score(&records, 3).is_err());
    assert!(sorting_score(&records[..1], 1).is_err());
    assert_eq!(sort_pairs(&[0.5, 0.1, 0.5, 0.0]), vec![3, 1, 0, 2]);
    assert!(sort_pairs(&[]).is_empty());
}

#[test]
fn extremes_examples() {
    let records = vec![
        record(0, 0, 0.1, 3, 0.02),
        record(1, 0, 0.1, 3, 0.05),
        record(2, 0, 0.1, 3, 0.05),
        record(3, 0, 0.1, 3, 0.02),
        record(3, 1, 0.3, 3, 0.9),
    ];
    assert_eq!(extract_extremes(&records, 3).unwrap(), (1, 0));
    assert!(extract_extremes(&records, 2).is_err());
}

fn context() -> ExportContext {
    ExportContext::from_config(&small_config(EnsembleKind::Mixed, 2, vec![0.1, 0.3])).unwrap()
}

#[test]
fn one_by_one_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let records = vec![record(0, 0, 0.3, 2, 0.125)];
    export_heatmap(&records, HeatmapMetric::Tightness, &[0], 2, &context(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    let map = read_heatmap(&path).unwrap();
    assert_eq!((map.pairs, map.epsilons, map.values), (vec![0], vec![0.3], vec![vec![0.125]]));
    assert!(dir.path().join("h.json").exists());
}

#[test]
fn export_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let values = [1.0 / 3.0, std::f64::consts::PI * 1e-17, -0.1, 2.0f64.sqrt(), f64::MIN_POSITIVE, 0.0];
    let mut records = Vec::new();
    for k in 0..3 {
        for (ei, eps) in [0.1, 0.3].into_iter().enumerate() {
            records.push(record(k, ei, eps, 2, values[2 * k + ei]));
        }
    }
    let pi = [2, 0, 1];
    for metric in HeatmapMetric::ALL {
        let path = dir.path().join(format!("{}.csv", metric.file_stem()));
        export_heatmap(&records, metric, &pi, 2, &context(), &path).unwrap();
        let back = read_heatmap(&path).unwrap();
        let built = build_heatmap(&records, metric, &pi, 2).unwrap();
        assert_eq!(back.pairs, pi);
        for (x, y) in back.values.iter().flatten().zip(built.values.iter().flatten()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(back.epsilons, built.epsilons);
    }
}

#[test]
fn missing_cells_are_reported() {
    let records = vec![record(0, 0, 0.1, 2, 0.0), record(0, 1, 0.3, 2, 0.0), record(1, 0, 0.1, 2, 0.0)];
    let err = build_heatmap(&records, HeatmapMetric::Gain, &[0, 1], 2).unwrap_err().to_string();
    assert!(err.contains("(1, 0.3)"), "{err}");
    assert!(build_heatmap(&records, HeatmapMetric::Gain, &[0, 0], 2).is_err());
    assert!(build_heatmap(&records, HeatmapMetric::Gain, &[0], 3).is_err());
}

/// Every heatmap of a sweep uses the same row order as the metadata.
#[test]
fn sweep_outputs_share_one_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small_config(EnsembleKind::Mixed, 4, vec![0.1, 0.3, 0.4]);
    c.copy_numbers = vec![1, 2];
    let out = run_sweep(&c).unwrap();
    let meta = write_sweep_outputs(&c, &out, dir.path()).unwrap();
    assert!(meta.export_errors.is_empty(), "{:?}", meta.export_errors);
    let scores = meta.sorting_scores.clone().unwrap();
    assert_eq!(meta.permutation, sort_pairs(&scores));
    let mut count = 0;
    for n in [1, 2] {
        for metric in HeatmapMetric::ALL {
            let map = read_heatmap(&dir.path().join(format!("heatmap_n{n}_{}.csv", metric.file_stem()))).unwrap();
            assert_eq!(map.pairs, meta.permutation);
            count += 1;
        }
    }
    assert_eq!(count, 6);
    assert_eq!(meta.extremes.len(), 2);

    // Without strong-regime points the order falls back to the identity.
    let mut weak = c.clone();
    weak.epsilon_grid = vec![0.1];
    let out = run_sweep(&weak).unwrap();
    let meta = write_sweep_outputs(&weak, &out, &dir.path().join("weak")).unwrap();
    assert_eq!(meta.permutation, vec![0, 1, 2, 3]);
    assert!(meta.sorting_scores.is_none());
}

/// Three copies of an orthogonal pure pair beat the two-copy value in the weak
/// regime for most pairs, even with a short single-restart search.
#[test]
fn weak_regime_activation_is_prevalent() {
    let mut c = SweepConfig::new(EnsembleSpec { kind: EnsembleKind::OrthogonalPure, n_pairs: 20, seed: 1 });
    c.epsilon_grid = vec![0.05, 0.12, 0.2];
    c.copy_numbers = vec![3];
    c.optimizer = OptimizerConfig {
        n_restarts: 1,
        max_iterations: 8,
        swap_seed: false,
        ..Default::default()
    };
    let out = run_sweep(&c).unwrap();
    assert_eq!(out.records.len(), 60);
    let active = out.records.iter().filter(|r| r.delta_d_prime > 1e-6).count();
    assert!(active * 2 > out.records.len(), "{active} of {} cells active", out.records.len());
}
