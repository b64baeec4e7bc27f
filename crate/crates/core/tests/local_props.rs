mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use topolens::data::{gen_layer_stack, LayerStackConfig};
use topolens::features::{summarize, SummaryConfig};
use topolens::local::*;
use topolens::ph::{cloud_persistence, Metric, PointCloud, Threshold};
use topolens::stats::pearson;

fn gaussian(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = common::rng(seed);
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn summary_of(points: &[[f64; 2]]) -> Vec<f64> {
    let cloud = PointCloud::from_rows(points).unwrap();
    let bc = cloud_persistence(&cloud, Metric::Euclidean, 1, Threshold::Auto).unwrap();
    summarize(&bc, SummaryConfig::default()).values
}

#[test]
fn equal_vectors_lie_on_the_diagonal() {
    let a = gaussian(1, 20);
    let e = pair_embedding(&a, &a).unwrap();
    assert!(e.points.iter().all(|p| p[0] == p[1]));
}

#[test]
fn permutation_decorrelates_diagonal_data() {
    let a = gaussian(2, 4096);
    let noise = gaussian(3, 4096);
    let b: Vec<f64> = a.iter().zip(&noise).map(|(x, z)| x + 0.05 * z).collect();
    let e = normalized_embedding(&a, &b).unwrap();
    let x: Vec<f64> = e.points.iter().map(|p| p[0]).collect();
    let y: Vec<f64> = e.points.iter().map(|p| p[1]).collect();
    assert!(pearson(&x, &y).unwrap() > 0.99);
    for seed in 0..10 {
        let p = permute_control(&e, seed);
        let y: Vec<f64> = p.points.iter().map(|p| p[1]).collect();
        assert!(pearson(&x, &y).unwrap().abs() < 0.1);
    }
}

#[test]
fn normalized_vectors_are_standardized() {
    let v: Vec<f64> = gaussian(4, 300).iter().map(|x| 3.0 * x + 7.0).collect();
    let z = normalize_vector(&v).unwrap();
    let m = z.iter().sum::<f64>() / z.len() as f64;
    let var = z.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / z.len() as f64;
    assert!(m.abs() < 1e-12);
    assert!((var - 1.0).abs() < 1e-12);
}

#[test]
fn swapping_layers_reflects_and_keeps_statistics() {
    let (a, b) = (gaussian(5, 120), gaussian(6, 120));
    let ab = pair_embedding(&a, &b).unwrap();
    let ba = pair_embedding(&b, &a).unwrap();
    for (p, q) in ab.points.iter().zip(&ba.points) {
        assert_eq!([p[1], p[0]], *q);
    }
    assert_eq!(summary_of(&ab.points), summary_of(&ba.points));
}

#[test]
fn relabelling_neurons_keeps_statistics() {
    let (a, b) = (gaussian(7, 150), gaussian(8, 150));
    let e = pair_embedding(&a, &b).unwrap();
    let mut order: Vec<usize> = (0..150).collect();
    order.reverse();
    order.rotate_left(37);
    let relabelled: Vec<[f64; 2]> = order.iter().map(|&i| e.points[i]).collect();
    for (x, y) in summary_of(&e.points).iter().zip(summary_of(&relabelled)) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
    }
}

fn small_stack(n_layers: usize, loops: Vec<usize>) -> topolens::data::LayerStack {
    gen_layer_stack(
        &LayerStackConfig {
            n_samples: 12,
            n_layers,
            dim: 40,
            loop_layers: loops,
            ring_noise: 0.05,
        },
        3,
    )
    .unwrap()
}

#[test]
fn identical_conditions_give_unit_ratios() {
    let mut stack = small_stack(4, vec![]);
    stack.poisoned = stack.clean.clone();
    let sweep = layer_sweep(
        &stack,
        &SweepConfig {
            n: 8,
            ..Default::default()
        },
    )
    .unwrap();
    for p in &sweep.points {
        assert_eq!(p.abs_diff, 0.0);
        if let Some(r) = p.ratio {
            assert!((r - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn axis_lengths_follow_the_interval() {
    let stack = small_stack(12, vec![]);
    for interval in [1, 3, 10] {
        let cfg = SweepConfig {
            n: 2,
            interval,
            statistics: vec!["total_persistence_1bars".into()],
            variants: vec![Variant::Original],
            ..Default::default()
        };
        let sweep = layer_sweep(&stack, &cfg).unwrap();
        assert_eq!(sweep.pairs.len(), 12 - interval);
        assert_eq!(
            sweep
                .curve(Variant::Original, "total_persistence_1bars", CurveKind::AbsDiff)
                .len(),
            12 - interval
        );
    }
    let err = layer_sweep(
        &stack,
        &SweepConfig {
            interval: 12,
            n: 2,
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, topolens::Error::Axis(_)));
}

#[test]
fn sweep_is_deterministic() {
    let stack = small_stack(3, vec![1]);
    let cfg = SweepConfig {
        n: 4,
        seed: 9,
        ..Default::default()
    };
    let a = layer_sweep(&stack, &cfg).unwrap();
    let b = layer_sweep(&stack, &cfg).unwrap();
    assert_eq!(a, b);
    let mut csv_a = Vec::new();
    a.write_csv(&mut csv_a).unwrap();
    let rows = String::from_utf8(csv_a).unwrap().lines().count() - 1;
    assert_eq!(rows, 2 * 3 * 7 * 2);
}

#[test]
fn unknown_statistic_is_rejected() {
    let stack = small_stack(3, vec![]);
    let cfg = SweepConfig {
        n: 2,
        statistics: vec!["nope".into()],
        ..Default::default()
    };
    assert!(layer_sweep(&stack, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monte_carlo_null_matches_enumeration(
        len in 5usize..=12,
        k in 1usize..=3,
        raw in prop::collection::vec(0usize..12, 3),
        observed in 0usize..=3,
        seed in 0u64..1000,
    ) {
        prop_assume!(k < len);
        let mut target: Vec<usize> = raw.iter().map(|r| r % len).collect();
        target.sort_unstable();
        target.dedup();
        target.truncate(k);
        let observed = observed.min(k);
        let (exact, _) = exact_p_value(len, k, &target, observed);
        let n = 20_000;
        let mc = monte_carlo_p_value(len, k, &target, observed, n, seed);
        let se = (exact * (1.0 - exact) / n as f64).sqrt().max(1.0 / n as f64);
        prop_assert!((mc - exact).abs() <= 3.0 * se + 1.0 / n as f64, "mc {mc} exact {exact}");
    }
}

#[test]
fn long_axes_use_monte_carlo() {
    let a: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
    let r = peak_precision_at_k(&a, &a, 3, 2000, 1).unwrap();
    assert_eq!(r.method, NullMethod::MonteCarlo);
    assert_eq!(r.precision, 1.0);
    assert!(r.p_value < 0.05);
}
