mod common;

use rand::Rng;
use rand_distr::StandardNormal;
use topolens::dispersion::*;
use topolens::ph::{Condition, PointCloud};

fn gaussian_cloud(seed: u64, m: usize, d: usize) -> PointCloud {
    let mut rng = common::rng(seed);
    let coords: Vec<f64> = (0..m * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    PointCloud::new(coords, m, d).unwrap()
}

#[test]
fn isotropic_neighbourhood_has_unit_ratio() {
    // query at the origin, its 30 neighbours on a regular polygon, the rest far away
    let mut rows = vec![vec![0.0, 0.0]];
    rows.extend((0..30).map(|i| {
        let t = i as f64 * std::f64::consts::TAU / 30.0;
        vec![t.cos(), t.sin()]
    }));
    rows.extend((0..10).map(|i| vec![100.0 + i as f64, 0.0]));
    let r = local_dispersion_ratio(&PointCloud::from_rows(&rows).unwrap(), 30).unwrap();
    assert!((r[0].ratio - 1.0).abs() < 1e-9, "{}", r[0].ratio);
    assert_eq!(r[0].rank, 2);
}

#[test]
fn sampled_plane_neighbourhoods_are_full_rank() {
    let cloud = gaussian_cloud(1, 2000, 2);
    let r = local_dispersion_ratio(&cloud, 30).unwrap();
    let mean = r.iter().map(|d| d.ratio).sum::<f64>() / r.len() as f64;
    // sorted sample eigenvalues of 30 points spread apart, so the mean sits below 1
    assert!(mean > 0.5 && mean < 1.0, "{mean}");
    assert!(r.iter().all(|d| d.rank == 2));
}

#[test]
fn ratio_ignores_rotation_and_scale() {
    let cloud = gaussian_cloud(2, 200, 3);
    let base = local_dispersion_ratio(&cloud, 30).unwrap();
    let (c, s) = (0.28f64, 0.96f64);
    for scale in [1e-2, 1.0, 250.0] {
        let moved: Vec<Vec<f64>> = cloud
            .rows()
            .map(|p| {
                vec![
                    scale * (c * p[0] - s * p[1]),
                    scale * (s * p[0] + c * p[1]),
                    scale * p[2],
                ]
            })
            .collect();
        let moved = local_dispersion_ratio(&PointCloud::from_rows(&moved).unwrap(), 30).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert!(
                (a.ratio - b.ratio).abs() <= 1e-6 * a.ratio.max(1e-300),
                "{} vs {}",
                a.ratio,
                b.ratio
            );
        }
    }
}

#[test]
fn isotropic_directions_are_nearly_orthogonal() {
    let cloud = gaussian_cloud(3, 400, 512);
    let rows: Vec<usize> = (0..400).collect();
    let d = mean_pairwise_cosine_distance(&cloud, &rows).unwrap();
    assert!((d - 1.0).abs() < 0.05, "{d}");
}

#[test]
fn cosine_distance_ignores_row_scaling() {
    let cloud = gaussian_cloud(4, 50, 8);
    let scaled: Vec<Vec<f64>> = cloud
        .rows()
        .enumerate()
        .map(|(i, p)| p.iter().map(|x| x * (0.5 + i as f64)).collect())
        .collect();
    let scaled = PointCloud::from_rows(&scaled).unwrap();
    let rows: Vec<usize> = (0..50).collect();
    let a = mean_pairwise_cosine_distance(&cloud, &rows).unwrap();
    let b = mean_pairwise_cosine_distance(&scaled, &rows).unwrap();
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

fn labelled(seed: u64, m: usize, d: usize) -> DiffRepresentation {
    let labels = (0..m)
        .map(|i| {
            if i % 2 == 0 {
                Condition::Clean
            } else {
                Condition::Poisoned
            }
        })
        .collect();
    DiffRepresentation::new(gaussian_cloud(seed, m, d), labels, seed as u32).unwrap()
}

#[test]
fn clean_split_is_calibrated_under_the_null() {
    let layers: Vec<DiffRepresentation> = (0..10).map(|l| labelled(100 + l, 160, 6)).collect();
    let ratios: Vec<Vec<f64>> = layers
        .iter()
        .map(|rep| {
            local_dispersion_ratio(&rep.vectors, 30)
                .unwrap()
                .iter()
                .map(|d| d.ratio)
                .collect()
        })
        .collect();
    let mut flagged = 0;
    let mut total = 0;
    for seed in 0..20 {
        let mut results: Vec<LayerTestResult> = layers
            .iter()
            .zip(&ratios)
            .map(|(rep, r)| compare_ratios(r, rep, Comparison::CleanClean, seed).unwrap())
            .collect();
        adjust_across_layers(&mut results).unwrap();
        flagged += results.iter().filter(|r| r.significant).count();
        total += results.len();
    }
    assert!(flagged as f64 <= 0.1 * total as f64, "{flagged} of {total}");
}

#[test]
fn mixed_halves_differ_by_noise_only() {
    let rep = labelled(7, 200, 5);
    let ratios: Vec<f64> = local_dispersion_ratio(&rep.vectors, 30)
        .unwrap()
        .iter()
        .map(|d| d.ratio)
        .collect();
    let diffs: Vec<f64> = (0..40)
        .map(|s| {
            let r = compare_ratios(&ratios, &rep, Comparison::MixedMixed, s).unwrap();
            r.mean_a - r.mean_b
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64).sqrt();
    assert!(
        mean.abs() < 3.0 * sd / (diffs.len() as f64).sqrt(),
        "mean {mean}, sd {sd}"
    );
}

#[test]
fn split_ablation_needs_rows() {
    let labels = vec![Condition::Clean; 40];
    let rep = DiffRepresentation::new(gaussian_cloud(8, 40, 3), labels, 0).unwrap();
    let err = split_ablation(&rep, Comparison::PoisonedPoisoned, 5, 0).unwrap_err();
    assert!(matches!(err, topolens::Error::Size(_)));
}

#[test]
fn fdr_flags_follow_adjusted_values() {
    let mut results: Vec<LayerTestResult> = (0..6)
        .map(|l| {
            let a: Vec<f64> = (0..10).map(|i| i as f64).collect();
            let b: Vec<f64> = (0..10).map(|i| i as f64 + l as f64 * 0.8).collect();
            let welch = welch_t(&a, &b).unwrap();
            LayerTestResult {
                layer: l,
                comparison: Comparison::CleanVsAdversarial,
                n_a: 10,
                n_b: 10,
                mean_a: 0.0,
                mean_b: 0.0,
                sem_a: 0.0,
                sem_b: 0.0,
                welch,
                p_adjusted: welch.p_value,
                significant: false,
            }
        })
        .collect();
    adjust_across_layers(&mut results).unwrap();
    for r in &results {
        assert!(r.p_adjusted >= r.welch.p_value);
        assert_eq!(r.significant, r.p_adjusted < 0.05);
    }
}
