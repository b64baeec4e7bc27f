use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use topolens::ph::{distance_matrix, rips_persistence, Metric, PointCloud, Threshold};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).take(2).map(|a| a.parse().unwrap()).collect();
    let (n, d) = (args.first().copied().unwrap_or(512), args.get(1).copied().unwrap_or(2));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ring = std::env::args().nth(3).is_some_and(|a| a == "ring");
    let coords: Vec<f64> = if ring {
        // noisy circle of radius sqrt(2), as produced by a looped layer pair
        (0..n)
            .flat_map(|_| {
                let theta = rand::Rng::random::<f64>(&mut rng) * std::f64::consts::TAU;
                let mut p = vec![2f64.sqrt() * theta.cos(), 2f64.sqrt() * theta.sin()];
                for x in &mut p {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *x += 0.05 * z;
                }
                p
            })
            .collect()
    } else {
        (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect()
    };
    let cloud = PointCloud::new(coords, n, d).unwrap();
    let t = Instant::now();
    let dist = distance_matrix(&cloud, Metric::Euclidean).unwrap();
    let t_dist = t.elapsed();
    let b = rips_persistence(&dist, 1, Threshold::Auto).unwrap();
    println!(
        "n={n} d={d}: distances {:?}, total {:?}, dim1 bars {}",
        t_dist,
        t.elapsed(),
        b.dim(1).count()
    );
}
