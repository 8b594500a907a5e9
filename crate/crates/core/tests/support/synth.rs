//! Seeded synthetic data with known ground truth.

use dsrs_core::ingest::FeatureMatrix;
use dsrs_core::numerics::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(prefix: &str, p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("{prefix}{j}")).collect()
}

pub fn feature_matrix(names: &[String], columns: &[Vec<f64>], y: Vec<f64>) -> FeatureMatrix {
    let x = Matrix::from_columns(columns).expect("equal column lengths");
    let ids = (0..y.len()).collect();
    FeatureMatrix::new(names.to_vec(), x, y, ids).expect("valid synthetic matrix")
}

/// `p` Gaussian columns of length `n`, each with its own location and scale
/// so that centring and scaling are exercised.
pub fn gaussian_columns(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    let z = Normal::new(0.0, 1.0).unwrap();
    (0..p)
        .map(|_| {
            let loc = rng.random_range(-50.0..50.0);
            let scale = 10f64.powf(rng.random_range(-1.0..2.0));
            (0..n).map(|_| loc + scale * z.sample(rng)).collect()
        })
        .collect()
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> Vec<f64> {
    let z = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| z.sample(rng)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes from `v` its projection onto the intercept and every column, by
/// two passes of modified Gram-Schmidt over an orthonormal basis.
pub fn orthogonalize(v: &[f64], columns: &[Vec<f64>]) -> Vec<f64> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let ones = vec![1.0; n];
    for c in std::iter::once(&ones).chain(columns) {
        let mut u = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let d = dot(&u, b);
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let len = norm(&u);
        basis.push(u.into_iter().map(|x| x / len).collect());
    }
    let mut out = v.to_vec();
    for _ in 0..2 {
        for b in &basis {
            let d = dot(&out, b);
            out.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
    }
    out
}

/// Linear response `b0 + Σ b_j x_j + e`.
pub fn linear_response(columns: &[Vec<f64>], b0: f64, b: &[f64], e: &[f64]) -> Vec<f64> {
    (0..e.len())
        .map(|i| b0 + columns.iter().zip(b).map(|(c, w)| w * c[i]).sum::<f64>() + e[i])
        .collect()
}

/// Naive two-pass Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

pub struct Planted {
    pub matrix: FeatureMatrix,
    pub informative: Vec<String>,
    pub noise: Vec<String>,
}

/// Three informative and four pure-noise features, interleaved, with
/// independent columns and a unit-variance error.
pub fn planted(seed: u64, n: usize) -> Planted {
    let mut r = rng(seed);
    let cols = gaussian_columns(&mut r, n, 7);
    let standardized: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let m = c.iter().sum::<f64>() / n as f64;
            let s = (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            c.iter().map(|x| (x - m) / s).collect()
        })
        .collect();
    let e = gaussian(&mut r, n, 1.0);
    let names = vec![
        "signal_a".to_string(),
        "noise_a".to_string(),
        "signal_b".to_string(),
        "noise_b".to_string(),
        "noise_c".to_string(),
        "signal_c".to_string(),
        "noise_d".to_string(),
    ];
    // Effects per standard deviation of each column.
    let effects = [1.5, 0.0, -1.0, 0.0, 0.0, 0.8, 0.0];
    let y = linear_response(&standardized, 2.0, &effects, &e);
    let informative = ["signal_a", "signal_b", "signal_c"].map(String::from).to_vec();
    let noise = ["noise_a", "noise_b", "noise_c", "noise_d"].map(String::from).to_vec();
    Planted {
        matrix: feature_matrix(&names, &cols, y),
        informative,
        noise,
    }
}

/// Two strong features and two weak ones whose coefficients are planted
/// exactly, so that the weak pair is insignificant with distinct p-values:
/// `weak_1` (coefficient 0.01) is worse than `weak_2` (0.06).
pub fn engineered_elimination() -> FeatureMatrix {
    let n = 120;
    let mut r = rng(5);
    let z = Normal::new(0.0, 1.0).unwrap();
    let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| z.sample(&mut r)).collect()).collect();
    let raw: Vec<f64> = (0..n).map(|_| z.sample(&mut r)).collect();
    let e = orthogonalize(&raw, &cols);
    let scale = ((n - 5) as f64).sqrt() / norm(&e);
    let e: Vec<f64> = e.iter().map(|x| x * scale).collect();
    let y = linear_response(&cols, 1.0, &[3.0, -2.0, 0.01, 0.06], &e);
    let names = ["strong_1", "strong_2", "weak_1", "weak_2"].map(String::from).to_vec();
    feature_matrix(&names, &cols, y)
}

/// Score sets for the clustering oracle: sizes 2 to 10 with uniform,
/// two-mode, tied and clustered shapes.
pub fn kmeans_fixture() -> Vec<Vec<f64>> {
    let mut r = rng(2024);
    let mut cases = Vec::new();
    while cases.len() < 50 {
        let n = r.random_range(2..=10usize);
        let shape = cases.len() % 4;
        let s: Vec<f64> = match shape {
            0 => (0..n).map(|_| r.random_range(0.0..2.0)).collect(),
            1 => (0..n)
                .map(|i| {
                    let centre = if i % 2 == 0 { 0.3 } else { 1.5 };
                    centre + 0.2 * r.random_range(-1.0..1.0)
                })
                .collect(),
            2 => (0..n).map(|_| f64::from(r.random_range(0..4u8)) * 0.25).collect(),
            _ => {
                let u = Uniform::new(0.0f64, 1.0).unwrap();
                (0..n).map(|_| u.sample(&mut r).powi(3) * 3.0).collect()
            }
        };
        let distinct = s.iter().any(|&v| v != s[0]);
        if distinct {
            cases.push(s);
        }
    }
    cases
}

/// Within-cluster SSE of a 0/1 assignment, each cluster about its centroid.
pub fn partition_sse(scores: &[f64], assignments: &[u8]) -> f64 {
    let mut total = 0.0;
    for k in 0..2u8 {
        let members: Vec<f64> = scores
            .iter()
            .zip(assignments)
            .filter(|(_, &c)| c == k)
            .map(|(&x, _)| x)
            .collect();
        if members.is_empty() {
            continue;
        }
        let m = members.iter().sum::<f64>() / members.len() as f64;
        total += members.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    total
}

/// True when no single point can change cluster, leaving both clusters
/// non-empty, and lower the SSE by more than `tol`.
pub fn single_swap_optimal(scores: &[f64], assignments: &[u8], tol: f64) -> bool {
    let base = partition_sse(scores, assignments);
    (0..scores.len()).all(|i| {
        let mut moved = assignments.to_vec();
        moved[i] ^= 1;
        let both = moved.contains(&0) && moved.contains(&1);
        !both || partition_sse(scores, &moved) >= base - tol
    })
}

/// Minimum SSE over every split into two non-empty clusters, with the
/// minimizing assignment.
pub fn best_partition(scores: &[f64]) -> (f64, Vec<u8>) {
    let n = scores.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1..(1u32 << n) - 1 {
        let a: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        let sse = partition_sse(scores, &a);
        if sse < best.0 {
            best = (sse, a);
        }
    }
    best
}
