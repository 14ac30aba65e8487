//! Test-only oracles, kept independent of the solver and voting code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dsvm::ovo::{ClassLabel, Example, OvoModel};
use dsvm::svm::{BinaryLabel, FeatureVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Exact dual maximum by active-set enumeration.
///
/// Every multiplier is assigned to one of {0, c, free}; for each assignment
/// the equality-constrained stationary point of the free block is solved
/// as a linear system and kept if it lands inside the box. The best feasible
/// objective over all 3^n assignments is the global maximum of the concave
/// dual.
pub fn brute_force_dual(gram: &[Vec<f64>], y: &[f64], c: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    assert!(n <= 10, "enumeration is exponential");
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut rem = code;
        for s in state.iter_mut() {
            *s = (rem % 3) as u8;
            rem /= 3;
        }
        if let Some(lambda) = solve_face(gram, y, c, &state) {
            let obj = dual_objective(gram, y, &lambda);
            if obj > best.0 {
                best = (obj, lambda);
            }
        }
    }
    best
}

fn solve_face(gram: &[Vec<f64>], y: &[f64], c: f64, state: &[u8]) -> Option<Vec<f64>> {
    let n = y.len();
    let mut lambda = vec![0.0; n];
    let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
    for i in 0..n {
        if state[i] == 1 {
            lambda[i] = c;
        }
    }
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i][j];
    let fixed_sum: f64 = (0..n).filter(|&i| state[i] == 1).map(|i| c * y[i]).sum();
    if free.is_empty() {
        return (fixed_sum.abs() <= 1e-9).then_some(lambda);
    }
    // [Q_FF  y_F] [λ_F]   [1 − Q_FB λ_B]
    // [y_Fᵀ  0  ] [ν  ] = [ −y_Bᵀ λ_B  ]
    let m = free.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut rhs = DVector::<f64>::zeros(m + 1);
    for (r, &i) in free.iter().enumerate() {
        for (s, &j) in free.iter().enumerate() {
            a[(r, s)] = q(i, j);
        }
        a[(r, m)] = y[i];
        a[(m, r)] = y[i];
        let fixed: f64 = (0..n).filter(|&k| state[k] == 1).map(|k| q(i, k) * c).sum();
        rhs[r] = 1.0 - fixed;
    }
    rhs[m] = -fixed_sum;
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    let residual = (&a * &sol - &rhs).norm();
    if residual > 1e-7 * (1.0 + rhs.norm()) {
        return None;
    }
    for (r, &i) in free.iter().enumerate() {
        let v = sol[r];
        if v < -1e-9 || v > c + 1e-9 {
            return None;
        }
        lambda[i] = v.clamp(0.0, c);
    }
    let eq: f64 = lambda.iter().zip(y).map(|(l, yi)| l * yi).sum();
    (eq.abs() <= 1e-7).then_some(lambda)
}

pub fn dual_objective(gram: &[Vec<f64>], y: &[f64], lambda: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += lambda[i] * lambda[j] * y[i] * y[j] * gram[i][j];
        }
    }
    lambda.iter().sum::<f64>() - 0.5 * quad
}

pub fn linear_gram(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

pub struct Problem {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<BinaryLabel>,
    pub c: f64,
}

/// Seeded problem with at most 8 points and 3 features; both labels present.
pub fn random_problem(seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=8);
    let d = rng.gen_range(1..=3);
    let c = if seed.is_multiple_of(2) { 1.0 } else { 10.0 };
    let points = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let mut labels: Vec<BinaryLabel> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                BinaryLabel::Positive
            } else {
                BinaryLabel::Negative
            }
        })
        .collect();
    labels[0] = BinaryLabel::Positive;
    labels[1] = BinaryLabel::Negative;
    Problem { points, labels, c }
}

/// Isotropic Gaussian blobs with centres drawn in [-6, 6]^dim, shuffled.
pub fn gaussian_blobs(seed: u64, classes: usize, per_class: usize, dim: usize, spread: f64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).unwrap();
    let centres: Vec<Vec<f64>> = (0..classes).map(|_| (0..dim).map(|_| rng.gen_range(-6.0..6.0)).collect()).collect();
    let mut out = Vec::with_capacity(classes * per_class);
    for (k, centre) in centres.iter().enumerate() {
        for _ in 0..per_class {
            let x: Vec<f64> = centre.iter().map(|c| c + noise.sample(&mut rng)).collect();
            out.push(Example::new(FeatureVector::new(x).unwrap(), ClassLabel(k)));
        }
    }
    use rand::seq::SliceRandom;
    out.shuffle(&mut rng);
    out
}

/// Pairwise vote computed straight from each pair's support vectors,
/// without the library's decision or voting code.
pub fn oracle_predict(model: &OvoModel, z: &[f64]) -> ClassLabel {
    let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
    for pos in 0..model.classes().len() {
        tally.insert(pos, 0);
    }
    for pair in model.pairs() {
        let m = &pair.model;
        let mut f = m.bias();
        for ((sv, label), a) in m.support_vectors().iter().zip(m.support_labels()).zip(m.alphas()) {
            let k: f64 = sv.as_slice().iter().zip(z).map(|(p, q)| p * q).sum();
            f += a * label.sign() * k;
        }
        let winner = if f >= 0.0 { pair.first } else { pair.second };
        *tally.get_mut(&winner).unwrap() += 1;
    }
    // highest count, then the earliest class position
    let (pos, _) = tally
        .iter()
        .fold((0usize, 0usize), |best, (&p, &c)| if c > best.1 { (p, c) } else { best });
    model.classes()[pos]
}

pub fn binary_signs(labels: &[BinaryLabel]) -> Vec<f64> {
    labels.iter().map(|l| l.sign()).collect()
}

pub fn blob_dataset(seed: u64, classes: usize, per_class: usize, dim: usize, spread: f64) -> dsvm::data::Dataset {
    dsvm::data::Dataset {
        schema: dsvm::data::DatasetSchema {
            feature_count: dim,
            label_column: dsvm::data::LabelColumn::Index(dim),
            class_names: (0..classes).map(|k| k.to_string()).collect(),
            has_header: false,
        },
        examples: gaussian_blobs(seed, classes, per_class, dim, spread),
    }
}

/// Shards of the given sizes taken in order from `data`.
pub fn shards(data: &[Example], sizes: &[usize]) -> Vec<dsvm::protocol::SiteData> {
    dsvm::data::partition_horizontal(data, &dsvm::data::PartitionSpec::new(sizes.to_vec())).unwrap()
}
