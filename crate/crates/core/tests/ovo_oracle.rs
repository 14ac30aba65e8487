mod common;

use common::{gaussian_blobs, oracle_predict};
use dsvm::ovo::{pair_count, predict_ovo, train_ovo, votes};
use dsvm::svm::TrainParams;

#[test]
fn predictions_match_pairwise_vote_oracle() {
    for seed in 0..12u64 {
        let classes = 3 + (seed as usize % 3);
        let per_class = 300 / classes;
        // overlapping blobs so that votes are actually contested
        let data = gaussian_blobs(seed, classes, per_class, 2, 2.5);
        assert!(data.len() <= 300);
        let model = train_ovo(&data, &TrainParams::default()).unwrap();
        for e in &data {
            let z = e.features.as_slice();
            assert_eq!(predict_ovo(&model, z).unwrap(), oracle_predict(&model, z), "seed {seed}");
            assert_eq!(votes(&model, z).unwrap().iter().sum::<usize>(), pair_count(classes));
        }
    }
}

#[test]
fn trained_pair_count_is_n_choose_2() {
    for n in 2..=12 {
        let data = gaussian_blobs(n as u64, n, 4, 2, 0.3);
        let model = train_ovo(&data, &TrainParams::default()).unwrap();
        assert_eq!(model.pairs().len(), n * (n - 1) / 2, "n = {n}");
        assert_eq!(pair_count(n), n * (n - 1) / 2);
        for w in model.pairs().windows(2) {
            assert!((w[0].first, w[0].second) < (w[1].first, w[1].second));
        }
    }
}

#[test]
fn well_separated_blobs_are_learned() {
    let data = gaussian_blobs(99, 4, 50, 3, 0.2);
    let model = train_ovo(&data, &TrainParams::default()).unwrap();
    assert_eq!(dsvm::ovo::evaluate(&model, &data).unwrap(), 100.0);
}
