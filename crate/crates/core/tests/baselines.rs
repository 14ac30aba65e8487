mod common;

use std::collections::BTreeMap;

use common::{gaussian_blobs, shards};
use dsvm::baselines::{evaluate_ensemble, pool_sites, predict_ensemble, train_centralized, EnsembleModel, ResourceCap};
use dsvm::ovo::{predict_ovo, train_ovo, ClassLabel};
use dsvm::protocol::train_local_models;
use dsvm::svm::TrainParams;
use dsvm::Error;

#[test]
fn centralized_equals_training_on_the_union() {
    let data = gaussian_blobs(11, 3, 40, 2, 1.5);
    let sites = shards(&data, &[40, 40, 40]);
    let fit = train_centralized(&sites, &TrainParams::default(), &ResourceCap::default()).unwrap();
    let direct = train_ovo(&pool_sites(&sites), &TrainParams::default()).unwrap();
    assert_eq!(fit.model, direct);
    assert_eq!(pool_sites(&sites), data);
}

#[test]
fn cap_turns_oversized_training_into_an_error() {
    let data = gaussian_blobs(11, 3, 40, 2, 1.5);
    let sites = shards(&data, &[60, 60]);
    let cap = ResourceCap {
        max_training_rows: Some(100),
    };
    let err = train_centralized(&sites, &TrainParams::default(), &cap).unwrap_err();
    assert!(matches!(err, Error::ResourceExhausted { rows: 120, limit: 100 }));
    // each shard alone fits
    assert!(sites.iter().all(|s| cap.check(s.len()).is_ok()));
}

#[test]
fn ensemble_is_plain_majority_of_members() {
    let data = gaussian_blobs(21, 4, 30, 2, 2.5);
    let sites = shards(&data, &[40, 40, 40]);
    let members: Vec<_> = train_local_models(&sites, &TrainParams::default())
        .unwrap()
        .into_iter()
        .map(|f| f.model)
        .collect();
    let ensemble = EnsembleModel::new(members.clone()).unwrap();
    for e in &data {
        let z = e.features.as_slice();
        let mut tally: BTreeMap<ClassLabel, usize> = BTreeMap::new();
        for m in &members {
            *tally.entry(predict_ovo(m, z).unwrap()).or_default() += 1;
        }
        let top = *tally.values().max().unwrap();
        let expected = *tally.iter().find(|(_, &c)| c == top).unwrap().0;
        assert_eq!(predict_ensemble(&ensemble, z).unwrap(), expected);
    }
    let eval = evaluate_ensemble(&ensemble, &data).unwrap();
    assert!(eval.accuracy > 0.0 && eval.test_seconds >= 0.0);
}

#[test]
fn ensemble_rejects_mixed_widths() {
    let a = train_ovo(&gaussian_blobs(1, 2, 5, 2, 1.0), &TrainParams::default()).unwrap();
    let b = train_ovo(&gaussian_blobs(1, 2, 5, 3, 1.0), &TrainParams::default()).unwrap();
    assert!(matches!(
        EnsembleModel::new(vec![a, b]),
        Err(Error::DimensionMismatch { expected: 2, found: 3 })
    ));
}
