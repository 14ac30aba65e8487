use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ovo::Example;
use crate::protocol::SiteData;

/// Shard sizes `p_1..p_n` for a horizontal partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub shuffle_seed: Option<u64>,
}

impl PartitionSpec {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self { sizes, shuffle_seed: None }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn validate(&self, available: usize) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Partition("no shard sizes given".into()));
        }
        if self.sizes.contains(&0) {
            return Err(Error::Partition("shard sizes must be positive".into()));
        }
        if self.total() > available {
            return Err(Error::Partition(format!(
                "shards need {} rows but only {available} are available",
                self.total()
            )));
        }
        Ok(())
    }
}

pub(crate) fn seeded_permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Splits rows into contiguous shards, after an optional seeded shuffle.
///
/// Shard `k` gets site id `k + 1`. Rows beyond `Σ sizes` are left out.
pub fn partition_horizontal(data: &[Example], spec: &PartitionSpec) -> Result<Vec<SiteData>> {
    spec.validate(data.len())?;
    let order: Vec<usize> = match spec.shuffle_seed {
        Some(seed) => seeded_permutation(data.len(), seed),
        None => (0..data.len()).collect(),
    };
    let mut sites = Vec::with_capacity(spec.sizes.len());
    let mut start = 0;
    for (k, &size) in spec.sizes.iter().enumerate() {
        let examples = order[start..start + size].iter().map(|&i| data[i].clone()).collect();
        sites.push(SiteData::new(k + 1, examples)?);
        start += size;
    }
    Ok(sites)
}

/// Seeded disjoint split into `(train, test)`; both keep the input order.
pub fn train_test_split(data: &[Example], test_size: usize, seed: u64) -> Result<(Vec<Example>, Vec<Example>)> {
    if test_size == 0 {
        return Err(Error::Split("test set must not be empty".into()));
    }
    if test_size >= data.len() {
        return Err(Error::Split(format!(
            "test size {test_size} leaves no training rows out of {}",
            data.len()
        )));
    }
    let perm = seeded_permutation(data.len(), seed);
    let mut in_test = vec![false; data.len()];
    for &i in &perm[..test_size] {
        in_test[i] = true;
    }
    let (test, train): (Vec<_>, Vec<_>) = data.iter().cloned().zip(in_test).partition(|(_, t)| *t);
    Ok((
        train.into_iter().map(|(e, _)| e).collect(),
        test.into_iter().map(|(e, _)| e).collect(),
    ))
}
