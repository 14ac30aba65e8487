use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ovo::{evaluate, Example, OvoModel};

/// Diagonal sentinel: a site never scores its own model.
pub const DIAGONAL: f64 = -1.0;

#[derive(Debug, Deserialize)]
struct RawMatrix {
    n: usize,
    cells: Vec<Vec<f64>>,
}

/// Cross-site accuracy matrix.
///
/// Cell `(i, j)` is the accuracy (percent) of site `i`'s model on site `j`'s
/// evaluation data. It doubles as the weighted adjacency matrix of the
/// directed site graph, with edge `i → j` labeled by that cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct AccuracyMatrix {
    n: usize,
    cells: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for AccuracyMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.cells.len() != raw.n {
            return Err(Error::InvalidMatrix(format!("n = {} but {} rows", raw.n, raw.cells.len())));
        }
        Self::new(raw.cells)
    }
}

impl AccuracyMatrix {
    pub fn new(cells: Vec<Vec<f64>>) -> Result<Self> {
        let n = cells.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!("need at least 2 sites, got {n}")));
        }
        for (i, row) in cells.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!("row {i} has {} cells, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    if v != DIAGONAL {
                        return Err(Error::InvalidMatrix(format!("diagonal cell ({i}, {i}) is {v}, expected -1")));
                    }
                } else if !(0.0..=100.0).contains(&v) {
                    return Err(Error::InvalidMatrix(format!("cell ({i}, {j}) = {v} outside [0, 100]")));
                }
            }
        }
        Ok(Self { n, cells })
    }

    /// Parses the `{"n": .., "cells": [[..]]}` fixture format.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawMatrix = serde_json::from_str(text)?;
        Self::try_from(raw)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Fills every off-diagonal cell from `cell(i, j)`, in parallel.
    pub fn from_fn<F>(n: usize, cell: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        let cells = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Ok(DIAGONAL) } else { cell(i, j) })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, model: usize, site: usize) -> f64 {
        self.cells[model][site]
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// Maps every off-diagonal cell through `f`, keeping the sentinel.
    pub fn map_cells(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, &v)| if i == j { v } else { f(v) }).collect())
            .collect();
        Self::new(cells)
    }
}

/// Cell `(i, j)` = `evaluate(models[i], eval_sets[j])`, diagonal `-1`.
pub fn build_accuracy_matrix(models: &[OvoModel], eval_sets: &[&[Example]]) -> Result<AccuracyMatrix> {
    if models.len() != eval_sets.len() {
        return Err(Error::InvalidMatrix(format!(
            "{} models but {} evaluation sets",
            models.len(),
            eval_sets.len()
        )));
    }
    AccuracyMatrix::from_fn(models.len(), |i, j| evaluate(&models[i], eval_sets[j]))
}
